/**
 * Thin fetch client for the recommendation API.
 *
 * The console talks to the documented HTTP surface and nothing else; no
 * store access, no score math. Errors carry the HTTP status so callers
 * can branch on 404/410/422 without string matching.
 */

import type {
  EvalReportWire,
  JobQuery,
  ModelKey,
  RecommendationPageWire,
  FeatureReportWire,
  RewardOutcome,
  TravelerQuery,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(`API ${status}: ${detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as T;
  }

  async recommendTravelers(query: TravelerQuery, page = 0): Promise<RecommendationPageWire> {
    return this.postJson(`/recommendations/travelers?page=${page}`, query);
  }

  async recommendJobs(query: JobQuery, page = 0): Promise<RecommendationPageWire> {
    return this.postJson(`/recommendations/jobs?page=${page}`, query);
  }

  /**
   * Deliver a reward for one ranked event.
   *
   * 204 resolves (duplicate flagged via the Duplicate header); 410 and
   * other statuses reject with an ApiError so the feedback state machine
   * can mark the row Expired or keep it retryable.
   */
  async reward(model: ModelKey, eventId: string, value: number): Promise<RewardOutcome> {
    const response = await this.fetchFn(`${this.baseUrl}/rewards/${model}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ eventId, value }),
    });
    if (response.status === 204) {
      return { status: 204, duplicate: response.headers.get('Duplicate') === 'true' };
    }
    throw new ApiError(response.status, await safeDetail(response));
  }

  async featureReport(model: string): Promise<FeatureReportWire> {
    return this.getJson(`/reports/feature-effectiveness?model=${model}`);
  }

  async offlineEval(model: string): Promise<EvalReportWire> {
    return this.getJson(`/reports/offline-eval?model=${model}`);
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!response.ok) {
      throw new ApiError(response.status, await safeDetail(response));
    }
    return (await response.json()) as T;
  }
}

async function safeDetail(response: Response): Promise<string> {
  try {
    const payload = await response.json();
    return typeof payload?.detail === 'string' ? payload.detail : response.statusText;
  } catch {
    return response.statusText;
  }
}
