/**
 * Wire types for the bidimatch HTTP API.
 *
 * Every field mirrors the server's JSON verbatim; the console never
 * invents numbers, it only formats what the API returned.
 */

export type ModelKey = 'traveler-model' | 'job-model';

export interface RecommendationRowWire {
  actionId: string;
  probability: number;
  totalSmartMatchScore: number;
  breakdown: Record<string, number>;
}

export interface RecommendationPageWire {
  eventIds: string[];
  rows: RecommendationRowWire[];
  pageIndex: number;
  hasMore: boolean;
}

export interface FeatureReportRowWire {
  rank: number;
  namespace: string;
  feature_name: string;
  score: number;
  occurrences: number;
}

export interface FeatureReportWire {
  rows: FeatureReportRowWire[];
}

export interface EvalRowWire {
  policy: string;
  estimated_avg_reward: number;
  ci_low: number;
  ci_high: number;
  n_events: number;
}

export interface EvalReportWire {
  rows: EvalRowWire[];
  winner: string;
  applied: boolean;
  status: string;
}

/** Outcome of a reward POST, as the console needs to interpret it. */
export interface RewardOutcome {
  status: number;
  duplicate: boolean;
}

export type TravelerQuery = { jobId: string } | { job: Record<string, unknown> };
export type JobQuery = { contactId: string } | { traveler: Record<string, unknown> };
