/**
 * Browser entry point: wires the API client, feedback state machines,
 * and renderers into the page. Configuration is a single API base URL
 * (query parameter ?api=… or same-origin default).
 */

import { ApiClient } from './api.js';
import { quantizeReward, RowFeedback } from './feedback.js';
import {
  renderErrorBanner,
  renderRecommendationTable,
  renderReports,
  renderStaleNotice,
  toRowViews,
  type RecommendationRowView,
} from './views.js';
import type { ModelKey, RecommendationPageWire } from './types.js';

interface Selection {
  kind: 'job' | 'traveler';
  id: string;
}

export class RecruiterConsole {
  private rows: RecommendationRowView[] = [];
  private feedback = new Map<string, RowFeedback>();
  private page: RecommendationPageWire | null = null;
  private selection: Selection | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly mount: HTMLElement,
    private readonly banner: HTMLElement,
  ) {}

  /** Fetch and render one recommendation page for the selection. */
  async showRecommendations(selection: Selection, pageIndex = 0): Promise<void> {
    this.selection = selection;
    try {
      this.page =
        selection.kind === 'job'
          ? await this.api.recommendTravelers({ jobId: selection.id }, pageIndex)
          : await this.api.recommendJobs({ contactId: selection.id }, pageIndex);
    } catch (error) {
      this.banner.innerHTML =
        renderErrorBanner(error instanceof Error ? error.message : String(error)) +
        (this.page ? renderStaleNotice() : '');
      return;
    }
    this.banner.innerHTML = '';
    this.rows = toRowViews(this.page);
    this.feedback = new Map(
      this.rows.map((row) => [row.eventId + row.actionId, new RowFeedback(row.eventId, row.actionId)]),
    );
    this.render();
  }

  private rewardModel(): ModelKey {
    return this.selection?.kind === 'traveler' ? 'job-model' : 'traveler-model';
  }

  /** Submit a slider value for one row; re-renders with the new state. */
  async submitReward(eventId: string, actionId: string, value: number): Promise<void> {
    const machine = this.feedback.get(eventId + actionId);
    const row = this.rows.find((r) => r.eventId === eventId && r.actionId === actionId);
    if (!machine || !row) {
      return;
    }
    const model = this.rewardModel();
    await machine.submit(quantizeReward(value), (id, v) => this.api.reward(model, id, v));
    row.feedback = machine.state;
    row.tooltip = machine.tooltip;
    if (machine.retryMessage) {
      this.banner.innerHTML = renderErrorBanner(`reward failed, still pending: ${machine.retryMessage}`);
    }
    this.render();
  }

  private render(): void {
    if (!this.page) {
      return;
    }
    this.mount.innerHTML = renderRecommendationTable(this.rows, {
      pageIndex: this.page.pageIndex,
      hasMore: this.page.hasMore,
    });
    this.mount.querySelectorAll<HTMLButtonElement>('button.send').forEach((button) => {
      button.addEventListener('click', () => {
        const tr = button.closest('tr');
        const slider = tr?.querySelector<HTMLInputElement>('input[type=range]');
        if (tr && slider) {
          void this.submitReward(
            tr.dataset.eventId ?? '',
            tr.dataset.actionId ?? '',
            Number(slider.value),
          );
        }
      });
    });
    const next = this.mount.querySelector<HTMLButtonElement>('button.next-page');
    if (next && this.selection) {
      const selection = this.selection;
      next.addEventListener('click', () => {
        void this.showRecommendations(selection, Number(next.dataset.next));
      });
    }
  }

  /** Render the evaluation reports panel for a model. */
  async showReports(model: 'traveler' | 'job', target: HTMLElement): Promise<void> {
    try {
      const [features, evaluation] = await Promise.all([
        this.api.featureReport(model),
        this.api.offlineEval(model),
      ]);
      target.innerHTML = renderReports(features, evaluation);
    } catch (error) {
      target.innerHTML = renderErrorBanner(error instanceof Error ? error.message : String(error));
    }
  }
}

function boot(): void {
  const params = new URLSearchParams(window.location.search);
  const api = new ApiClient(params.get('api') ?? '');
  const mount = document.getElementById('recommendations');
  const banner = document.getElementById('banner');
  const reports = document.getElementById('reports');
  if (!mount || !banner) {
    return;
  }
  const console_ = new RecruiterConsole(api, mount, banner);
  const form = document.getElementById('selector') as HTMLFormElement | null;
  form?.addEventListener('submit', (event) => {
    event.preventDefault();
    const kind = (form.elements.namedItem('kind') as HTMLSelectElement).value as 'job' | 'traveler';
    const id = (form.elements.namedItem('entity') as HTMLInputElement).value.trim();
    if (id) {
      void console_.showRecommendations({ kind, id });
      if (reports) {
        void console_.showReports(kind === 'job' ? 'traveler' : 'job', reports);
      }
    }
  });
}

if (typeof document !== 'undefined' && typeof window !== 'undefined') {
  boot();
}
