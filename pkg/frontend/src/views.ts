/**
 * Pure HTML renderers for the console.
 *
 * Every number displayed comes straight from an API response field
 * (probability, totalSmartMatchScore, breakdown entries, report scores);
 * rendering only formats, so snapshot tests can trace each value back
 * to the wire payload. Functions return HTML strings and touch no DOM.
 */

import type { FeedbackState } from './feedback.js';
import type {
  EvalReportWire,
  FeatureReportWire,
  RecommendationPageWire,
} from './types.js';

export interface RecommendationRowView {
  actionId: string;
  probability: number;
  totalSmartMatchScore: number;
  breakdown: Record<string, number>;
  eventId: string;
  feedback: FeedbackState;
  tooltip: string;
}

/** Pair each row with its event id and a fresh feedback state. */
export function toRowViews(page: RecommendationPageWire): RecommendationRowView[] {
  return page.rows.map((row, index) => ({
    actionId: row.actionId,
    probability: row.probability,
    totalSmartMatchScore: row.totalSmartMatchScore,
    breakdown: row.breakdown,
    eventId: page.eventIds[index] ?? '',
    feedback: 'Pending',
    tooltip: '',
  }));
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function breakdownTitle(breakdown: Record<string, number>): string {
  return Object.entries(breakdown)
    .map(([component, score]) => `${component}: ${score.toFixed(2)}`)
    .join('\n');
}

/**
 * Render the top-N table: label, model probability, smart-match total,
 * a 0.00-1.00 step-0.01 reward slider, and the row's feedback state.
 * The next-20 control appears only while the API reports more pages.
 */
export function renderRecommendationTable(
  rows: RecommendationRowView[],
  options: { pageIndex: number; hasMore: boolean },
): string {
  const body = rows
    .map((row) => {
      const disabled = row.feedback === 'Pending' ? '' : ' disabled';
      const tooltip = row.tooltip ? ` title="${escapeHtml(row.tooltip)}"` : '';
      return (
        `<tr data-event-id="${escapeHtml(row.eventId)}" data-action-id="${escapeHtml(row.actionId)}">` +
        `<td class="action" title="${escapeHtml(breakdownTitle(row.breakdown))}">${escapeHtml(row.actionId)}</td>` +
        `<td class="probability">${row.probability.toFixed(2)}</td>` +
        `<td class="total">${row.totalSmartMatchScore.toFixed(2)}</td>` +
        `<td class="reward"><input type="range" min="0" max="1" step="0.01" value="1.00"${disabled}>` +
        `<button class="send"${disabled}>send</button></td>` +
        `<td class="state state-${row.feedback.toLowerCase()}"${tooltip}>${row.feedback}</td>` +
        `</tr>`
      );
    })
    .join('');
  const nextControl = options.hasMore
    ? `<button class="next-page" data-next="${options.pageIndex + 1}">next 20</button>`
    : '';
  return (
    `<table class="recommendations"><thead><tr>` +
    `<th>candidate</th><th>probability</th><th>smart match</th><th>reward</th><th>feedback</th>` +
    `</tr></thead><tbody>${body}</tbody></table>${nextControl}`
  );
}

/** Non-blocking error banner; the table underneath stays usable. */
export function renderErrorBanner(message: string): string {
  return `<div class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

export function renderStaleNotice(): string {
  return `<div class="banner stale">showing earlier results; retry to refresh</div>`;
}

/** Feature table plus per-policy estimate bars with confidence whiskers. */
export function renderReports(features: FeatureReportWire, evaluation: EvalReportWire): string {
  const featureRows = features.rows
    .map(
      (row) =>
        `<tr><td>${row.rank}</td><td>${escapeHtml(row.namespace)}</td>` +
        `<td>${escapeHtml(row.feature_name)}</td><td>${row.score}</td><td>${row.occurrences}</td></tr>`,
    )
    .join('');
  const featureTable =
    `<table class="features"><thead><tr>` +
    `<th>#</th><th>namespace</th><th>feature</th><th>score</th><th>occurrences</th>` +
    `</tr></thead><tbody>${featureRows}</tbody></table>`;

  if (evaluation.rows.length === 0) {
    return featureTable + `<div class="banner notice">insufficient events for offline evaluation</div>`;
  }
  const bars = evaluation.rows
    .map((row) => {
      const width = Math.round(row.estimated_avg_reward * 100);
      return (
        `<div class="policy-bar" data-policy="${escapeHtml(row.policy)}">` +
        `<span class="label">${escapeHtml(row.policy)}</span>` +
        `<span class="bar" style="width:${width}%"></span>` +
        `<span class="estimate">${row.estimated_avg_reward.toFixed(3)} ` +
        `[${row.ci_low.toFixed(3)}, ${row.ci_high.toFixed(3)}]</span></div>`
      );
    })
    .join('');
  const status = evaluation.status ? `<div class="eval-status">${escapeHtml(evaluation.status)}</div>` : '';
  return featureTable + `<div class="eval-chart" data-winner="${escapeHtml(evaluation.winner)}">${bars}</div>` + status;
}
