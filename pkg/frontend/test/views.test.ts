import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import { describe, expect, it } from 'vitest';

import {
  renderErrorBanner,
  renderRecommendationTable,
  renderReports,
  toRowViews,
} from '../src/views.js';
import type { EvalReportWire, FeatureReportWire, RecommendationPageWire } from '../src/types.js';

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(__dirname, 'fixtures', name), 'utf8')) as T;
}

const page0 = fixture<RecommendationPageWire>('page0.json');
const page1 = fixture<RecommendationPageWire>('page1.json');
const features = fixture<FeatureReportWire>('features.json');
const insufficient = fixture<EvalReportWire>('offline_eval_insufficient.json');

describe('recommendation table (recorded responses)', () => {
  it('renders all twenty rows with probability and smart-match columns', () => {
    const rows = toRowViews(page0);
    expect(rows).toHaveLength(20);
    const html = renderRecommendationTable(rows, { pageIndex: page0.pageIndex, hasMore: page0.hasMore });
    expect(html.match(/<tr data-event-id=/g)).toHaveLength(20);
    expect(html).toContain('<th>probability</th>');
    expect(html).toContain('<th>smart match</th>');
  });

  it('every rendered number traces back to a response field', () => {
    const rows = toRowViews(page0);
    const html = renderRecommendationTable(rows, { pageIndex: 0, hasMore: true });
    const probabilities = [...html.matchAll(/<td class="probability">([\d.]+)<\/td>/g)].map((m) => m[1]);
    const totals = [...html.matchAll(/<td class="total">([\d.]+)<\/td>/g)].map((m) => m[1]);
    expect(probabilities).toEqual(page0.rows.map((row) => row.probability.toFixed(2)));
    expect(totals).toEqual(page0.rows.map((row) => row.totalSmartMatchScore.toFixed(2)));
  });

  it('rows carry their event id for reward submission', () => {
    const rows = toRowViews(page0);
    rows.forEach((row, index) => {
      expect(row.eventId).toBe(page0.eventIds[index]);
      expect(row.eventId).not.toBe('');
    });
  });

  it('shows the next-20 control only while more pages exist', () => {
    const first = renderRecommendationTable(toRowViews(page0), { pageIndex: 0, hasMore: page0.hasMore });
    expect(first).toContain('class="next-page"');
    expect(first).toContain('data-next="1"');
    const last = renderRecommendationTable(toRowViews(page1), { pageIndex: 1, hasMore: page1.hasMore });
    expect(last).not.toContain('class="next-page"');
  });

  it('renders the reward slider with a 0.01 step and locks sent rows', () => {
    const rows = toRowViews(page0);
    const pending = renderRecommendationTable(rows, { pageIndex: 0, hasMore: false });
    expect(pending).toContain('step="0.01"');
    expect(pending).not.toContain('disabled');
    rows[0]!.feedback = 'Sent';
    const locked = renderRecommendationTable(rows, { pageIndex: 0, hasMore: false });
    expect(locked).toContain('state-sent');
    expect(locked).toContain('disabled');
  });

  it('error banner escapes markup and does not replace the table', () => {
    const banner = renderErrorBanner('API 404: <b>unknown job</b>');
    expect(banner).toContain('role="alert"');
    expect(banner).not.toContain('<b>');
  });
});

describe('reports view (recorded responses)', () => {
  it('renders the insufficient-events notice for an empty evaluation', () => {
    const html = renderReports(features, insufficient);
    expect(html).toContain('insufficient events');
  });

  it('renders score-sorted feature rows straight from the payload', () => {
    const html = renderReports(features, insufficient);
    for (const row of features.rows) {
      expect(html).toContain(`<td>${row.feature_name}</td>`);
      expect(html).toContain(`<td>${row.score}</td>`);
    }
  });

  it('draws one CI bar per policy when evaluation rows exist', () => {
    const evaluation: EvalReportWire = {
      rows: [
        { policy: 'Online', estimated_avg_reward: 0.41, ci_low: 0.38, ci_high: 0.44, n_events: 1200 },
        { policy: 'Baseline1', estimated_avg_reward: 0.55, ci_low: 0.51, ci_high: 0.59, n_events: 1200 },
        { policy: 'BaselineRand', estimated_avg_reward: 0.3, ci_low: 0.27, ci_high: 0.33, n_events: 1200 },
      ],
      winner: 'Baseline1',
      applied: false,
      status: 'OnlinePolicyRetained',
    };
    const html = renderReports(features, evaluation);
    expect(html.match(/class="policy-bar"/g)).toHaveLength(3);
    expect(html).toContain('data-winner="Baseline1"');
    expect(html).toContain('0.550 [0.510, 0.590]');
    expect(html).toContain('OnlinePolicyRetained');
  });
});
