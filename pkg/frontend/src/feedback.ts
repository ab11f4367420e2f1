/**
 * Per-row feedback state machine.
 *
 * A row starts Pending; a 204 moves it to Sent, a 410 to Expired (the
 * reward window closed), and a network failure leaves it Pending with a
 * retry affordance. Controls lock once Sent or Expired, and an in-flight
 * guard makes double-clicks issue exactly one request.
 */

import { ApiError } from './api.js';
import type { RewardOutcome } from './types.js';

export type FeedbackState = 'Pending' | 'Sent' | 'Expired';

export const EXPIRED_TOOLTIP =
  'The reward wait time for this recommendation has passed; the event already settled.';

export type RewardSender = (eventId: string, value: number) => Promise<RewardOutcome>;

export class RowFeedback {
  state: FeedbackState = 'Pending';
  /** Non-empty when the last submit failed recoverably (retry offered). */
  retryMessage = '';
  tooltip = '';
  private inFlight = false;

  constructor(
    readonly eventId: string,
    readonly actionId: string,
  ) {}

  get locked(): boolean {
    return this.state !== 'Pending';
  }

  /**
   * Submit a slider value in [0, 1]; resolves to the resulting state.
   * Calls while locked or in flight are ignored without a request.
   */
  async submit(value: number, send: RewardSender): Promise<FeedbackState> {
    if (this.locked || this.inFlight) {
      return this.state;
    }
    this.inFlight = true;
    try {
      await send(this.eventId, value);
      this.state = 'Sent';
      this.retryMessage = '';
    } catch (error) {
      if (error instanceof ApiError && error.status === 410) {
        this.state = 'Expired';
        this.tooltip = EXPIRED_TOOLTIP;
      } else {
        this.retryMessage = error instanceof Error ? error.message : String(error);
      }
    } finally {
      this.inFlight = false;
    }
    return this.state;
  }
}

/** Clamp and quantize a slider value to the 0.00-1.00, step-0.01 grid. */
export function quantizeReward(raw: number): number {
  const clamped = Math.min(1, Math.max(0, raw));
  return Math.round(clamped * 100) / 100;
}
