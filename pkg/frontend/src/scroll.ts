// Scroll progress reporting: the server keeps the maximum, the client keeps
// chatter down. Events fire at most once per interval and always carry the
// maximum fraction seen so far.

export interface ScrollEvent {
  fraction: number;
}

export class MaxScrollReporter {
  private maxFraction = 0;
  private lastSent = 0; // zero progress is the server default, never worth an event
  private lastSentAt = -Infinity;

  constructor(private readonly intervalMs: number = 1000) {}

  /** Observe a scroll position; returns an event to post now, or null. */
  record(fraction: number, nowMs: number): ScrollEvent | null {
    if (fraction > this.maxFraction) this.maxFraction = Math.min(1, fraction);
    return this.poll(nowMs);
  }

  /** Called by a timer tick: flush a pending max increase once the interval allows. */
  poll(nowMs: number): ScrollEvent | null {
    if (this.maxFraction <= this.lastSent) return null;
    if (nowMs - this.lastSentAt < this.intervalMs) return null;
    this.lastSent = this.maxFraction;
    this.lastSentAt = nowMs;
    return { fraction: this.maxFraction };
  }
}
