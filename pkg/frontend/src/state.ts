/** Review-queue store: optimistic marks reconciled against server
 * acknowledgments. A mark that the server never acknowledged is kept on a
 * retry list and surfaced in the banner; it is never silently dropped. The
 * hit-rate shown next to the queue is the server's number, refreshed after
 * every acknowledged mark, never recomputed client-side. */

import { ApiClient, LabelValue, QueueItem } from "./api.js";

export interface QueueEntry extends QueueItem {
  pending: boolean;
  failed: boolean;
}

export interface FailedMark {
  docId: string;
  relevant: boolean;
  message: string;
}

export type StoreListener = () => void;

export class ReviewQueueStore {
  entries: QueueEntry[] = [];
  cursor = 0;
  hitRate: number | null = null;
  labeledCount = 0;
  failedMarks: FailedMark[] = [];
  banner: string | null = null;

  private listeners: StoreListener[] = [];

  constructor(
    private readonly client: ApiClient,
    readonly roundId: number,
  ) {}

  subscribe(listener: StoreListener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Hydrate from the server; safe to call again mid-session (reload). */
  async load(): Promise<void> {
    const items = await this.client.getQueue(this.roundId);
    this.entries = items.map((item) => ({ ...item, pending: false, failed: false }));
    if (this.cursor >= this.entries.length) this.cursor = 0;
    await this.refreshRoundNumbers();
    this.notify();
  }

  private async refreshRoundNumbers(): Promise<void> {
    const round = await this.client.getRound(this.roundId);
    this.hitRate = round.hit_rate;
    this.labeledCount = round.labels;
  }

  entry(docId: string): QueueEntry | undefined {
    return this.entries.find((e) => e.doc_id === docId);
  }

  current(): QueueEntry | null {
    return this.entries[this.cursor] ?? null;
  }

  advance(step = 1): void {
    if (this.entries.length === 0) return;
    this.cursor = Math.min(Math.max(this.cursor + step, 0), this.entries.length - 1);
    this.notify();
  }

  /** Optimistically set the label, POST it, then adopt the server's effective
   * state from the acknowledgment. */
  async mark(docId: string, relevant: boolean): Promise<void> {
    const entry = this.entry(docId);
    if (!entry) throw new Error(`no queue entry ${docId}`);
    const optimistic: LabelValue = relevant ? "relevant" : "irrelevant";
    entry.label = optimistic;
    entry.pending = true;
    entry.failed = false;
    this.notify();
    try {
      const ack = await this.client.postLabel(this.roundId, docId, relevant);
      entry.label = ack.effective.relevant ? "relevant" : "irrelevant";
      entry.pending = false;
      await this.refreshRoundNumbers();
      this.banner = null;
    } catch (err) {
      entry.pending = false;
      entry.failed = true;
      const message = err instanceof Error ? err.message : String(err);
      this.failedMarks.push({ docId, relevant, message });
      this.banner = `label for ${docId} not saved (${message}); it will be retried`;
    }
    this.notify();
  }

  async markCurrentAndAdvance(relevant: boolean): Promise<void> {
    const entry = this.current();
    if (!entry) return;
    await this.mark(entry.doc_id, relevant);
    this.advance(1);
  }

  /** Re-POST everything that previously failed, in order. */
  async retryFailed(): Promise<void> {
    const queued = this.failedMarks;
    this.failedMarks = [];
    for (const mark of queued) {
      await this.mark(mark.docId, mark.relevant);
    }
  }

  labeledFraction(): number {
    if (this.entries.length === 0) return 0;
    const labeled = this.entries.filter((e) => e.label !== "unlabeled").length;
    return labeled / this.entries.length;
  }
}
