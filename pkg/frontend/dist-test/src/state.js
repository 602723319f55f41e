/** Review-queue store: optimistic marks reconciled against server
 * acknowledgments. A mark that the server never acknowledged is kept on a
 * retry list and surfaced in the banner; it is never silently dropped. The
 * hit-rate shown next to the queue is the server's number, refreshed after
 * every acknowledged mark, never recomputed client-side. */
export class ReviewQueueStore {
    constructor(client, roundId) {
        this.client = client;
        this.roundId = roundId;
        this.entries = [];
        this.cursor = 0;
        this.hitRate = null;
        this.labeledCount = 0;
        this.failedMarks = [];
        this.banner = null;
        this.listeners = [];
    }
    subscribe(listener) {
        this.listeners.push(listener);
    }
    notify() {
        for (const listener of this.listeners)
            listener();
    }
    /** Hydrate from the server; safe to call again mid-session (reload). */
    async load() {
        const items = await this.client.getQueue(this.roundId);
        this.entries = items.map((item) => ({ ...item, pending: false, failed: false }));
        if (this.cursor >= this.entries.length)
            this.cursor = 0;
        await this.refreshRoundNumbers();
        this.notify();
    }
    async refreshRoundNumbers() {
        const round = await this.client.getRound(this.roundId);
        this.hitRate = round.hit_rate;
        this.labeledCount = round.labels;
    }
    entry(docId) {
        return this.entries.find((e) => e.doc_id === docId);
    }
    current() {
        return this.entries[this.cursor] ?? null;
    }
    advance(step = 1) {
        if (this.entries.length === 0)
            return;
        this.cursor = Math.min(Math.max(this.cursor + step, 0), this.entries.length - 1);
        this.notify();
    }
    /** Optimistically set the label, POST it, then adopt the server's effective
     * state from the acknowledgment. */
    async mark(docId, relevant) {
        const entry = this.entry(docId);
        if (!entry)
            throw new Error(`no queue entry ${docId}`);
        const optimistic = relevant ? "relevant" : "irrelevant";
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
        }
        catch (err) {
            entry.pending = false;
            entry.failed = true;
            const message = err instanceof Error ? err.message : String(err);
            this.failedMarks.push({ docId, relevant, message });
            this.banner = `label for ${docId} not saved (${message}); it will be retried`;
        }
        this.notify();
    }
    async markCurrentAndAdvance(relevant) {
        const entry = this.current();
        if (!entry)
            return;
        await this.mark(entry.doc_id, relevant);
        this.advance(1);
    }
    /** Re-POST everything that previously failed, in order. */
    async retryFailed() {
        const queued = this.failedMarks;
        this.failedMarks = [];
        for (const mark of queued) {
            await this.mark(mark.docId, mark.relevant);
        }
    }
    labeledFraction() {
        if (this.entries.length === 0)
            return 0;
        const labeled = this.entries.filter((e) => e.label !== "unlabeled").length;
        return labeled / this.entries.length;
    }
}
