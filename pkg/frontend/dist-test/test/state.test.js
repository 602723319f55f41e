import assert from "node:assert/strict";
import { test } from "node:test";
import { ReviewQueueStore } from "../src/state.js";
/** In-memory stand-in for the review service: last-write-wins labels and a
 * failure switch for exercising the retry path. */
class FakeApi {
    constructor(docIds) {
        this.docIds = docIds;
        this.labels = new Map();
        this.failNext = 0;
        this.annotator = "tester";
    }
    async getQueue(_roundId) {
        return this.docIds.map((docId, i) => ({
            doc_id: docId,
            title: `Debate ${docId}`,
            year: 1880 + i,
            value: i / 10,
            band: [0, 25],
            label: this.labels.has(docId)
                ? this.labels.get(docId)
                    ? "relevant"
                    : "irrelevant"
                : "unlabeled",
        }));
    }
    async getRound(_roundId) {
        const labels = this.labels.size;
        const relevant = [...this.labels.values()].filter(Boolean).length;
        return {
            round_id: 1,
            status: "sampled",
            metric: "kld",
            seed_spec: { type: "external" },
            parent: { type: "corpus" },
            rng_seed: 0,
            documents_scored: this.docIds.length,
            percentile: null,
            survivors: null,
            sampled: this.docIds.length,
            labels,
            relevant,
            hit_rate: labels ? relevant / labels : null,
            tranches: [],
            reports: [],
        };
    }
    async postLabel(_roundId, docId, relevant) {
        if (this.failNext > 0) {
            this.failNext -= 1;
            throw new Error("api unreachable");
        }
        this.labels.set(docId, relevant);
        return {
            status: "ok",
            effective: { doc_id: docId, relevant, annotator: this.annotator, timestamp: "t" },
            overwritten: 0,
        };
    }
}
function storeWith(fake) {
    return new ReviewQueueStore(fake, 1);
}
test("marking eleven of fifty shows the server's 22% hit rate", async () => {
    const fake = new FakeApi(Array.from({ length: 50 }, (_, i) => `d${String(i).padStart(2, "0")}`));
    const store = storeWith(fake);
    await store.load();
    for (let i = 0; i < 50; i++) {
        await store.mark(`d${String(i).padStart(2, "0")}`, i < 11);
    }
    assert.equal(store.hitRate, 0.22);
    assert.equal(store.labeledCount, 50);
    assert.equal(store.entry("d00")?.label, "relevant");
    assert.equal(store.entry("d49")?.label, "irrelevant");
});
test("reload rehydrates label state from the server exactly", async () => {
    const fake = new FakeApi(["a", "b", "c"]);
    const first = storeWith(fake);
    await first.load();
    await first.mark("a", true);
    await first.mark("b", false);
    const reloaded = storeWith(fake);
    await reloaded.load();
    assert.equal(reloaded.entry("a")?.label, "relevant");
    assert.equal(reloaded.entry("b")?.label, "irrelevant");
    assert.equal(reloaded.entry("c")?.label, "unlabeled");
    assert.equal(reloaded.hitRate, 0.5);
});
test("opposite re-mark converges to the server's resolution", async () => {
    const fake = new FakeApi(["a"]);
    const store = storeWith(fake);
    await store.load();
    await store.mark("a", true);
    await store.mark("a", false);
    assert.equal(store.entry("a")?.label, "irrelevant");
    assert.equal(fake.labels.get("a"), false);
});
test("failed mark is flagged and retried, never dropped", async () => {
    const fake = new FakeApi(["a", "b"]);
    const store = storeWith(fake);
    await store.load();
    fake.failNext = 1;
    await store.mark("a", true);
    assert.equal(store.failedMarks.length, 1);
    assert.ok(store.banner && store.banner.includes("a"));
    assert.equal(store.entry("a")?.failed, true);
    assert.equal(fake.labels.has("a"), false);
    await store.retryFailed();
    assert.equal(store.failedMarks.length, 0);
    assert.equal(store.banner, null);
    assert.equal(store.entry("a")?.label, "relevant");
    assert.equal(fake.labels.get("a"), true);
});
test("keyboard-style advance walks the queue in divergence order", async () => {
    const fake = new FakeApi(["a", "b", "c"]);
    const store = storeWith(fake);
    await store.load();
    assert.equal(store.current()?.doc_id, "a");
    await store.markCurrentAndAdvance(true);
    assert.equal(store.current()?.doc_id, "b");
    store.advance(-1);
    assert.equal(store.current()?.doc_id, "a");
    store.advance(10); // clamped at the end
    assert.equal(store.current()?.doc_id, "c");
});
test("store notifies subscribers on every state change", async () => {
    const fake = new FakeApi(["a"]);
    const store = storeWith(fake);
    let ticks = 0;
    store.subscribe(() => ticks++);
    await store.load();
    await store.mark("a", true);
    assert.ok(ticks >= 2);
});
