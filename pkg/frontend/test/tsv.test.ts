import assert from "node:assert/strict";
import { test } from "node:test";

import {
  histogramTotal,
  parseHistogram,
  parseNgrams,
  parseTopics,
  parseYearSeries,
  yearSeriesTotal,
} from "../src/tsv.js";

test("histogram payload parses header and bins", () => {
  const text = "# kld pooled\n0.0\t1.5\t2\n1.5\t3.0\t2\n";
  const [h] = parseHistogram(text);
  assert.equal(h.metric, "kld");
  assert.equal(h.seedRef, "pooled");
  assert.deepEqual(h.bins, [
    { low: 0.0, high: 1.5, count: 2 },
    { low: 1.5, high: 3.0, count: 2 },
  ]);
  assert.equal(histogramTotal(h), 4);
});

test("per-seed histogram payload yields one block per seed", () => {
  const text =
    "# kld seed:bessborough\n0\t1\t3\n" +
    "# kld seed:devon\n0\t1\t1\n1\t2\t2\n";
  const blocks = parseHistogram(text);
  assert.equal(blocks.length, 2);
  assert.deepEqual(
    blocks.map((b) => b.seedRef),
    ["seed:bessborough", "seed:devon"],
  );
  assert.equal(histogramTotal(blocks[1]), 3);
});

test("histogram without a header is rejected", () => {
  assert.throws(() => parseHistogram("0\t1\t3\n"));
  assert.throws(() => parseHistogram(""));
});

test("year series parses metric, percentile, and rows", () => {
  const ys = parseYearSeries("# jsd percentile=1\n1845\t1\n1881\t2\n");
  assert.equal(ys.metric, "jsd");
  assert.equal(ys.percentile, "1");
  assert.deepEqual(ys.years, [
    { year: 1845, count: 1 },
    { year: 1881, count: 2 },
  ]);
  assert.equal(yearSeriesTotal(ys), 3);
});

test("topic report parses blocks of header plus word rows", () => {
  const text =
    "0\tProperty negotiation\t0.6\nrent\t0.4\nland\t0.3\n" +
    "1\ttopic-1\t0.4\nship\t0.5\nfleet\t0.2\n";
  const topics = parseTopics(text);
  assert.equal(topics.length, 2);
  assert.equal(topics[0].name, "Property negotiation");
  assert.equal(topics[0].prevalence, 0.6);
  assert.deepEqual(
    topics[0].topWords.map((w) => w.surface),
    ["rent", "land"],
  );
  assert.equal(topics[1].topicId, 1);
  const prevalenceSum = topics.reduce((acc, t) => acc + t.prevalence, 0);
  assert.ok(Math.abs(prevalenceSum - 1.0) < 1e-9);
});

test("ngram rows parse rank, surface, count", () => {
  assert.deepEqual(parseNgrams("1\trent\t6686\n2\tland\t6103\n"), [
    { rank: 1, surface: "rent", count: 6686 },
    { rank: 2, surface: "land", count: 6103 },
  ]);
});
