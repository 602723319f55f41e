/** End-to-end checks against a live review service: labels marked through the
 * UI's store must equal an equivalent CLI label-file ingest, the hit-rate
 * widget must equal the CLI hit-rate output exactly, and every chart must
 * render numbers bit-identical to the report endpoints (which are themselves
 * bit-identical to the CLI's report files). */
import assert from "node:assert/strict";
import { after, before, test } from "node:test";
import { spawn, execFile } from "node:child_process";
import { once } from "node:events";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { promisify } from "node:util";
import { ApiClient } from "../src/api.js";
import { ReviewQueueStore } from "../src/state.js";
import { displayedTotal, histogramSvg, yearSeriesSvg } from "../src/charts.js";
import { histogramTotal, parseHistogram, parseTopics, parseYearSeries, yearSeriesTotal, } from "../src/tsv.js";
const execFileP = promisify(execFile);
const PYTHON = process.env.WINNOWER_PYTHON ?? "python3";
const workDir = mkdtempSync(path.join(tmpdir(), "winnower-ui-"));
const projectA = path.join(workDir, "proj-ui"); // labeled through the UI store
const projectB = path.join(workDir, "proj-cli"); // labeled through a CLI file
let server = null;
let client;
async function cli(project, ...args) {
    const { stdout } = await execFileP(PYTHON, ["-m", "winnower", "--project", project, ...args]);
    return stdout;
}
function writeFixtureManifests() {
    const records = [];
    const docIds = [];
    for (let i = 0; i < 60; i++) {
        const docId = `d${String(i).padStart(2, "0")}`;
        docIds.push(docId);
        records.push(JSON.stringify({
            doc_id: docId,
            title: `Debate ${i}`,
            year: 1850 + (i % 40),
            text: `rent land tenant filler${i % 7} word${i}`,
        }));
    }
    const manifest = path.join(workDir, "corpus.jsonl");
    writeFileSync(manifest, records.join("\n") + "\n");
    const seed = path.join(workDir, "seed.jsonl");
    writeFileSync(seed, JSON.stringify({ doc_id: "seed-1", title: "Seed", year: 1881, text: "rent rent land tenant" }) + "\n");
    return { manifest, seed, docIds };
}
async function buildProject(project, manifest, seed) {
    await cli(project, "init");
    await cli(project, "ingest", "--manifest", manifest);
    await cli(project, "rank", "--metric", "kld", "--seed-manifest", seed);
    await cli(project, "winnow", "--percentile", "100");
    await cli(project, "sample", "--bands", "0-100", "--k", "50", "--rng-seed", "1");
}
async function startServer(project) {
    server = spawn(PYTHON, ["-u", "-m", "winnower", "--project", project, "serve", "--bind", "127.0.0.1:0"], {
        stdio: ["ignore", "pipe", "inherit"],
    });
    const stdout = server.stdout;
    let buffer = "";
    for (;;) {
        const [chunk] = (await once(stdout, "data"));
        buffer += chunk.toString();
        const match = buffer.match(/http:\/\/[0-9.]+:\d+/);
        if (match)
            return match[0];
    }
}
before(async () => {
    const { manifest, seed } = writeFixtureManifests();
    await buildProject(projectA, manifest, seed);
    await buildProject(projectB, manifest, seed);
    const base = await startServer(projectA);
    client = new ApiClient(base, "expert");
});
after(() => {
    server?.kill();
});
test("label round-trip: UI marks equal an equivalent CLI label-file ingest", async () => {
    const store = new ReviewQueueStore(client, 1);
    await store.load();
    assert.equal(store.entries.length, 50);
    // mark 11 relevant, 39 irrelevant, in queue order
    const marks = store.entries.map((entry, i) => [entry.doc_id, i < 11]);
    for (const [docId, relevant] of marks) {
        await store.mark(docId, relevant);
    }
    assert.equal(store.failedMarks.length, 0);
    // the same labels as a CLI file on the twin project
    const labelLines = marks
        .map(([docId, relevant], i) => `${docId}\t${relevant ? 1 : 0}\texpert\t2024-01-01T00:${String(i).padStart(2, "0")}:00Z`)
        .join("\n");
    const labelFile = path.join(workDir, "labels.tsv");
    writeFileSync(labelFile, labelLines + "\n");
    await cli(projectB, "label", "--file", labelFile);
    // effective labels identical: reload the UI store and compare against the
    // twin project's label log
    const reloaded = new ReviewQueueStore(client, 1);
    await reloaded.load();
    const uiEffective = new Map(reloaded.entries.map((e) => [e.doc_id, e.label]));
    const logB = readFileSync(path.join(projectB, "rounds", "round_0001", "labels.tsv"), "utf-8");
    for (const line of logB.trim().split("\n")) {
        const [docId, relevant] = line.split("\t");
        assert.equal(uiEffective.get(docId), relevant === "1" ? "relevant" : "irrelevant");
    }
    // hit-rate widget equals the CLI hit-rate output, exactly
    const cliA = (await cli(projectA, "hit-rate")).trim();
    const cliB = (await cli(projectB, "hit-rate")).trim();
    assert.equal(cliA, cliB);
    assert.equal(store.hitRate, Number(cliA));
    assert.equal(cliA, "0.22");
});
test("opposite re-mark converges to the server's last-write-wins state", async () => {
    const store = new ReviewQueueStore(client, 1);
    await store.load();
    const doc = store.entries[20].doc_id;
    await store.mark(doc, true);
    await store.mark(doc, false);
    const reloaded = new ReviewQueueStore(client, 1);
    await reloaded.load();
    assert.equal(reloaded.entry(doc)?.label, "irrelevant");
});
test("histogram chart renders exactly the endpoint payload, which matches the CLI file", async () => {
    const payload = await client.getReport(1, "histogram");
    await cli(projectA, "report", "histogram", "--no-figure");
    const fileBytes = readFileSync(path.join(projectA, "reports", "round_0001", "histogram.tsv"), "utf-8");
    assert.equal(payload, fileBytes);
    const hists = parseHistogram(payload);
    const svg = histogramSvg(hists);
    assert.equal(displayedTotal(svg), histogramTotal(hists[0]));
    assert.equal(histogramTotal(hists[0]), 60); // every scored document is charted
});
test("year-series chart renders exactly the endpoint payload, which matches the CLI file", async () => {
    const payload = await client.getReport(1, "year-series");
    await cli(projectA, "report", "year-series", "--no-figure");
    const fileBytes = readFileSync(path.join(projectA, "reports", "round_0001", "year_series_p1.tsv"), "utf-8");
    assert.equal(payload, fileBytes);
    const ys = parseYearSeries(payload);
    const svg = yearSeriesSvg(ys);
    assert.equal(displayedTotal(svg), yearSeriesTotal(ys));
});
test("topic table shows endpoint numbers and a rename persists across reload", async () => {
    const { job_id } = await client.postTopics(1, { k: 2, iterations: 25, rng_seed: 3, scope: "survivors" });
    const job = await client.waitForJob(job_id);
    assert.equal(job.status, "done");
    const before = parseTopics(await client.getReport(1, "topics"));
    assert.equal(before.length, 2);
    const prevalenceSum = before.reduce((acc, t) => acc + t.prevalence, 0);
    assert.ok(Math.abs(prevalenceSum - 1.0) <= 1e-6);
    assert.equal(before[0].topWords.length, 20);
    await client.postTopicNames(1, { "0": "Property negotiation" });
    const after = parseTopics(await client.getReport(1, "topics"));
    assert.equal(after[0].name, "Property negotiation");
    // and the CLI's fresh report file carries the same bytes
    await cli(projectA, "report", "topics", "--no-figure");
    const fileBytes = readFileSync(path.join(projectA, "reports", "round_0001", "topics.tsv"), "utf-8");
    assert.equal(await client.getReport(1, "topics"), fileBytes);
});
