/** DOM views: the rounds list, the review queue (keyboard-driven labeling),
 * and the round control panel (charts, topics, reseed & winnow). */

import { ApiClient, ApiError, RoundDetail, RoundSummary } from "./api.js";
import { displayedTotal, histogramSvg, yearSeriesSvg } from "./charts.js";
import { ReviewQueueStore } from "./state.js";
import { parseHistogram, parseTopics, parseYearSeries } from "./tsv.js";

export function formatHitRate(rate: number | null): string {
  return rate === null ? "—" : `${Math.round(rate * 1000) / 10}%`;
}

export function formatValue(value: number | null): string {
  return value === null ? "—" : value.toFixed(4);
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function errorBanner(err: unknown): HTMLElement {
  const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  return el("div", { class: "banner error" }, message);
}

// ---------------------------------------------------------------------------
// Rounds list
// ---------------------------------------------------------------------------

export async function renderRoundsList(client: ApiClient, root: HTMLElement): Promise<void> {
  root.replaceChildren(el("h1", {}, "Rounds"));
  let rounds: RoundSummary[];
  try {
    rounds = await client.listRounds();
  } catch (err) {
    root.append(errorBanner(err));
    return;
  }
  if (rounds.length === 0) {
    root.append(el("p", {}, "No rounds yet; rank a corpus from the command line first."));
    return;
  }
  const table = el("table", { class: "rounds" });
  const head = el("tr");
  for (const h of ["round", "status", "metric", "cut", "survivors", "labeled", "hit rate", ""]) {
    head.append(el("th", {}, h));
  }
  table.append(head);
  for (const r of rounds) {
    const row = el("tr");
    row.append(el("td", {}, String(r.round_id)));
    row.append(el("td", {}, r.status));
    row.append(el("td", {}, r.metric ?? "—"));
    row.append(el("td", {}, r.percentile === null ? "—" : `${r.percentile}%`));
    row.append(el("td", {}, r.survivors === null ? "—" : String(r.survivors)));
    row.append(el("td", {}, String(r.labels)));
    row.append(el("td", { class: "hit-rate" }, formatHitRate(r.hit_rate)));
    const links = el("td");
    const open = el("a", { href: `#/round/${r.round_id}` }, "control");
    const review = el("a", { href: `#/round/${r.round_id}/review` }, "review");
    links.append(open, " ", review);
    row.append(links);
    table.append(row);
  }
  root.append(table);
}

// ---------------------------------------------------------------------------
// Review queue
// ---------------------------------------------------------------------------

export class ReviewQueueView {
  private docPane: HTMLElement = el("div");
  private listPane: HTMLElement = el("div");
  private statusPane: HTMLElement = el("div");
  private keyHandler = (event: KeyboardEvent) => this.onKey(event);

  constructor(
    private readonly client: ApiClient,
    private readonly store: ReviewQueueStore,
    private readonly root: HTMLElement,
  ) {}

  async mount(): Promise<void> {
    this.root.replaceChildren(
      el("h1", {}, `Round ${this.store.roundId} · review queue`),
      el(
        "p",
        { class: "hint" },
        "keys: r = relevant · i = irrelevant · j/k = next/previous · u = retry failed",
      ),
      this.statusPane,
      this.listPane,
      this.docPane,
    );
    this.store.subscribe(() => this.redraw());
    try {
      await this.store.load();
    } catch (err) {
      this.root.append(errorBanner(err));
      return;
    }
    document.addEventListener("keydown", this.keyHandler);
    await this.openCurrent();
  }

  unmount(): void {
    document.removeEventListener("keydown", this.keyHandler);
  }

  private onKey(event: KeyboardEvent): void {
    if (event.key === "r") void this.store.markCurrentAndAdvance(true).then(() => this.openCurrent());
    else if (event.key === "i") void this.store.markCurrentAndAdvance(false).then(() => this.openCurrent());
    else if (event.key === "j" || event.key === "ArrowDown") {
      this.store.advance(1);
      void this.openCurrent();
    } else if (event.key === "k" || event.key === "ArrowUp") {
      this.store.advance(-1);
      void this.openCurrent();
    } else if (event.key === "u") void this.store.retryFailed();
  }

  private async openCurrent(): Promise<void> {
    const entry = this.store.current();
    if (!entry) return;
    this.docPane.replaceChildren(el("h2", {}, entry.title), el("p", { class: "meta" }, `${entry.year} · divergence ${formatValue(entry.value)}`));
    try {
      const text = await this.client.getDocument(entry.doc_id);
      this.docPane.append(el("pre", { class: "document" }, text));
    } catch (err) {
      this.docPane.append(errorBanner(err));
    }
  }

  redraw(): void {
    const store = this.store;
    this.statusPane.replaceChildren();
    if (store.banner) this.statusPane.append(el("div", { class: "banner error" }, store.banner));
    this.statusPane.append(
      el(
        "div",
        { class: "widgets" },
        `hit rate ${formatHitRate(store.hitRate)} · ${store.labeledCount} labeled of ${store.entries.length} queued`,
      ),
    );

    const list = el("table", { class: "queue" });
    store.entries.forEach((entry, i) => {
      const row = el("tr", { class: i === store.cursor ? "current" : "" });
      row.append(el("td", { class: `label ${entry.label}` }, entry.pending ? "…" : entry.label));
      row.append(el("td", {}, entry.doc_id));
      row.append(el("td", {}, entry.title));
      row.append(el("td", {}, String(entry.year)));
      row.append(el("td", { class: "value" }, formatValue(entry.value)));
      row.append(el("td", {}, `(${entry.band[0]}, ${entry.band[1]}]`));
      if (entry.failed) row.append(el("td", { class: "failed" }, "unsaved"));
      row.addEventListener("click", () => {
        store.cursor = i;
        void this.openCurrent();
        this.redraw();
      });
      list.append(row);
    });
    this.listPane.replaceChildren(list);
  }
}

// ---------------------------------------------------------------------------
// Round control: charts, topics, reseed & winnow
// ---------------------------------------------------------------------------

export class RoundControlView {
  constructor(
    private readonly client: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  async mount(roundId: number): Promise<void> {
    this.root.replaceChildren(el("h1", {}, `Round ${roundId} · control`));
    let round: RoundDetail;
    try {
      round = await this.client.getRound(roundId);
    } catch (err) {
      this.root.append(errorBanner(err));
      return;
    }

    const facts = el(
      "p",
      { class: "meta" },
      `status ${round.status} · metric ${round.metric ?? "—"} · ` +
        `${round.documents_scored ?? "?"} scored · survivors ${round.survivors ?? "—"} · ` +
        `hit rate ${formatHitRate(round.hit_rate)} (rng seed ${round.rng_seed})`,
    );
    this.root.append(facts);

    await this.renderCharts(roundId, round);
    await this.renderTopics(roundId, round);
    this.renderAdvanceControls(roundId, round);
  }

  private async renderCharts(roundId: number, round: RoundDetail): Promise<void> {
    const section = el("section", { class: "charts" });
    section.append(el("h2", {}, "Similarity to the seed"));
    try {
      const histogram = parseHistogram(await this.client.getReport(roundId, "histogram"));
      const svg = histogramSvg(histogram);
      const holder = el("div", { class: "chart-holder" });
      holder.innerHTML = svg;
      section.append(holder, el("p", { class: "chart-note" }, `documents charted: ${displayedTotal(svg)}`));
    } catch (err) {
      section.append(errorBanner(err));
    }
    section.append(el("h2", {}, "Survivors over time"));
    try {
      const series = parseYearSeries(await this.client.getReport(roundId, "year-series"));
      const holder = el("div", { class: "chart-holder" });
      holder.innerHTML = yearSeriesSvg(series);
      section.append(holder);
    } catch (err) {
      section.append(errorBanner(err));
    }
    this.root.append(section);
  }

  private async renderTopics(roundId: number, round: RoundDetail): Promise<void> {
    const section = el("section", { class: "topics" });
    section.append(el("h2", {}, "Topics"));
    if (!round.reports.includes("topics")) {
      const button = el("button", {}, "train topic model");
      button.addEventListener("click", async () => {
        button.setAttribute("disabled", "true");
        try {
          const { job_id } = await this.client.postTopics(roundId, {});
          await this.client.waitForJob(job_id);
          await this.mount(roundId);
        } catch (err) {
          section.append(errorBanner(err));
        }
      });
      section.append(el("p", {}, "No topic model trained for this round yet."), button);
      this.root.append(section);
      return;
    }
    try {
      const topics = parseTopics(await this.client.getReport(roundId, "topics"));
      const table = el("table", { class: "topic-table" });
      const head = el("tr");
      for (const h of ["topic", "name (click to edit)", "prevalence", "top words"]) head.append(el("th", {}, h));
      table.append(head);
      for (const topic of topics) {
        const row = el("tr");
        row.append(el("td", {}, String(topic.topicId)));
        const nameCell = el("td", { class: "topic-name", contenteditable: "true" }, topic.name);
        nameCell.addEventListener("blur", async () => {
          const name = nameCell.textContent?.trim() ?? "";
          if (!name || name === topic.name) return;
          try {
            await this.client.postTopicNames(roundId, { [String(topic.topicId)]: name });
            topic.name = name;
          } catch (err) {
            this.root.append(errorBanner(err));
          }
        });
        row.append(nameCell);
        row.append(el("td", {}, topic.prevalence.toFixed(5)));
        row.append(el("td", { class: "words" }, topic.topWords.map((w) => w.surface).join(" ")));
        table.append(row);
      }
      section.append(table);
    } catch (err) {
      section.append(errorBanner(err));
    }
    this.root.append(section);
  }

  private renderAdvanceControls(roundId: number, round: RoundDetail): void {
    const section = el("section", { class: "advance" });
    section.append(el("h2", {}, "Reseed & winnow"));
    const metric = el("select", { id: "metric" });
    for (const m of ["kld", "symmetric-kld", "jsd"]) {
      metric.append(el("option", { value: m }, m));
    }
    const percentile = el("input", { id: "percentile", value: "25", size: "5" });
    const button = el("button", {}, "reseed & winnow");
    const note = el("span", { class: "note" });
    if (round.relevant === 0) {
      button.setAttribute("disabled", "true");
      note.textContent = "needs at least one relevant label (the next seed is built from them)";
    }
    button.addEventListener("click", async () => {
      button.setAttribute("disabled", "true");
      note.textContent = "running…";
      try {
        const { job_id } = await this.client.postWinnow(roundId, metric.value, percentile.value);
        const job = await this.client.waitForJob(job_id);
        if (job.status === "failed") throw new ApiError(0, "job_failed", job.error ?? "winnow failed");
        location.hash = `#/round/${job.result?.round_id}`;
      } catch (err) {
        note.textContent = "";
        button.removeAttribute("disabled");
        section.append(errorBanner(err));
      }
    });
    section.append(metric, " cut at ", percentile, " % ", button, " ", note);
    this.root.append(section);
  }
}
