/** Parsers for the tab-separated report payloads. Charts and tables are drawn
 * from these parsed numbers only, so every figure in the UI traces back to a
 * report endpoint byte-for-byte. */

export interface HistogramBin {
  low: number;
  high: number;
  count: number;
}

export interface HistogramData {
  metric: string;
  seedRef: string;
  bins: HistogramBin[];
}

export interface YearSeriesData {
  metric: string;
  percentile: string;
  years: { year: number; count: number }[];
}

export interface TopicWord {
  surface: string;
  probability: number;
}

export interface TopicRow {
  topicId: number;
  name: string;
  prevalence: number;
  topWords: TopicWord[];
}

export interface NgramRow {
  rank: number;
  surface: string;
  count: number;
}

function nonEmptyLines(text: string): string[] {
  return text.split("\n").filter((line) => line.length > 0);
}

/** `# metric seed_ref` header blocks, one per seed_ref when per-seed. */
export function parseHistogram(text: string): HistogramData[] {
  const out: HistogramData[] = [];
  let current: HistogramData | null = null;
  for (const line of nonEmptyLines(text)) {
    if (line.startsWith("# ")) {
      const [metric, seedRef] = line.slice(2).split(" ");
      current = { metric, seedRef, bins: [] };
      out.push(current);
      continue;
    }
    if (!current) throw new Error("histogram payload missing its header line");
    const [low, high, count] = line.split("\t");
    current.bins.push({ low: Number(low), high: Number(high), count: Number(count) });
  }
  if (out.length === 0) throw new Error("empty histogram payload");
  return out;
}

export function parseYearSeries(text: string): YearSeriesData {
  const lines = nonEmptyLines(text);
  if (lines.length === 0 || !lines[0].startsWith("# ")) {
    throw new Error("year-series payload missing its header line");
  }
  const header = lines[0].slice(2).split(" ");
  const metric = header[0];
  const percentile = (header.find((p) => p.startsWith("percentile=")) ?? "percentile=?").slice(
    "percentile=".length,
  );
  const years = lines.slice(1).map((line) => {
    const [year, count] = line.split("\t");
    return { year: Number(year), count: Number(count) };
  });
  return { metric, percentile, years };
}

/** Blocks of `topic_id<TAB>name<TAB>prevalence` followed by word rows. */
export function parseTopics(text: string): TopicRow[] {
  const out: TopicRow[] = [];
  let current: TopicRow | null = null;
  for (const line of nonEmptyLines(text)) {
    const parts = line.split("\t");
    if (parts.length === 3) {
      current = {
        topicId: Number(parts[0]),
        name: parts[1],
        prevalence: Number(parts[2]),
        topWords: [],
      };
      out.push(current);
    } else if (parts.length === 2 && current) {
      current.topWords.push({ surface: parts[0], probability: Number(parts[1]) });
    } else {
      throw new Error(`unparseable topic report line: ${line}`);
    }
  }
  return out;
}

export function parseNgrams(text: string): NgramRow[] {
  return nonEmptyLines(text).map((line) => {
    const [rank, surface, count] = line.split("\t");
    return { rank: Number(rank), surface, count: Number(count) };
  });
}

export function histogramTotal(h: HistogramData): number {
  return h.bins.reduce((acc, b) => acc + b.count, 0);
}

export function yearSeriesTotal(ys: YearSeriesData): number {
  return ys.years.reduce((acc, y) => acc + y.count, 0);
}
