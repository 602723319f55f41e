/** Typed client over the review service's HTTP contract. The UI holds no
 * authoritative state: everything it shows comes back out of these calls. */

export interface RoundSummary {
  round_id: number;
  status: string;
  metric: string | null;
  seed_spec: { type: string; [key: string]: unknown };
  parent: { type: string; round_id?: number };
  rng_seed: number;
  documents_scored: number | null;
  percentile: string | null;
  survivors: number | null;
  sampled: number;
  labels: number;
  relevant: number;
  hit_rate: number | null;
}

export interface TrancheSummary {
  tranche_id: number;
  low: number;
  high: number;
  sample_size: number;
  rng_seed: number;
}

export interface RoundDetail extends RoundSummary {
  tranches: TrancheSummary[];
  reports: string[];
}

export type LabelValue = "unlabeled" | "relevant" | "irrelevant";

export interface QueueItem {
  doc_id: string;
  title: string;
  year: number;
  value: number;
  band: [number, number];
  label: LabelValue;
}

export interface LabelAck {
  status: string;
  effective: { doc_id: string; relevant: boolean; annotator: string; timestamp: string };
  overwritten: number;
}

export interface Job {
  job_id: string;
  kind: string;
  status: "running" | "done" | "failed";
  result?: { round_id?: number; survivors?: number; k?: number };
  error?: string;
}

export type ReportKind = "histogram" | "year-series" | "topics" | "ngrams";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    public annotator: string = "scholar",
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.base + path, {
      headers: { "X-Annotator": this.annotator },
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json", "X-Annotator": this.annotator },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  async listRounds(): Promise<RoundSummary[]> {
    const payload = await this.getJson<{ rounds: RoundSummary[] }>("/rounds");
    return payload.rounds;
  }

  getRound(roundId: number): Promise<RoundDetail> {
    return this.getJson<RoundDetail>(`/rounds/${roundId}`);
  }

  async getQueue(roundId: number): Promise<QueueItem[]> {
    const payload = await this.getJson<{ items: QueueItem[] }>(`/rounds/${roundId}/queue`);
    return payload.items;
  }

  async getDocument(docId: string): Promise<string> {
    const resp = await fetch(`${this.base}/documents/${encodeURIComponent(docId)}`);
    if (!resp.ok) throw await parseError(resp);
    return resp.text();
  }

  postLabel(roundId: number, docId: string, relevant: boolean): Promise<LabelAck> {
    return this.postJson<LabelAck>(`/rounds/${roundId}/labels`, {
      doc_id: docId,
      relevant,
      annotator: this.annotator,
    });
  }

  postWinnow(roundId: number, metric: string, percentile: string): Promise<{ job_id: string }> {
    return this.postJson<{ job_id: string }>(`/rounds/${roundId}/winnow`, { metric, percentile });
  }

  postTopics(
    roundId: number,
    opts: { k?: number; iterations?: number; rng_seed?: number; scope?: string } = {},
  ): Promise<{ job_id: string }> {
    return this.postJson<{ job_id: string }>(`/rounds/${roundId}/topics`, opts);
  }

  postTopicNames(roundId: number, names: Record<string, string>): Promise<{ status: string }> {
    return this.postJson<{ status: string }>(`/rounds/${roundId}/topics/names`, { names });
  }

  getJob(jobId: string): Promise<Job> {
    return this.getJson<Job>(`/jobs/${jobId}`);
  }

  async waitForJob(jobId: string, pollMs = 150, timeoutMs = 120_000): Promise<Job> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const job = await this.getJob(jobId);
      if (job.status !== "running") return job;
      if (Date.now() > deadline) throw new ApiError(0, "job_timeout", `job ${jobId} still running`);
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  /** Raw TSV bytes of a report, exactly what the CLI writes to disk. */
  async getReport(roundId: number, kind: ReportKind): Promise<string> {
    const resp = await fetch(`${this.base}/rounds/${roundId}/reports/${kind}`);
    if (!resp.ok) throw await parseError(resp);
    return resp.text();
  }
}
