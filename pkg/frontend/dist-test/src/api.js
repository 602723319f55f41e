/** Typed client over the review service's HTTP contract. The UI holds no
 * authoritative state: everything it shows comes back out of these calls. */
export class ApiError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
async function parseError(resp) {
    let code = "http_error";
    let message = `${resp.status} ${resp.statusText}`;
    try {
        const body = await resp.json();
        if (body && typeof body.code === "string") {
            code = body.code;
            message = body.message ?? message;
        }
    }
    catch {
        // non-JSON error body; keep the generic message
    }
    return new ApiError(resp.status, code, message);
}
export class ApiClient {
    constructor(base = "", annotator = "scholar") {
        this.base = base;
        this.annotator = annotator;
    }
    async getJson(path) {
        const resp = await fetch(this.base + path, {
            headers: { "X-Annotator": this.annotator },
        });
        if (!resp.ok)
            throw await parseError(resp);
        return (await resp.json());
    }
    async postJson(path, body) {
        const resp = await fetch(this.base + path, {
            method: "POST",
            headers: { "Content-Type": "application/json", "X-Annotator": this.annotator },
            body: JSON.stringify(body),
        });
        if (!resp.ok)
            throw await parseError(resp);
        return (await resp.json());
    }
    async listRounds() {
        const payload = await this.getJson("/rounds");
        return payload.rounds;
    }
    getRound(roundId) {
        return this.getJson(`/rounds/${roundId}`);
    }
    async getQueue(roundId) {
        const payload = await this.getJson(`/rounds/${roundId}/queue`);
        return payload.items;
    }
    async getDocument(docId) {
        const resp = await fetch(`${this.base}/documents/${encodeURIComponent(docId)}`);
        if (!resp.ok)
            throw await parseError(resp);
        return resp.text();
    }
    postLabel(roundId, docId, relevant) {
        return this.postJson(`/rounds/${roundId}/labels`, {
            doc_id: docId,
            relevant,
            annotator: this.annotator,
        });
    }
    postWinnow(roundId, metric, percentile) {
        return this.postJson(`/rounds/${roundId}/winnow`, { metric, percentile });
    }
    postTopics(roundId, opts = {}) {
        return this.postJson(`/rounds/${roundId}/topics`, opts);
    }
    postTopicNames(roundId, names) {
        return this.postJson(`/rounds/${roundId}/topics/names`, { names });
    }
    getJob(jobId) {
        return this.getJson(`/jobs/${jobId}`);
    }
    async waitForJob(jobId, pollMs = 150, timeoutMs = 120000) {
        const deadline = Date.now() + timeoutMs;
        for (;;) {
            const job = await this.getJob(jobId);
            if (job.status !== "running")
                return job;
            if (Date.now() > deadline)
                throw new ApiError(0, "job_timeout", `job ${jobId} still running`);
            await new Promise((resolve) => setTimeout(resolve, pollMs));
        }
    }
    /** Raw TSV bytes of a report, exactly what the CLI writes to disk. */
    async getReport(roundId, kind) {
        const resp = await fetch(`${this.base}/rounds/${roundId}/reports/${kind}`);
        if (!resp.ok)
            throw await parseError(resp);
        return resp.text();
    }
}
