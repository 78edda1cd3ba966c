/** Typed client for the review API.
 *
 * The fetch implementation is injectable so tests can run against an
 * in-memory server double; the browser entry point passes the real
 * `fetch`. Error responses are normalized into `ApiError` with the
 * server's machine-readable code (e.g. "rule_violation") when present.
 */

import type {
  CandidatePage,
  CandidateRecord,
  Decision,
  ReviewStats,
  StatusFilter,
} from "./types.js";

export interface RequestInitLike {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: RequestInitLike) => Promise<ResponseLike>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string | null,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Flatten FastAPI's `detail` shapes into a code plus a readable message. */
function parseDetail(status: number, payload: unknown): ApiError {
  const detail =
    payload && typeof payload === "object" && "detail" in payload
      ? (payload as { detail: unknown }).detail
      : payload;
  if (typeof detail === "string") {
    return new ApiError(status, null, detail);
  }
  if (Array.isArray(detail)) {
    const parts = detail.map((entry) =>
      entry && typeof entry === "object" && "msg" in entry
        ? String((entry as { msg: unknown }).msg)
        : JSON.stringify(entry),
    );
    return new ApiError(status, "validation_error", parts.join("; "));
  }
  if (detail && typeof detail === "object") {
    const record = detail as { error?: unknown; message?: unknown };
    return new ApiError(
      status,
      typeof record.error === "string" ? record.error : null,
      typeof record.message === "string" ? record.message : JSON.stringify(detail),
    );
  }
  return new ApiError(status, null, `request failed with status ${status}`);
}

async function requestJson<T>(
  fetchFn: FetchLike,
  url: string,
  init?: RequestInitLike,
): Promise<T> {
  const response = await fetchFn(url, init);
  let payload: unknown = null;
  try {
    payload = await response.json();
  } catch {
    payload = null;
  }
  if (!response.ok) {
    throw parseDetail(response.status, payload);
  }
  return payload as T;
}

export interface ApiClient {
  fetchQueue(
    filter: StatusFilter,
    cursor: string | null,
    limit: number,
  ): Promise<CandidatePage>;
  fetchCandidate(id: string): Promise<CandidateRecord>;
  submitDecision(
    id: string,
    decision: Decision,
    annotator: string,
  ): Promise<CandidateRecord>;
  fetchStats(): Promise<ReviewStats>;
}

const browserFetch: FetchLike = (url, init) => fetch(url, init);

export function createApiClient(fetchFn: FetchLike = browserFetch, base = ""): ApiClient {
  return {
    fetchQueue(filter, cursor, limit) {
      const params = new URLSearchParams();
      if (filter !== "all") {
        params.set("status", filter);
      }
      if (cursor !== null) {
        params.set("cursor", cursor);
      }
      params.set("limit", String(limit));
      return requestJson(fetchFn, `${base}/api/candidates?${params.toString()}`);
    },

    fetchCandidate(id) {
      return requestJson(fetchFn, `${base}/api/candidates/${encodeURIComponent(id)}`);
    },

    submitDecision(id, decision, annotator) {
      return requestJson(
        fetchFn,
        `${base}/api/candidates/${encodeURIComponent(id)}/decision`,
        {
          method: "POST",
          headers: { "content-type": "application/json" },
          body: JSON.stringify({ decision, annotator }),
        },
      );
    },

    fetchStats() {
      return requestJson(fetchFn, `${base}/api/stats`);
    },
  };
}
