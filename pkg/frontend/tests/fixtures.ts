/** Test doubles: candidate record builders and an in-memory review
 * server that mirrors the real API's pagination, decision rules, error
 * payloads, and append-only decision log (including restart via log
 * replay).
 */

import type { FetchLike, RequestInitLike, ResponseLike } from "../src/api.js";
import type {
  CandidateRecord,
  CandidateStatus,
  KeywordMatch,
  TokenLang,
  TokenView,
} from "../src/types.js";

export type Word = [string, TokenLang];

/** Spanish discourse markers the keyword detector flags. */
export const DEFAULT_KEYWORDS = new Set(["pero", "bueno", "entonces", "vale", "pues"]);

function maxRun(langs: TokenLang[], target: TokenLang): number {
  let best = 0;
  let current = 0;
  for (const lang of langs) {
    current = lang === target ? current + 1 : 0;
    best = Math.max(best, current);
  }
  return best;
}

/** Build a wire-shaped candidate record from (text, lang) words,
 * computing character offsets, language counts, run lengths, and
 * keyword matches the way the server does. */
export function makeRecord(
  id: string,
  words: Word[],
  overrides: Partial<CandidateRecord> = {},
): CandidateRecord {
  const tokens: TokenView[] = [];
  const matched: KeywordMatch[] = [];
  let offset = 0;
  for (const [text, lang] of words) {
    const start = offset;
    const end = start + text.length;
    tokens.push({ text, lang, start, end });
    if (DEFAULT_KEYWORDS.has(text.toLowerCase())) {
      matched.push({ keyword: text.toLowerCase(), start, end });
    }
    offset = end + 1;
  }
  const langs = words.map(([, lang]) => lang);
  return {
    id,
    text: words.map(([text]) => text).join(" "),
    lang: "ca",
    gender: "f",
    status: "pending",
    method: "keyword",
    max_run_es: maxRun(langs, "es"),
    max_run_ca: maxRun(langs, "ca"),
    counts: {
      ca: langs.filter((lang) => lang === "ca").length,
      es: langs.filter((lang) => lang === "es").length,
      unk: langs.filter((lang) => lang === "unk").length,
    },
    tokens,
    matched_keywords: matched,
    ...overrides,
  };
}

export interface LogEntry {
  candidate_id: string;
  decision: "accept" | "reject";
  annotator: string;
  timestamp: string;
  rule_snapshot: number;
}

export interface HandledRequest {
  method: string;
  url: string;
  body: unknown;
}

interface Handled {
  status: number;
  payload: unknown;
}

const STATUSES: ReadonlySet<string> = new Set(["pending", "accepted", "rejected"]);
const MAX_PAGE_SIZE = 500;
const MIN_RUN_ES = 3;

export class FakeReviewServer {
  private readonly state = new Map<string, CandidateRecord>();
  private readonly order: string[] = [];
  private readonly pristine: CandidateRecord[];
  log: LogEntry[] = [];
  requests: HandledRequest[] = [];
  failNextWithNetworkError = false;
  private clock = 0;

  constructor(records: CandidateRecord[]) {
    this.pristine = records.map((record) => structuredClone(record));
    for (const record of records) {
      this.state.set(record.id, structuredClone(record));
      this.order.push(record.id);
    }
  }

  /** A fresh server over the same candidate file, with the decision log
   * replayed — models a process restart. */
  restart(): FakeReviewServer {
    const next = new FakeReviewServer(this.pristine);
    for (const entry of this.log) {
      next.replay(entry);
    }
    next.log = this.log.map((entry) => ({ ...entry }));
    return next;
  }

  private replay(entry: LogEntry): void {
    const record = this.state.get(entry.candidate_id);
    if (record === undefined) {
      throw new Error(`log replay: unknown candidate ${entry.candidate_id}`);
    }
    record.status = entry.decision === "accept" ? "accepted" : "rejected";
    record.decided_by = entry.annotator;
    record.decided_at = entry.timestamp;
  }

  record(id: string): CandidateRecord {
    const record = this.state.get(id);
    if (record === undefined) {
      throw new Error(`no such candidate ${id}`);
    }
    return structuredClone(record);
  }

  postCount(): number {
    return this.requests.filter((request) => request.method === "POST").length;
  }

  handle(method: string, rawUrl: string, body: unknown): Handled {
    const url = new URL(rawUrl, "http://fake.test");
    const path = url.pathname;
    if (method === "GET" && path === "/api/candidates") {
      return this.handleList(url);
    }
    const single = path.match(/^\/api\/candidates\/([^/]+)$/);
    if (method === "GET" && single) {
      return this.handleGet(decodeURIComponent(single[1] ?? ""));
    }
    const decision = path.match(/^\/api\/candidates\/([^/]+)\/decision$/);
    if (method === "POST" && decision) {
      return this.handleDecision(decodeURIComponent(decision[1] ?? ""), body);
    }
    if (method === "GET" && path === "/api/stats") {
      return this.handleStats();
    }
    return { status: 404, payload: { detail: "Not Found" } };
  }

  private handleList(url: URL): Handled {
    const rawLimit = url.searchParams.get("limit");
    const limit = rawLimit === null ? 50 : Number(rawLimit);
    if (!Number.isInteger(limit) || limit < 1 || limit > MAX_PAGE_SIZE) {
      return {
        status: 422,
        payload: {
          detail: [
            {
              type: "value_error",
              loc: ["query", "limit"],
              msg: `Input should be between 1 and ${MAX_PAGE_SIZE}`,
            },
          ],
        },
      };
    }
    const status = url.searchParams.get("status");
    if (status !== null && !STATUSES.has(status)) {
      return { status: 400, payload: { detail: `unknown status '${status}'` } };
    }
    const cursor = url.searchParams.get("cursor");
    let start = 0;
    if (cursor !== null) {
      const index = this.order.indexOf(cursor);
      if (index === -1) {
        return { status: 400, payload: { detail: `unknown cursor '${cursor}'` } };
      }
      start = index + 1;
    }
    const matches = (id: string): boolean =>
      status === null || this.state.get(id)?.status === status;
    const matchingIds = this.order.filter(matches);
    const window = this.order.slice(start).filter(matches).slice(0, limit);
    const last = window[window.length - 1];
    const lastMatching = matchingIds[matchingIds.length - 1];
    const nextCursor = last !== undefined && last !== lastMatching ? last : null;
    return {
      status: 200,
      payload: {
        items: window.map((id) => structuredClone(this.state.get(id)!)),
        next_cursor: nextCursor,
        total: matchingIds.length,
      },
    };
  }

  private handleGet(id: string): Handled {
    const record = this.state.get(id);
    if (record === undefined) {
      return { status: 404, payload: { detail: `no candidate '${id}'` } };
    }
    return { status: 200, payload: structuredClone(record) };
  }

  private handleDecision(id: string, body: unknown): Handled {
    const parsed = body as { decision?: unknown; annotator?: unknown } | null;
    const errors: { type: string; loc: string[]; msg: string }[] = [];
    if (parsed?.decision !== "accept" && parsed?.decision !== "reject") {
      errors.push({
        type: "literal_error",
        loc: ["body", "decision"],
        msg: "Input should be 'accept' or 'reject'",
      });
    }
    if (typeof parsed?.annotator !== "string" || parsed.annotator.length < 1) {
      errors.push({
        type: "string_too_short",
        loc: ["body", "annotator"],
        msg: "String should have at least 1 character",
      });
    }
    if (errors.length > 0) {
      return { status: 422, payload: { detail: errors } };
    }
    const { decision, annotator } = parsed as {
      decision: "accept" | "reject";
      annotator: string;
    };
    const record = this.state.get(id);
    if (record === undefined) {
      return { status: 404, payload: { detail: `no candidate '${id}'` } };
    }
    if (record.status !== "pending") {
      return {
        status: 409,
        payload: {
          detail: {
            error: "already_decided",
            message: `candidate '${id}' is already ${record.status}`,
          },
        },
      };
    }
    if (decision === "accept" && record.method === "keyword" && record.max_run_es < MIN_RUN_ES) {
      return {
        status: 422,
        payload: {
          detail: {
            error: "rule_violation",
            message:
              `candidate '${id}': accept requires at least ${MIN_RUN_ES} ` +
              `consecutive Spanish words, found ${record.max_run_es}`,
          },
        },
      };
    }
    this.clock += 1;
    record.status = decision === "accept" ? "accepted" : "rejected";
    record.decided_by = annotator;
    record.decided_at = new Date(Date.UTC(2026, 0, 1, 0, 0, this.clock)).toISOString();
    this.log.push({
      candidate_id: id,
      decision,
      annotator,
      timestamp: record.decided_at,
      rule_snapshot: record.max_run_es,
    });
    return { status: 200, payload: structuredClone(record) };
  }

  private handleStats(): Handled {
    const byStatus: Record<CandidateStatus, number> = {
      pending: 0,
      accepted: 0,
      rejected: 0,
    };
    const byMethod: Record<string, number> = {};
    for (const record of this.state.values()) {
      byStatus[record.status] += 1;
      byMethod[record.method] = (byMethod[record.method] ?? 0) + 1;
    }
    return {
      status: 200,
      payload: { total: this.state.size, status: byStatus, method: byMethod },
    };
  }
}

/** Adapt a fake server into the client's fetch contract. */
export function fakeFetch(server: FakeReviewServer): FetchLike {
  return async (url: string, init?: RequestInitLike): Promise<ResponseLike> => {
    if (server.failNextWithNetworkError) {
      server.failNextWithNetworkError = false;
      throw new TypeError("fetch failed");
    }
    const method = init?.method ?? "GET";
    let body: unknown = null;
    if (init?.body !== undefined) {
      try {
        body = JSON.parse(init.body);
      } catch {
        body = init.body;
      }
    }
    server.requests.push({ method, url, body });
    const { status, payload } = server.handle(method, url, body);
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => structuredClone(payload),
    };
  };
}

/** A small mixed-language corpus: two acceptable candidates, one whose
 * Spanish run is too short, and one already accepted. */
export function sampleRecords(): CandidateRecord[] {
  return [
    makeRecord(
      "cand-1",
      [
        ["avui", "ca"],
        ["plou", "ca"],
        ["pero", "es"],
        ["bueno", "es"],
        ["no", "es"],
        ["pasa", "es"],
        ["nada", "es"],
      ],
      { audio_path: "clips/cand-1.wav", duration_s: 2.4 },
    ),
    makeRecord(
      "cand-2",
      [
        ["bueno", "es"],
        ["entonces", "es"],
        ["que", "es"],
        ["anem", "ca"],
        ["al", "ca"],
        ["mercat", "ca"],
      ],
      { audio_path: "clips/cand-2.wav", duration_s: 1.9 },
    ),
    makeRecord("cand-3", [
      ["la", "ca"],
      ["reunio", "ca"],
      ["vale", "es"],
      ["comenca", "ca"],
      ["ara", "ca"],
    ]),
    makeRecord(
      "cand-4",
      [
        ["pues", "es"],
        ["mira", "es"],
        ["tu", "es"],
        ["ja", "ca"],
        ["ho", "ca"],
        ["sabia", "ca"],
      ],
      {
        status: "accepted",
        decided_by: "ana",
        decided_at: "2025-12-31T10:00:00+00:00",
        audio_path: "clips/cand-4.wav",
      },
    ),
  ];
}
