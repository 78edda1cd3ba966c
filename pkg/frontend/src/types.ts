/** Wire types for the review API, mirroring the JSON the server emits. */

export type TokenLang = "ca" | "es" | "unk";
export type CandidateStatus = "pending" | "accepted" | "rejected";
export type Decision = "accept" | "reject";
export type StatusFilter = CandidateStatus | "all";

/** Accepting a keyword candidate requires this many consecutive Spanish words. */
export const MIN_ACCEPT_RUN_ES = 3;

export interface TokenView {
  text: string;
  lang: TokenLang;
  /** Character offsets into the utterance text. */
  start: number;
  end: number;
}

export interface KeywordMatch {
  keyword: string;
  /** Character offsets into the utterance text. */
  start: number;
  end: number;
}

export interface LangCounts {
  ca: number;
  es: number;
  unk: number;
}

export interface CandidateRecord {
  id: string;
  text: string;
  lang: string;
  audio_path?: string;
  speaker_id?: string;
  gender: string;
  duration_s?: number;
  status: CandidateStatus;
  method: string;
  max_run_es: number;
  max_run_ca: number;
  counts: LangCounts;
  tokens: TokenView[];
  matched_keywords: KeywordMatch[];
  decided_by?: string;
  decided_at?: string;
}

export interface CandidatePage {
  items: CandidateRecord[];
  next_cursor: string | null;
  total: number;
}

export interface ReviewStats {
  total: number;
  status: Record<string, number>;
  method: Record<string, number>;
}

/** One candidate prepared for rendering. */
export interface CandidateView {
  record: CandidateRecord;
  /** Streaming URL, or null when the candidate has no audio. */
  audioUrl: string | null;
  /** Mirrors the server's accept rule; the control is disabled when false. */
  canAccept: boolean;
}

export function toView(record: CandidateRecord, base = ""): CandidateView {
  const blockedByRule =
    record.method === "keyword" && record.max_run_es < MIN_ACCEPT_RUN_ES;
  return {
    record,
    audioUrl: record.audio_path
      ? `${base}/api/audio/${encodeURIComponent(record.id)}`
      : null,
    canAccept: record.status === "pending" && !blockedByRule,
  };
}
