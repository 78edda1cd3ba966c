/** Pure HTML builders for the review queue.
 *
 * Every function returns a string so rendering stays testable without a
 * DOM. Interactive elements carry `data-action` (and `data-id`)
 * attributes; the entry point wires them up with event delegation.
 */

import type { Banner, QueueState } from "./queue.js";
import type {
  CandidateView,
  KeywordMatch,
  ReviewStats,
  TokenView,
} from "./types.js";
import { MIN_ACCEPT_RUN_ES } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Token index range [start, end) of the first maximal run of Spanish
 * tokens, or null when no Spanish token exists. */
export function longestEsRun(tokens: TokenView[]): [number, number] | null {
  let best: [number, number] | null = null;
  let runStart = -1;
  for (let i = 0; i <= tokens.length; i += 1) {
    const isEs = i < tokens.length && tokens[i]?.lang === "es";
    if (isEs && runStart === -1) {
      runStart = i;
    } else if (!isEs && runStart !== -1) {
      if (best === null || i - runStart > best[1] - best[0]) {
        best = [runStart, i];
      }
      runStart = -1;
    }
  }
  return best;
}

function overlapsKeyword(token: TokenView, matches: KeywordMatch[]): boolean {
  return matches.some((match) => token.start < match.end && match.start < token.end);
}

/** Render the utterance as per-token spans: language classes, emphasis
 * on the longest Spanish run, and a mark on keyword-matched tokens. */
export function tokensHtml(tokens: TokenView[], matches: KeywordMatch[]): string {
  const run = longestEsRun(tokens);
  const parts = tokens.map((token, index) => {
    const classes = ["tok", `lang-${token.lang}`];
    if (run !== null && index >= run[0] && index < run[1]) {
      classes.push("run-es");
    }
    if (overlapsKeyword(token, matches)) {
      classes.push("kw");
    }
    return `<span class="${classes.join(" ")}">${escapeHtml(token.text)}</span>`;
  });
  return parts.join(" ");
}

function audioButtonHtml(view: CandidateView): string {
  const id = escapeHtml(view.record.id);
  if (view.audioUrl === null) {
    return (
      `<button class="audio" disabled title="no audio available for this candidate"` +
      ` data-action="play" data-id="${id}">&#9658; play</button>`
    );
  }
  return `<button class="audio" data-action="play" data-id="${id}">&#9658; play</button>`;
}

function acceptButtonHtml(view: CandidateView): string {
  const id = escapeHtml(view.record.id);
  if (view.canAccept) {
    return `<button class="accept" data-action="accept" data-id="${id}">accept (a)</button>`;
  }
  const title =
    view.record.status !== "pending"
      ? `already ${view.record.status}`
      : `accept requires a run of at least ${MIN_ACCEPT_RUN_ES} consecutive Spanish words;` +
        ` this candidate's longest is ${view.record.max_run_es}`;
  return (
    `<button class="accept" disabled title="${escapeHtml(title)}"` +
    ` data-action="accept" data-id="${id}">accept (a)</button>`
  );
}

function rejectButtonHtml(view: CandidateView): string {
  const id = escapeHtml(view.record.id);
  if (view.record.status !== "pending") {
    return (
      `<button class="reject" disabled title="already ${escapeHtml(view.record.status)}"` +
      ` data-action="reject" data-id="${id}">reject (r)</button>`
    );
  }
  return `<button class="reject" data-action="reject" data-id="${id}">reject (r)</button>`;
}

export function candidateCardHtml(
  view: CandidateView,
  selected: boolean,
  busy: boolean,
): string {
  const record = view.record;
  const id = escapeHtml(record.id);
  const classes = ["card", `status-${record.status}`];
  if (selected) {
    classes.push("selected");
  }
  if (busy) {
    classes.push("busy");
  }
  const runClass = record.max_run_es >= MIN_ACCEPT_RUN_ES ? "run-ok" : "run-short";
  const duration =
    record.duration_s !== undefined && record.duration_s !== null
      ? `<span class="duration">${record.duration_s.toFixed(2)}s</span>`
      : "";
  return `<article class="${classes.join(" ")}" data-action="select" data-id="${id}">
  <header>
    <span class="id">${id}</span>
    <span class="badge badge-${record.status}">${record.status}</span>
    <span class="method">${escapeHtml(record.method)}</span>
    ${duration}
  </header>
  <p class="text">${tokensHtml(record.tokens, record.matched_keywords)}</p>
  <p class="meter ${runClass}">longest Spanish run: ${record.max_run_es} (needs ${MIN_ACCEPT_RUN_ES})</p>
  <footer>
    ${audioButtonHtml(view)}
    ${acceptButtonHtml(view)}
    ${rejectButtonHtml(view)}
  </footer>
</article>`;
}

export function bannerHtml(banner: Banner | null): string {
  if (banner === null) {
    return "";
  }
  const retry =
    banner.kind === "network"
      ? ` <button data-action="retry">retry</button>`
      : "";
  return (
    `<div class="banner banner-${banner.kind}" role="alert">` +
    `<span>${escapeHtml(banner.message)}</span>${retry}` +
    `<button data-action="dismiss" aria-label="dismiss">&times;</button></div>`
  );
}

export function statsHtml(stats: ReviewStats | null): string {
  if (stats === null) {
    return "";
  }
  const status = stats.status;
  return (
    `<span class="stats">${stats.total} candidates &middot; ` +
    `${status.pending ?? 0} pending &middot; ` +
    `${status.accepted ?? 0} accepted &middot; ` +
    `${status.rejected ?? 0} rejected</span>`
  );
}

export function queueHtml(state: QueueState): string {
  if (state.loading && state.items.length === 0) {
    return `<p class="loading">loading&hellip;</p>`;
  }
  if (state.items.length === 0) {
    const label = state.filter === "all" ? "" : ` ${escapeHtml(state.filter)}`;
    return `<p class="empty">no${label} candidates</p>`;
  }
  const cards = state.items
    .map((view) =>
      candidateCardHtml(
        view,
        view.record.id === state.selectedId,
        state.busy.includes(view.record.id),
      ),
    )
    .join("\n");
  const more =
    state.nextCursor !== null
      ? `\n<button class="load-more" data-action="load-more"${state.loading ? " disabled" : ""}>load more</button>`
      : "";
  return `${cards}${more}`;
}
