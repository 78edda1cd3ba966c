/** Review queue state machine.
 *
 * Decisions apply optimistically: the card's status flips immediately,
 * then the server's response either confirms it (the card leaves a
 * filtered list) or reverts it — a 422 restores the previous state and
 * explains the rule, a 409 restores it and reconciles with the decision
 * made elsewhere. The server stays the authority throughout: the
 * controller never enforces the Spanish-run rule itself, it only
 * disables the accept control via `CandidateView.canAccept`.
 */

import { ApiError } from "./api.js";
import type { ApiClient } from "./api.js";
import type {
  CandidateRecord,
  CandidateView,
  Decision,
  StatusFilter,
} from "./types.js";
import { toView } from "./types.js";

export type BannerKind = "rule_violation" | "conflict" | "network" | "info";

export interface Banner {
  kind: BannerKind;
  message: string;
}

export interface QueueState {
  items: CandidateView[];
  nextCursor: string | null;
  total: number;
  filter: StatusFilter;
  selectedId: string | null;
  loading: boolean;
  banner: Banner | null;
  annotator: string;
  /** Ids with an in-flight decision request. */
  busy: string[];
}

export type Listener = (state: QueueState) => void;

const DEFAULT_PAGE_SIZE = 50;

export class ReviewQueue {
  private state: QueueState = {
    items: [],
    nextCursor: null,
    total: 0,
    filter: "pending",
    selectedId: null,
    loading: false,
    banner: null,
    annotator: "reviewer",
    busy: [],
  };

  private listeners: Listener[] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly pageSize: number = DEFAULT_PAGE_SIZE,
  ) {}

  getState(): QueueState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((entry) => entry !== listener);
    };
  }

  private set(patch: Partial<QueueState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setAnnotator(annotator: string): void {
    this.set({ annotator });
  }

  setFilter(filter: StatusFilter): Promise<void> {
    this.set({ filter, items: [], nextCursor: null, selectedId: null });
    return this.load();
  }

  dismissBanner(): void {
    this.set({ banner: null });
  }

  /** Fetch the first page, replacing the current list. */
  async load(): Promise<void> {
    this.set({ loading: true, banner: null });
    try {
      const page = await this.api.fetchQueue(this.state.filter, null, this.pageSize);
      const items = page.items.map((record) => toView(record));
      const selected =
        items.find((item) => item.record.id === this.state.selectedId) ?? items[0];
      this.set({
        items,
        nextCursor: page.next_cursor,
        total: page.total,
        selectedId: selected ? selected.record.id : null,
        loading: false,
      });
    } catch (error) {
      this.set({ loading: false, banner: networkBanner(error) });
    }
  }

  /** Fetch the next page and append it. */
  async loadMore(): Promise<void> {
    const cursor = this.state.nextCursor;
    if (cursor === null || this.state.loading) {
      return;
    }
    this.set({ loading: true });
    try {
      const page = await this.api.fetchQueue(this.state.filter, cursor, this.pageSize);
      this.set({
        items: [...this.state.items, ...page.items.map((record) => toView(record))],
        nextCursor: page.next_cursor,
        total: page.total,
        loading: false,
      });
    } catch (error) {
      this.set({ loading: false, banner: networkBanner(error) });
    }
  }

  select(id: string): void {
    if (this.state.items.some((item) => item.record.id === id)) {
      this.set({ selectedId: id });
    }
  }

  selectNext(): void {
    this.moveSelection(1);
  }

  selectPrev(): void {
    this.moveSelection(-1);
  }

  private moveSelection(step: number): void {
    const { items, selectedId } = this.state;
    if (items.length === 0) {
      return;
    }
    const index = items.findIndex((item) => item.record.id === selectedId);
    const next = index === -1 ? 0 : Math.min(Math.max(index + step, 0), items.length - 1);
    const item = items[next];
    if (item) {
      this.set({ selectedId: item.record.id });
    }
  }

  selectedView(): CandidateView | null {
    return (
      this.state.items.find((item) => item.record.id === this.state.selectedId) ?? null
    );
  }

  /**
   * Decide the selected candidate. Accept is only issued when the view
   * allows it — the disabled control and this guard together keep the
   * client from sending accepts it knows the server must refuse.
   */
  decideSelected(decision: Decision): Promise<void> {
    const view = this.selectedView();
    if (view === null) {
      return Promise.resolve();
    }
    if (decision === "accept" && !view.canAccept) {
      this.set({
        banner: {
          kind: "info",
          message: `cannot accept ${view.record.id}: longest Spanish run is ${view.record.max_run_es}, the rule needs 3`,
        },
      });
      return Promise.resolve();
    }
    return this.submitDecision(view.record.id, decision);
  }

  /** Optimistically apply a decision and reconcile with the server. */
  async submitDecision(id: string, decision: Decision): Promise<void> {
    const index = this.state.items.findIndex((item) => item.record.id === id);
    if (index === -1 || this.state.busy.includes(id)) {
      return;
    }
    const previous = this.state.items[index];
    if (previous === undefined) {
      return;
    }
    const optimistic: CandidateRecord = {
      ...previous.record,
      status: decision === "accept" ? "accepted" : "rejected",
      decided_by: this.state.annotator,
    };
    this.replaceItem(id, toView(optimistic));
    this.set({ busy: [...this.state.busy, id], banner: null });
    try {
      const updated = await this.api.submitDecision(id, decision, this.state.annotator);
      this.reconcile(id, updated);
    } catch (error) {
      if (error instanceof ApiError && error.code === "rule_violation") {
        this.replaceItem(id, previous);
        this.set({ banner: { kind: "rule_violation", message: error.message } });
      } else if (error instanceof ApiError && error.code === "already_decided") {
        this.replaceItem(id, previous);
        this.set({
          banner: {
            kind: "conflict",
            message: `${error.message} — refreshed with the other annotator's decision`,
          },
        });
        await this.refreshCandidate(id);
      } else if (error instanceof ApiError && error.status === 404) {
        this.removeItem(id);
        this.set({ banner: { kind: "network", message: error.message } });
      } else {
        this.replaceItem(id, previous);
        this.set({ banner: networkBanner(error) });
      }
    } finally {
      this.set({ busy: this.state.busy.filter((entry) => entry !== id) });
    }
  }

  /** Re-fetch one candidate and fold the server's truth into the list. */
  async refreshCandidate(id: string): Promise<void> {
    try {
      const record = await this.api.fetchCandidate(id);
      this.reconcile(id, record);
    } catch {
      // the list view is still consistent; the next load() catches up
    }
  }

  /** Replace the item with the server record, dropping it when it no
   * longer matches the active filter (e.g. an accepted card leaves the
   * pending queue). */
  private reconcile(id: string, record: CandidateRecord): void {
    const { filter } = this.state;
    if (filter !== "all" && record.status !== filter) {
      this.removeItem(id);
      this.set({ total: Math.max(this.state.total - 1, 0) });
    } else {
      this.replaceItem(id, toView(record));
    }
  }

  private replaceItem(id: string, view: CandidateView): void {
    this.set({
      items: this.state.items.map((item) => (item.record.id === id ? view : item)),
    });
  }

  private removeItem(id: string): void {
    const index = this.state.items.findIndex((item) => item.record.id === id);
    if (index === -1) {
      return;
    }
    const items = this.state.items.filter((item) => item.record.id !== id);
    let selectedId = this.state.selectedId;
    if (selectedId === id) {
      const next = items[Math.min(index, items.length - 1)];
      selectedId = next ? next.record.id : null;
    }
    this.set({ items, selectedId });
  }
}

function networkBanner(error: unknown): Banner {
  const message =
    error instanceof Error ? error.message : "request failed; server unreachable";
  return { kind: "network", message };
}
