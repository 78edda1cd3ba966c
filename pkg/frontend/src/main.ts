/** Browser entry point: wires the queue controller, renderers, audio
 * playback, and keyboard shortcuts to the page. All logic lives in the
 * imported modules; this file only touches the DOM.
 */

import { createApiClient } from "./api.js";
import { PlaybackController } from "./audio.js";
import { keyToAction } from "./keyboard.js";
import { ReviewQueue } from "./queue.js";
import { bannerHtml, queueHtml, statsHtml } from "./render.js";
import type { ReviewStats, StatusFilter } from "./types.js";

const ANNOTATOR_KEY = "cs-forge-annotator";

function requireElement<T extends Element>(selector: string): T {
  const element = document.querySelector<T>(selector);
  if (element === null) {
    throw new Error(`missing element: ${selector}`);
  }
  return element;
}

function start(): void {
  const queueRoot = requireElement<HTMLElement>("#queue");
  const bannerRoot = requireElement<HTMLElement>("#banner");
  const statsRoot = requireElement<HTMLElement>("#stats");
  const filterSelect = requireElement<HTMLSelectElement>("#filter");
  const annotatorInput = requireElement<HTMLInputElement>("#annotator");
  const audioElement = requireElement<HTMLAudioElement>("#player");

  const api = createApiClient();
  const queue = new ReviewQueue(api);
  const playback = new PlaybackController(audioElement);
  let stats: ReviewStats | null = null;

  const storedAnnotator = window.localStorage.getItem(ANNOTATOR_KEY);
  if (storedAnnotator) {
    annotatorInput.value = storedAnnotator;
    queue.setAnnotator(storedAnnotator);
  } else {
    annotatorInput.value = queue.getState().annotator;
  }

  function refreshStats(): void {
    api
      .fetchStats()
      .then((latest) => {
        stats = latest;
        statsRoot.innerHTML = statsHtml(stats);
      })
      .catch(() => {
        // stats are cosmetic; the queue banner covers real failures
      });
  }

  queue.subscribe((state) => {
    queueRoot.innerHTML = queueHtml(state);
    bannerRoot.innerHTML = bannerHtml(state.banner);
    const selected = queueRoot.querySelector(".card.selected");
    if (selected instanceof HTMLElement) {
      selected.scrollIntoView({ block: "nearest" });
    }
  });

  function runAction(action: string, id: string | null): void {
    switch (action) {
      case "select":
        if (id !== null) {
          queue.select(id);
        }
        break;
      case "accept":
      case "reject": {
        if (id !== null) {
          queue.select(id);
        }
        void queue
          .decideSelected(action === "accept" ? "accept" : "reject")
          .then(refreshStats);
        break;
      }
      case "play": {
        if (id !== null) {
          queue.select(id);
        }
        const view = queue.selectedView();
        playback.toggle(view ? view.audioUrl : null);
        break;
      }
      case "load-more":
        void queue.loadMore();
        break;
      case "retry":
        void queue.load();
        break;
      case "dismiss":
        queue.dismissBanner();
        break;
      default:
        break;
    }
  }

  document.addEventListener("click", (event) => {
    const target = event.target;
    if (!(target instanceof Element)) {
      return;
    }
    const control = target.closest<HTMLElement>("[data-action]");
    if (control === null || (control instanceof HTMLButtonElement && control.disabled)) {
      return;
    }
    // clicks on a card's buttons must not fall through to card select
    if (control.dataset.action !== "select" || target.closest("button") === null) {
      event.preventDefault();
      runAction(control.dataset.action ?? "", control.dataset.id ?? null);
    }
  });

  document.addEventListener("keydown", (event) => {
    const target = event.target instanceof HTMLElement ? event.target : null;
    const action = keyToAction(event.key, target);
    if (action === null) {
      return;
    }
    event.preventDefault();
    switch (action) {
      case "accept":
      case "reject":
        void queue.decideSelected(action).then(refreshStats);
        break;
      case "play": {
        const view = queue.selectedView();
        playback.toggle(view ? view.audioUrl : null);
        break;
      }
      case "next":
        queue.selectNext();
        break;
      case "prev":
        queue.selectPrev();
        break;
    }
  });

  filterSelect.addEventListener("change", () => {
    void queue.setFilter(filterSelect.value as StatusFilter);
  });

  annotatorInput.addEventListener("change", () => {
    const value = annotatorInput.value.trim() || "reviewer";
    annotatorInput.value = value;
    queue.setAnnotator(value);
    try {
      window.localStorage.setItem(ANNOTATOR_KEY, value);
    } catch {
      // private-mode storage failures are fine; the name just won't stick
    }
  });

  void queue.load();
  refreshStats();
}

document.addEventListener("DOMContentLoaded", start);
