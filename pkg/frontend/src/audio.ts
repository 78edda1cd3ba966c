/** Playback control around a single reusable audio element.
 *
 * The element is injected behind a minimal interface so the toggle
 * logic is testable without a browser.
 */

export interface AudioLike {
  src: string;
  paused: boolean;
  currentTime: number;
  play(): Promise<void> | void;
  pause(): void;
}

export type PlaybackResult = "playing" | "paused" | "unavailable";

export class PlaybackController {
  constructor(private readonly element: AudioLike) {}

  /** Play the clip at `url`, pause it when it is already playing, or
   * report it unavailable when the candidate has no audio. */
  toggle(url: string | null): PlaybackResult {
    if (url === null) {
      return "unavailable";
    }
    const element = this.element;
    if (element.src === url && !element.paused) {
      element.pause();
      return "paused";
    }
    if (element.src !== url) {
      element.src = url;
      element.currentTime = 0;
    }
    void element.play();
    return "playing";
  }

  stop(): void {
    if (!this.element.paused) {
      this.element.pause();
    }
  }
}
