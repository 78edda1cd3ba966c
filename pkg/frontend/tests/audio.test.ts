import { describe, expect, it } from "vitest";

import { PlaybackController } from "../src/audio.js";
import type { AudioLike } from "../src/audio.js";

class StubAudio implements AudioLike {
  src = "";
  paused = true;
  currentTime = 0;
  played: string[] = [];

  play(): void {
    this.paused = false;
    this.played.push(this.src);
  }

  pause(): void {
    this.paused = true;
  }
}

describe("PlaybackController", () => {
  it("reports candidates without audio as unavailable", () => {
    const stub = new StubAudio();
    const controller = new PlaybackController(stub);
    expect(controller.toggle(null)).toBe("unavailable");
    expect(stub.played).toEqual([]);
  });

  it("starts playback for a new clip", () => {
    const stub = new StubAudio();
    const controller = new PlaybackController(stub);
    expect(controller.toggle("/api/audio/cand-1")).toBe("playing");
    expect(stub.src).toBe("/api/audio/cand-1");
    expect(stub.paused).toBe(false);
  });

  it("pauses when the same clip is toggled again", () => {
    const stub = new StubAudio();
    const controller = new PlaybackController(stub);
    controller.toggle("/api/audio/cand-1");
    expect(controller.toggle("/api/audio/cand-1")).toBe("paused");
    expect(stub.paused).toBe(true);
  });

  it("resumes a paused clip without rewinding", () => {
    const stub = new StubAudio();
    const controller = new PlaybackController(stub);
    controller.toggle("/api/audio/cand-1");
    stub.currentTime = 1.5;
    controller.toggle("/api/audio/cand-1"); // pause
    expect(controller.toggle("/api/audio/cand-1")).toBe("playing");
    expect(stub.currentTime).toBe(1.5);
  });

  it("switches clips from the start", () => {
    const stub = new StubAudio();
    const controller = new PlaybackController(stub);
    controller.toggle("/api/audio/cand-1");
    stub.currentTime = 2.0;
    expect(controller.toggle("/api/audio/cand-2")).toBe("playing");
    expect(stub.src).toBe("/api/audio/cand-2");
    expect(stub.currentTime).toBe(0);
    expect(stub.played).toEqual(["/api/audio/cand-1", "/api/audio/cand-2"]);
  });

  it("stop is a no-op when nothing plays", () => {
    const stub = new StubAudio();
    const controller = new PlaybackController(stub);
    controller.stop();
    controller.toggle("/api/audio/cand-1");
    controller.stop();
    expect(stub.paused).toBe(true);
  });
});
