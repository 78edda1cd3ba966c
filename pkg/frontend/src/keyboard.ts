/** Keyboard shortcut mapping.
 *
 * Kept free of DOM types on the input side so the mapping is testable:
 * callers pass the key and a minimal description of the event target.
 */

export type KeyAction = "accept" | "reject" | "play" | "next" | "prev";

export interface KeyTarget {
  tagName: string;
  isContentEditable: boolean;
}

const EDITABLE_TAGS = new Set(["INPUT", "TEXTAREA", "SELECT"]);

/** Map a key press to a queue action, or null when the key is unbound
 * or typed into a form control. */
export function keyToAction(key: string, target: KeyTarget | null): KeyAction | null {
  if (target && (EDITABLE_TAGS.has(target.tagName.toUpperCase()) || target.isContentEditable)) {
    return null;
  }
  switch (key) {
    case "a":
    case "A":
      return "accept";
    case "r":
    case "R":
      return "reject";
    case " ":
      return "play";
    case "j":
    case "ArrowDown":
      return "next";
    case "k":
    case "ArrowUp":
      return "prev";
    default:
      return null;
  }
}
