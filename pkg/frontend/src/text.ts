// Pure text-pane helpers: minimal diff for outgoing changes, and applying
// server-initiated edits while preserving the caret.

import { WireEdit } from "./protocol.js";

/** Single replacement turning oldText into newText (common prefix/suffix). */
export function minimalEdit(oldText: string, newText: string): WireEdit | null {
  if (oldText === newText) {
    return null;
  }
  let start = 0;
  const maxStart = Math.min(oldText.length, newText.length);
  while (start < maxStart && oldText[start] === newText[start]) {
    start++;
  }
  let oldEnd = oldText.length;
  let newEnd = newText.length;
  while (oldEnd > start && newEnd > start && oldText[oldEnd - 1] === newText[newEnd - 1]) {
    oldEnd--;
    newEnd--;
  }
  return { span: [start, oldEnd], newText: newText.slice(start, newEnd) };
}

export function applyEdits(text: string, edits: WireEdit[]): string {
  let result = text;
  for (let i = edits.length - 1; i >= 0; i--) {
    const { span, newText } = edits[i];
    result = result.slice(0, span[0]) + newText + result.slice(span[1]);
  }
  return result;
}

/** New caret position after applying edits: shifts for edits before the
 * caret, clamps onto the replacement end when the caret sat inside one. */
export function adjustCaret(caret: number, edits: WireEdit[]): number {
  let adjusted = caret;
  for (const { span, newText } of edits) {
    const [start, end] = span;
    if (caret >= end) {
      adjusted += newText.length - (end - start);
    } else if (caret > start) {
      adjusted = start + newText.length;
    }
  }
  return adjusted;
}
