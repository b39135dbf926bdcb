// Pure helpers behind the panels: segmenting the passage around the answer
// span, bar geometry for score rows, and chip/label formatting.  Everything
// here displays trace fields as returned by the API; nothing is recomputed.

import type { AnswerSpan, TurnTrace } from "./types.js";

export interface Segment {
  text: string;
  highlighted: boolean;
}

/** Split passage text into segments so the answer span can be wrapped. */
export function highlightSegments(text: string, answer: AnswerSpan | null): Segment[] {
  if (!answer || answer.start_char < 0 || answer.text.length === 0) {
    return [{ text, highlighted: false }];
  }
  const start = answer.start_char;
  const end = start + answer.text.length;
  if (start >= text.length || text.slice(start, end) !== answer.text) {
    return [{ text, highlighted: false }];
  }
  const segments: Segment[] = [];
  if (start > 0) segments.push({ text: text.slice(0, start), highlighted: false });
  segments.push({ text: text.slice(start, end), highlighted: true });
  if (end < text.length) segments.push({ text: text.slice(end), highlighted: false });
  return segments;
}

/** Width of a score bar, clamped to [0, 100]. */
export function barWidthPercent(score: number): number {
  return Math.min(100, Math.max(0, score * 100));
}

/** Horizontal position of the threshold marker, clamped to [0, 100]. */
export function thresholdPercent(threshold: number): number {
  return Math.min(100, Math.max(0, threshold * 100));
}

export function formatScore(score: number): string {
  return score.toFixed(2);
}

export interface ScoreRow {
  turn: number;
  score: number;
  widthPercent: number;
  selected: boolean;
}

/** One row per history turn, selection flags taken from the trace verbatim. */
export function scoreRows(trace: TurnTrace): ScoreRow[] {
  const selected = new Set(trace.selected);
  return trace.scores.map((s) => ({
    turn: s.turn,
    score: s.score,
    widthPercent: barWidthPercent(s.score),
    selected: selected.has(s.turn),
  }));
}

export interface Chip {
  label: string;
  slot: "context" | "question";
}

export function srChips(trace: TurnTrace): Chip[] {
  const chips: Chip[] = [];
  for (const label of trace.sr.context_entities) chips.push({ label, slot: "context" });
  for (const label of trace.sr.question_entities) chips.push({ label, slot: "question" });
  return chips;
}

export function answerLabel(answer: AnswerSpan): string {
  return answer.start_char < 0 ? `${answer.text} (no answer found)` : answer.text;
}
