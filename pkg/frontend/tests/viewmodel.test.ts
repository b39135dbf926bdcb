import { describe, expect, test } from "vitest";

import {
  answerLabel,
  barWidthPercent,
  formatScore,
  highlightSegments,
  scoreRows,
  srChips,
  thresholdPercent,
} from "../src/viewmodel.js";
import type { TurnTrace } from "../src/types.js";

const trace: TurnTrace = {
  answer: { text: "Cleaning", start_char: 0, score: 0.22 },
  scores: [
    { turn: 0, score: 0.64 },
    { turn: 1, score: 0.91 },
  ],
  selected: [1],
  sr: { context_entities: ["FRIENDS"], question_entities: ["Monica Geller"] },
  augmented_question: "And overall? (FRIENDS | Monica Geller)",
  reader_input_tag: "dynamic",
  diagnostics: [],
};

describe("highlightSegments", () => {
  const text = "Cleaning dominated the routine of Monica Geller.";

  test("wraps the answer span", () => {
    const segments = highlightSegments(text, { text: "Cleaning", start_char: 0, score: 1 });
    expect(segments).toEqual([
      { text: "Cleaning", highlighted: true },
      { text: " dominated the routine of Monica Geller.", highlighted: false },
    ]);
  });

  test("mid-passage span produces three segments", () => {
    const start = text.indexOf("Monica Geller");
    const segments = highlightSegments(text, {
      text: "Monica Geller", start_char: start, score: 1,
    });
    expect(segments.map((s) => s.highlighted)).toEqual([false, true, false]);
    expect(segments[1].text).toBe("Monica Geller");
    expect(segments.map((s) => s.text).join("")).toBe(text);
  });

  test("no-answer spans leave the passage unmarked", () => {
    expect(highlightSegments(text, { text: "CANNOTANSWER", start_char: -1, score: 0 }))
      .toEqual([{ text, highlighted: false }]);
    expect(highlightSegments(text, null)).toEqual([{ text, highlighted: false }]);
  });

  test("span that does not match the text is ignored", () => {
    expect(highlightSegments(text, { text: "Wrong", start_char: 0, score: 1 }))
      .toEqual([{ text, highlighted: false }]);
  });
});

describe("bar geometry", () => {
  test("score maps to percent width", () => {
    expect(barWidthPercent(0.91)).toBeCloseTo(91);
    expect(barWidthPercent(-0.2)).toBe(0);
    expect(barWidthPercent(1.7)).toBe(100);
  });

  test("threshold marker position", () => {
    expect(thresholdPercent(0.75)).toBe(75);
  });

  test("score formatting", () => {
    expect(formatScore(0.9055)).toBe("0.91");
  });
});

describe("scoreRows", () => {
  test("selection flags come from the trace verbatim", () => {
    const rows = scoreRows(trace);
    expect(rows).toEqual([
      { turn: 0, score: 0.64, widthPercent: 64, selected: false },
      { turn: 1, score: 0.91, widthPercent: expect.closeTo(91), selected: true },
    ]);
  });
});

describe("srChips", () => {
  test("context chips precede question chips", () => {
    expect(srChips(trace)).toEqual([
      { label: "FRIENDS", slot: "context" },
      { label: "Monica Geller", slot: "question" },
    ]);
  });

  test("empty sr yields no chips", () => {
    expect(srChips({ ...trace, sr: { context_entities: [], question_entities: [] } }))
      .toEqual([]);
  });
});

describe("answerLabel", () => {
  test("plain answer", () => {
    expect(answerLabel({ text: "Cleaning", start_char: 0, score: 1 })).toBe("Cleaning");
  });

  test("no-answer marker is labeled", () => {
    expect(answerLabel({ text: "CANNOTANSWER", start_char: -1, score: 0 }))
      .toBe("CANNOTANSWER (no answer found)");
  });
});
