import { beforeEach, describe, expect, test } from "vitest";

import {
  createErrorBanner,
  createInspectorPanel,
  createPassagePanel,
  createTranscriptPanel,
} from "../src/panels.js";
import type { Passage, TurnTrace } from "../src/types.js";

const passage: Passage = {
  id: "p",
  title: "FRIENDS",
  background: "",
  text: "Cleaning dominated the routine of Monica Geller. CANNOTANSWER",
  cannot_answer_marker: "CANNOTANSWER",
};

const trace: TurnTrace = {
  answer: { text: "Cleaning", start_char: 0, score: 0.22 },
  scores: [
    { turn: 0, score: 0.64 },
    { turn: 1, score: 0.91 },
  ],
  selected: [1],
  sr: { context_entities: ["FRIENDS"], question_entities: ["Monica Geller", "Phoebe"] },
  augmented_question: "And overall? ( | Monica Geller, Phoebe)",
  reader_input_tag: "dynamic",
  diagnostics: ["oracle rewrite miss for (d, 2)"],
};

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "<div id='host'></div>";
  container = document.getElementById("host")!;
});

describe("passage panel", () => {
  test("highlights exactly the answer span", () => {
    const panel = createPassagePanel(container);
    panel.update(passage, trace);
    const marks = container.querySelectorAll("mark.answer-highlight");
    expect(marks).toHaveLength(1);
    expect(marks[0].textContent).toBe("Cleaning");
    expect(container.querySelector(".passage-text")!.textContent).toBe(passage.text);
  });

  test("clears the highlight when there is no trace", () => {
    const panel = createPassagePanel(container);
    panel.update(passage, null);
    expect(container.querySelectorAll("mark")).toHaveLength(0);
  });
});

describe("inspector panel", () => {
  test("renders one bar per history turn with the threshold marker", () => {
    const panel = createInspectorPanel(container);
    panel.update(trace, 0.75);
    const rows = container.querySelectorAll(".score-row");
    expect(rows).toHaveLength(2);
    const bars = container.querySelectorAll<HTMLElement>(".score-bar");
    expect(bars[0].style.width).toBe("64%");
    expect(bars[1].style.width).toBe("91%");
    const markers = container.querySelectorAll<HTMLElement>(".theta-marker");
    expect(markers).toHaveLength(2);
    expect(markers[0].style.left).toBe("75%");
    expect(rows[1].classList.contains("selected")).toBe(true);
    expect(rows[0].classList.contains("selected")).toBe(false);
    expect(container.querySelectorAll(".selected-badge")).toHaveLength(1);
  });

  test("renders SR chips split by slot", () => {
    const panel = createInspectorPanel(container);
    panel.update(trace, 0.75);
    const context = [...container.querySelectorAll(".chip.context")].map((c) => c.textContent);
    const question = [...container.querySelectorAll(".chip.question")].map((c) => c.textContent);
    expect(context).toEqual(["FRIENDS"]);
    expect(question).toEqual(["Monica Geller", "Phoebe"]);
  });

  test("shows the augmented question and diagnostics verbatim", () => {
    const panel = createInspectorPanel(container);
    panel.update(trace, 0.75);
    expect(container.querySelector(".augmented-question")!.textContent)
      .toBe(trace.augmented_question);
    expect(container.querySelector(".diagnostic")!.textContent)
      .toBe(trace.diagnostics[0]);
  });

  test("empty trace placeholder and empty-history message", () => {
    const panel = createInspectorPanel(container);
    panel.update(null, 0.75);
    expect(container.textContent).toContain("Ask a question");
    panel.update({ ...trace, scores: [], selected: [] }, 0.75);
    expect(container.querySelector(".empty-selection")).not.toBeNull();
  });
});

describe("transcript panel", () => {
  test("renders question and answer bubbles in order", () => {
    let picked = -1;
    const panel = createTranscriptPanel(container, (turn) => { picked = turn; });
    panel.update([
      { turn_index: 0, question: "Q0?", answer: { text: "A0", start_char: 0, score: 1 } },
      { turn_index: 1, question: "Q1?", answer: null },
    ], 1);
    const exchanges = container.querySelectorAll(".exchange");
    expect(exchanges).toHaveLength(2);
    expect(exchanges[0].querySelector(".question")!.textContent).toBe("Q0?");
    expect(exchanges[0].querySelector(".answer")!.textContent).toBe("A0");
    expect(exchanges[1].classList.contains("active")).toBe(true);
    (exchanges[0] as HTMLElement).click();
    expect(picked).toBe(0);
  });
});

describe("error banner", () => {
  test("shows the failing stage name inline", () => {
    const banner = createErrorBanner(container);
    banner.show("reader", "connection refused");
    const node = container.querySelector(".error-banner")!;
    expect(node.textContent).toBe("reader: connection refused");
    expect(node.classList.contains("hidden")).toBe(false);
    banner.clear();
    expect(node.classList.contains("hidden")).toBe(true);
  });
});
