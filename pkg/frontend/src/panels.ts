// DOM panels: passage view, transcript, and the per-turn inspector.
// Factory functions return an update handle; panels own their subtree.

import type { Passage, TranscriptTurn, TurnTrace } from "./types.js";
import {
  answerLabel,
  formatScore,
  highlightSegments,
  scoreRows,
  srChips,
  thresholdPercent,
} from "./viewmodel.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function createPassagePanel(container: HTMLElement) {
  const title = el("h2", "panel-title", "Passage");
  const heading = el("div", "passage-heading");
  const body = el("div", "passage-text");
  container.append(title, heading, body);

  return {
    update(passage: Passage | null, trace: TurnTrace | null) {
      heading.textContent = passage ? passage.title : "";
      body.replaceChildren();
      if (!passage) {
        body.append(el("p", "placeholder", "Pick a dialogue or paste a passage."));
        return;
      }
      for (const segment of highlightSegments(passage.text, trace?.answer ?? null)) {
        if (segment.highlighted) {
          const mark = el("mark", "answer-highlight", segment.text);
          body.append(mark);
        } else {
          body.append(document.createTextNode(segment.text));
        }
      }
    },
  };
}

export function createTranscriptPanel(container: HTMLElement,
                                      onPick: (turn: number) => void) {
  const title = el("h2", "panel-title", "Transcript");
  const list = el("ol", "transcript");
  container.append(title, list);

  return {
    update(turns: TranscriptTurn[], activeTurn: number | null) {
      list.replaceChildren();
      for (const turn of turns) {
        const item = el("li", "exchange");
        if (turn.turn_index === activeTurn) item.classList.add("active");
        item.append(el("div", "bubble question", turn.question));
        if (turn.answer) {
          item.append(el("div", "bubble answer", answerLabel(turn.answer)));
        }
        item.addEventListener("click", () => onPick(turn.turn_index));
        list.append(item);
      }
      if (!turns.length) {
        list.append(el("li", "placeholder", "No questions asked yet."));
      }
    },
  };
}

export function createInspectorPanel(container: HTMLElement) {
  const title = el("h2", "panel-title", "Turn inspector");
  const body = el("div", "inspector-body");
  container.append(title, body);

  function renderScores(trace: TurnTrace, threshold: number): HTMLElement {
    const section = el("section", "inspector-section");
    section.append(el("h3", "", "History similarity"));
    const rows = scoreRows(trace);
    if (!rows.length) {
      section.append(el("p", "placeholder empty-selection", "No history turns scored."));
      return section;
    }
    for (const row of rows) {
      const line = el("div", "score-row" + (row.selected ? " selected" : ""));
      line.append(el("span", "score-label", `turn ${row.turn}`));
      const track = el("div", "score-track");
      const bar = el("div", "score-bar");
      bar.style.width = `${row.widthPercent}%`;
      const marker = el("div", "theta-marker");
      marker.style.left = `${thresholdPercent(threshold)}%`;
      marker.title = `threshold ${formatScore(threshold)}`;
      track.append(bar, marker);
      line.append(track);
      line.append(el("span", "score-value", formatScore(row.score)));
      if (row.selected) line.append(el("span", "selected-badge", "selected"));
      section.append(line);
    }
    return section;
  }

  function renderSr(trace: TurnTrace): HTMLElement {
    const section = el("section", "inspector-section");
    section.append(el("h3", "", "Structured representation"));
    const chips = srChips(trace);
    if (!chips.length) {
      section.append(el("p", "placeholder", "Empty SR."));
      return section;
    }
    const holder = el("div", "chips");
    for (const chip of chips) {
      const node = el("span", `chip ${chip.slot}`, chip.label);
      node.title = chip.slot === "context" ? "context entity" : "question entity";
      holder.append(node);
    }
    section.append(holder);
    return section;
  }

  function renderAugmented(trace: TurnTrace): HTMLElement {
    const section = el("section", "inspector-section");
    section.append(el("h3", "", "Question sent to the reader"));
    const code = el("code", "augmented-question", trace.augmented_question);
    section.append(code);
    section.append(el("p", "meta", `composition: ${trace.reader_input_tag}`));
    for (const note of trace.diagnostics) {
      section.append(el("p", "diagnostic", note));
    }
    return section;
  }

  return {
    update(trace: TurnTrace | null, threshold: number) {
      body.replaceChildren();
      if (!trace) {
        body.append(el("p", "placeholder", "Ask a question to inspect its turn."));
        return;
      }
      body.append(renderScores(trace, threshold), renderSr(trace),
                  renderAugmented(trace));
    },
  };
}

export function createErrorBanner(container: HTMLElement) {
  const banner = el("div", "error-banner hidden");
  container.prepend(banner);
  return {
    show(stage: string | undefined, message: string) {
      banner.textContent = stage ? `${stage}: ${message}` : message;
      banner.classList.remove("hidden");
    },
    clear() {
      banner.classList.add("hidden");
      banner.textContent = "";
    },
  };
}
