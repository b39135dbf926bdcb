// Paginated dialogue browser; picking one seeds a session with its passage.

import type { ApiClient } from "./api.js";
import type { DialogueSummary } from "./types.js";

const PAGE_SIZE = 8;

export function createDialogueBrowser(container: HTMLElement, api: ApiClient,
                                      onPick: (dialogueId: string) => void) {
  const title = document.createElement("h2");
  title.className = "panel-title";
  title.textContent = "Dialogues";
  const list = document.createElement("ul");
  list.className = "dialogue-list";
  const pager = document.createElement("div");
  pager.className = "pager";
  const prev = document.createElement("button");
  prev.textContent = "‹ prev";
  const next = document.createElement("button");
  next.textContent = "next ›";
  const status = document.createElement("span");
  pager.append(prev, status, next);
  container.append(title, list, pager);

  let offset = 0;
  let total = 0;

  function render(dialogues: DialogueSummary[]) {
    list.replaceChildren();
    for (const dialogue of dialogues) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.className = "dialogue-pick";
      button.textContent = `${dialogue.title} (${dialogue.num_turns} turns)`;
      button.title = dialogue.first_question;
      button.addEventListener("click", () => onPick(dialogue.id));
      item.append(button);
      list.append(item);
    }
    if (!dialogues.length) {
      const item = document.createElement("li");
      item.className = "placeholder";
      item.textContent = "No corpus loaded.";
      list.append(item);
    }
    status.textContent = total ? `${offset + 1}–${Math.min(offset + PAGE_SIZE, total)} of ${total}` : "";
    prev.disabled = offset === 0;
    next.disabled = offset + PAGE_SIZE >= total;
  }

  async function load() {
    const page = await api.dialogues("", offset, PAGE_SIZE);
    total = page.total;
    render(page.dialogues);
  }

  prev.addEventListener("click", () => {
    offset = Math.max(0, offset - PAGE_SIZE);
    void load();
  });
  next.addEventListener("click", () => {
    offset = Math.min(total - 1, offset + PAGE_SIZE);
    void load();
  });

  return { load };
}
