// Session state and wiring: one in-flight question per session (the input
// stays disabled until the trace arrives), settings changes replay the
// transcript in a fresh session over the same seed.

import { ApiClient, ApiError, type SessionSeed } from "./api.js";
import { createDialogueBrowser } from "./browser.js";
import { createControls } from "./controls.js";
import {
  createErrorBanner,
  createInspectorPanel,
  createPassagePanel,
  createTranscriptPanel,
} from "./panels.js";
import { DEFAULT_SETTINGS, type Settings, type Transcript, type TurnTrace } from "./types.js";

export interface Entry {
  question: string;
  trace: TurnTrace;
}

export class SessionController {
  sessionId: string | null = null;
  seed: SessionSeed | null = null;
  entries: Entry[] = [];
  settings: Settings = { ...DEFAULT_SETTINGS };
  busy = false;

  constructor(private api: ApiClient) {}

  async start(seed: SessionSeed): Promise<void> {
    this.seed = seed;
    this.entries = [];
    this.sessionId = await this.api.createSession(seed, this.settings);
  }

  async ask(text: string): Promise<TurnTrace> {
    if (!this.sessionId) throw new Error("no active session");
    if (this.busy) throw new Error("a question is already in flight");
    this.busy = true;
    try {
      const trace = await this.api.ask(this.sessionId, text);
      this.entries.push({ question: text, trace });
      return trace;
    } finally {
      this.busy = false;
    }
  }

  /** Restart with new settings and replay the transcript questions. */
  async applySettings(settings: Settings): Promise<void> {
    this.settings = { ...settings };
    if (!this.seed || this.busy) return;
    const questions = this.entries.map((entry) => entry.question);
    this.busy = true;
    try {
      this.sessionId = await this.api.createSession(this.seed, this.settings);
      this.entries = [];
      for (const question of questions) {
        const trace = await this.api.ask(this.sessionId, question);
        this.entries.push({ question, trace });
      }
    } finally {
      this.busy = false;
    }
  }

  async transcript(): Promise<Transcript> {
    if (!this.sessionId) throw new Error("no active session");
    return this.api.transcript(this.sessionId);
  }
}

export function mountApp(root: HTMLElement, api = new ApiClient()): SessionController {
  root.innerHTML = `
    <header class="topbar"><h1>convsr</h1>
      <span class="subtitle">conversational QA with structured representations</span>
    </header>
    <main class="layout">
      <aside class="column side">
        <section class="panel" id="browser-panel"></section>
        <section class="panel" id="controls-panel"></section>
      </aside>
      <section class="column center">
        <section class="panel" id="passage-panel"></section>
        <section class="panel" id="transcript-panel"></section>
        <form class="ask-form" id="ask-form">
          <input id="ask-input" type="text" autocomplete="off"
                 placeholder="Ask a question about the passage..." disabled>
          <button id="ask-button" type="submit" disabled>Ask</button>
        </form>
      </section>
      <aside class="column side">
        <section class="panel" id="inspector-panel"></section>
      </aside>
    </main>`;

  const controller = new SessionController(api);
  const banner = createErrorBanner(root);
  const passagePanel = createPassagePanel(pick(root, "#passage-panel"));
  const inspector = createInspectorPanel(pick(root, "#inspector-panel"));
  const transcriptPanel = createTranscriptPanel(pick(root, "#transcript-panel"),
                                                (turn) => showTurn(turn));
  const form = pick<HTMLFormElement>(root, "#ask-form");
  const input = pick<HTMLInputElement>(root, "#ask-input");
  const button = pick<HTMLButtonElement>(root, "#ask-button");

  let passageText: Transcript["passage"] | null = null;
  let activeTurn: number | null = null;

  function setBusy(busy: boolean) {
    input.disabled = busy || controller.sessionId === null;
    button.disabled = busy || controller.sessionId === null;
  }

  function showTurn(turn: number) {
    activeTurn = turn;
    const entry = controller.entries[turn] ?? null;
    inspector.update(entry ? entry.trace : null, controller.settings.threshold);
    passagePanel.update(passageText, entry ? entry.trace : null);
    renderTranscript();
  }

  function renderTranscript() {
    transcriptPanel.update(
      controller.entries.map((entry, index) => ({
        turn_index: index,
        question: entry.question,
        answer: entry.trace.answer,
      })),
      activeTurn,
    );
  }

  function showLatest() {
    if (controller.entries.length) {
      showTurn(controller.entries.length - 1);
    } else {
      activeTurn = null;
      inspector.update(null, controller.settings.threshold);
      passagePanel.update(passageText, null);
      renderTranscript();
    }
  }

  function fail(error: unknown) {
    if (error instanceof ApiError) {
      banner.show(error.stage, error.message);
    } else {
      banner.show(undefined, String(error));
    }
  }

  async function startFromDialogue(dialogueId: string) {
    banner.clear();
    setBusy(true);
    try {
      await controller.start({ dialogueId });
      const transcript = await controller.transcript();
      passageText = transcript.passage;
      showLatest();
    } catch (error) {
      fail(error);
    } finally {
      setBusy(false);
    }
  }

  const browser = createDialogueBrowser(pick(root, "#browser-panel"), api,
                                        (id) => void startFromDialogue(id));
  createControls(pick(root, "#controls-panel"), controller.settings, (settings) => {
    banner.clear();
    setBusy(true);
    controller.applySettings(settings)
      .then(() => showLatest())
      .catch(fail)
      .finally(() => setBusy(false));
  });

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text || controller.busy) return;
    banner.clear();
    setBusy(true);
    controller.ask(text)
      .then(() => {
        input.value = "";
        showLatest();
      })
      .catch(fail)
      .finally(() => setBusy(false));
  });

  void browser.load().catch(fail);
  showLatest();
  return controller;
}

function pick<T extends HTMLElement = HTMLElement>(root: HTMLElement, selector: string): T {
  const node = root.querySelector<T>(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node;
}
