// Thin typed client for the convsr service.

import type {
  DatasetSummary,
  DialoguePage,
  Settings,
  Transcript,
  TurnTrace,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, public status: number, public stage?: string) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let message = `${response.status} ${response.statusText}`;
    let stage: string | undefined;
    try {
      const body = await response.json();
      if (typeof body.detail === "string") {
        message = body.detail;
      } else if (body.detail) {
        stage = body.detail.stage;
        message = body.detail.error ?? message;
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(message, response.status, stage);
  }
  return response.json() as Promise<T>;
}

function post<T>(path: string, body: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export function sessionParams(settings: Settings): Record<string, unknown> {
  return {
    policy: settings.policy,
    with_sr: settings.withSr,
    threshold: settings.threshold,
    k: settings.k,
  };
}

export interface SessionSeed {
  dialogueId?: string;
  passage?: { title: string; background: string; text: string };
}

export class ApiClient {
  constructor(private base: string = "") {}

  health(): Promise<{ status: string }> {
    return request(`${this.base}/api/health`);
  }

  datasets(): Promise<DatasetSummary[]> {
    return request(`${this.base}/api/datasets`);
  }

  dialogues(split = "", offset = 0, limit = 10): Promise<DialoguePage> {
    const query = new URLSearchParams({
      split,
      offset: String(offset),
      limit: String(limit),
    });
    return request(`${this.base}/api/dialogues?${query}`);
  }

  async createSession(seed: SessionSeed, settings: Settings): Promise<string> {
    const body: Record<string, unknown> = {
      mode: settings.mode,
      params: sessionParams(settings),
    };
    if (seed.dialogueId) body.dialogue_id = seed.dialogueId;
    if (seed.passage) body.passage = seed.passage;
    const out = await post<{ session_id: string }>(`${this.base}/api/sessions`, body);
    return out.session_id;
  }

  ask(sessionId: string, text: string): Promise<TurnTrace> {
    return post(`${this.base}/api/sessions/${sessionId}/questions`, { text });
  }

  transcript(sessionId: string): Promise<Transcript> {
    return request(`${this.base}/api/sessions/${sessionId}`);
  }
}
