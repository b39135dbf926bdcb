// Wire types mirroring the service's /api responses.

export interface AnswerSpan {
  text: string;
  start_char: number;
  score: number;
}

export interface TurnScore {
  turn: number;
  score: number;
}

export interface StructuredRepresentation {
  context_entities: string[];
  question_entities: string[];
}

export interface TurnTrace {
  answer: AnswerSpan;
  scores: TurnScore[];
  selected: number[];
  sr: StructuredRepresentation;
  augmented_question: string;
  reader_input_tag: string;
  diagnostics: string[];
}

export interface Passage {
  id: string;
  title: string;
  background: string;
  text: string;
  cannot_answer_marker: string;
}

export interface DialogueSummary {
  id: string;
  title: string;
  num_turns: number;
  first_question: string;
}

export interface DialoguePage {
  total: number;
  offset: number;
  dialogues: DialogueSummary[];
}

export interface TranscriptTurn {
  turn_index: number;
  question: string;
  answer: AnswerSpan | null;
}

export interface Transcript {
  id: string;
  mode: string;
  passage: Passage;
  turns: TranscriptTurn[];
  traces: TurnTrace[];
}

export interface DatasetSummary {
  name: string;
  split: string;
  num_dialogues: number;
  num_questions: number;
}

export type ModeName = "convsr" | "pipeline" | "baseline";

// Controls state applied to the next question (via session replay).
export interface Settings {
  mode: ModeName;
  policy: string;
  withSr: boolean;
  threshold: number;
  k: number | null;
}

export const DEFAULT_SETTINGS: Settings = {
  mode: "convsr",
  policy: "dynamic",
  withSr: false,
  threshold: 0.75,
  k: null,
};
