// Session-view state machine. Every transition consumes a service response,
// so the view never fabricates dialogue content: each system bubble's text
// arrives verbatim from the service.

import type { OpenSessionResponse, SessionLog, TurnResponse } from "./api.js";

export type Phase = "connecting" | "chatting" | "questionnaire" | "done" | "error";

export interface Message {
  speaker: "user" | "system";
  text: string;
  acts?: string[];
}

export interface PendingAnswers {
  q1_subj_succ: boolean | null;
  q2_voice_int: number | null;
  q3_understand: number | null;
  q4_as_expect: number | null;
  q5_would_use: number | null;
}

export interface ChatView {
  phase: Phase;
  sessionId: string | null;
  taskText: string;
  messages: Message[];
  answers: PendingAnswers;
  busy: boolean;
  error: string | null;
}

export const EMPTY_ANSWERS: PendingAnswers = {
  q1_subj_succ: null,
  q2_voice_int: null,
  q3_understand: null,
  q4_as_expect: null,
  q5_would_use: null,
};

export function initialView(): ChatView {
  return {
    phase: "connecting",
    sessionId: null,
    taskText: "",
    messages: [],
    answers: { ...EMPTY_ANSWERS },
    busy: false,
    error: null,
  };
}

export function sessionOpened(view: ChatView, res: OpenSessionResponse): ChatView {
  return {
    ...view,
    phase: "chatting",
    sessionId: res.session_id,
    taskText: res.task_text,
    messages: [{ speaker: "system", text: res.greeting }],
    error: null,
  };
}

export function openFailed(view: ChatView, message: string): ChatView {
  return { ...view, phase: "error", error: message };
}

export function userSent(view: ChatView, text: string): ChatView {
  if (view.phase !== "chatting") {
    throw new Error(`cannot send in phase ${view.phase}`);
  }
  return {
    ...view,
    busy: true,
    messages: [...view.messages, { speaker: "user", text }],
  };
}

export function systemReplied(view: ChatView, res: TurnResponse): ChatView {
  return {
    ...view,
    busy: false,
    error: null,
    phase: res.finished ? "questionnaire" : view.phase,
    messages: [
      ...view.messages,
      { speaker: "system", text: res.system_text, acts: res.acts },
    ],
  };
}

export function turnFailed(view: ChatView, message: string): ChatView {
  return { ...view, busy: false, error: message };
}

export function answerChanged(
  view: ChatView,
  key: keyof PendingAnswers,
  value: boolean | number,
): ChatView {
  return { ...view, answers: { ...view.answers, [key]: value } };
}

export function allAnswered(answers: PendingAnswers): boolean {
  return Object.values(answers).every((v) => v !== null);
}

export function submitStarted(view: ChatView): ChatView {
  if (view.phase !== "questionnaire" || !allAnswered(view.answers)) {
    throw new Error("questionnaire incomplete");
  }
  return { ...view, busy: true };
}

export function ratingsStored(view: ChatView): ChatView {
  return { ...view, busy: false, phase: "done", error: null };
}

export function submitFailed(view: ChatView, message: string): ChatView {
  return { ...view, busy: false, error: message };
}

// A page refresh mid-session rebuilds the view from the persisted log.
export function resumed(view: ChatView, sessionId: string, log: SessionLog): ChatView {
  const messages: Message[] = [];
  for (const record of log.records) {
    messages.push({ speaker: "user", text: record.user_text });
    messages.push({
      speaker: "system",
      text: record.system_text,
      acts: record.system_acts ? record.system_acts.split("; ") : undefined,
    });
  }
  let phase: Phase = "chatting";
  if (log.status === "finished") {
    phase = log.questionnaire ? "done" : "questionnaire";
  }
  return {
    ...view,
    phase,
    sessionId,
    taskText: log.task_text,
    messages,
    error: null,
  };
}
