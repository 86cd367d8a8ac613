// DOM rendering: one render(view) pass over a static skeleton. All state
// lives in state.ts; this module only mirrors it into the page.

import type { ChatView, PendingAnswers } from "./state.js";
import { allAnswered } from "./state.js";
import { LIKERT_MAX, LIKERT_MIN, LIKERT_PREAMBLE, LIKERT_QUESTIONS, Q1_TEXT } from "./questions.js";

export interface Handlers {
  onSend(text: string): void;
  onRetry(): void;
  onAnswer(key: keyof PendingAnswers, value: boolean | number): void;
  onSubmit(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class ChatUi {
  private root: HTMLElement;
  private showActs = false;

  constructor(root: HTMLElement, private handlers: Handlers) {
    this.root = root;
  }

  render(view: ChatView): void {
    this.root.replaceChildren();
    if (view.phase === "connecting") {
      this.root.append(el("p", "status", "Connecting to the dialogue service..."));
      return;
    }
    if (view.phase === "error") {
      const banner = el("div", "banner error");
      banner.append(el("p", undefined, view.error ?? "The dialogue service is unreachable."));
      const retry = el("button", undefined, "Retry");
      retry.onclick = () => this.handlers.onRetry();
      banner.append(retry);
      this.root.append(banner);
      return;
    }

    const card = el("section", "task-card");
    card.append(el("h2", undefined, "Your task"));
    card.append(el("p", undefined, view.taskText));
    this.root.append(card);

    const toggle = el("label", "acts-toggle");
    const box = el("input");
    box.type = "checkbox";
    box.checked = this.showActs;
    box.onchange = () => {
      this.showActs = box.checked;
      this.render(view);
    };
    toggle.append(box, document.createTextNode(" show dialogue act annotations"));
    this.root.append(toggle);

    const chat = el("section", "chat");
    for (const message of view.messages) {
      const bubble = el("div", `bubble ${message.speaker}`, message.text);
      chat.append(bubble);
      if (this.showActs && message.acts?.length) {
        chat.append(el("div", "acts", message.acts.join("; ")));
      }
    }
    this.root.append(chat);

    if (view.error) {
      this.root.append(el("p", "banner warning", `${view.error} - please try again.`));
    }

    if (view.phase === "chatting") {
      this.root.append(this.inputRow(view));
    } else if (view.phase === "questionnaire") {
      this.root.append(this.questionnaire(view));
    } else {
      const done = el("section", "done");
      done.append(el("h2", undefined, "Thank you!"));
      done.append(el("p", undefined, "Your ratings have been recorded. You can close this tab."));
      this.root.append(done);
    }
  }

  private inputRow(view: ChatView): HTMLElement {
    const row = el("div", "input-row");
    const input = el("input");
    input.type = "text";
    input.placeholder = "Type your message";
    const send = el("button", undefined, "Send");
    const update = () => {
      send.disabled = view.busy || input.value.trim() === "";
    };
    update();
    input.oninput = update;
    const submit = () => {
      const text = input.value.trim();
      if (text && !view.busy) this.handlers.onSend(text);
    };
    send.onclick = submit;
    input.onkeydown = (event) => {
      if (event.key === "Enter") submit();
    };
    row.append(input, send);
    return row;
  }

  private questionnaire(view: ChatView): HTMLElement {
    const form = el("section", "questionnaire");
    form.append(el("h2", undefined, "Questionnaire"));

    const q1 = el("fieldset");
    q1.append(el("legend", undefined, Q1_TEXT));
    for (const [label, value] of [["Yes", true], ["No", false]] as const) {
      const wrap = el("label");
      const radio = el("input");
      radio.type = "radio";
      radio.name = "q1_subj_succ";
      radio.checked = view.answers.q1_subj_succ === value;
      radio.onchange = () => this.handlers.onAnswer("q1_subj_succ", value);
      wrap.append(radio, document.createTextNode(` ${label}`));
      q1.append(wrap);
    }
    form.append(q1);

    form.append(el("p", "preamble", LIKERT_PREAMBLE));
    for (const question of LIKERT_QUESTIONS) {
      const set = el("fieldset");
      set.append(el("legend", undefined, question.text));
      const scale = el("div", "likert");
      scale.append(el("span", "anchor", "disagree"));
      for (let value = LIKERT_MIN; value <= LIKERT_MAX; value += 1) {
        const wrap = el("label");
        const radio = el("input");
        radio.type = "radio";
        radio.name = question.key;
        radio.checked = view.answers[question.key] === value;
        radio.onchange = () => this.handlers.onAnswer(question.key, value);
        wrap.append(radio, document.createTextNode(String(value)));
        scale.append(wrap);
      }
      scale.append(el("span", "anchor", "agree"));
      set.append(scale);
      form.append(set);
    }

    const submit = el("button", "submit", "Submit ratings");
    submit.disabled = view.busy || !allAnswered(view.answers);
    submit.onclick = () => this.handlers.onSubmit();
    form.append(submit);
    return form;
  }
}
