import { AlreadySubmittedError, ServiceClient } from "./api.js";
import {
  ChatView,
  initialView,
  openFailed,
  ratingsStored,
  resumed,
  sessionOpened,
  submitFailed,
  submitStarted,
  systemReplied,
  turnFailed,
  userSent,
} from "./state.js";
import { ChatUi } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const client = new ServiceClient(params.get("service") ?? "http://127.0.0.1:8000");
const SESSION_KEY = "mddial-session"; // sessionStorage: one session per tab

let view: ChatView = initialView();

const ui = new ChatUi(document.getElementById("app")!, {
  onSend(text) {
    if (!view.sessionId) return;
    update(userSent(view, text));
    client
      .sendTurn(view.sessionId, text)
      .then((res) => update(systemReplied(view, res)))
      .catch((err) => update(turnFailed(view, String(err.message ?? err))));
  },
  onRetry() {
    start();
  },
  onAnswer(key, value) {
    update({ ...view, answers: { ...view.answers, [key]: value } });
  },
  onSubmit() {
    if (!view.sessionId) return;
    update(submitStarted(view));
    client
      .submitQuestionnaire(view.sessionId, {
        q1_subj_succ: view.answers.q1_subj_succ!,
        q2_voice_int: view.answers.q2_voice_int!,
        q3_understand: view.answers.q3_understand!,
        q4_as_expect: view.answers.q4_as_expect!,
        q5_would_use: view.answers.q5_would_use!,
      })
      .then(() => update(ratingsStored(view)))
      .catch((err) => {
        // a duplicate submit (double-click, refresh) is already stored
        if (err instanceof AlreadySubmittedError) {
          update(ratingsStored(view));
        } else {
          update(submitFailed(view, String(err.message ?? err)));
        }
      });
  },
});

function update(next: ChatView): void {
  view = next;
  ui.render(view);
}

function start(): void {
  update(initialView());
  const existing = window.sessionStorage.getItem(SESSION_KEY);
  if (existing) {
    client
      .fetchLog(existing)
      .then((log) => update(resumed(view, existing, log)))
      .catch(() => {
        window.sessionStorage.removeItem(SESSION_KEY);
        start();
      });
    return;
  }
  client
    .openSession()
    .then((res) => {
      window.sessionStorage.setItem(SESSION_KEY, res.session_id);
      update(sessionOpened(view, res));
    })
    .catch((err) => update(openFailed(view, String(err.message ?? err))));
}

start();
