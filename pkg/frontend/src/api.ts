// Thin client over the dialogue service's four endpoints.

export interface OpenSessionResponse {
  session_id: string;
  task_text: string;
  greeting: string;
}

export interface TurnResponse {
  system_text: string;
  acts: string[];
  finished: boolean;
}

export interface TurnRecord {
  turn: number;
  user_text: string;
  system_text: string;
  system_acts: string;
  [key: string]: unknown;
}

export interface SessionLog {
  session: string;
  task_text: string;
  status: "active" | "finished";
  records: TurnRecord[];
  questionnaire: Record<string, number | boolean> | null;
}

export interface Answers {
  q1_subj_succ: boolean;
  q2_voice_int: number;
  q3_understand: number;
  q4_as_expect: number;
  q5_would_use: number;
}

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class AlreadySubmittedError extends ServiceError {}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ServiceError(`service unreachable: ${String(err)}`, 0);
  }
  if (!response.ok) {
    const body = await response.text();
    if (response.status === 409 && body.includes("already submitted")) {
      throw new AlreadySubmittedError(body, 409);
    }
    throw new ServiceError(body || response.statusText, response.status);
  }
  return (await response.json()) as T;
}

export class ServiceClient {
  constructor(readonly baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  openSession(): Promise<OpenSessionResponse> {
    return request(this.url("/session"), { method: "POST" });
  }

  sendTurn(sessionId: string, text: string): Promise<TurnResponse> {
    return request(this.url(`/session/${sessionId}/turn`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  submitQuestionnaire(sessionId: string, answers: Answers): Promise<void> {
    return request(this.url(`/session/${sessionId}/questionnaire`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(answers),
    });
  }

  fetchLog(sessionId: string): Promise<SessionLog> {
    return request(this.url(`/session/${sessionId}/log`));
  }
}
