import { describe, expect, it } from "vitest";

import { LIKERT_MAX, LIKERT_MIN, LIKERT_PREAMBLE, LIKERT_QUESTIONS, Q1_TEXT } from "../src/questions.js";

// The five question texts are pinned verbatim; any rewording is a breaking
// change to the evaluation instrument.
describe("questionnaire wording", () => {
  it("asks the yes/no success question verbatim", () => {
    expect(Q1_TEXT).toBe("Did you find all the information you were looking for?");
  });

  it("introduces the rating block verbatim", () => {
    expect(LIKERT_PREAMBLE).toBe("Please state your attitude towards the following statements:");
  });

  it("asks the four rating questions verbatim and in order", () => {
    expect(LIKERT_QUESTIONS.map((q) => q.text)).toEqual([
      "The system was easy to understand (the voice was intelligible).",
      "In this conversation, the system understood what you said.",
      "The system worked the way you expected it to during the conversation.",
      "From your experience with the system, you think you would use it in the future to find a place to eat.",
    ]);
  });

  it("maps questions to the service payload keys", () => {
    expect(LIKERT_QUESTIONS.map((q) => q.key)).toEqual([
      "q2_voice_int",
      "q3_understand",
      "q4_as_expect",
      "q5_would_use",
    ]);
  });

  it("uses a six-point scale", () => {
    expect([LIKERT_MIN, LIKERT_MAX]).toEqual([1, 6]);
  });
});
