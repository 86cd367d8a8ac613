// Questionnaire wording. These strings are contractual: the snapshot test
// pins them character for character.

export const Q1_TEXT = "Did you find all the information you were looking for?";

export const LIKERT_PREAMBLE =
  "Please state your attitude towards the following statements:";

export const LIKERT_QUESTIONS = [
  {
    key: "q2_voice_int" as const,
    text: "The system was easy to understand (the voice was intelligible).",
  },
  {
    key: "q3_understand" as const,
    text: "In this conversation, the system understood what you said.",
  },
  {
    key: "q4_as_expect" as const,
    text: "The system worked the way you expected it to during the conversation.",
  },
  {
    key: "q5_would_use" as const,
    text: "From your experience with the system, you think you would use it in the future to find a place to eat.",
  },
];

export const LIKERT_MIN = 1;
export const LIKERT_MAX = 6;
