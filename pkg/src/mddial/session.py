"""Stateful dialogue sessions for human (text) evaluation: open, turn,
questionnaire capture, and JSONL dialogue-log persistence.

Turn processing is serialized per session; different sessions may run
concurrently. Log appends are atomic per record (single write of one line).
"""

import json
import random
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from mddial.acts import format_act, format_acts
from mddial.belief import belief_summary, init_belief, note_system_response, update_belief
from mddial.combiner import combine
from mddial.domain import render_task_text, sample_task
from mddial.errormodel import ErrorConfig, corrupt_user_act
from mddial.nlg import generate_utterance, presentation_annotations
from mddial.nlu import parse_utterance
from mddial.simuser import SimConfig
from mddial.training import RewardConfig, clean_event, compute_turn_reward
from mddial.acts import INTERPRETATION_PROBLEM

GREETING = "Hello! How can I help you?"

LIKERT_MIN, LIKERT_MAX = 1, 6


class SessionError(Exception):
    """Violation of the session lifecycle (unknown id, finished, duplicate)."""


@dataclass
class Questionnaire:
    q1_subj_succ: bool
    q2_voice_int: int
    q3_understand: int
    q4_as_expect: int
    q5_would_use: int

    def __post_init__(self):
        for name in ("q2_voice_int", "q3_understand", "q4_as_expect", "q5_would_use"):
            value = getattr(self, name)
            if not isinstance(value, int) or not LIKERT_MIN <= value <= LIKERT_MAX:
                raise ValueError(f"{name} must be an integer in [{LIKERT_MIN}, {LIKERT_MAX}]")
        if not isinstance(self.q1_subj_succ, bool):
            raise ValueError("q1_subj_succ must be a boolean")


@dataclass
class SessionState:
    session_id: str
    task: object
    task_text: str
    belief: object
    controller: object
    rng: random.Random
    inject_noise: bool
    transcript: list = field(default_factory=list)
    status: str = "active"
    questionnaire: dict = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class DialogueService:
    """Owns the checkpoint pool and all live sessions."""

    def __init__(
        self,
        pool,
        db,
        log_path=None,
        seed=None,
        inject_noise=False,
        err=ErrorConfig(),
        sim_cfg=SimConfig(),
    ):
        self.pool = pool
        self.db = db
        self.err = err
        self.sim_cfg = sim_cfg
        self.inject_noise = inject_noise
        self.log_path = Path(log_path) if log_path else None
        self._rng = random.Random(seed)
        self._sessions = {}
        self._counter = 0
        self._lock = threading.Lock()

    def _append_log(self, record):
        if self.log_path is None:
            return
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def _get(self, session_id):
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionError(f"unknown session {session_id!r}") from None

    def open_session(self):
        """Sample a task, render its scenario, pick a pool member round-robin."""
        with self._lock:
            controller = self.pool[self._counter % len(self.pool)]
            self._counter += 1
            seed = self._rng.randrange(2**31)
        rng = random.Random(seed)
        task = sample_task(
            self.db,
            rng,
            min_constraints=self.sim_cfg.min_constraints,
            max_constraints=self.sim_cfg.max_constraints or None,
            request_prob=self.sim_cfg.request_prob,
        )
        state = SessionState(
            session_id=uuid.uuid4().hex[:12],
            task=task,
            task_text=render_task_text(task, self.db.ontology.domain_name),
            belief=init_belief(self.db.ontology),
            controller=controller,
            rng=rng,
            inject_noise=self.inject_noise,
        )
        with self._lock:
            self._sessions[state.session_id] = state
        return state.session_id, state.task_text, GREETING

    def turn(self, session_id, user_text, inject_noise=None):
        """One exchange: parse, optionally corrupt, update, decide, realize."""
        state = self._get(session_id)
        with state.lock:
            if state.status != "active":
                raise SessionError(f"session {session_id} is finished")
            noisy = state.inject_noise if inject_noise is None else inject_noise
            user_acts = parse_utterance(user_text, self.db.ontology)
            if not user_acts:
                ev = INTERPRETATION_PROBLEM
            elif noisy:
                ev = corrupt_user_act(user_acts, self.err, state.rng, self.db.ontology)
            else:
                ev = clean_event(user_acts)
            state.belief = update_belief(state.belief, ev)
            state.controller.begin_episode(0.0)
            triple = state.controller.decide(state.belief, self.db, state.rng)
            response = combine(triple[0], triple[1], triple[2], state.belief, self.db)
            system_text = generate_utterance(response, self.db.ontology)
            reward = compute_turn_reward(state.belief, response, ev, False, RewardConfig())
            annotations = [format_act(a) for a in response.acts] + presentation_annotations(response)
            record = {
                "session": session_id,
                "turn": len(state.transcript) + 1,
                "user_text": user_text,
                "parsed_acts": format_acts(user_acts),
                "event_kind": ev.kind,
                "belief_summary": belief_summary(state.belief),
                "agent_actions": {"task": triple[0], "autofeedback": triple[1], "som": triple[2]},
                "fired_rules": [rule for _, rule in response.cancelled],
                "system_acts": format_acts(response.acts),
                "system_text": system_text,
                "reward": reward,
            }
            state.belief = note_system_response(state.belief, response)
            state.transcript.append(record)
            finished = response.ends_dialogue
            if finished:
                state.status = "finished"
            self._append_log(record)
            return system_text, annotations, finished

    def submit_questionnaire(self, session_id, answers):
        """Persist the Q1-Q5 answers; only once, and only after the dialogue
        has finished."""
        state = self._get(session_id)
        with state.lock:
            if state.status == "active":
                raise SessionError("questionnaire requires a finished session")
            if state.questionnaire is not None:
                raise SessionError("questionnaire already submitted")
            q = answers if isinstance(answers, Questionnaire) else Questionnaire(**answers)
            record = {
                "session": session_id,
                "kind": "questionnaire",
                "task": {"constraints": dict(state.task.constraints), "requests": list(state.task.requests)},
                "answers": {
                    "q1_subj_succ": q.q1_subj_succ,
                    "q2_voice_int": q.q2_voice_int,
                    "q3_understand": q.q3_understand,
                    "q4_as_expect": q.q4_as_expect,
                    "q5_would_use": q.q5_would_use,
                },
                "transcript": list(state.transcript),
            }
            state.questionnaire = record["answers"]
            self._append_log(record)
            return record

    def log_of(self, session_id):
        state = self._get(session_id)
        with state.lock:
            return {
                "session": session_id,
                "task": {
                    "constraints": dict(state.task.constraints),
                    "requests": list(state.task.requests),
                },
                "task_text": state.task_text,
                "status": state.status,
                "records": list(state.transcript),
                "questionnaire": state.questionnaire,
            }
