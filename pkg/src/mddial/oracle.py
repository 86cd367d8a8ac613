"""Handcrafted rule-based controller.

Serves as a sanity baseline (it should solve nearly every dialogue on a
noise-free channel) and as the scripted system side in end-to-end tests.
"""

from mddial import acts as A
from mddial.belief import PROBLEM_INTERPRETATION, PROBLEM_PERCEPTION, known_values


class OracleController:
    """Deterministic action selection from the belief state; no learning."""

    def __init__(self, db):
        self.db = db
        self._by_name = {e.name: e for e in db.entities}

    def begin_episode(self, eps=0.0):
        pass

    def note_reward(self, reward):
        pass

    def finish(self):
        pass

    def decide(self, b, db, rng):
        if b.problem == PROBLEM_PERCEPTION:
            feedback = A.AUTO_NEGATIVE_PERCEPTION
        elif b.problem == PROBLEM_INTERPRETATION:
            feedback = A.AUTO_NEGATIVE_INTERPRETATION
        elif b.newly_informed:
            feedback = A.FEEDBACK_INFORM_CONFIRM
        else:
            feedback = A.NO_OP

        if "bye" in b.pending_social:
            som = A.RETURN_BYE
        elif "greet" in b.pending_social:
            som = A.RETURN_GREET
        elif "thank" in b.pending_social:
            som = A.ACCEPT_THANK
        else:
            som = A.NO_OP

        known = known_values(b)
        offered = self._by_name.get(b.offered) if b.offered else None
        stale = offered is not None and any(
            offered.slot_values.get(s) != v for s, v in known.items()
        )
        if b.requested and (offered is None or stale):
            task = A.RECOMMEND
        elif offered is not None and b.requested:
            task = A.INFORM_REQUESTED
        else:
            task = A.INFORM_SEARCH
        return task, feedback, som
