"""Priority rules merging the three agents' abstract actions into one
system response, plus the flattening map that defines the one-dimensional
baseline's action set.

The rule table is data (an ordered list), so experiments can log which rule
fired; CombinedResponse.cancelled carries (action, rule id) pairs.
"""

from dataclasses import dataclass

from mddial import acts as A
from mddial.acts import CommFunction, DialogueAct, Dimension, SemContent, act
from mddial.belief import known_values

RULE_UNPROMPTED_SOCIAL_SUPPRESSED = "unprompted-social-response-suppressed"
RULE_NEGATIVE_FEEDBACK_CANCELS_TASK = "negative-feedback-cancels-task"
RULE_RETURN_BYE_CANCELS_ALL = "return-bye-cancels-all"
RULE_EMPTY_FALLBACK = "fallback-inform-search"

# a social response is only valid while its counterpart is owed
_SOCIAL_CONTEXT = {
    A.RETURN_GREET: "greet",
    A.RETURN_BYE: "bye",
    A.ACCEPT_THANK: "thank",
}

# evaluation order; each entry is (rule id, predicate over the action triple)
RULE_TABLE = (
    (
        RULE_NEGATIVE_FEEDBACK_CANCELS_TASK,
        lambda task, fb, som: fb in (A.AUTO_NEGATIVE_PERCEPTION, A.AUTO_NEGATIVE_INTERPRETATION),
    ),
    (
        RULE_RETURN_BYE_CANCELS_ALL,
        lambda task, fb, som: som == A.RETURN_BYE,
    ),
)


@dataclass(frozen=True)
class CombinedResponse:
    acts: tuple                   # ordered DialogueActs, never empty
    cancelled: tuple              # (abstract action, rule id) pairs

    @property
    def ends_dialogue(self):
        return any(a.function is CommFunction.RETURN_BYE for a in self.acts)


def resolve_actions(task_a, feedback_a, som_a, pending_social=("greet", "bye", "thank")):
    """Apply the cancellation rules; returns the surviving (task, feedback,
    som) triple plus the cancellation log. A social response whose
    counterpart is not in pending_social is suppressed (in particular the
    system never hangs up first); the default treats every context as open,
    which is what the symbolic flattening enumerates."""
    cancelled = []
    context = _SOCIAL_CONTEXT.get(som_a)
    if context is not None and context not in pending_social:
        cancelled.append((som_a, RULE_UNPROMPTED_SOCIAL_SUPPRESSED))
        som_a = A.NO_OP
    if RULE_TABLE[0][1](task_a, feedback_a, som_a):
        if task_a != A.NO_OP:
            cancelled.append((task_a, RULE_NEGATIVE_FEEDBACK_CANCELS_TASK))
            task_a = A.NO_OP
    if RULE_TABLE[1][1](task_a, feedback_a, som_a):
        for victim in (task_a, feedback_a):
            if victim != A.NO_OP:
                cancelled.append((victim, RULE_RETURN_BYE_CANCELS_ALL))
        task_a, feedback_a = A.NO_OP, A.NO_OP
    return (task_a, feedback_a, som_a), tuple(cancelled)


_SOM_FUNCTION = {
    A.RETURN_GREET: CommFunction.RETURN_GREET,
    A.RETURN_BYE: CommFunction.RETURN_BYE,
    A.ACCEPT_THANK: CommFunction.ACCEPT_THANK,
}

_FEEDBACK_FUNCTION = {
    A.AUTO_POSITIVE: CommFunction.AUTO_POSITIVE,
    A.AUTO_NEGATIVE_PERCEPTION: CommFunction.AUTO_NEGATIVE_PERCEPTION,
    A.AUTO_NEGATIVE_INTERPRETATION: CommFunction.AUTO_NEGATIVE_INTERPRETATION,
}


def best_entity(db, wanted):
    """Entity maximizing the number of matched wanted slot values; ties go
    to the lowest entity id."""
    best, best_score = None, -1
    for ent in db.entities:
        score = sum(1 for s, v in wanted.items() if ent.slot_values.get(s) == v)
        if score > best_score or (score == best_score and best is not None and ent.id < best.id):
            best, best_score = ent, score
    return best


def _instantiate_task(task_a, b, db):
    if task_a == A.NO_OP:
        return []
    if task_a.startswith("request:"):
        return [act(CommFunction.REQUEST, requested=[task_a.split(":", 1)[1]])]
    if task_a == A.RECOMMEND:
        ent = best_entity(db, known_values(b))
        return [
            DialogueAct(
                Dimension.TASK,
                CommFunction.RECOMMEND,
                SemContent.of(constraints=dict(ent.slot_values), entity=ent.name),
            )
        ]
    if task_a == A.INFORM_REQUESTED:
        if b.offered is None:
            return [act(CommFunction.INFORM_SEARCH)]
        ent = db.entity_by_name(b.offered)
        owed = sorted(b.requested)
        if ent is None or not owed:
            return [act(CommFunction.INFORM_SEARCH)]
        slot = owed[0]  # one piece of information per utterance
        return [act(CommFunction.INFORM, constraints={slot: ent.info_values.get(slot, "")}, entity=ent.name)]
    if task_a == A.INFORM_SEARCH:
        return [act(CommFunction.INFORM_SEARCH)]
    raise ValueError(f"unknown task action {task_a!r}")


def _instantiate_feedback(feedback_a, b):
    if feedback_a == A.NO_OP:
        return []
    if feedback_a == A.FEEDBACK_INFORM_CONFIRM:
        grounded = known_values(b)
        echo = {s: grounded[s] for s in sorted(b.newly_informed) if s in grounded}
        if not echo:
            return []
        return [act(CommFunction.FEEDBACK_INFORM, constraints=echo)]
    return [DialogueAct(Dimension.FEEDBACK, _FEEDBACK_FUNCTION[feedback_a])]


def combine(task_a, feedback_a, som_a, b, db):
    """Merge the three selected abstract actions into one response.

    Rule order: a social response nobody is owed is suppressed (in
    particular the system never hangs up first); negative feedback cancels
    the task action; ReturnBye cancels everything else; survivors emit in
    SOM, AutoFeedback, Task order; an all-no-op outcome falls back to a
    holding inform_search act.
    """
    (task_a, feedback_a, som_a), cancelled = resolve_actions(
        task_a, feedback_a, som_a, pending_social=b.pending_social
    )
    out = []
    if som_a != A.NO_OP:
        out.append(DialogueAct(Dimension.SOM, _SOM_FUNCTION[som_a]))
    out.extend(_instantiate_feedback(feedback_a, b))
    out.extend(_instantiate_task(task_a, b, db))
    if not out:
        out.append(act(CommFunction.INFORM_SEARCH))
        cancelled = cancelled + ((A.NO_OP, RULE_EMPTY_FALLBACK),)
    return CombinedResponse(acts=tuple(out), cancelled=cancelled)


# ---------------------------------------------------------------------------
# one-dimensional baseline: the flattened action product

def combined_action_id(triple):
    task_a, feedback_a, som_a = triple
    return f"{task_a}|{feedback_a}|{som_a}"


def split_combined_action(action_id):
    task_a, feedback_a, som_a = action_id.split("|")
    return task_a, feedback_a, som_a


def flatten_action_product(ont):
    """The All agent's action set: the image of the cancellation rules over
    the product of the three per-dimension sets, deduplicated in first-seen
    order."""
    seen = []
    seen_set = set()
    for task_a in A.enumerate_action_set(Dimension.TASK, ont):
        for feedback_a in A.enumerate_action_set(Dimension.FEEDBACK, ont):
            for som_a in A.enumerate_action_set(Dimension.SOM, ont):
                triple, _ = resolve_actions(task_a, feedback_a, som_a)
                key = combined_action_id(triple)
                if key not in seen_set:
                    seen_set.add(key)
                    seen.append(key)
    return seen
