"""Dialogue-act taxonomy: dimensions, communicative functions, semantic
content, n-best input events, and the per-dimension abstract action sets.

All types are immutable values. The canonical text form
``dimension.function(content)`` round-trips losslessly and is what dialogue
logs store.
"""

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum

N_BEST_MAX = 3


class Dimension(str, Enum):
    TASK = "task"
    FEEDBACK = "autofeedback"
    SOM = "som"


class CommFunction(str, Enum):
    # task
    INFORM = "inform"
    INFORM_SEARCH = "inform_search"
    REQUEST = "request"
    RECOMMEND = "recommend"
    CONFIRM = "confirm"          # user side
    DISCONFIRM = "disconfirm"    # user side
    # autofeedback
    AUTO_POSITIVE = "auto_positive"
    AUTO_NEGATIVE_PERCEPTION = "auto_negative_perception"
    AUTO_NEGATIVE_INTERPRETATION = "auto_negative_interpretation"
    FEEDBACK_INFORM = "feedback_inform"
    # social obligations management
    GREET = "greet"
    RETURN_GREET = "return_greet"
    BYE = "bye"
    RETURN_BYE = "return_bye"
    THANK = "thank"
    ACCEPT_THANK = "accept_thank"


FUNCTION_DIMENSION = {
    CommFunction.INFORM: Dimension.TASK,
    CommFunction.INFORM_SEARCH: Dimension.TASK,
    CommFunction.REQUEST: Dimension.TASK,
    CommFunction.RECOMMEND: Dimension.TASK,
    CommFunction.CONFIRM: Dimension.TASK,
    CommFunction.DISCONFIRM: Dimension.TASK,
    CommFunction.AUTO_POSITIVE: Dimension.FEEDBACK,
    CommFunction.AUTO_NEGATIVE_PERCEPTION: Dimension.FEEDBACK,
    CommFunction.AUTO_NEGATIVE_INTERPRETATION: Dimension.FEEDBACK,
    CommFunction.FEEDBACK_INFORM: Dimension.FEEDBACK,
    CommFunction.GREET: Dimension.SOM,
    CommFunction.RETURN_GREET: Dimension.SOM,
    CommFunction.BYE: Dimension.SOM,
    CommFunction.RETURN_BYE: Dimension.SOM,
    CommFunction.THANK: Dimension.SOM,
    CommFunction.ACCEPT_THANK: Dimension.SOM,
}

SOCIAL_PAIRS = {
    CommFunction.GREET: CommFunction.RETURN_GREET,
    CommFunction.BYE: CommFunction.RETURN_BYE,
    CommFunction.THANK: CommFunction.ACCEPT_THANK,
}


@dataclass(frozen=True)
class SemContent:
    """Normalized semantic content: constraints and requested are stored as
    sorted tuples so equal content hashes equal."""

    constraints: tuple = ()
    requested: tuple = ()
    entity: str = None

    @staticmethod
    def of(constraints=None, requested=(), entity=None):
        pairs = tuple(sorted((constraints or {}).items()))
        return SemContent(pairs, tuple(sorted(requested)), entity)

    @property
    def constraints_dict(self):
        return dict(self.constraints)

    @property
    def empty(self):
        return not self.constraints and not self.requested and self.entity is None


EMPTY_CONTENT = SemContent()


@dataclass(frozen=True)
class DialogueAct:
    dimension: Dimension
    function: CommFunction
    content: SemContent = EMPTY_CONTENT

    def __post_init__(self):
        if FUNCTION_DIMENSION[self.function] is not self.dimension:
            raise ValueError(f"{self.function.value} does not belong to dimension {self.dimension.value}")
        if self.function is CommFunction.RECOMMEND and self.content.entity is None:
            raise ValueError("recommend requires an entity")
        if self.function is CommFunction.REQUEST and not (self.content.requested or self.content.constraints):
            raise ValueError("request requires requested slots or a named constraint slot")


def act(function, constraints=None, requested=(), entity=None):
    """Shorthand constructor; the dimension is implied by the function."""
    return DialogueAct(
        FUNCTION_DIMENSION[function], function, SemContent.of(constraints, requested, entity)
    )


def acts_semantically_equal(a, b):
    """Order-insensitive multiset equality of (dimension, function, content)."""
    return Counter(a) == Counter(b)


# ---------------------------------------------------------------------------
# canonical text form

_ACT_RE = re.compile(r"^([a-z_]+)\.([a-z_]+)\((.*)\)$")


def format_act(a):
    parts = [f"{s}={v}" for s, v in a.content.constraints]
    parts += [f"req={s}" for s in a.content.requested]
    if a.content.entity is not None:
        parts.append(f"entity={a.content.entity}")
    return f"{a.dimension.value}.{a.function.value}({', '.join(parts)})"


def parse_act(text):
    m = _ACT_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a canonical act: {text!r}")
    dim, fn, body = m.groups()
    constraints, requested, entity = {}, [], None
    if body:
        for part in body.split(", "):
            key, _, value = part.partition("=")
            if not _:
                raise ValueError(f"malformed content item {part!r} in {text!r}")
            if key == "req":
                requested.append(value)
            elif key == "entity":
                entity = value
            else:
                constraints[key] = value
    return DialogueAct(
        Dimension(dim), CommFunction(fn), SemContent.of(constraints, requested, entity)
    )


def format_acts(acts_):
    return "; ".join(format_act(a) for a in acts_)


def parse_acts(text):
    text = text.strip()
    if not text:
        return []
    return [parse_act(p) for p in text.split("; ")]


# ---------------------------------------------------------------------------
# n-best lists and channel events

@dataclass(frozen=True)
class NBestList:
    hypotheses: tuple  # of (tuple[DialogueAct, ...], confidence)

    def __post_init__(self):
        if not self.hypotheses or len(self.hypotheses) > N_BEST_MAX:
            raise ValueError(f"n-best list must hold 1..{N_BEST_MAX} hypotheses")
        confs = [c for _, c in self.hypotheses]
        if any(c < 0 for c in confs) or sum(confs) > 1 + 1e-9:
            raise ValueError("confidences must be non-negative and sum to <= 1")
        if any(confs[i] < confs[i + 1] for i in range(len(confs) - 1)):
            raise ValueError("hypotheses must be sorted by descending confidence")
        for i in range(len(self.hypotheses)):
            for j in range(i + 1, len(self.hypotheses)):
                if acts_semantically_equal(self.hypotheses[i][0], self.hypotheses[j][0]):
                    raise ValueError("semantically equal hypotheses must be merged")

    @property
    def top(self):
        return self.hypotheses[0]


@dataclass(frozen=True)
class UserInputEvent:
    """Tagged union: an n-best list, or a processing problem at the
    perception level (nothing recognised) or interpretation level
    (recognised but not understood)."""

    kind: str  # "nbest" | "perception" | "interpretation"
    nbest: NBestList = None

    def __post_init__(self):
        if self.kind not in ("nbest", "perception", "interpretation"):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if (self.kind == "nbest") != (self.nbest is not None):
            raise ValueError("nbest payload must be present exactly for nbest events")


def nbest_event(nb):
    return UserInputEvent("nbest", nb)


PERCEPTION_PROBLEM = UserInputEvent("perception")
INTERPRETATION_PROBLEM = UserInputEvent("interpretation")


# ---------------------------------------------------------------------------
# abstract per-dimension action sets (policies pick these; the combiner
# instantiates them into concrete DialogueActs at emission time)

NO_OP = "none"
RECOMMEND = "recommend"
INFORM_REQUESTED = "inform_requested"
INFORM_SEARCH = "inform_search"
AUTO_POSITIVE = "auto_positive"
AUTO_NEGATIVE_PERCEPTION = "auto_negative_perception"
AUTO_NEGATIVE_INTERPRETATION = "auto_negative_interpretation"
FEEDBACK_INFORM_CONFIRM = "feedback_inform_confirm"
RETURN_GREET = "return_greet"
RETURN_BYE = "return_bye"
ACCEPT_THANK = "accept_thank"


def request_slot(slot):
    return f"request:{slot}"


FEEDBACK_ACTIONS = (
    NO_OP,
    AUTO_POSITIVE,
    AUTO_NEGATIVE_PERCEPTION,
    AUTO_NEGATIVE_INTERPRETATION,
    FEEDBACK_INFORM_CONFIRM,
)
SOM_ACTIONS = (NO_OP, RETURN_GREET, RETURN_BYE, ACCEPT_THANK)


def enumerate_action_set(dim, ont):
    """Deterministic per-dimension action inventory.

    Task has no no-op (inform_search is its minimal holding act) and is the
    only domain-dependent set: one request action per constraint slot.
    """
    if dim is Dimension.TASK:
        return [request_slot(s) for s in ont.constraint_slot_names] + [
            RECOMMEND,
            INFORM_REQUESTED,
            INFORM_SEARCH,
        ]
    if dim is Dimension.FEEDBACK:
        return list(FEEDBACK_ACTIONS)
    if dim is Dimension.SOM:
        return list(SOM_ACTIONS)
    raise ValueError(f"unknown dimension {dim!r}")
