"""POMDP-style dialogue state and its featurization for linear policies.

Per-slot user-goal distributions are updated from confidence-scored n-best
input with a convex mixture: evidence mass for a slot reassigns probability,
unmentioned mass keeps the prior. Updates are pure; the episode loop owns
one BeliefState per dialogue.
"""

from dataclasses import dataclass, replace

import numpy as np

from mddial.acts import CommFunction, Dimension

UNKNOWN = "unknown"

PROBLEM_NONE = "none"
PROBLEM_PERCEPTION = "perception"
PROBLEM_INTERPRETATION = "interpretation"

_SOCIAL_OF = {
    CommFunction.GREET: "greet",
    CommFunction.BYE: "bye",
    CommFunction.THANK: "thank",
}


@dataclass(frozen=True)
class BeliefState:
    goal: dict                 # slot -> {value|unknown: prob}
    requested: frozenset       # requestable slots still owed to the user
    confirmed: frozenset       # slots already confirmed back to the user
    problem: str               # most recent event only
    pending_social: frozenset  # {"greet","bye","thank"} owed a response
    offered: str               # recommended entity name, or None
    last_user_functions: frozenset
    turn_index: int
    top_confidence: float      # confidence of the latest top hypothesis
    newly_informed: frozenset  # slots informed by the latest top hypothesis


def init_belief(ont):
    goal = {s: {UNKNOWN: 1.0} for s in ont.constraint_slot_names}
    return BeliefState(
        goal=goal,
        requested=frozenset(),
        confirmed=frozenset(),
        problem=PROBLEM_NONE,
        pending_social=frozenset(),
        offered=None,
        last_user_functions=frozenset(),
        turn_index=0,
        top_confidence=0.0,
        newly_informed=frozenset(),
    )


def _hyp_informs(acts_):
    """slot -> value stated by task informs within one hypothesis."""
    out = {}
    for a in acts_:
        if a.function is CommFunction.INFORM and a.dimension is Dimension.TASK:
            out.update(a.content.constraints_dict)
    return out


def update_belief(b, ev):
    """Pure belief update for one channel event."""
    if ev.kind != "nbest":
        return replace(
            b,
            problem=ev.kind,
            last_user_functions=frozenset(),
            top_confidence=0.0,
            newly_informed=frozenset(),
            turn_index=b.turn_index + 1,
        )

    hyps = ev.nbest.hypotheses
    per_hyp = [(_hyp_informs(acts_), conf) for acts_, conf in hyps]

    # P'(v) = sum_h conf_h [h informs s=v] + (1 - sum_h conf_h [h mentions s]) P(v)
    goal = {}
    for slot, dist in b.goal.items():
        evidence = {}
        mentioned_mass = 0.0
        for informs, conf in per_hyp:
            v = informs.get(slot)
            if v is not None:
                evidence[v] = evidence.get(v, 0.0) + conf
                mentioned_mass += conf
        if not evidence:
            goal[slot] = dist
            continue
        new = {v: p * (1.0 - mentioned_mass) for v, p in dist.items()}
        for v, mass in evidence.items():
            new[v] = new.get(v, 0.0) + mass
        total = sum(new.values())
        goal[slot] = {v: p / total for v, p in new.items()}

    top_acts, top_conf = hyps[0]
    functions = frozenset(a.function for a in top_acts)
    social = frozenset(_SOCIAL_OF[f] for f in functions if f in _SOCIAL_OF)
    requested = set(b.requested)
    for a in top_acts:
        if a.function is CommFunction.REQUEST:
            # goal slots are the user's own constraints; only info slots
            # (phone, address) are things the system can owe the user
            requested.update(s for s in a.content.requested if s not in b.goal)
    return BeliefState(
        goal=goal,
        requested=frozenset(requested),
        confirmed=b.confirmed,
        problem=PROBLEM_NONE,
        pending_social=b.pending_social | social,
        offered=b.offered,
        last_user_functions=functions,
        turn_index=b.turn_index + 1,
        top_confidence=top_conf,
        newly_informed=frozenset(_hyp_informs(top_acts)),
    )


def note_system_response(b, response):
    """Bookkeeping after the system turn: social obligations discharged,
    offers recorded, requested info delivered, confirmations tracked."""
    pending = set(b.pending_social)
    requested = set(b.requested)
    confirmed = set(b.confirmed)
    offered = b.offered
    for a in response.acts:
        if a.function is CommFunction.RETURN_GREET:
            pending.discard("greet")
        elif a.function is CommFunction.RETURN_BYE:
            pending.discard("bye")
        elif a.function is CommFunction.ACCEPT_THANK:
            pending.discard("thank")
        elif a.function is CommFunction.RECOMMEND:
            offered = a.content.entity
        elif a.function is CommFunction.INFORM and a.dimension is Dimension.TASK:
            requested.difference_update(a.content.constraints_dict)
        elif a.function is CommFunction.FEEDBACK_INFORM:
            confirmed.update(a.content.constraints_dict)
    return replace(
        b,
        pending_social=frozenset(pending),
        requested=frozenset(requested),
        confirmed=frozenset(confirmed),
        offered=offered,
    )


def top_value(dist):
    """(best concrete value, its probability); the slot counts as known only
    when that probability strictly exceeds the unknown mass."""
    best, best_p = None, -1.0
    for v in sorted(dist):
        if v == UNKNOWN:
            continue
        p = dist[v]
        if p > best_p:
            best, best_p = v, p
    if best is None:
        return None, 0.0
    return best, best_p


def known_values(b):
    """slot -> top concrete value, for slots where it beats unknown."""
    out = {}
    for slot in b.goal:
        v, p = top_value(b.goal[slot])
        if v is not None and p > b.goal[slot].get(UNKNOWN, 0.0):
            out[slot] = v
    return out


# ---------------------------------------------------------------------------
# feature catalogues

_MATCH_BUCKETS = ("0", "1", "2-5", "6+")


def _task_feature_names(ont):
    names = ["bias"]
    for s in ont.constraint_slot_names:
        names += [f"top_prob:{s}", f"known:{s}"]
    names += [f"matches:{bucket}" for bucket in _MATCH_BUCKETS]
    names.append("offered")
    # without this the policy cannot see that corrections since the offer
    # made the recommendation stale, and it never learns to re-recommend
    names.append("offered_stale")
    names += [f"owed:{s}" for s in ont.requestable_slot_names]
    return names


def _feedback_feature_names():
    return [
        "bias",
        "problem:perception",
        "problem:interpretation",
        "conf:le0.3",
        "conf:le0.6",
        "conf:gt0.6",
        "newly_informed",
    ]


def _som_feature_names():
    return ["bias", "pending:greet", "pending:bye", "pending:thank"]


class FeatureCatalogue:
    """Published, versioned feature index for one (dimension, ontology).

    AutoFeedback and SOM catalogues carry no domain component in their
    version string: that is what makes their policies transferable.
    """

    def __init__(self, dim, ont):
        self.dim = dim
        if dim is Dimension.TASK:
            self.names = _task_feature_names(ont)
            self.version = (
                f"task/v2/{ont.domain_name}/"
                + ",".join(ont.constraint_slot_names)
                + "/"
                + ",".join(ont.requestable_slot_names)
            )
        elif dim is Dimension.FEEDBACK:
            self.names = _feedback_feature_names()
            self.version = "autofeedback/v1"
        elif dim is Dimension.SOM:
            self.names = _som_feature_names()
            self.version = "som/v1"
        elif dim == "all":
            task = FeatureCatalogue(Dimension.TASK, ont)
            fb = FeatureCatalogue(Dimension.FEEDBACK, ont)
            som = FeatureCatalogue(Dimension.SOM, ont)
            self.names = (
                ["bias"]
                + [f"task:{n}" for n in task.names[1:]]
                + [f"autofeedback:{n}" for n in fb.names[1:]]
                + [f"som:{n}" for n in som.names[1:]]
            )
            self.version = f"all/v2/{ont.domain_name}/" + ",".join(
                ont.constraint_slot_names
            ) + "/" + ",".join(ont.requestable_slot_names)
        else:
            raise ValueError(f"unknown dimension {dim!r}")

    def __len__(self):
        return len(self.names)


def _match_bucket_index(count):
    if count == 0:
        return 0
    if count == 1:
        return 1
    if count <= 5:
        return 2
    return 3


def _fill_task(vec, off, b, ont, db):
    i = off
    known = {}
    for s in ont.constraint_slot_names:
        v, p = top_value(b.goal[s])
        unknown_p = b.goal[s].get(UNKNOWN, 0.0)
        vec[i] = p if v is not None else 0.0
        if v is not None and p > unknown_p:
            vec[i + 1] = 1.0
            known[s] = v
        i += 2
    vec[i + _match_bucket_index(db.match_count(known))] = 1.0
    i += len(_MATCH_BUCKETS)
    vec[i] = 1.0 if b.offered else 0.0
    i += 1
    if b.offered:
        ent = db.entity_by_name(b.offered)
        stale = ent is None or any(ent.slot_values.get(s) != v for s, v in known.items())
        vec[i] = 1.0 if stale else 0.0
    i += 1
    for s in ont.requestable_slot_names:
        vec[i] = 1.0 if s in b.requested else 0.0
        i += 1
    return i


def _fill_feedback(vec, off, b):
    vec[off] = 1.0 if b.problem == PROBLEM_PERCEPTION else 0.0
    vec[off + 1] = 1.0 if b.problem == PROBLEM_INTERPRETATION else 0.0
    if b.problem == PROBLEM_NONE and b.turn_index > 0:
        c = b.top_confidence
        if c <= 0.3:
            vec[off + 2] = 1.0
        elif c <= 0.6:
            vec[off + 3] = 1.0
        else:
            vec[off + 4] = 1.0
    vec[off + 5] = 1.0 if b.newly_informed else 0.0
    return off + 6


def _fill_som(vec, off, b):
    vec[off] = 1.0 if "greet" in b.pending_social else 0.0
    vec[off + 1] = 1.0 if "bye" in b.pending_social else 0.0
    vec[off + 2] = 1.0 if "thank" in b.pending_social else 0.0
    return off + 3


def extract_features(b, dim, db):
    """Deterministic feature vector for one dimension (or "all"); entries
    are in [0, 1] and the bias is always index 0."""
    ont = db.ontology
    cat = get_catalogue(dim, ont)
    vec = np.zeros(len(cat), dtype=np.float64)
    vec[0] = 1.0
    if dim is Dimension.TASK:
        _fill_task(vec, 1, b, ont, db)
    elif dim is Dimension.FEEDBACK:
        _fill_feedback(vec, 1, b)
    elif dim is Dimension.SOM:
        _fill_som(vec, 1, b)
    else:  # "all": concatenation sharing one bias
        off = _fill_task(vec, 1, b, ont, db)
        off = _fill_feedback(vec, off, b)
        _fill_som(vec, off, b)
    return vec


_CATALOGUE_CACHE = {}


def get_catalogue(dim, ont):
    key = (getattr(dim, "value", dim), ont.domain_name, ont.constraint_slot_names)
    if key not in _CATALOGUE_CACHE:
        _CATALOGUE_CACHE[key] = FeatureCatalogue(dim, ont)
    return _CATALOGUE_CACHE[key]


def belief_summary(b):
    """Per-slot top value and probability (4 decimals) for dialogue logs."""
    summary = {}
    for slot in sorted(b.goal):
        v, p = top_value(b.goal[slot])
        if v is None:
            v, p = UNKNOWN, b.goal[slot].get(UNKNOWN, 0.0)
        summary[slot] = {"value": v, "prob": round(p, 4)}
    return summary
