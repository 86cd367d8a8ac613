"""The noisy channel between true user acts and what the dialogue manager
receives: processing-problem sampling, per-position n-best distortion,
semantic merging, and Dirichlet confidence generation.

The distortion operator inventory (value substitution / act drop / function
change) is pluggable via DISTORTION_OPS.
"""

import math
from dataclasses import dataclass

from mddial.acts import (
    INTERPRETATION_PROBLEM,
    PERCEPTION_PROBLEM,
    CommFunction,
    NBestList,
    act,
    acts_semantically_equal,
    nbest_event,
)


@dataclass(frozen=True)
class ErrorConfig:
    p_perception: float = 0.10
    p_interpretation: float = 0.10   # conditional on no perception problem
    n_best: int = 3
    error_rate: float = 0.30         # per-position semantic error rate
    dirichlet_alpha: tuple = (8.0, 3.0, 1.0)
    # sensitivity switch for the inverted reading where top accuracy == e
    invert_accuracy_convention: bool = False

    def __post_init__(self):
        if not (0 <= self.p_perception <= 1 and 0 <= self.p_interpretation <= 1):
            raise ValueError("problem probabilities must be in [0, 1]")
        if not 0 <= self.error_rate <= 1:
            raise ValueError("error rate must be in [0, 1]")
        if self.n_best < 1 or len(self.dirichlet_alpha) < self.n_best:
            raise ValueError("need n_best >= 1 and one alpha per position")


def sample_confidences(k, e, cfg, rng):
    """Dirichlet draw (alpha truncated to k), sorted descending; the largest
    score goes to the intended-top position. The error rate only shapes which
    position holds the true act, not the scores themselves."""
    del e  # part of the channel contract; unused by this generator
    if k == 1:
        return [1.0]
    draws = [rng.gammavariate(a, 1.0) for a in cfg.dirichlet_alpha[:k]]
    total = math.fsum(draws)
    return sorted((d / total for d in draws), reverse=True)


def _substitute_value(true_acts, rng, ont):
    targets = [
        i for i, a in enumerate(true_acts)
        if a.function is CommFunction.INFORM and a.content.constraints
    ]
    if not targets:
        return None
    i = rng.choice(targets)
    a = true_acts[i]
    slot, value = rng.choice(sorted(a.content.constraints))
    others = [v for v in ont.values_of(slot) if v != value] if slot in ont.constraint_slot_names else []
    if not others:
        return None
    new_constraints = a.content.constraints_dict
    new_constraints[slot] = rng.choice(others)
    out = list(true_acts)
    out[i] = act(a.function, new_constraints, a.content.requested, a.content.entity)
    return out


def _drop_act(true_acts, rng, ont):
    if len(true_acts) < 2:
        return None
    i = rng.randrange(len(true_acts))
    return [a for j, a in enumerate(true_acts) if j != i]


_SOM_ROTATION = {
    CommFunction.GREET: CommFunction.THANK,
    CommFunction.THANK: CommFunction.BYE,
    CommFunction.BYE: CommFunction.GREET,
}


def _change_function(true_acts, rng, ont):
    """Swap one act's communicative function within its own dimension."""
    i = rng.randrange(len(true_acts))
    a = true_acts[i]
    if a.function is CommFunction.INFORM and a.content.constraints:
        slot = a.content.constraints[0][0]
        new = act(CommFunction.REQUEST, requested=[slot])
    elif a.function is CommFunction.REQUEST and a.content.requested:
        slot = a.content.requested[0]
        values = ont.values_of(slot) if slot in ont.constraint_slot_names else ()
        if values:
            new = act(CommFunction.INFORM, {slot: rng.choice(list(values))})
        else:
            new = act(CommFunction.CONFIRM)
    elif a.function in _SOM_ROTATION:
        new = act(_SOM_ROTATION[a.function])
    elif a.function is CommFunction.CONFIRM:
        new = act(CommFunction.DISCONFIRM)
    else:
        new = act(CommFunction.DISCONFIRM) if a.function is not CommFunction.DISCONFIRM else act(CommFunction.CONFIRM)
    out = list(true_acts)
    out[i] = new
    return out


DISTORTION_OPS = (_substitute_value, _drop_act, _change_function)


def distort(true_acts, rng, ont):
    """Apply one uniformly chosen applicable distortion; always returns acts
    semantically different from the input."""
    ops = list(DISTORTION_OPS)
    while ops:
        i = rng.randrange(len(ops))
        op = ops.pop(i)
        result = op(true_acts, rng, ont)
        if result is not None:
            return result
    raise AssertionError("change_function is always applicable")


def corrupt_user_act(true_acts, cfg, rng, ont):
    """One channel transmission: a processing problem, or an n-best list of
    per-position distortions with merged duplicates and Dirichlet scores."""
    if not true_acts:
        raise ValueError("true_acts must be non-empty")
    if rng.random() < cfg.p_perception:
        return PERCEPTION_PROBLEM
    if rng.random() < cfg.p_interpretation:
        return INTERPRETATION_PROBLEM

    e = cfg.error_rate
    positions = []
    for pos in range(cfg.n_best):
        p_true = e if (cfg.invert_accuracy_convention and pos == 0) else 1.0 - e
        if rng.random() < p_true:
            positions.append(list(true_acts))
        else:
            positions.append(distort(true_acts, rng, ont))
    confs = sample_confidences(cfg.n_best, e, cfg, rng)

    merged = []  # (acts, confidence), first-seen order
    for acts_, conf in zip(positions, confs):
        for j, (prev_acts, prev_conf) in enumerate(merged):
            if acts_semantically_equal(acts_, prev_acts):
                merged[j] = (prev_acts, prev_conf + conf)
                break
        else:
            merged.append((acts_, conf))
    merged.sort(key=lambda pair: -pair[1])
    return nbest_event(NBestList(tuple((tuple(a), c) for a, c in merged)))
