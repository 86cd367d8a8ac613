"""Agenda-based simulated user: a goal-driven stack of pending acts,
reactions to system responses (re-answering after negative feedback,
correcting bad recommendations), and satisfaction detection.

All behavioural probabilities live in SimConfig and are reported with every
result set; they shape dialogue difficulty and length.
"""

from dataclasses import dataclass, field

from mddial.acts import CommFunction, Dimension, act


@dataclass(frozen=True)
class SimConfig:
    greet_prob: float = 0.5
    multi_act_prob: float = 0.3
    thank_prob: float = 0.5
    patience: int = 20
    # task sampling (the only difficulty knobs the scenario generator has)
    min_constraints: int = 1
    max_constraints: int = 0      # 0 = all constraint slots
    request_prob: float = 0.9     # per requestable slot; resampled if none


@dataclass
class UserGoal:
    task: object                  # TaskSpec
    obtained: dict                # requested slot -> value or None
    offered_ok: bool = False
    offered_name: str = None
    adopted: dict = field(default_factory=dict)  # constraints adopted on system request

    @property
    def constraints(self):
        return {**self.task.constraints, **self.adopted}


@dataclass
class SimUserState:
    goal: UserGoal
    agenda: list                  # stack; last element is the top
    patience: int
    last_statement: list = field(default_factory=list)  # informational acts of the last turn
    dialogue_over: bool = False


def _inform(slot, value):
    return act(CommFunction.INFORM, {slot: value})


def _request(slot):
    return act(CommFunction.REQUEST, requested=[slot])


def init_sim_user(task, rng, cfg=SimConfig()):
    """Agenda bottom-up: Bye, one Request per requested slot, shuffled
    Informs (one per constraint), optionally Greet on top."""
    agenda = [act(CommFunction.BYE)]
    for slot in sorted(task.requests, reverse=True):
        agenda.append(_request(slot))
    informs = [_inform(s, v) for s, v in sorted(task.constraints.items())]
    rng.shuffle(informs)
    agenda.extend(informs)
    if rng.random() < cfg.greet_prob:
        agenda.append(act(CommFunction.GREET))
    goal = UserGoal(task=task, obtained={s: None for s in task.requests})
    return SimUserState(goal=goal, agenda=agenda, patience=cfg.patience)


def goal_satisfied(u):
    return u.goal.offered_ok and all(v is not None for v in u.goal.obtained.values())


def _agenda_has_inform(agenda, slot):
    return any(
        a.function is CommFunction.INFORM and slot in a.content.constraints_dict
        for a in agenda
    )


def _refill(u, rng):
    """Keep the dialogue alive when the agenda is down to Bye but the goal
    is not yet met: chase owed info, or re-state a constraint to prompt a
    recommendation."""
    owed = sorted(s for s, v in u.goal.obtained.items() if v is None)
    if u.goal.offered_ok and owed:
        u.agenda.append(_request(owed[0]))
        return
    constraints = u.goal.constraints
    slot = rng.choice(sorted(constraints))
    u.agenda.append(_inform(slot, constraints[slot]))


_MERGEABLE = {
    (CommFunction.GREET, CommFunction.INFORM),
    (CommFunction.GREET, CommFunction.REQUEST),
    (CommFunction.INFORM, CommFunction.INFORM),
    (CommFunction.INFORM, CommFunction.REQUEST),
    (CommFunction.REQUEST, CommFunction.REQUEST),
}


def sim_respond(u, rng, cfg=SimConfig()):
    """Pop the next user turn: one act, or two compatible acts with
    multi_act_prob. Bye is emitted only on goal success or exhausted
    patience."""
    if u.dialogue_over:
        raise RuntimeError("dialogue is over")
    if u.patience <= 0:
        u.dialogue_over = True
        u.last_statement = []
        return [act(CommFunction.BYE)], u
    if goal_satisfied(u):
        u.dialogue_over = True
        u.last_statement = []
        if rng.random() < cfg.thank_prob:
            return [act(CommFunction.THANK), act(CommFunction.BYE)], u
        return [act(CommFunction.BYE)], u

    if len(u.agenda) <= 1:  # only Bye left but the goal is not met
        _refill(u, rng)
    turn = [u.agenda.pop()]
    if (
        len(u.agenda) > 1
        and rng.random() < cfg.multi_act_prob
        and (turn[0].function, u.agenda[-1].function) in _MERGEABLE
    ):
        turn.append(u.agenda.pop())
    u.last_statement = [
        a for a in turn if a.function in (CommFunction.INFORM, CommFunction.REQUEST)
    ]
    return turn, u


def sim_receive(u, response, rng, db):
    """Update the user state from one system response; decrements patience."""
    u.patience -= 1
    ont = db.ontology
    constraints = u.goal.constraints
    for a in response.acts:
        fn = a.function
        if fn in (CommFunction.AUTO_NEGATIVE_PERCEPTION, CommFunction.AUTO_NEGATIVE_INTERPRETATION):
            # repeat/rephrase: restore exactly what failed to ground
            for lost in reversed(u.last_statement):
                u.agenda.append(lost)
        elif fn is CommFunction.REQUEST:
            for slot in a.content.requested:
                if slot in constraints:
                    value = constraints[slot]
                elif slot in ont.constraint_slot_names:
                    # adopt a value for an unconstrained slot, keeping the
                    # (constraints + adopted) combination solvable
                    feasible = [
                        v for v in ont.values_of(slot)
                        if db.match_count({**constraints, slot: v})
                    ]
                    value = rng.choice(feasible)
                    u.goal.adopted[slot] = value
                    constraints = u.goal.constraints
                else:
                    continue
                u.agenda.append(_inform(slot, value))
        elif fn is CommFunction.RECOMMEND:
            offered_values = a.content.constraints_dict
            name = a.content.entity
            mismatched = sorted(
                s for s, v in constraints.items() if offered_values.get(s) != v
            )
            if name != u.goal.offered_name:
                # information gathered about a previous venue is stale
                u.goal.obtained = {s: None for s in u.goal.obtained}
            u.goal.offered_name = name
            u.goal.offered_ok = not mismatched
            if mismatched:
                for slot in mismatched[:2]:
                    if not _agenda_has_inform(u.agenda, slot):
                        u.agenda.append(_inform(slot, constraints[slot]))
        elif fn is CommFunction.FEEDBACK_INFORM:
            # a wrongly echoed value gets corrected, like a bad recommendation
            wrong = sorted(
                s for s, v in a.content.constraints_dict.items()
                if s in constraints and constraints[s] != v
            )
            for slot in wrong[:2]:
                if not _agenda_has_inform(u.agenda, slot):
                    u.agenda.append(_inform(slot, constraints[slot]))
        elif fn is CommFunction.INFORM and a.dimension is Dimension.TASK:
            for slot, value in a.content.constraints_dict.items():
                if slot in u.goal.obtained and value:
                    u.goal.obtained[slot] = value
        elif fn is CommFunction.RETURN_BYE:
            u.dialogue_over = True
    return u
