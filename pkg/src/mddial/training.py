"""Episode loop, shared reward, and the four training regimes including
cross-domain transfer orchestration.

A turn is one utterance by either party: every exchange books -1 for the
user turn plus the system-turn reward from compute_turn_reward, so
EpisodeResult.turns counts both sides and the total decomposes exactly as
success*80 - turns + 3*social_matched - 5*unsignalled_problems
(recomputable from the per-exchange trace).
"""

import csv
import json
import random
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from mddial.acts import CommFunction, Dimension, NBestList, format_acts, nbest_event
from mddial.belief import (
    extract_features,
    get_catalogue,
    init_belief,
    note_system_response,
    update_belief,
)
from mddial.combiner import combine, split_combined_action
from mddial.domain import sample_task
from mddial.errormodel import ErrorConfig, corrupt_user_act
from mddial.policy import (
    LearningConfig,
    epsilon_at,
    load_policy,
    make_agent,
    make_all_agent,
    save_policy,
    select_index,
    td_update,
)
from mddial.simuser import SimConfig, goal_satisfied, init_sim_user, sim_receive, sim_respond
from mddial import kernels

TURN_CAP = 40  # twice the simulator patience

REGIME_ONE_DIM = "one-dim"
REGIME_MULTI_DIM = "multi-dim"
REGIME_TRANS_FIXED = "trans-fixed"
REGIME_TRANS_ADAPT = "trans-adapt"
REGIMES = (REGIME_ONE_DIM, REGIME_MULTI_DIM, REGIME_TRANS_FIXED, REGIME_TRANS_ADAPT)

TARGET_ERROR_RATE = 0.30
SOURCE_ERROR_RATE = 0.20


@dataclass(frozen=True)
class RewardConfig:
    success_bonus: float = 80.0
    turn_penalty: float = -1.0
    social_bonus: float = 3.0
    unsignalled_problem_penalty: float = -5.0


@dataclass(frozen=True)
class TrainingRegime:
    name: str
    source_checkpoints: tuple = ()  # run directories, required for trans-*

    def __post_init__(self):
        if self.name not in REGIMES:
            raise ValueError(f"unknown regime {self.name!r}")


@dataclass
class EpisodeResult:
    success: bool
    turns: int
    total_reward: float
    task: object
    ent_prov: bool
    constr_conf: bool
    info_prov: bool
    trace: list = None


_SOCIAL_RESPONSE = {
    "greet": CommFunction.RETURN_GREET,
    "bye": CommFunction.RETURN_BYE,
    "thank": CommFunction.ACCEPT_THANK,
}

_PROBLEM_SIGNAL = {
    "perception": CommFunction.AUTO_NEGATIVE_PERCEPTION,
    "interpretation": CommFunction.AUTO_NEGATIVE_INTERPRETATION,
}


def compute_turn_reward(b, response, ev_prev, terminal_success, cfg=RewardConfig()):
    """Per-exchange reward: -1 always; +3 when a pending social act received
    its matching response this exchange; -5 when the exchange's processing
    problem went unsignalled (the matching negative feedback act is required);
    +80 on the terminal exchange of a successful dialogue."""
    reward = cfg.turn_penalty
    functions = {a.function for a in response.acts}
    for pending in b.pending_social:
        if _SOCIAL_RESPONSE[pending] in functions:
            reward += cfg.social_bonus
    if ev_prev is not None and ev_prev.kind in _PROBLEM_SIGNAL:
        if _PROBLEM_SIGNAL[ev_prev.kind] not in functions:
            reward += cfg.unsignalled_problem_penalty
    if terminal_success:
        reward += cfg.success_bonus
    return reward


class LinearController:
    """Wraps one agent set (three per-dimension agents, or the single All
    agent) and performs the one-exchange-delayed TD bookkeeping: each decide
    settles the previous exchange's update before selecting anew."""

    def __init__(self, agents, learn=False, learn_cfg=LearningConfig()):
        if set(agents) not in ({"all"}, {"task", "autofeedback", "som"}):
            raise ValueError(f"unexpected agent set {sorted(agents)!r}")
        self.agents = agents
        self.one_dim = "all" in agents
        self.learn = learn
        self.learn_cfg = learn_cfg
        self.eps = 0.0
        self._prev = None
        self._prev_reward = 0.0

    def begin_episode(self, eps=0.0):
        self.eps = eps if self.learn else 0.0
        self._prev = None

    def decide(self, b, db, rng):
        chosen = {}
        for key, agent in self.agents.items():
            f = extract_features(b, "all" if key == "all" else Dimension(key), db)
            idx = select_index(agent, f, self.eps, rng)
            chosen[key] = (f, idx)
        if self.learn and self._prev is not None:
            for key, agent in self.agents.items():
                pf, pi = self._prev[key]
                f, _ = chosen[key]
                # max backup: bootstrap on the greedy action, not the
                # (possibly exploratory) behaviour action - with optimistic
                # initialization this keeps the value of continuing the
                # dialogue high until real values emerge, which is what
                # stops policies from learning to hang up early
                greedy = kernels.argmax_q(agent.policy.weights, f)
                td_update(agent, pf, pi, self._prev_reward, f, greedy, False, self.learn_cfg)
        self._prev = chosen
        if self.one_dim:
            agent = self.agents["all"]
            return split_combined_action(agent.actions[chosen["all"][1]])
        return (
            self.agents["task"].actions[chosen["task"][1]],
            self.agents["autofeedback"].actions[chosen["autofeedback"][1]],
            self.agents["som"].actions[chosen["som"][1]],
        )

    def note_reward(self, reward):
        self._prev_reward = reward

    def finish(self):
        if self.learn and self._prev is not None:
            for key, agent in self.agents.items():
                pf, pi = self._prev[key]
                td_update(agent, pf, pi, self._prev_reward, None, 0, True, self.learn_cfg)
        self._prev = None

    def actions_of(self, triple):
        task_a, feedback_a, som_a = triple
        return {"task": task_a, "autofeedback": feedback_a, "som": som_a}


def clean_event(user_acts):
    """Noise-free channel: a single full-confidence hypothesis."""
    return nbest_event(NBestList(((tuple(user_acts), 1.0),)))


def run_episode(
    controller,
    db,
    err,
    sim_cfg,
    rng,
    reward_cfg=RewardConfig(),
    eps=0.0,
    collect_trace=False,
    task=None,
):
    """One simulated dialogue. err=None runs a noise-free channel.

    Terminates on the system's ReturnBye, on the user giving up (patience),
    or at the hard cap of 40 exchanges; success requires the user goal to be
    satisfied at termination.
    """
    ont = db.ontology
    if task is None:
        task = sample_task(
            db,
            rng,
            min_constraints=sim_cfg.min_constraints,
            max_constraints=sim_cfg.max_constraints or None,
            request_prob=sim_cfg.request_prob,
        )
    sim = init_sim_user(task, rng, sim_cfg)
    b = init_belief(ont)
    controller.begin_episode(eps)

    exchanges = 0
    total = 0.0
    trace = [] if collect_trace else None
    ent_prov = constr_conf_echo = info_prov = False
    echoed = {}
    informed_requested = set()

    while True:
        user_acts, _ = sim_respond(sim, rng, sim_cfg)
        ev = clean_event(user_acts) if err is None else corrupt_user_act(user_acts, err, rng, ont)
        b = update_belief(b, ev)
        triple = controller.decide(b, db, rng)
        response = combine(triple[0], triple[1], triple[2], b, db)
        exchanges += 1
        sim_receive(sim, response, rng, db)

        terminal = sim.dialogue_over or response.ends_dialogue or 2 * exchanges >= TURN_CAP
        success = terminal and goal_satisfied(sim)
        # the user's utterance costs one turn penalty, the system's response
        # carries the rest of the per-exchange reward
        reward = reward_cfg.turn_penalty + compute_turn_reward(b, response, ev, success, reward_cfg)
        total += reward
        controller.note_reward(reward)

        for a in response.acts:
            if a.function is CommFunction.RECOMMEND:
                values = a.content.constraints_dict
                if all(values.get(s) == v for s, v in task.constraints.items()):
                    ent_prov = True
            elif a.function is CommFunction.FEEDBACK_INFORM:
                echoed.update(a.content.constraints_dict)
            elif a.function is CommFunction.INFORM and a.content.constraints:
                informed_requested.update(
                    s for s, v in a.content.constraints_dict.items() if s in task.requests and v
                )

        if trace is not None:
            heard = ev.nbest.top[0] if ev.kind == "nbest" else ()
            trace.append(
                {
                    "turn": exchanges,
                    "user_acts": format_acts(user_acts),
                    "event_kind": ev.kind,
                    "heard_acts": format_acts(heard),
                    "agent_actions": controller.actions_of(triple) if hasattr(controller, "actions_of") else
                    {"task": triple[0], "autofeedback": triple[1], "som": triple[2]},
                    "fired_rules": [rule for _, rule in response.cancelled],
                    "system_acts": format_acts(response.acts),
                    "reward": reward,
                }
            )

        b = note_system_response(b, response)
        if terminal:
            controller.finish()
            constr_conf_echo = all(echoed.get(s) == v for s, v in task.constraints.items())
            info_prov = set(task.requests) <= informed_requested
            return EpisodeResult(
                success=success,
                turns=2 * exchanges,
                total_reward=total,
                task=task,
                ent_prov=ent_prov,
                constr_conf=constr_conf_echo,
                info_prov=info_prov,
                trace=trace,
            )


# ---------------------------------------------------------------------------
# regimes

def fresh_agents(regime_name, ont, source_run_dir=None, optimistic_init=0.0):
    """Agent set for one training run of a regime. trans-* regimes load the
    domain-general policies from a source run directory; a catalogue-version
    check rejects any attempt to transfer the domain-specific one."""
    if regime_name == REGIME_ONE_DIM:
        return {"all": make_all_agent(ont, optimistic_init=optimistic_init)}
    if regime_name == REGIME_MULTI_DIM:
        return {
            "task": make_agent(Dimension.TASK, ont, optimistic_init=optimistic_init),
            "autofeedback": make_agent(Dimension.FEEDBACK, ont, optimistic_init=optimistic_init),
            "som": make_agent(Dimension.SOM, ont, optimistic_init=optimistic_init),
        }
    if regime_name in (REGIME_TRANS_FIXED, REGIME_TRANS_ADAPT):
        if source_run_dir is None:
            raise ValueError(f"{regime_name} requires source checkpoints")
        src = Path(source_run_dir)
        trainable = regime_name == REGIME_TRANS_ADAPT
        agents = {"task": make_agent(Dimension.TASK, ont, optimistic_init=optimistic_init)}
        for key, dim in (("autofeedback", Dimension.FEEDBACK), ("som", Dimension.SOM)):
            expect = get_catalogue(dim, ont).version
            agents[key] = load_policy(src / f"{key}.npz", expect_catalogue=expect, trainable=trainable)
        return agents
    raise ValueError(f"unknown regime {regime_name!r}")


def train_run(
    regime_name,
    db,
    seed,
    n_dialogues,
    out_dir,
    error_rate=TARGET_ERROR_RATE,
    source_run_dir=None,
    sim_cfg=SimConfig(),
    learn_cfg=LearningConfig(),
    reward_cfg=RewardConfig(),
    window=1000,
):
    """One training run; writes per-agent checkpoints plus a training curve
    (window success rate / average reward / epsilon per 1000 dialogues)."""
    rng = random.Random(seed)
    agents = fresh_agents(
        regime_name, db.ontology, source_run_dir, optimistic_init=learn_cfg.optimistic_init
    )
    controller = LinearController(agents, learn=True, learn_cfg=learn_cfg)
    err = replace(ErrorConfig(), error_rate=error_rate)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curve = []
    wins = rewards = 0.0
    for i in range(n_dialogues):
        eps = epsilon_at(learn_cfg, i, n_dialogues)
        result = run_episode(controller, db, err, sim_cfg, rng, reward_cfg, eps=eps)
        wins += result.success
        rewards += result.total_reward
        if (i + 1) % window == 0:
            curve.append(
                {
                    "dialogues": i + 1,
                    "success_rate": wins / window,
                    "avg_reward": rewards / window,
                    "epsilon": round(eps, 6),
                }
            )
            wins = rewards = 0.0

    for key, agent in agents.items():
        save_policy(
            agent,
            out_dir / f"{key}.npz",
            regime=regime_name,
            training_dialogues=n_dialogues,
            seed=seed,
        )
    with open(out_dir / "curve.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["dialogues", "success_rate", "avg_reward", "epsilon"])
        writer.writeheader()
        writer.writerows(curve)
    manifest = {
        "regime": regime_name,
        "domain": db.ontology.domain_name,
        "seed": seed,
        "dialogues": n_dialogues,
        "error_rate": error_rate,
        "source_run": str(source_run_dir) if source_run_dir else None,
        "sim_config": asdict(sim_cfg),
        "learning": asdict(learn_cfg),
        "reward": asdict(reward_cfg),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return out_dir


def train_regime(
    regime,
    target_db,
    source_db=None,
    n_dialogues=60000,
    n_runs=5,
    seeds=None,
    out_root="artifacts",
    source_root=None,
    sim_cfg=SimConfig(),
    learn_cfg=LearningConfig(),
    reward_cfg=RewardConfig(),
):
    """Train n_runs independent policies for one regime.

    trans-* regimes pair target run i with source run i; missing source
    checkpoints are trained first (multi-dim on the source domain at the
    source error rate, same dialogue budget).
    """
    if isinstance(regime, str):
        regime = TrainingRegime(regime)
    seeds = list(seeds) if seeds else [1000 + 17 * i for i in range(n_runs)]
    if len(seeds) != n_runs:
        raise ValueError("one seed per run required")
    out_root = Path(out_root)

    source_runs = [None] * n_runs
    if regime.name in (REGIME_TRANS_FIXED, REGIME_TRANS_ADAPT):
        if regime.source_checkpoints:
            source_runs = [Path(p) for p in regime.source_checkpoints]
            missing = [p for p in source_runs if not (p / "autofeedback.npz").exists()]
            if missing:
                raise FileNotFoundError(f"missing source checkpoints: {missing[0]}")
        else:
            if source_db is None:
                raise ValueError("trans-* regimes need source_db or source_checkpoints")
            source_root = Path(source_root) if source_root else out_root / "source"
            source_runs = []
            for i in range(n_runs):
                run_dir = source_root / f"run{i}"
                if not (run_dir / "autofeedback.npz").exists():
                    train_run(
                        REGIME_MULTI_DIM,
                        source_db,
                        seed=seeds[i] + 500000,
                        n_dialogues=n_dialogues,
                        out_dir=run_dir,
                        error_rate=SOURCE_ERROR_RATE,
                        sim_cfg=sim_cfg,
                        learn_cfg=learn_cfg,
                        reward_cfg=reward_cfg,
                    )
                source_runs.append(run_dir)

    run_dirs = []
    for i in range(n_runs):
        run_dirs.append(
            train_run(
                regime.name,
                target_db,
                seed=seeds[i],
                n_dialogues=n_dialogues,
                out_dir=out_root / regime.name / f"run{i}",
                error_rate=TARGET_ERROR_RATE,
                source_run_dir=source_runs[i],
                sim_cfg=sim_cfg,
                learn_cfg=learn_cfg,
                reward_cfg=reward_cfg,
            )
        )
    return run_dirs


def execute_run_job(job):
    """Worker entry point for process-parallel training; ``job`` is a plain
    dict so it pickles across processes."""
    from mddial.config import resolve_domain

    db = resolve_domain(job["domain"])
    return str(
        train_run(
            job["regime"],
            db,
            seed=job["seed"],
            n_dialogues=job["dialogues"],
            out_dir=job["out_dir"],
            error_rate=job["error_rate"],
            source_run_dir=job.get("source_run_dir"),
            sim_cfg=SimConfig(**job["sim_cfg"]),
            learn_cfg=LearningConfig(**job["learn_cfg"]),
            reward_cfg=RewardConfig(**job["reward_cfg"]),
        )
    )
