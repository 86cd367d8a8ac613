"""Simulated evaluation: greedy rollouts of checkpoint pools, the error-rate
sweep, objective success metrics over dialogue logs, and CSV emission.
"""

import csv
import random
from dataclasses import dataclass, replace
from pathlib import Path

from mddial.acts import CommFunction, parse_acts
from mddial.errormodel import ErrorConfig
from mddial.policy import load_policy
from mddial.simuser import SimConfig
from mddial.training import LinearController, run_episode

DEFAULT_SWEEP_RATES = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)


@dataclass(frozen=True)
class EvalSummary:
    system: str
    n_dialogues: int
    success_rate: float
    avg_len: float
    avg_reward: float
    ent_prov: float
    constr_conf: float
    info_prov: float
    error_rate: float

    def as_row(self):
        return {
            "system": self.system,
            "error_rate": self.error_rate,
            "n_dialogues": self.n_dialogues,
            "success_rate": round(self.success_rate, 4),
            "avg_len": round(self.avg_len, 4),
            "avg_reward": round(self.avg_reward, 4),
            "ent_prov": round(self.ent_prov, 4),
            "constr_conf": round(self.constr_conf, 4),
            "info_prov": round(self.info_prov, 4),
        }


def load_pool(run_dirs, trainable=False):
    """One controller per training run directory (the checkpoint pool)."""
    pool = []
    for run_dir in run_dirs:
        run_dir = Path(run_dir)
        if (run_dir / "all.npz").exists():
            agents = {"all": load_policy(run_dir / "all.npz", trainable=trainable)}
        else:
            agents = {
                key: load_policy(run_dir / f"{key}.npz", trainable=trainable)
                for key in ("task", "autofeedback", "som")
            }
        pool.append(LinearController(agents, learn=False))
    return pool


def discover_runs(root, regime):
    root = Path(root)
    runs = sorted((root / regime).glob("run*"), key=lambda p: p.name)
    if not runs:
        raise FileNotFoundError(f"no checkpoints for regime {regime!r} under {root}")
    return runs


def eval_simulated(
    pool,
    db,
    err,
    n,
    seed=0,
    system="system",
    sim_cfg=SimConfig(),
    collect=None,
):
    """Greedy evaluation (no exploration, no learning) of a checkpoint pool;
    episodes spread round-robin across the pool members. ``collect`` is an
    optional callback receiving every EpisodeResult."""
    rng = random.Random(seed)
    wins = turns = reward = ep = cc = ip = 0.0
    for i in range(n):
        controller = pool[i % len(pool)]
        result = run_episode(controller, db, err, sim_cfg, rng)
        wins += result.success
        turns += result.turns
        reward += result.total_reward
        ep += result.ent_prov
        cc += result.constr_conf
        ip += result.info_prov
        if collect is not None:
            collect(result)
    return EvalSummary(
        system=system,
        n_dialogues=n,
        success_rate=wins / n,
        avg_len=turns / n,
        avg_reward=reward / n,
        ent_prov=ep / n,
        constr_conf=cc / n,
        info_prov=ip / n,
        error_rate=err.error_rate if err else 0.0,
    )


def error_rate_sweep(
    pools,
    db,
    rates=DEFAULT_SWEEP_RATES,
    n_per_rate=1000,
    seed=0,
    sim_cfg=SimConfig(),
    base_err=ErrorConfig(),
):
    """One EvalSummary per (system, rate); systems evaluated on identical
    seeds at each rate."""
    out = []
    for rate in rates:
        err = replace(base_err, error_rate=rate)
        for system, pool in pools.items():
            out.append(
                eval_simulated(
                    pool, db, err, n_per_rate, seed=seed + int(rate * 1000),
                    system=system, sim_cfg=sim_cfg,
                )
            )
    return out


def write_summaries(summaries, path):
    """Wide table (one row per system and rate) plus a long-format twin
    (one row per system, error_rate, metric) next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [s.as_row() for s in summaries]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    long_path = path.with_name(path.stem + "_long.csv")
    with open(long_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["system", "error_rate", "metric", "value"])
        for row in rows:
            for metric in ("success_rate", "avg_len", "avg_reward", "ent_prov", "constr_conf", "info_prov"):
                writer.writerow([row["system"], row["error_rate"], metric, row[metric]])
    return path


# ---------------------------------------------------------------------------
# objective metrics over dialogue logs

def objective_metrics(log):
    """(ent_prov, constr_conf, info_prov) for one logged dialogue.

    ``log`` holds the task ({"constraints": ..., "requests": ...}) and the
    per-turn trace with canonical-text system acts. ent_prov: a recommended
    entity matched every task constraint. constr_conf: the confirmation
    echoes covered every task constraint. info_prov: every requested slot
    was provided.
    """
    constraints = dict(log["task"]["constraints"])
    requests = set(log["task"]["requests"])
    ent_prov = False
    echoed = {}
    informed = set()
    for record in log["trace"]:
        for a in parse_acts(record["system_acts"]):
            if a.function is CommFunction.RECOMMEND:
                values = a.content.constraints_dict
                if all(values.get(s) == v for s, v in constraints.items()):
                    ent_prov = True
            elif a.function is CommFunction.FEEDBACK_INFORM:
                echoed.update(a.content.constraints_dict)
            elif a.function is CommFunction.INFORM and a.content.constraints:
                informed.update(s for s, v in a.content.constraints_dict.items() if v)
    constr_conf = all(echoed.get(s) == v for s, v in constraints.items())
    info_prov = requests <= informed
    return ent_prov, constr_conf, info_prov


def episode_log(result):
    """Serializable log record for one episode (requires a collected trace)."""
    if result.trace is None:
        raise ValueError("episode was run without collect_trace")
    return {
        "task": {
            "constraints": dict(result.task.constraints),
            "requests": list(result.task.requests),
        },
        "success": result.success,
        "turns": result.turns,
        "total_reward": result.total_reward,
        "trace": result.trace,
    }
