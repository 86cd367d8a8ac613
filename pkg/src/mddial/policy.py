"""Dialogue act agents: linear action-value policies, epsilon-greedy
selection, SARSA updates, and checkpoint persistence.

Each agent owns one weight matrix (actions x features). Updates mutate the
matrix in place (an agent is exclusively owned by one training run);
evaluation-time agents are read-only and shareable.
"""

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from mddial import kernels
from mddial.acts import enumerate_action_set
from mddial.belief import get_catalogue

log = logging.getLogger(__name__)

ALL = "all"  # the one-dimensional baseline agent


class CheckpointError(ValueError):
    """Checkpoint missing, corrupt, or incompatible with this run."""


@dataclass
class LinearPolicy:
    actions: list                  # canonical action order; index = row
    weights: np.ndarray            # shape (len(actions), n_features), float64
    catalogue_version: str
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index.update({a: i for i, a in enumerate(self.actions)})
        if self.weights.shape[0] != len(self.actions):
            raise ValueError("one weight row per action required")
        if not np.isfinite(self.weights).all():
            raise ValueError("weights must be finite")

    def index_of(self, action):
        try:
            return self._index[action]
        except KeyError:
            raise KeyError(f"unknown action {action!r}") from None


@dataclass
class DialogueActAgent:
    dimension: str                 # "task" | "autofeedback" | "som" | "all"
    policy: LinearPolicy
    trainable: bool = True
    domain: str = ""

    @property
    def actions(self):
        return self.policy.actions

    @property
    def n_features(self):
        return self.policy.weights.shape[1]


@dataclass(frozen=True)
class LearningConfig:
    alpha: float = 0.01
    gamma: float = 1.0
    eps_start: float = 0.3
    eps_end: float = 0.02
    eps_fraction: float = 0.8  # anneal over this fraction of training dialogues
    # evaluation runs pure greedy, so the tail of training anneals the
    # remaining exploration away; otherwise rarely-greedy states keep stale
    # looping actions that only surface at eval time
    eps_final: float = 0.0
    # fresh agents start with this q-value on the bias weight; optimism on
    # the scale of the success bonus keeps early policies from learning to
    # hang up before they ever see a completed task
    optimistic_init: float = 80.0


def epsilon_at(cfg, dialogue_idx, n_dialogues):
    """Linear anneal from eps_start to eps_end over the first eps_fraction
    of training dialogues, then from eps_end down to eps_final by the end."""
    horizon = max(1, int(cfg.eps_fraction * n_dialogues))
    if dialogue_idx < horizon:
        frac = dialogue_idx / horizon
        return cfg.eps_start + frac * (cfg.eps_end - cfg.eps_start)
    tail = max(1, n_dialogues - horizon)
    frac = min(1.0, (dialogue_idx - horizon) / tail)
    return cfg.eps_end + frac * (cfg.eps_final - cfg.eps_end)


def make_agent(dim, ont, trainable=True, optimistic_init=0.0):
    """Fresh agent for one of the three dimensions; optimistic_init seeds
    every action's bias weight."""
    actions = enumerate_action_set(dim, ont)
    cat = get_catalogue(dim, ont)
    weights = np.zeros((len(actions), len(cat)), dtype=np.float64)
    weights[:, 0] = optimistic_init
    policy = LinearPolicy(actions=actions, weights=weights, catalogue_version=cat.version)
    return DialogueActAgent(dim.value, policy, trainable, ont.domain_name)


def make_all_agent(ont, trainable=True, optimistic_init=0.0):
    """Fresh agent over the flattened action product (one-dim baseline)."""
    from mddial.combiner import flatten_action_product  # avoids an import cycle

    actions = flatten_action_product(ont)
    cat = get_catalogue(ALL, ont)
    weights = np.zeros((len(actions), len(cat)), dtype=np.float64)
    weights[:, 0] = optimistic_init
    policy = LinearPolicy(actions=actions, weights=weights, catalogue_version=cat.version)
    return DialogueActAgent(ALL, policy, trainable, ont.domain_name)


def _check_features(agent, f):
    if len(f) != agent.n_features:
        raise CheckpointError(
            f"feature vector of length {len(f)} does not match catalogue "
            f"{agent.policy.catalogue_version!r} (length {agent.n_features})"
        )


def q_value(agent, f, action):
    """weights[action] . f"""
    _check_features(agent, f)
    return kernels.q_value_at(agent.policy.weights, agent.policy.index_of(action), f)


def q_values(agent, f):
    _check_features(agent, f)
    return kernels.q_values(agent.policy.weights, f)


def select_index(agent, f, eps, rng):
    """Index variant of select_action for the episode hot loop."""
    if eps > 0.0 and rng.random() < eps:
        return rng.randrange(len(agent.policy.actions))
    return kernels.argmax_q(agent.policy.weights, f)


def select_action(agent, f, eps, rng):
    """Epsilon-greedy: argmax action with probability 1-eps (ties resolve to the
    earlier action in canonical order), else uniform over the action set."""
    _check_features(agent, f)
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must be in [0, 1]")
    return agent.policy.actions[select_index(agent, f, eps, rng)]


def td_update(agent, f, action, reward, f_next, action_next, terminal, cfg):
    """One SARSA step: w[a] += alpha * delta * f where
    delta = r + gamma * q(f', a') - q(f, a) (gamma term dropped on terminal).

    Mutates the agent's weights in place and returns the agent. Calls on a
    non-trainable agent are rejected as a no-op with a diagnostic.
    """
    if not agent.trainable:
        log.debug("td_update ignored: %s agent is frozen", agent.dimension)
        return agent
    w = agent.policy.weights
    idx = action if isinstance(action, int) else agent.policy.index_of(action)
    target = reward
    if not terminal:
        idx_next = action_next if isinstance(action_next, int) else agent.policy.index_of(action_next)
        target += cfg.gamma * kernels.q_value_at(w, idx_next, f_next)
    delta = target - kernels.q_value_at(w, idx, f)
    kernels.add_scaled(w, idx, f, cfg.alpha * delta)
    return agent


# ---------------------------------------------------------------------------
# checkpoints

CHECKPOINT_FORMAT = 1


def save_policy(agent, path, regime="", training_dialogues=0, seed=0):
    """Write an .npz checkpoint (atomic: temp file + rename)."""
    header = {
        "format": CHECKPOINT_FORMAT,
        "dimension": agent.dimension,
        "domain": agent.domain,
        "catalogue_version": agent.policy.catalogue_version,
        "regime": regime,
        "training_dialogues": training_dialogues,
        "seed": seed,
        "trainable": agent.trainable,
        "actions": list(agent.policy.actions),
    }
    path = str(path)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            np.savez(fh, header=np.frombuffer(json.dumps(header).encode(), dtype=np.uint8),
                     weights=agent.policy.weights)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_policy(path, expect_catalogue=None, trainable=None):
    """Load a checkpoint; optionally enforce a feature-catalogue version
    (cross-domain loads of task policies are rejected this way)."""
    try:
        with np.load(path) as data:
            header = json.loads(bytes(data["header"].tobytes()).decode())
            weights = np.array(data["weights"], dtype=np.float64)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if header.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"unsupported checkpoint format in {path}")
    if expect_catalogue is not None and header["catalogue_version"] != expect_catalogue:
        raise CheckpointError(
            f"catalogue mismatch loading {path}: checkpoint has "
            f"{header['catalogue_version']!r}, run expects {expect_catalogue!r}"
        )
    policy = LinearPolicy(
        actions=list(header["actions"]),
        weights=weights,
        catalogue_version=header["catalogue_version"],
    )
    return DialogueActAgent(
        dimension=header["dimension"],
        policy=policy,
        trainable=header["trainable"] if trainable is None else trainable,
        domain=header["domain"],
    )
