#!/usr/bin/env python3
"""Benchmark the compiled linear-policy kernels against the numpy fallback.

Shapes mirror the real agents: SOM 4x4, AutoFeedback 5x7, Task 7x16, and
the one-dim baseline's 70x25. Also times one full training episode per
backend (set MDDIAL_PURE_PYTHON=1 to force the fallback package-wide).
"""

import random
import time

import numpy as np

from mddial import kernels, pykernels
from mddial.domain import load_builtin_domain
from mddial.errormodel import ErrorConfig
from mddial.policy import LearningConfig
from mddial.simuser import SimConfig
from mddial.training import LinearController, fresh_agents, run_episode

SHAPES = (("som", 4, 4), ("autofeedback", 5, 7), ("task", 7, 16), ("all", 70, 25))
REPEAT = 200_000


def bench_kernels(impl):
    rng = np.random.default_rng(0)
    rows = []
    for name, n_actions, n_features in SHAPES:
        w = np.ascontiguousarray(rng.normal(size=(n_actions, n_features)))
        f = np.ascontiguousarray(rng.normal(size=n_features))
        t0 = time.perf_counter()
        for _ in range(REPEAT):
            impl.argmax_q(w, f)
        argmax_us = (time.perf_counter() - t0) / REPEAT * 1e6
        t0 = time.perf_counter()
        for _ in range(REPEAT):
            impl.add_scaled(w, 0, f, 1e-6)
        update_us = (time.perf_counter() - t0) / REPEAT * 1e6
        rows.append((name, argmax_us, update_us))
    return rows


def bench_episodes(n=2000):
    db = load_builtin_domain("restaurants")
    agents = fresh_agents("multi-dim", db.ontology, optimistic_init=80.0)
    controller = LinearController(agents, learn=True, learn_cfg=LearningConfig())
    rng = random.Random(0)
    err = ErrorConfig(error_rate=0.3)
    sim = SimConfig()
    t0 = time.perf_counter()
    for _ in range(n):
        run_episode(controller, db, err, sim, rng, eps=0.1)
    return (time.perf_counter() - t0) / n * 1e3


def main():
    print(f"active backend: {kernels.KERNEL_BACKEND}")
    print(f"\nper-call kernel latency ({REPEAT} reps), microseconds:")
    print(f"{'agent':<14}{'argmax C':>10}{'argmax py':>11}{'update C':>10}{'update py':>11}")
    compiled = bench_kernels(kernels) if kernels.KERNEL_BACKEND == "compiled" else None
    fallback = bench_kernels(pykernels)
    for i, (name, *_) in enumerate(SHAPES):
        c_arg, c_upd = (compiled[i][1], compiled[i][2]) if compiled else (float("nan"),) * 2
        p_arg, p_upd = fallback[i][1], fallback[i][2]
        print(f"{name:<14}{c_arg:>10.2f}{p_arg:>11.2f}{c_upd:>10.2f}{p_upd:>11.2f}")
    print(f"\nfull training episode (active backend): {bench_episodes():.2f} ms")


if __name__ == "__main__":
    main()
