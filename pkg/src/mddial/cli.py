"""Command-line entry points: train, eval-sim, sweep, stats, chat, serve,
and questionnaire export. Every command writes machine-readable outputs to
the configured directory and exits non-zero with a diagnostic on config or
IO failures.
"""

import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import click

from mddial.config import load_config, resolve_domain
from mddial.evaluation import (
    DEFAULT_SWEEP_RATES,
    discover_runs,
    error_rate_sweep,
    eval_simulated,
    load_pool,
    write_summaries,
)
from mddial.training import (
    REGIME_MULTI_DIM,
    REGIME_TRANS_ADAPT,
    REGIME_TRANS_FIXED,
    REGIMES,
    SOURCE_ERROR_RATE,
    TARGET_ERROR_RATE,
    execute_run_job,
)


@click.group()
def main():
    """Multi-dimensional statistical dialogue manager toolkit."""


def _fail(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _apply_overrides(cfg, regime, dialogues, runs, seed, out):
    if regime:
        cfg.regime = regime
    if dialogues:
        cfg.dialogues = dialogues
    if runs:
        cfg.runs = runs
    if out:
        cfg.out = out
    if seed is not None:
        cfg.seeds = [seed + 17 * i for i in range(cfg.runs)]
    if not cfg.seeds:
        cfg.seeds = [1000 + 17 * i for i in range(cfg.runs)]
    return cfg


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--regime", type=click.Choice(("all",) + REGIMES), default=None)
@click.option("--domain", default=None, help="target domain name or file")
@click.option("--dialogues", type=int, default=None)
@click.option("--runs", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--workers", type=int, default=1, show_default=True)
def train(config_path, regime, domain, dialogues, runs, seed, out, workers):
    """Train policy pools for one regime or the full grid."""
    try:
        cfg = load_config(config_path)
    except (OSError, ValueError) as exc:
        _fail(exc)
    cfg = _apply_overrides(cfg, regime, dialogues, runs, seed, out)
    if domain:
        cfg.domain = domain
    regimes = list(REGIMES) if cfg.regime == "all" else [cfg.regime]
    out_root = Path(cfg.out)

    try:
        resolve_domain(cfg.domain)
    except Exception as exc:
        _fail(f"cannot load domain {cfg.domain!r}: {exc}")

    base = {
        "dialogues": cfg.dialogues,
        "sim_cfg": asdict(cfg.simulator),
        "learn_cfg": asdict(cfg.learning),
        "reward_cfg": asdict(cfg.reward),
    }
    need_source = REGIME_TRANS_FIXED in regimes or REGIME_TRANS_ADAPT in regimes
    phase1, phase2 = [], []
    for i in range(cfg.runs):
        if need_source and not (out_root / "source" / f"run{i}" / "autofeedback.npz").exists():
            phase1.append(
                dict(
                    base,
                    regime=REGIME_MULTI_DIM,
                    domain=cfg.source_domain,
                    seed=cfg.seeds[i] + 500000,
                    out_dir=str(out_root / "source" / f"run{i}"),
                    error_rate=SOURCE_ERROR_RATE,
                )
            )
        for name in regimes:
            job = dict(
                base,
                regime=name,
                domain=cfg.domain,
                seed=cfg.seeds[i],
                out_dir=str(out_root / name / f"run{i}"),
                error_rate=TARGET_ERROR_RATE,
            )
            if name in (REGIME_TRANS_FIXED, REGIME_TRANS_ADAPT):
                job["source_run_dir"] = str(out_root / "source" / f"run{i}")
                phase2.append(job)
            else:
                phase1.append(job)

    def run_jobs(jobs):
        if not jobs:
            return
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for done in pool.map(execute_run_job, jobs):
                    click.echo(f"trained {done}")
        else:
            for job in jobs:
                click.echo(f"trained {execute_run_job(job)}")

    run_jobs(phase1)
    run_jobs(phase2)
    click.echo(f"checkpoints under {out_root}")


def _episode_writer(path):
    fh = open(path, "w", newline="")
    writer = csv.writer(fh)
    writer.writerow(["episode", "success", "turns", "total_reward", "ent_prov", "constr_conf", "info_prov"])
    state = {"i": 0}

    def collect(result):
        writer.writerow(
            [
                state["i"],
                int(result.success),
                result.turns,
                result.total_reward,
                int(result.ent_prov),
                int(result.constr_conf),
                int(result.info_prov),
            ]
        )
        state["i"] += 1

    return fh, collect


@main.command("eval-sim")
@click.option("--checkpoints", type=click.Path(exists=True), default="checkpoints", show_default=True)
@click.option("--domain", default="restaurants", show_default=True)
@click.option("--regime", type=click.Choice(("all",) + REGIMES), default="all", show_default=True)
@click.option("--error-rate", type=float, default=TARGET_ERROR_RATE, show_default=True)
@click.option("--episodes", type=int, default=5000, show_default=True)
@click.option("--seed", type=int, default=2024, show_default=True)
@click.option("--out", type=click.Path(), default="results", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def eval_sim(checkpoints, domain, regime, error_rate, episodes, seed, out, config_path):
    """Greedy simulated evaluation of trained checkpoint pools."""
    cfg = load_config(config_path)
    db = resolve_domain(domain)
    err = replace(cfg.error, error_rate=error_rate)
    regimes = list(REGIMES) if regime == "all" else [regime]
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    summaries = []
    for name in regimes:
        try:
            pool = load_pool(discover_runs(checkpoints, name))
        except FileNotFoundError as exc:
            _fail(exc)
        fh, collect = _episode_writer(out / f"episodes-{name}.csv")
        with fh:
            summary = eval_simulated(
                pool, db, err, episodes, seed=seed, system=name,
                sim_cfg=cfg.simulator, collect=collect,
            )
        summaries.append(summary)
        click.echo(
            f"{name}: success={summary.success_rate:.3f} len={summary.avg_len:.2f} "
            f"reward={summary.avg_reward:.2f}"
        )
    write_summaries(summaries, out / "summary.csv")
    click.echo(f"wrote {out / 'summary.csv'}")


@main.command()
@click.option("--checkpoints", type=click.Path(exists=True), default="checkpoints", show_default=True)
@click.option("--domain", default="restaurants", show_default=True)
@click.option("--rates", default=",".join(str(r) for r in DEFAULT_SWEEP_RATES), show_default=True)
@click.option("--episodes-per-rate", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=2024, show_default=True)
@click.option("--out", type=click.Path(), default="results", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def sweep(checkpoints, domain, rates, episodes_per_rate, seed, out, config_path):
    """Evaluate every regime across a range of semantic error rates."""
    cfg = load_config(config_path)
    db = resolve_domain(domain)
    try:
        rate_list = [float(r) for r in rates.split(",")]
    except ValueError:
        _fail(f"bad --rates value {rates!r}")
    pools = {}
    for name in REGIMES:
        try:
            pools[name] = load_pool(discover_runs(checkpoints, name))
        except FileNotFoundError as exc:
            _fail(exc)
    summaries = error_rate_sweep(
        pools, db, rates=rate_list, n_per_rate=episodes_per_rate,
        seed=seed, sim_cfg=cfg.simulator, base_err=cfg.error,
    )
    out = Path(out)
    write_summaries(summaries, out / "sweep.csv")
    series = {}
    for s in summaries:
        series.setdefault(s.system, {"rates": [], "success_rate": [], "avg_len": [], "avg_reward": []})
        series[s.system]["rates"].append(s.error_rate)
        series[s.system]["success_rate"].append(round(s.success_rate, 4))
        series[s.system]["avg_len"].append(round(s.avg_len, 4))
        series[s.system]["avg_reward"].append(round(s.avg_reward, 4))
    (out / "sweep_plot.json").write_text(json.dumps(series, indent=1))
    click.echo(f"wrote {out / 'sweep.csv'} and {out / 'sweep_plot.json'}")


def _read_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        _fail(f"{path}: empty results file")
    cols = {}
    for key in rows[0]:
        try:
            cols[key] = [float(r[key]) for r in rows]
        except (TypeError, ValueError):
            continue
    return cols


@main.command()
@click.argument("results", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--epsilon", type=float, default=0.10, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--out", type=click.Path(), default="results/stats_report.csv", show_default=True)
def stats(results, epsilon, alpha, out):
    """Pairwise difference and equivalence tests over per-episode or
    questionnaire result files."""
    from mddial.stats import TostSpec, chi_squared_2x2, mann_whitney, tost

    if len(results) < 2:
        _fail("need at least two results files to compare")
    data = {Path(p).stem.replace("episodes-", ""): _read_columns(p) for p in results}
    names = list(data)
    prop_spec = TostSpec(epsilon=epsilon, alpha=alpha, flavor="proportions")
    likert_spec = TostSpec(epsilon=epsilon, alpha=alpha, flavor="likert")
    rows = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            a, b = names[i], names[j]
            shared = [k for k in data[a] if k in data[b]]
            for metric in shared:
                xa, xb = data[a][metric], data[b][metric]
                values = set(xa) | set(xb)
                if metric in ("episode",):
                    continue
                if values <= {0.0, 1.0}:  # proportion metric
                    sa, na = int(sum(xa)), len(xa)
                    sb, nb = int(sum(xb)), len(xb)
                    stat, p = chi_squared_2x2(sa, na, sb, nb)
                    eq = tost((sa, na), (sb, nb), prop_spec)
                    rows.append([metric, a, b, round(eq.delta, 4), "chi2", round(stat, 4), round(p, 6),
                                 "significant" if p < alpha else "ns"])
                    rows.append([metric, a, b, round(eq.delta, 4), "tost-pooled-z", "",
                                 round(eq.p_tost, 6), "equivalent" if eq.equivalent else "not-equivalent"])
                elif values <= set(range(1, 7)) and metric.startswith("q"):  # likert rating
                    u, p = mann_whitney(xa, xb)
                    eq = tost(xa, xb, likert_spec)
                    rows.append([metric, a, b, round(eq.delta, 4), "mann-whitney", round(u, 2), round(p, 6),
                                 "significant" if p < alpha else "ns"])
                    rows.append([metric, a, b, round(eq.delta, 4), "tost-yuen", "",
                                 round(eq.p_tost, 6), "equivalent" if eq.equivalent else "not-equivalent"])
                else:
                    u, p = mann_whitney(xa, xb)
                    delta = sum(xa) / len(xa) - sum(xb) / len(xb)
                    rows.append([metric, a, b, round(delta, 4), "mann-whitney", round(u, 2), round(p, 6),
                                 "significant" if p < alpha else "ns"])
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "system_a", "system_b", "delta", "test", "statistic", "p", "verdict"])
        writer.writerows(rows)
    click.echo(f"wrote {out}")


@main.command("export-questionnaires")
@click.argument("log_file", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
def export_questionnaires(log_file, out):
    """Flatten questionnaire records from a dialogue log into a CSV usable
    by the stats command."""
    rows = []
    with open(log_file, encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            if record.get("kind") == "questionnaire":
                answers = record["answers"]
                rows.append(
                    {
                        "session": record["session"],
                        "q1_subj_succ": int(answers["q1_subj_succ"]),
                        "q2_voice_int": answers["q2_voice_int"],
                        "q3_understand": answers["q3_understand"],
                        "q4_as_expect": answers["q4_as_expect"],
                        "q5_would_use": answers["q5_would_use"],
                    }
                )
    if not rows:
        _fail(f"no questionnaire records in {log_file}")
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    click.echo(f"wrote {out} ({len(rows)} questionnaires)")


def _make_service(checkpoints, regime, domain, noise, seed, log, config_path):
    from mddial.session import DialogueService

    cfg = load_config(config_path)
    db = resolve_domain(domain)
    pool = load_pool(discover_runs(checkpoints, regime))
    return DialogueService(
        pool, db, log_path=log, seed=seed, inject_noise=noise,
        err=cfg.error, sim_cfg=cfg.simulator,
    )


@main.command()
@click.option("--checkpoints", type=click.Path(exists=True), default="checkpoints", show_default=True)
@click.option("--regime", type=click.Choice(REGIMES), default=REGIME_MULTI_DIM, show_default=True)
@click.option("--domain", default="restaurants", show_default=True)
@click.option("--noise/--no-noise", default=False, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--log", type=click.Path(), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def chat(checkpoints, regime, domain, noise, seed, log, config_path):
    """Terminal REPL over a local dialogue session."""
    try:
        service = _make_service(checkpoints, regime, domain, noise, seed, log, config_path)
    except Exception as exc:
        _fail(exc)
    session_id, task_text, greeting = service.open_session()
    click.echo(f"Your task: {task_text}")
    click.echo(f"System: {greeting}")
    while True:
        try:
            text = click.prompt("You", prompt_suffix="> ")
        except (EOFError, click.Abort):
            click.echo("\n(aborted)")
            return
        system_text, acts, finished = service.turn(session_id, text)
        click.echo(f"System: {system_text}")
        click.echo(f"        [{'; '.join(acts)}]")
        if finished:
            click.echo("(dialogue finished)")
            return


@main.command()
@click.option("--checkpoints", type=click.Path(exists=True), default="checkpoints", show_default=True)
@click.option("--regime", type=click.Choice(REGIMES), default=REGIME_MULTI_DIM, show_default=True)
@click.option("--domain", default="restaurants", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--noise/--no-noise", default=False, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--log", type=click.Path(), default="results/dialogues.jsonl", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(checkpoints, regime, domain, port, host, noise, seed, log, config_path):
    """Start the HTTP dialogue service for human evaluation."""
    import uvicorn

    from mddial.service import create_app

    try:
        service = _make_service(checkpoints, regime, domain, noise, seed, log, config_path)
    except Exception as exc:
        _fail(exc)
    uvicorn.run(create_app(service), host=host, port=port)


if __name__ == "__main__":
    main()
