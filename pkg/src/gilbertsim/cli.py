"""Command-line front end: simulate, predict, verify, covariogram.

Config files are flat `key = value` lines with `#` comments; flags override
config values. Seed precedence: --seed flag, then GILBERT_SEED, then config,
then 0. Exit codes: 0 success (all verdicts pass), 1 failed verdicts,
2 usage/config errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .errors import ConfigError, GilbertSimError
from .experiments import (VERIFICATION_KINDS, DEFAULT_TOLERANCES,
                          ExperimentConfig, ldi_table_to_csv,
                          replications_to_csv, report_to_json,
                          run_replications, run_verification)
from .geometry import ConvexWindow, covariogram, covariogram_is_exact
from .gilbert_graph import build_edges
from .point_process import replication_rng, sample_binomial, sample_poisson
from .theory_moments import (RegimeSchedule, TheoryPrediction,
                             covariance_exact, expectation_bounds,
                             expectation_exact, sigma_matrix,
                             variance_asymptotic)

_CONFIG_KEYS = ("window", "dim", "model", "t", "n", "t_grid", "schedule",
                "delta", "alphas", "reps", "seed", "kind", "n_jobs")


def parse_window(text: str, dim: int | None = None) -> ConvexWindow:
    """box:1x1, box:2x1x0.5, ball:1.0@d=3 (or ball:R with an explicit dim)."""
    try:
        kind, _, rest = text.partition(":")
        if kind == "box" and rest:
            return ConvexWindow.box([float(s) for s in rest.split("x")])
        if kind == "ball" and rest:
            radius, _, dpart = rest.partition("@")
            if dpart:
                if not dpart.startswith("d="):
                    raise ValueError("ball dimension must look like @d=3")
                d = int(dpart[2:])
            elif dim is not None:
                d = int(dim)
            else:
                raise ValueError("ball window needs @d=<dim> or an explicit dim")
            return ConvexWindow.ball(float(radius), d)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad window {text!r}: {exc}") from None
    raise ConfigError(f"bad window {text!r}: expected box:<s1>x<s2>... or ball:<r>@d=<dim>")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in str(text).split(","))


def canonical_kind(text: str) -> str:
    for kind in VERIFICATION_KINDS:
        if kind.lower() == text.lower():
            return kind
    raise ConfigError(f"unknown kind {text!r}; choose one of {', '.join(VERIFICATION_KINDS)}")


def load_config(path: str) -> dict:
    """Flat key=value file -> raw dict; duplicate/unknown keys are errors."""
    raw: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {text!r}")
        key, _, value = text.partition("=")
        key = key.strip()
        value = value.strip()
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        if key not in _CONFIG_KEYS and not key.startswith("tol_"):
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key.startswith("tol_") and key[4:] not in DEFAULT_TOLERANCES:
            raise ConfigError(f"{path}:{lineno}: unknown tolerance key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for key {key!r}")
        raw[key] = value
    return raw


def serialize_config(config: ExperimentConfig) -> str:
    """Flat-file form of a resolved config; parse(serialize(.)) round-trips."""
    lines = [f"window = {config.window.label()}",
             f"model = {config.model}",
             f"alphas = {','.join(repr(a) for a in config.alphas)}",
             f"reps = {config.replications}",
             f"seed = {config.master_seed}",
             f"kind = {config.kind}"]
    if config.t is not None:
        lines.append(f"t = {config.t!r}")
    if config.n is not None:
        lines.append(f"n = {config.n}")
    if config.t_grid:
        lines.append(f"t_grid = {','.join(repr(t) for t in config.t_grid)}")
    if config.schedule is not None:
        lines.append(f"schedule = {config.schedule.a!r},{config.schedule.gamma!r}")
    if config.delta is not None:
        lines.append(f"delta = {config.delta!r}")
    if config.n_jobs != 1:
        lines.append(f"n_jobs = {config.n_jobs}")
    for key in sorted(config.tolerances):
        lines.append(f"tol_{key} = {config.tolerances[key]!r}")
    return "\n".join(lines) + "\n"


def resolve_config(raw: dict, args: argparse.Namespace) -> ExperimentConfig:
    """Merge config-file values and flags (flags win) into an ExperimentConfig."""
    def pick(flag_value, key):
        return flag_value if flag_value is not None else raw.get(key)

    dim = pick(getattr(args, "dim", None), "dim")
    dim = int(dim) if dim is not None else None
    window_text = pick(getattr(args, "window", None), "window")
    if window_text is None:
        raise ConfigError("missing required key 'window'")
    window = parse_window(str(window_text), dim)

    model = raw.get("model")
    t = pick(getattr(args, "t", None), "t")
    n = pick(getattr(args, "n", None), "n")
    if getattr(args, "t", None) is not None:
        model = "poisson"
    if getattr(args, "n", None) is not None:
        model = model or "binomial"
    if model is None:
        model = "poisson" if (t is not None or raw.get("t_grid")) else ("binomial" if n else None)
    if model is None:
        raise ConfigError("missing required key 'model' (or t / n)")
    t_grid = pick(getattr(args, "t_grid", None), "t_grid")
    schedule_text = pick(getattr(args, "schedule", None), "schedule")
    schedule = None
    if schedule_text is not None:
        parts = _parse_floats(schedule_text)
        if len(parts) != 2:
            raise ConfigError("schedule must be 'a,gamma'")
        schedule = RegimeSchedule(a=parts[0], gamma=parts[1])
    delta = pick(getattr(args, "delta", None), "delta")
    alphas_text = pick(getattr(args, "alpha", None), "alphas")
    if alphas_text is None:
        raise ConfigError("missing required key 'alphas'")
    reps = pick(getattr(args, "reps", None), "reps")
    if reps is None:
        raise ConfigError("missing required key 'reps'")

    seed = getattr(args, "seed", None)
    if seed is None:
        env = os.environ.get("GILBERT_SEED")
        if env is not None:
            try:
                seed = int(env)
            except ValueError:
                raise ConfigError(f"GILBERT_SEED must be an integer, got {env!r}") from None
        elif "seed" in raw:
            seed = raw["seed"]
        else:
            seed = 0

    kind_text = pick(getattr(args, "kind", None), "kind")
    kind = canonical_kind(str(kind_text)) if kind_text is not None else "Moments"
    tolerances = {}
    for key, value in raw.items():
        if key.startswith("tol_"):
            tolerances[key[4:]] = float(value)
    n_jobs = raw.get("n_jobs", 1)

    try:
        return ExperimentConfig(
            window=window, model=str(model),
            alphas=_parse_floats(alphas_text),
            replications=int(reps), master_seed=int(seed), kind=kind,
            t=float(t) if t is not None else None,
            n=int(n) if n is not None else None,
            t_grid=_parse_floats(t_grid) if t_grid is not None else None,
            schedule=schedule,
            delta=float(delta) if delta is not None else None,
            tolerances=tolerances, n_jobs=int(n_jobs))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from None


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args: argparse.Namespace) -> int:
    raw = load_config(args.config) if args.config else {}
    config = resolve_config(raw, args)
    stats = run_replications(config, order_stat_count=5)
    _write_or_print(replications_to_csv(stats, config.alphas), args.out)
    if args.edges_out:
        rng = replication_rng(config.master_seed, 0)
        intensity = config.t if config.model == "poisson" else config.n
        if config.model == "poisson":
            sample = sample_poisson(config.window, float(intensity), rng)
        else:
            sample = sample_binomial(config.window, int(intensity), rng)
        edges = build_edges(sample, config.delta_for(float(intensity)))
        lines = ["i,j,length"]
        lines += [f"{i},{j},{l!r}" for i, j, l in edges.edges]
        with open(args.edges_out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def _predictions(config: ExperimentConfig) -> list[TheoryPrediction]:
    t = config.t if config.t is not None else float(config.n)
    delta = config.delta_for(t)
    window = config.window
    params = {"window": window.label(), "t": t, "delta": delta}
    preds = []
    for alpha in config.alphas:
        p = dict(params, alpha=alpha)
        preds.append(TheoryPrediction(
            name=f"expectation[alpha={alpha}]",
            value=expectation_exact(window, t, delta, alpha), params=p,
            anchor="mean: closed-form radial covariogram integral"))
        preds.append(TheoryPrediction(
            name=f"expectation_bounds[alpha={alpha}]",
            value=expectation_bounds(window, t, delta, alpha), params=p,
            anchor="mean sandwich: volume and surface-correction bounds"))
        preds.append(TheoryPrediction(
            name=f"variance_asymptotic[alpha={alpha}]",
            value=variance_asymptotic(window, t, delta, alpha), params=p,
            anchor="leading-order variance"))
    for i, a in enumerate(config.alphas):
        for b in config.alphas[i:]:
            preds.append(TheoryPrediction(
                name=f"covariance[{a},{b}]",
                value=covariance_exact(window, t, delta, a, b),
                params=dict(params, alpha=a, beta=b),
                anchor="covariance: quadrature of the two-point moment split"))
    if config.schedule is not None and len(config.alphas) >= 2:
        sig = sigma_matrix(config.alphas, window.dim, window.volume, config.schedule)
        preds.append(TheoryPrediction(
            name="sigma_matrix", value=sig.tolist(),
            params=dict(params, alphas=list(config.alphas),
                        regime=config.schedule.classify(window.dim)),
            anchor="asymptotic covariance matrix by regime"))
    return preds


def cmd_predict(args: argparse.Namespace) -> int:
    raw = load_config(args.config) if args.config else {}
    if "reps" not in raw and args.reps is None:
        args.reps = 2  # predictions do not simulate; satisfy config invariant
    config = resolve_config(raw, args)
    preds = _predictions(config)
    payload = [{"name": p.name, "value": p.value, "params": p.params,
                "paper_anchor": p.anchor, "estimated": p.estimated}
               for p in preds]
    _write_or_print(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    raw = load_config(args.config) if args.config else {}
    config = resolve_config(raw, args)
    report = run_verification(config)
    _write_or_print(report_to_json(report), args.out)
    if report.tables:
        base = args.out or "report"
        for name, table in sorted(report.tables.items()):
            path = f"{base}.{name}.csv"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(ldi_table_to_csv(table))
    print(f"verdicts: {sum(m.verdict for m in report.metrics)}/{len(report.metrics)} pass",
          file=sys.stderr)
    return 0 if report.passed else 1


def cmd_covariogram(args: argparse.Namespace) -> int:
    window = parse_window(args.window, args.dim)
    direction = np.array(_parse_floats(args.direction), dtype=float)
    if direction.size != window.dim:
        raise ConfigError(f"direction must have {window.dim} coordinates")
    norm = float(np.linalg.norm(direction))
    if norm == 0:
        raise ConfigError("direction must be nonzero")
    direction = direction / norm
    rmax = args.rmax if args.rmax is not None else window.diameter
    estimated = int(not covariogram_is_exact(window))
    lines = ["r,covariogram,estimated"]
    for r in np.linspace(0.0, rmax, args.steps):
        val = covariogram(window, r * direction, mc_samples=args.mc_samples)
        lines.append(f"{float(r)!r},{val!r},{estimated}")
    _write_or_print("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gilbertsim",
        description="Gilbert graph simulation and closed-form theory verification")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_kind=False):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--window", help="box:1x1 | box:2x1x0.5 | ball:1.0@d=3")
        p.add_argument("--dim", type=int, help="dimension for ball:<r> windows")
        p.add_argument("--t", type=float, help="Poisson intensity")
        p.add_argument("--n", type=int, help="binomial point count")
        p.add_argument("--t-grid", dest="t_grid", help="comma list of intensities")
        p.add_argument("--delta", type=float, help="distance parameter")
        p.add_argument("--schedule", help="a,gamma for delta_t = a * t^-gamma")
        p.add_argument("--alpha", help="comma list of length-power exponents")
        p.add_argument("--reps", type=int, help="number of replications")
        p.add_argument("--seed", type=int, help="master seed (beats GILBERT_SEED)")
        p.add_argument("--out", help="output path (default: stdout)")
        if with_kind:
            p.add_argument("--kind", help="|".join(VERIFICATION_KINDS))

    p_sim = sub.add_parser("simulate", help="dump per-replication statistics as CSV")
    common(p_sim)
    p_sim.add_argument("--edges-out", dest="edges_out",
                       help="also dump replication 0's edges as i,j,length CSV")
    p_sim.set_defaults(func=cmd_simulate)

    p_pred = sub.add_parser("predict", help="print closed-form predictions as JSON")
    common(p_pred)
    p_pred.set_defaults(func=cmd_predict)

    p_ver = sub.add_parser("verify", help="run a Monte Carlo verification suite")
    common(p_ver, with_kind=True)
    p_ver.set_defaults(func=cmd_verify)

    p_cov = sub.add_parser("covariogram", help="tabulate the covariogram along a direction")
    p_cov.add_argument("--window", required=True)
    p_cov.add_argument("--dim", type=int)
    p_cov.add_argument("--direction", required=True, help="comma vector, e.g. 1,0")
    p_cov.add_argument("--rmax", type=float)
    p_cov.add_argument("--steps", type=int, default=101)
    p_cov.add_argument("--mc-samples", dest="mc_samples", type=int, default=1_000_000)
    p_cov.add_argument("--out")
    p_cov.set_defaults(func=cmd_covariogram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GilbertSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
