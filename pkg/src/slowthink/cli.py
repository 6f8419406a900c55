"""Command-line front door.

Subcommands: bounds, simulate, fano-suite, calibrate, hsic, fit, reproduce.
Every run resolves one configuration dict (JSON config file values overridden
by explicit flags), emits CSV plus a JSON manifest recording the resolved
configuration, and exits 0 only when all requested checks pass.
"""

from __future__ import annotations

import argparse
import csv as _csv
import json
import math
import sys
import time

import numpy as np

from . import __version__, bounds, calibration, hsic, info_theory, reporting, simulate
from .errors import SlowthinkError, ValidationError
from .models import DecayModel, SelectorModel, WrongModel

_BOUND_STRATEGIES = (
    "single",
    "beam-exact",
    "beam-simplified",
    "bon",
    "mcts-best",
    "mcts-worst",
    "lookahead",
)

# Reference tree-search statistics (avg_b, avg_p, avg_L) and previously
# published budget-matched N values for the calibration preset.
CALIBRATION_REFERENCE = (
    ("gsm8k", 4.26, 4.54, 3.11, 19.40, 6.23),
    ("prontoqa", 1.67, 9.45, 4.00, 15.77, 3.94),
    ("game24", 4.56, 3.99, 3.00, 18.24, 6.08),
)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValidationError("config file must hold a JSON object")
    return cfg


def _resolve(config: dict, **flags) -> dict:
    resolved = dict(config)
    for key, value in flags.items():
        if value is not None:
            resolved[key] = value
    return resolved


def _parse_selector(text: str) -> dict:
    name, _, params = text.partition(":")
    if name == "ideal":
        return {"kind": "ideal"}
    if name == "constant":
        return {"kind": "constant", "epsilon": float(params)}
    if name in ("noisy", "noisy_score"):
        margin, noise = params.split(",")
        return {"kind": "noisy_score", "margin": float(margin), "noise_std": float(noise)}
    raise ValidationError(
        f"selector must be ideal, constant:EPS or noisy:MARGIN,STD; got {text!r}"
    )


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _parse_ints(text: str) -> list[int]:
    if ":" in text:
        parts = [int(v) for v in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(lo, hi + 1, step))
    return [int(v) for v in text.split(",") if v != ""]


def _decay_from(resolved: dict) -> DecayModel:
    return DecayModel.from_config(resolved.get("decay", {"lambda_tau": 1.0}))


def _selector_from(resolved: dict) -> SelectorModel:
    return SelectorModel.from_config(resolved.get("selector", {"kind": "ideal"}))


class _RunOutput:
    def __init__(self, header, rows, ok=True, summary=""):
        self.header = header
        self.rows = rows
        self.ok = ok
        self.summary = summary


# ---------------------------------------------------------------------------
# Subcommand bodies: resolved config dict -> _RunOutput
# ---------------------------------------------------------------------------


def _cmd_bounds(resolved: dict) -> _RunOutput:
    decay = _decay_from(resolved)
    selector = _selector_from(resolved)
    L = int(resolved.get("L", 1))
    k = int(resolved.get("k", 1))
    b = int(resolved.get("b", 1))
    N = int(resolved.get("N", 1))
    wanted = resolved.get("strategy", "single")
    names = list(_BOUND_STRATEGIES[:-1]) if wanted == "all" else [wanted]
    lam = decay.lambda_tau if decay.kind == "exponential" else float("nan")
    eps_kind = selector.kind
    rows = []
    for name in names:
        if name == "single":
            value = bounds.single_path_bound(decay, L)
        elif name == "beam-exact":
            value = bounds.width_expansion_bound_exact(decay, selector, L, k, b)
        elif name == "beam-simplified":
            value = bounds.width_expansion_bound_simplified(decay, selector, L, k, b)
        elif name == "bon":
            value = bounds.bon_bound(decay, selector, L, N)
        elif name == "mcts-best":
            value = bounds.mcts_best_bound(decay, selector, L, b)
        elif name == "mcts-worst":
            value = bounds.mcts_worst_bound(decay, selector, L, b)
        elif name == "lookahead":
            wrong = WrongModel(float(resolved["lambda_delta"]))
            depth = float(resolved.get("depth", L))
            value = bounds.lookahead_distinguishability_bound(lam, wrong, depth)
        else:
            raise ValidationError(
                f"strategy must be one of {_BOUND_STRATEGIES} or 'all', got {name!r}"
            )
        rows.append(
            (name, lam, L, k, b, N, eps_kind, value, bounds.is_vacuous(value))
        )
    header = ("strategy", "lambda_tau", "L", "k", "b", "N", "epsilon_kind", "bound", "vacuous")
    return _RunOutput(header, rows)


def _simulate_one(cfg, spec, trials, seed):
    report = simulate.monte_carlo(cfg, spec, trials, seed)
    bound = simulate.matching_bound(cfg, spec)
    if bound is None:
        verify = ""
        vacuous = ""
    else:
        verify = "pass" if simulate.verify_bounds(report, bound) else "fail"
        vacuous = bounds.is_vacuous(bound)
    return report, bound, vacuous, verify


def _cmd_simulate(resolved: dict) -> _RunOutput:
    cfg = simulate.ProcessConfig.from_config(resolved)
    strategy_cfg = resolved["strategy"]
    trials = int(resolved.get("trials", 10_000))
    seed = int(resolved.get("seed", 0))
    sweep = resolved.get("sweep")
    if sweep:
        specs = [
            simulate.StrategySpec.from_config({**strategy_cfg, sweep["param"]: value})
            for value in sweep["values"]
        ]
    else:
        specs = [simulate.StrategySpec.from_config(strategy_cfg)]
    header = (
        "strategy", "rule", "N", "k", "b", "gamma", "trials", "seed",
        "estimate", "ci_low", "ci_high", "mean_steps", "mean_calls",
        "bound", "vacuous", "verify",
    )
    rows = []
    ok = True
    for spec in specs:
        report, bound, vacuous, verify = _simulate_one(cfg, spec, trials, seed)
        ok = ok and verify != "fail"
        rows.append(
            (
                spec.kind, spec.rule or "", spec.N or "", spec.k or "",
                spec.b or "", "" if spec.gamma is None else spec.gamma,
                trials, seed, report.estimate, report.ci_low, report.ci_high,
                report.mean_steps, report.mean_calls,
                "" if bound is None else bound, vacuous, verify,
            )
        )
    plot_path = resolved.get("plot")
    if plot_path and sweep:
        xs = [float(v) for v in sweep["values"]]
        est = [r[8] for r in rows]
        series = [(xs, est)]
        labels = ["estimate"]
        if all(r[13] != "" for r in rows):
            series.append((xs, [min(1.0, r[13]) for r in rows]))
            labels.append("bound (clipped at 1)")
        reporting.emit_plot(
            series, labels, plot_path,
            title=f"{strategy_cfg['kind']} sweep over {sweep['param']}",
            xlabel=sweep["param"], ylabel="success probability",
        )
    return _RunOutput(header, rows, ok=ok)


def _cmd_fano_suite(resolved: dict) -> _RunOutput:
    instances = int(resolved.get("instances", 1000))
    support = (int(resolved.get("support_min", 3)), int(resolved.get("support_max", 6)))
    max_len = int(resolved.get("max_L", 8))
    seed = int(resolved.get("seed", 0))
    assumption = resolved.get("assumption", "both")
    if assumption not in ("both", "mi-only"):
        raise ValidationError(f"assumption must be 'both' or 'mi-only', got {assumption!r}")
    result = info_theory.fano_suite(
        instances=instances,
        support_range=support,
        max_len=max_len,
        seed=seed,
        require_entropy_condition=assumption == "both",
    )
    header = (
        "sequence", "l", "map_error", "lower_bound", "h_b",
        "mi_nonincreasing", "entropy_condition", "defined", "holds",
    )
    rows = [
        (
            idx, rep.l, rep.lhs, rep.rhs, rep.h_b,
            rep.assumption_holds, rep.entropy_condition, rep.defined, rep.holds,
        )
        for idx, rep in result.reports
    ]
    summary = (
        f"fano-suite: instances={result.instances} checks={result.checks} "
        f"violations={result.violations} -> "
        f"{'PASS' if result.passed else 'FAIL'}"
    )
    return _RunOutput(header, rows, ok=result.passed, summary=summary)


def _cmd_calibrate(resolved: dict) -> _RunOutput:
    if "stats" in resolved and resolved["stats"] is not None:
        b, p, L = (float(v) for v in resolved["stats"])
        stats = calibration.TraceStats(avg_b=b, avg_p=p, avg_L=L)
    elif "traces" in resolved and resolved["traces"]:
        stats = calibration.ingest_traces(resolved["traces"])
    else:
        raise ValidationError("calibrate requires --stats b,p,L or --traces FILE")
    rng = calibration.reasonable_n_range(stats)
    n_lo, n_hi = calibration.integer_candidates(rng)
    header = (
        "avg_b", "avg_p", "avg_L", "n_call", "n_res",
        "n_int_low", "n_int_high", "inverted",
    )
    rows = [
        (
            stats.avg_b, stats.avg_p, stats.avg_L,
            calibration.n_call(stats), calibration.n_res(stats),
            n_lo, n_hi, rng.inverted,
        )
    ]
    summary = (
        f"calibrate: N_call={calibration.n_call(stats):.9g} "
        f"N_res={calibration.n_res(stats):.9g} "
        f"reasonable integer N in [{n_lo}, {n_hi}]"
        + (" (range inverted: avg_L < 1)" if rng.inverted else "")
    )
    return _RunOutput(header, rows, summary=summary)


def _read_feature_csv(path) -> hsic.SampleSet:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty feature file (header row required)")
        cols = [c.strip().lower() for c in header]
        group_idx = cols.index("group") if "group" in cols else None
        length_idx = cols.index("length") if "length" in cols else None
        special = {group_idx, length_idx} - {None}
        feature_idx = [i for i in range(len(cols)) if i not in special]
        groups, lengths, vectors = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(cols):
                raise ValidationError(
                    f"{path}:{lineno}: expected {len(cols)} columns, got {len(row)}"
                )
            if group_idx is not None:
                groups.append(row[group_idx])
            if length_idx is not None:
                lengths.append(float(row[length_idx]))
            vectors.append([float(row[i]) for i in feature_idx])
    return hsic.SampleSet(
        vectors=np.asarray(vectors, dtype=np.float64),
        group_ids=tuple(groups) if group_idx is not None else None,
        lengths=tuple(lengths) if length_idx is not None else None,
    )


def _cmd_hsic(resolved: dict) -> _RunOutput:
    x = _read_feature_csv(resolved["x"])
    y = _read_feature_csv(resolved["y"])
    cfg = hsic.HsicConfig(sigma=float(resolved.get("sigma", hsic.DEFAULT_SIGMA)))
    value = hsic.hsic(x, y, cfg)
    mean_length = resolved.get("mean_length")
    if mean_length is None and resolved.get("per_token"):
        mean_length = x.mean_length() or y.mean_length()
        if mean_length is None:
            raise ValidationError(
                "--per-token needs a 'length' column in a feature file "
                "or an explicit --mean-length"
            )
    per_token = (
        hsic.per_token_hsic(value, float(mean_length))
        if mean_length is not None
        else ""
    )
    perm_count = int(resolved.get("permutation_test", 0) or 0)
    seed = int(resolved.get("seed", 0))
    p95 = pvalue = ""
    if perm_count:
        null = hsic.permutation_null(x, y, cfg, count=perm_count, seed=seed)
        p95 = float(np.quantile(null, 0.95))
        pvalue = float((null >= value).mean())
        svg_path = resolved.get("svg")
        if svg_path:
            ordered = np.sort(null)
            quantiles = [(i + 0.5) / perm_count for i in range(perm_count)]
            reporting.emit_plot(
                [(list(ordered), quantiles)],
                ["shuffled-pairing null"],
                svg_path,
                title="dependence statistic vs permutation null",
                xlabel="statistic",
                ylabel="null quantile",
                vlines=[(value, "observed"), (p95, "null p95")],
                markers=False,
            )
    header = (
        "n", "sigma", "hsic", "mean_length", "per_token_hsic",
        "perm_count", "perm_p95", "perm_pvalue",
    )
    rows = [
        (
            x.n, cfg.sigma, value,
            "" if mean_length is None else float(mean_length), per_token,
            perm_count or "", p95, pvalue,
        )
    ]
    return _RunOutput(header, rows)


def _read_points_csv(
    path, x_col: str | None = None, y_col: str | None = None
) -> list[tuple[float, float]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty points file (header row required)")
        # default: first two columns; named columns let any emitted CSV be
        # re-ingested as (x, y) points
        xi, yi = 0, 1
        if x_col is not None or y_col is not None:
            try:
                xi = header.index(x_col) if x_col is not None else 0
                yi = header.index(y_col) if y_col is not None else 1
            except ValueError as exc:
                raise ValidationError(f"{path}: {exc}; header is {header}")
        pts = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) <= max(xi, yi):
                raise ValidationError(f"{path}:{lineno}: missing x/y columns")
            pts.append((float(row[xi]), float(row[yi])))
    return pts


def _cmd_fit(resolved: dict) -> _RunOutput:
    points = _read_points_csv(
        resolved["points"], resolved.get("x_col"), resolved.get("y_col")
    )
    exp_fit, lin_fit = hsic.fit_decay(points)
    header = ("model", "param_1", "param_2", "r2")
    rows = [
        ("exponential_decay", exp_fit.params[0], exp_fit.params[1], exp_fit.r2),
        ("linear", lin_fit.params[0], lin_fit.params[1], lin_fit.r2),
    ]
    svg_path = resolved.get("svg")
    if svg_path:
        xs = sorted(p[0] for p in points)
        grid = [xs[0] + (xs[-1] - xs[0]) * i / 99 for i in range(100)]
        reporting.emit_plot(
            [
                ([p[0] for p in points], [p[1] for p in points]),
                (grid, list(exp_fit.predict(grid))),
                (grid, list(lin_fit.predict(grid))),
            ],
            ["data", "exponential fit", "linear fit"],
            svg_path,
            title="decay fit",
            xlabel="mean length",
            ylabel="value",
        )
    summary = (
        f"fit: exponential r2={exp_fit.r2:.6g}, linear r2={lin_fit.r2:.6g}, "
        f"{'exponential' if exp_fit.r2 > lin_fit.r2 else 'linear'} fits better"
    )
    return _RunOutput(header, rows, summary=summary)


# ---------------------------------------------------------------------------
# reproduce presets
# ---------------------------------------------------------------------------


def _preset_table1(resolved: dict) -> _RunOutput:
    b = int(resolved.get("b", 4))
    L = int(resolved.get("L", 2))
    best, worst = bounds.cost_table(b, L)
    header = ("case", "b", "L", "bon_cost", "mcts_cost")
    rows = [
        ("best", b, L, best.bon_cost, best.mcts_cost),
        ("worst", b, L, worst.bon_cost, worst.mcts_cost),
    ]
    return _RunOutput(header, rows)


def _preset_calibration(resolved: dict) -> _RunOutput:
    header = (
        "task", "avg_b", "avg_p", "avg_L", "n_call", "n_res",
        "published_n_call", "published_n_res", "rel_err_call", "rel_err_res",
    )
    rows = []
    ok = True
    for task, b, p, L, pub_call, pub_res in CALIBRATION_REFERENCE:
        stats = calibration.TraceStats(avg_b=b, avg_p=p, avg_L=L)
        call = calibration.n_call(stats)
        res = calibration.n_res(stats)
        err_call = abs(call - pub_call) / pub_call
        err_res = abs(res - pub_res) / pub_res
        ok = ok and err_call <= 0.01 and err_res <= 0.01
        rows.append((task, b, p, L, call, res, pub_call, pub_res, err_call, err_res))
    summary = (
        "calibration reference reproduced within 1%"
        if ok
        else "calibration reference NOT within 1%"
    )
    return _RunOutput(header, rows, ok=ok, summary=summary)


def _preset_nmin(resolved: dict) -> _RunOutput:
    b_values = resolved.get("b_values", [2, 3, 4])
    L_values = resolved.get("L_values", [1, 2, 3, 4, 5])
    header = ("b", "L", "case", "n_min", "equality_solution", "rel_err")
    rows = []
    ok = True
    for b in b_values:
        for L in L_values:
            for case in ("best", "worst"):
                value = bounds.n_min(int(b), int(L), case)
                expected = float(b) if case == "best" else float(b) ** ((L + 1) / 2)
                err = abs(value - expected) / expected
                ok = ok and err <= 1e-9
                rows.append((b, L, case, value, expected, err))
    return _RunOutput(header, rows, ok=ok)


def _preset_gamma_sweep(resolved: dict) -> _RunOutput:
    lambda_tau = float(resolved.get("lambda_tau", 1.0))
    wrong = WrongModel(float(resolved.get("lambda_delta", math.e**3 / 2)))
    layer = int(resolved.get("layer", 1))
    gammas = resolved.get("gammas", list(range(0, 7)))
    trials = int(resolved.get("trials", 100_000))
    seed = int(resolved.get("seed", 0))
    gamma_star = bounds.optimal_rollout(wrong, layer)
    results = simulate.lookahead_gamma_sweep(
        lambda_tau, wrong, layer, gammas, trials, seed
    )
    best_gamma = max(results, key=lambda item: item[1].estimate)[0]
    header = (
        "gamma", "estimate", "ci_low", "ci_high", "lower_bound", "gamma_star",
    )
    rows = []
    for g, rep in results:
        depth = layer + g
        lb = bounds.lookahead_distinguishability_bound(lambda_tau, wrong, depth)
        rows.append((g, rep.estimate, rep.ci_low, rep.ci_high, lb, gamma_star))
    ok = abs(best_gamma - gamma_star) <= 1.0
    summary = (
        f"gamma-sweep: empirical peak at gamma={best_gamma}, "
        f"analytic optimum {gamma_star:.6g} -> {'PASS' if ok else 'FAIL'}"
    )
    return _RunOutput(header, rows, ok=ok, summary=summary)


def _preset_dominance(resolved: dict) -> _RunOutput:
    trials = int(resolved.get("trials", 100_000))
    seed = int(resolved.get("seed", 31_000))
    header = (
        "lambda_tau", "L", "strategy", "estimate", "ci_low", "ci_high",
        "bound", "vacuous", "verify",
    )
    rows = []
    ok = True
    for lam in (0.5, 1.0):
        for L in (2, 3, 5):
            cfg = simulate.ProcessConfig(
                decay=DecayModel.exponential(lam),
                selector=SelectorModel.ideal(),
                L=L,
            )
            specs = [simulate.StrategySpec.single_path()]
            specs += [
                simulate.StrategySpec.beam(k, b) for k, b in ((2, 2), (4, 2), (4, 4))
            ]
            specs += [
                simulate.StrategySpec.bon(n, simulate.ORM_MAX) for n in (2, 4, 8, 16)
            ]
            specs += [simulate.StrategySpec.mcts_best(b) for b in (2, 4)]
            specs += [simulate.StrategySpec.mcts_worst(2)]
            for spec in specs:
                seed += 1
                report, bound, vacuous, verify = _simulate_one(cfg, spec, trials, seed)
                ok = ok and verify == "pass"
                rows.append(
                    (
                        lam, L, spec.describe(), report.estimate, report.ci_low,
                        report.ci_high, bound, vacuous, verify,
                    )
                )
    summary = (
        f"dominance: {len(rows)} configurations -> {'PASS' if ok else 'FAIL'}"
    )
    return _RunOutput(header, rows, ok=ok, summary=summary)


def _preset_bon_vs_mcts(resolved: dict) -> _RunOutput:
    b = int(resolved.get("b", 2))
    L = int(resolved.get("L", 3))
    trials = int(resolved.get("trials", 100_000))
    seed = int(resolved.get("seed", 0))
    margin = float(resolved.get("margin", 1.0))
    noise = float(resolved.get("noise_std", 0.25))
    cfg = simulate.ProcessConfig(
        decay=DecayModel.exponential(float(resolved.get("lambda_tau", 1.0))),
        selector=SelectorModel.noisy_score(margin, noise),
        answer=simulate.AnswerModel(int(resolved.get("answer_space_size", 100))),
        L=L,
        score_noise_std=noise,
    )
    envelope = simulate.monte_carlo(cfg, simulate.StrategySpec.mcts_worst(b), trials, seed)
    stats = calibration.traces_to_stats([calibration.complete_tree_trace(b, L)])
    rng = calibration.reasonable_n_range(stats)
    n_lo, n_hi = calibration.integer_candidates(rng)
    matched = int(round((rng.low + rng.high) / 2))
    header = (
        "strategy", "N", "estimate", "ci_low", "ci_high",
        "mean_calls", "n_res", "n_call", "gap_vs_envelope",
    )
    rows = [
        (
            "mcts_worst", "", envelope.estimate, envelope.ci_low, envelope.ci_high,
            envelope.mean_calls, rng.low, rng.high, 0.0,
        )
    ]
    sweep_n = sorted({n_lo, matched, n_hi})
    xs, ys = [], []
    ok = True
    for n in sweep_n:
        rep = simulate.monte_carlo(
            cfg, simulate.StrategySpec.bon(n, simulate.ORM_MAX), trials, seed + n
        )
        gap = abs(rep.estimate - envelope.estimate)
        if n == matched:
            ok = gap <= 0.02
        rows.append(
            (
                "bon", n, rep.estimate, rep.ci_low, rep.ci_high,
                rep.mean_calls, rng.low, rng.high, gap,
            )
        )
        xs.append(float(n))
        ys.append(rep.estimate)
    plot_path = resolved.get("plot")
    if plot_path:
        reporting.emit_plot(
            [(xs, ys), ([xs[0], xs[-1]], [envelope.estimate, envelope.estimate])],
            ["best-of-n", "tree-search envelope"],
            plot_path,
            title=f"budget-matched comparison (b={b}, L={L})",
            xlabel="N",
            ylabel="success probability",
            vlines=[(rng.low, "N_res"), (rng.high, "N_call")],
        )
    summary = (
        f"bon-vs-mcts: matched N={matched}, gap at matched N <= 0.02 -> "
        f"{'PASS' if ok else 'FAIL'}"
    )
    return _RunOutput(header, rows, ok=ok, summary=summary)


_COMMANDS = {
    "bounds": _cmd_bounds,
    "simulate": _cmd_simulate,
    "fano-suite": _cmd_fano_suite,
    "calibrate": _cmd_calibrate,
    "hsic": _cmd_hsic,
    "fit": _cmd_fit,
}

_PRESETS = {
    "table1": _preset_table1,
    "calibration": _preset_calibration,
    "nmin": _preset_nmin,
    "gamma-sweep": _preset_gamma_sweep,
    "bon-vs-mcts": _preset_bon_vs_mcts,
    "dominance": _preset_dominance,
    "fano": _cmd_fano_suite,
}


def _emit(command: str, resolved: dict, output: _RunOutput, args) -> int:
    elapsed = time.perf_counter() - resolved.get("_t0", time.perf_counter())
    text = reporting.format_csv(output.header, output.rows)
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    manifest_path = getattr(args, "manifest", None)
    if manifest_path is None and out_path:
        manifest_path = str(out_path) + ".manifest.json"
    if manifest_path:
        clean = {k: v for k, v in resolved.items() if not k.startswith("_")}
        reporting.write_manifest(
            manifest_path,
            reporting.manifest_dict(
                command, clean, clean.get("seed"), __version__, elapsed
            ),
        )
    if output.summary:
        print(output.summary, file=sys.stderr)
    return 0 if output.ok else 1


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--manifest", help="manifest path (default: OUT.manifest.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowthink",
        description=(
            "Correctness bounds, exact information-theoretic checks, and "
            "Monte Carlo simulation for test-time search strategies."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate closed-form strategy bounds")
    _add_common(p)
    p.add_argument("--strategy", choices=_BOUND_STRATEGIES + ("all",))
    p.add_argument("--lambda", dest="lambda_tau", type=float, help="exponential decay rate")
    p.add_argument("--table", help="tabulated decay, comma separated")
    p.add_argument("--selector", help="ideal | constant:EPS | noisy:MARGIN,STD")
    p.add_argument("--L", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--lambda-delta", dest="lambda_delta", type=float)
    p.add_argument("--depth", type=float, help="evaluation depth for the lookahead bound")

    p = sub.add_parser("simulate", help="Monte Carlo simulation of a strategy")
    _add_common(p)
    p.add_argument("--strategy", help="single_path|bon|beam|mcts_best|mcts_worst|lookahead")
    p.add_argument("--rule", help="bon rule: self_consistency|orm_vote|orm_max")
    p.add_argument("--lambda", dest="lambda_tau", type=float)
    p.add_argument("--table", help="tabulated decay, comma separated")
    p.add_argument("--selector", help="ideal | constant:EPS | noisy:MARGIN,STD")
    p.add_argument("--L", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--gamma", type=int)
    p.add_argument("--answer-space", dest="answer_space", type=int)
    p.add_argument("--score-noise", dest="score_noise", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sweep", help="PARAM=V1,V2,... over a strategy parameter")
    p.add_argument("--plot", help="write an SVG of the sweep here")

    p = sub.add_parser("fano-suite", help="randomized decoder-error lower-bound suite")
    _add_common(p)
    p.add_argument("--instances", type=int)
    p.add_argument("--support-min", dest="support_min", type=int)
    p.add_argument("--support-max", dest="support_max", type=int)
    p.add_argument("--max-L", dest="max_L", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument(
        "--assumption",
        choices=("both", "mi-only"),
        help="conditions a layer must satisfy to be checked (default: both)",
    )

    p = sub.add_parser("calibrate", help="budget-matching N from stats or traces")
    _add_common(p)
    p.add_argument("--stats", help="avg_b,avg_p,avg_L")
    p.add_argument("--traces", help="JSON Lines trace file")

    p = sub.add_parser("hsic", help="kernel dependence between two feature files")
    _add_common(p)
    p.add_argument("--x", required=False)
    p.add_argument("--y", required=False)
    p.add_argument("--sigma", type=float)
    p.add_argument("--per-token", dest="per_token", action="store_true", default=None)
    p.add_argument("--mean-length", dest="mean_length", type=float)
    p.add_argument("--permutation-test", dest="permutation_test", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--svg", help="write the permutation-null curve here")

    p = sub.add_parser("fit", help="exponential-decay and linear fits of (x, y) points")
    _add_common(p)
    p.add_argument("--points", required=False, help="CSV with header; first two columns by default")
    p.add_argument("--x-col", dest="x_col", help="name of the x column")
    p.add_argument("--y-col", dest="y_col", help="name of the y column")
    p.add_argument("--svg", help="write a scatter-with-fits SVG here")

    p = sub.add_parser("reproduce", help="named preset analyses")
    p.add_argument("preset", choices=tuple(sorted(_PRESETS)) + ("from-manifest",))
    _add_common(p)
    p.add_argument("--path", help="manifest path for from-manifest")
    p.add_argument("--b", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lambda_tau", type=float)
    p.add_argument("--lambda-delta", dest="lambda_delta", type=float)
    p.add_argument("--layer", type=int)
    p.add_argument("--instances", type=int)
    p.add_argument("--plot", help="write an SVG here")
    return parser


def _decay_config(args) -> dict | None:
    table = getattr(args, "table", None)
    if table:
        return {"kind": "tabulated", "table": _parse_floats(table)}
    lam = getattr(args, "lambda_tau", None)
    if lam is not None:
        return {"kind": "exponential", "lambda_tau": lam}
    return None


def _resolved_for(args) -> tuple[str, dict]:
    command = args.command
    config = _load_config(getattr(args, "config", None))
    if command == "bounds":
        resolved = _resolve(
            config,
            strategy=args.strategy,
            decay=_decay_config(args),
            selector=_parse_selector(args.selector) if args.selector else None,
            L=args.L, k=args.k, b=args.b, N=args.N,
            lambda_delta=args.lambda_delta, depth=args.depth,
        )
    elif command == "simulate":
        strategy = None
        if args.strategy:
            strategy = {"kind": args.strategy}
            for key in ("N", "k", "b", "gamma", "rule"):
                value = getattr(args, key, None)
                if value is not None:
                    strategy[key] = value
        sweep = None
        if args.sweep:
            param, _, values = args.sweep.partition("=")
            sweep = {"param": param.strip(), "values": _parse_ints(values)}
        resolved = _resolve(
            config,
            strategy=strategy,
            decay=_decay_config(args),
            selector=_parse_selector(args.selector) if args.selector else None,
            L=args.L,
            answer={"answer_space_size": args.answer_space} if args.answer_space else None,
            score_noise_std=args.score_noise,
            trials=args.trials, seed=args.seed, sweep=sweep, plot=args.plot,
        )
        if "strategy" not in resolved:
            raise ValidationError("simulate requires --strategy or a config entry")
    elif command == "fano-suite":
        resolved = _resolve(
            config,
            instances=args.instances, support_min=args.support_min,
            support_max=args.support_max, max_L=args.max_L,
            seed=args.seed, assumption=args.assumption,
        )
    elif command == "calibrate":
        stats = _parse_floats(args.stats) if args.stats else None
        if stats is not None and len(stats) != 3:
            raise ValidationError("--stats needs exactly avg_b,avg_p,avg_L")
        resolved = _resolve(config, stats=stats, traces=args.traces)
    elif command == "hsic":
        resolved = _resolve(
            config,
            x=args.x, y=args.y, sigma=args.sigma, per_token=args.per_token,
            mean_length=args.mean_length,
            permutation_test=args.permutation_test, seed=args.seed, svg=args.svg,
        )
        for key in ("x", "y"):
            if not resolved.get(key):
                raise ValidationError(f"hsic requires --{key} FILE")
    elif command == "fit":
        resolved = _resolve(
            config, points=args.points, svg=args.svg, x_col=args.x_col, y_col=args.y_col
        )
        if not resolved.get("points"):
            raise ValidationError("fit requires --points FILE")
    else:
        raise ValidationError(f"unknown command {command!r}")
    return command, resolved


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        if args.command == "reproduce":
            if args.preset == "from-manifest":
                if not args.path:
                    raise ValidationError("from-manifest requires --path MANIFEST")
                manifest = reporting.read_manifest(args.path)
                command = manifest["command"]
                resolved = dict(manifest["config"])
                runner = (
                    _PRESETS[command.removeprefix("reproduce:")]
                    if command.startswith("reproduce:")
                    else _COMMANDS[command]
                )
                resolved["_t0"] = t0
                return _emit(command, resolved, runner(resolved), args)
            runner = _PRESETS[args.preset]
            config = _load_config(args.config)
            resolved = _resolve(
                config,
                b=args.b, L=args.L, trials=args.trials, seed=args.seed,
                lambda_tau=args.lambda_tau, lambda_delta=args.lambda_delta,
                layer=args.layer, instances=args.instances, plot=args.plot,
            )
            resolved["_t0"] = t0
            return _emit(f"reproduce:{args.preset}", resolved, runner(resolved), args)
        command, resolved = _resolved_for(args)
        resolved["_t0"] = t0
        return _emit(command, resolved, _COMMANDS[command](resolved), args)
    except SlowthinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
