"""Batch harness: every scenario as a subcommand with seeded reproducibility.

One scenario per invocation; composition happens in the shell.  Output is a
single report (human table by default, --json or --csv for machines); the
results section is byte-identical across identical invocations.  --check
additionally runs the scenario's acceptance criteria and exits 3 on failure.

Exit codes: 0 success, 2 validation/usage error, 3 failed --check.
"""

from __future__ import annotations

import argparse
import io
import itertools
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import continuum, groups, hilbert, inference, spin
from .acceptance import CRITERIA_BY_ID, SCENARIO_CRITERIA
from .errors import BadFlag, EpiqError, UnknownScenario


@dataclass
class RunReport:
    scenario: str
    parameters: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    seed: int = 0
    elapsed_ms: int = 0


def emit(report: RunReport, fmt: str) -> str:
    """json: one sorted-key object; csv: results-only header plus one row,
    floats at 12 significant digits; human: an aligned table."""
    if fmt == "json":
        doc = {
            "scenario": report.scenario,
            "parameters": report.parameters,
            "results": report.results,
            "seed": report.seed,
            "elapsed_ms": report.elapsed_ms,
        }
        return json.dumps(doc, sort_keys=True) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        keys = list(report.results)
        out.write(",".join(keys) + "\n")
        out.write(",".join(_csv_cell(report.results[k]) for k in keys) + "\n")
        return out.getvalue()
    lines = [f"scenario: {report.scenario}", f"seed: {report.seed}"]
    for k, v in report.parameters.items():
        lines.append(f"  param {k} = {v}")
    for k, v in report.results.items():
        lines.append(f"  {k} = {_csv_cell(v) if isinstance(v, float) else v}")
    lines.append(f"elapsed_ms: {report.elapsed_ms}")
    return "\n".join(lines) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _load_input(args) -> str | None:
    if getattr(args, "input", None) is None:
        return None
    with open(args.input, "r", encoding="utf-8") as fh:
        return fh.read()


# --- scenarios ------------------------------------------------------------------


def _run_born(args):
    rng = np.random.default_rng(args.seed)
    n = args.n or 1000
    worst = 0.0
    for _ in range(n):
        a = spin.Direction.normalized(*rng.standard_normal(3))
        b = spin.Direction.normalized(*rng.standard_normal(3))
        va = 1 if rng.random() < 0.5 else -1
        vb = 1 if rng.random() < 0.5 else -1
        gap = abs(
            spin.transition_probability(a, va, b, vb)
            - hilbert.born_probability(spin.spin_state(a, va), spin.spin_state(b, vb))
        )
        worst = max(worst, gap)
    deg120 = spin.Direction(np.sqrt(3.0) / 2.0, 0.0, -0.5)
    return {"pairs": n}, {
        "max_abs_diff": worst,
        "p_aligned": spin.transition_probability(spin.Z_DIR, 1, spin.Z_DIR, 1),
        "p_120deg": spin.transition_probability(spin.Z_DIR, 1, deg120, 1),
        "p_90deg": spin.transition_probability(spin.Z_DIR, 1, spin.X_DIR, 1),
    }


def _run_chsh(args):
    params = {"optimize": bool(args.optimize), "grid": args.grid}
    values = spin.deterministic_chsh_values()
    results = {
        "classical_min": min(values),
        "classical_max": max(values),
    }
    if args.optimize:
        dirs, value = spin.chsh_maximize(grid_steps=args.grid)
        results["value"] = value
        for name, d in zip("abcd", dirs):
            results[f"angle_{name}_deg"] = float(np.degrees(np.arctan2(d.x, d.z)) % 360.0)
    else:
        angles = (0.0, np.pi / 2, 1.25 * np.pi, 1.75 * np.pi)
        dirs = [spin.Direction.normalized(np.sin(t), 0.0, np.cos(t)) for t in angles]
        results["value"] = spin.chsh_value(*dirs)
    return params, results


def _run_mermin(args):
    kinds = {
        "classical": "classical_instruction",
        "quantum": "quantum",
        "charles": "charles_context",
    }
    model = spin.MerminModel(kind=kinds[args.model], rng_seed=args.seed)
    n = args.n or 10**6
    report = spin.mermin_simulate(model, n)
    results = {
        "same_switch_freq": report.same_switch_same_color_freq,
        "overall_freq": report.overall_same_color_freq,
        "classical_bound": float(spin.mermin_classical_bound()),
    }
    for i in range(3):
        for j in range(3):
            results[f"pair_{i + 1}{j + 1}_freq"] = float(report.per_pair_table[i, j])
    return {"model": args.model, "n": n}, results


def _run_example17(args):
    n = args.n or 10**6
    bayes, se = inference.contrast_sign_mc(n, seed=args.seed)
    return {"n": n}, {
        "bayes": bayes,
        "bayes_se": se,
        "group": inference.contrast_sign_group(),
    }


def _run_busch(args):
    rng = np.random.default_rng(args.seed)
    if args.dim is not None and args.dim < 2:
        raise BadFlag(f"--dim must be >= 2, got {args.dim}")
    dims = [args.dim] if args.dim else [2, 3, 4, 5]
    trials = args.n or 12
    worst_entry = 0.0
    worst_trace = 0.0
    worst_book = 0.0
    for _ in range(trials):
        for dim in dims:
            sigma = hilbert.DensityOperator.random(dim, rng)
            mu = hilbert.GPMeasure.from_density(sigma)
            rebuilt = hilbert.busch_reconstruct(mu, dim)
            worst_entry = max(
                worst_entry, float(np.max(np.abs(rebuilt.matrix - sigma.matrix)))
            )
            e1 = hilbert.Effect.random(dim, rng, top=0.5)
            e2 = hilbert.Effect.random(dim, rng, top=0.5)
            worst_trace = max(
                worst_trace, abs(np.trace(rebuilt.matrix @ e1.matrix).real - mu(e1))
            )
            q1 = np.trace(sigma.matrix @ e1.matrix).real
            q2 = np.trace(sigma.matrix @ e2.matrix).real
            q0 = np.trace(sigma.matrix @ (0.5 * (e1.matrix + e2.matrix))).real
            worst_book = max(worst_book, abs(hilbert.dutch_book_identity(q1, q2, q0)))
    return {"dims": "x".join(str(d) for d in dims), "trials": trials}, {
        "max_roundtrip_error": worst_entry,
        "max_trace_mismatch": worst_trace,
        "max_dutch_book": worst_book,
    }


def _run_birnbaum(args):
    text = _load_input(args)
    if text is not None:
        doc = json.loads(text)
        e1 = inference.DiscreteExperiment.from_json(json.dumps(doc["e1"]))
        e2 = inference.DiscreteExperiment.from_json(json.dumps(doc["e2"]))
        z1, z2 = doc["z1"], doc["z2"]
    else:
        grid = (0.1, 0.3, 0.5, 0.7, 0.9)
        e1 = inference.binomial_experiment(10, grid)
        e2 = inference.negative_binomial_experiment(2, grid)
        z1 = z2 = 8
    c = inference.likelihoods_proportional(e1, z1, e2, z2)
    results = {"proportional": float(c is not None)}
    if c is not None:
        t = inference.birnbaum_statistic(e1, z1, e2, z2)
        results["c"] = c
        results["mixture_sufficient"] = float(
            inference.is_sufficient(inference.birnbaum_mixture(e1, e2), t)
        )
    return {"z1": z1, "z2": z2}, results


def _run_reml(args):
    text = _load_input(args)
    if text is not None:
        doc = json.loads(text)
        y = np.asarray(doc["y"], dtype=float)
        x = np.asarray(doc["x"], dtype=float)
    else:
        rng = np.random.default_rng(args.seed)
        n = args.n or 20
        x = np.column_stack([np.ones(n), rng.standard_normal(n)])
        y = x @ np.array([1.0, 2.0]) + rng.standard_normal(n)
    estimate = inference.reml_estimate(y, x)
    n, p = x.shape
    spreads = []
    for seed in range(10):
        a = inference.null_space_basis(x, rng=np.random.default_rng(seed))
        spreads.append(float((a.T @ y) @ (a.T @ y)) / (n - p))
    return {"n": n, "p": p}, {
        "sigma2": estimate,
        "basis_spread": max(spreads) - min(spreads),
    }


def _run_multinomial(args):
    theta = args.theta if args.theta is not None else 0.0
    n = args.n or 600
    report = inference.multinomial_conditional_analysis(theta, n)
    return {"theta": theta, "n": n}, {
        "mle_full": report.mle_full,
        "mle_given_u1": report.mle_given_u1,
        "mle_given_u2": report.mle_given_u2,
        "avar_u1": report.avar_u1,
        "avar_u2": report.avar_u2,
        "avar_rel_diff": abs(report.avar_u1 - report.avar_u2) / report.avar_u2,
    }


def _run_entropy(args):
    text = _load_input(args)
    if text is not None:
        table = np.asarray(json.loads(text)["table"], dtype=float)
        joint = inference.JointPMF(table)
        return {"rows": table.shape[0], "cols": table.shape[1]}, {
            "correlation": inference.entropy_correlation(joint),
            "h_rows": inference.entropy(joint.row_marginal),
            "h_cols": inference.entropy(joint.col_marginal),
            "h_joint": inference.entropy(table.reshape(-1)),
        }
    rng = np.random.default_rng(args.seed)
    p = rng.uniform(0.1, 1.0, size=3)
    q = rng.uniform(0.1, 1.0, size=4)
    product = np.outer(p / p.sum(), q / q.sum())
    return {}, {
        "c_product": inference.entropy_correlation(inference.JointPMF(product)),
        "c_correlated_binary": inference.entropy_correlation(
            inference.JointPMF(np.diag([0.5, 0.5]))
        ),
    }


def _run_orbits(args):
    text = _load_input(args)
    if text is not None:
        action = groups.FiniteAction.from_json(text)
    else:
        # two independent strata {0,1} and {2,3,4}
        elements = []
        for pa in itertools.permutations(range(2)):
            for pb in itertools.permutations(range(2, 5)):
                elements.append(tuple(pa) + tuple(pb))
        action = groups.FiniteAction(space=tuple(range(5)), elements=tuple(elements))
    blocks = groups.orbits(action)
    results = {
        "order": action.order,
        "n_orbits": len(blocks),
        "transitive": float(groups.is_transitive(action)),
    }
    for i, block in enumerate(blocks):
        results[f"orbit_{i}_size"] = len(block)
    return {"space_size": len(action.space)}, results


def _run_nelson(args):
    grid = continuum.Grid1D(-8.0, 8.0, 1025)
    fields = continuum.nelson_fields(continuum.harmonic_ground_state(grid))
    n_paths = args.n or 10**5
    ensemble = continuum.simulate_diffusion(
        fields, lambda rng, n: np.zeros(n), dt=0.008, steps=1000, n_paths=n_paths, seed=args.seed
    )
    variance = float(np.var(ensemble.positions))
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8") as fh:
            fh.write(continuum.ensemble_csv(ensemble))
    return {"n_paths": n_paths, "dt": 0.008, "steps": 1000}, {
        "variance": variance,
        "target_variance": 0.5,
        "rel_err": abs(variance / 0.5 - 1.0),
        "n_escaped": ensemble.n_escaped,
    }


def _run_theorem6(args):
    refinements = args.n or 4
    sampler = lambda x: np.exp(-(x**2) / 2.0) / np.pi**0.25  # noqa: E731
    grid = continuum.Grid1D(-8.0, 8.0, 65)
    results = {}
    errors = []
    for level in range(refinements + 1):
        e_f, e_op = continuum.discretize_position(sampler, grid)
        errors.append((e_f, e_op))
        results[f"f_error_{level}"] = e_f
        results[f"op_error_{level}"] = e_op
        grid = grid.refined()
    arr = np.array(errors)
    ratios = np.concatenate([arr[:-1, 0] / arr[1:, 0], arr[:-1, 1] / arr[1:, 1]])
    results["min_ratio"] = float(ratios.min())
    results["max_ratio"] = float(ratios.max())
    return {"refinements": refinements}, results


SCENARIOS = {
    "born": _run_born,
    "chsh": _run_chsh,
    "mermin": _run_mermin,
    "example17": _run_example17,
    "busch": _run_busch,
    "birnbaum": _run_birnbaum,
    "reml": _run_reml,
    "multinomial": _run_multinomial,
    "entropy": _run_entropy,
    "orbits": _run_orbits,
    "nelson": _run_nelson,
    "theorem6": _run_theorem6,
}


def scenario_runner(name: str):
    """Programmatic lookup of a scenario by name."""
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(name) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epiq", description="Seeded, reproducible runs of every scenario."
    )
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--json", action="store_true")
        p.add_argument("--csv", action="store_true")
        p.add_argument("--check", action="store_true")
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--input", type=str, default=None)
        if name == "chsh":
            p.add_argument("--optimize", action="store_true")
            p.add_argument("--grid", type=int, default=360)
        if name == "mermin":
            p.add_argument(
                "--model", choices=("classical", "quantum", "charles"), default="quantum"
            )
        if name == "multinomial":
            p.add_argument("--theta", type=float, default=None)
        if name == "busch":
            p.add_argument("--dim", type=int, default=None)
        if name == "nelson":
            p.add_argument("--out-csv", type=str, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    start = time.perf_counter()
    try:
        parameters, results = scenario_runner(args.scenario)(args)
    except (EpiqError, OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = RunReport(
        scenario=args.scenario,
        parameters=parameters,
        results=results,
        seed=args.seed,
        elapsed_ms=int((time.perf_counter() - start) * 1000),
    )

    fmt = "json" if args.json else "csv" if args.csv else "human"
    text = emit(report, fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.check:
        failed = False
        for cid in SCENARIO_CRITERIA.get(args.scenario, ()):
            outcome = CRITERIA_BY_ID[cid].run()
            print(outcome.line(), file=sys.stderr)
            failed |= not outcome.passed
        if failed:
            return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
