"""Command-line entry point: ``qestim scenario ...`` and ``qestim sweep ...``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage or configuration errors.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from .operators import InvalidInputError, make_pure_state
from .report import RunReport, check_at_least, check_at_most
from .scenarios import (
    EprConfig,
    HeterodyneConfig,
    scenario_energy_grid,
    scenario_epr,
    scenario_heterodyne,
    scenario_momentum_grid,
    scenario_qubit,
    scenario_unbiased_joint,
    unbiased_state_sweep,
)
from .scenarios.heterodyne import ConfigError
from .sweeps import SWEEP_KINDS, TOLERANCE, run_sweep

SCENARIOS = ("qubit", "unbiased-joint", "heterodyne", "epr", "momentum-grid", "energy-grid")

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"^[+-]?{_NUM}$")
_IMAG = re.compile(rf"^(?P<im>[+-]?(?:{_NUM})?)[ij]$")
_BOTH = re.compile(rf"^(?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?)[ij]$")


def _imag_part(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` style values: ``1.0+0.5i``, ``-2i``, ``3``, ``i``."""
    t = text.strip()
    if _REAL.match(t):
        return complex(float(t), 0.0)
    m = _IMAG.match(t)
    if m:
        return complex(0.0, _imag_part(m.group("im")))
    m = _BOTH.match(t)
    if m:
        return complex(float(m.group("re")), _imag_part(m.group("im")))
    raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


def _qubit_report(args) -> RunReport:
    res = scenario_qubit(args.state, args.observable, args.basis)
    rep = res.report
    report = RunReport("scenario qubit", args.seed,
                       {"state": args.state, "observable": args.observable, "basis": args.basis})
    report.results = {
        "labels": list(res.labels),
        "probabilities": res.probabilities,
        "optimal_estimate": res.optimal_values,
        "noise_sq": rep.noise_sq,
        "noise_bound_sq": rep.noise_bound_sq,
        "estimator_variance": rep.estimator_variance,
        "observable_variance": rep.observable_variance,
    }
    report.add(check_at_most("geometric_identity_residual", abs(rep.geometric_residual), 1e-9))
    report.add(check_at_least("noise_minus_bound", rep.bound_gap, -1e-9))
    pure = args.state != "mixed"
    if pure and np.all(res.probabilities > 1e-12):
        report.add(check_at_most("optimal_noise_equals_bound", abs(rep.bound_gap), 1e-9))
    return report


def _unbiased_report(args) -> RunReport:
    res = scenario_unbiased_joint(args.gamma, args.state)
    worst_product, worst_joint = unbiased_state_sweep(args.gamma, args.sweep_states, args.seed)
    report = RunReport("scenario unbiased-joint", args.seed,
                       {"gamma": args.gamma, "state": args.state, "sweep_states": args.sweep_states})
    report.results = {
        "noise_sq_x": res.noise_sq_x,
        "noise_sq_y": res.noise_sq_y,
        "closed_form_noise_sq": 1.0 / args.gamma**2 - 2.0 + 1.0,
        "product_lhs": res.product.lhs,
        "product_rhs": res.product.rhs,
        "joint_lhs": res.joint.lhs,
        "joint_rhs": res.joint.rhs,
        "sweep_min_product_slack": worst_product,
        "sweep_min_joint_slack": worst_joint,
    }
    report.add(check_at_most("unbiasedness_defect_x", res.defect_x, 1e-9))
    report.add(check_at_most("unbiasedness_defect_y", res.defect_y, 1e-9))
    report.add(check_at_least("product_slack", res.product.slack, -1e-9))
    report.add(check_at_least("joint_slack", res.joint.slack, -1e-9))
    report.add(check_at_least("sweep_min_product_slack", worst_product, -1e-9))
    report.add(check_at_least("sweep_min_joint_slack", worst_joint, -1e-9))
    return report


def _heterodyne_report(args) -> RunReport:
    cfg = HeterodyneConfig(state=args.state, beta=args.beta, r=args.r, phi=args.phi, photons=args.photons,
                           fock_dim=args.fock_dim, grid_n=args.grid_n, grid_radius=args.grid_radius)
    res = scenario_heterodyne(cfg)
    report = RunReport("scenario heterodyne", args.seed, {
        "state": cfg.state, "beta": cfg.beta, "r": cfg.r, "phi": cfg.phi, "photons": cfg.photons,
        "fock_dim": cfg.fock_dim, "grid_n": cfg.grid_n, "grid_radius": float(res.grid.axis[-1]),
    })
    quad = {}
    for name, q in (("x", res.x), ("y", res.y)):
        quad[name] = {
            "spread_standard": q.standard.estimator_spread,
            "spread_optimal": q.optimal.estimator_spread,
            "noise_standard": q.standard.noise,
            "noise_optimal": q.optimal.noise,
            "noise_bound": float(np.sqrt(q.optimal.noise_bound_sq)),
            "observable_variance": q.optimal.observable_variance,
        }
    report.results = {
        "quadratures": quad,
        "standard_product": res.standard_product,
        "optimal_product": res.optimal_product,
        "improvement_factor": res.improvement,
        "standard_product_bound": 0.5,
        "optimal_product_bound": 0.125,
        "grid_step": res.grid.step,
        "completeness_gap": res.completeness_gap,
        "closed_form_max_deviation": res.closed_form_max_deviation,
    }
    report.add(check_at_least("standard_product_vs_half", res.standard_product, 0.5 - 1e-3))
    report.add(check_at_least("optimal_product_vs_eighth", res.optimal_product, 0.125 - 1e-3))
    for name, q in (("x", res.x), ("y", res.y)):
        report.add(check_at_most(f"geometric_identity_{name}", abs(q.optimal.geometric_residual), 1e-9))
    report.add(check_at_most("closed_form_vs_engine", res.closed_form_max_deviation, 10 * res.grid.step))
    if cfg.state == "coherent":
        report.add(check_at_most("standard_product_saturation", abs(res.standard_product - 0.5), 1e-3))
        report.add(check_at_most("optimal_product_saturation", abs(res.optimal_product - 0.125), 1e-3))
        report.add(check_at_most("improvement_factor_vs_4", abs(res.improvement - 4.0), 0.02))
    return report


def _epr_report(args) -> RunReport:
    cfg = EprConfig(sigma=args.sigma, tau=args.tau, a=args.a, b=args.b, hbar=args.hbar, grid_n=args.grid_n,
                    half_width=args.half_width, bin_factor=args.bin_factor)
    res = scenario_epr(cfg)
    c = res.central
    report = RunReport("scenario epr", args.seed, {
        "sigma": cfg.sigma, "tau": cfg.tau, "a": cfg.a, "b": cfg.b, "hbar": cfg.hbar,
        "grid_n": cfg.grid_n, "half_width": cfg.extent(), "bin_factor": cfg.bin_factor,
    })
    report.results = {
        "noise_optimal": res.optimal.noise,
        "noise_naive": res.naive.noise,
        "noise_ratio": res.noise_ratio,
        "closed_form_ratio": res.closed_form_ratio,
        "estimate_relative_error": res.estimate_relative_error,
        "naive_deviation": res.naive_deviation,
        "table": {
            "p": res.momenta[c],
            "probability": res.probabilities[c],
            "optimal_estimate": res.optimal_values[c],
            "closed_form": res.closed_form_values[c],
            "naive_estimate": cfg.b - res.momenta[c],
        },
    }
    report.add(check_at_most("ratio_relative_error", abs(res.noise_ratio / res.closed_form_ratio - 1), 0.01))
    report.add(check_at_most("estimate_relative_error", res.estimate_relative_error, 0.01))
    report.add(check_at_most("ratio_not_above_one", res.noise_ratio, 1.0 + 1e-9))
    return report


def _momentum_report(args) -> RunReport:
    res = scenario_momentum_grid(args.shape, args.sigma, args.k, args.chirp, args.separation, args.n,
                                 args.half_width, args.hbar)
    u = res.uncertainty
    report = RunReport("scenario momentum-grid", args.seed, {
        "shape": args.shape, "sigma": args.sigma, "k": args.k, "chirp": args.chirp,
        "separation": args.separation, "n": args.n, "half_width": -res.grid.x0, "hbar": args.hbar,
    })
    report.results = {
        "fisher_length": u.fisher_length,
        "noise": u.noise,
        "noise_crosscheck": u.noise_crosscheck,
        "product": u.product,
        "crosscheck_product": u.crosscheck_product,
        "target": u.target,
        "mean_p_opt": res.mean_p_opt,
        "mean_p": res.mean_p,
    }
    tol = 1e-6 if args.shape == "gaussian" else 1e-4
    report.add(check_at_most("exact_relation_residual", u.residual, tol))
    report.add(check_at_most("exact_relation_crosscheck_residual", u.crosscheck_residual, tol))
    report.add(check_at_most("p_opt_unbiased", abs(res.mean_p_opt - res.mean_p), 1e-5))
    return report


def _energy_report(args) -> RunReport:
    res = scenario_energy_grid(args.mass, args.omega, args.n, args.half_width, args.hbar)
    report = RunReport("scenario energy-grid", args.seed,
                       {"mass": args.mass, "omega": args.omega, "n": args.n, "hbar": args.hbar})
    report.results = {
        "target": res.target,
        "max_deviation": res.max_deviation,
        "mean_e_opt": res.mean_e_opt,
        "hamiltonian_mean": res.hamiltonian_mean,
        "interior_points": int(res.interior.sum()),
    }
    report.add(check_at_most("e_opt_constant", res.max_deviation, 1e-4))
    report.add(check_at_most("mean_e_opt_vs_hamiltonian", abs(res.mean_e_opt - res.hamiltonian_mean), 1e-4))
    return report


_SCENARIO_RUNNERS = {
    "qubit": _qubit_report,
    "unbiased-joint": _unbiased_report,
    "heterodyne": _heterodyne_report,
    "epr": _epr_report,
    "momentum-grid": _momentum_report,
    "energy-grid": _energy_report,
}


def sweep_report(kind: str, trials: int, dim: int, seed: int, workers: int = 1) -> RunReport:
    res = run_sweep(kind, trials, dim, seed, workers)
    report = RunReport(f"sweep {kind}", seed, {"kind": kind, "trials": trials, "dim": dim})
    report.results = res.summary()
    s = report.results
    if kind == "joint":
        report.add(check_at_least("min_slack", s["min_slack"], -TOLERANCE))
    elif kind == "geometric":
        report.add(check_at_most("max_identity_residual", s["max_identity_residual"], TOLERANCE))
        report.add(check_at_least("min_bound_gap", s["min_bound_gap"], -TOLERANCE))
    else:
        report.add(check_at_most("max_bound_residual", s["max_bound_residual"], TOLERANCE))
    return report


def _add_output_flags(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qestim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="run a worked example")
    scn = sc.add_subparsers(dest="name", required=True)

    p = scn.add_parser("qubit")
    p.add_argument("--state", default="+y", choices=("0", "1", "+x", "-x", "+y", "-y", "+z", "-z", "mixed"))
    p.add_argument("--observable", default="sz", choices=("sx", "sy", "sz"))
    p.add_argument("--basis", default="x", choices=("x", "y", "z"))
    _add_output_flags(p)

    p = scn.add_parser("unbiased-joint")
    p.add_argument("--gamma", type=float, default=float(1 / np.sqrt(2)))
    p.add_argument("--state", default="0", choices=("0", "1", "+x", "-x", "+y", "-y", "mixed"))
    p.add_argument("--sweep-states", type=int, default=100)
    _add_output_flags(p)

    p = scn.add_parser("heterodyne")
    p.add_argument("--state", default="coherent", choices=("coherent", "squeezed", "fock"))
    p.add_argument("--beta", type=parse_complex, default=complex(1.0, 0.5))
    p.add_argument("--r", type=float, default=0.3)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--photons", type=int, default=1)
    p.add_argument("--fock-dim", type=int, default=32)
    p.add_argument("--grid-n", type=int, default=64)
    p.add_argument("--grid-radius", type=float)
    _add_output_flags(p)

    p = scn.add_parser("epr")
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--half-width", type=float)
    p.add_argument("--bin-factor", type=int, default=1)
    _add_output_flags(p)

    p = scn.add_parser("momentum-grid")
    p.add_argument("--shape", default="gaussian", choices=("gaussian", "two-bump"))
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--k", type=float, default=0.0)
    p.add_argument("--chirp", type=float, default=0.0)
    p.add_argument("--separation", type=float, default=4.0)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--half-width", type=float)
    p.add_argument("--hbar", type=float, default=1.0)
    _add_output_flags(p)

    p = scn.add_parser("energy-grid")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--half-width", type=float)
    p.add_argument("--hbar", type=float, default=1.0)
    _add_output_flags(p)

    sw = sub.add_parser("sweep", help="randomized check of an identity or inequality")
    sw.add_argument("kind", choices=SWEEP_KINDS)
    sw.add_argument("--trials", type=int, default=1000)
    sw.add_argument("--dim", type=int, default=3)
    sw.add_argument("--workers", type=int, default=1, help="threads; output does not depend on this")
    _add_output_flags(sw)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scenario":
            report = _SCENARIO_RUNNERS[args.name](args)
        else:
            if args.trials < 1 or not 2 <= args.dim <= 16 or args.workers < 1:
                parser.error("need --trials >= 1, 2 <= --dim <= 16 and --workers >= 1")
            report = sweep_report(args.kind, args.trials, args.dim, args.seed, args.workers)
    except (ConfigError, InvalidInputError, ValueError) as err:
        print(f"qestim: error: {err}", file=sys.stderr)
        return 2

    text = report.to_csv() if args.format == "csv" else report.to_json(timestamp=not args.no_timestamp)
    if args.out:
        args.out.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    for c in report.checks:
        if not c.passed:
            print(f"qestim: check failed: {c.name} observed {c.observed!r} tolerance {c.relation} {c.tolerance!r}",
                  file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
