"""Command-line front end.

Subcommands: eval one bound on user matrices, verify (campaign over random
instances, writing JSON + CSV reports and a slack-summary figure), repro
(the frozen worked examples), range (numerical-range boundary CSV).

Exit codes: 0 pass/holds, 3 mathematical violation or fixture mismatch,
2 usage or input error. The distinction keeps "the bound failed" apart
from "the invocation was wrong".
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bounds import BOUND_REGISTRY, Instance, evaluate_bound
from .errors import FixtureMismatchError, OrliczRadiusError
from .harness import (
    CampaignConfig,
    example1_instance,
    example2_instance,
    repro_worked_examples,
    run_campaign,
)
from .matfile import load_matrix
from .orlicz import named_orlicz
from .radius import Weight, numerical_range_boundary

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VIOLATION = 3


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="orlicz-radius",
        description="numerical-radius bound evaluation and verification",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one bound on given matrices")
    p_eval.add_argument("--bound", required=True, choices=sorted(BOUND_REGISTRY),
                        metavar="ID")
    p_eval.add_argument("--in", dest="inputs", action="append", default=[],
                        metavar="ROLE=FILE", help="matrix JSON file for a role")
    p_eval.add_argument("--weight", default="identity",
                        help="weight matrix file, or 'identity'")
    p_eval.add_argument("--alpha", type=float, default=0.5)
    p_eval.add_argument("--r", type=float, default=1.0)
    p_eval.add_argument("--s", type=float, default=1.0)
    p_eval.add_argument("--n", type=int, default=2)
    p_eval.add_argument("--phi", default=None,
                        help="Orlicz function name, power:R, power_scaled:P, or CSV path")
    p_eval.add_argument("--probs", default=None,
                        help="comma-separated probability vector (sum bounds)")
    p_eval.add_argument("--variant", choices=("proof", "literal"), default="proof")
    p_eval.add_argument("--tol", type=float, default=1e-8)

    p_verify = sub.add_parser("verify", help="run a randomized campaign")
    p_verify.add_argument("--config", required=True, help="campaign config JSON")
    p_verify.add_argument("--out", required=True, help="output directory")
    p_verify.add_argument("--workers", type=int, default=None)
    p_verify.add_argument("--no-figures", action="store_true",
                          help="skip the slack-summary figure")

    p_repro = sub.add_parser("repro", help="reproduce the worked examples")
    p_repro.add_argument("--fixtures", default=None,
                         help="directory with T/S/A/B/C/D matrix JSON overrides")
    p_repro.add_argument("--tol", type=float, default=1e-9)

    p_range = sub.add_parser("range", help="numerical-range boundary CSV")
    p_range.add_argument("--in", dest="input", required=True, metavar="FILE")
    p_range.add_argument("--weight", default=None)
    p_range.add_argument("--points", type=int, default=360)

    return top


def _cmd_eval(args) -> int:
    matrices = {}
    for item in args.inputs:
        role, _, path = item.partition("=")
        if not path:
            print(f"--in expects ROLE=FILE, got {item!r}", file=sys.stderr)
            return EXIT_INPUT
        matrices[role] = load_matrix(path)
    if not matrices:
        print("at least one --in ROLE=FILE is required", file=sys.stderr)
        return EXIT_INPUT
    dim = next(iter(matrices.values())).shape[0]
    if args.weight == "identity":
        weight = Weight.identity(dim)
    else:
        weight = Weight.from_matrix(load_matrix(args.weight))
    phi = named_orlicz(args.phi) if args.phi else None
    probs = None
    if args.probs:
        probs = np.array([float(v) for v in args.probs.split(",")])
    inst = Instance(
        matrices=matrices, weight=weight, alpha=args.alpha, r_exp=args.r,
        s_exp=args.s, n_param=args.n, probs=probs, phi=phi,
    )
    report = evaluate_bound(args.bound, inst, tol=args.tol, variant=args.variant)
    print(json.dumps(report.to_json_dict(), indent=2))
    return EXIT_OK if report.holds else EXIT_VIOLATION


def _cmd_verify(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = CampaignConfig.from_json_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    os.makedirs(args.out, exist_ok=True)
    report = run_campaign(cfg, workers=args.workers)
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        fh.write(report.to_json())
    with open(os.path.join(args.out, "report.csv"), "w") as fh:
        fh.write(report.to_csv())
    if not args.no_figures:
        from .figures import render_campaign_figures

        render_campaign_figures(report, args.out)
    print(
        f"{len(report.rows)} evaluations, {report.total_violations} violations, "
        f"{report.total_errors} errors in {report.wall_time:.1f}s"
    )
    for bid, st in report.per_bound.items():
        if st.violations:
            print(f"  violation: {bid} at seeds "
                  f"{[seed for seed, _ in st.violations[:10]]}")
    return EXIT_OK if report.total_violations == 0 else EXIT_VIOLATION


def _load_fixture_overrides(fixtures_dir):
    mats = {}
    for name in ("T", "S", "A", "B", "C", "D"):
        mats[name] = load_matrix(os.path.join(fixtures_dir, f"{name}.json"))
    eye = np.eye(mats["A"].shape[0], dtype=complex)
    ex1 = example1_instance()
    ex1.matrices = {"x": mats["T"], "y": mats["S"]}
    ex1.weight = Weight.identity(mats["T"].shape[0])
    ex2 = example2_instance()
    ex2.matrices = {"p": mats["A"], "x": mats["B"], "q": eye,
                    "r": mats["C"], "y": mats["D"], "s": eye}
    ex2.weight = Weight.identity(mats["A"].shape[0])
    return ex1, ex2


def _cmd_repro(args) -> int:
    ex1 = ex2 = None
    if args.fixtures:
        ex1, ex2 = _load_fixture_overrides(args.fixtures)
    report = repro_worked_examples(ex1=ex1, ex2=ex2, tol=args.tol)
    print(report.to_text())
    try:
        report.raise_if_mismatch()
    except FixtureMismatchError as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_range(args) -> int:
    x = load_matrix(args.input)
    if args.weight:
        w = Weight.from_matrix(load_matrix(args.weight))
        x = w.conjugate(x)
    pts = numerical_range_boundary(x, args.points)
    thetas = 2.0 * np.pi * np.arange(args.points) / args.points
    print("theta,re,im")
    for th, z in zip(thetas, pts):
        print(f"{float(th)!r},{float(z.real)!r},{float(z.imag)!r}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "eval": _cmd_eval,
        "verify": _cmd_verify,
        "repro": _cmd_repro,
        "range": _cmd_range,
    }[args.command]
    try:
        return handler(args)
    except OrliczRadiusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
