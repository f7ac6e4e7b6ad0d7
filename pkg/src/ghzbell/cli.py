"""Command-line front end.

Every subcommand writes a deterministic report (CSV or JSON) to stdout or to
``--out``; elapsed wall time goes to stderr so report files stay
byte-identical across runs and worker counts. If ``--out`` is omitted and
``GHZBELL_OUT_DIR`` is set, the report is written to
``$GHZBELL_OUT_DIR/<subcommand>.<format>``.

Exit codes: 0 success, 2 validation error, 3 invariant violation, 4 no
threshold found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import __version__
from .bell_device import BellKind, OutcomeKind, exact_outcome_table
from .ghz import ImpossibleOutcome, logical_bm_counts, success_probability, teleport_counts
from .loss import bm_failure_prob
from .mc import binomial_stderr
from .schemes import emit_curves
from .telecorrection import NoThresholdFound, TelecorrectionConfig, find_threshold, threshold_table
from .verify import run_checks

SCHEMA_VERSION = 1
OUT_DIR_ENV = "GHZBELL_OUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_NO_THRESHOLD = 0, 2, 3, 4


class InvariantViolation(RuntimeError):
    pass


def fmt_prob(x: float) -> str:
    return f"{x:.10g}"


def fmt_sci(x: float) -> str:
    return f"{x:.6e}"


def _prob(x: float) -> float:
    return float(fmt_prob(x))


def _sci(x: float) -> float:
    return float(fmt_sci(x))


def _csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(payload: dict, args: argparse.Namespace) -> str:
    envelope = {"tool": "ghzbell", "version": __version__, "schema": SCHEMA_VERSION, "config_echo": _echo(args)}
    return json.dumps({**envelope, **payload}, indent=2, sort_keys=False) + "\n"


def _echo(args: argparse.Namespace) -> dict:
    skip = {"func", "out", "config", "workers", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# Subcommands: each returns (report text, extension)


def cmd_bs_table(args) -> str:
    cols = [OutcomeKind.SUCCESS_PHI_MINUS, OutcomeKind.SUCCESS_PSI_MINUS, OutcomeKind.AMBIGUOUS, OutcomeKind.CLICK_DEFICIT]
    tables = {kind: exact_outcome_table(kind) for kind in BellKind}
    if args.format == "json":
        rows = [{"input": k.label, **{c.value: _prob(t[c]) for c in cols}} for k, t in tables.items()]
        return _json({"rows": rows}, args)
    return _csv(["input"] + [c.value for c in cols], [[k.label] + [fmt_prob(t[c]) for c in cols] for k, t in tables.items()])


def _mc_payload(n: int, samples: int, successes: int, analytic: float) -> dict:
    return {
        "n": n,
        "samples": samples,
        "successes": successes,
        "estimate": _prob(successes / samples),
        "stderr": _prob(binomial_stderr(successes, samples)),
        "analytic": _prob(analytic),
    }


def cmd_logical_bm(args) -> str:
    tally = logical_bm_counts(args.n, args.samples, args.seed, eta=args.eta, workers=args.workers, two_sided=args.two_sided)
    if args.eta == 0:
        analytic = success_probability(args.n)
    elif args.two_sided:
        analytic = 1.0 - (1.0 - (1.0 - args.eta) ** 2 / 2.0) ** args.n
    else:
        analytic = 1.0 - bm_failure_prob(args.n, args.eta)
    payload = _mc_payload(args.n, args.samples, int(tally[0]), analytic)
    payload.update(phi_successes=int(tally[1]), psi_successes=int(tally[2]))
    return _emit_record(payload, args)


def cmd_teleport(args) -> str:
    tally = teleport_counts(args.n, args.samples, args.seed, eta=args.eta, workers=args.workers)
    successes, perfect = int(tally[0]), int(tally[1])
    if args.eta == 0 and perfect != successes:
        raise InvariantViolation(f"{successes - perfect} successful teleportations with fidelity below 1")
    payload = _mc_payload(args.n, args.samples, successes, 1.0 - bm_failure_prob(args.n, args.eta))
    payload["unit_fidelity"] = perfect
    return _emit_record(payload, args)


def _emit_record(payload: dict, args) -> str:
    if args.format == "csv":
        return _csv(list(payload), [[fmt_prob(v) if isinstance(v, float) else str(v) for v in payload.values()]])
    return _json(payload, args)


def cmd_curves(args) -> str:
    points = emit_curves(args.max_nbar, args.step, caption_variant=args.caption_variant)
    if args.format == "json":
        rows = [{"scheme": p.scheme.value, "nbar": _prob(p.nbar), "ps": _prob(p.ps), "physical": int(p.physical)} for p in points]
        return _json({"rows": rows}, args)
    rows = [[p.scheme.value, fmt_prob(p.nbar), fmt_prob(p.ps), str(int(p.physical))] for p in points]
    return _csv(["scheme", "nbar", "ps", "physical"], rows)


def _tc_config(args, n: int) -> TelecorrectionConfig:
    return TelecorrectionConfig(
        n_photons=n,
        samples=args.samples,
        levels=args.levels,
        memory_steps=args.memory_steps,
        gate_ops=args.gate_ops,
        offline_loss=not args.no_offline_loss,
        seed=args.seed,
        replicas=args.replicas,
    )


def cmd_threshold(args) -> str:
    cfg = _tc_config(args, args.n)
    res = find_threshold(args.n, cfg, workers=args.workers)
    payload = {
        "n": res.n_photons,
        "eta_threshold": _sci(res.eta_threshold),
        "ci_low": _sci(res.ci_low),
        "ci_high": _sci(res.ci_high),
        "levels": res.levels_used,
        "samples": cfg.samples,
        "replica_thresholds": [_sci(v) for v in res.replica_thresholds],
    }
    if args.format == "csv":
        return _threshold_csv([res])
    return _json(payload, args)


def _threshold_csv(results) -> str:
    rows = [[str(r.n_photons), fmt_sci(r.eta_threshold), fmt_sci(r.ci_low), fmt_sci(r.ci_high), str(r.levels_used)] for r in results]
    return _csv(["n", "eta_threshold", "ci_low", "ci_high", "levels"], rows)


def cmd_threshold_table(args) -> str:
    if args.n_min > args.n_max:
        raise ValueError("--n-min must not exceed --n-max")
    results = threshold_table(args.n_min, args.n_max, _tc_config(args, args.n_min), workers=args.workers)
    if args.format == "json":
        rows = [{k: (_sci(v) if isinstance(v, float) else v) for k, v in asdict(r).items() if k != "replica_thresholds"} for r in results]
        return _json({"rows": rows}, args)
    return _threshold_csv(results)


def cmd_verify(args) -> str:
    results = run_checks()
    text = "".join(r.line() + "\n" for r in results)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise InvariantViolation(text + f"{len(failed)} invariant(s) failed")
    return text + f"all {len(results)} invariants passed\n"


# ---------------------------------------------------------------------------
# Argument parsing


def _positive_int(text: str) -> int:
    v = int(float(text))
    if v < 1 or v != float(text):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _rate(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a rate in [0, 1], got {text}")
    return v


def _common(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--config", type=Path, help="JSON file whose keys override the flags")


def _mc_flags(p: argparse.ArgumentParser, samples: int = 100_000) -> None:
    p.add_argument("--samples", type=_positive_int, default=samples)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=_positive_int, default=1)


def _tc_flags(p: argparse.ArgumentParser) -> None:
    _mc_flags(p, samples=10_000)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--replicas", type=_positive_int, default=5)
    p.add_argument("--memory-steps", type=int, default=14)
    p.add_argument("--gate-ops", type=int, default=2)
    p.add_argument("--no-offline-loss", action="store_true")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghzbell", description="GHZ-encoded Bell measurement simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bs-table", help="exact outcome table of the single-photon Bell measurement")
    _common(p, "csv")
    p.set_defaults(func=cmd_bs_table)

    for name, func, help_ in (
        ("logical-bm", cmd_logical_bm, "Monte Carlo logical Bell measurement success rate"),
        ("teleport", cmd_teleport, "Monte Carlo teleportation success rate and fidelity"),
    ):
        p = sub.add_parser(name, help=help_)
        _common(p, "json")
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--eta", type=_rate, default=0.0)
        _mc_flags(p)
        if name == "logical-bm":
            p.add_argument("--two-sided", action="store_true", help="lose photons of both measured qubits")
        p.set_defaults(func=func)

    p = sub.add_parser("curves", help="success probability against photon usage for four schemes")
    _common(p, "csv")
    p.add_argument("--max-nbar", type=float, default=20.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--caption-variant", action="store_true", help="use the 1 - 2^(-nbar/4) form for Ewert-van Loock")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("threshold", help="loss threshold for one photon number")
    _common(p, "json")
    p.add_argument("--n", type=_positive_int, required=True)
    _tc_flags(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("threshold-table", help="loss thresholds over a range of photon numbers")
    _common(p, "csv")
    p.add_argument("--n-min", type=_positive_int, default=3)
    p.add_argument("--n-max", type=_positive_int, default=8)
    _tc_flags(p)
    p.set_defaults(func=cmd_threshold_table)

    p = sub.add_parser("verify", help="run the invariant self-test suite")
    p.add_argument("--out", type=Path)
    p.add_argument("--config", type=Path)
    p.set_defaults(func=cmd_verify, format="txt")
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.config is None:
        return
    try:
        data = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    for key, value in data.items():
        attr = key.replace("-", "_")
        if attr in ("func", "command") or not hasattr(args, attr):
            raise ValueError(f"unknown config key {key!r} for {args.command}")
        setattr(args, attr, value)


def _destination(args) -> Path | None:
    if args.out is not None:
        return Path(args.out)
    root = os.environ.get(OUT_DIR_ENV)
    if root:
        return Path(root) / f"{args.command}.{args.format}"
    return None


def dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    start = time.perf_counter()
    try:
        _apply_config(parser, args)
        report = args.func(args)
    except (ValueError, TypeError) as exc:
        print(f"ghzbell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImpossibleOutcome, InvariantViolation) as exc:
        print(f"ghzbell: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except NoThresholdFound as exc:
        print(f"ghzbell: {exc}", file=sys.stderr)
        return EXIT_NO_THRESHOLD
    dest = _destination(args)
    if dest is None:
        sys.stdout.write(report)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(report)
    print(f"ghzbell {args.command}: {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())
