"""Command-line front end: ``fermigauss <command> ...``.

Exit codes: 0 success, 1 I/O or parse error, 2 invalid input, 3 recovery
map undefined (faithfulness), 4 verification failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import io
from .channel import apply, compose, validate_cp, validate_tp, validate_unital
from .errors import (
    FaithfulnessError,
    InvalidInputError,
    InvalidStateError,
    SingularityError,
    StrictPositivityError,
)
from .fidelity import fidelity, overlap
from .linalg import canonical_decompose, pfaffian
from .models import dilation_channel, random_channel, random_dilation, random_state
from .recovery import petz, petz_on_support, rotated_petz
from .state import STATE_TOL
from .verify import run_suite

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_FAITHFUL, EXIT_VERIFY = 0, 1, 2, 3, 4


class _IOFailure(Exception):
    pass


def _read(path):
    try:
        return io.read_json(path)
    except json.JSONDecodeError as exc:
        raise _IOFailure(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise _IOFailure(f"{path}: {exc.strerror or exc}")


def _load(path, kind):
    doc = _read(path)
    if kind == "state":
        return io.state_from_doc(doc)
    if io.document_kind(doc) == "dilation":
        return dilation_channel(io.dilation_from_doc(doc))
    return io.channel_from_doc(doc)


def _write(path, doc):
    if path in (None, "-"):
        print(json.dumps(doc))
    else:
        io.write_json(path, doc)


def _fmt(values) -> str:
    return ", ".join(f"{v:.12g}" for v in values)


def cmd_validate(args) -> int:
    doc = _read(args.path)
    kind = io.document_kind(doc)
    tol = STATE_TOL if args.tol is None else args.tol
    if kind == "state":
        n = doc.get("n")
        try:
            cov = io.state_from_doc(doc, tol=tol)
        except InvalidStateError as exc:
            print(f"state: INVALID (n={n})")
            print(f"offending Williamson values: {_fmt(exc.offending)}")
            return EXIT_INVALID
        print(f"state: valid (n={cov.n})")
        print(f"Williamson values: {_fmt(cov.williamson)}")
        return EXIT_OK
    if kind == "dilation":
        d = io.dilation_from_doc(doc)
        print(f"dilation: valid (n={d.n}, m={d.m})")
        return EXIT_OK
    ch = io.channel_from_doc(doc)
    cp = validate_cp(ch) if args.tol is None else validate_cp(ch, args.tol)
    tp = validate_tp(ch)
    print(f"CP: {'yes' if cp else 'no'}, TP: {'yes' if tp else 'no'}, "
          f"unital: {'yes' if validate_unital(ch) else 'no'}")
    print(f"max singular value of N: {cp.max_singular_value:.12g}")
    if not cp:
        print(f"reason: {cp.reason}")
        return EXIT_INVALID
    return EXIT_OK


def cmd_petz(args) -> int:
    sigma = _load(args.sigma, "state")
    ch = _load(args.channel, "channel")
    try:
        if args.t is not None:
            rec = rotated_petz(sigma, ch, args.t)
        else:
            rec = petz(sigma, ch, support=args.support)
    except (FaithfulnessError, StrictPositivityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        out = apply(ch, sigma)
        print(f"N(sigma) Williamson values: {_fmt(out.williamson)}", file=sys.stderr)
        pure = getattr(exc, "pure_modes", ())
        if pure:
            print(f"pure modes (canonical basis of N(sigma)): {list(pure)}", file=sys.stderr)
        return EXIT_FAITHFUL
    if args.support and args.t is None:
        info = petz_on_support(sigma, ch)
        print(f"support: mixed modes {list(info.mixed_modes)}, pure modes {list(info.pure_modes)}")
    residual = float(np.max(np.abs(apply(rec, apply(ch, sigma)).G - sigma.G), initial=0.0))
    _write(args.output, io.channel_to_doc(rec))
    print(f"residual: {residual:.3e}")
    return EXIT_OK


def cmd_fidelity(args) -> int:
    a, b = _load(args.state_a, "state"), _load(args.state_b, "state")
    if a.n != b.n:
        print(f"error: mode counts differ ({a.n} vs {b.n})", file=sys.stderr)
        return EXIT_INVALID
    f, ov = fidelity(a, b), overlap(a, b)
    if args.json:
        print(json.dumps({"fidelity": f, "overlap": ov}))
    else:
        print(f"F = {f:.12f}")
        print(f"overlap = {ov:.12g}")
    return EXIT_OK


def cmd_apply(args) -> int:
    G = _load(args.state, "state")
    ch = _load(args.channel, "channel")
    _write(args.output, io.state_to_doc(apply(ch, G)))
    return EXIT_OK


def cmd_compose(args) -> int:
    second = _load(args.second, "channel")
    first = _load(args.first, "channel")
    _write(args.output, io.channel_to_doc(compose(second, first)))
    return EXIT_OK


def cmd_random(args) -> int:
    if args.kind == "state":
        doc = io.state_to_doc(random_state(args.seed, args.n))
    elif args.kind == "channel":
        doc = io.channel_to_doc(random_channel(args.seed, args.n, args.m))
    else:
        doc = io.dilation_to_doc(random_dilation(args.seed, args.n, args.m))
    _write(args.output, doc)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.dense and args.n + 1 > 5:
        print("error: --dense needs n <= 4 (one environment mode is added)", file=sys.stderr)
        return EXIT_INVALID
    outcomes = run_suite(args.seed, args.n, args.trials, use_dense=args.dense, tol=args.tol)
    for o in outcomes:
        print(o.line())
    failed = sum(not o.passed for o in outcomes)
    print(f"{len(outcomes) - failed}/{len(outcomes)} properties passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def _bench_inputs(n: int, seed: int):
    rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
    # scaled so that Pfaffians stay within double range
    M = rng.standard_normal((2 * n, 2 * n)) / np.sqrt(2 * n)
    M = M - M.T
    sigma = random_state(int(rng.integers(2**63)), n)
    rho = random_state(int(rng.integers(2**63)), n)
    ch = random_channel(int(rng.integers(2**63)), n, 1)
    return {
        "canonical_decompose": lambda: canonical_decompose(M),
        "pfaffian": lambda: pfaffian(M),
        "petz": lambda: petz(sigma, ch),
        "fidelity": lambda: fidelity(rho, sigma),
    }


def run_bench(sizes, reps: int = 3, seed: int = 0):
    """Time each operation; returns rows ``(op, n, mean_ms, std_ms)``."""
    rows = []
    for n in sizes:
        for op, fn in _bench_inputs(n, seed).items():
            times = []
            for _ in range(reps):
                t0 = time.perf_counter()
                fn()
                times.append(1e3 * (time.perf_counter() - t0))
            rows.append((op, n, float(np.mean(times)), float(np.std(times))))
    return rows


def fitted_exponents(rows) -> dict:
    """Least-squares slope of log(time) against log(2n) per operation."""
    out = {}
    for op in dict.fromkeys(r[0] for r in rows):
        pts = [(2 * r[1], r[2]) for r in rows if r[0] == op]
        if len(pts) >= 2:
            x, y = np.log([p[0] for p in pts]), np.log([max(p[1], 1e-9) for p in pts])
            out[op] = float(np.polyfit(x, y, 1)[0])
    return out


def cmd_bench(args) -> int:
    rows = run_bench(args.sizes, args.reps, args.seed)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["op", "n", "mean_ms", "std_ms"])
    for op, n, mean, std in rows:
        writer.writerow([op, n, f"{mean:.6f}", f"{std:.6f}"])
    for op, k in fitted_exponents(rows).items():
        print(f"fitted exponent vs 2n, {op}: {k:.3f}", file=sys.stderr)
    return EXIT_OK


def _sizes(text: str):
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fermigauss", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="validate a state, channel or dilation JSON file")
    s.add_argument("path")
    s.add_argument("--tol", type=float, default=None, help="override the spectral tolerance")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("petz", help="build the Petz (or rotated, with --t) recovery channel")
    s.add_argument("sigma")
    s.add_argument("channel")
    s.add_argument("--t", type=float, default=None, help="rotation parameter")
    s.add_argument("--support", action="store_true", help="restrict to the support of N(sigma)")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_petz)

    s = sub.add_parser("fidelity", help="fidelity and overlap of two states")
    s.add_argument("state_a")
    s.add_argument("state_b")
    s.add_argument("--json", action="store_true", help="print exact values as JSON")
    s.set_defaults(func=cmd_fidelity)

    s = sub.add_parser("apply", help="apply a channel to a state")
    s.add_argument("state")
    s.add_argument("channel")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("compose", help="compose two channels (second after first)")
    s.add_argument("second")
    s.add_argument("first")
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("random", help="emit a seeded random state, channel or dilation")
    s.add_argument("kind", choices=["state", "channel", "dilation"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_random)

    s = sub.add_parser("verify", help="run the randomized property suite")
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--trials", type=int, default=50)
    s.add_argument("--dense", action="store_true", help="include dense-oracle properties")
    s.add_argument("--tol", type=float, default=None, help="replace every property tolerance")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bench", help="time core operations; CSV on stdout")
    s.add_argument("--sizes", type=_sizes, default=[8, 16, 32], help="mode counts, e.g. 8,16,32")
    s.add_argument("--reps", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidInputError, InvalidStateError, SingularityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
