"""Command line front end.

Exit status: 0 when every check passes, 1 on a claim or bound mismatch,
2 on usage errors and budget refusals.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import bounds, oracle, vtype
from .embedding import EmbeddingError, build_complete_bipartite, max_genus_upper_bound, parse_many, serialize

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

ENV_BUDGET = "MAXGENUS_BUDGET"
ENV_JOBS = "MAXGENUS_JOBS"


class UsageError(Exception):
    pass


def _odd(n: int) -> int:
    if n < 1 or n % 2 == 0:
        raise UsageError(f"n must be odd and positive (got {n})")
    return n


def _n_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def _budget(args, default: int) -> int:
    budget = args.budget if args.budget is not None else _env_int(ENV_BUDGET)
    budget = default if budget is None else budget
    if budget <= 0:
        raise UsageError("budget must be positive")
    return budget


def _jobs(args) -> int:
    jobs = args.jobs if args.jobs is not None else _env_int(ENV_JOBS)
    jobs = 1 if jobs is None else jobs
    if jobs <= 0:
        raise UsageError("jobs must be positive")
    return jobs


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_census(args) -> int:
    p, q = args.parts
    if p < 1 or q < 1:
        raise UsageError("--parts needs two positive integers")
    g = build_complete_bipartite(p, q)
    report = oracle.face_census(g, budget=_budget(args, oracle.DEFAULT_BUDGET), jobs=_jobs(args))
    _emit(args, report.records() if args.format == "records" else report.table())
    return EXIT_OK


def cmd_generate(args) -> int:
    n = _odd(args.n)
    p = args.p if args.p is not None else n
    if args.sample is not None:
        stream = vtype.generate_all(n, "sampled", seed=args.seed, count=args.sample, p=p)
    else:
        stream = vtype.generate_all(n, "exhaustive", budget=_budget(args, vtype.DEFAULT_MATERIALIZE_BUDGET),
                                    jobs=_jobs(args), p=p)
    items = []
    invalid = 0
    for seq, e in stream:
        if not vtype.check_output(e):
            invalid += 1
        items.append((seq, e))
    report = vtype.verify_distinct(items)
    if args.out:
        prefix = Path(args.out)
        prefix.with_name(prefix.name + ".emb").write_text(
            "\n".join(f"# {seq.record()}\n{serialize(e)}" for seq, e in items), encoding="utf-8")
        prefix.with_name(prefix.name + ".choices").write_text(
            "".join(seq.record() + "\n" for seq, _ in items), encoding="utf-8")
    print(f"K_{{{p},{n}}}: {len(items)} embeddings generated, {report.summary()}")
    print(f"one-face with genus {max_genus_upper_bound(build_complete_bipartite(p, n))}: "
          f"{len(items) - invalid} / {len(items)}")
    for e, first, second in report.collisions:
        kind = "repeated sequence" if first == second else "COLLISION"
        print(f"{kind}: {first.record()} | {second.record()}")
    if args.sample is None:
        print(f"predicted by stage factors: {vtype.predicted_count(n, p)}")
    return EXIT_OK if report.injective and not invalid else EXIT_MISMATCH


def cmd_verify_claims(args) -> int:
    n = _odd(args.n)
    report = vtype.verify_claims(n, samples=args.samples, seed=args.seed, frontier_budget=args.frontier)
    _emit(args, report.records() if args.format == "records" else report.table())
    return EXIT_OK if report.passed else EXIT_MISMATCH


def cmd_bounds(args) -> int:
    ns = [_odd(n) for n in args.n]
    if any(n < 3 for n in ns):
        raise UsageError("bounds are tabulated for odd n >= 3")
    rows = bounds.compare_table(ns)
    _emit(args, bounds.render_records(rows) if args.format == "records" else bounds.render_table(rows))
    # the staged product and the closed form must agree
    mismatched = [n for n in ns if vtype.predicted_count(n) != bounds.f1(n)]
    for n in mismatched:
        print(f"mismatch: staged product differs from f1 at n={n}", file=sys.stderr)
    return EXIT_MISMATCH if mismatched else EXIT_OK


def cmd_trace(args) -> int:
    text = sys.stdin.read() if args.path == "-" else Path(args.path).read_text(encoding="utf-8")
    embeddings = parse_many(text)
    if not embeddings:
        raise UsageError(f"{args.path}: no embedding found")
    out = []
    for i, e in enumerate(embeddings):
        faces = e.faces
        if args.format == "records":
            out.append(f"embedding={i} faces={faces.face_count} genus={faces.genus}\n")
            out.extend(f"walk={' '.join(str(d) for d in w)}\n" for w in faces.walks)
        else:
            out.append(f"embedding {i}: {e.graph}\n")
            out.append(f"  faces: {faces.face_count}\n  genus: {faces.genus}\n")
            for j, w in enumerate(faces.walks):
                out.append(f"  face {j} (length {len(w)}): {' '.join(str(d.tail) for d in w)}\n")
    _emit(args, "".join(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxgenus", description="Count and construct maximum genus embeddings of K_{n,n}.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--format", choices=("text", "records"), default="text")
        if out:
            sp.add_argument("--out", metavar="PATH")

    sp = sub.add_parser("census", help="face census over every rotation system of K_{p,q}")
    sp.add_argument("--parts", nargs=2, type=int, metavar=("P", "Q"), required=True)
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--budget", type=int)
    common(sp)
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("generate", help="one-face embeddings of K_{n,n} by v-type-edge insertion")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, help="stop after attaching x_1..x_p (default n)")
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--sample", type=int, metavar="K")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out", metavar="PREFIX", help="write PREFIX.emb and PREFIX.choices")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("verify-claims", help="check every stage factor of the construction")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--frontier", type=int, default=500,
                    help="follow all intermediates up to this many, then sample")
    common(sp)
    sp.set_defaults(func=cmd_verify_claims)

    sp = sub.add_parser("bounds", help="exact f1 / f2 / Stahl comparison")
    sp.add_argument("--n", type=_n_list, required=True, metavar="N[,N...]")
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("trace", help="trace the faces of embeddings in a text file")
    sp.add_argument("path", help="embedding file, or - for stdin")
    common(sp)
    sp.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "sample", None) is not None and args.sample < 1:
            raise UsageError("--sample needs a positive count")
        return args.func(args)
    except oracle.BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, EmbeddingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except vtype.ClaimViolation as exc:
        print(f"claim violated: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
