"""Command-line front end: constants, simulations, censuses, closed forms, file analysis.

Exit codes: 0 success, 1 usage or input error, 2 census violation,
3 degenerate input during analysis, 4 counting-identity mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import constants, experiments, theory
from .cycles import enumerate_cycles, enumerate_disjoint_pairs
from .errors import (CensusViolation, DegenerateProjection, EnumerationCapExceeded,
                     InvalidProbability, OddCrossingSum, ParseError, RandLinkError)
from .geometry import directional_writhe, linking_number
from .models import (LinearEmbedding, complete_graph, dump_embedding, load_embedding,
                     tripartite_331)

log = logging.getLogger("randlink")

EXIT_OK, EXIT_USAGE, EXIT_CENSUS, EXIT_DEGENERATE, EXIT_IDENTITY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def int_range(text: str) -> list[int]:
    """'7' -> [7]; '6..9' -> [6, 7, 8, 9]."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


# --- output -----------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render(rows: list[dict], config: dict, fmt: str, columns: list[str] | None = None) -> str:
    if columns is None:
        columns = list(dict.fromkeys(k for row in rows for k in row))
    if fmt == "json":
        doc = {"config": config,
               "results": [{c: _json_value(row.get(c)) for c in columns} for row in rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def emit(args, rows: list[dict], config: dict, columns: list[str] | None = None):
    text = render(rows, config, args.format, columns)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args, **extra) -> dict:
    # thread count is left out so output is identical at any parallelism
    skip = {"func", "format", "out", "verbose", "threads"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip}
    cfg.update(extra)
    return cfg


def _params(args) -> theory.TheoryParams:
    return theory.TheoryParams(q=args.q, qprime=args.qprime)


# --- commands ---------------------------------------------------------------


def _estimate_row(est: constants.ConstantEstimate, method: str, seed: int) -> dict:
    lo, hi = est.interval
    return {"name": est.name, "method": method, "estimate": est.estimate,
            "ci99_halfwidth": est.ci99_halfwidth, "ci99_low": lo, "ci99_high": hi,
            "samples": est.samples, "seed": seed, "resamples": est.resamples}


def cmd_estimate_q(args) -> int:
    rows = []
    tri = constants.estimate_q_triangles(args.samples, args.seed, args.threads)
    rows.append(_estimate_row(tri, "triangles", args.seed))
    if args.method == "configs":
        s = constants.estimate_s(args.samples, args.seed, args.threads)
        u = constants.estimate_u(args.samples, args.seed, args.threads)
        v = constants.estimate_v(args.samples, args.seed, args.threads)
        q = constants.derive_q(s, u, v)
        rows += [_estimate_row(e, "configs", args.seed) for e in (s, u, v, q)]
        gap = abs(q.estimate - tri.estimate)
        allowed = q.ci99_halfwidth + tri.ci99_halfwidth
        rows.append({"name": "q_route_gap", "method": "triangles-vs-configs", "estimate": gap,
                     "ci99_halfwidth": allowed, "samples": args.samples, "seed": args.seed,
                     "agree": gap <= allowed})
    emit(args, rows, _config(args))
    return EXIT_OK


def cmd_estimate_qprime(args) -> int:
    ests = constants.estimate_all(args.samples, args.seed, args.threads)
    rows = [_estimate_row(e, "configs", args.seed) for e in ests.values()]
    emit(args, rows, _config(args))
    return EXIT_OK


def _simulation_specs(args):
    params = _params(args)
    common = dict(samples=args.samples, seed=args.seed, writhe=args.writhe,
                  directions=args.directions, params=params, threads=args.threads,
                  allow_large=args.allow_large, timing=args.timing)
    if args.graph in ("complete", "gnp"):
        if args.n is None:
            raise UsageError(f"--graph {args.graph} needs --n")
        if args.graph == "gnp" and args.p is None:
            raise UsageError("--graph gnp needs --p")
        return [experiments.SimulationSpec(args.graph, n=n, p=args.p, **common) for n in args.n]
    if args.graph == "cycles":
        if args.k is None or args.l is None:
            raise UsageError("--graph cycles needs --k and --l")
        return [experiments.SimulationSpec("cycles", k=args.k, l=args.l, **common)]
    return [experiments.SimulationSpec("tripartite331", **common)]


def cmd_simulate(args) -> int:
    specs = _simulation_specs(args)
    rows = []
    for spec in specs:
        log.info("simulating %s n=%s p=%s with %d samples", spec.model, spec.n, spec.p,
                 spec.samples)
        rows.append(experiments.simulate(spec))
    columns = list(experiments.SIMULATE_COLUMNS)
    if args.writhe:
        columns[-1:-1] = experiments.WRITHE_COLUMNS
    emit(args, rows, _config(args), columns)
    return EXIT_OK


def _cmd_census(which: str, args) -> int:
    try:
        report = experiments.census(which, args.samples, args.seed, _params(args), args.threads)
    except CensusViolation as exc:
        print(f"census violation: {exc}", file=sys.stderr)
        if exc.coords is not None:
            g = complete_graph(6) if which == "k6" else tripartite_331()
            print("offending embedding:", file=sys.stderr)
            sys.stderr.write(dump_embedding(LinearEmbedding(g, exc.coords)))
        return EXIT_CENSUS
    emit(args, report.rows(), _config(args))
    return EXIT_OK


def cmd_census_k6(args) -> int:
    return _cmd_census("k6", args)


def cmd_census_k331(args) -> int:
    return _cmd_census("k331", args)


def cmd_theory(args) -> int:
    if args.graph == "gnp":
        if args.p is None:
            raise UsageError("--graph gnp needs --p")
        if not 0.0 < args.p <= 1.0:
            raise UsageError(f"--p must lie in (0, 1], got {args.p}")
    if min(args.n) < 6:
        raise UsageError("closed forms need n >= 6")
    rows = experiments.theory_rows(args.graph, args.n, args.p, _params(args))
    emit(args, rows, _config(args))
    return EXIT_OK


def _fmt_cycle(c) -> str:
    return "-".join(str(v) for v in c)


def cmd_analyze(args) -> int:
    try:
        emb = load_embedding(Path(args.file).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from None
    rows = []
    for pair in enumerate_disjoint_pairs(emb.graph):
        try:
            lk = linking_number(emb.polygon(pair.first), emb.polygon(pair.second))
        except (DegenerateProjection, OddCrossingSum) as exc:
            print(f"degenerate projection for cycle pair {_fmt_cycle(pair.first)} / "
                  f"{_fmt_cycle(pair.second)}: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
        rows.append({"kind": "pair", "first": _fmt_cycle(pair.first),
                     "second": _fmt_cycle(pair.second), "value": lk})
    for cycle in enumerate_cycles(emb.graph):
        try:
            wr = directional_writhe(emb.polygon(cycle))
        except DegenerateProjection as exc:
            print(f"degenerate projection for cycle {_fmt_cycle(cycle)}: {exc}", file=sys.stderr)
            return EXIT_DEGENERATE
        rows.append({"kind": "cycle", "first": _fmt_cycle(cycle), "second": "", "value": wr})
    emit(args, rows, _config(args), ["kind", "first", "second", "value"])
    return EXIT_OK


def cmd_identity_check(args) -> int:
    rows = experiments.identity_rows(args.n)
    emit(args, rows, _config(args))
    bad = [r["n"] for r in rows if not r["equal"]]
    if bad:
        print(f"counting identity fails for n = {bad}", file=sys.stderr)
        return EXIT_IDENTITY
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _output_flags(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")


def _run_flags(p, samples: int):
    p.add_argument("--samples", type=positive_int, default=samples)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--threads", type=positive_int, default=None,
                   help="worker threads (default: all available)")


def _theory_flags(p):
    p.add_argument("--q", type=float, default=theory.Q_REFERENCE)
    p.add_argument("--qprime", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="randlink",
                     description="Linking and writhe statistics of random linear graph embeddings.")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate-q", help="Monte Carlo estimate of q")
    _run_flags(p, 10_000_000)
    p.add_argument("--method", choices=("triangles", "configs"), default="triangles",
                   help="configs also reports s, u, v and the second route to q")
    _output_flags(p)
    p.set_defaults(func=cmd_estimate_q)

    p = sub.add_parser("estimate-qprime", help="Monte Carlo estimates of s, u, v, w, q and q'")
    _run_flags(p, 10_000_000)
    _output_flags(p)
    p.set_defaults(func=cmd_estimate_qprime)

    p = sub.add_parser("simulate", help="sample embeddings and compare with closed forms")
    p.add_argument("--graph", choices=("complete", "gnp", "cycles", "tripartite331"),
                   required=True)
    p.add_argument("--n", type=int_range, help="vertex count N or range LO..HI")
    p.add_argument("--p", type=float, help="edge probability for gnp")
    p.add_argument("--k", type=int, help="first cycle length for --graph cycles")
    p.add_argument("--l", type=int, help="second cycle length for --graph cycles")
    _run_flags(p, 1000)
    p.add_argument("--writhe", action="store_true", help="also estimate the sum of squared writhe")
    p.add_argument("--directions", type=positive_int, default=100,
                   help="sphere directions per embedding for writhe")
    p.add_argument("--allow-large", action="store_true",
                   help="permit n above the enumeration cap")
    p.add_argument("--timing", action="store_true",
                   help="fill wall_ms (output then differs between runs)")
    _theory_flags(p)
    _output_flags(p)
    p.set_defaults(func=cmd_simulate)

    for name, func, help_ in (("census-k6", cmd_census_k6, "Hopf-link census of random K6"),
                              ("census-k331", cmd_census_k331,
                               "nontrivial-link census of random K331")):
        p = sub.add_parser(name, help=help_)
        _run_flags(p, 1000)
        _theory_flags(p)
        _output_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("theory", help="closed-form expected values")
    p.add_argument("--graph", choices=("complete", "gnp"), required=True)
    p.add_argument("--n", type=int_range, required=True)
    p.add_argument("--p", type=float)
    _theory_flags(p)
    _output_flags(p)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("analyze", help="linking numbers and +z writhe of an embedding file")
    p.add_argument("file")
    _output_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("identity-check", help="verify the pair-counting identity exactly")
    p.add_argument("--n", type=int_range, default=int_range("6..20"))
    _output_flags(p)
    p.set_defaults(func=cmd_identity_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"randlink: error: {exc}\n")
    except ParseError as exc:
        print(f"randlink: cannot parse embedding: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EnumerationCapExceeded, InvalidProbability, ValueError) as exc:
        print(f"randlink: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RandLinkError as exc:
        print(f"randlink: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    log.info("done in %.1f s", time.perf_counter() - start)
    return code


if __name__ == "__main__":
    sys.exit(main())
