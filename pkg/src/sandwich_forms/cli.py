"""Command line front end.

Every subcommand reads a TOML problem file (see :mod:`sandwich_forms.problemfile`)
and writes a CSV report, preceded by ``#`` comment lines recording the
library version, the command, the SHA-256 of the problem file, the seed and
the flags.  Reports contain no timestamps and are byte-identical across runs.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .capacity import capacity, equilibrium_potential
from .core import ZERO_TOL, killing_weights
from .decomposition import active_main_part, killing_part
from .domination import DEFAULT_TIMES, dominates_form, dominates_semigroup, semigroups, spectrum
from .errors import InternalInvariantViolation, SandwichFormsError
from .models import grid2d_laplacian, interval_laplacian
from .sandwich import enumerate_sandwiched, killing_mode_check, recover_pair, sandwich_check
from .problemfile import ParseError, load

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_DISAGREE = 2
EXIT_MATH = 3
EXIT_USAGE = 64
EXIT_PARSE = 65
EXIT_NOINPUT = 66
EXIT_INTERNAL = 70
EXIT_CANTCREAT = 73

EXIT_CODES = """\
exit codes:
  0   success; for dominate and sandwich, the verdict holds
  1   the verdict fails (both criteria agree on it)
  2   form-level and semigroup-level criteria disagree
  3   mathematical precondition failed (not Markovian, not admissible, ...)
  64  usage error (bad flags, empty --times)
  65  malformed problem file (with line number when known)
  66  problem file cannot be read
  70  internal invariant violation
  73  report file cannot be written
"""

SWEEP_TIMES = (0.01, 0.1, 1.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "" if x is None else str(x)


class Report:
    def __init__(self, command, problem, flags):
        self.header = [
            f"sandwich-forms {__version__}",
            f"command: {command}",
            f"problem-sha256: {problem.digest}",
            f"seed: {int(problem.run.get('seed', 0))}",
        ] + [f"{k}: {_fmt_flag(v)}" for k, v in flags.items()]
        self.columns = None
        self.rows = []

    def table(self, *columns):
        self.columns = columns

    def row(self, *values):
        self.rows.append([_fmt(v) for v in values])

    def render(self):
        buf = io.StringIO()
        for line in self.header:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.rows)
        return buf.getvalue()


def _fmt_flag(v):
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return _fmt(v)


def _times(args, problem):
    if args.times is not None:
        raw = [s for s in args.times.replace(",", " ").split() if s]
        if not raw:
            raise UsageError("--times must list at least one time")
        try:
            times = [float(s) for s in raw]
        except ValueError:
            raise UsageError(f"--times is not a list of numbers: {args.times!r}") from None
    else:
        times = [float(t) for t in problem.run.get("times", DEFAULT_TIMES)]
        if not times:
            raise UsageError("[run] times must list at least one time")
    if any(t < 0 for t in times):
        raise UsageError("times must be nonnegative")
    return times


def _tol(args, problem):
    return float(args.tol if args.tol is not None else problem.run.get("tol", ZERO_TOL))


def _names(q, nodes):
    return [q.space.names[int(x)] for x in nodes]


def _need_form2(problem, what):
    if problem.form2 is None:
        raise ParseError(f"{what} needs a [form2] table")
    return problem.form2


def cmd_decompose(args, problem):
    q = problem.form
    qm = active_main_part(q)
    qk = killing_part(q)
    c = killing_weights(q)
    rep = Report("decompose", problem, {})
    rep.table("table", "row", "col", "value")
    zero = not np.any(c)
    rep.row("status", "killing_part", "", "zero" if zero else "nonzero")
    names = q.space.names
    for x in range(q.n):
        rep.row("killing", names[x], "", c[x])
    for tag, form in (("main_part", qm), ("killing_part", qk)):
        full = form.full()
        for x in form.support:
            for y in form.support:
                rep.row(tag, names[x], names[y], full[x, y])
    return rep, EXIT_OK


def cmd_dominate(args, problem):
    q, q2 = problem.form, _need_form2(problem, "dominate")
    times, tol = _times(args, problem), _tol(args, problem)
    fr = dominates_form(q, q2)
    sr = dominates_semigroup(q, q2, times, tol)
    rep = Report("dominate", problem, {"times": times, "tol": tol})
    rep.table("criterion", "verdict", "witness", "max_violation")
    rep.row("order_ideal", fr.order_ideal_ok, "", "")
    rep.row("positivity", fr.positivity_ok, "", fr.max_violation)
    rep.row("form", fr.form_verdict, _witness(q, fr.witness), "")
    rep.row("semigroup", sr.semigroup_verdict, _witness(q, sr.witness), sr.max_violation)
    agree = fr.form_verdict == sr.semigroup_verdict
    rep.row("agree", agree, "", "")
    if not agree:
        return rep, EXIT_DISAGREE
    return rep, EXIT_OK if fr.form_verdict else EXIT_FALSE


def _witness(q, w):
    """``x y`` for a node pair, ``t x y`` for a semigroup witness."""
    if w is None:
        return ""
    nodes = [q.space.names[int(v)] for v in w[-2:]]
    return " ".join(([_fmt(w[0])] if len(w) == 3 else []) + nodes)


def cmd_sandwich(args, problem):
    q = problem.form
    qprime = _need_form2(problem, "sandwich")
    times, tol = _times(args, problem), _tol(args, problem)
    if args.mode == "killing":
        verdict, _ = killing_mode_check(q, qprime, True, times, tol)
    else:
        verdict = sandwich_check(q, qprime, True, times, tol)
    rep = Report("sandwich", problem, {"mode": args.mode, "times": times, "tol": tol})
    rep.table("table", "key", "value", "detail")
    rep.row("verdict", "mode", verdict.mode, "")
    rep.row("verdict", "sandwiched", verdict.is_sandwiched, "")
    rep.row("verdict", "order_ideal", verdict.order_ideal_ok, "clause a")
    rep.row("verdict", "positive", verdict.positive_ok, "clause b")
    rep.row("verdict", "local", verdict.local_ok, "clause b")
    rep.row("verdict", "extension", verdict.extension_ok, "clause c")
    if verdict.witness is not None:
        clause, x, y = verdict.witness
        rep.row("verdict", "failing_clause", clause, " ".join(_names(q, (x, y))))
    rep.row("verdict", "semigroup", verdict.domination, "")
    if verdict.is_sandwiched:
        pair = recover_pair(q, qprime)
        for x in range(q.n):
            rep.row("pair", q.space.names[x], x in pair.O, pair.mu[x])
    if args.enumerate:
        grid = [float(v) for v in problem.run.get("mu_grid", [])]
        for k, (pair, _) in enumerate(enumerate_sandwiched(q, grid)):
            O = " ".join(_names(q, sorted(pair.O)))
            mu = " ".join(f"{q.space.names[x]}={_fmt(pair.mu[x])}" for x in sorted(pair.O) if pair.mu[x])
            rep.row("enumerated", k, O, mu)
    if verdict.is_sandwiched != verdict.domination:
        return rep, EXIT_DISAGREE
    return rep, EXIT_OK if verdict.is_sandwiched else EXIT_FALSE


def cmd_spectrum(args, problem):
    rep = Report("spectrum", problem, {})
    rep.table("form", "k", "eigenvalue")
    forms = [("form", problem.form)] + ([("form2", problem.form2)] if problem.form2 is not None else [])
    for tag, q in forms:
        for k, lam in enumerate(spectrum(q), start=1):
            rep.row(tag, k, lam)
    return rep, EXIT_OK


def cmd_capacity(args, problem):
    q = problem.form
    sets = problem.run.get("sets")
    if not sets:
        raise ParseError("capacity needs [run] sets, a list of node lists")
    rep = Report("capacity", problem, {})
    rep.table("set", "node", "capacity", "potential")
    for s in sets:
        nodes = [q.space.index(str(x)) if str(x) in q.space.names else None for x in s]
        if None in nodes:
            raise ParseError(f"[run] sets names an unknown node in {s}")
        label = " ".join(str(x) for x in s)
        cap = capacity(q, nodes)
        rep.row(label, "", cap, "")
        if np.isfinite(cap):
            f = equilibrium_potential(q, nodes)
            for x in range(q.n):
                rep.row(label, q.space.names[x], "", f[x])
    return rep, EXIT_OK


def _threads():
    raw = os.environ.get("SANDWICH_FORMS_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return min(4, os.cpu_count() or 1)


def _robin_factory(problem):
    t = problem.raw["form"]
    kind = t.get("type")
    scale = t.get("robin_scale", "absolute")
    if kind == "interval":
        n = int(t["n"])
        args = (t.get("V"), t.get("boundary_mass"))
        return lambda k, beta=0.0: interval_laplacian(n, k, *args, beta=beta, robin_scale=scale)
    if kind == "grid2d":
        nx, ny = int(t["nx"]), int(t["ny"])
        clamped = tuple(str(x) for x in t.get("clamped", []))
        return lambda k, beta=0.0: grid2d_laplacian(nx, ny, k, beta, clamped, t.get("V"),
                                                    t.get("boundary_mass"), scale)
    raise ParseError("sweep needs a [form] of type 'interval' or 'grid2d'")


def cmd_sweep(args, problem):
    make = _robin_factory(problem)
    betas = [float(b) for b in problem.run.get("betas", [])]
    if not betas:
        raise ParseError("sweep needs [run] betas")
    times = _times(args, problem) if args.times is not None or "times" in problem.run else list(SWEEP_TIMES)
    qd, qn = make("dirichlet"), make("neumann")
    sd, sn = semigroups(qd, times), semigroups(qn, times)
    modes = args.modes

    def one(beta):
        qb = make("robin", beta)
        sb = semigroups(qb, times)
        lam = spectrum(qb)[:modes]
        lower = float((sd - sb).max(initial=0.0))
        upper = float((sb - sn).max(initial=0.0))
        return beta, lam, lower, upper

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(one, betas))
    rep = Report("sweep", problem, {"times": times, "modes": modes})
    rep.table("beta", *[f"lambda_{k}" for k in range(1, modes + 1)], "violation_dirichlet", "violation_neumann")
    for beta, lam, lower, upper in results:
        rep.row(beta, *[lam[k] if k < lam.size else None for k in range(modes)], lower, upper)
    return rep, EXIT_OK


COMMANDS = {
    "decompose": (cmd_decompose, "main part, killing part and killing weights"),
    "dominate": (cmd_dominate, "form-level and semigroup-level domination of [form] by [form2]"),
    "sandwich": (cmd_sandwich, "is [form2] sandwiched between [form] and its main part"),
    "spectrum": (cmd_spectrum, "eigenvalues of [form] (and [form2])"),
    "capacity": (cmd_capacity, "capacities and equilibrium potentials of [run] sets"),
    "sweep": (cmd_sweep, "Robin weight sweep over [run] betas"),
}


def build_parser():
    parser = _Parser(prog="sandwich-forms", description=__doc__.split("\n\n")[0],
                     epilog=EXIT_CODES, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=EXIT_CODES,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("problem", help="TOML problem file")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
        if name in ("dominate", "sandwich", "sweep"):
            p.add_argument("--times", help="comma or space separated times (default from [run])")
        if name in ("dominate", "sandwich"):
            p.add_argument("--tol", type=float, help="entrywise semigroup tolerance")
        if name == "sandwich":
            p.add_argument("--mode", choices=("boundary", "killing"), default="boundary")
            p.add_argument("--enumerate", action="store_true",
                           help="also list the sandwiched forms over [run] mu_grid")
        if name == "sweep":
            p.add_argument("--modes", type=int, default=5, help="eigenvalues per row")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        problem = load(args.problem)
    except OSError as exc:
        print(f"sandwich-forms: cannot read {args.problem}: {exc.strerror}", file=sys.stderr)
        return EXIT_NOINPUT
    except ParseError as exc:
        print(f"sandwich-forms: {args.problem}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SandwichFormsError as exc:
        print(f"sandwich-forms: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    try:
        report, code = COMMANDS[args.command][0](args, problem)
    except UsageError as exc:
        print(f"sandwich-forms: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"sandwich-forms: {args.problem}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InternalInvariantViolation as exc:
        print(f"sandwich-forms: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except SandwichFormsError as exc:
        print(f"sandwich-forms: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except Exception as exc:  # noqa: BLE001
        print(f"sandwich-forms: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = report.render()
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"sandwich-forms: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_CANTCREAT
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
