"""``infogeo`` command line: check suites, distances, transport and the zoo listing.

Exit codes: 0 success, 1 a check (or the distance inequality) failed,
2 bad input (unknown suite, geometry, curve or connection; malformed
numbers; boundary points; invalid config).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from . import infogeo as IG
from . import suites as S
from . import zoo
from .errors import InfogeoError
from .geometry import alpha_family, dual_connection, levi_civita
from .report import CheckReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def load_config(path: str) -> dict:
    """Families declared in a JSON config, keyed by name.

    ``{"families": [{"name": ..., "type": "finite", "table": [[p0, dp/dtheta...], ...]},
                    {"name": ..., "type": "exponential", "atoms": [...], "weights": [...]}]}``

    Both kinds accept optional ``domain`` (``[low, high]``) and ``designated`` points.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("families", []), list):
        raise UsageError("config must be an object with a 'families' list")
    out = {}
    for item in data.get("families", []):
        try:
            name, kind = item["name"], item["type"]
        except (TypeError, KeyError) as exc:
            raise UsageError("each family needs 'name' and 'type'") from exc
        if name in zoo.names() or name in out:
            raise UsageError(f"family name {name!r} is already taken")
        domain = item.get("domain")
        designated = item.get("designated", ())
        try:
            if kind == "finite":
                out[name] = IG.mixture_family(item["table"], name, domain, designated)
            elif kind == "exponential":
                out[name] = IG.exponential_family_from_measure(item["atoms"], item["weights"], name,
                                                               domain, designated)
            else:
                raise UsageError(f"unknown family type {kind!r} (finite or exponential)")
        except KeyError as exc:
            raise UsageError(f"family {name!r} is missing {exc}") from exc
        except (InfogeoError, ValueError, TypeError) as exc:
            raise UsageError(f"family {name!r}: {exc}") from exc
    return out


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _default_seed() -> int:
    raw = os.environ.get("INFOGEO_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"INFOGEO_SEED must be an integer, got {raw!r}") from exc


def build_report(suite: str, ctx: S.SuiteContext, tolerance_scale: float = 1.0,
                 timing: bool = False) -> CheckReport:
    if suite not in S.SUITE_NAMES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(S.SUITE_NAMES)}")
    if ctx.geometry is not None and ctx.geometry not in S.known_geometries(ctx):
        raise UsageError(f"unknown geometry {ctx.geometry!r}")
    start = time.perf_counter()
    checks = S.run_suite(suite, ctx)
    elapsed = (time.perf_counter() - start) * 1000.0
    if ctx.geometry is not None and not checks:
        raise UsageError(f"suite {suite!r} has no checks for geometry {ctx.geometry!r}")
    if tolerance_scale != 1.0:
        checks = [c.scaled(tolerance_scale) for c in checks]
    meta = {
        "seed": ctx.seed,
        "version": __version__,
        "runtime_ms": elapsed if timing else None,
        "points": ctx.points,
        "geometry": ctx.geometry,
        "tolerance_scale": tolerance_scale,
    }
    return CheckReport(suite, checks, meta)


def _summary_line(c) -> str:
    status = "PASS" if c.passed else "FAIL"
    tol = "-" if c.tolerance is None else f"{c.tolerance:.1e}"
    return f"{status} {c.kind:7s} {c.geometry:14s} {c.name}  residual={c.residual:.3e} tol={tol}"


def cmd_check(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.points < 1:
        raise UsageError("--points must be positive")
    if not args.tolerance_scale > 0:
        raise UsageError("--tolerance-scale must be positive")
    families = load_config(args.config) if args.config else {}
    ctx = S.SuiteContext(seed=seed, points=args.points, geometry=args.geometry, families=families)
    report = build_report(args.suite, ctx, args.tolerance_scale, args.timing)
    text = report.to_json()
    if args.json == "-":
        sys.stdout.write(text)
    else:
        for c in report.checks:
            if args.verbose or not c.passed:
                print(_summary_line(c))
        failed = len(report.failures())
        print(f"suite {report.suite}: {len(report.checks)} checks, {failed} failed")
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------

def _parse_probs(text: str, family: str) -> np.ndarray:
    try:
        vals = np.array([float(v) for v in text.replace(" ", "").split(",") if v != ""])
    except ValueError as exc:
        raise UsageError(f"malformed probability vector {text!r}") from exc
    if family == "bernoulli":
        if vals.size != 1:
            raise UsageError("bernoulli takes a single success probability")
        vals = np.array([1.0 - vals[0], vals[0]])
    if vals.size < 2 or not np.all(np.isfinite(vals)):
        raise UsageError(f"malformed probability vector {text!r}")
    if abs(vals.sum() - 1.0) > 1e-9:
        raise UsageError(f"probabilities {text!r} do not sum to one")
    if np.any(vals <= 0.0):
        raise UsageError(f"{text!r} lies on the boundary of the simplex")
    return vals


def cmd_distance(args) -> int:
    p = _parse_probs(args.p, args.family)
    q = _parse_probs(args.q, args.family)
    if p.size != q.size:
        raise UsageError("p and q have different lengths")
    try:
        h = IG.hellinger(p, q)
        fr = IG.fisher_rao_distance(p, q)
        kl_pq, kl_qp = IG.kl_divergence(p, q), IG.kl_divergence(q, p)
    except InfogeoError as exc:
        raise UsageError(str(exc)) from exc
    print(f"hellinger {h:.12g}")
    print(f"fisher_rao {fr:.12g}")
    print(f"kl(p||q) {kl_pq:.12g}")
    print(f"kl(q||p) {kl_qp:.12g}")
    if h > fr:
        print("FAIL hellinger exceeds fisher_rao", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------

def primary_pair(entry):
    """(metric, connection, dual) that ``alpha:a`` interpolates between (a = -1 and a = 1)."""
    s = entry.structure
    if entry.kind == "family":
        return IG.fisher_field(s), IG.alpha_connection(s, -1.0), IG.alpha_connection(s, 1.0)
    label = "symplectic(flat)" if entry.name in S.HERMITIAN else next(iter(entry.connections))
    pairs = {p[0]: p for p in S.dual_pairs(entry)}
    _, g, conn, dual = pairs[label]
    return g, conn, dual


def resolve_connection(entry, choice: str):
    """Connection and its partner for ``lc``, ``dual`` or ``alpha:<a>``."""
    g, conn, dual = primary_pair(entry)
    if choice == "lc":
        dim = entry.structure.param_dim if entry.kind == "family" else entry.structure.dim
        lc = levi_civita(g, dim)
        return g, lc, dual_connection(g, lc)
    if choice == "dual":
        return g, dual, conn
    if choice.startswith("alpha:"):
        try:
            a = float(choice.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"malformed connection {choice!r}") from exc
        if entry.kind == "family":
            s = entry.structure
            return g, IG.alpha_connection(s, a), IG.alpha_connection(s, -a)
        return g, alpha_family(conn, dual, a), alpha_family(conn, dual, -a)
    raise UsageError(f"unknown connection {choice!r} (lc, dual or alpha:<a>)")


def _matrix_lines(label: str, M: np.ndarray) -> list:
    rows = ["[" + ", ".join(f"{v: .9f}" for v in row) + "]" for row in M.T]
    return [f"{label} {i}: {r}" for i, r in enumerate(rows)]


def cmd_transport(args) -> int:
    if args.geometry not in zoo.names():
        raise UsageError(f"unknown geometry {args.geometry!r}")
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    entry = zoo.get(args.geometry)
    loops = S.loops_for(entry)
    if args.loop not in loops:
        raise UsageError(f"unknown curve {args.loop!r} on {entry.name} (available: {', '.join(loops)})")
    g, conn, partner = resolve_connection(entry, args.connection)
    omega = getattr(entry.structure, "omega", None)
    try:
        res = S.transport_pair(g, conn, partner, loops[args.loop], args.steps, omega)
    except InfogeoError as exc:
        raise UsageError(str(exc)) from exc
    print(f"geometry {entry.name}  connection {args.connection}  loop {args.loop}  steps {args.steps}")
    for line in _matrix_lines("initial", res.start):
        print(line)
    for line in _matrix_lines("final", res.end_conn):
        print(line)
    for line in _matrix_lines("final(dual)", res.end_dual):
        print(line)
    print(f"metric_pairing_drift {res.metric_drift:.3e}")
    if res.omega_drift is not None:
        print(f"omega_pairing_drift {res.omega_drift:.3e}")
        print(f"omega_pairing_drift(dual) {res.dual_omega_drift:.3e}")
    if res.holonomy_angle is not None:
        print(f"holonomy_angle {res.holonomy_angle:.12g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# list
# ---------------------------------------------------------------------------

def cmd_list(args) -> int:
    print("geometries:")
    print(f"  {'name':14s} {'kind':11s} {'dim':>3s}  kahler  cosymplectic  contact  shs")
    for name in zoo.GEOMETRY_NAMES:
        e = zoo.get(name)
        s = e.structure
        kahler = getattr(s, "kahler", False)
        f = e.flags
        print(f"  {name:14s} {e.kind:11s} {s.dim:3d}  {_yn(kahler):6s}  {_yn(f.is_cosymplectic):12s}  "
              f"{_yn(f.is_contact):7s}  {_yn(f.is_shs)}")
    print("families:")
    for name in zoo.names():
        if name not in zoo.GEOMETRY_NAMES:
            fam = zoo.get(name).structure
            print(f"  {name:14s} parameters={fam.param_dim}")
    print("quantum:")
    for name in S.QUANTUM_GEOMETRIES:
        print(f"  {name}")
    print("suites: " + ", ".join(S.SUITE_NAMES))
    return EXIT_OK


def _yn(flag: bool) -> str:
    return "true" if flag else "false"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infogeo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"infogeo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run a check suite")
    p.add_argument("--suite", default="all", help="one of: " + ", ".join(S.SUITE_NAMES))
    p.add_argument("--geometry", help="restrict to one zoo entry, family or quantum system")
    p.add_argument("--points", type=int, default=100, help="random points per check (default 100)")
    p.add_argument("--seed", type=int, help="random seed (default: $INFOGEO_SEED or 0)")
    p.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--tolerance-scale", type=float, default=1.0,
                   help="multiply asserted tolerances (control floors are divided)")
    p.add_argument("--config", metavar="PATH", help="JSON file with extra families")
    p.add_argument("--timing", action="store_true", help="record runtime_ms in the report")
    p.add_argument("-v", "--verbose", action="store_true", help="print every check")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("distance", help="distances between two categorical distributions")
    p.add_argument("--family", default="simplex", choices=("simplex", "bernoulli"))
    p.add_argument("p", help="comma-separated probabilities")
    p.add_argument("q", help="comma-separated probabilities")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("transport", help="parallel transport around a closed loop")
    p.add_argument("--geometry", required=True)
    p.add_argument("--connection", default="lc", help="lc, dual or alpha:<a>")
    p.add_argument("--loop", default="circle", help="circle (all entries) or latitude (sphere2)")
    p.add_argument("--steps", type=int, default=S.TRANSPORT_STEPS)
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("list", help="list zoo entries, suites and flags")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:              # argparse errors exit with 2 already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfogeoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
