"""Command-line front end.

Every subcommand writes its data file plus a ``<stem>.manifest.json`` next to
it recording the command line, a digest of the resolved configuration, the
seed, the package version and the sha256 of every output.

Exit codes: 0 success, 2 usage or configuration error, 3 infeasible problem,
4 non-convergence. ``replay`` re-runs a manifest and exits 1 if any output
differs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import (
    BracketError,
    DegenerateFrontierError,
    DomainError,
    InfinitePenaltyError,
    NoEquilibriumError,
    NumericError,
)
from .game import FixedN, GameSpec, MixedStrategy, Poisson, TypeSpec, mixed_utility
from .pu_activity import GEModel, Unconstrained, admissible_region, restriction_frontier
from .simulator import BackoffPolicy, SimConfig, best_response_dynamics, run
from .single_type import (
    alpha_star_fixedN,
    alpha_star_poisson,
    p_eq_fixed,
    p_eq_poisson,
    p_opt_fixedN,
    p_opt_poisson,
    utility_on_fixedN,
    utility_on_poisson,
)
from .specfun import Tolerance
from .throughput import backoff_throughput, throughput_fixedN, throughput_poisson
from .two_type import TwoTypeConfig, pareto_frontier, pareto_search, utilities_two_types

OUT_DIR_ENV = "POISSONALOHA_OUTPUT_DIR"

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NONCONVERGED = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class ConfigError(UsageError):
    pass


class NotConverged(Exception):
    pass


class ReplayMismatch(Exception):
    pass


def fmt(x) -> str:
    """12 significant digits; integers and strings pass through."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return f"{x:.12g}"
    return str(x)


def csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def json_bytes(obj) -> bytes:
    def clean(v):
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, (np.floating, float)):
            return float(fmt(v)) if math.isfinite(v) else str(v)
        if isinstance(v, np.integer):
            return int(v)
        return v

    return (json.dumps(clean(obj), indent=2, sort_keys=True) + "\n").encode("utf-8")


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()


class Outputs:
    """Collects output files and writes the manifest."""

    def __init__(self, primary: Path, argv, config: dict, seed=None, config_digest: str | None = None):
        self.primary = primary
        self.argv = list(argv)
        self.config = config
        self.seed = seed
        self.config_digest = config_digest or digest(config)
        self.files: list[tuple[Path, str]] = []

    def write(self, path: Path, data: bytes):
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
        self.files.append((path, hashlib.sha256(data).hexdigest()))

    def manifest_path(self) -> Path:
        return self.primary.with_name(self.primary.stem + ".manifest.json")

    def finish(self):
        manifest = {
            "command": ["poissonaloha", *self.argv],
            "config": self.config,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "version": __version__,
            "outputs": [{"path": str(p), "sha256": h} for p, h in self.files],
        }
        path = self.manifest_path()
        path.write_bytes(json_bytes(manifest))
        return path


def default_out(name: str) -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / name


def parse_population(text: str):
    """``fixed:N``, ``fixed:N1,N2``, ``poisson:LAMBDA``."""
    try:
        kind, value = text.split(":", 1)
        if kind == "fixed":
            parts = [int(v) for v in value.split(",")]
            if len(parts) not in (1, 2):
                raise ValueError
            return ("fixed", parts)
        if kind == "poisson":
            return ("poisson", [float(value)])
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"population must be fixed:N, fixed:N1,N2 or poisson:LAMBDA, got {text!r}")


def parse_sweep(text: str) -> list[float]:
    """``a:b`` (inclusive integer range), ``a:b:step`` or a comma list."""
    try:
        if ":" in text:
            parts = [float(v) for v in text.split(":")]
            if len(parts) == 2:
                parts.append(1.0)
            a, b, s = parts
            if s <= 0:
                raise ValueError
            n = int(math.floor((b - a) / s + 1e-9)) + 1
            return [a + i * s for i in range(max(n, 0))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}") from None


def _num(v: float):
    return int(v) if float(v).is_integer() else v


# ---------------------------------------------------------------------------
# subcommands


def cmd_utility_curve(args, argv):
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    if args.kmax is None or len(args.kmax) not in (1, 2):
        raise UsageError("--kmax takes one value (single type) or two (two types)")
    grid = np.linspace(0.0, 1.0, args.grid)
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    out = Path(args.out) if args.out else default_out("utility_curve.csv")
    if len(args.kmax) == 1:
        game = GameSpec.single(Poisson(args.lam), args.kmax[0], args.alpha)
        rows = [(p, mixed_utility(game, 0, MixedStrategy((float(p),)))) for p in grid]
        data = csv_bytes(["p", "U"], rows)
    else:
        if args.r1 is None:
            raise UsageError("two types need --r1")
        cfg = TwoTypeConfig.poisson(args.lam, args.r1, args.kmax[0], args.kmax[1], args.R1, args.R2)
        rows = []
        for p1 in grid:
            for p2 in grid:
                u1, u2 = utilities_two_types(float(p1), float(p2), cfg, args.alpha, args.beta)
                rows.append((p1, p2, u1, u2))
        data = csv_bytes(["p1", "p2", "U1", "U2"], rows)
    outs = Outputs(out, argv, config)
    outs.write(out, data)
    outs.finish()


def cmd_equilibrium(args, argv):
    kind, vals = args.population
    K = args.kmax
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    out = Path(args.out) if args.out else default_out("equilibrium.json")
    result = {"population": f"{kind}:{','.join(fmt(v) for v in vals)}", "kmax": K}
    if kind == "fixed":
        if len(vals) != 1:
            raise UsageError("equilibrium takes a single population size")
        N = vals[0]
        if args.alpha is None:
            if K >= N - 1:
                raise InfinitePenaltyError(f"K_max={K} >= N-1={N - 1}: every transmission succeeds")
            alpha = alpha_star_fixedN(N, K, args.form)
            result["p_opt"] = p_opt_fixedN(N, K)
            result["alpha_star"] = alpha
        else:
            alpha = args.alpha
        p_eq = p_eq_fixed(alpha, N, K)
        residual = abs(utility_on_fixedN(p_eq, N, K, alpha))
    else:
        lam = vals[0]
        if args.alpha is None:
            if not lam > K:
                raise InfinitePenaltyError(f"K_max={K} is not below lambda={lam}")
            alpha = alpha_star_poisson(lam, K, args.form)
            result["p_opt"] = p_opt_poisson(lam, K)
            result["alpha_star"] = alpha
        else:
            alpha = args.alpha
        p_eq = p_eq_poisson(alpha, lam, K)
        residual = abs(utility_on_poisson(p_eq, lam, K, alpha))
    result.update(p_eq=p_eq, residual=residual)
    if args.alpha is not None:
        result["alpha"] = args.alpha
    outs = Outputs(out, argv, config)
    outs.write(out, json_bytes(result))
    outs.finish()
    sys.stdout.write(json_bytes(result).decode())


def _two_type_config(args) -> TwoTypeConfig:
    kind, vals = args.population
    if args.kmax is None or len(args.kmax) != 2:
        raise UsageError("--kmax needs two values K1 K2")
    K1, K2 = args.kmax
    if kind == "fixed":
        if len(vals) != 2:
            raise UsageError("two-type fixed population is fixed:N1,N2")
        return TwoTypeConfig.fixed(vals[0], vals[1], K1, K2, args.R1, args.R2)
    if args.r1 is None:
        raise UsageError("a Poisson two-type population needs --r1")
    return TwoTypeConfig.poisson(vals[0], args.r1, K1, K2, args.R1, args.R2)


def cmd_frontier(args, argv):
    cfg = _two_type_config(args)
    if args.mode in ("restriction", "both") and args.budget is None:
        raise UsageError(f"--mode {args.mode} needs --budget")
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    out = Path(args.out) if args.out else default_out("frontier.csv")
    rows = []
    region = None
    pareto = None
    if args.mode in ("pareto", "both"):
        pareto = pareto_frontier(cfg)
        for x, y in pareto.vertices:
            rows.append(("pareto_analytic", x, y, "", ""))
        if args.search_grid:
            for pt in pareto_search(cfg, args.search_grid):
                rows.append(("pareto_search", pt.p1, pt.p2, pt.U1, pt.U2))
    if args.mode in ("restriction", "both"):
        restr = restriction_frontier(cfg, args.budget)
        if restr is not Unconstrained:
            for x, y in (restr.endpoints[0], restr.endpoints[1]):
                rows.append(("restriction", x, y, "", ""))
    if args.mode == "both":
        region = admissible_region(cfg, args.budget, pareto)
        for x, y in zip(region.p1, region.operating):
            rows.append(("operating", x, y, "", ""))
    outs = Outputs(out, argv, config)
    outs.write(out, csv_bytes(["series", "p1", "p2", "U1", "U2"], rows))
    if region is not None:
        info = {"regime": region.regime.value, "crossings": list(region.crossings)}
        outs.write(out.with_name(out.stem + ".region.json"), json_bytes(info))
        sys.stdout.write(json_bytes(info).decode())
    outs.finish()


def cmd_throughput(args, argv):
    if args.n is not None and args.lam is not None:
        raise UsageError("give either --n or --lambda")
    values = args.n if args.n is not None else args.lam
    label = "N" if args.n is not None else "lambda"
    if not values:
        raise UsageError("empty sweep")
    if args.scheme != "game-poisson" and label == "lambda":
        raise UsageError(f"--scheme {args.scheme} sweeps --n")
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    out = Path(args.out) if args.out else default_out("throughput.csv")
    rows = []
    for v in values:
        if args.scheme == "game-fixed":
            N = int(v)
            res = throughput_fixedN(N, args.kmax, p_opt_fixedN(N, args.kmax) if N >= 2 else 1.0)
            rows.append((_num(v), "game-fixed", res.value, res.stderr))
        elif args.scheme == "game-poisson":
            res = throughput_poisson(float(v), args.kmax)
            rows.append((_num(v), "game-poisson", res.value, res.stderr))
        else:
            for w0 in args.w0:
                res = backoff_throughput(int(v), w0, args.max_stage, args.kmax, args.slots, args.seed)
                rows.append((_num(v), f"backoff-w{w0}", res.value, res.stderr))
    outs = Outputs(out, argv, config, seed=args.seed if args.scheme == "backoff" else None)
    outs.write(out, csv_bytes([label, "scheme", "throughput", "stderr"], rows))
    outs.finish()


def cmd_converge(args, argv):
    if not 0 < args.step <= 1:
        raise UsageError("--step must lie in (0, 1]")
    alpha = args.alpha if args.alpha is not None else alpha_star_fixedN(args.n, args.kmax)
    game = GameSpec.single(FixedN(args.n), args.kmax, alpha)
    trace = best_response_dynamics(game, MixedStrategy((args.p0,)), args.step, args.iters, Tolerance(args.tol))
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    config["alpha_used"] = alpha
    out = Path(args.out) if args.out else default_out("converge.csv")
    rows = [(k, p[0], u[0]) for k, p, u in trace.iterations]
    outs = Outputs(out, argv, config)
    outs.write(out, csv_bytes(["step", "p", "U_ON"], rows))
    outs.finish()
    p_eq = p_eq_fixed(alpha, args.n, args.kmax)
    sys.stdout.write(
        json_bytes({"converged": trace.converged, "final_p": trace.final_p[0], "p_eq": p_eq}).decode()
    )
    if not trace.converged:
        raise NotConverged(f"no convergence within {args.iters} iterations")


# ---------------------------------------------------------------------------
# simulate: YAML config

SIM_SCHEMA = """\
population: {fixed: N} | {poisson: LAMBDA}     # required
types:                                          # optional; default one type
  - {r: 1.0, R: 1.0, kmax: 0, penalty: 0.0}
strategy: {p: [P, ...]} | {backoff: {w0: 32, max_stage: 5}}   # required
pu: {p_t: P_T, rho: RHO}                        # optional
slots: 100000
seed: 0
population_redraw: per-slot | fixed-episode
full_rate_max_population: null | INT
"""


def _line_index(node, path=(), out=None):
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            p = path + (k.value,)
            out[p] = k.start_mark.line + 1
            _line_index(v, p, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            out[path + (i,)] = v.start_mark.line + 1
            _line_index(v, path + (i,), out)
    return out


def load_sim_config(text: str, overrides: dict | None = None) -> tuple[SimConfig, dict]:
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark else "unknown line"
        raise ConfigError(f"config parse error at {where}: {getattr(exc, 'problem', exc)}") from None
    lines = _line_index(root) if root is not None else {}

    def fail(path, msg):
        line = lines.get(tuple(path))
        where = f"line {line}, " if line else ""
        raise ConfigError(f"config error ({where}field '{'.'.join(map(str, path))}'): {msg}")

    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    data = dict(data)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    known = {"population", "types", "strategy", "pu", "slots", "seed", "population_redraw", "full_rate_max_population"}
    for k in data:
        if k not in known:
            fail([k], f"unknown field; expected one of {sorted(known)}")

    pop = data.get("population")
    if not isinstance(pop, dict) or len(pop) != 1 or next(iter(pop)) not in ("fixed", "poisson"):
        fail(["population"], "expected {fixed: N} or {poisson: LAMBDA}")
    try:
        population = FixedN(pop["fixed"]) if "fixed" in pop else Poisson(float(pop["poisson"]))
    except (DomainError, TypeError, ValueError) as exc:
        fail(["population", next(iter(pop))], str(exc))

    types_raw = data.get("types", [{"r": 1.0}])
    if not isinstance(types_raw, list) or not types_raw:
        fail(["types"], "expected a non-empty list of type mappings")
    types = []
    for i, t in enumerate(types_raw):
        if not isinstance(t, dict):
            fail(["types", i], "expected a mapping")
        extra = set(t) - {"r", "R", "kmax", "penalty"}
        if extra:
            fail(["types", i, sorted(extra)[0]], "unknown type field")
        try:
            types.append(TypeSpec(float(t.get("r", 1.0)), float(t.get("R", 1.0)), t.get("kmax", 0), float(t.get("penalty", 0.0))))
        except (DomainError, TypeError, ValueError) as exc:
            fail(["types", i], str(exc))
    try:
        game = GameSpec(population, tuple(types))
    except DomainError as exc:
        fail(["types"], str(exc))

    strat = data.get("strategy")
    if not isinstance(strat, dict) or len(strat) != 1 or next(iter(strat)) not in ("p", "backoff"):
        fail(["strategy"], "expected {p: [...]} or {backoff: {w0, max_stage}}")
    try:
        if "p" in strat:
            p = strat["p"]
            strategy = MixedStrategy(tuple(p) if isinstance(p, list) else (p,))
        else:
            b = strat["backoff"] or {}
            strategy = BackoffPolicy(int(b.get("w0", 32)), int(b.get("max_stage", 5)))
    except (DomainError, TypeError, ValueError) as exc:
        fail(["strategy", next(iter(strat))], str(exc))

    pu = None
    if data.get("pu") is not None:
        raw = data["pu"]
        if not isinstance(raw, dict) or set(raw) != {"p_t", "rho"}:
            fail(["pu"], "expected {p_t: P_T, rho: RHO}")
        try:
            pu = GEModel(float(raw["p_t"]), float(raw["rho"]))
        except (DomainError, TypeError, ValueError) as exc:
            fail(["pu"], str(exc))

    for key in ("slots", "seed"):
        v = data.get(key, SimConfig.__dataclass_fields__[key].default)
        if isinstance(v, bool) or not isinstance(v, int):
            fail([key], "expected an integer")
    fr = data.get("full_rate_max_population")
    if fr is not None and (isinstance(fr, bool) or not isinstance(fr, int)):
        fail(["full_rate_max_population"], "expected an integer or null")
    try:
        cfg = SimConfig(
            game,
            strategy,
            pu,
            data.get("slots", 100_000),
            data.get("seed", 0),
            data.get("population_redraw", "per-slot"),
            fr,
        )
    except DomainError as exc:
        raise ConfigError(f"config error: {exc}") from None
    return cfg, data


def cmd_simulate(args, argv):
    path = Path(args.config)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    cfg, resolved = load_sim_config(raw.decode("utf-8"), {"seed": args.seed, "slots": args.slots})
    out_dir = Path(args.out) if args.out else Path(os.environ.get(OUT_DIR_ENV, ".")) / "simulate"
    report = run(cfg).to_dict()
    report["config"] = resolved
    primary = out_dir / "report.json"
    outs = Outputs(primary, argv, resolved, seed=cfg.seed, config_digest=digest(resolved))
    outs.write(primary, json_bytes(report))
    outs.finish()


def cmd_replay(args, argv):
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        command = manifest["command"][1:]
        expected = {o["path"]: o["sha256"] for o in manifest["outputs"]}
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read manifest: {exc}") from None
    if command and command[0] == "replay":
        raise UsageError("manifest records a replay")
    code = main(command)
    if code != EXIT_OK:
        raise ReplayMismatch(f"replayed command exited with {code}")
    bad = [p for p, h in expected.items() if not Path(p).exists() or hashlib.sha256(Path(p).read_bytes()).hexdigest() != h]
    if bad:
        raise ReplayMismatch("outputs differ: " + ", ".join(bad))
    sys.stdout.write(f"replayed {len(expected)} output(s), all identical\n")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poissonaloha", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("utility-curve", help="average utility against transmit probability (Poisson game)")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--kmax", type=int, nargs="+", required=True, help="K (one type) or K1 K2 (two types)")
    p.add_argument("--r1", type=float)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--R1", type=float, default=1.0)
    p.add_argument("--R2", type=float, default=1.0)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_utility_curve)

    p = sub.add_parser("equilibrium", help="optimal p, penalty and equilibrium p")
    p.add_argument("--population", type=parse_population, required=True, help="fixed:N or poisson:LAMBDA")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--form", choices=("indifference", "printed"), default="indifference")
    p.add_argument("--out")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("frontier", help="two-type Pareto and restriction frontiers")
    p.add_argument("--mode", choices=("pareto", "restriction", "both"), default="pareto")
    p.add_argument("--population", type=parse_population, required=True, help="fixed:N1,N2 or poisson:LAMBDA")
    p.add_argument("--r1", type=float)
    p.add_argument("--kmax", type=int, nargs=2, required=True, metavar=("K1", "K2"))
    p.add_argument("--R1", type=float, default=1.0)
    p.add_argument("--R2", type=float, default=1.0)
    p.add_argument("--budget", type=float, help="N_on_bar * P_col^Th")
    p.add_argument("--search-grid", type=int, default=0, help="lattice size for the grid-search Pareto set (0 = off)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("throughput", help="throughput sweeps for the game schemes and backoff")
    p.add_argument("--scheme", choices=("game-fixed", "game-poisson", "backoff"), required=True)
    p.add_argument("--n", type=parse_sweep, help="sweep of N, e.g. 2:8 or 2,5,10")
    p.add_argument("--lambda", dest="lam", type=parse_sweep)
    p.add_argument("--kmax", type=int, default=0)
    p.add_argument("--w0", type=int, nargs="+", default=[32])
    p.add_argument("--max-stage", type=int, default=5)
    p.add_argument("--slots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_throughput)

    p = sub.add_parser("converge", help="best-response dynamics trace")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("simulate", help="Monte Carlo run from a YAML config", epilog="config schema:\n" + SIM_SCHEMA,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--slots", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="re-run the command in a manifest and verify its outputs")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, argv)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfinitePenaltyError, NoEquilibriumError, DegenerateFrontierError, BracketError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NotConverged, NumericError) as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except ReplayMismatch as exc:
        print(f"replay mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
