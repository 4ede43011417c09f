"""Command-line experiment driver.

Every subcommand accepts ``--config FILE``, a flat ``key = value`` file
(``#`` starts a comment) whose keys are the long option names with dashes
or underscores. Command-line flags override file values; unknown keys are
an error. With ``--out FILE`` a CSV is written together with
``FILE.json`` holding the fully resolved configuration.

Exit codes: 0 success, 1 configuration or validation error, 2 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bivariate, error_bounds, kantorovich, statistical, testfunctions
from .kantorovich import BasisSpec, OperatorConfig
from .pq_core import DomainError, NumericalFailure, PQParams


class ConfigError(ValueError):
    pass


# --- parsing helpers -------------------------------------------------------

def parse_grid(text: str) -> list[float]:
    """``a:b:step`` (both ends inclusive within half a step) or a comma list."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid {text!r} must look like a:b:step")
        a, b, step = (float(v) for v in parts)
        if step <= 0 or b < a:
            raise ConfigError(f"grid {text!r} needs step > 0 and b >= a")
        count = int(math.floor((b - a) / step + 0.5))
        return [a + i * step for i in range(count + 1)]
    return parse_floats(text)


def parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def parse_ints(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def parse_set(text: str) -> error_bounds.SetE:
    """``halfline``, ``points:1,2`` or ``intervals:0-1,3-inf``."""
    text = str(text).strip()
    if text in ("halfline", "[0,inf)"):
        return error_bounds.SetE.halfline()
    kind, _, body = text.partition(":")
    if kind == "points":
        return error_bounds.SetE.of_points(parse_floats(body))
    if kind == "intervals":
        ivs = []
        for piece in body.split(","):
            a, _, b = piece.partition("-")
            ivs.append((float(a), math.inf if b == "inf" else float(b)))
        return error_bounds.SetE.of_intervals(ivs)
    raise ConfigError(f"cannot parse set {text!r}")


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return v


def write_csv(path: str, columns, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c, "")) for c in columns])


def write_sidecar(path: str, resolved: dict) -> None:
    with open(path + ".json", "w", encoding="utf-8") as fh:
        json.dump(resolved, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def worker_count() -> int:
    cap = os.environ.get("PQK_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            raise ConfigError(f"PQK_THREADS must be an integer, got {cap!r}") from None
    return n


def ordered_map(fn, items):
    """Map over ``items`` on a worker pool; results keep input order."""
    items = list(items)
    workers = worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- option table ----------------------------------------------------------

# name -> (default, help). Defaults of None mean "required".
COMMON = {
    "series_tol": (1e-16, "basis-weight tail cutoff"),
    "integral_tol": (1e-14, "Jackson integral tail tolerance"),
    "max_terms": (10000, "series term budget"),
    "negative_cell_policy": ("warn", "warn | error"),
    "basis": ("big-E:q-triangular", "exponential kind and power coefficient"),
    "out": ("", "CSV output path"),
}

OPTIONS = {
    "moments": {
        "n": (None, "operator index"), "p": (None, "p"), "q": (None, "q"),
        "x": (None, "evaluation point"), "nu": (2, "moment order 0, 1 or 2"),
    },
    "converge": {
        "scheme": ("smooth", "parameter scheme"),
        "n_list": ("10,20,50,100", "operator indices"),
        "grid": ("0:2:0.05", "x grid a:b:step"),
        "eps": (0.01, "exception threshold"),
        "horizon": (10000, "density horizon N"),
        "validate": (False, "also evaluate the series operator"),
    },
    "stat": {
        "scheme": ("disturbed-squares", "parameter scheme"),
        "eps": (0.01, "exception threshold"),
        "horizons": ("1000,10000,100000,1000000", "density horizons"),
        "x_star": ("0.5,1", "points for the delta_n sequences"),
    },
    "bound": {
        "theorem": ("modulus", "modulus or lipschitz (also 4.1 / 4.2)"),
        "functions": ("t,t2,exp,rational", "test functions"),
        "scheme": ("smooth", "parameter scheme"),
        "n_list": ("5,10,20,50", "operator indices"),
        "grid": ("0,0.5,1,2", "evaluation points"),
        "alpha": ("0.5,1", "exponents for the Lipschitz bound"),
        "sets": ("halfline;points:1,2", "sets E for the Lipschitz bound, separated by ';'"),
        "m": ("", "M for the Lipschitz bound; empty means measured"),
        "domain_end": (2.0, "modulus / maximal-function domain end"),
        "grid_step": (1.0 / 512, "modulus grid step"),
    },
    "bivariate": {
        "theorem": ("modulus", "moments, modulus or lipschitz (also lemma / 6.1 / 6.2)"),
        "functions": ("sum,prod,exp", "bivariate test functions"),
        "n1_list": ("5,10", "x-axis indices"),
        "n2_list": ("5,10", "y-axis indices"),
        "p1": (0.95, "x-axis p"), "q1": (0.9, "x-axis q"),
        "p2": (0.95, "y-axis p"), "q2": (0.9, "y-axis q"),
        "grid": ("0,0.5,1", "points used for both x and y"),
        "alpha1": (1.0, "x exponent for the Lipschitz bound"),
        "alpha2": (1.0, "y exponent for the Lipschitz bound"),
        "sets": ("halfline", "set E for the Lipschitz bound"),
        "m": ("", "M for the Lipschitz bound; empty means measured"),
    },
    "density": {
        "set": ("squares", "evens | odds | squares | empty | all"),
        "n_max": (1000000, "horizon N"),
    },
}

FLAG_NAMES = {"n_max": "N"}
UNIVARIATE_BOUNDS = {"modulus": "4.1", "lipschitz": "4.2"}
BIVARIATE_BOUNDS = {"moments": "lemma", "modulus": "6.1", "lipschitz": "6.2"}
BOOL_KEYS = {"validate"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pqszasz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in OPTIONS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", default=None, help="key = value config file")
        for key, (default, helptext) in {**opts, **COMMON}.items():
            flag = "--" + FLAG_NAMES.get(key, key.replace("_", "-"))
            if key in BOOL_KEYS:
                sp.add_argument(flag, dest=key, action="store_const", const=True,
                                default=None, help=helptext)
            else:
                sp.add_argument(flag, dest=key, default=None,
                                help=f"{helptext} (default: {default})")
    return parser


def _coerce(key: str, value, default):
    if key in BOOL_KEYS:
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("1", "true", "yes", "on"):
            return True
        if str(value).lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} must be a boolean, got {value!r}")
    if default is None:
        return value
    try:
        if isinstance(default, int) and not isinstance(default, bool):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except ValueError:
        raise ConfigError(f"{key} must be numeric, got {value!r}") from None
    return value


def resolve(args: argparse.Namespace) -> dict:
    opts = {**OPTIONS[args.command], **COMMON}
    file_vals = read_config(args.config) if args.config else {}
    unknown = sorted(set(file_vals) - set(opts))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    resolved = {}
    for key, (default, _) in opts.items():
        raw = getattr(args, key)
        if raw is None:
            raw = file_vals.get(key, default)
        if raw is None:
            raise ConfigError(f"missing required option --{key.replace('_', '-')}")
        resolved[key] = _coerce(key, raw, default)
    resolved["command"] = args.command
    return resolved


def operator_setup(cfg: dict) -> tuple[BasisSpec, OperatorConfig]:
    kind, _, coeff = str(cfg["basis"]).partition(":")
    spec = BasisSpec(kind, coeff or "q-triangular")
    op = OperatorConfig(series_tol=cfg["series_tol"], max_terms=cfg["max_terms"],
                        integral_tol=cfg["integral_tol"],
                        negative_cell_policy=cfg["negative_cell_policy"])
    return spec, op


# --- subcommands -----------------------------------------------------------

def cmd_moments(cfg, spec, op):
    n, nu = int(cfg["n"]), int(cfg["nu"])
    params = PQParams.make(float(cfg["p"]), float(cfg["q"]))
    x = float(cfg["x"])
    closed = kantorovich.moment_closed_form(nu, n, params, x)
    series = kantorovich.apply(lambda t: np.asarray(t, dtype=float) ** nu, n, params, x,
                               spec, op)
    row = {"n": n, "p": params.p, "q": params.q, "x": x, "nu": nu,
           "closed_form": closed, "series": series, "difference": series - closed}
    if cfg["out"]:
        write_csv(cfg["out"], list(row), [row])
        write_sidecar(cfg["out"], cfg)
    print(f"moment nu={nu} n={n} p={params.p:g} q={params.q:g} x={x:g}: "
          f"closed={closed:.17g} series={series:.17g} diff={series - closed:.3g}")


def cmd_converge(cfg, spec, op):
    scheme = statistical.get_scheme(cfg["scheme"])
    report = statistical.korovkin_statistical_report(
        scheme, parse_ints(cfg["n_list"]), parse_grid(cfg["grid"]), spec, op,
        eps=cfg["eps"], horizon=cfg["horizon"], validate=cfg["validate"])
    cols = list(report.COLUMNS) + (["series_gap"] if cfg["validate"] else [])
    if cfg["out"]:
        write_csv(cfg["out"], cols, report.rows)
        write_sidecar(cfg["out"], cfg)
    last = {r["nu"]: r["grid_sup"] for r in report.rows}
    print(f"converge scheme={scheme.name}: {len(report.rows)} rows; last grid sups "
          f"nu=1 {last.get(1, 0):.6g}, nu=2 {last.get(2, 0):.6g}")


def cmd_stat(cfg, spec, op):
    scheme = statistical.get_scheme(cfg["scheme"])
    eps = cfg["eps"]
    horizons = parse_ints(cfg["horizons"])
    seqs = [("q_n", 1.0, scheme.q_sequence), ("p_n", 1.0, scheme.p_sequence)]
    for xs in parse_floats(cfg["x_star"]):
        def delta(k, xs=xs):
            p, q = scheme.p_q(k)
            return statistical.second_central_moment_array(np.asarray(k), p, q, xs)
        seqs.append((f"delta_n({xs:g})", 0.0, delta))
    rows = []
    for name, limit, seq in seqs:
        for N in horizons:
            rep = statistical.stat_limit_check(seq, limit, eps, N)
            rows.append({"sequence": name, "limit": limit, "horizon": N, "eps": eps,
                         "exception_count": rep.exception_count,
                         "density": rep.density_estimate})
    if cfg["out"]:
        write_csv(cfg["out"], ["sequence", "limit", "horizon", "eps", "exception_count",
                               "density"], rows)
        write_sidecar(cfg["out"], cfg)
    top = max(horizons)
    tail = statistical.ordinary_tail_sup(scheme.q_sequence, 1.0, max(top // 2, 1), top)
    q_last = [r for r in rows if r["sequence"] == "q_n"][-1]
    print(f"stat scheme={scheme.name}: q_n exception density {q_last['density']:.6g} "
          f"at N={top}; tail sup |q_k - 1| over k in [{max(top // 2, 1)}, {top}] = {tail:.6g}")


def cmd_bound(cfg, spec, op):
    scheme = statistical.get_scheme(cfg["scheme"])
    mod = error_bounds.ModulusConfig(domain_end=cfg["domain_end"], grid_step=cfg["grid_step"])
    names = [s.strip() for s in str(cfg["functions"]).split(",") if s.strip()]
    ns, xs = parse_ints(cfg["n_list"]), parse_floats(cfg["grid"])
    theorem = UNIVARIATE_BOUNDS.get(str(cfg["theorem"]), str(cfg["theorem"]))
    if theorem == "4.1":
        jobs = list(itertools.product(names, ns, xs))

        def run(job):
            name, n, x = job
            return error_bounds.theorem41_certificate(
                testfunctions.univariate(name), n, scheme.params(n), x, spec, op, mod,
                f_id=name).as_row()
        cols = list(error_bounds.CERT_COLUMNS) + ["refinements"]
    elif theorem == "4.2":
        sets = [parse_set(s) for s in str(cfg["sets"]).split(";") if s.strip()]
        alphas = parse_floats(cfg["alpha"])
        fixed_m = float(cfg["m"]) if str(cfg["m"]).strip() else None
        measured = {}
        for name, a in itertools.product(names, alphas):
            measured[name, a] = fixed_m if fixed_m is not None else error_bounds.measure_M(
                testfunctions.univariate(name), a, mod.domain_end, mod.grid_step)
        jobs = list(itertools.product(names, alphas, sets, ns, xs))

        def run(job):
            name, a, E, n, x = job
            return error_bounds.theorem42_certificate(
                testfunctions.univariate(name), a, measured[name, a], E, n,
                scheme.params(n), x, spec, op, mod, f_id=name).as_row()
        cols = list(error_bounds.CERT_COLUMNS) + ["alpha", "M", "E"]
    else:
        raise ConfigError(f"theorem must be modulus or lipschitz, got {theorem!r}")
    rows = ordered_map(run, jobs)
    if cfg["out"]:
        write_csv(cfg["out"], cols, rows)
        write_sidecar(cfg["out"], cfg)
    failed = sum(not r["holds"] for r in rows)
    print(f"bound theorem={theorem}: {len(rows)} certificates, {failed} violated")
    return 0


def cmd_bivariate(cfg, spec, op):
    params1 = PQParams.make(cfg["p1"], cfg["q1"])
    params2 = PQParams.make(cfg["p2"], cfg["q2"])
    names = [s.strip() for s in str(cfg["functions"]).split(",") if s.strip()]
    pts = parse_floats(cfg["grid"])
    combos = list(itertools.product(parse_ints(cfg["n1_list"]), parse_ints(cfg["n2_list"]),
                                    pts, pts))
    theorem = BIVARIATE_BOUNDS.get(str(cfg["theorem"]), str(cfg["theorem"]))
    base_cols = ["theorem", "f_id", "n", "p", "q", "x", "n2", "p2", "q2", "y"]
    if theorem == "lemma":
        jobs = [(i,) + c for i in range(4) for c in combos]

        def run(job):
            i, n1, n2, x, y = job
            f = testfunctions.bivariate(("one", "t", "s", "sq")[i])
            closed = bivariate.bivariate_moment_closed_form(i, n1, n2, params1, params2, x, y)
            series = bivariate.apply_bivariate(f, n1, n2, params1, params2, x, y, spec, op)
            gap = abs(series - closed)
            return {"theorem": "5.2", "f_id": f"f{i}", "n": n1, "p": params1.p,
                    "q": params1.q, "x": x, "n2": n2, "p2": params2.p, "q2": params2.q,
                    "y": y, "lhs": series, "rhs": closed, "slack": -gap,
                    "holds": gap <= 1e-8 * (1 + abs(closed))}
        cols = base_cols + ["lhs", "rhs", "slack", "holds"]
    elif theorem == "6.1":
        jobs = [(name,) + c for name in names for c in combos]

        def run(job):
            name, n1, n2, x, y = job
            return bivariate.theorem61_certificate(
                testfunctions.bivariate(name), n1, n2, params1, params2, x, y, spec, op,
                f_id=name).as_row()
        cols = base_cols + ["lhs", "rhs", "slack", "holds", "refinements", "holds_with_8"]
    elif theorem == "6.2":
        E = parse_set(cfg["sets"])
        a1, a2 = cfg["alpha1"], cfg["alpha2"]
        fixed_m = float(cfg["m"]) if str(cfg["m"]).strip() else None
        measured = {name: fixed_m if fixed_m is not None else bivariate.measure_M_bivariate(
            testfunctions.bivariate(name), a1, a2) for name in names}
        jobs = [(name,) + c for name in names for c in combos]

        def run(job):
            name, n1, n2, x, y = job
            return bivariate.theorem62_certificate(
                testfunctions.bivariate(name), a1, a2, measured[name], E, n1, n2,
                params1, params2, x, y, spec, op, f_id=name).as_row()
        cols = base_cols + ["alpha1", "alpha2", "M", "E", "lhs", "rhs", "slack", "holds"]
    else:
        raise ConfigError(f"theorem must be moments, modulus or lipschitz, got {theorem!r}")
    rows = ordered_map(run, jobs)
    if cfg["out"]:
        write_csv(cfg["out"], cols, rows)
        write_sidecar(cfg["out"], cfg)
    failed = sum(not r["holds"] for r in rows)
    print(f"bivariate theorem={theorem}: {len(rows)} rows, {failed} violated")


DENSITY_SETS = {
    "evens": lambda k: k % 2 == 0,
    "odds": lambda k: k % 2 == 1,
    "squares": statistical.is_square,
    "empty": lambda k: np.zeros(np.shape(k), dtype=bool),
    "all": lambda k: np.ones(np.shape(k), dtype=bool),
}


def cmd_density(cfg, spec, op):
    name = cfg["set"]
    if name not in DENSITY_SETS:
        raise ConfigError(f"unknown set {name!r}; choose from {sorted(DENSITY_SETS)}")
    rep = statistical.natural_density(DENSITY_SETS[name], int(cfg["n_max"]))
    if cfg["out"]:
        row = {"set": name, "horizon": rep.horizon, "exception_count": rep.exception_count,
               "density": rep.density_estimate}
        write_csv(cfg["out"], list(row), [row])
        write_sidecar(cfg["out"], cfg)
    print(f"density set={name} N={rep.horizon}: count={rep.exception_count} "
          f"density={rep.density_estimate:.17g}")


COMMANDS = {
    "moments": cmd_moments,
    "converge": cmd_converge,
    "stat": cmd_stat,
    "bound": cmd_bound,
    "bivariate": cmd_bivariate,
    "density": cmd_density,
}


def run_subcommand(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        spec, op = operator_setup(cfg)
        COMMANDS[args.command](cfg, spec, op)
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, DomainError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    warnings.simplefilter("default", kantorovich.NegativeCellWarning)
    sys.exit(run_subcommand(argv))


if __name__ == "__main__":
    main()
