"""Command-line entry point.

Every command accepts ``--config FILE`` (JSON).  Keys in the file use the
long flag names with dashes or underscores; flags given on the command
line override file values.  Exit codes:

    0 success          3 invalid input        5 solver failure
    2 usage or config  4 DNO conditioning     6 a verification check failed
    7 non-finite state 1 any other error
"""

from __future__ import annotations

import argparse
import csv
import inspect
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .checks import CRITERIA, CheckResult
from .dno import DnoError
from .dynamics import PhysParams
from .evolution import simulate
from .geometry import S1State, s1_to_torus, torus_to_s1
from .linear import bifurcation_frequency, block_matrix
from .rotating import BranchError, NewtonError, continue_branch
from .state import DropState
from .trig import NonFiniteError, SolverGrid, TrigSeries

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_DNO = 4
EXIT_SOLVER = 5
EXIT_CHECK = 6
EXIT_NONFINITE = 7


class ConfigError(ValueError):
    pass


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    sigma0: float = 1.0
    N: int = 64
    dealias: float = 2.0
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise ConfigError("sigma0 must be positive")
        if int(self.N) != self.N or self.N < 8:
            raise ConfigError("N must be an integer >= 8")
        self.N = int(self.N)
        if self.dealias < 1:
            raise ConfigError("dealias factor must be >= 1")
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"tolerance {k!r} must be positive")

    @property
    def grid(self) -> SolverGrid:
        return SolverGrid(self.N, dealias=self.dealias)

    @property
    def phys(self) -> PhysParams:
        return PhysParams(self.sigma0)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x) + 0.0, ".17g")


def write_csv(path, header: list[str], rows) -> None:
    """CSV with '.' decimals and 17 significant digits; ``-`` writes to stdout."""
    fh = sys.stdout if str(path) == "-" else open(path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _write_json(path, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _series(d, name: str) -> TrigSeries:
    try:
        f = TrigSeries.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"field {name!r} is not a trigonometric series object") from exc
    if not np.all(np.isfinite(f.vector)):
        raise InputError(f"field {name!r} has non-finite coefficients")
    return f


def load_state(path) -> tuple[DropState, dict]:
    """Read a torus state JSON {"sigma0", "xi", "chi", "omega"?}."""
    d = _read_json(path)
    for key in ("xi", "chi"):
        if key not in d:
            raise InputError(f"state file lacks {key!r}")
    return DropState(_series(d["xi"], "xi"), _series(d["chi"], "chi")), d


# commands -----------------------------------------------------------------

def cmd_dispersion(cfg: RunConfig, args) -> int:
    ell_max = int(cfg.params.get("ell_max", 10))
    probe = float(cfg.params.get("omega", 0.0))
    if ell_max < 1:
        raise InputError("ell-max must be at least 1")
    rows = []
    for ell in range(1, ell_max + 1):
        rows.append((ell, bifurcation_frequency(ell, cfg.sigma0), block_matrix(ell, 1, probe, cfg.sigma0).det))
    write_csv(cfg.params.get("out", "-"), ["ell", "omega_star", "det_at_probe"], rows)
    return EXIT_OK


def _run_check(job: tuple[int, int, float]) -> CheckResult:
    k, N, sigma0 = job
    fn = CRITERIA[k]
    if "sigma0" in inspect.signature(fn).parameters:
        return fn(N=N, sigma0=sigma0)
    return fn(N=N)


def _run_checks(which: list[int], N: int, jobs: int, sigma0: float = 1.0) -> list[CheckResult]:
    tasks = [(k, N, sigma0) for k in which]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_check, tasks))
    return [_run_check(t) for t in tasks]


ERROR_KEYS = ("err", "drift_dt", "defect", "residual", "gap", "det", "identity")


def max_error(r: CheckResult) -> float:
    """Largest error-like number among a check's details."""
    best = 0.0

    def walk(key, v):
        nonlocal best
        if isinstance(v, dict):
            for k, x in v.items():
                walk(f"{key}.{k}", x)
        elif isinstance(v, (list, tuple)):
            for x in v:
                walk(key, x)
        elif isinstance(v, (int, float)) and not isinstance(v, bool) and any(e in key for e in ERROR_KEYS):
            best = max(best, abs(float(v)))

    walk("", r.details)
    return best


def _report(results: list[CheckResult], out) -> int:
    for r in results:
        print(r.line(), file=sys.stderr)
    report = {
        "passed": all(r.passed for r in results),
        "max_error": {r.name: max_error(r) for r in results},
        "checks": [r.to_dict() for r in results],
    }
    _write_json(out, report)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_dno_check(cfg: RunConfig, args) -> int:
    from .checks import criterion_1, criterion_2

    count = int(cfg.params.get("count", 20))
    tol = float(cfg.tolerances.get("dno", 1e-10))
    res = [criterion_1(N=cfg.N, count=count, seed=cfg.seed or 1, tol=tol), criterion_2(N=cfg.N, seed=cfg.seed or 2)]
    return _report(res, cfg.params.get("out", "-"))


def cmd_verify(cfg: RunConfig, args) -> int:
    raw = cfg.params.get("criteria")
    which = sorted(CRITERIA) if raw in (None, "", "all") else [int(k) for k in str(raw).split(",")]
    bad = [k for k in which if k not in CRITERIA]
    if bad:
        raise InputError(f"unknown criteria {bad}; choose from 1..{max(CRITERIA)}")
    jobs = int(cfg.params.get("jobs", 1))
    return _report(_run_checks(which, cfg.N, jobs, cfg.sigma0), cfg.params.get("out", "-"))


def cmd_simulate(cfg: RunConfig, args) -> int:
    P = cfg.params
    init = P.get("init")
    if init is None:
        raise InputError("simulate needs --init state.json")
    u0, meta = load_state(init)
    # the state file's σ₀ applies unless the flag or config file sets one
    sigma0 = cfg.sigma0 if "sigma0" in P["_given"] else float(meta.get("sigma0", cfg.sigma0))
    T = float(P.get("T", 1.0))
    dt = P.get("dt")
    record_every = int(P.get("record_every", 1))
    p = PhysParams(sigma0)
    traj = simulate(u0, T, None if dt is None else float(dt), p, cfg.grid, record_every, bool(P.get("filter", False)))
    out = P.get("out", "-")
    s = float(P.get("norm_s", 3.0))
    if str(out).endswith(".json"):
        _write_json(out, {"sigma0": sigma0, "N": cfg.N} | traj.to_dict())
    else:
        write_csv(out, ["t", "H", "I", "M", "xi_norm_Hs", "chi_norm_Hs"], traj.to_rows(s))
    return EXIT_OK


def cmd_branch(cfg: RunConfig, args) -> int:
    P = cfg.params
    ell_star = int(P.get("ell_star", 2))
    c = int(P.get("c_fold", 0)) or 1
    symmetry = P.get("symmetry", "none")
    a_min, a_max = float(P.get("a_min", 1e-6)), float(P.get("a_max", 1e-4))
    npts = int(P.get("points", 5))
    if not 0 < a_min <= a_max or npts < 1 or (npts > 1 and a_min == a_max):
        raise InputError("need 0 < a-min < a-max and points >= 1")
    a_values = np.geomspace(a_min, a_max, npts) if npts > 1 else np.array([a_min])
    grid, p = cfg.grid, cfg.phys
    tol = float(cfg.tolerances.get("newton", 1e-11))
    status = EXIT_OK
    try:
        br = continue_branch(ell_star, cfg.sigma0, a_values, symmetry, grid, c=c, tol=tol)
    except BranchError as exc:
        print(str(exc), file=sys.stderr)
        br, status = exc.branch, EXIT_SOLVER
    header = ["a", "omega", "residual", "eta_Hs_norm", "beta_Hs_norm", "H", "I", "M", "sym_defect"]
    write_csv(P.get("out", "-"), header, br.rows(p, grid, float(P.get("norm_s", 3.0))))
    waves = P.get("waves_dir")
    if waves:
        d = Path(waves)
        d.mkdir(parents=True, exist_ok=True)
        for i, w in enumerate(br.points):
            _write_json(d / f"wave_{i:03d}.json", w.to_dict())
    return status


def cmd_state(cfg: RunConfig, args) -> int:
    P = cfg.params
    direction = P.get("direction")
    if direction not in ("to_torus", "to_circle"):
        raise InputError("state needs --to-torus or --to-circle")
    d = _read_json(P["input"]) if P.get("input") else {}
    grid = cfg.grid
    N = cfg.N
    sigma0 = d.get("sigma0", cfg.sigma0)
    if direction == "to_torus":
        h = _series(d["h"], "h") if "h" in d else TrigSeries.zeros(N)
        psi = _series(d["psi"], "psi") if "psi" in d else TrigSeries.zeros(N)
        try:
            xi = s1_to_torus(h.truncate(N), grid)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        out = {"sigma0": sigma0, "xi": xi.to_dict(), "chi": psi.truncate(N).to_dict()}
    else:
        xi = _series(d["xi"], "xi") if "xi" in d else TrigSeries.zeros(N)
        chi = _series(d["chi"], "chi") if "chi" in d else TrigSeries.zeros(N)
        w = S1State(torus_to_s1(xi.truncate(N), grid), chi.truncate(N))
        out = {"sigma0": sigma0} | w.to_dict()
    if "omega" in d:
        out["omega"] = d["omega"]
    _write_json(P.get("out", "-"), out)
    return EXIT_OK


COMMANDS = {
    "dispersion": cmd_dispersion,
    "dno-check": cmd_dno_check,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "branch": cmd_branch,
    "state": cmd_state,
}


# parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="capdrop", description="Capillary drop equations on the torus.")
    sub = root.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with default values for any flag")
        sp.add_argument("--sigma0", type=float, default=None)
        sp.add_argument("--N", type=int, default=None, help="truncation order (>= 8)")
        sp.add_argument("--dealias", type=float, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output path, '-' for stdout")

    sp = sub.add_parser("dispersion", help="table of bifurcation frequencies and block determinants")
    common(sp)
    sp.add_argument("--ell-max", type=int, default=None)
    sp.add_argument("--omega", type=float, default=None, help="probe frequency for the determinant column")

    sp = sub.add_parser("dno-check", help="Dirichlet-Neumann property battery")
    common(sp)
    sp.add_argument("--count", type=int, default=None)

    sp = sub.add_parser("verify", help="acceptance battery; nonzero exit if any check fails")
    common(sp)
    sp.add_argument("--criteria", default=None, help="comma-separated criteria numbers or 'all'")
    sp.add_argument("--jobs", type=int, default=None)

    sp = sub.add_parser("simulate", help="RK4 integration with conservation monitoring")
    common(sp)
    sp.add_argument("--init", default=None, help="state JSON")
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--record-every", type=int, default=None)
    sp.add_argument("--filter", action="store_true", default=None, help="exponential high-mode filter")
    sp.add_argument("--norm-s", type=float, default=None, help="Sobolev index of the norm columns")

    sp = sub.add_parser("branch", help="rotating-wave branch by Newton continuation")
    common(sp)
    sp.add_argument("--ell-star", type=int, default=None)
    sp.add_argument("--c-fold", type=int, default=None, help="fold order, 0 for none")
    sp.add_argument("--symmetry", choices=["none", "reversible"], default=None)
    sp.add_argument("--a-min", type=float, default=None)
    sp.add_argument("--a-max", type=float, default=None)
    sp.add_argument("--points", type=int, default=None)
    sp.add_argument("--waves-dir", default=None, help="directory for per-wave state JSON files")
    sp.add_argument("--norm-s", type=float, default=None)

    sp = sub.add_parser("state", help="convert states between the circle and torus forms")
    common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--to-torus", dest="direction", action="store_const", const="to_torus")
    g.add_argument("--to-circle", dest="direction", action="store_const", const="to_circle")
    sp.add_argument("--in", dest="input", default=None, help="input JSON (zero state if omitted)")
    return root


CORE_KEYS = ("sigma0", "N", "dealias", "seed")


def make_config(args: argparse.Namespace) -> RunConfig:
    base: dict = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot parse config {args.config}: {exc}") from exc
        if not isinstance(base, dict):
            raise ConfigError("config file must hold a JSON object")
        base = {k.replace("-", "_"): v for k, v in base.items()}
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")}
    merged = base | flags
    core = {k: merged.pop(k) for k in CORE_KEYS if k in merged}
    tolerances = merged.pop("tolerances", {})
    params = merged
    params["_given"] = tuple(base | flags)
    try:
        return RunConfig(**core, tolerances=tolerances, params=params)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DnoError as exc:
        print(f"dirichlet-neumann check failed: {exc}", file=sys.stderr)
        return EXIT_DNO
    except NewtonError as exc:
        print(f"newton solve failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (NonFiniteError, FloatingPointError) as exc:
        print(f"non-finite state: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
