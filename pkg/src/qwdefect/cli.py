"""Command-line front end.

Examples::

    qwdefect evolve --phi 0.25 --steps 100 --half-width 128 --format csv
    qwdefect stationary --phi 0.25 --branch minus-i
    qwdefect verify --grid 97 --output report.json
    qwdefect sweep --grid 9

Exit codes: 0 success, 1 verification failure, 2 configuration or domain
error, 3 boundary leak, 4 singular parameter.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import analytic, sgf, spectral
from .analytic import Branch, DecayClass, StationarySolution
from .core import (
    WalkState,
    build_wojcik_coin_field,
    evolve,
    measure,
    time_averaged_measure,
)
from .errors import BoundaryLeakError, DomainError, SingularParameterError, WalkError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_LEAK = 3
EXIT_SINGULAR = 4

COMMANDS = ("evolve", "stationary", "verify", "sweep")

DEFAULT_TOLERANCES = {
    "stationarity": 1e-10,
    "lemma1": 1e-9,
    "theta_forms": 1e-12,
    "theta_product": 1e-12,
    "det_root": 1e-12,
    "lambda_relation": 1e-12,
    "corollary3": 1e-12,
}
NOT_APPLICABLE = "NOT-APPLICABLE"
VERIFY_HALF_WIDTH = 200
STATIONARY_HALF_WIDTH = 20
LEMMA1_MAX_TERMS = 20000
SWEEP_COLUMNS = ("phi", "branch", "theta_s_abs_sq", "gamma", "cos2xi", "sin2xi", "decay_class")


@dataclass(frozen=True)
class RunConfig:
    command: str
    phi: float | None = None
    branch: str | None = None
    alpha_re: float = analytic.DEFAULT_ALPHA
    alpha_im: float = 0.0
    lattice_half_width: int | None = None
    steps: int = 100
    horizon: int | None = None
    grid_points: int | None = None
    tolerance: float | None = None
    output_path: str | None = None
    format: str | None = None
    input_path: str | None = None

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    def branches(self) -> list[Branch]:
        if self.branch in (None, "both"):
            return [Branch.PLUS_I, Branch.MINUS_I]
        return [Branch.parse(self.branch)]

    def output_format(self) -> str:
        if self.format:
            return self.format
        return "json" if self.command in ("stationary", "verify") else "csv"


class ConfigError(WalkError, ValueError):
    """Invalid combination of command-line options."""


def validate(cfg: RunConfig) -> None:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    if cfg.phi is not None and not 0.0 < cfg.phi < 1.0:
        raise ConfigError(f"--phi must lie in (0, 1), got {cfg.phi!r}")
    if cfg.command in ("evolve", "stationary") and cfg.phi is None:
        raise ConfigError(f"{cfg.command} requires --phi")
    if cfg.command == "verify" and cfg.phi is None and cfg.grid_points is None:
        raise ConfigError("verify requires --phi or --grid")
    if cfg.steps < 0:
        raise ConfigError(f"--steps must be >= 0, got {cfg.steps}")
    if cfg.horizon is not None and cfg.horizon < 1:
        raise ConfigError(f"--horizon must be >= 1, got {cfg.horizon}")
    if cfg.grid_points is not None:
        minimum = 2 if cfg.command == "sweep" else 1
        if cfg.grid_points < minimum:
            raise ConfigError(f"--grid must be >= {minimum}, got {cfg.grid_points}")
    if cfg.tolerance is not None and not cfg.tolerance > 0:
        raise ConfigError(f"--tolerance must be > 0, got {cfg.tolerance!r}")
    if cfg.lattice_half_width is not None and cfg.lattice_half_width < 1:
        raise ConfigError(f"--half-width must be >= 1, got {cfg.lattice_half_width}")
    if cfg.command == "evolve" and cfg.branch == "both":
        raise ConfigError("evolve takes a single --branch (plus-i or minus-i)")
    if not (math.isfinite(cfg.alpha_re) and math.isfinite(cfg.alpha_im)):
        raise ConfigError("--alpha-re/--alpha-im must be finite")


# ---------------------------------------------------------------- serialization


def _num(x: float) -> str:
    # repr gives the shortest string that round-trips
    return repr(float(x))


def complex_to_json(z: complex) -> dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def complex_from_json(obj: dict[str, float]) -> complex:
    return complex(obj["re"], obj["im"])


def solution_to_dict(sol: StationarySolution) -> dict[str, Any]:
    return {
        "phi": sol.phase,
        "branch": sol.branch.value,
        "alpha": complex_to_json(sol.alpha),
        "beta": complex_to_json(sol.beta),
        "lambda_sq": complex_to_json(sol.lambda_sq),
        "lambda": complex_to_json(sol.lambda_),
        "theta_s": complex_to_json(sol.theta_s),
        "theta_l": complex_to_json(sol.theta_l),
        "theta_s_abs_sq": sol.theta_s_abs_sq,
        "gamma": sol.gamma,
        "decay_class": sol.decay_class.value,
    }


def solution_from_dict(obj: dict[str, Any]) -> StationarySolution:
    return StationarySolution(
        phase=float(obj["phi"]),
        branch=Branch.parse(obj["branch"]),
        alpha=complex_from_json(obj["alpha"]),
        beta=complex_from_json(obj["beta"]),
        lambda_sq=complex_from_json(obj["lambda_sq"]),
        lambda_=complex_from_json(obj["lambda"]),
        theta_s=complex_from_json(obj["theta_s"]),
        theta_l=complex_from_json(obj["theta_l"]),
        gamma=float(obj["gamma"]),
        theta_s_abs_sq=float(obj["theta_s_abs_sq"]),
        decay_class=DecayClass(obj["decay_class"]),
    )


def dumps_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
        return
    path = Path(cfg.output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    log.info("wrote %s", path)


# ---------------------------------------------------------------- commands


def _load_state(path: str, half_width: int) -> WalkState:
    """Read ``{"sites": [{"x": int, "left": {re, im}, "right": {re, im}}, ...]}``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    amps = np.zeros((2 * half_width + 1, 2), dtype=np.complex128)
    for site in data["sites"]:
        x = int(site["x"])
        if abs(x) > half_width:
            raise DomainError(f"input site {x} lies outside [-{half_width}, {half_width}]")
        amps[x + half_width] = (complex_from_json(site["left"]), complex_from_json(site["right"]))
    return WalkState(half_width, amps)


def cmd_evolve(cfg: RunConfig) -> int:
    field = build_wojcik_coin_field(cfg.phi)
    span = max(cfg.steps, cfg.horizon or 0)
    L = cfg.lattice_half_width if cfg.lattice_half_width is not None else span + 2
    if cfg.input_path is not None:
        init = _load_state(cfg.input_path, L)
    else:
        branch = Branch.parse(cfg.branch or "plus-i")
        alpha = cfg.alpha
        beta = branch.beta_for(alpha)
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if norm == 0.0:
            raise DomainError("initial coin state is zero")
        init = WalkState.localized(L, alpha / norm, beta / norm)

    if cfg.horizon is not None:
        mu = time_averaged_measure(init, field, cfg.horizon)
        time = None
    else:
        final = evolve(init, field, cfg.steps)
        if final.boundary_leak:
            raise BoundaryLeakError(
                f"walk reached the edge of [-{L}, {L}] within {cfg.steps} steps; increase --half-width"
            )
        mu = measure(final)
        time = final.time

    rows = list(zip(mu.positions.tolist(), mu.values.tolist()))
    if cfg.output_format() == "csv":
        text = dumps_csv(("x", "mu"), rows)
    else:
        text = dumps_json(
            {
                "phi": cfg.phi,
                "half_width": L,
                "time": time,
                "horizon": cfg.horizon,
                "total": math.fsum(mu.values),
                "measure": [{"x": x, "mu": v} for x, v in rows],
            }
        )
    _emit(text, cfg)
    return EXIT_OK


def _stationary_object(sol: StationarySolution, half_width: int) -> dict[str, Any]:
    obj = solution_to_dict(sol)
    table = analytic.stationary_measure_table(sol, half_width)
    obj["half_width"] = half_width
    obj["measure"] = [{"x": int(x), "mu": float(v)} for x, v in zip(table.positions, table.values)]
    return obj


def cmd_stationary(cfg: RunConfig) -> int:
    L = cfg.lattice_half_width if cfg.lattice_half_width is not None else STATIONARY_HALF_WIDTH
    sols = [analytic.build_solution(cfg.phi, b, cfg.alpha) for b in cfg.branches()]
    if cfg.output_format() == "csv":
        rows = []
        for sol in sols:
            table = analytic.stationary_measure_table(sol, L)
            rows.extend((sol.branch.value, int(x), float(v)) for x, v in zip(table.positions, table.values))
        text = dumps_csv(("branch", "x", "mu"), rows)
    else:
        objs = [_stationary_object(s, L) for s in sols]
        text = dumps_json(objs[0] if len(objs) == 1 else {"phi": cfg.phi, "solutions": objs})
    _emit(text, cfg)
    return EXIT_OK


def _lemma1_terms(sol: StationarySolution, z: complex, tol: float) -> int:
    """Smallest N >= 400 whose tail bound is a tenth of ``tol`` (capped)."""
    c = sgf.lemma1_tail_constant(sol, z)
    r = math.sqrt(sol.theta_s_abs_sq)
    target = tol / 10.0
    if c <= target:
        return sgf.DEFAULT_TERMS
    need = math.ceil(math.log(target / c) / math.log(r))
    return int(min(max(need, sgf.DEFAULT_TERMS), LEMMA1_MAX_TERMS))


def verify_record(phi: float, branch: Branch, alpha: complex, half_width: int, tol: dict[str, float]) -> dict[str, Any]:
    sol = analytic.build_solution(phi, branch, alpha if alpha != 0 else analytic.DEFAULT_ALPHA)
    w = sol.omega
    lam, a, b = sol.lambda_, sol.alpha, sol.beta

    L = int(min(half_width, spectral.overflow_cap(sol)))
    res_stat = spectral.stationarity_residual(sol, None, L, margin=2)

    forms = analytic.theta_s_all_forms(lam, w, a, b)
    res_forms = max(abs(f - forms[0]) for f in forms[1:])
    res_product = abs(sol.theta_s * sol.theta_l + 1)
    system = sgf.build_system(sol.theta_s, lam, w, a, b)
    res_det = abs(sgf.det_A(system))
    res_lambda = abs((a - a * w + b * w) * sol.lambda_sq - a * w + b * w * (1 - w))
    cos2, sin2 = analytic.corollary_trig(phi, branch)
    res_cor = max(
        abs(cos2 - sol.lambda_sq.real),
        abs(sin2 - sol.lambda_sq.imag),
        abs(cos2 * cos2 + sin2 * sin2 - 1),
    )

    if sgf.lemma1_applicable(sol):
        res_l1 = 0.0
        terms = 0
        for z in sgf.unit_circle_points(sol):
            n = _lemma1_terms(sol, z, tol["lemma1"])
            terms = max(terms, n)
            res_l1 = max(res_l1, *sgf.lemma1_residual(sol, z, n))
        lemma1: float | str = res_l1
    else:
        lemma1, terms = NOT_APPLICABLE, 0

    residuals = {
        "stationarity": res_stat,
        "lemma1": lemma1,
        "theta_forms": res_forms,
        "theta_product": res_product,
        "det_root": res_det,
        "lambda_relation": res_lambda,
        "corollary3": res_cor,
    }
    passed = all(v <= tol[k] for k, v in residuals.items() if v != NOT_APPLICABLE)
    return {
        "phi": phi,
        "branch": branch.value,
        "lambda_sq": complex_to_json(sol.lambda_sq),
        "theta_s": complex_to_json(sol.theta_s),
        "theta_s_abs_sq": sol.theta_s_abs_sq,
        "decay_class": sol.decay_class.value,
        "stationarity_half_width": L,
        "lemma1_terms": terms,
        **{f"residual_{k}": v for k, v in residuals.items()},
        "pass": passed,
    }


_REPORT_COLUMNS = (
    "phi",
    "branch",
    "lambda_sq_re",
    "lambda_sq_im",
    "theta_s_re",
    "theta_s_im",
    "theta_s_abs_sq",
    "decay_class",
    "stationarity_half_width",
    "lemma1_terms",
    *(f"residual_{k}" for k in DEFAULT_TOLERANCES),
    "pass",
)


def _report_row(rec: dict[str, Any]) -> list[Any]:
    flat = dict(rec)
    flat["lambda_sq_re"], flat["lambda_sq_im"] = rec["lambda_sq"]["re"], rec["lambda_sq"]["im"]
    flat["theta_s_re"], flat["theta_s_im"] = rec["theta_s"]["re"], rec["theta_s"]["im"]
    flat["pass"] = "true" if rec["pass"] else "false"
    return [flat[c] for c in _REPORT_COLUMNS]


def build_report(cfg: RunConfig) -> dict[str, Any]:
    if cfg.tolerance is not None:
        tol = {k: cfg.tolerance for k in DEFAULT_TOLERANCES}
    else:
        tol = dict(DEFAULT_TOLERANCES)
    phis = analytic.phase_grid(cfg.grid_points) if cfg.grid_points is not None else [cfg.phi]
    L = cfg.lattice_half_width if cfg.lattice_half_width is not None else VERIFY_HALF_WIDTH
    records = [verify_record(p, b, cfg.alpha, L, tol) for p in phis for b in cfg.branches()]
    return {
        "tolerances": tol,
        "half_width": L,
        "margin": 2,
        "records": records,
        "pass": all(r["pass"] for r in records),
    }


def cmd_verify(cfg: RunConfig) -> int:
    report = build_report(cfg)
    if cfg.output_format() == "csv":
        text = dumps_csv(_REPORT_COLUMNS, (_report_row(r) for r in report["records"]))
    else:
        text = dumps_json(report)
    _emit(text, cfg)
    if not report["pass"]:
        failed = sum(not r["pass"] for r in report["records"])
        print(f"verification failed for {failed} of {len(report['records'])} records", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def sweep_rows(grid_points: int, branches: Sequence[Branch]) -> list[dict[str, Any]]:
    rows = []
    for phi in analytic.phase_grid(grid_points):
        for b in branches:
            _, abs_sq = analytic.theta_s_squared(phi, b)
            cos2, sin2 = analytic.corollary_trig(phi, b)
            rows.append(
                {
                    "phi": phi,
                    "branch": b.value,
                    "theta_s_abs_sq": abs_sq,
                    "gamma": analytic.gamma_factor(phi, b),
                    "cos2xi": cos2,
                    "sin2xi": sin2,
                    "decay_class": analytic.classify_decay(abs_sq).value,
                }
            )
    return rows


def cmd_sweep(cfg: RunConfig) -> int:
    rows = sweep_rows(cfg.grid_points or 97, cfg.branches())
    if cfg.output_format() == "csv":
        text = dumps_csv(SWEEP_COLUMNS, ([r[c] for c in SWEEP_COLUMNS] for r in rows))
    else:
        text = dumps_json({"rows": rows})
    _emit(text, cfg)
    return EXIT_OK


HANDLERS = {
    "evolve": cmd_evolve,
    "stationary": cmd_stationary,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--phi", type=float, help="defect phase in (0, 1)")
    common.add_argument("--branch", choices=("plus-i", "minus-i", "both"))
    common.add_argument("--alpha-re", type=float, default=analytic.DEFAULT_ALPHA)
    common.add_argument("--alpha-im", type=float, default=0.0)
    common.add_argument("--half-width", type=int, dest="lattice_half_width")
    common.add_argument("--steps", type=int, default=100)
    common.add_argument("--horizon", type=int, help="time-average the measure over steps 0..T-1")
    common.add_argument("--grid", type=int, dest="grid_points")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--output", dest="output_path")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--input", dest="input_path", help="evolve: JSON initial state")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="qwdefect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="simulate the walk and write the site measure")
    sub.add_parser("stationary", parents=[common], help="closed-form eigen-solution and stationary measure")
    sub.add_parser("verify", parents=[common], help="check every closed form against numerical oracles")
    sub.add_parser("sweep", parents=[common], help="tabulate decay ratios and eigenvalue angles over phi")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    opts = vars(args)
    opts.pop("verbose")
    cfg = RunConfig(**opts)
    try:
        validate(cfg)
    except ConfigError as exc:
        parser.error(str(exc))

    try:
        return HANDLERS[cfg.command](cfg)
    except BoundaryLeakError as exc:
        print(f"boundary leak: {exc}", file=sys.stderr)
        return EXIT_LEAK
    except SingularParameterError as exc:
        print(f"singular parameter: {exc.expression} (phi={exc.phi!r})", file=sys.stderr)
        return EXIT_SINGULAR
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
