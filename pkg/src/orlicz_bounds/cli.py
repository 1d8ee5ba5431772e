"""Command-line front end: CSV ingestion, fitting, sweeps, distorted densities.

Subcommands
-----------
fit <csv>            fit gamma parameters and print the moment comparison
sweep                per-epsilon bounds table (CSV or JSON) for one divergence
distort              baseline/worst-case density table at one epsilon

Exit codes: 0 success, 2 input error, 3 infeasible everywhere,
4 solver non-convergence.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import risk as risk_mod
from ._solver import DEFAULT_MAX_ITER, DEFAULT_STEP, DEFAULT_TOL
from .divergence import ALPHA, KULLBACK_LEIBLER, DivergenceSpec
from .errors import (InfeasibleProblemError, InputDataError, MalformedRowError,
                     NonConvergenceError, NonMonotoneDateError, TooFewRowsError)
from .gamma import (LOWER, UPPER, GammaParams, MomentMap, check_existence,
                    empirical_moments, fit_moment_matching, theoretical_moments)
from .quantize import DEFAULT_M, quantize
from .regret import lower_regret, upper_regret
from .risk import DistortedDensity, lower_risk, upper_risk, worst_case_density

CSV_HEADER = "epsilon,W,R_lower,mean,R_upper,V,P_lower,P_upper"
ORDERING_SLACK = 1e-7


@dataclass
class RunConfig:
    """Everything one sweep or distortion run needs.

    Exactly one of ``params`` / ``input_path`` must be set.  The epsilon
    grid is log-spaced: 10^log_start .. 10^log_end with ``grid_count``
    points.  ``warm_start`` chains each solve from the previous optimum;
    disable it to restart every grid point from (init_mu, init_t).
    """

    params: GammaParams | None = None
    input_path: str | None = None
    kind: str = KULLBACK_LEIBLER
    alpha: float | None = None
    log_start: float = -5.0
    log_end: float = -0.2
    grid_count: int = 801
    threshold: float | None = None
    m: int = DEFAULT_M
    step: float = DEFAULT_STEP
    tol: float = DEFAULT_TOL
    init_mu: float = 0.0
    init_t: float = 10.0
    fmt: str = "csv"
    warm_start: bool = True
    max_iter: int = DEFAULT_MAX_ITER
    stamp_time: bool = False

    def __post_init__(self):
        if self.grid_count < 1:
            raise ValueError("the epsilon grid needs at least one point")
        if self.log_start > self.log_end:
            raise ValueError("log_start must not exceed log_end")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")
        if self.threshold is not None and not self.threshold > 0.0:
            raise ValueError("threshold must be positive")

    def epsilon_grid(self) -> np.ndarray:
        if self.grid_count == 1:
            exponents = [self.log_start]
        else:
            exponents = np.linspace(self.log_start, self.log_end,
                                    self.grid_count).tolist()
        return np.array([10.0 ** e for e in exponents])

    def spec(self, epsilon: float) -> DivergenceSpec:
        return DivergenceSpec(self.kind, alpha=self.alpha, epsilon=epsilon)


@dataclass(frozen=True)
class SweepRow:
    """One epsilon's bounds; infeasible or failed cells are None.

    ``p_lower``/``p_upper`` bracket the safety probability: the lower
    value comes from the pessimistic (upper-bounding) law, the upper
    value from the optimistic (lower-bounding) one.
    """

    epsilon: float
    w: float | None
    r_lower: float | None
    mean: float
    r_upper: float | None
    v: float | None
    p_lower: float | None
    p_upper: float | None
    iterations: int
    converged: bool


@dataclass
class SweepReport:
    rows: list[SweepRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    # Per-row risk optima {"upper": OptimResult, "lower": OptimResult},
    # populated by run_sweep(..., keep_optima=True); never serialized.
    optima: list[dict] | None = None


def ingest_csv(path: str) -> list[tuple[datetime.date, float]]:
    """Read (ISO-8601 date, positive value) rows with strictly increasing
    dates.  A header row is skipped when its second field is not numeric."""
    observations: list[tuple[datetime.date, float]] = []
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    start = 0
    if lines:
        fields = [f.strip() for f in lines[0].split(",")]
        try:
            float(fields[1] if len(fields) > 1 else "")
        except (ValueError, IndexError):
            start = 1
    for number, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 2:
            raise MalformedRowError(
                f"expected 'date,value', got {len(fields)} fields", line=number)
        try:
            date = datetime.date.fromisoformat(fields[0])
        except ValueError:
            raise MalformedRowError(
                f"bad ISO-8601 date {fields[0]!r}", line=number) from None
        try:
            value = float(fields[1])
        except ValueError:
            raise MalformedRowError(
                f"bad numeric value {fields[1]!r}", line=number) from None
        if not value > 0.0:
            raise MalformedRowError(
                f"concentrations must be positive, got {value}", line=number)
        if observations and date <= observations[-1][0]:
            raise NonMonotoneDateError(
                f"date {date} does not increase past {observations[-1][0]}",
                line=number)
        observations.append((date, value))
    if len(observations) < 2:
        raise TooFewRowsError(
            f"need at least 2 observations, got {len(observations)}")
    return observations


def _resolve_params(config: RunConfig) -> GammaParams:
    if (config.params is None) == (config.input_path is None):
        raise ValueError("provide either explicit gamma parameters or an input CSV")
    if config.params is not None:
        return config.params
    values = [value for _, value in ingest_csv(config.input_path)]
    return fit_moment_matching(values)


class _WarmChain:
    """Warm-start state for one monotone epsilon chain of solves.

    Predicts the next optimum by secant extrapolation from the last two;
    the optimum coordinates drift smoothly along a log-spaced grid, so
    this removes most of the start-up displacement at each point.
    """

    def __init__(self, init_mu: float, init_t: float, enabled: bool):
        self._cold = (init_mu, init_t)
        self._enabled = enabled
        self._history: list[tuple[float, float]] = []

    def init(self) -> tuple[float, float]:
        if not self._enabled or not self._history:
            return self._cold
        if len(self._history) == 1:
            return self._history[-1]
        (mu0, t0), (mu1, t1) = self._history[-2], self._history[-1]
        return (2.0 * mu1 - mu0, max(2.0 * t1 - t0, 0.5 * t1, 1e-7))

    def push(self, mu: float, t: float) -> None:
        if self._enabled:
            self._history = self._history[-1:] + [(mu, t)]


def run_sweep(config: RunConfig, keep_optima: bool = False) -> SweepReport:
    """Compute W, R_lower, mean, R_upper, V (and safety probabilities when a
    threshold is set) on the epsilon grid.  Per-cell failures are recorded
    as None without aborting the sweep."""
    params = _resolve_params(config)
    sample = quantize(params, config.m)
    mean = float(sample.atoms.mean())
    grid = config.epsilon_grid()
    upper_ok = check_existence(config.spec(grid[0]), MomentMap(1.0), params,
                               UPPER).feasible
    chains = {name: _WarmChain(config.init_mu, config.init_t, config.warm_start)
              for name in ("w", "r_lower", "r_upper", "v")}
    solver_kw = dict(step=config.step, tol=config.tol, max_iter=config.max_iter)
    rows = []
    optima: list[dict] = []
    for epsilon in grid:
        spec = config.spec(float(epsilon))
        iterations = 0
        converged = True
        cells: dict[str, float | None] = dict(
            w=None, r_lower=None, r_upper=None, v=None,
            p_lower=None, p_upper=None)
        opts = {}

        def attempt(solve):
            nonlocal iterations, converged
            try:
                result = solve()
            except (InfeasibleProblemError, NonConvergenceError):
                converged = False
                return None
            iterations += result.iterations
            converged = converged and result.converged
            return result

        res = attempt(lambda: lower_regret(
            spec, sample, init_t=chains["w"].init()[1], **solver_kw))
        if res is not None:
            cells["w"] = res.value
            chains["w"].push(0.0, res.t_star / spec.epsilon)
        res = attempt(lambda: lower_risk(
            spec, sample, init=chains["r_lower"].init(), **solver_kw))
        if res is not None:
            cells["r_lower"] = res.value
            opts["lower"] = res
            chains["r_lower"].push(res.mu, res.t)
        if upper_ok:
            res = attempt(lambda: upper_risk(
                spec, sample, init=chains["r_upper"].init(), **solver_kw))
            if res is not None:
                cells["r_upper"] = res.value
                opts["upper"] = res
                chains["r_upper"].push(res.mu, res.t)
            res = attempt(lambda: upper_regret(
                spec, sample, init_t=chains["v"].init()[1], **solver_kw))
            if res is not None:
                cells["v"] = res.value
                chains["v"].push(0.0, res.t_star / spec.epsilon)
        if config.threshold is not None:
            atoms = sample.atoms
            below = atoms <= config.threshold
            if "upper" in opts:
                z = risk_mod._rn_on_atoms(spec, atoms, opts["upper"], UPPER)
                cells["p_lower"] = float(np.mean(z * below))
            if "lower" in opts:
                z = risk_mod._rn_on_atoms(spec, atoms, opts["lower"], LOWER)
                cells["p_upper"] = float(np.mean(z * below))
        rows.append(SweepRow(epsilon=float(epsilon), mean=mean,
                             iterations=iterations, converged=converged,
                             **cells))
        optima.append(opts)
    metadata = {
        "params": {"a": params.a, "b": params.b},
        "divergence": {"kind": config.kind, "alpha": config.alpha},
        "dof": 2 ** config.m,
        "threshold": config.threshold,
        "timestamp": (datetime.datetime.now(datetime.timezone.utc).isoformat()
                      if config.stamp_time else None),
    }
    return SweepReport(rows=rows, metadata=metadata,
                       optima=optima if keep_optima else None)


def _check_row_ordering(row: SweepRow) -> None:
    chain = [("W", row.w), ("R_lower", row.r_lower), ("mean", row.mean),
             ("R_upper", row.r_upper), ("V", row.v)]
    present = [(name, value) for name, value in chain if value is not None]
    for (lo_name, lo), (hi_name, hi) in zip(present, present[1:]):
        if hi - lo < -ORDERING_SLACK:
            raise RuntimeError(
                f"ordering violation at epsilon={row.epsilon:.6g}: "
                f"{lo_name}={lo:.12g} > {hi_name}={hi:.12g}; this indicates "
                "a solver failure, refusing to emit")


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.11e}"


def emit(report: SweepReport, fmt: str) -> bytes:
    """Serialize a sweep: CSV with 12-significant-digit scientific notation
    and empty fields for infeasible cells, or JSON with nulls and exact
    (repr round-trip) floats.  Converged rows are ordering-checked first."""
    for row in report.rows:
        if row.converged:
            _check_row_ordering(row)
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in report.rows:
            lines.append(",".join(_fmt(v) for v in (
                r.epsilon, r.w, r.r_lower, r.mean, r.r_upper, r.v,
                r.p_lower, r.p_upper)))
        return ("\n".join(lines) + "\n").encode()
    if fmt == "json":
        payload = {
            "metadata": report.metadata,
            "rows": [{
                "epsilon": r.epsilon, "W": r.w, "R_lower": r.r_lower,
                "mean": r.mean, "R_upper": r.r_upper, "V": r.v,
                "P_lower": r.p_lower, "P_upper": r.p_upper,
                "iterations": r.iterations, "converged": r.converged,
            } for r in report.rows],
        }
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
    raise ValueError(f"unknown format {fmt!r}")


def fit_command(path: str, out=None):
    """Fit gamma parameters from a CSV and print the moment comparison."""
    out = out or sys.stdout
    values = [value for _, value in ingest_csv(path)]
    params = fit_moment_matching(values)
    emp = empirical_moments(values)
    fit = theoretical_moments(params)
    print("fitted gamma parameters", file=out)
    print(f"  shape a : {params.a:.11e}", file=out)
    print(f"  scale b : {params.b:.11e}", file=out)
    print("", file=out)
    print(f"{'moment':<12}{'empirical':>20}{'fitted':>20}", file=out)
    for name in ("mean", "variance", "skewness", "kurtosis"):
        print(f"{name:<12}{getattr(emp, name):>20.11e}"
              f"{getattr(fit, name):>20.11e}", file=out)
    return params, emp, fit


def distort_command(config: RunConfig, epsilon: float,
                    side: str) -> DistortedDensity:
    """Worst-case density table for the identity payoff at one epsilon."""
    params = _resolve_params(config)
    sample = quantize(params, config.m)
    spec = config.spec(epsilon)
    solver = upper_risk if side == UPPER else lower_risk
    opt = solver(spec, sample, None, init=(config.init_mu, config.init_t),
                 step=config.step, tol=config.tol, max_iter=config.max_iter)
    return worst_case_density(spec, sample, None, opt, side)


def render_density(density: DistortedDensity, fmt: str) -> bytes:
    if fmt == "csv":
        lines = ["grid,p,Z,pZ"]
        for row in zip(density.grid, density.base_density, density.rn_values,
                       density.product):
            lines.append(",".join(f"{v:.11e}" for v in row))
        return ("\n".join(lines) + "\n").encode()
    payload = {"grid": density.grid.tolist(),
               "p": density.base_density.tolist(),
               "Z": density.rn_values.tolist(),
               "pZ": density.product.tolist()}
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()


def _parse_params(text: str) -> GammaParams:
    try:
        a_text, b_text = text.split(",")
        return GammaParams(a=float(a_text), b=float(b_text))
    except (ValueError, TypeError):
        raise ValueError(f"--params expects 'a,b' with positive reals, got {text!r}")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", type=str, default=None,
                        help="explicit gamma parameters as 'a,b'")
    parser.add_argument("--input", type=str, default=None,
                        help="CSV of date,value observations to fit")
    parser.add_argument("--divergence", choices=("kl", "alpha"), default="kl")
    parser.add_argument("--alpha", type=float, default=None,
                        help="alpha parameter (required with --divergence alpha)")
    parser.add_argument("--eps-grid", type=str, default="-5,-0.2,801",
                        help="log10 start, log10 end, count")
    parser.add_argument("--threshold", type=float, default=None,
                        help="safety threshold (adds probability columns)")
    parser.add_argument("--dof", type=int, default=DEFAULT_M,
                        help="discretization exponent m (N = 2^m atoms)")
    parser.add_argument("--step", type=float, default=DEFAULT_STEP)
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL)
    parser.add_argument("--init-mu", type=float, default=0.0)
    parser.add_argument("--init-t", type=float, default=10.0)
    parser.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--cold-start", action="store_true",
                        help="restart every grid point from (init-mu, init-t)")
    parser.add_argument("--output", type=str, default=None)


def _config_from(args) -> RunConfig:
    try:
        log_start, log_end, count = args.eps_grid.split(",")
        grid = (float(log_start), float(log_end), int(count))
    except ValueError:
        raise ValueError(f"--eps-grid expects 'logstart,logend,count', "
                         f"got {args.eps_grid!r}")
    return RunConfig(
        params=_parse_params(args.params) if args.params else None,
        input_path=args.input,
        kind=KULLBACK_LEIBLER if args.divergence == "kl" else ALPHA,
        alpha=args.alpha,
        log_start=grid[0], log_end=grid[1], grid_count=grid[2],
        threshold=args.threshold, m=args.dof, step=args.step, tol=args.tol,
        init_mu=args.init_mu, init_t=args.init_t, fmt=args.format,
        warm_start=not args.cold_start, max_iter=args.max_iter)


def _write(data: bytes, output: str | None) -> None:
    if output is None:
        sys.stdout.write(data.decode())
    else:
        with open(output, "wb") as handle:
            handle.write(data)


def _cmd_fit(args) -> int:
    fit_command(args.csv)
    return 0


def _cmd_sweep(args) -> int:
    config = _config_from(args)
    report = run_sweep(config)
    _write(emit(report, config.fmt), args.output)
    bounds = [(r.w, r.r_lower, r.r_upper, r.v) for r in report.rows]
    if bounds and all(all(v is None for v in row) for row in bounds):
        print("every cell of the sweep was infeasible", file=sys.stderr)
        return 3
    return 0


def _cmd_distort(args) -> int:
    config = _config_from(args)
    density = distort_command(config, args.epsilon, args.side)
    _write(render_density(density, config.fmt), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orlicz-bounds",
        description="consistent lower/upper bounds on statistics of a fitted "
                    "gamma law under divergence-bounded model uncertainty")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit gamma parameters from a CSV")
    p_fit.add_argument("csv", help="CSV of date,value observations")
    p_fit.set_defaults(func=_cmd_fit)

    p_sweep = sub.add_parser("sweep", help="bounds over an epsilon grid")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_distort = sub.add_parser("distort", help="worst-case density table")
    _add_common(p_distort)
    p_distort.add_argument("--epsilon", type=float, required=True)
    p_distort.add_argument("--side", choices=(UPPER, LOWER), required=True)
    p_distort.set_defaults(func=_cmd_distort)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except InfeasibleProblemError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except NonConvergenceError as exc:
        print(f"solver failed to converge: {exc}", file=sys.stderr)
        return 4
    except (InputDataError, OSError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
