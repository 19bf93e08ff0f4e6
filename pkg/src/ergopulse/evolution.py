"""Pulse-interleaved product formulas and their error bounds.

A PulseSystem holds a pulse unitary u, a generator X, and a time t.  The
controlled evolution interleaves u with short exponentials of X weighted
by a schedule; as the pulse count grows it approaches e^{P(X) t} u^N with
P the commutant projection.  This module computes the product, the limit,
the measured distance between them, and two rigorous upper bounds: a pair
of constants (m_const, m_prime_const) giving a 1/N rate for equidistant
rows, and a per-schedule right-hand side built from a defect series plus
a total-variation term.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from os import PathLike

import numpy as np

from . import matrixcore
from ._kernels import chain_product
from .ergodic import (
    COBOUNDARY_TOL,
    UnitarySpectrum,
    commutant_project,
    solve_coboundary,
    spectrum,
    yosida_split,
)
from .errors import NotACoboundaryError
from .schedules import Schedule, ScheduleFamily, tv_functional


@dataclass(frozen=True, eq=False)
class PulseSystem:
    """Pulse unitary u, generator X, and evolution time t.

    For Hamiltonian control pass X = -i H; t may be complex.
    """

    u: np.ndarray
    generator: np.ndarray
    t: complex = 1.0

    def __post_init__(self):
        u = matrixcore.as_operator(self.u, "u")
        x = matrixcore.as_operator(self.generator, "generator")
        if u.shape != x.shape:
            raise ValueError("u and generator must share a dimension")
        if not matrixcore.is_unitary(u):
            raise ValueError(
                "u is not unitary within %.1e in operator norm"
                % matrixcore.UNITARITY_TOL
            )
        t = complex(self.t)
        if not (math.isfinite(t.real) and math.isfinite(t.imag)):
            raise ValueError("t must be finite")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "generator", x)
        object.__setattr__(self, "t", t)

    @property
    def dim(self) -> int:
        return self.u.shape[0]


@dataclass(frozen=True, eq=False)
class BoundBreakdown:
    """Components of an error bound.

    m_const and m_prime_const are schedule-independent rate constants for
    equidistant rows (error <= m_prime_const / N, with m_const the
    coboundary-only part).  tv_term and c_series_sum are the two summands
    of the per-schedule bound; total_rhs is what upper-bounds the measured
    error.  Fields that do not apply to the route that produced the
    breakdown are NaN.
    """

    m_const: float
    m_prime_const: float
    tv_term: float
    c_series_sum: float
    total_rhs: float


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Measured control errors over a grid of pulse counts.

    window flags the rows used for the log-log slope fit (the upper half
    of the grid).  fitted_slope is None when any windowed error vanishes.
    bounds carries one BoundBreakdown per row when a bound route applies:
    "schedule" for coboundary generators, "constants" for equidistant
    families with a general generator, None otherwise.
    """

    family_name: str
    n_values: tuple[int, ...]
    errors: tuple[float, ...]
    window: tuple[bool, ...]
    fitted_slope: float | None
    bound_route: str | None
    bounds: tuple[BoundBreakdown, ...] | None


def pulse_product(sys: PulseSystem, s: Schedule) -> np.ndarray:
    """The interleaved product u e^{a_1 X t} u e^{a_2 X t} ... u e^{a_n X t},
    multiplied left to right."""
    if not isinstance(s, Schedule):
        raise ValueError("s must be a Schedule")
    values, idx = np.unique(s.weights, return_inverse=True)
    factors = np.stack(
        [matrixcore.expm(v * sys.t * sys.generator) for v in values]
    )
    return chain_product(sys.u, factors, np.ascontiguousarray(idx, dtype=np.int64))


def limit_evolution(sys: PulseSystem, n: int) -> np.ndarray:
    """The n-pulse limit object e^{P(X) t} u^n."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    spec = spectrum(sys.u)
    projected = commutant_project(spec, sys.generator)
    return matrixcore.expm(projected * sys.t) @ np.linalg.matrix_power(
        sys.u, int(n)
    )


def control_error(sys: PulseSystem, s: Schedule) -> float:
    """Operator-norm distance between the pulse product and its limit
    object at the same pulse count."""
    return matrixcore.op_norm(pulse_product(sys, s) - limit_evolution(sys, s.n))


def _rate_constants(
    norm_x: float, norm_x0: float, norm_y: float, abs_t: float
) -> tuple[float, float]:
    m = 4.0 * abs_t**2 * math.exp(2.0 * abs_t * norm_y) * norm_y**2
    m += 2.0 * norm_y * abs_t
    m_prime = math.exp(norm_x * abs_t) * (
        m + 2.0 * abs_t**2 * norm_y * (2.0 * norm_y + 3.0 * norm_x0)
    )
    return m, m_prime


def equidistant_bound_constants(sys: PulseSystem) -> BoundBreakdown:
    """Rate constants for equidistant rows: the measured error is bounded
    by m_prime_const / N, and by m_const / N when the generator has no
    commutant component."""
    spec = spectrum(sys.u)
    split = yosida_split(spec, sys.generator)
    norm_x = matrixcore.op_norm(sys.generator)
    norm_x0 = matrixcore.op_norm(split.fixed_part)
    norm_y = matrixcore.op_norm(split.potential)
    m, m_prime = _rate_constants(norm_x, norm_x0, norm_y, abs(sys.t))
    return BoundBreakdown(
        m_const=m,
        m_prime_const=m_prime,
        tv_term=math.nan,
        c_series_sum=math.nan,
        total_rhs=m_prime,
    )


def defect_coefficient(s: Schedule, order: int, step: int) -> float:
    """Coefficient of the order-th power of the potential norm in the
    single-step defect bound between partial products step and step+1.

    For the first step it is 2^order * sum_j (binom(order, j) - 1)
    a_1^j a_2^(order-j); later steps replace 2 a_1 by the running
    total-variation prefix a_1 + sum_{k<step} |a_{k+1} - a_k| + a_step.
    """
    if not isinstance(order, (int, np.integer)) or order < 2:
        raise ValueError("order must be an integer >= 2")
    if not isinstance(step, (int, np.integer)) or not 1 <= step <= s.n - 1:
        raise ValueError(f"step must be in [1, {s.n - 1}], got {step}")
    a = s.weights
    order = int(order)
    step = int(step)
    if step == 1:
        lead, follow = 2.0 * a[0], 2.0 * a[1]
    else:
        prefix = float(a[0] + np.abs(np.diff(a[:step])).sum() + a[step - 1])
        lead, follow = prefix, 2.0 * a[step]
    total = 0.0
    for j in range(1, order):
        total += (math.comb(order, j) - 1) * lead**j * follow ** (order - j)
    return total


def schedule_bound_rhs(
    sys: PulseSystem, s: Schedule, i_max: int = 40
) -> BoundBreakdown:
    """Rigorous upper bound on control_error(sys, s) for a coboundary
    generator.

    Sums the per-step defect series (orders 2..i_max plus a tail majorant)
    with an exponential prefactor on all but the last step, and adds
    e^{||Y|| tv |t|} - 1 for the final comparison with the limit object.
    Generators with a commutant component are refused: split them with
    yosida_split and bound the pieces separately.
    """
    if not isinstance(s, Schedule):
        raise ValueError("s must be a Schedule")
    if not isinstance(i_max, (int, np.integer)) or i_max < 2:
        raise ValueError("i_max must be an integer >= 2")
    spec = spectrum(sys.u)
    projected = commutant_project(spec, sys.generator)
    norm_p = matrixcore.op_norm(projected)
    if norm_p >= COBOUNDARY_TOL:
        raise NotACoboundaryError(
            norm_p,
            hint="split the generator with yosida_split and bound the "
            "commutant part separately",
        )
    potential = solve_coboundary(spec, sys.generator)
    norm_y = matrixcore.op_norm(potential)
    abs_t = abs(sys.t)
    norm_x = matrixcore.op_norm(sys.generator)
    m, m_prime = _rate_constants(norm_x, norm_p, norm_y, abs_t)

    scale = abs_t * norm_y
    tv_term, c_series, total = _schedule_series_terms(s.weights, scale, int(i_max))
    return BoundBreakdown(m, m_prime, tv_term, c_series, total)


def _schedule_series_terms(
    a: np.ndarray, scale: float, i_max: int
) -> tuple[float, float, float]:
    """(tv_term, c_series_sum, total_rhs) for weight row a at
    scale = |t| * ||Y||.  Schedule-independent data is baked into scale,
    so optimizers can call this in a tight loop."""
    n = a.shape[0]
    if scale == 0.0:
        return 0.0, 0.0, 0.0
    tv = float(a[0] + np.abs(np.diff(a)).sum() + a[-1])
    tv_term = math.expm1(scale * tv)
    diffs = np.abs(np.diff(a))
    prefix = np.concatenate([[0.0], np.cumsum(diffs)])
    lead = np.empty(n - 1)
    lead[0] = 2.0 * a[0]
    if n > 2:
        steps = np.arange(2, n)
        lead[1:] = a[0] + prefix[steps - 1] + a[steps - 1]
    follow = 2.0 * a[1:]
    worst = float((lead + follow).max()) * scale
    if worst >= i_max + 2:
        raise ValueError(
            "tail majorant invalid: per-step norms reach %.6g >= i_max + 2 = %d; "
            "raise i_max" % (worst, i_max + 2)
        )
    series = matrixcore._defect_series_batch(lead * scale, follow * scale, i_max)
    if n > 2:
        c_series = math.exp(2.0 * scale) * float(series[:-1].sum()) + float(
            series[-1]
        )
    else:
        c_series = float(series[-1])
    return tv_term, c_series, c_series + tv_term


def convergence_sweep(
    sys: PulseSystem,
    family: ScheduleFamily,
    n_values,
    i_max: int = 40,
) -> ConvergenceReport:
    """Measured control error over a grid of pulse counts, with bounds
    attached where a bound route applies and a log-log slope fitted over
    the upper half of the grid."""
    if not isinstance(family, ScheduleFamily):
        raise ValueError("family must be a ScheduleFamily")
    ns = [int(n) for n in n_values]
    if len(ns) < 3:
        raise ValueError("need at least 3 pulse counts")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("pulse counts must be strictly increasing")
    if ns[0] < 2:
        raise ValueError("pulse counts must be >= 2")

    spec = spectrum(sys.u)
    projected = commutant_project(spec, sys.generator)
    limit_factor = matrixcore.expm(projected * sys.t)
    is_coboundary = matrixcore.op_norm(projected) < COBOUNDARY_TOL

    errors = []
    bounds: list[BoundBreakdown] | None
    if is_coboundary:
        route = "schedule"
        bounds = []
    elif family.kind == "equidistant":
        route = "constants"
        bounds = []
        constants = equidistant_bound_constants(sys)
    else:
        route = None
        bounds = None

    for n in ns:
        row = family(n)
        prod = pulse_product(sys, row)
        limit = limit_factor @ np.linalg.matrix_power(sys.u, n)
        errors.append(matrixcore.op_norm(prod - limit))
        if route == "schedule":
            bounds.append(schedule_bound_rhs(sys, row, i_max))
        elif route == "constants":
            bounds.append(
                BoundBreakdown(
                    m_const=constants.m_const,
                    m_prime_const=constants.m_prime_const,
                    tv_term=math.nan,
                    c_series_sum=math.nan,
                    total_rhs=constants.m_prime_const / n,
                )
            )

    half = len(ns) // 2
    window = [i >= half for i in range(len(ns))]
    windowed = [(n, e) for n, e, w in zip(ns, errors, window) if w]
    if all(e > 0.0 for _n, e in windowed):
        log_n = np.log([float(n) for n, _e in windowed])
        log_e = np.log([e for _n, e in windowed])
        slope = float(np.polyfit(log_n, log_e, 1)[0])
    else:
        slope = None

    return ConvergenceReport(
        family_name=family.name,
        n_values=tuple(ns),
        errors=tuple(errors),
        window=tuple(window),
        fitted_slope=slope,
        bound_route=route,
        bounds=tuple(bounds) if bounds is not None else None,
    )


_CSV_COLUMNS = (
    "N",
    "error",
    "slope_window_flag",
    "m_const",
    "m_prime_const",
    "tv_term",
    "c_series_sum",
    "total_rhs",
)


def _csv_cell(value: float) -> str:
    return "" if math.isnan(value) else repr(float(value))


def write_report_csv(report: ConvergenceReport, path: str | PathLike) -> None:
    """One row per pulse count with the bound breakdown columns (empty
    where no bound applies)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for i, n in enumerate(report.n_values):
            b = report.bounds[i] if report.bounds is not None else None
            row = [
                str(n),
                repr(float(report.errors[i])),
                "1" if report.window[i] else "0",
            ]
            if b is None:
                row += ["", "", "", "", ""]
            else:
                row += [
                    _csv_cell(b.m_const),
                    _csv_cell(b.m_prime_const),
                    _csv_cell(b.tv_term),
                    _csv_cell(b.c_series_sum),
                    _csv_cell(b.total_rhs),
                ]
            writer.writerow(row)


def _json_number(value: float):
    return None if math.isnan(value) else float(value)


def report_to_json_dict(report: ConvergenceReport) -> dict:
    """JSON-ready representation (NaN fields become null)."""
    bounds = None
    if report.bounds is not None:
        bounds = [
            {
                "m_const": _json_number(b.m_const),
                "m_prime_const": _json_number(b.m_prime_const),
                "tv_term": _json_number(b.tv_term),
                "c_series_sum": _json_number(b.c_series_sum),
                "total_rhs": _json_number(b.total_rhs),
            }
            for b in report.bounds
        ]
    return {
        "family": report.family_name,
        "n_values": list(report.n_values),
        "errors": [float(e) for e in report.errors],
        "slope_window_flags": [1 if w else 0 for w in report.window],
        "fitted_slope": report.fitted_slope,
        "bound_route": report.bound_route,
        "bounds": bounds,
    }
