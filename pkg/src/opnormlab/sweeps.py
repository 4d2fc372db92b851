"""Empirical boundedness laboratory: truncation sweeps, growth fits,
proof-step inequality checks and below-threshold probes.

A sweep assembles the same operator on a nested family of truncated grids
and watches the norm estimates along the truncation schedule.  For
nonnegative kernels those estimates can only grow with the radius, so a
log-log growth exponent near zero is evidence of saturation, i.e. of a
bounded operator.  Growth verdicts are reported but only asserted for
pre-derived witness cases: the conditions checked here are sufficient, not
necessary.
"""
from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .conditions import BoundednessQuery, ConditionReport, check_boundedness, query_spaces
from .errors import DomainError, PlanError
from .grids import DEFAULT_GRADING, DEFAULT_PANEL_ORDER, Grid, nested_grids
from .kernels import KernelSpec, kernel_eval, majorant_integral
from .operators import POWER_MAX_ITER, POWER_TOL, assemble, empirical_ratio, operator_norm_pq
from .spaces import SampledFunction, conjugate_exponent, sample, weight_exponent, weighted_norm

DEFAULT_R_SCHEDULE = (10.0, 40.0, 160.0, 640.0)
GAMMA_SATURATING = 0.05
GAMMA_GROWING = 0.1

SWEEP_CSV_COLUMNS = (
    "row", "query", "family", "s1", "s2", "p1", "p2", "kappa",
    "R", "nodes", "norm", "certified", "converged", "elapsed_ms",
    "gamma", "verdict",
)


@dataclass(frozen=True)
class GridPolicy:
    """How sweep grids are built and how far they may grow."""

    panels_per_side: int = 12
    grading: float = DEFAULT_GRADING
    panel_order: int = DEFAULT_PANEL_ORDER
    extra_panels: int = 2
    max_nodes: int = 4000

    def final_node_count(self, schedule_length: int) -> int:
        panels = self.panels_per_side + self.extra_panels * (schedule_length - 1)
        return 2 * panels * self.panel_order

    def build(self, schedule) -> list[Grid]:
        return nested_grids(schedule, self.panels_per_side, self.grading,
                            self.panel_order, self.extra_panels)


@dataclass(frozen=True)
class SweepPlan:
    """Queries, kernel and truncation schedule of one sweep.

    ``kernel`` = None means each query runs against the pure envelope
    kernel with its own decay exponent.  Schedule radii must grow by a
    fixed multiple so the grids nest along a single geometric progression.
    """

    queries: tuple[BoundednessQuery, ...]
    kernel: KernelSpec | None = None
    R_schedule: tuple[float, ...] = DEFAULT_R_SCHEDULE
    grid: GridPolicy = field(default_factory=GridPolicy)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "queries", tuple(self.queries))
        object.__setattr__(self, "R_schedule", tuple(float(R) for R in self.R_schedule))
        schedule = self.R_schedule
        if not schedule:
            raise PlanError("empty truncation schedule")
        if any(R <= 0 or not math.isfinite(R) for R in schedule):
            raise PlanError("schedule radii must be positive and finite")
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise PlanError("truncation schedule must be strictly increasing")
        ratios = [b / a for a, b in zip(schedule, schedule[1:])]
        if ratios and any(abs(r - ratios[0]) > 1e-9 * ratios[0] for r in ratios):
            raise PlanError("schedule radii must grow by a fixed multiple")
        final = self.grid.final_node_count(len(schedule))
        if final > self.grid.max_nodes:
            raise PlanError(
                f"node budget exceeded: {final} nodes at R = {schedule[-1]}, "
                f"budget {self.grid.max_nodes}"
            )


@dataclass(frozen=True)
class SweepCell:
    """Norm estimate for one (query, R) pair."""

    query_index: int
    R: float
    nodes: int
    value: float
    certified: bool
    converged: bool
    elapsed_ms: float | None = None


@dataclass(frozen=True)
class QuerySummary:
    """Fitted growth exponent and verdict for one query."""

    query_index: int
    gamma: float | None
    verdict: str


@dataclass(frozen=True)
class SweepResult:
    plan: SweepPlan
    cells: tuple[SweepCell, ...]
    summaries: tuple[QuerySummary, ...]
    reports: tuple[ConditionReport, ...]


def fit_growth_exponent(points) -> float:
    """Least-squares slope of log(value) against log(R)."""
    pts = [(float(R), float(v)) for R, v in points]
    if len(pts) < 2:
        raise DomainError("need at least two points to fit a growth exponent")
    radii = np.array([R for R, _ in pts])
    values = np.array([v for _, v in pts])
    if np.any(np.diff(radii) <= 0):
        raise DomainError("radii must be strictly increasing")
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise DomainError("values must be positive and finite")
    return float(np.polyfit(np.log(radii), np.log(values), 1)[0])


def verdict_for(gamma: float | None, saturating_tol: float = GAMMA_SATURATING,
                growing_tol: float = GAMMA_GROWING) -> str:
    if gamma is None:
        return "inconclusive"
    if abs(gamma) < saturating_tol:
        return "saturating"
    if gamma > growing_tol:
        return "growing"
    return "inconclusive"


def run_boundedness_sweep(plan: SweepPlan, timing: bool = False,
                          tol: float = POWER_TOL,
                          max_iter: int = POWER_MAX_ITER) -> SweepResult:
    """Assemble each query's operator on nested grids and fit norm growth.

    Cells whose norm iteration did not converge are flagged and excluded
    from the fit.  Deterministic given the plan (and seed); wall-clock
    timing is off by default so reports are reproducible byte for byte.
    """
    grids = plan.grid.build(plan.R_schedule)
    cells: list[SweepCell] = []
    summaries: list[QuerySummary] = []
    reports: list[ConditionReport] = []
    for index, query in enumerate(plan.queries):
        source, target = query_spaces(query)
        kernel = plan.kernel if plan.kernel is not None else KernelSpec(kappa=query.kappa)
        reports.append(check_boundedness(query))
        fit_points = []
        for R, grid in zip(plan.R_schedule, grids):
            started = time.perf_counter() if timing else None
            op = assemble(kernel, source, target, grid, grid)
            estimate = operator_norm_pq(op, tol=tol, max_iter=max_iter)
            elapsed = (time.perf_counter() - started) * 1e3 if timing else None
            cells.append(SweepCell(index, R, grid.size, estimate.value,
                                   estimate.certified, estimate.converged, elapsed))
            if estimate.converged:
                fit_points.append((R, estimate.value))
        gamma = fit_growth_exponent(fit_points) if len(fit_points) >= 2 else None
        summaries.append(QuerySummary(index, gamma, verdict_for(gamma)))
    return SweepResult(plan, tuple(cells), tuple(summaries), tuple(reports))


@dataclass(frozen=True)
class HolderCheck:
    lhs: float
    rhs: float
    holds: bool


def verify_holder_step(k: KernelSpec, f: SampledFunction, query: BoundednessQuery,
                       x: float, grid: Grid) -> HolderCheck:
    """Check the factor-splitting estimate behind every boundedness proof.

    Left side: quadrature of envelope(x, y)*|f(y)|.  Right side: the source
    norm of f times the dual-exponent majorant integral raised to 1/q1.
    Requires the pure envelope kernel with c_upper = 1 and a query whose
    inner condition holds (otherwise the majorant integral diverges).
    """
    if k.modulation != "none":
        raise DomainError("the proof-step check requires an unmodulated kernel")
    if k.c_upper != 1.0:
        raise DomainError("the proof-step check requires c_upper = 1")
    if k.kappa != query.kappa:
        raise DomainError("kernel decay and query decay disagree")
    if f.grid is not grid and not np.array_equal(f.grid.nodes, grid.nodes):
        raise DomainError("function is not sampled on the given grid")
    source, _ = query_spaces(query)
    q1 = conjugate_exponent(query.p1)
    a1 = weight_exponent(source) / source.p
    envelope_row = kernel_eval(k, float(x), grid.nodes)
    lhs = float(np.dot(grid.weights, envelope_row * np.abs(f.values)))
    majorant = majorant_integral(float(x), q1 * (a1 + query.kappa))
    rhs = weighted_norm(f, source) * majorant ** (1.0 / q1)
    return HolderCheck(lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs * (1.0 + 1e-8)))


@dataclass(frozen=True)
class ProbeCell:
    R: float
    ratio: float | None
    error: str | None = None


def sharpness_probe(query: BoundednessQuery, kernel: KernelSpec,
                    witness_exponent: float, R_schedule,
                    grid: GridPolicy | None = None) -> list[ProbeCell]:
    """Norm ratios of the power-law witness (1+|y|)^(-t) along a schedule.

    Used to exhibit growth when the sufficient conditions fail; bounded
    ratios prove nothing.  A single radius yields a single ratio and no fit.
    """
    policy = grid if grid is not None else GridPolicy()
    schedule = [float(R) for R in R_schedule]
    grids = policy.build(schedule)
    source, target = query_spaces(query)
    cells: list[ProbeCell] = []
    for R, g in zip(schedule, grids):
        witness = sample(g, lambda x: (1.0 + np.abs(x)) ** (-witness_exponent),
                         tag=f"powerlaw({witness_exponent:g})")
        try:
            ratio = empirical_ratio(kernel, witness, source, target, g, g)
        except (DomainError, ArithmeticError) as exc:
            cells.append(ProbeCell(R, None, error=str(exc)))
            continue
        cells.append(ProbeCell(R, ratio))
    return cells


# --- CSV serialization -----------------------------------------------------

def _csv_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # plain repr even for numpy scalars
    return str(value)


def write_sweep_csv(result: SweepResult, stream, provenance: dict | None = None) -> None:
    """Serialize a sweep result as CSV.

    Column order is fixed (see SWEEP_CSV_COLUMNS): cell rows fill the
    R/nodes/norm/certified/converged/elapsed_ms columns, and each query's
    summary row fills gamma/verdict.  Header lines start with '#' and carry
    the provenance of every default that shaped the run.
    """
    plan = result.plan
    stream.write("# opnormlab sweep report\n")
    header = {
        "queries": len(plan.queries),
        "kernel": plan.kernel.spec_string() if plan.kernel is not None else "envelope(per-query-kappa)",
        "R_schedule": ":".join(repr(R) for R in plan.R_schedule),
        "panels_per_side": plan.grid.panels_per_side,
        "grading": repr(plan.grid.grading),
        "panel_order": plan.grid.panel_order,
        "extra_panels": plan.grid.extra_panels,
        "max_nodes": plan.grid.max_nodes,
        "gamma_saturating": repr(GAMMA_SATURATING),
        "gamma_growing": repr(GAMMA_GROWING),
        "seed": plan.seed,
    }
    if provenance:
        header.update(provenance)
    for key in header:
        stream.write(f"# {key}={header[key]}\n")
    stream.write(",".join(SWEEP_CSV_COLUMNS) + "\n")
    for index, query in enumerate(plan.queries):
        echo = (index, query.family, query.s1, query.s2, query.p1, query.p2, query.kappa)
        for cell in result.cells:
            if cell.query_index != index:
                continue
            record = ("cell", *echo, cell.R, cell.nodes, cell.value,
                      cell.certified, cell.converged, cell.elapsed_ms, None, None)
            stream.write(",".join(_csv_value(v) for v in record) + "\n")
        summary = result.summaries[index]
        record = ("summary", *echo, None, None, None, None, None, None,
                  summary.gamma, summary.verdict)
        stream.write(",".join(_csv_value(v) for v in record) + "\n")


def sweep_csv_text(result: SweepResult, provenance: dict | None = None) -> str:
    buffer = io.StringIO()
    write_sweep_csv(result, buffer, provenance)
    return buffer.getvalue()
