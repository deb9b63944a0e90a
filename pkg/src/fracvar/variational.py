"""Functionals built on memory operators: optimality residuals and
conserved quantities.

A problem couples a five-slot Lagrangian ``F(x1, x2, x3, x4, t)`` with one
operator binding:  along a trajectory ``y``, slot ``x1`` carries ``y``
itself, ``x2`` the integral operator image, ``x3`` the classical
derivative, and ``x4`` the derivative-inside image.  The stationarity
residual, the natural boundary condition, the isoperimetric multiplier
recovery, and the conserved-quantity drift all reduce to combinations of
the dual operators acting on partial derivatives of ``F``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import ConfigurationError, DegeneracyError, DomainError, InputError
from .foundation import (
    SampledFunction,
    cumulative_trapezoid,
    interior_slice,
    interior_sup,
    trapezoid,
)
from .operators import OperatorBinding, a_apply, b_apply, dual, k_apply

__all__ = [
    "Lagrangian",
    "VariationalProblem",
    "NoetherGenerator",
    "IsoperimetricReport",
    "NoetherReport",
    "evaluate_functional",
    "el_residual",
    "natural_bc_residual",
    "isoperimetric_residual",
    "noether_drift",
    "dissipative_parameter",
]

_SELF_CHECK_POINTS = 100
_FD_SCALE = 1e-6


def _call5(fn: Callable, x1, x2, x3, x4, t) -> np.ndarray:
    """Evaluate a five-argument scalar callable, arrays allowed."""
    try:
        out = np.asarray(fn(x1, x2, x3, x4, t), dtype=float)
        if out.shape != np.broadcast(x1, x2, x3, x4, t).shape:
            raise TypeError
        return out
    except (TypeError, ValueError):
        return np.frompyfunc(fn, 5, 1)(x1, x2, x3, x4, t).astype(float)


@dataclass(frozen=True)
class Lagrangian:
    """Five-slot integrand with optional analytic partial derivatives.

    Missing partials fall back to central finite differences with step
    ``1e-6 * (1 + |x_i|)``.  When analytic partials are supplied they are
    cross-checked against the finite-difference values at a fixed set of
    random points; a disagreement beyond ``1e-4`` relative is rejected,
    which catches the classic mistake of editing ``f`` but not its
    derivatives.
    """

    f: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    d3: Optional[Callable] = None
    d4: Optional[Callable] = None

    def __post_init__(self) -> None:
        if not callable(self.f):
            raise InputError("Lagrangian needs a callable integrand")
        provided = [d for d in (self.d1, self.d2, self.d3, self.d4) if d is not None]
        if provided:
            self._self_check()

    def _self_check(self) -> None:
        rng = np.random.default_rng(1234)
        checked = 0
        for _ in range(_SELF_CHECK_POINTS):
            x = rng.uniform(-2.0, 2.0, size=4)
            t = rng.uniform(0.0, 1.0)
            try:
                fd = self._fd_partials(*x, t)
                for slot, d in enumerate((self.d1, self.d2, self.d3, self.d4), start=1):
                    if d is None:
                        continue
                    got = float(d(*x, t))
                    want = fd[slot - 1]
                    if abs(got - want) > 1e-4 * (1.0 + abs(got) + abs(want)):
                        raise InputError(
                            f"analytic partial d{slot} disagrees with finite "
                            f"differences at x={tuple(x)}, t={t}: "
                            f"{got} vs {want}"
                        )
                checked += 1
            except InputError:
                raise
            except Exception:
                continue  # integrand not defined at this probe point
        if checked == 0:
            raise InputError("could not validate analytic partials at any probe point")

    def _fd_partials(self, x1, x2, x3, x4, t):
        args = [x1, x2, x3, x4]
        out = []
        for i in range(4):
            e = _FD_SCALE * (1.0 + np.abs(args[i]))
            hi = list(args)
            lo = list(args)
            hi[i] = args[i] + e
            lo[i] = args[i] - e
            out.append((_call5(self.f, *hi, t) - _call5(self.f, *lo, t)) / (2.0 * e))
        return out

    def value(self, x1, x2, x3, x4, t) -> np.ndarray:
        return _call5(self.f, x1, x2, x3, x4, t)

    def partials(self, x1, x2, x3, x4, t):
        """All four slot derivatives along sample arrays."""
        fd = None
        out = []
        for i, d in enumerate((self.d1, self.d2, self.d3, self.d4)):
            if d is not None:
                out.append(_call5(d, x1, x2, x3, x4, t))
            else:
                if fd is None:
                    fd = self._fd_partials(x1, x2, x3, x4, t)
                out.append(np.asarray(fd[i], dtype=float))
        return out


@dataclass(frozen=True)
class VariationalProblem:
    """Lagrangian, operator binding, boundary data, and optional weight.

    ``ya``/``yb`` of ``None`` mean a free boundary.  A weight turns the
    plain integral into an integral against ``weight(t) dt`` and switches
    the stationarity residual to its weighted form.
    """

    lagrangian: Lagrangian
    binding: OperatorBinding
    ya: Optional[float] = None
    yb: Optional[float] = None
    weight: Optional[SampledFunction] = None

    def __post_init__(self) -> None:
        if self.weight is not None:
            g = self.weight.grid
            p = self.binding.p
            if abs(g.a - p.a) > 1e-12 * (1 + abs(p.a)) or abs(g.b - p.b) > 1e-12 * (
                1 + abs(p.b)
            ):
                raise InputError("weight is sampled on a different interval")


@dataclass(frozen=True)
class NoetherGenerator:
    """Infinitesimal symmetry direction ``xi(t, x)`` of a one-parameter
    family of trajectory transformations."""

    xi: Callable[[float, float], float]


def _check_boundary(problem: VariationalProblem, y: SampledFunction) -> None:
    for name, want, got in (
        ("a", problem.ya, float(y.values[0])),
        ("b", problem.yb, float(y.values[-1])),
    ):
        if want is not None and abs(got - want) > 1e-10 * (1.0 + abs(want)):
            raise InputError(
                f"boundary value at t={name} is {got}, expected {want}"
            )


def _trajectory(problem: VariationalProblem, y: SampledFunction):
    b = problem.binding
    x1 = y.values
    x2 = b.k(y).values
    x3 = y.derivative().values
    x4 = b.b(y).values
    return x1, x2, x3, x4


def evaluate_functional(problem: VariationalProblem, y: SampledFunction) -> float:
    """Value of the functional along ``y`` (boundary data must match)."""
    _check_boundary(problem, y)
    grid = y.grid
    x1, x2, x3, x4 = _trajectory(problem, y)
    vals = problem.lagrangian.value(x1, x2, x3, x4, grid.nodes)
    if problem.weight is not None:
        vals = vals * problem.weight.values
    return trapezoid(SampledFunction(grid, vals))


def _weighted_partials(problem: VariationalProblem, y: SampledFunction):
    grid = y.grid
    x1, x2, x3, x4 = _trajectory(problem, y)
    p1, p2, p3, p4 = problem.lagrangian.partials(x1, x2, x3, x4, grid.nodes)
    if problem.weight is not None:
        w = problem.weight.values
        p1, p2, p3, p4 = p1 * w, p2 * w, p3 * w, p4 * w
    return p1, p2, p3, p4


def el_residual(problem: VariationalProblem, y: SampledFunction) -> SampledFunction:
    """Pointwise stationarity residual along ``y``.

    Zero (up to discretization) exactly when ``y`` solves the associated
    two-term optimality equation: the time derivative of the third-slot
    partial plus the derivative-outside dual image of the fourth-slot
    partial, balanced against the first-slot partial and the dual
    integral image of the second-slot partial.  With a weight attached,
    every partial is premultiplied by the weight first.
    """
    grid = y.grid
    p1, p2, p3, p4 = _weighted_partials(problem, y)
    pstar = dual(problem.binding.p)
    kern = problem.binding.kernel
    term_dt = np.gradient(p3, grid.h, edge_order=2)
    term_a = a_apply(pstar, kern, SampledFunction(grid, p4)).values
    term_k = k_apply(pstar, kern, SampledFunction(grid, p2)).values
    return SampledFunction(grid, term_dt + term_a - p1 - term_k)


def natural_bc_residual(problem: VariationalProblem, y: SampledFunction) -> float:
    """Residual of the free-left-boundary condition.

    For problems whose left boundary value is not prescribed, a minimizer
    also satisfies ``(d3 F + K_dual[d4 F])(a) = 0``.  The one-sided value
    at ``a`` is obtained by linear extrapolation from the two nearest
    interior nodes, since the dual image may be singular right at the
    endpoint.
    """
    if problem.ya is not None:
        raise InputError(
            "the natural condition applies to a free left boundary, "
            "but this problem prescribes y(a)"
        )
    if problem.yb is not None and abs(float(y.values[-1]) - problem.yb) > 1e-10 * (
        1.0 + abs(problem.yb)
    ):
        raise InputError(f"boundary value at t=b is {y.values[-1]}, expected {problem.yb}")
    grid = y.grid
    _, p2, p3, p4 = _weighted_partials(problem, y)
    expr = p3 + k_apply(dual(problem.binding.p), problem.binding.kernel,
                        SampledFunction(grid, p4)).values
    return abs(2.0 * expr[1] - expr[2])


class IsoperimetricReport(NamedTuple):
    multiplier: float
    residual: float


def isoperimetric_residual(
    problem: VariationalProblem,
    constraint: Lagrangian,
    xi_value: float,
    y: SampledFunction,
) -> IsoperimetricReport:
    """Recover the constraint multiplier and the augmented residual.

    ``constraint`` is the integrand of the side condition with prescribed
    level ``xi_value``.  The candidate ``y`` must actually meet the
    constraint.  The multiplier is the least-squares fit of the main
    stationarity residual against the constraint's over the interior
    window; the report carries the sup of the augmented combination.
    """
    con_problem = VariationalProblem(
        constraint, problem.binding, problem.ya, problem.yb, problem.weight
    )
    j_val = evaluate_functional(con_problem, y)
    if abs(j_val - xi_value) > 1e-6 * (1.0 + abs(xi_value)):
        raise InputError(
            f"candidate violates the constraint: functional value {j_val} "
            f"vs prescribed level {xi_value}"
        )
    res_f = el_residual(problem, y).values
    res_g = el_residual(con_problem, y).values
    win = interior_slice(y.grid.n)
    rf = res_f[win]
    rg = res_g[win]
    denom = float(rg @ rg)
    if math.sqrt(denom / rg.size) <= 1e-10:
        raise DegeneracyError(
            "constraint stationarity residual vanishes; the side condition "
            "is degenerate and no multiplier exists"
        )
    lam0 = float(rf @ rg) / denom
    residual = float(np.abs(rf - lam0 * rg).max())
    return IsoperimetricReport(lam0, residual)


class NoetherReport(NamedTuple):
    constant: SampledFunction
    drift: float


def noether_drift(
    problem: VariationalProblem,
    y: SampledFunction,
    generator: NoetherGenerator,
) -> NoetherReport:
    """Conserved quantity along ``y`` for an invariance direction.

    The general construction accumulates

        C(t) = xi * d3F + integral of (D[xi, d4F] + I[xi, d2F])

    with the bilinear pairings ``D[f, g] = f * A_dual[g] + g * B[f]`` and
    ``I[f, g] = -f * K_dual[g] + g * K[f]``.  When the Lagrangian depends
    on the fourth slot only and the direction is a constant shift, the
    quantity collapses to ``K_dual[d4 F]`` and is computed that way.

    The drift is the interior peak-to-peak variation of ``C`` relative to
    its mean magnitude; a conserved quantity has drift at round-off level.
    """
    if problem.weight is not None:
        raise ConfigurationError("conserved-quantity checks support unweighted functionals only")
    grid = y.grid
    check = interior_sup(el_residual(problem, y).values)
    if check > 1e-2:
        warnings.warn(
            f"trajectory fails the stationarity check (residual {check:.2e}); "
            "the conservation statement only holds along extremals",
            UserWarning,
        )
    try:
        xi_v = np.asarray(generator.xi(grid.nodes, y.values), dtype=float)
        if xi_v.shape != grid.nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        xi_v = np.frompyfunc(generator.xi, 2, 1)(grid.nodes, y.values).astype(float)
    if not np.all(np.isfinite(xi_v)):
        raise InputError("generator produced non-finite values along the trajectory")

    x1, x2, x3, x4 = _trajectory(problem, y)
    p1, p2, p3, p4 = problem.lagrangian.partials(x1, x2, x3, x4, grid.nodes)
    pstar = dual(problem.binding.p)
    kern = problem.binding.kernel
    p4sf = SampledFunction(grid, p4)

    scale = 1.0 + float(np.abs(p4).max())
    reduced = (
        max(float(np.abs(p).max()) for p in (p1, p2, p3)) <= 1e-12 * scale
        and float(xi_v.max() - xi_v.min()) <= 1e-13 * (1.0 + float(np.abs(xi_v).mean()))
    )
    if reduced:
        c_vals = k_apply(pstar, kern, p4sf).values
    else:
        xi_sf = SampledFunction(grid, xi_v)
        p2sf = SampledFunction(grid, p2)
        pair_d = xi_v * a_apply(pstar, kern, p4sf).values + p4 * b_apply(
            problem.binding.p, kern, xi_sf
        ).values
        pair_i = -xi_v * k_apply(pstar, kern, p2sf).values + p2 * k_apply(
            problem.binding.p, kern, xi_sf
        ).values
        accumulated = cumulative_trapezoid(SampledFunction(grid, pair_d + pair_i))
        c_vals = xi_v * p3 + accumulated.values
    win = interior_slice(grid.n)
    cw = c_vals[win]
    drift = float(cw.max() - cw.min()) / (1.0 + float(np.abs(cw).mean()))
    return NoetherReport(SampledFunction(grid, c_vals), drift)


def dissipative_parameter(weight: SampledFunction) -> SampledFunction:
    """Logarithmic derivative of a positive weight."""
    w = weight.values
    if np.any(w <= 0.0):
        raise DomainError("weight must be strictly positive")
    return SampledFunction(weight.grid, weight.derivative().values / w)
