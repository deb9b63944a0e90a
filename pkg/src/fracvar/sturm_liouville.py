"""Ritz eigensolver for two-point problems with a derivative-inside
operator, plus direct minimization over the same trial spaces.

The eigenvalue problem on ``[a, b]`` with zero boundary values reads

    (right Caputo-type derivative of p * (left Caputo-type derivative of y))
        + q * y = lambda * w * y

for an order ``alpha`` in (0.5, 1); ``alpha = 1`` marks the classical
problem ``-(p y')' + q y = lambda w y``.  Trial functions are sine shapes
divided by ``sqrt(w)``, which makes the weighted mass matrix exactly
diagonal under the trapezoid rule, so the Ritz system is an ordinary
symmetric eigenproblem.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import (
    CoercivityError,
    ConfigurationError,
    DomainError,
    InputError,
)
from .foundation import (
    Grid,
    SampledFunction,
    SymmetricMatrix,
    interior_sup,
    symmetric_eigen,
    trapezoid,
)
from .operators import ParameterSet, PowerLawKernel, b_apply
from .variational import VariationalProblem

__all__ = [
    "SLProblem",
    "RitzBasis",
    "Spectrum",
    "ConvergenceReport",
    "MinimizeOptions",
    "MinimizeResult",
    "ProbeReport",
    "assemble",
    "solve_spectrum",
    "converge",
    "rayleigh_quotient",
    "sl_residual",
    "direct_minimize",
    "coercivity_probe",
]

_MIN_NODES_PER_MODE = 32


def _sample(fn: Callable[[float], float], t: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(fn(t), dtype=float)
        if out.shape != t.shape:
            raise TypeError
        return out
    except (TypeError, ValueError):
        return np.frompyfunc(fn, 1, 1)(t).astype(float)


@dataclass(frozen=True)
class SLProblem:
    """Coefficients ``p, q, w`` and derivative order of the eigenproblem."""

    alpha: float
    p: Callable[[float], float]
    q: Callable[[float], float]
    w: Callable[[float], float]
    a: float = 0.0
    b: float = math.pi

    def __post_init__(self) -> None:
        if self.alpha != 1.0 and not 0.5 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0.5, 1), got {self.alpha}")
        if not self.b > self.a:
            raise InputError(f"need b > a, got a={self.a}, b={self.b}")

    def derivative_image(self, f: SampledFunction) -> SampledFunction:
        """Left derivative of order ``alpha`` (classical one at ``alpha = 1``)."""
        if self.alpha == 1.0:
            return f.derivative()
        p = ParameterSet(self.a, self.b, 1.0, 0.0)
        return b_apply(p, PowerLawKernel(self.alpha, "derivative"), f)

    def right_derivative_image(self, f: SampledFunction) -> SampledFunction:
        if self.alpha == 1.0:
            return SampledFunction(f.grid, -f.derivative().values)
        p = ParameterSet(self.a, self.b, 0.0, 1.0)
        out = b_apply(p, PowerLawKernel(self.alpha, "derivative"), f)
        return SampledFunction(f.grid, -out.values)


def _check_grid(problem: SLProblem, grid: Grid) -> None:
    if abs(grid.a - problem.a) > 1e-12 * (1 + abs(problem.a)) or abs(
        grid.b - problem.b
    ) > 1e-12 * (1 + abs(problem.b)):
        raise InputError(
            f"grid interval [{grid.a}, {grid.b}] does not match problem "
            f"interval [{problem.a}, {problem.b}]"
        )


@dataclass(frozen=True)
class RitzBasis:
    """Sine-shape trial functions with precomputed derivative images.

    Row ``k`` of ``phi`` is ``sin((k+1) s(t)) / sqrt(w(t))`` with ``s``
    mapping the interval onto ``(0, pi)``; endpoint values are exactly
    zero.  ``dphi`` holds the order-``alpha`` derivative image of each
    row, the single expensive part of assembly, computed once here.
    """

    problem: SLProblem
    grid: Grid
    m: int
    phi: np.ndarray = field(repr=False, compare=False)
    dphi: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, problem: SLProblem, m: int, grid: Grid) -> "RitzBasis":
        if m < 1:
            raise InputError(f"basis size must be positive, got {m}")
        _check_grid(problem, grid)
        if grid.n < _MIN_NODES_PER_MODE * m:
            raise ConfigurationError(
                f"grid too coarse for m={m} modes: need n >= {_MIN_NODES_PER_MODE * m}, "
                f"got n={grid.n}"
            )
        t = grid.nodes
        w_vals = _sample(problem.w, t)
        if not np.all(np.isfinite(w_vals)) or np.any(w_vals <= 0.0):
            raise DomainError("weight w must be finite and strictly positive")
        s = math.pi * (t - grid.a) / (grid.b - grid.a)
        scale = 1.0 / np.sqrt(w_vals)
        phi = np.empty((m, grid.n + 1))
        for k in range(m):
            phi[k] = np.sin((k + 1) * s) * scale
            phi[k, 0] = 0.0
            phi[k, -1] = 0.0
        dphi = np.empty_like(phi)
        for k in range(m):
            dphi[k] = problem.derivative_image(SampledFunction(grid, phi[k])).values
        return cls(problem, grid, m, phi, dphi)


def _trapezoid_weights(grid: Grid) -> np.ndarray:
    tw = np.full(grid.n + 1, grid.h)
    tw[0] = 0.5 * grid.h
    tw[-1] = 0.5 * grid.h
    return tw


def _assemble_from_basis(basis: RitzBasis) -> SymmetricMatrix:
    problem = basis.problem
    grid = basis.grid
    t = grid.nodes
    p_vals = _sample(problem.p, t)
    q_vals = _sample(problem.q, t)
    if not np.all(np.isfinite(p_vals)) or np.any(p_vals <= 0.0):
        raise DomainError("coefficient p must be finite and strictly positive")
    if not np.all(np.isfinite(q_vals)):
        raise DomainError("coefficient q must be finite")
    tw = _trapezoid_weights(grid)
    stiff = (basis.dphi * (p_vals * tw)) @ basis.dphi.T
    mass_q = (basis.phi * (q_vals * tw)) @ basis.phi.T
    a = stiff + mass_q
    return SymmetricMatrix(0.5 * (a + a.T))


def assemble(problem: SLProblem, m: int, grid: Grid):
    """Ritz matrix and the mass normalization ``c = (b - a) / 2``.

    Entry ``(k, j)`` is the trapezoid integral of
    ``p * dphi_k * dphi_j + q * phi_k * phi_j``; by the exact discrete
    orthogonality of the sine shapes the weighted mass matrix is ``c``
    times the identity, so eigenvalues of the returned matrix divided by
    ``c`` approximate the problem's spectrum from above.
    """
    basis = RitzBasis.build(problem, m, grid)
    return _assemble_from_basis(basis), 0.5 * (grid.b - grid.a)


@dataclass(frozen=True)
class Spectrum:
    """Leading Ritz eigenvalues with normalized eigenfunctions.

    ``right_trace`` records ``p(b)`` times the derivative image of each
    eigenfunction at the right endpoint, a cheap indicator of how the
    mode behaves where the composed operator concentrates its weight.
    """

    lambdas: np.ndarray
    coefficients: np.ndarray
    eigenfunctions: tuple
    m: int
    right_trace: np.ndarray

    def __post_init__(self) -> None:
        lam = np.asarray(self.lambdas, dtype=float)
        if np.any(np.diff(lam) < -1e-10 * (1.0 + np.abs(lam[:-1]))):
            raise InputError("eigenvalues must be ascending")


def _spectrum_from_basis(basis: RitzBasis, r: int) -> Spectrum:
    if not 1 <= r <= basis.m:
        raise InputError(f"requested {r} eigenpairs from an m={basis.m} basis")
    matrix = _assemble_from_basis(basis)
    c = 0.5 * (basis.grid.b - basis.grid.a)
    vals, vecs = symmetric_eigen(matrix)
    lambdas = vals[:r] / c
    coeffs = (vecs[:, :r] / math.sqrt(c)).T
    funcs = tuple(
        SampledFunction(basis.grid, coeffs[j] @ basis.phi) for j in range(r)
    )
    p_b = float(_sample(basis.problem.p, np.asarray([basis.grid.b]))[0])
    trace = np.array([p_b * float((coeffs[j] @ basis.dphi)[-1]) for j in range(r)])
    return Spectrum(lambdas, coeffs, funcs, basis.m, trace)


def solve_spectrum(problem: SLProblem, m: int, r: int, grid: Optional[Grid] = None) -> Spectrum:
    """First ``r`` eigenpairs from an ``m``-mode Ritz space.

    Eigenfunctions are normalized so the weighted square integral is one.
    Without an explicit grid, a grid fine enough for ``m`` modes is
    chosen automatically.
    """
    if grid is None:
        grid = Grid(problem.a, problem.b, max(1024, _MIN_NODES_PER_MODE * m))
    basis = RitzBasis.build(problem, m, grid)
    return _spectrum_from_basis(basis, r)


@dataclass(frozen=True)
class ConvergenceReport:
    """Eigenvalue table across a schedule of nested basis sizes."""

    m_schedule: tuple
    table: np.ndarray  # (len(m_schedule), r)
    max_upward_step: float
    converged: np.ndarray  # (r,) bool

    @property
    def monotone(self) -> bool:
        return self.max_upward_step <= 1e-10


def converge(
    problem: SLProblem,
    m_schedule,
    r: int,
    grid: Optional[Grid] = None,
) -> ConvergenceReport:
    """Ritz eigenvalues along nested trial spaces of growing size.

    The basis and matrix are built once at the largest size and sliced,
    so the nesting is exact and the eigenvalue columns can only move
    down (up to eigensolver round-off, reported separately as
    ``max_upward_step``).
    """
    schedule = [int(m) for m in m_schedule]
    if len(schedule) < 2 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InputError("m_schedule must be strictly increasing with at least two entries")
    if r > schedule[0]:
        raise InputError(f"r={r} exceeds the smallest basis size {schedule[0]}")
    m_max = schedule[-1]
    if grid is None:
        grid = Grid(problem.a, problem.b, max(1024, _MIN_NODES_PER_MODE * m_max))
    basis = RitzBasis.build(problem, m_max, grid)
    full = _assemble_from_basis(basis).entries
    c = 0.5 * (grid.b - grid.a)
    rows = []
    for m in schedule:
        vals, _ = symmetric_eigen(SymmetricMatrix(full[:m, :m]))
        rows.append(vals[:r] / c)
    table = np.vstack(rows)
    steps = np.diff(table, axis=0)
    max_up = float(steps.max(initial=0.0))
    last, prev = table[-1], table[-2]
    converged = np.abs(last - prev) < 1e-6 * (1.0 + np.abs(last))
    return ConvergenceReport(tuple(schedule), table, max_up, converged)


def rayleigh_quotient(problem: SLProblem, y: SampledFunction) -> float:
    """Energy ratio of a trial function vanishing at both endpoints."""
    _check_grid(problem, y.grid)
    v = y.values
    if abs(v[0]) > 1e-10 or abs(v[-1]) > 1e-10:
        raise InputError("trial function must vanish at both endpoints")
    t = y.grid.nodes
    p_vals = _sample(problem.p, t)
    q_vals = _sample(problem.q, t)
    w_vals = _sample(problem.w, t)
    d = problem.derivative_image(y).values
    num = trapezoid(SampledFunction(y.grid, p_vals * d * d + q_vals * v * v))
    den = trapezoid(SampledFunction(y.grid, w_vals * v * v))
    if den <= 1e-14 * (y.grid.b - y.grid.a) * float(np.abs(v).max() ** 2 + 1.0):
        raise InputError("trial function is numerically zero")
    return num / den


def sl_residual(problem: SLProblem, lam: float, y: SampledFunction) -> float:
    """Interior sup of the strong-form residual at a candidate eigenpair."""
    _check_grid(problem, y.grid)
    t = y.grid.nodes
    p_vals = _sample(problem.p, t)
    q_vals = _sample(problem.q, t)
    w_vals = _sample(problem.w, t)
    inner = SampledFunction(y.grid, p_vals * problem.derivative_image(y).values)
    res = problem.right_derivative_image(inner).values + q_vals * y.values - lam * w_vals * y.values
    return interior_sup(res)


@dataclass(frozen=True)
class MinimizeOptions:
    grad_tol: float = 1e-8
    max_iter: int = 10000
    initial_step: float = 1.0
    divergence_patience: int = 50
    memory: int = 10
    beta0: Optional[np.ndarray] = None


class MinimizeResult(NamedTuple):
    y: SampledFunction
    value: float
    gradient_norm: float
    iterations: int
    beta: np.ndarray


def _affine_background(problem: VariationalProblem, grid: Grid) -> np.ndarray:
    ya = problem.ya if problem.ya is not None else 0.0
    yb = problem.yb if problem.yb is not None else 0.0
    t = grid.nodes
    return ya + (yb - ya) * (t - grid.a) / (grid.b - grid.a)


class _TrialSpace:
    """Operator images of the background and of every basis direction.

    All four trajectory slots are affine in the coefficients, so one
    precomputation per basis row turns each objective or gradient
    evaluation into dense linear algebra.
    """

    def __init__(self, problem: VariationalProblem, basis: RitzBasis) -> None:
        grid = basis.grid
        p = problem.binding.p
        if abs(grid.a - p.a) > 1e-12 * (1 + abs(p.a)) or abs(grid.b - p.b) > 1e-12 * (
            1 + abs(p.b)
        ):
            raise InputError("basis grid does not match the problem interval")
        self.problem = problem
        self.grid = grid
        self.tw = _trapezoid_weights(grid)
        if problem.weight is not None:
            self.tw = self.tw * problem.weight.values
        bg = SampledFunction(grid, _affine_background(problem, grid))
        self.base = (
            bg.values,
            problem.binding.k(bg).values,
            bg.derivative().values,
            problem.binding.b(bg).values,
        )
        self.phi = basis.phi
        self.kphi = np.vstack(
            [problem.binding.k(SampledFunction(grid, row)).values for row in basis.phi]
        )
        self.dphi = np.vstack(
            [np.gradient(row, grid.h, edge_order=2) for row in basis.phi]
        )
        self.bphi = np.vstack(
            [problem.binding.b(SampledFunction(grid, row)).values for row in basis.phi]
        )

    def slots(self, beta: np.ndarray):
        return (
            self.base[0] + beta @ self.phi,
            self.base[1] + beta @ self.kphi,
            self.base[2] + beta @ self.dphi,
            self.base[3] + beta @ self.bphi,
        )

    def value(self, beta: np.ndarray) -> float:
        x1, x2, x3, x4 = self.slots(beta)
        vals = self.problem.lagrangian.value(x1, x2, x3, x4, self.grid.nodes)
        return float(vals @ self.tw)

    def gradient(self, beta: np.ndarray) -> np.ndarray:
        x1, x2, x3, x4 = self.slots(beta)
        p1, p2, p3, p4 = self.problem.lagrangian.partials(
            x1, x2, x3, x4, self.grid.nodes
        )
        return (
            self.phi @ (p1 * self.tw)
            + self.kphi @ (p2 * self.tw)
            + self.dphi @ (p3 * self.tw)
            + self.bphi @ (p4 * self.tw)
        )


def direct_minimize(
    problem: VariationalProblem,
    basis: RitzBasis,
    options: Optional[MinimizeOptions] = None,
) -> MinimizeResult:
    """Minimize the functional over the affine span of the basis.

    The trial trajectory is the boundary-matching affine background plus
    a basis combination, so boundary values hold for every iterate.
    Descent uses spectral (Barzilai-Borwein) step seeding guarded by a
    nonmonotone Armijo test against the worst of the last few accepted
    values; a strictly monotone guard defeats the spectral step and can
    limit-cycle just above tight tolerances.
    """
    opts = options or MinimizeOptions()
    space = _TrialSpace(problem, basis)
    if opts.beta0 is None:
        beta = np.zeros(basis.m)
    else:
        beta = np.asarray(opts.beta0, dtype=float).copy()
        if beta.shape != (basis.m,):
            raise InputError(f"beta0 must have shape ({basis.m},)")
    fval = space.value(beta)
    grad = space.gradient(beta)
    f0 = fval
    step = opts.initial_step
    prev_beta = None
    prev_grad = None
    recent = [fval]
    rising = 0
    iterations = 0
    for iterations in range(1, opts.max_iter + 1):
        gnorm = float(np.abs(grad).max())
        if gnorm < opts.grad_tol:
            iterations -= 1
            break
        direction = -grad
        if prev_beta is not None:
            s = beta - prev_beta
            yk = grad - prev_grad
            sy = float(s @ yk)
            if math.isfinite(sy) and sy > 1e-300:
                step = float(s @ s) / sy
        slope = float(grad @ direction)
        reference = max(recent)
        trial = step
        accepted = False
        for _ in range(60):
            cand = beta + trial * direction
            fcand = space.value(cand)
            if math.isfinite(fcand) and fcand <= reference + 1e-4 * trial * slope:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break  # stalled at round-off; caller sees the gradient norm
        prev_beta, prev_grad = beta, grad
        beta = cand
        rising = rising + 1 if fcand > fval else 0
        fval = fcand
        recent.append(fval)
        if len(recent) > opts.memory:
            recent.pop(0)
        grad = space.gradient(beta)
        if rising >= opts.divergence_patience or fval < -1e14 * (1.0 + abs(f0)):
            raise CoercivityError(
                "descent is diverging; the functional is unbounded below "
                "on this trial space"
            )
    gnorm = float(np.abs(grad).max())
    y = SampledFunction(space.grid, space.slots(beta)[0])
    return MinimizeResult(y, fval, gnorm, iterations, beta)


@dataclass(frozen=True)
class ProbeReport:
    """Functional growth along random rays through the trial space."""

    scales: tuple
    values: np.ndarray  # (directions, len(scales))
    increasing: np.ndarray  # (directions,) bool
    all_increasing: bool


def coercivity_probe(
    problem: VariationalProblem,
    basis: RitzBasis,
    directions: int = 8,
) -> ProbeReport:
    """Sample the functional along rays to flag unbounded-below spaces.

    Not a proof in either direction, but a cheap screen: a coercive
    functional must eventually grow along every ray, so any decreasing
    tail is a strong warning before running ``direct_minimize``.
    """
    if directions < 1:
        raise InputError("need at least one probe direction")
    space = _TrialSpace(problem, basis)
    rng = np.random.default_rng(0)
    scales = (1.0, 10.0, 100.0)
    values = np.empty((directions, len(scales)))
    for d in range(directions):
        ray = rng.standard_normal(basis.m)
        ray /= float(np.linalg.norm(ray))
        for col, s in enumerate(scales):
            values[d, col] = space.value(s * ray)
    increasing = (values[:, -1] > values[:, -2]) & (values[:, -2] > values[:, 0])
    return ProbeReport(scales, values, increasing, bool(increasing.all()))
