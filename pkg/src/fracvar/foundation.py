"""Grids, sampled functions, special functions, and quadrature.

Everything downstream works on uniform grids.  Functions are carried as
node samples, integrals are composite trapezoid sums, and integrals with
an integrable power singularity at the moving endpoint use product
integration against a piecewise-linear interpolant (``singular_weights``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np

from .errors import AccuracyError, DomainError, InputError, NumericError

__all__ = [
    "Grid",
    "SampledFunction",
    "SymmetricMatrix",
    "gamma",
    "erfc",
    "mittag_leffler",
    "trapezoid",
    "cumulative_trapezoid",
    "singular_weights",
    "symmetric_eigen",
    "interior_slice",
    "interior_sup",
]

_SERIES_CAP = 10000


@dataclass(frozen=True)
class Grid:
    """Uniform partition of ``[a, b]`` into ``n`` cells (``n + 1`` nodes)."""

    a: float
    b: float
    n: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InputError("grid endpoints must be finite")
        if not self.b > self.a:
            raise InputError(f"grid needs b > a, got a={self.a}, b={self.b}")
        if self.n < 2:
            raise InputError(f"grid needs n >= 2, got n={self.n}")
        object.__setattr__(self, "nodes", np.linspace(self.a, self.b, self.n + 1))

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n


@dataclass(frozen=True)
class SampledFunction:
    """Node samples of a function on a :class:`Grid`.

    Values must be finite everywhere; operators that would produce a
    non-finite sample deal with it before constructing their result.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n + 1,):
            raise InputError(
                f"expected {self.grid.n + 1} samples, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise InputError(f"non-finite sample at node {bad}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable[[float], float]) -> "SampledFunction":
        t = grid.nodes
        try:
            v = np.asarray(fn(t), dtype=float)
            if v.shape != t.shape:
                raise TypeError
        except Exception:
            v = np.array([float(fn(float(ti))) for ti in t])
        return cls(grid, v)

    def derivative(self) -> "SampledFunction":
        """Second-order finite-difference derivative on the same grid."""
        return SampledFunction(self.grid, np.gradient(self.values, self.grid.h, edge_order=2))


@dataclass(frozen=True)
class SymmetricMatrix:
    """Dense symmetric matrix with symmetry checked at construction."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"expected a square matrix, got shape {m.shape}")
        scale = 1.0 + np.abs(m)
        if not np.all(np.abs(m - m.T) <= 1e-12 * scale):
            raise InputError("matrix is not symmetric within 1e-12 relative tolerance")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def gamma(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


def erfc(x: float) -> float:
    """Complementary error function."""
    return math.erfc(x)


def mittag_leffler(alpha: float, z: float) -> float:
    """One-parameter Mittag-Leffler function ``E_alpha(z)``.

    Evaluates the power series with compensated float64 summation, with
    term magnitudes formed through ``lgamma`` so the pass doubles as a
    log-domain scan of the term profile.  When round-off against the
    accumulated absolute mass (heavy cancellation at negative ``z``) or
    outright term overflow would break the absolute accuracy target, the
    series is re-summed with ``mpmath`` at a precision sized from the
    largest term seen.

    Parameters
    ----------
    alpha:
        Series parameter, in ``(0, 1]``.
    z:
        Real argument with ``|z| <= 50``.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not abs(z) <= 50.0:
        raise DomainError(f"|z| must not exceed 50, got {z}")
    if z == 0.0:
        return 1.0

    log_az = math.log(abs(z))
    ln10 = math.log(10.0)
    s = 1.0
    comp = 0.0
    abs_sum = 1.0
    peak_log = 0.0
    prev_lt = 0.0
    overflow = False
    scanned_all = False
    # The term profile k*log|z| - lgamma(alpha*k + 1) is concave in k, so
    # once it decreases the peak is behind us.
    for k in range(1, _SERIES_CAP):
        lt = k * log_az - math.lgamma(alpha * k + 1.0)
        peak_log = max(peak_log, lt)
        if not overflow:
            if lt > 700.0:
                overflow = True
            else:
                mag = math.exp(lt)
                term = mag if z > 0 or k % 2 == 0 else -mag
                y = term - comp
                t = s + y
                comp = (t - s) - y
                s = t
                abs_sum += mag
                if lt < prev_lt and mag < 1e-16 * (1.0 + abs(s)):
                    scanned_all = True
                    break
        if overflow:
            digits = 30 + max(0, int(peak_log / ln10))
            if lt < prev_lt and lt < -(digits - 8) * ln10:
                scanned_all = True
                break
        prev_lt = lt
    if not scanned_all:
        raise AccuracyError(
            f"Mittag-Leffler series did not converge within {_SERIES_CAP} terms "
            f"for alpha={alpha}, z={z}"
        )
    if not overflow and abs_sum <= 1e3:
        return s

    # Escalated pass: float64 round-off would exceed the error budget.
    digits = 30 + max(0, int(peak_log / ln10))
    with mpmath.workdps(digits):
        zm = mpmath.mpf(z)
        total = mpmath.mpf(1)
        term = mpmath.mpf(1)
        tol = mpmath.mpf(10) ** (-(digits - 8))
        for k in range(1, _SERIES_CAP):
            term = term * zm * mpmath.gamma(alpha * (k - 1) + 1) / mpmath.gamma(alpha * k + 1)
            total += term
            if abs(term) < tol * (1 + abs(total)):
                out = float(total)
                if not math.isfinite(out):
                    raise AccuracyError(
                        f"E_{alpha}({z}) exceeds the double-precision range"
                    )
                return out
    raise AccuracyError(
        f"Mittag-Leffler series did not converge within {_SERIES_CAP} terms "
        f"for alpha={alpha}, z={z}"
    )


def trapezoid(f: SampledFunction) -> float:
    """Composite trapezoid integral over the full grid."""
    v = f.values
    return f.grid.h * (0.5 * (v[0] + v[-1]) + float(v[1:-1].sum()))


def cumulative_trapezoid(f: SampledFunction) -> SampledFunction:
    """Running trapezoid integral, zero at the left endpoint."""
    v = f.values
    steps = 0.5 * f.grid.h * (v[1:] + v[:-1])
    out = np.empty_like(v)
    out[0] = 0.0
    np.cumsum(steps, out=out[1:])
    return SampledFunction(f.grid, out)


def _power_diff(m: np.ndarray, p: float) -> np.ndarray:
    """Stable ``m**p - (m-1)**p`` for integer arrays ``m >= 1``."""
    out = np.empty(m.shape, dtype=float)
    first = m == 1
    out[first] = 1.0
    rest = m[~first].astype(float)
    out[~first] = rest ** p * (-np.expm1(p * np.log1p(-1.0 / rest)))
    return out


def _pi_coefficients(mu: float, count: int):
    """Product-integration building blocks ``A(m)`` and ``B(m)``.

    For the moving-endpoint integral of ``(t_j - tau)**(mu - 1)`` against a
    piecewise-linear interpolant, define (with ``m`` counting cells back
    from the endpoint)

        A(m) = (m**mu - (m-1)**mu) / mu
        S(m) = (m**(mu+1) - (m-1)**(mu+1)) / (mu + 1)
        B(m) = m * A(m) - S(m)

    Returns arrays of ``A(1..count)`` and ``B(1..count)``.
    """
    m = np.arange(1, count + 1)
    a = _power_diff(m, mu) / mu
    s = _power_diff(m, mu + 1.0) / (mu + 1.0)
    b = m * a - s
    return a, b


def singular_weights(mu: float, grid: Grid, j: int) -> np.ndarray:
    """Quadrature weights for the integral of ``(t_j - tau)**(mu-1) f(tau)`` over ``[a, t_j]``.

    The rule integrates the piecewise-linear interpolant of ``f`` exactly,
    so constants are reproduced without error:  the weights sum to
    ``(t_j - a)**mu / mu``.  In the limit ``mu = 1`` the rule reduces to
    the composite trapezoid rule.

    Parameters
    ----------
    mu:
        Exponent in ``(0, 1]``; the integrand kernel is ``(t_j - tau)**(mu-1)``.
    grid:
        Uniform grid supplying the spacing.
    j:
        Index of the moving endpoint.  ``j = 0`` returns an empty array.

    Returns
    -------
    numpy.ndarray
        Weights for samples ``f(t_0), ..., f(t_j)``.
    """
    if not 0.0 < mu <= 1.0:
        raise DomainError(f"mu must lie in (0, 1], got {mu}")
    if j < 0 or j > grid.n:
        raise InputError(f"node index {j} outside 0..{grid.n}")
    if j == 0:
        return np.zeros(0)
    a, b = _pi_coefficients(mu, j)
    w = np.empty(j + 1)
    w[j] = b[0]
    w[0] = a[j - 1] - b[j - 1]
    if j >= 2:
        w[1:j] = (a[j - 2::-1] - b[j - 2::-1]) + b[j - 1:0:-1]
    w *= grid.h ** mu
    return w


def _jacobi_rotate(m: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = m[p, q]
    theta = (m[q, q] - m[p, p]) / (2.0 * apq)
    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    for mat in (m, v):
        col_p = mat[:, p].copy()
        col_q = mat[:, q].copy()
        mat[:, p] = c * col_p - s * col_q
        mat[:, q] = s * col_p + c * col_q
    row_p = m[p, :].copy()
    row_q = m[q, :].copy()
    m[p, :] = c * row_p - s * row_q
    m[q, :] = s * row_p + c * row_q
    m[p, q] = 0.0
    m[q, p] = 0.0


def symmetric_eigen(matrix: SymmetricMatrix):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors in the corresponding columns.  Iteration stops once every
    off-diagonal entry is below ``1e-12`` times the Frobenius norm.
    """
    if matrix.dim > 200:
        raise InputError(f"dimension capped at 200, got {matrix.dim}")
    d = matrix.dim
    m = matrix.entries.copy()
    v = np.eye(d)
    fro = float(np.linalg.norm(m))
    if fro == 0.0 or d == 1:
        order = np.argsort(np.diag(m), kind="stable")
        return np.diag(m)[order].copy(), v[:, order].copy()
    tol = 1e-12 * fro
    for _ in range(60):
        off = np.abs(m - np.diag(np.diag(m))).max()
        if off < tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                if abs(m[p, q]) > 0.1 * tol / (d * d):
                    _jacobi_rotate(m, v, p, q)
    else:
        raise NumericError("Jacobi iteration failed to converge in 60 sweeps")
    vals = np.diag(m).copy()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order]
    # Fix a deterministic sign: the entry of largest magnitude is positive.
    for col in range(d):
        lead = np.argmax(np.abs(vecs[:, col]))
        if vecs[lead, col] < 0.0:
            vecs[:, col] = -vecs[:, col]
    return vals, vecs


def interior_slice(n: int, fraction: float = 0.8) -> slice:
    """Index slice for the central ``fraction`` of ``n + 1`` nodes."""
    margin = (1.0 - fraction) / 2.0
    lo = int(math.ceil(n * margin))
    hi = int(math.floor(n * (1.0 - margin)))
    return slice(lo, hi + 1)


def interior_sup(values: np.ndarray, fraction: float = 0.8) -> float:
    """Sup norm over the central ``fraction`` of the nodes."""
    v = np.asarray(values)
    return float(np.abs(v[interior_slice(v.shape[0] - 1, fraction)]).max())
