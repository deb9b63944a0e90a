"""Two-sided integral operators with memory kernels and their derivatives.

The central object is the weighted pair

    K[f](t) = lam * (left integral of k(t, tau) f(tau) over [a, t])
            + mu  * (right integral of k(tau, t) f(tau) over [t, b])

parameterized by ``ParameterSet``.  Composing with differentiation on the
outside (``a_apply``) or inside (``b_apply``) yields the derivative-type
operators.  Kernels declare how singular they are on the diagonal through
``singularity_exponent`` ``s``; evaluation always works with the bounded
cofactor ``k(t, tau) * (t - tau)**s`` and hands the singular power factor
to product-integration quadrature.

The right-sided integral is reduced to a left-sided one by reflecting the
interval, so difference-type kernels keep their fast convolution path on
both sides.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    ConfigurationError,
    DomainError,
    InputError,
    NumericError,
)
from .foundation import (
    Grid,
    SampledFunction,
    _pi_coefficients,
    gamma,
    interior_sup,
    trapezoid,
)

__all__ = [
    "ParameterSet",
    "dual",
    "Kernel",
    "DifferenceKernel",
    "PowerLawKernel",
    "HadamardKernel",
    "VariableOrderKernel",
    "GeneralKernel",
    "OperatorBinding",
    "ClassicalOp",
    "CornerExtrapolationWarning",
    "IBPReport",
    "k_apply",
    "a_apply",
    "b_apply",
    "classical",
    "boundedness_constant",
    "verify_ibp",
    "verify_semigroup",
]

# Output nodes within this distance of a flagged corner node are replaced
# by extrapolation from clean neighbours; see _patch_corners.
_CORNER_PAD = 2
_CORNER_FIT = 6


class CornerExtrapolationWarning(UserWarning):
    """Some output nodes near an interval endpoint were extrapolated."""


@dataclass(frozen=True)
class ParameterSet:
    """Interval and side weights ``(a, b, lam, mu)`` of a two-sided operator."""

    a: float
    b: float
    lam: float
    mu: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "lam", "mu"):
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"parameter {name} must be finite")
        if not self.b > self.a:
            raise InputError(f"parameter set needs b > a, got a={self.a}, b={self.b}")
        if self.lam == 0.0 and self.mu == 0.0:
            warnings.warn("both side weights are zero; the operator is trivial", UserWarning)


def dual(p: ParameterSet) -> ParameterSet:
    """Parameter set with the side weights swapped."""
    return ParameterSet(p.a, p.b, p.mu, p.lam)


def _broadcast_call2(fn: Callable, x, y) -> np.ndarray:
    """Evaluate a scalar callable of two arguments, arrays allowed.

    Tries one vectorized call first; callables written with ``math``
    functions fall back to elementwise evaluation.
    """
    try:
        out = np.asarray(fn(x, y), dtype=float)
        if out.shape != np.broadcast(x, y).shape:
            raise TypeError
        return out
    except (TypeError, ValueError):
        return np.frompyfunc(fn, 2, 1)(x, y).astype(float)


def _broadcast_call1(fn: Callable, x) -> np.ndarray:
    try:
        out = np.asarray(fn(x), dtype=float)
        if out.shape != np.shape(x):
            raise TypeError
        return out
    except (TypeError, ValueError):
        return np.frompyfunc(fn, 1, 1)(x).astype(float)


class Kernel:
    """Base interface: diagonal singularity strength plus bounded cofactor."""

    #: difference-type kernels depend on t - tau only and enable the
    #: convolution fast path
    is_difference: bool = False
    #: kernels on multiplicative time need a strictly positive interval
    requires_positive_domain: bool = False
    #: False only when the diagonal singularity strength varies along t
    has_constant_exponent: bool = True

    def exponent_at(self, t: float) -> float:
        raise NotImplementedError

    def cofactor(self, x, y, s_row: float) -> np.ndarray:
        """Bounded part ``k(x, y) * (x - y)**s_row`` for ``y <= x`` elementwise."""
        raise NotImplementedError

    def profile(self, u: np.ndarray) -> np.ndarray:
        """Cofactor as a function of the lag ``u = x - y`` (difference type only)."""
        raise ConfigurationError(f"{type(self).__name__} is not difference-type")


@dataclass(frozen=True)
class DifferenceKernel(Kernel):
    """Bounded convolution kernel ``k(t, tau) = h(t - tau)``."""

    h: Callable[[float], float]
    is_difference = True

    def exponent_at(self, t: float) -> float:
        return 0.0

    def cofactor(self, x, y, s_row: float) -> np.ndarray:
        return _broadcast_call1(self.h, np.asarray(x) - np.asarray(y))

    def profile(self, u: np.ndarray) -> np.ndarray:
        return _broadcast_call1(self.h, u)


@dataclass(frozen=True)
class PowerLawKernel(Kernel):
    """Power-law kernel of Riemann-Liouville type.

    ``variant="integral"`` is ``(t - tau)**(order - 1) / Gamma(order)``
    (singularity exponent ``1 - order``); ``variant="derivative"`` is
    ``(t - tau)**(-order) / Gamma(1 - order)`` (exponent ``order``).
    """

    order: float
    variant: str
    is_difference = True

    def __post_init__(self) -> None:
        if self.variant not in ("integral", "derivative"):
            raise ConfigurationError(f"unknown power-law variant {self.variant!r}")
        if not 0.0 < self.order < 1.0:
            raise DomainError(f"order must lie in (0, 1), got {self.order}")

    @property
    def singularity_exponent(self) -> float:
        return 1.0 - self.order if self.variant == "integral" else self.order

    def exponent_at(self, t: float) -> float:
        return self.singularity_exponent

    def _const(self) -> float:
        if self.variant == "integral":
            return 1.0 / gamma(self.order)
        return 1.0 / gamma(1.0 - self.order)

    def cofactor(self, x, y, s_row: float) -> np.ndarray:
        return np.full(np.broadcast(x, y).shape, self._const())

    def profile(self, u: np.ndarray) -> np.ndarray:
        return np.full(np.shape(u), self._const())


@dataclass(frozen=True)
class HadamardKernel(Kernel):
    """Logarithmic kernel ``log(t/tau)**(order-1) / (Gamma(order) tau)``.

    Lives on multiplicative time, so the interval must satisfy ``a > 0``.
    The cofactor is evaluated through ``log1p((t-tau)/tau) / (t-tau)``,
    which stays well conditioned up to the diagonal, where it equals
    ``1/tau``.
    """

    order: float
    requires_positive_domain = True

    def __post_init__(self) -> None:
        if not 0.0 < self.order < 1.0:
            raise DomainError(f"order must lie in (0, 1), got {self.order}")

    @property
    def singularity_exponent(self) -> float:
        return 1.0 - self.order

    def exponent_at(self, t: float) -> float:
        return self.singularity_exponent

    def cofactor(self, x, y, s_row: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.any(y <= 0.0):
            raise DomainError("logarithmic kernel needs strictly positive times")
        d = x - y
        safe = np.where(d > 0.0, d, 1.0)
        ratio = np.where(d > 0.0, np.log1p(d / y) / safe, 1.0 / y)
        return ratio ** (self.order - 1.0) / (gamma(self.order) * y)


@dataclass(frozen=True)
class VariableOrderKernel(Kernel):
    """Power-law kernel whose order varies with both time arguments.

    The quadrature exponent at an output node ``t`` is frozen at the
    diagonal value ``order(t, t)``; the drift of the order away from the
    diagonal is absorbed into the cofactor.
    """

    order: Callable[[float, float], float]
    variant: str
    has_constant_exponent = False

    def __post_init__(self) -> None:
        if self.variant not in ("integral", "derivative"):
            raise ConfigurationError(f"unknown variable-order variant {self.variant!r}")

    def _order_at(self, x, y) -> np.ndarray:
        av = _broadcast_call2(self.order, x, y)
        if not np.all(np.isfinite(av)) or np.any(av <= 0.0) or np.any(av >= 1.0):
            raise DomainError("variable order must stay inside (0, 1)")
        return av

    def exponent_at(self, t: float) -> float:
        a0 = float(self._order_at(t, t))
        return 1.0 - a0 if self.variant == "integral" else a0

    def cofactor(self, x, y, s_row: float) -> np.ndarray:
        av = self._order_at(x, y)
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        d, av = np.broadcast_arrays(d, av)
        if self.variant == "integral":
            expo = av - (1.0 - s_row)
            denom = _GAMMA_UFUNC(av).astype(float)
        else:
            expo = s_row - av
            denom = _GAMMA_UFUNC(1.0 - av).astype(float)
        powed = np.where(d > 0.0, np.where(d > 0.0, d, 1.0) ** expo, 1.0)
        return powed / denom


@dataclass(frozen=True)
class GeneralKernel(Kernel):
    """Arbitrary kernel callable with a declared diagonal singularity exponent."""

    k: Callable[[float, float], float]
    singularity_exponent: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.singularity_exponent < 1.0:
            raise DomainError(
                f"singularity exponent must lie in [0, 1), got {self.singularity_exponent}"
            )

    def exponent_at(self, t: float) -> float:
        return self.singularity_exponent

    def cofactor(self, x, y, s_row: float) -> np.ndarray:
        kv = _broadcast_call2(self.k, x, y)
        if s_row == 0.0:
            return kv
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return kv * np.where(d > 0.0, d, 0.0) ** s_row


_GAMMA_UFUNC = np.frompyfunc(math.gamma, 1, 1)


class _ReflectedKernel(Kernel):
    """View of a kernel under the interval reflection ``t -> a + b - t``.

    Turns the right-sided integral into a left-sided one on the reversed
    samples; difference-type kernels reflect onto themselves.
    """

    def __init__(self, base: Kernel, a: float, b: float) -> None:
        self.base = base
        self.ab = a + b
        self.is_difference = base.is_difference
        self.requires_positive_domain = base.requires_positive_domain
        self.has_constant_exponent = base.has_constant_exponent

    def exponent_at(self, t: float) -> float:
        return self.base.exponent_at(self.ab - t)

    def cofactor(self, x, y, s_row: float) -> np.ndarray:
        return self.base.cofactor(self.ab - np.asarray(y), self.ab - np.asarray(x), s_row)

    def profile(self, u: np.ndarray) -> np.ndarray:
        return self.base.profile(u)


def _row_weights(j: int, a_coef: np.ndarray, b_coef: np.ndarray) -> np.ndarray:
    """Unscaled product-integration weights for row ``j`` from shared tables."""
    w = np.empty(j + 1)
    w[j] = b_coef[0]
    w[0] = a_coef[j - 1] - b_coef[j - 1]
    if j >= 2:
        w[1:j] = (a_coef[j - 2::-1] - b_coef[j - 2::-1]) + b_coef[j - 1:0:-1]
    return w


def _apply_left(kernel: Kernel, grid: Grid, fv: np.ndarray):
    """Left-sided integral at every node.  Returns (values, flagged nodes).

    Flagged nodes hold no trustworthy value (NaN placeholder); they arise
    only when a kernel declared bounded turns out non-finite at an
    interval corner, and are patched afterwards by the caller.
    """
    n, h, t = grid.n, grid.h, grid.nodes

    if kernel.is_difference:
        s = kernel.exponent_at(t[0])
        mu = 1.0 - s
        a_coef, b_coef = _pi_coefficients(mu, n + 1)
        prof = np.asarray(kernel.profile(t - grid.a), dtype=float)
        if not np.all(np.isfinite(prof)):
            bad = int(np.flatnonzero(~np.isfinite(prof))[0])
            raise NumericError(f"kernel profile non-finite at lag index {bad}")
        weights = np.empty(n + 1)
        weights[0] = b_coef[0]
        weights[1:] = (a_coef[:n] - b_coef[:n]) + b_coef[1:]
        conv = np.convolve(fv, weights * prof)[: n + 1]
        out = h ** mu * (conv - b_coef * prof * fv[0])
        out[0] = 0.0
        return out, []

    out = np.zeros(n + 1)
    flagged: list[int] = []
    a_coef = b_coef = None
    if kernel.has_constant_exponent:
        const_s = kernel.exponent_at(t[0])
        a_coef, b_coef = _pi_coefficients(1.0 - const_s, n + 1)

    for j in range(1, n + 1):
        if kernel.has_constant_exponent:
            s = const_s
            w = _row_weights(j, a_coef, b_coef)
        else:
            s = kernel.exponent_at(t[j])
            aj, bj = _pi_coefficients(1.0 - s, j)
            w = _row_weights(j, aj, bj)
        mu = 1.0 - s
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.asarray(kernel.cofactor(t[j], t[: j + 1], s), dtype=float)
        if not np.all(np.isfinite(c)):
            c = c.copy()
            status = _mend_row(c, j, n, s)
            if status == "flag":
                flagged.append(j)
                out[j] = np.nan
                continue
        out[j] = h ** mu * float(w @ (c * fv[: j + 1]))
    return out, flagged


def _mend_row(c: np.ndarray, j: int, n: int, s: float) -> str:
    """Repair non-finite cofactor samples in one quadrature row, in place.

    A singular kernel (``s > 0``) has a smooth cofactor, so a non-finite
    diagonal sample is continued linearly from its neighbours.  A kernel
    declared bounded that still blows up at an interval corner marks the
    row for output extrapolation.  Anything else is a hard error.
    """
    for i in np.flatnonzero(~np.isfinite(c)):
        i = int(i)
        if i == j and s > 0.0:
            filled = 2.0 * c[j - 1] - c[j - 2] if j >= 2 else c[0]
            if not np.isfinite(filled):
                raise NumericError(f"kernel cofactor non-finite near node {j}")
            c[j] = filled
        elif (i == j == n and s == 0.0) or (i == 0 and j <= _CORNER_FIT):
            return "flag"
        else:
            raise NumericError(
                f"kernel evaluation non-finite at node {j} (sample index {i})"
            )
    return "ok"


def _patch_corners(values: np.ndarray, bad: set, n: int) -> np.ndarray:
    """Replace corner-adjacent garbage nodes by quadratic extrapolation."""
    for node in bad:
        if min(node, n - node) > _CORNER_FIT:
            raise NumericError(
                f"kernel non-finite away from the interval corners (node {node})"
            )
    out = values.copy()
    left = [i for i in bad if i <= n // 2]
    right = [i for i in bad if i > n // 2]
    patched = 0
    for cluster, at_left in ((left, True), (right, False)):
        if not cluster:
            continue
        if at_left:
            hi = max(cluster) + _CORNER_PAD
            fit = np.arange(hi + 1, hi + 1 + _CORNER_FIT)
            fix = np.arange(0, hi + 1)
        else:
            lo = min(cluster) - _CORNER_PAD
            fit = np.arange(lo - _CORNER_FIT, lo)
            fix = np.arange(lo, n + 1)
        coeffs = np.polyfit(fit.astype(float), out[fit], 2)
        out[fix] = np.polyval(coeffs, fix.astype(float))
        patched += len(fix)
    warnings.warn(
        f"extrapolated {patched} corner-adjacent output nodes",
        CornerExtrapolationWarning,
        stacklevel=3,
    )
    return out


def _check_interval(p: ParameterSet, kernel: Kernel, f: SampledFunction) -> Grid:
    grid = f.grid
    if abs(grid.a - p.a) > 1e-12 * (1.0 + abs(p.a)) or abs(grid.b - p.b) > 1e-12 * (
        1.0 + abs(p.b)
    ):
        raise InputError(
            f"sample interval [{grid.a}, {grid.b}] does not match "
            f"parameter interval [{p.a}, {p.b}]"
        )
    if kernel.requires_positive_domain and grid.a <= 0.0:
        raise DomainError("this kernel needs a strictly positive interval, got a <= 0")
    return grid


def k_apply(p: ParameterSet, kernel: Kernel, f: SampledFunction) -> SampledFunction:
    """Apply the two-sided integral operator to sampled data.

    The left integral uses product-integration weights that are exact for
    the piecewise-linear interpolant of the bounded cofactor times ``f``;
    the right integral reuses the same machinery on the reflected
    interval.
    """
    grid = _check_interval(p, kernel, f)
    n = grid.n
    out = np.zeros(n + 1)
    bad: set = set()
    if p.lam != 0.0:
        left, flags = _apply_left(kernel, grid, f.values)
        out += p.lam * left
        bad.update(flags)
    if p.mu != 0.0:
        reflected = _ReflectedKernel(kernel, grid.a, grid.b)
        res, flags = _apply_left(reflected, grid, f.values[::-1].copy())
        out += p.mu * res[::-1]
        bad.update(n - j for j in flags)
    if bad:
        out = _patch_corners(out, bad, n)
    return SampledFunction(grid, out)


def a_apply(p: ParameterSet, kernel: Kernel, f: SampledFunction) -> SampledFunction:
    """Derivative-outside operator: grid derivative of ``k_apply``.

    Output values at an active endpoint (left when ``lam != 0``, right
    when ``mu != 0``) are continued linearly from the two nearest interior
    nodes, since the true derivative may be unbounded there.
    """
    inner = k_apply(p, kernel, f)
    grid = f.grid
    d = np.gradient(inner.values, grid.h, edge_order=2)
    if p.lam != 0.0:
        d[0] = 2.0 * d[1] - d[2]
    if p.mu != 0.0:
        d[-1] = 2.0 * d[-2] - d[-3]
    return SampledFunction(grid, d)


def _bapply_left(kernel: Kernel, grid: Grid, fv: np.ndarray):
    """Left integral of the kernel against the cell derivative of ``fv``.

    The derivative inside the composition is the exact (cellwise
    constant) derivative of the piecewise-linear interpolant, so the
    interpolation error of ``f`` telescopes within each cell instead of
    polluting the quadrature near a startup cusp.
    """
    n, h, t = grid.n, grid.h, grid.nodes
    df = np.diff(fv)

    if kernel.is_difference:
        s = kernel.exponent_at(t[0])
        mu = 1.0 - s
        a_coef, b_coef = _pi_coefficients(mu, n)
        prof = np.asarray(kernel.profile(t - grid.a), dtype=float)
        if not np.all(np.isfinite(prof)):
            bad = int(np.flatnonzero(~np.isfinite(prof))[0])
            raise NumericError(f"kernel profile non-finite at lag index {bad}")
        cell = prof[1:] * (a_coef - b_coef) + prof[:-1] * b_coef
        out = np.empty(n + 1)
        out[0] = 0.0
        out[1:] = h ** (mu - 1.0) * np.convolve(df, cell)[:n]
        return out, []

    out = np.zeros(n + 1)
    flagged: list[int] = []
    a_coef = b_coef = None
    if kernel.has_constant_exponent:
        const_s = kernel.exponent_at(t[0])
        a_coef, b_coef = _pi_coefficients(1.0 - const_s, n)

    for j in range(1, n + 1):
        if kernel.has_constant_exponent:
            s = const_s
            amb_rev = (a_coef[j - 1::-1] - b_coef[j - 1::-1])
            b_rev = b_coef[j - 1::-1]
        else:
            s = kernel.exponent_at(t[j])
            aj, bj = _pi_coefficients(1.0 - s, j)
            amb_rev = (aj - bj)[::-1]
            b_rev = bj[::-1]
        mu = 1.0 - s
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.asarray(kernel.cofactor(t[j], t[: j + 1], s), dtype=float)
        if not np.all(np.isfinite(c)):
            c = c.copy()
            status = _mend_row(c, j, n, s)
            if status == "flag":
                flagged.append(j)
                out[j] = np.nan
                continue
        out[j] = h ** (mu - 1.0) * float(
            df[:j] @ (c[:-1] * amb_rev + c[1:] * b_rev)
        )
    return out, flagged


def b_apply(p: ParameterSet, kernel: Kernel, f: SampledFunction) -> SampledFunction:
    """Derivative-inside operator: kernel integral of the derivative of ``f``."""
    grid = _check_interval(p, kernel, f)
    n = grid.n
    out = np.zeros(n + 1)
    bad: set = set()
    if p.lam != 0.0:
        left, flags = _bapply_left(kernel, grid, f.values)
        out += p.lam * left
        bad.update(flags)
    if p.mu != 0.0:
        reflected = _ReflectedKernel(kernel, grid.a, grid.b)
        res, flags = _bapply_left(reflected, grid, f.values[::-1].copy())
        out -= p.mu * res[::-1]
        bad.update(n - j for j in flags)
    if bad:
        out = _patch_corners(out, bad, n)
    return SampledFunction(grid, out)


@dataclass(frozen=True)
class OperatorBinding:
    """A kernel tied to a parameter set, ready to act on sampled functions."""

    p: ParameterSet
    kernel: Kernel

    def k(self, f: SampledFunction) -> SampledFunction:
        return k_apply(self.p, self.kernel, f)

    def a(self, f: SampledFunction) -> SampledFunction:
        return a_apply(self.p, self.kernel, f)

    def b(self, f: SampledFunction) -> SampledFunction:
        return b_apply(self.p, self.kernel, f)

    def dual(self) -> "OperatorBinding":
        return OperatorBinding(dual(self.p), self.kernel)


class ClassicalOp(str, Enum):
    RL_INT_LEFT = "RLIntLeft"
    RL_INT_RIGHT = "RLIntRight"
    RL_DER_LEFT = "RLDerLeft"
    RL_DER_RIGHT = "RLDerRight"
    CAPUTO_LEFT = "CaputoLeft"
    CAPUTO_RIGHT = "CaputoRight"
    HADAMARD_LEFT = "HadamardLeft"
    VAR_ORDER_INT_LEFT = "VarOrderIntLeft"
    VAR_ORDER_CAPUTO_LEFT = "VarOrderCaputoLeft"


_VARIABLE_OPS = {ClassicalOp.VAR_ORDER_INT_LEFT, ClassicalOp.VAR_ORDER_CAPUTO_LEFT}


def classical(op, order, f: SampledFunction) -> SampledFunction:
    """Evaluate a named one-sided operator of the classical families.

    ``order`` is a float in ``(0, 1)``, except for the variable-order
    entries, which take a callable ``order(t, tau)``.
    """
    try:
        op = ClassicalOp(op)
    except ValueError:
        raise ConfigurationError(f"unknown operator name {op!r}") from None
    grid = f.grid
    if op in _VARIABLE_OPS:
        if not callable(order):
            raise ConfigurationError(f"{op.value} needs a callable order(t, tau)")
    else:
        if callable(order):
            raise ConfigurationError(f"{op.value} takes a constant order, not a callable")
        if not 0.0 < order < 1.0:
            raise DomainError(f"order must lie in (0, 1), got {order}")

    left = ParameterSet(grid.a, grid.b, 1.0, 0.0)
    right = ParameterSet(grid.a, grid.b, 0.0, 1.0)
    if op is ClassicalOp.RL_INT_LEFT:
        return k_apply(left, PowerLawKernel(order, "integral"), f)
    if op is ClassicalOp.RL_INT_RIGHT:
        return k_apply(right, PowerLawKernel(order, "integral"), f)
    if op is ClassicalOp.RL_DER_LEFT:
        return a_apply(left, PowerLawKernel(order, "derivative"), f)
    if op is ClassicalOp.RL_DER_RIGHT:
        out = a_apply(right, PowerLawKernel(order, "derivative"), f)
        return SampledFunction(grid, -out.values)
    if op is ClassicalOp.CAPUTO_LEFT:
        return b_apply(left, PowerLawKernel(order, "derivative"), f)
    if op is ClassicalOp.CAPUTO_RIGHT:
        out = b_apply(right, PowerLawKernel(order, "derivative"), f)
        return SampledFunction(grid, -out.values)
    if op is ClassicalOp.HADAMARD_LEFT:
        return k_apply(left, HadamardKernel(order), f)
    if op is ClassicalOp.VAR_ORDER_INT_LEFT:
        return k_apply(left, VariableOrderKernel(order, "integral"), f)
    return b_apply(left, VariableOrderKernel(order, "derivative"), f)


def boundedness_constant(order: float, a: float, b: float) -> float:
    """Operator-norm bound ``(b - a)**order / Gamma(order + 1)`` of the
    left power-law integral on square-integrable functions."""
    if not 0.0 < order < 1.0:
        raise DomainError(f"order must lie in (0, 1), got {order}")
    if not b > a:
        raise InputError(f"need b > a, got a={a}, b={b}")
    return (b - a) ** order / gamma(order + 1.0)


class IBPReport(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def verify_ibp(p: ParameterSet, kernel: Kernel, f: SampledFunction, g: SampledFunction) -> IBPReport:
    """Check the swap identity: integrating ``f * K[g]`` equals
    integrating ``g * K_dual[f]``."""
    if f.grid != g.grid:
        raise InputError("f and g must share one grid")
    lhs = trapezoid(SampledFunction(f.grid, f.values * k_apply(p, kernel, g).values))
    rhs = trapezoid(SampledFunction(f.grid, g.values * k_apply(dual(p), kernel, f).values))
    return IBPReport(lhs, rhs, abs(lhs - rhs))


def verify_semigroup(alpha: float, beta: float, f: SampledFunction) -> float:
    """Interior sup distance between composed and single-step power-law
    integrals of orders ``alpha`` then ``beta`` versus ``alpha + beta``."""
    for name, val in (("alpha", alpha), ("beta", beta)):
        if not 0.0 < val < 1.0:
            raise DomainError(f"{name} must lie in (0, 1), got {val}")
    if not alpha + beta < 1.0:
        raise DomainError(f"alpha + beta must stay below 1, got {alpha + beta}")
    staged = classical(ClassicalOp.RL_INT_LEFT, alpha, classical(ClassicalOp.RL_INT_LEFT, beta, f))
    direct = classical(ClassicalOp.RL_INT_LEFT, alpha + beta, f)
    return interior_sup(staged.values - direct.values)
