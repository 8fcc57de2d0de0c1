"""Smooth test functions on the real line with exact high-order derivatives.

A :class:`TestFunction` carries a routine returning all derivatives up to a
requested order at once, so products (Leibniz rule), translations and
modulations compose without numerical differentiation.  Higher dimensions
are reached through :class:`TensorFunction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import comb

from .errors import BoundaryMaximum, InvalidLatticeParameter, ZeroAtOrigin
from .weights import WeightFunction

DEFAULT_ALPHA_MAX = 40
INTERIOR_MARGIN = 5

DerivFn = Callable[[np.ndarray, int], np.ndarray]


@dataclass(frozen=True)
class Support:
    """Where a function lives.

    ``kind`` is ``"compact"`` (exactly zero outside ``[lo, hi]``),
    ``"gaussian"`` (bounded by ``C exp(-rate dist(x, [lo, hi])^2)`` up to a
    polynomial factor) or ``"polynomial"`` (no decay; multipliers only).
    """

    kind: str
    lo: float = 0.0
    hi: float = 0.0
    rate: float = math.pi

    def box(self, tol: float = 1e-16) -> tuple[float, float]:
        """An interval outside of which the function is below ``tol`` (relative)."""
        if self.kind == "compact":
            return self.lo, self.hi
        if self.kind == "gaussian":
            pad = math.sqrt((math.log(1.0 / tol) + 12.0) / self.rate)
            return self.lo - pad, self.hi + pad
        raise ValueError("functions of polynomial growth have no bounded effective support")

    def shift(self, x0: float) -> "Support":
        return replace(self, lo=self.lo + x0, hi=self.hi + x0)

    def reflect(self) -> "Support":
        return replace(self, lo=-self.hi, hi=-self.lo)

    def scale(self, c: float) -> "Support":
        lo, hi = sorted((self.lo / c, self.hi / c))
        return replace(self, lo=lo, hi=hi, rate=self.rate * c * c)


def _product_support(a: Support, b: Support) -> Support:
    if a.kind == "compact" and b.kind == "compact":
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        return Support("compact", lo, max(lo, hi))
    if a.kind == "compact" or b.kind == "compact":
        return a if a.kind == "compact" else b
    if a.kind == "polynomial" or b.kind == "polynomial":
        return b if a.kind == "polynomial" else a
    rate = a.rate + b.rate
    # the product of two gaussian envelopes is centred between their cores
    lo = (a.rate * a.lo + b.rate * b.lo) / rate
    hi = (a.rate * a.hi + b.rate * b.hi) / rate
    return Support("gaussian", min(lo, hi), max(lo, hi), rate)


def _sum_support(a: Support, b: Support) -> Support:
    if a.kind == "polynomial" or b.kind == "polynomial":
        return Support("polynomial")
    if a.kind == "compact" and b.kind == "compact":
        return Support("compact", min(a.lo, b.lo), max(a.hi, b.hi))
    rate = min(x.rate for x in (a, b) if x.kind == "gaussian")
    return Support("gaussian", min(a.lo, b.lo), max(a.hi, b.hi), rate)


class TestFunction:
    """A smooth function on the real line with exact derivatives.

    ``derivs(x, n)`` must return an array of shape ``(n + 1,) + x.shape``
    holding the derivatives of orders ``0..n`` at ``x``.
    """

    __test__ = False  # keep pytest from collecting this class

    dim = 1

    def __init__(self, derivs: DerivFn, label: str, support: Support, alpha_max: int = DEFAULT_ALPHA_MAX):
        self._derivs = derivs
        self.label = label
        self.support = support
        self.alpha_max = alpha_max

    def derivatives(self, x, n: int) -> np.ndarray:
        if n > self.alpha_max:
            raise ValueError(f"{self.label}: derivatives only up to order {self.alpha_max}")
        x = np.asarray(x, dtype=float)
        return np.asarray(self._derivs(x, n), dtype=complex)

    def derivative(self, alpha: int, x) -> np.ndarray:
        return self.derivatives(x, alpha)[alpha]

    def __call__(self, x) -> np.ndarray:
        return self.derivatives(x, 0)[0]

    def __repr__(self) -> str:
        return f"TestFunction({self.label})"

    # arithmetic --------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, TestFunction):
            return multiply(self, other)
        return scale_values(self, other)

    __rmul__ = __mul__

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return add(self, other)

    def __neg__(self) -> "TestFunction":
        return scale_values(self, -1.0)

    def __sub__(self, other: "TestFunction") -> "TestFunction":
        return add(self, scale_values(other, -1.0))


# ---------------------------------------------------------------------------
# basic constructors
# ---------------------------------------------------------------------------


def _gaussian_derivs(x: np.ndarray, n: int) -> np.ndarray:
    out = np.empty((n + 1,) + x.shape)
    out[0] = np.exp(-math.pi * x * x)
    if n >= 1:
        out[1] = -2.0 * math.pi * x * out[0]
    for k in range(1, n):
        out[k + 1] = -2.0 * math.pi * (x * out[k] + k * out[k - 1])
    return out


def gaussian_window(alpha_max: int = DEFAULT_ALPHA_MAX) -> TestFunction:
    """``exp(-pi x^2)``; derivatives by the Hermite three-term recurrence."""
    return TestFunction(_gaussian_derivs, "gaussian", Support("gaussian", 0.0, 0.0, math.pi), alpha_max)


def polynomial(coefficients: Sequence[float], label: str | None = None,
               alpha_max: int = DEFAULT_ALPHA_MAX) -> TestFunction:
    """``sum c_j x^j`` (power basis, lowest degree first); a multiplier, not a window."""
    base = np.polynomial.Polynomial(np.asarray(coefficients, dtype=complex))

    def derivs(x, n):
        out = np.zeros((n + 1,) + x.shape, dtype=complex)
        p = base
        for k in range(n + 1):
            out[k] = p(x)
            p = p.deriv()
        return out

    return TestFunction(derivs, label or f"poly{list(coefficients)}", Support("polynomial"), alpha_max)


def constant(c: complex = 1.0, alpha_max: int = DEFAULT_ALPHA_MAX) -> TestFunction:
    return polynomial([c], label=f"const({c})", alpha_max=alpha_max)


def hermite_window(n: int, alpha_max: int = DEFAULT_ALPHA_MAX) -> TestFunction:
    """``H_n(sqrt(2 pi) x) exp(-pi x^2)`` with physicists' ``H_n`` (so ``hermite(0)`` is the gaussian)."""
    if n < 0 or n > alpha_max:
        raise ValueError("hermite order must lie in [0, alpha_max]")
    power = np.polynomial.hermite.herm2poly([0] * n + [1])
    c = math.sqrt(2.0 * math.pi)
    coeffs = power * c ** np.arange(len(power))
    f = multiply(polynomial(coeffs, alpha_max=alpha_max), gaussian_window(alpha_max))
    f.label = f"hermite({n})"
    return f


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def multiply(f: TestFunction, g: TestFunction) -> TestFunction:
    """Pointwise product; derivatives by the Leibniz rule."""
    amax = min(f.alpha_max, g.alpha_max)

    def derivs(x, n):
        F = f.derivatives(x, n)
        G = g.derivatives(x, n)
        out = np.zeros((n + 1,) + x.shape, dtype=complex)
        for a in range(n + 1):
            b = np.arange(a + 1)
            w = comb(a, b, exact=False).reshape((-1,) + (1,) * x.ndim)
            out[a] = np.sum(w * F[: a + 1] * G[a::-1], axis=0)
        return out

    return TestFunction(derivs, f"({f.label}*{g.label})", _product_support(f.support, g.support), amax)


def add(f: TestFunction, g: TestFunction) -> TestFunction:
    amax = min(f.alpha_max, g.alpha_max)
    return TestFunction(lambda x, n: f.derivatives(x, n) + g.derivatives(x, n), f"({f.label}+{g.label})",
                        _sum_support(f.support, g.support), amax)


def scale_values(f: TestFunction, c: complex) -> TestFunction:
    """``c f``."""
    return TestFunction(lambda x, n: c * f.derivatives(x, n), f"{c}*{f.label}", f.support, f.alpha_max)


def translate(f: TestFunction, x0: float) -> TestFunction:
    """``T_x0 f(t) = f(t - x0)``."""
    if x0 == 0:
        return f
    return TestFunction(lambda x, n: f.derivatives(x - x0, n), f"T[{x0:g}]{f.label}", f.support.shift(x0),
                        f.alpha_max)


def modulate(f: TestFunction, xi: float) -> TestFunction:
    """``M_xi f(t) = exp(2 pi i xi t) f(t)``."""
    if xi == 0:
        return f
    w = 2j * math.pi * xi

    def derivs(x, n):
        F = f.derivatives(x, n)
        e = np.exp(w * x)
        out = np.zeros((n + 1,) + x.shape, dtype=complex)
        for a in range(n + 1):
            for b in range(a + 1):
                out[a] += comb(a, b, exact=True) * w ** (a - b) * F[b]
        return out * e

    return TestFunction(derivs, f"M[{xi:g}]{f.label}", f.support, f.alpha_max)


def reflect(f: TestFunction) -> TestFunction:
    """``f(-t)``."""
    def derivs(x, n):
        F = f.derivatives(-x, n)
        sign = (-1.0) ** np.arange(n + 1)
        return F * sign.reshape((-1,) + (1,) * x.ndim)

    return TestFunction(derivs, f"R{f.label}", f.support.reflect(), f.alpha_max)


def conjugate(f: TestFunction) -> TestFunction:
    return TestFunction(lambda x, n: np.conj(f.derivatives(x, n)), f"conj({f.label})", f.support, f.alpha_max)


def dilate(f: TestFunction, c: float) -> TestFunction:
    """``f(c t)``."""
    def derivs(x, n):
        F = f.derivatives(c * x, n)
        return F * (c ** np.arange(n + 1)).reshape((-1,) + (1,) * x.ndim)

    return TestFunction(derivs, f"D[{c:g}]{f.label}", f.support.scale(c), f.alpha_max)


def autocorrelation_window(f: TestFunction) -> TestFunction:
    """``f * reflect(f)``, a window whose value at the origin is ``f(0)^2``."""
    f0 = complex(f(np.array(0.0)))
    if abs(f0) == 0.0:
        raise ZeroAtOrigin(f"{f.label} vanishes at the origin")
    g = multiply(f, reflect(f))
    g.label = f"auto({f.label})"
    return g


# ---------------------------------------------------------------------------
# the compactly supported partition-of-unity window
# ---------------------------------------------------------------------------


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@lru_cache(maxsize=None)
def bump_prefactor(k: int) -> tuple[int, ...]:
    """Integer coefficients of ``P_k`` with ``b^(k) = P_k(x) / (x(1-x))^(2k) b``.

    Here ``b(x) = exp(-1 / (x (1 - x)))``.  The recursion
    ``P_{k+1} = (P_k' w - 2k P_k w') w + P_k w'`` with ``w = x(1-x)`` is
    exact.  Evaluating ``P_k`` in floating point loses all accuracy beyond
    ``k ~ 10``, so it serves as the exact reference; numerical values come
    from :func:`bump_derivatives`.
    """
    if k == 0:
        return (1,)
    prev = list(bump_prefactor(k - 1))
    w, dw = [0, 1, -1], [1, -2]
    dprev = [i * prev[i] for i in range(1, len(prev))] or [0]
    inner = _padd(_pmul(dprev, w), [-2 * (k - 1) * c for c in _pmul(prev, dw)])
    return tuple(_padd(_pmul(inner, w), _pmul(prev, dw)))


def bump_derivatives(x, n: int) -> np.ndarray:
    """Derivatives ``0..n`` of ``b(x) = exp(-1/(x(1-x)))`` (zero outside ``(0, 1)``).

    Uses the Taylor coefficients of ``-1/(x+h) - 1/(1-x-h)`` and the power
    series recurrence ``n e_n = sum_j j q_j e_{n-j}`` for the exponential.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((n + 1,) + x.shape)
    inside = (x > 0.0) & (x < 1.0)
    if not inside.any():
        return out
    xi = x[inside]
    j = np.arange(n + 1).reshape(-1, 1)
    with np.errstate(over="ignore", under="ignore"):
        q = -(((-1.0) ** j) / xi ** (j + 1) + 1.0 / (1.0 - xi) ** (j + 1))
        e = np.zeros((n + 1, xi.size))
        e[0] = np.exp(q[0])
        for m in range(1, n + 1):
            e[m] = np.sum(np.arange(1, m + 1).reshape(-1, 1) * q[1: m + 1] * e[m - 1:: -1][: m], axis=0) / m
        fact = np.array([math.factorial(m) for m in range(n + 1)], dtype=float).reshape(-1, 1)
        vals = np.nan_to_num(e * fact, nan=0.0, posinf=0.0, neginf=0.0)
    out[:, inside] = vals
    return out


def _bump(x):
    return bump_derivatives(x, 0)[0]


@lru_cache(maxsize=1)
def _ramp_table(n_cells: int = 1024, order: int = 24):
    """Cumulative integrals of the bump on a uniform partition of ``[0, 1/2]`` (Gauss-Legendre)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 0.5, n_cells + 1)
    a, b = edges[:-1], edges[1:]
    mid, half = (a + b) / 2, (b - a) / 2
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    cell = (half[:, None] * weights[None, :] * _bump(pts)).sum(axis=1)
    cum = np.concatenate([[0.0], np.cumsum(cell)])
    total = 2.0 * cum[-1]
    return edges, cum, total, nodes, weights


def bump_integral() -> float:
    """``Z = int_0^1 b`` from the cumulative Gauss-Legendre table."""
    return _ramp_table()[2]


def _ramp(x: np.ndarray) -> np.ndarray:
    """``H(x) = int_0^x b / Z`` clipped to ``[0, 1]``; symmetric evaluation about 1/2."""
    edges, cum, Z, nodes, weights = _ramp_table()
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    y = np.minimum(x, 1.0 - x)
    i = np.clip(np.searchsorted(edges, y, side="right") - 1, 0, len(edges) - 2)
    a = edges[i]
    half = (y - a) / 2
    pts = (a + half)[..., None] + half[..., None] * nodes
    part = cum[i] + (half[..., None] * weights * _bump(pts)).sum(axis=-1)
    low = part / Z
    return np.where(x <= 0.5, low, 1.0 - low)


def _christensen_derivs(x: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((n + 1,) + x.shape)
    left = (x > 0.0) & (x <= 1.0)
    right = (x > 1.0) & (x < 2.0)
    out[0] = np.where(left, _ramp(x), 0.0) + np.where(right, 1.0 - _ramp(x - 1.0), 0.0)
    if n >= 1:
        Z = bump_integral()
        bl = bump_derivatives(np.where(left, x, -1.0), n - 1) / Z
        br = bump_derivatives(np.where(right, x - 1.0, -1.0), n - 1) / Z
        out[1:] = bl - br
    return out


def christensen_window(alpha_max: int = DEFAULT_ALPHA_MAX) -> TestFunction:
    """Smooth partition-of-unity window supported in ``[0, 2]``.

    ``psi = H`` on ``[0, 1]`` and ``1 - H(x - 1)`` on ``[1, 2]`` where ``H``
    is the normalised integral of the bump ``exp(-1/(x(1-x)))``, so the
    integer translates of ``psi`` sum to one.
    """
    return TestFunction(_christensen_derivs, "christensen", Support("compact", 0.0, 2.0), alpha_max)


def christensen_dual(b: float, alpha_max: int = DEFAULT_ALPHA_MAX) -> TestFunction:
    """``gamma = b psi + 2 b psi(. + 1)``, dual to ``psi`` on ``Z x bZ`` for ``0 < b <= 1/3``."""
    if not 0.0 < b <= 1.0 / 3.0:
        raise InvalidLatticeParameter(f"b = {b} outside (0, 1/3]")
    return _christensen_combo(b, alpha_max)


def _christensen_combo(b: float, alpha_max: int = DEFAULT_ALPHA_MAX) -> TestFunction:
    """The dual-window formula without the parameter gate (used for detuned counterexamples)."""
    psi = christensen_window(alpha_max)
    g = add(scale_values(psi, b), scale_values(translate(psi, -1.0), 2.0 * b))
    g.label = f"christensen_dual({b:g})"
    g.support = Support("compact", -1.0, 2.0)
    return g


# ---------------------------------------------------------------------------
# tensors
# ---------------------------------------------------------------------------


class TensorFunction:
    """``f_1(x_1) ... f_d(x_d)`` with per-axis derivatives."""

    def __init__(self, factors: Sequence[TestFunction]):
        self.factors = tuple(factors)
        self.dim = len(self.factors)
        self.label = "(x)".join(f.label for f in self.factors)
        self.alpha_max = min(f.alpha_max for f in self.factors)

    def derivative(self, alpha: Sequence[int], x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim or len(alpha) != self.dim:
            raise ValueError("dimension mismatch")
        out = np.ones(x.shape[:-1], dtype=complex)
        for j, (f, a) in enumerate(zip(self.factors, alpha)):
            out = out * f.derivative(int(a), x[..., j])
        return out

    def __call__(self, x) -> np.ndarray:
        return self.derivative((0,) * self.dim, x)


def tensor_window(factors: Sequence[TestFunction]) -> TensorFunction:
    return TensorFunction(factors)


# ---------------------------------------------------------------------------
# weighted seminorms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeminormParams:
    """Parameters of ``sup_alpha sup_x |f^(alpha)(x)| v(x) exp(-phi*(h alpha) / h)``.

    ``log_v`` maps ``x`` to ``log v(x)`` (``None`` means ``v = 1``).
    """

    omega: WeightFunction
    h: float
    log_v: Callable[[np.ndarray], np.ndarray] | None = None
    alpha_max: int = DEFAULT_ALPHA_MAX
    grid: np.ndarray | None = None
    step: float = 1e-3

    def __post_init__(self):
        if self.alpha_max < 1:
            raise ValueError("alpha_max must be at least 1")
        if self.h <= 0:
            raise ValueError("h must be positive")


@dataclass(frozen=True)
class SeminormValue:
    value: float
    log_value: float
    alpha: int
    x: float
    interior: bool


def seminorm_grid(f: TestFunction, step: float = 1e-3, tol: float = 1e-18) -> np.ndarray:
    lo, hi = f.support.box(tol)
    n = int(math.ceil((hi - lo) / step)) + 1
    return np.linspace(lo, hi, n)


def gs_seminorm(f: TestFunction, P: SeminormParams, strict: bool = True) -> SeminormValue:
    """Weighted Gelfand-Shilov type seminorm over ``alpha <= alpha_max`` and a spatial grid.

    Raises :class:`BoundaryMaximum` (when ``strict``) if the best ``alpha``
    lies within ``INTERIOR_MARGIN`` of ``alpha_max``.
    """
    x = P.grid if P.grid is not None else seminorm_grid(f, P.step)
    amax = min(P.alpha_max, f.alpha_max)
    D = np.abs(f.derivatives(x, amax))
    conj = P.omega.conjugate()
    alphas = np.arange(amax + 1, dtype=float)
    penalty = np.asarray(conj(P.h * alphas), dtype=float) / P.h
    logv = np.zeros_like(x) if P.log_v is None else np.asarray(P.log_v(x), dtype=float)
    with np.errstate(divide="ignore"):
        logs = np.log(D) + logv[None, :] - penalty[:, None]
    if not np.isfinite(logs).any():
        return SeminormValue(0.0, -math.inf, 0, float(x[0]), True)
    a, i = np.unravel_index(int(np.nanargmax(logs)), logs.shape)
    best = float(logs[a, i])
    interior = bool(a <= amax - INTERIOR_MARGIN)
    if strict and not interior:
        raise BoundaryMaximum(f"seminorm maximum at alpha = {a} (alpha_max = {amax})")
    return SeminormValue(math.exp(best) if best < 700 else math.inf, best, int(a), float(x[i]), interior)
