"""Short-time Fourier transform and Gabor operators on the real line.

Integrals use the trapezoid rule on grids anchored at the origin
(``t_j = j * step``).  Because every window here is smooth and decays fast,
the rule is spectrally accurate.  Anchoring the grid means lattice shifts
that are multiples of the step map samples onto samples, so the sampled
windows (:class:`SampledFunction`) can be shifted exactly, without
interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from .errors import InvalidLattice, NotConverged, TruncationTooTight, WindowsOrthogonal
from .testfunctions import Support, TestFunction, gaussian_window, hermite_window, modulate, translate

DEFAULT_STEP = 1.0 / 64
DEFAULT_XI_RADIUS = 12.0
BOX_TOL = 1e-18
EDGE_TOL = 1e-12
SAMPLED_EDGE_TOL = 1e-9


class SampledFunction:
    """Values on the anchored grid ``{j * step : j0 <= j < j0 + len(values)}``, zero elsewhere.

    Evaluation is exact lookup; points off the grid raise ``ValueError``.
    """

    def __init__(self, j0: int, step: float, values, label: str = "sampled"):
        self.j0 = int(j0)
        self.step = float(step)
        self.values = np.asarray(values, dtype=complex)
        self.label = label
        self.support = Support("compact", self.j0 * self.step, (self.j0 + len(self.values) - 1) * self.step)

    @property
    def t(self) -> np.ndarray:
        return (self.j0 + np.arange(len(self.values))) * self.step

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        u = t / self.step
        j = np.rint(u)
        if np.any(np.abs(u - j) > 1e-6):
            raise ValueError(f"{self.label}: evaluation point off the sampling grid")
        idx = j.astype(np.int64) - self.j0
        ok = (idx >= 0) & (idx < len(self.values))
        out = np.zeros(t.shape, dtype=complex)
        out[ok] = self.values[idx[ok]]
        return out

    def __repr__(self) -> str:
        return f"SampledFunction({self.label}, n={len(self.values)}, step={self.step:g})"


Operand = TestFunction | SampledFunction


@dataclass(frozen=True)
class TimeFrequencyGrid:
    """Phase-space box ``[-radius, radius] x [-xi_radius, xi_radius]`` with its steps.

    ``step`` is also the quadrature step for the inner ``t`` integral.
    """

    radius: float = 4.0
    tf_step: float = DEFAULT_STEP
    xi_radius: float = 4.0
    xi_step: float = DEFAULT_STEP
    step: float = DEFAULT_STEP

    def __post_init__(self):
        if min(self.tf_step, self.xi_step, self.step) <= 0:
            raise ValueError("grid steps must be positive")

    @property
    def xs(self) -> np.ndarray:
        n = int(round(self.radius / self.tf_step))
        return np.arange(-n, n + 1) * self.tf_step

    @property
    def xis(self) -> np.ndarray:
        n = int(round(self.xi_radius / self.xi_step))
        return np.arange(-n, n + 1) * self.xi_step

    def describe(self) -> dict:
        return {"radius": self.radius, "tf_step": self.tf_step, "xi_radius": self.xi_radius,
                "xi_step": self.xi_step, "step": self.step, "rule": "trapezoid"}


# ---------------------------------------------------------------------------
# quadrature plumbing
# ---------------------------------------------------------------------------


def _edge_tol(*operands: Operand) -> float:
    # sampled operands are zero off their grid by definition; their edge is a truncation choice
    return SAMPLED_EDGE_TOL if any(isinstance(f, SampledFunction) for f in operands) else EDGE_TOL


def _step_for(operands: Iterable[Operand], step: float) -> float:
    sampled = {f.step for f in operands if isinstance(f, SampledFunction)}
    if len(sampled) > 1:
        raise ValueError("sampled operands live on different grids")
    return sampled.pop() if sampled else step


def _box(f: Operand) -> tuple[float, float] | None:
    if f.support.kind == "polynomial":
        return None
    return f.support.box(BOX_TOL)


def _anchored(lo: float, hi: float, step: float) -> np.ndarray:
    j0, j1 = math.floor(lo / step), math.ceil(hi / step)
    return np.arange(j0, j1 + 1) * step


def _sup(f: Operand, t: np.ndarray) -> float:
    """``max |f|`` over ``t`` and, for decaying ``f``, over its own effective box."""
    m = float(np.abs(f(t)).max(initial=0.0))
    b = _box(f)
    if b is not None:
        step = f.step if isinstance(f, SampledFunction) else DEFAULT_STEP
        m = max(m, float(np.abs(f(_anchored(b[0], b[1], step))).max(initial=0.0)))
    return m


def _integration_range(f: Operand, window: Operand, shifts: np.ndarray) -> tuple[float, float]:
    fb, wb = _box(f), _box(window)
    if wb is None:
        raise ValueError("the window must decay")
    lo, hi = wb[0] + float(np.min(shifts)), wb[1] + float(np.max(shifts))
    if fb is not None:
        lo, hi = max(lo, fb[0]), min(hi, fb[1])
        if lo > hi:
            lo = hi = 0.5 * (fb[0] + fb[1])
    return lo, hi


def _check_edges(integrand: np.ndarray, label: str, tol: float = EDGE_TOL, scale: float = 0.0):
    """Raise if the integrand is not negligible at both ends of the box.

    ``scale`` is an a priori magnitude (e.g. ``sup|f| sup|psi|``) so rows far
    from the mass of the integrand are judged against it, not their own peak.
    """
    mag = np.abs(integrand)
    peak = max(mag.max(initial=0.0), scale)
    if peak == 0.0:
        return
    edge = max(mag[..., 0].max(), mag[..., -1].max())
    if edge > tol * peak:
        raise TruncationTooTight(f"{label}: boundary integrand {edge:.3g} vs peak {peak:.3g}")


def inner(f: Operand, g: Operand, step: float = DEFAULT_STEP) -> complex:
    """``(f, g)_{L^2}``, conjugate-linear in ``g``."""
    step = _step_for((f, g), step)
    fb, gb = _box(f), _box(g)
    boxes = [b for b in (fb, gb) if b is not None]
    if not boxes:
        raise ValueError("at least one factor must decay")
    lo, hi = max(b[0] for b in boxes), min(b[1] for b in boxes)
    if lo > hi:
        return 0.0j
    t = _anchored(lo, hi, step)
    vals = f(t) * np.conj(g(t))
    _check_edges(vals, "inner product", _edge_tol(f, g))
    return complex(vals.sum() * step)


def l2_norm(f: Operand, step: float = DEFAULT_STEP) -> float:
    return math.sqrt(max(inner(f, f, step).real, 0.0))


# ---------------------------------------------------------------------------
# STFT and its adjoint
# ---------------------------------------------------------------------------


def stft_matrix(f: Operand, psi: Operand, xs, xis, step: float = DEFAULT_STEP, chunk: int = 256,
                with_error: bool = False):
    """``V_psi f(x_i, xi_j)`` on the product of ``xs`` and ``xis``.

    With ``with_error`` also returns the step-halving estimate (the same sum
    over every second node).
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    step = _step_for((f, psi), step)
    lo, hi = _integration_range(f, psi, xs)
    t = _anchored(lo, hi, step)
    even = (np.rint(t / step).astype(np.int64) % 2) == 0
    F = f(t)
    scale = float(np.abs(F).max(initial=0.0)) * _sup(psi, t)
    E = np.exp(-2j * math.pi * np.outer(t, xis))
    out = np.empty((xs.size, xis.size), dtype=complex)
    coarse = np.empty_like(out) if with_error else None
    for s in range(0, xs.size, chunk):
        X = xs[s: s + chunk]
        G = F[None, :] * np.conj(psi(t[None, :] - X[:, None]))
        _check_edges(G, "stft", _edge_tol(f, psi), scale)
        out[s: s + chunk] = (G @ E) * step
        if with_error:
            coarse[s: s + chunk] = (G[:, even] @ E[even]) * (2 * step)
    if with_error:
        return out, float(np.abs(out - coarse).max(initial=0.0))
    return out


def stft(f: Operand, psi: Operand, x, xi, step: float = DEFAULT_STEP, with_error: bool = False):
    """``V_psi f(x, xi) = int f(t) conj(psi(t - x)) exp(-2 pi i xi t) dt`` at broadcast points."""
    x, xi = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xi, dtype=float))
    flat_x, flat_xi = x.ravel(), xi.ravel()
    step = _step_for((f, psi), step)
    lo, hi = _integration_range(f, psi, flat_x if flat_x.size else np.zeros(1))
    t = _anchored(lo, hi, step)
    even = (np.rint(t / step).astype(np.int64) % 2) == 0
    F = f(t)
    scale = float(np.abs(F).max(initial=0.0)) * _sup(psi, t)
    vals = np.empty(flat_x.size, dtype=complex)
    err = 0.0
    for s in range(0, flat_x.size, 256):
        X, XI = flat_x[s: s + 256, None], flat_xi[s: s + 256, None]
        G = F[None, :] * np.conj(psi(t[None, :] - X)) * np.exp(-2j * math.pi * XI * t[None, :])
        _check_edges(G, "stft", _edge_tol(f, psi), scale)
        vals[s: s + 256] = G.sum(axis=1) * step
        if with_error:
            err = max(err, float(np.abs(vals[s: s + 256] - G[:, even].sum(axis=1) * 2 * step).max()))
    vals = vals.reshape(x.shape)
    return (vals, err) if with_error else vals


def stft_of_multiplier(f: TestFunction, psi: Operand, x, xi, step: float = DEFAULT_STEP):
    """STFT of a function of at most polynomial-type growth, integrating ``(T_x conj psi) f``.

    The integration box follows the window only, so ``f`` need not decay.
    """
    return stft(f, psi, x, xi, step=step)


def adjoint_stft(F: np.ndarray, xs, xis, gamma: Operand, t, tol: float = 1e-9) -> np.ndarray:
    """``V*_gamma F(t) = int int F(x, xi) exp(2 pi i xi t) gamma(t - x) dx dxi`` by the 2-d trapezoid rule."""
    F = np.asarray(F, dtype=complex)
    xs, xis = np.asarray(xs, dtype=float), np.asarray(xis, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    peak = np.abs(F).max(initial=0.0)
    if peak == 0.0:
        return np.zeros(t.shape, dtype=complex)
    ring = max(np.abs(F[0]).max(), np.abs(F[-1]).max(), np.abs(F[:, 0]).max(), np.abs(F[:, -1]).max())
    if ring > tol * peak:
        raise TruncationTooTight(f"phase-space field not negligible at the boundary ({ring / peak:.2e})")
    dx = xs[1] - xs[0] if xs.size > 1 else 1.0
    dxi = xis[1] - xis[0] if xis.size > 1 else 1.0
    out = np.empty(t.size, dtype=complex)
    for s in range(0, t.size, 256):
        T = t[s: s + 256]
        inner_xi = F @ np.exp(2j * math.pi * np.outer(xis, T))  # (n_x, n_t)
        out[s: s + 256] = (inner_xi * gamma(T[None, :] - xs[:, None])).sum(axis=0)
    return out * dx * dxi


@dataclass(frozen=True)
class ResidualReport:
    residual: float
    points: int
    details: dict = field(default_factory=dict)

    def passed(self, tol: float) -> bool:
        return self.residual <= tol


def reconstruct(f: Operand, psi: Operand, gamma: Operand, grid: TimeFrequencyGrid = TimeFrequencyGrid(),
                points=None):
    """Apply ``(gamma, psi)^{-1} V*_gamma V_psi`` to ``f`` and compare with ``f``.

    Returns ``(samples, report)``; samples are on ``points`` (default: the
    spatial grid of ``grid``).
    """
    c = inner(gamma, psi, grid.step)
    if abs(c) <= 1e-8:
        raise WindowsOrthogonal(f"(gamma, psi) = {c:.3g}")
    xs, xis = grid.xs, grid.xis
    t = xs if points is None else np.asarray(points, dtype=float)
    F = stft_matrix(f, psi, xs, xis, grid.step)
    out = adjoint_stft(F, xs, xis, gamma, t) / c
    res = float(np.abs(out - f(t)).max(initial=0.0))
    return out, ResidualReport(res, int(t.size), {"pairing": [c.real, c.imag], "grid": grid.describe()})


def stft_l2_norm(f: Operand, psi: Operand, radius: float = 8.0, tf_step: float = 1.0 / 16,
                 step: float = DEFAULT_STEP) -> float:
    """``||V_psi f||_{L^2(R^2)}`` by the 2-d trapezoid rule on ``[-radius, radius]^2``."""
    n = int(round(radius / tf_step))
    xs = np.arange(-n, n + 1) * tf_step
    V = stft_matrix(f, psi, xs, xs, step)
    ring = max(np.abs(V[0]).max(), np.abs(V[-1]).max(), np.abs(V[:, 0]).max(), np.abs(V[:, -1]).max())
    if ring > 1e-7 * np.abs(V).max(initial=1.0):
        raise TruncationTooTight("phase-space box too small for the isometry integral")
    return math.sqrt(float((np.abs(V) ** 2).sum()) * tf_step * tf_step)


# ---------------------------------------------------------------------------
# Gabor systems
# ---------------------------------------------------------------------------


@dataclass
class LatticeCoefficients:
    """Coefficients ``c[k, n]`` for ``(a k, b n)``, ``|k| <= k_max``, ``|n| <= n_max``."""

    a: float
    b: float
    values: np.ndarray

    @property
    def k_max(self) -> int:
        return (self.values.shape[0] - 1) // 2

    @property
    def n_max(self) -> int:
        return (self.values.shape[1] - 1) // 2

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    @property
    def ns(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    @classmethod
    def zeros(cls, a: float, b: float, k_max: int, n_max: int) -> "LatticeCoefficients":
        return cls(a, b, np.zeros((2 * k_max + 1, 2 * n_max + 1), dtype=complex))

    def __getitem__(self, kn: tuple[int, int]) -> complex:
        k, n = kn
        return self.values[k + self.k_max, n + self.n_max]

    def __setitem__(self, kn: tuple[int, int], value: complex):
        k, n = kn
        self.values[k + self.k_max, n + self.n_max] = value

    def ring_max(self) -> float:
        v = np.abs(self.values)
        return float(max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max()))

    def energy(self) -> float:
        return float((np.abs(self.values) ** 2).sum())

    def rows(self) -> list[tuple[int, int, float, float]]:
        out = []
        for i, k in enumerate(self.ks):
            for j, n in enumerate(self.ns):
                z = self.values[i, j]
                out.append((int(k), int(n), float(z.real), float(z.imag)))
        return out


def gabor_analysis(f: Operand, psi: Operand, a: float, b: float, k_max: int, n_max: int,
                   step: float = DEFAULT_STEP) -> LatticeCoefficients:
    """``C_psi f = (V_psi f(a k, b n))`` on the index box."""
    ks, ns = np.arange(-k_max, k_max + 1), np.arange(-n_max, n_max + 1)
    return LatticeCoefficients(a, b, stft_matrix(f, psi, a * ks, b * ns, step))


def gabor_synthesis(c: LatticeCoefficients, gamma: Operand, t) -> np.ndarray:
    """``D_gamma c(t) = sum c[k, n] exp(2 pi i b n t) gamma(t - a k)``."""
    t = np.asarray(t, dtype=float)
    E = np.exp(2j * math.pi * c.b * np.outer(c.ns, t))
    series = c.values @ E  # (n_k, n_t)
    shifts = gamma(t[None, :] - c.a * c.ks[:, None])
    return (series * shifts).sum(axis=0)


def _k_range(f: Operand, psi: Operand, a: float) -> int:
    fb, pb = _box(f), _box(psi)
    reach = max(abs(fb[0]), abs(fb[1])) + max(abs(pb[0]), abs(pb[1]))
    return int(math.ceil(reach / a)) + 1


def _analysis_auto(f, psi, a, b, step, ring_tol=1e-12, n_start=None):
    """Analysis on a box grown in ``n`` until the outer modulation ring is negligible.

    Frequencies stay below a quarter of the sampling rate ``1/step`` so the
    trapezoid rule does not alias; reaching that cap first raises
    :class:`TruncationTooTight`.
    """
    k_max = _k_range(f, psi, a)
    n_cap = int(0.25 / (step * b))
    n_max = min(n_start or int(math.ceil(8.0 / b)), n_cap)
    while True:
        c = gabor_analysis(f, psi, a, b, k_max, n_max, step)
        peak = np.abs(c.values).max(initial=0.0)
        ring = np.abs(c.values[:, [0, -1]]).max(initial=0.0)
        if peak == 0.0 or ring <= ring_tol * peak:
            return c
        if n_max >= n_cap:
            raise TruncationTooTight(f"modulation ring {ring / peak:.2e} at the aliasing cap; refine the step")
        n_max = min(2 * n_max, n_cap)


def _sample_points(f: Operand, step: float, spacing: float = DEFAULT_STEP) -> np.ndarray:
    lo, hi = f.support.box(1e-12)
    return _anchored(lo, hi, spacing)


def frame_roundtrip(f: Operand, psi: Operand, gamma: Operand, a: float, b: float,
                    step: float = DEFAULT_STEP, points=None, ring_tol: float = 1e-12) -> ResidualReport:
    """Sup residual of ``D_gamma C_psi f - f`` and of the swapped ``D_psi C_gamma f - f``."""
    t = _sample_points(f, step) if points is None else np.asarray(points, dtype=float)
    scale = 1.0
    results = {}
    for name, (u, w) in {"forward": (psi, gamma), "swapped": (gamma, psi)}.items():
        c = _analysis_auto(f, u, a, b, step, ring_tol)
        if np.abs(c.values).max(initial=0.0) == 0.0:
            results[name] = (0.0, c)
            continue
        back = gabor_synthesis(c, w, t)
        results[name] = (float(np.abs(back - f(t)).max(initial=0.0)) / scale, c)
    fwd, c_fwd = results["forward"]
    swp, _ = results["swapped"]
    return ResidualReport(fwd, int(t.size), {"swapped": swp, "k_max": c_fwd.k_max, "n_max": c_fwd.n_max,
                                             "a": a, "b": b})


def wexler_raz_check(psi: Operand, gamma: Operand, a: float, b: float, box: int = 6,
                     step: float = DEFAULT_STEP) -> ResidualReport:
    """Biorthogonality on the adjoint lattice: translations by ``1/b``, modulations by ``1/a``.

    By covariance, ``(M_n T_k psi, M_n' T_k' gamma)`` reduces (up to a
    unimodular factor) to ``(M_{n-n'} T_{k-k'} psi, gamma)``, so the residual
    is ``max |(M_{n/a} T_{k/b} psi, gamma) - ab delta|`` over ``|k|, |n| <= box``.
    """
    step = _step_for((psi, gamma), step)
    ks = np.arange(-box, box + 1)
    ns = np.arange(-box, box + 1)
    # (M_xi T_x psi, gamma) = conj(V_psi gamma(x, xi))
    V = np.conj(stft_matrix(gamma, psi, ks / b, ns / a, step))
    target = np.zeros_like(V)
    target[box, box] = a * b
    dev = np.abs(V - target)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return ResidualReport(float(dev.max()), int(dev.size), {"worst": [int(ks[i]), int(ns[j])],
                                                            "diagonal": [V[box, box].real, V[box, box].imag]})


def fourier_transform(f: Operand, step: float = 1.0 / 256, period: float = 32.0, label: str | None = None) -> SampledFunction:
    """Samples of ``f^(xi) = int f(t) exp(-2 pi i xi t) dt`` at ``xi = m / period`` (FFT).

    ``f`` must be negligible outside ``[-period/2, period/2)``.
    """
    n = int(round(period / step))
    j = np.arange(-n // 2, n // 2)
    t = j * step
    vals = f(t)
    _check_edges(vals, "fourier transform")
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(vals))) * step
    return SampledFunction(-n // 2, 1.0 / period, spec, label or f"hat({getattr(f, 'label', 'f')})")


def fourier_pair_check(psi: Operand, gamma: Operand, a: float, b: float, box: int = 6,
                       step: float = 1.0 / 256, period: float = 32.0) -> ResidualReport:
    """Wexler-Raz for the transformed pair with the roles of ``a`` and ``b`` exchanged."""
    ph, gh = fourier_transform(psi, step, period), fourier_transform(gamma, step, period)
    rep = wexler_raz_check(ph, gh, b, a, box)
    return ResidualReport(rep.residual, rep.points, {**rep.details, "freq_step": ph.step})


def wr_inverse_identity_check(psi: Operand, gamma: Operand, a: float, b: float,
                              c: LatticeCoefficients, step: float = 1.0 / 256) -> ResidualReport:
    """``max |(ab)^{-1} C_psi D_gamma c - c|`` with both operators on the adjoint lattice.

    The adjoint lattice translates by ``1/b`` and modulates by ``1/a``, so
    ``c.a`` must equal ``1/b`` and ``c.b`` must equal ``1/a``.
    """
    if not (math.isclose(c.a, 1.0 / b) and math.isclose(c.b, 1.0 / a)):
        raise ValueError("coefficients must live on the adjoint lattice")
    if np.abs(c.values).max(initial=0.0) == 0.0:
        return ResidualReport(0.0, int(c.values.size))
    gb = _box(gamma)
    lo, hi = gb[0] - c.a * c.k_max, gb[1] + c.a * c.k_max
    t = _anchored(lo, hi, step)
    g = SampledFunction(int(round(t[0] / step)), step, gabor_synthesis(c, gamma, t), "D_gamma c")
    back = gabor_analysis(g, psi, c.a, c.b, c.k_max, c.n_max, step)
    res = float(np.abs(back.values / (a * b) - c.values).max())
    return ResidualReport(res, int(c.values.size))


# ---------------------------------------------------------------------------
# frame bounds and canonical duals
# ---------------------------------------------------------------------------


def probe_battery(count: int = 20) -> list[TestFunction]:
    """Time-frequency shifted Hermite functions used as Rayleigh-quotient probes."""
    shifts = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.3, -0.7), (-1.0, 0.25)]
    out = []
    for j in range(4):
        for u, eta in shifts:
            out.append(modulate(translate(hermite_window(j), u), eta))
    return out[:count]


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    quotients: tuple[float, ...]

    @property
    def ratio(self) -> float:
        return self.lower / self.upper if self.upper > 0 else 0.0


def frame_bounds_estimate(psi: Operand, a: float, b: float, probes: Sequence[Operand] | None = None,
                          step: float = DEFAULT_STEP) -> FrameBounds:
    """Empirical frame bounds: extreme values of ``sum |V_psi f(ak, bn)|^2 / ||f||^2`` over probes."""
    probes = probe_battery() if probes is None else list(probes)
    q = []
    for f in probes:
        c = _analysis_auto(f, psi, a, b, step)
        q.append(c.energy() / inner(f, f, step).real)
    return FrameBounds(min(q), max(q), tuple(q))


def _lattice_multiple(value: float, step: float, name: str) -> int:
    m = value / step
    if abs(m - round(m)) > 1e-9 * max(1.0, abs(m)):
        raise ValueError(f"{name} = {value} is not a multiple of the grid step {step}")
    return int(round(m))


@dataclass
class DualWindow:
    window: SampledFunction
    iterations: int
    wexler_raz: ResidualReport


def gaussian_dual(a: float, b: float, radius: float = 8.0, n: int = 4096, max_iter: int = 500,
                  tol: float = 1e-13, psi: TestFunction | None = None) -> DualWindow:
    """Canonical dual ``S^{-1} psi`` of the gaussian by conjugate gradients.

    The frame operator acts on samples over ``[-radius, radius]`` through
    ``S f(t) = (1/b) sum_j f(t - j/b) sum_k conj(psi(t - j/b - ak)) psi(t - ak)``.
    """
    if a <= 0 or b <= 0:
        raise ValueError("lattice parameters must be positive")
    if a * b >= 1.0:
        raise InvalidLattice(f"ab = {a * b:g} is not below 1")
    psi = psi or gaussian_window()
    step = 2.0 * radius / n
    half = n // 2
    t = np.arange(-half, half + 1) * step
    _lattice_multiple(a, step, "a")
    sj = _lattice_multiple(1.0 / b, step, "1/b")
    reach = radius + psi.support.box(BOX_TOL)[1]
    ks = np.arange(-math.ceil(reach / a), math.ceil(reach / a) + 1)
    base = psi(t[None, :] - a * ks[:, None])
    J = int(2 * radius * b) + 1
    terms = []
    for j in range(-J, J + 1):
        if abs(j * sj) >= t.size:
            continue
        shifted = np.conj(psi(t[None, :] - j / b - a * ks[:, None]))
        G = (shifted * base).sum(axis=0) / b
        if np.abs(G).max() > 0:
            terms.append((j * sj, G))
    size = t.size

    def apply(v):
        v = np.asarray(v).ravel()
        out = np.zeros(size, dtype=complex)
        for s, G in terms:
            # out[i] += G[i] * v[i - s]
            if s >= 0:
                out[s:] += G[s:] * v[: size - s] if s else G * v
            else:
                out[: size + s] += G[: size + s] * v[-s:]
        return out

    op = LinearOperator((size, size), matvec=apply, dtype=complex)
    count = {"it": 0}

    def cb(_):
        count["it"] += 1

    rhs = psi(t)
    sol, info = cg(op, rhs, rtol=tol, atol=0.0, maxiter=max_iter, callback=cb)
    if info != 0:
        raise NotConverged(f"CG stopped after {count['it']} iterations (info={info})")
    gamma = SampledFunction(-half, step, sol, f"gaussian_dual({a:g},{b:g})")
    wr = wexler_raz_check(psi, gamma, a, b)
    return DualWindow(gamma, count["it"], wr)
