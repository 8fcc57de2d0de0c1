"""Weight functions, weight sequences and their condition checks.

A weight function is stored through its raw evaluator and normalized so that
it vanishes on [0, 1].  Young conjugates ``phi*`` of ``phi(x) = omega(e^x)``
are computed by a discrete Legendre transform with golden-section refinement.
Weight sequences are stored through ``log M_p`` and the canonical quotients
``mu_p = M_p / M_{p-1}``; the shifted quotients ``m_p = M_{p+1} / M_p``
are available as well.

All asymptotic conditions are decided on finite ranges and reported as
:class:`~ultragabor.verdict.ConditionVerdict` records carrying those ranges.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np
from scipy.special import gammaln

from .errors import BudgetExhausted, NotNormalized, PreconditionFailed, TabulationTooShort
from .numerics import classify_residual, golden_maximize, legendre_sup
from .verdict import ConditionVerdict, fails, holds, inconclusive

LADDER_MAX = 60
DEFAULT_PMAX = 500
CLOSED_FORM_INDEX_LIMIT = 2 ** 50
FLOAT_INDEX_LIMIT = 1e250


# ---------------------------------------------------------------------------
# weight functions
# ---------------------------------------------------------------------------


class WeightFunction:
    """Evaluator for a weight function ``omega`` on ``[0, inf)``.

    Parameters
    ----------
    raw:
        Vectorized callable ``t -> omega(t)``; only called with ``t > 1``
        when ``normalize`` is true.
    label:
        Human-readable name used in reports.
    normalize:
        Replace ``omega`` by ``max(omega(t) - omega(1), 0)`` for ``t > 1`` and
        by ``0`` on ``[0, 1]``.
    t_limit:
        Largest argument for which ``raw`` is trustworthy (tabulation or
        overflow limit).
    x_max:
        Right end of the default ``x``-grid used for Young conjugates.
    """

    def __init__(
        self,
        raw: Callable[[np.ndarray], np.ndarray],
        label: str,
        normalize: bool = True,
        t_limit: float = math.inf,
        x_max: float | None = None,
    ):
        self._raw = raw
        self.label = label
        self.normalize = normalize
        self.t_limit = float(t_limit)
        if x_max is None:
            x_max = min(60.0, 0.999 * math.log(self.t_limit)) if math.isfinite(self.t_limit) else 60.0
        self.x_max = float(x_max)
        self._shift = float(np.asarray(raw(np.array([1.0])))[0]) if normalize else 0.0
        self._conjugates: dict = {}

    def __repr__(self) -> str:
        return f"WeightFunction({self.label!r})"

    def __call__(self, t) -> np.ndarray:
        t = np.abs(np.asarray(t, dtype=float))
        if not self.normalize:
            return np.asarray(self._raw(t), dtype=float)
        out = np.zeros_like(t)
        big = t > 1.0
        if np.any(big):
            out[big] = np.maximum(np.asarray(self._raw(t[big]), dtype=float) - self._shift, 0.0)
        return out

    def phi(self, x) -> np.ndarray:
        """``phi(x) = omega(e^x)``."""
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return self(np.exp(x))

    @property
    def is_normalized(self) -> bool:
        """Whether the evaluated function vanishes on a sample of [0, 1]."""
        return bool(np.all(self(np.linspace(0.0, 1.0, 257)) == 0.0))

    def conjugate(self, x_max: float | None = None, n_grid: int = 4096) -> "YoungConjugate":
        key = (x_max, n_grid)
        if key not in self._conjugates:
            self._conjugates[key] = YoungConjugate(self, x_max=x_max, n_grid=n_grid)
        return self._conjugates[key]

    def default_t_grid(self, n: int = 4096, t_min: float = 1e-2, t_max: float = 1e6) -> np.ndarray:
        upper = min(t_max, 0.5 * self.t_limit) if math.isfinite(self.t_limit) else t_max
        return np.logspace(math.log10(t_min), math.log10(upper), n)


def power_weight(r: float = 1.0) -> WeightFunction:
    """``omega(t) = t^{1/r}`` (normalized to ``t^{1/r} - 1`` beyond 1)."""
    return WeightFunction(lambda t: np.power(t, 1.0 / r), f"t^(1/{r:g})")


def log_power_weight(k: float = 2.0) -> WeightFunction:
    """``omega(t) = (log t)^k`` for ``t >= 1``."""
    return WeightFunction(lambda t: np.power(np.log(np.maximum(t, 1.0)), k), f"log^{k:g}")


def log_weight() -> WeightFunction:
    return WeightFunction(lambda t: np.log(np.maximum(t, 1.0)), "log")


def exponential_weight() -> WeightFunction:
    return WeightFunction(np.exp, "exp", t_limit=700.0)


def sequence_weight(M: "WeightSequence") -> WeightFunction:
    """The associated function ``omega_M`` as a :class:`WeightFunction`."""
    return WeightFunction(
        lambda t: associated_function(M, t), f"omega[{M.label}]", t_limit=0.999 * M.t_limit
    )


class YoungConjugate:
    """``phi*(y) = sup_{x >= 0} (x y - phi(x))`` on a finite ``x``-grid."""

    def __init__(self, base: WeightFunction, x_max: float | None = None, n_grid: int = 4096):
        self.base = base
        self.x_max = float(base.x_max if x_max is None else x_max)
        self.grid = np.linspace(0.0, self.x_max, n_grid)
        self.phi_grid = base.phi(self.grid)
        if self.phi_grid[0] > 0.0:
            raise NotNormalized(f"phi(0) = {self.phi_grid[0]:g} > 0 for {base.label}")
        if not np.all(np.isfinite(self.phi_grid)):
            raise ValueError(f"phi is not finite on [0, {self.x_max:g}] for {base.label}")
        dx = self.grid[1] - self.grid[0]
        # slopes beyond this value push the maximizer past the grid end
        self.y_limit = float((self.phi_grid[-1] - self.phi_grid[-2]) / dx)

    def _evaluate(self, y):
        y = np.asarray(y, dtype=float)
        vals, where = legendre_sup(self.base.phi, y, self.grid, self.phi_grid)
        vals = np.where(y == 0.0, 0.0, np.maximum(vals, 0.0))
        return vals, where

    def __call__(self, y):
        vals = self._evaluate(y)[0]
        return float(np.ravel(vals)[0]) if np.ndim(y) == 0 else vals

    def maximizer(self, y):
        """Location of the supremum for each ``y``."""
        where = self._evaluate(y)[1]
        return float(np.ravel(where)[0]) if np.ndim(y) == 0 else where


def young_conjugate(omega: WeightFunction, y, x_max: float | None = None, n_grid: int = 4096):
    """Young conjugate of ``phi(x) = omega(e^x)`` evaluated at ``y``."""
    return omega.conjugate(x_max, n_grid)(y)


def biconjugate(omega: WeightFunction, x, y_max: float | None = None, n_grid: int = 4096):
    """``(phi*)*(x)`` computed by a second discrete Legendre transform.

    The ``y``-grid reaches a little beyond the slope of ``phi`` at the
    largest requested ``x`` so that every maximizer is interior.
    """
    conj = omega.conjugate()
    x = np.asarray(x, dtype=float)
    if y_max is None:
        xr = float(np.max(x))
        dx = 1e-3
        slope = float((omega.phi(np.array([xr + dx])) - omega.phi(np.array([xr])))[0] / dx)
        y_max = min(2.0 * slope + 1.0, 0.9 * conj.y_limit)
    ygrid = np.linspace(0.0, y_max, n_grid)
    vals, _ = legendre_sup(conj, x, ygrid, conj(ygrid))
    return vals


def check_weight_function(
    omega: WeightFunction, t_grid: np.ndarray | None = None
) -> tuple[ConditionVerdict, ConditionVerdict, ConditionVerdict]:
    """Check the growth conditions (alpha), (gamma), (delta) on a grid."""
    t = omega.default_t_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    search = {"t_min": float(t[0]), "t_max": float(t[-1]), "points": int(t.size)}
    return (
        _check_alpha(omega, t, search),
        _check_gamma(omega, t, search),
        _check_delta(omega, t, search),
    )


def _check_alpha(omega, t, search):
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = omega(2.0 * t) / (1.0 + omega(t))
    rng = dict(search, C_ladder=f"2^j, 0<=j<={LADDER_MAX}")
    bad = ~np.isfinite(ratio)
    if np.any(bad):
        i = int(np.argmax(bad))
        return fails("alpha", {"t": float(t[i]), "ratio": "inf"}, rng)
    n_tail = max(1, t.size // 4)
    head, tail = ratio[:-n_tail], ratio[-n_tail:]
    peak = float(ratio.max())
    if tail.max() > 1.05 * head.max() or peak > 2.0 ** LADDER_MAX:
        i = int(np.argmax(ratio))
        return fails("alpha", {"t": float(t[i]), "ratio": peak}, rng)
    C = 2.0 ** max(0, math.ceil(math.log2(max(peak, 1.0))))
    return holds("alpha", {"C": C}, rng)


def _check_gamma(omega, t, search):
    tt = t[t > math.e]
    w = omega(tt)
    rng = dict(search)
    positive = w > 0
    if not np.any(positive):
        return fails("gamma", {"t": float(tt[-1]), "omega": 0.0}, rng)
    tt, w = tt[positive], w[positive]
    q = np.log(tt) / w
    n = q.size
    start = n // 4
    # first index after which q never increases again
    inc = np.diff(q) > 1e-12 * np.abs(q[:-1])
    last_inc = int(np.nonzero(inc)[0][-1]) + 1 if np.any(inc) else 0
    t0 = max(start, last_inc)
    if t0 < 3 * n // 4 and q[-1] <= 0.5 * q[t0]:
        return holds("gamma", {"t0": float(tt[t0]), "ratio_at_t0": float(q[t0]), "ratio_at_end": float(q[-1])}, rng)
    if q[-1] >= 0.9 * q[start]:
        return fails("gamma", {"t": float(tt[-1]), "ratio": float(q[-1]), "ratio_earlier": float(q[start])}, rng)
    return inconclusive("gamma", rng, "log t / omega(t) decreases too slowly to certify")


def _check_delta(omega, t, search):
    x = np.linspace(0.0, math.log(t[-1]), 2049)
    p = omega.phi(x)
    second = p[2:] - 2.0 * p[1:-1] + p[:-2]
    scale = 1e-10 * (1.0 + np.abs(p[1:-1]))
    rng = dict(search, x_points=int(x.size))
    if np.all(second >= -scale):
        return holds("delta", {"min_second_difference": float(second.min())}, rng)
    i = int(np.argmin(second + scale))
    return fails("delta", {"x": float(x[i + 1]), "second_difference": float(second[i])}, rng)


def _lemma21_window(conj: YoungConjugate, scale: float, l: float, y_max: float) -> float:
    return min(y_max, 0.9 * conj.y_limit / scale - l)


def _lemma21_residual(conj, m, h, k, l, y):
    return conj(m * (y + l)) / m + k * y - conj(h * y) / h


def _lemma21_search(omega, candidates, h_of, m_of, k, l, y_max, n_y, label):
    conj = omega.conjugate()
    tried = []
    for cand in candidates:
        m, h = m_of(cand), h_of(cand)
        Y = _lemma21_window(conj, max(m, h), l, y_max)
        if Y < 4.0 * (1.0 + l):
            break
        y = np.linspace(0.0, Y, n_y)
        r = _lemma21_residual(conj, m, h, k, l, y)
        summary = classify_residual(r, tail_fraction=0.25)
        tried.append(cand)
        if not summary.bounded:
            continue
        i = summary.argmax
        lo = y[max(i - 1, 0)]
        hi = y[min(i + 1, n_y - 1)]
        _, refined = golden_maximize(
            lambda yy: _lemma21_residual(conj, m, h, k, l, yy), np.array([lo]), np.array([hi])
        )
        sup = max(float(r.max()), float(refined[0]), 0.0)
        C = math.exp(sup + 1e-9 * (1.0 + sup))
        return cand, C, Y
    raise BudgetExhausted(f"{label}: no rung of the ladder gave a bounded residual (tried {len(tried)})")


def lemma21_find_constants(
    omega: WeightFunction, h: float, k: float, l: float, y_max: float = 64.0, n_y: int = 2049
) -> tuple[float, float]:
    """Given ``h, k, l`` find ``m, C`` with
    ``(1/m) phi*(m(y+l)) + k y <= (1/h) phi*(h y) + log C`` on a ``y``-grid.

    ``m`` runs down the ladder ``h 2^{-j}``; the first rung whose residual
    peaks away from the window edge is accepted.
    """
    if k == 0 and l == 0:
        return float(h), 1.0
    m, C, _ = _lemma21_search(
        omega, [h * 2.0 ** -j for j in range(LADDER_MAX + 1)],
        h_of=lambda c: h, m_of=lambda c: c, k=k, l=l, y_max=y_max, n_y=n_y, label="lemma21",
    )
    return m, C


def lemma21_variant(
    omega: WeightFunction, m: float, k: float, l: float, y_max: float = 64.0, n_y: int = 2049
) -> tuple[float, float]:
    """Given ``m, k, l`` find ``h, C`` (``h`` climbs the ladder ``m 2^j``)."""
    if k == 0 and l == 0:
        return float(m), 1.0
    h, C, _ = _lemma21_search(
        omega, [m * 2.0 ** j for j in range(LADDER_MAX + 1)],
        h_of=lambda c: c, m_of=lambda c: m, k=k, l=l, y_max=y_max, n_y=n_y, label="lemma21_variant",
    )
    return h, C


def lemma21_residual_max(omega: WeightFunction, m, h, k, l, y) -> float:
    """Largest sampled value of the Lemma-2.1 residual (for re-verification)."""
    return float(np.max(_lemma21_residual(omega.conjugate(), m, h, k, l, np.asarray(y, float))))


# ---------------------------------------------------------------------------
# weight sequences
# ---------------------------------------------------------------------------


class WeightSequence:
    """A positive sequence ``M_p`` stored through ``log M_p``.

    Closed-form sequences supply ``log_term`` and ``log_quotient`` (the
    canonical ``log mu_p``); tabulated ones supply ``table`` with the
    logarithms of ``M_0, ..., M_P``.  ``p_max`` is the range used by the
    condition checkers.
    """

    def __init__(
        self,
        label: str,
        log_term: Callable[[np.ndarray], np.ndarray] | None = None,
        log_quotient: Callable[[np.ndarray], np.ndarray] | None = None,
        log_table: Iterable[float] | None = None,
        p_max: int = DEFAULT_PMAX,
        index_limit: int | None = None,
    ):
        self.label = label
        if log_table is not None:
            table = np.asarray(list(log_table), dtype=float)
            self._table = table
            self.index_limit = int(table.size - 1)
            self.p_max = int(min(p_max, self.index_limit))
            self._mu_table = np.diff(table)
        else:
            if log_term is None:
                raise ValueError("either log_term or log_table is required")
            self._table = None
            self._log_term = log_term
            self._log_quotient = log_quotient
            self.index_limit = float(FLOAT_INDEX_LIMIT if index_limit is None else index_limit)
            self.p_max = int(p_max)
        with np.errstate(over="ignore"):
            self.t_limit = float(np.exp(self.log_mu(np.array([self.index_limit]))[0]))

    def __repr__(self) -> str:
        return f"WeightSequence({self.label!r}, p_max={self.p_max})"

    @property
    def tabulated(self) -> bool:
        return self._table is not None

    def with_pmax(self, p_max: int) -> "WeightSequence":
        if self.tabulated:
            return WeightSequence(self.label, log_table=self._table, p_max=p_max)
        return WeightSequence(self.label, self._log_term, self._log_quotient, p_max=p_max,
                              index_limit=self.index_limit)

    def log_M(self, p) -> np.ndarray:
        p = np.asarray(p)
        if self.tabulated:
            if np.any(p > self.index_limit):
                raise TabulationTooShort(f"{self.label}: index beyond tabulation {self.index_limit}")
            return self._table[p.astype(int)]
        return np.asarray(self._log_term(p.astype(float)), dtype=float)

    def log_mu(self, p) -> np.ndarray:
        """Canonical ``log mu_p = log(M_p / M_{p-1})`` for ``p >= 1``."""
        p = np.asarray(p)
        if self.tabulated:
            if np.any(p > self.index_limit) or np.any(p < 1):
                raise TabulationTooShort(f"{self.label}: quotient index outside 1..{self.index_limit}")
            return self._mu_table[p.astype(int) - 1]
        if self._log_quotient is not None:
            return np.asarray(self._log_quotient(p.astype(float)), dtype=float)
        pf = p.astype(float)
        return np.asarray(self._log_term(pf) - self._log_term(pf - 1.0), dtype=float)

    def log_m(self, p) -> np.ndarray:
        """Paper-indexed ``log m_p = log(M_{p+1} / M_p)``."""
        return self.log_mu(np.asarray(p) + 1)

    def terms(self, P: int | None = None) -> np.ndarray:
        P = self.p_max if P is None else P
        return np.exp(self.log_M(np.arange(P + 1)))

    def check_invariants(self) -> dict:
        """Log-convexity and growth of ``M_p^{1/p}`` on the stored range."""
        p = np.arange(self.p_max + 1)
        lm = self.log_M(p)
        second = lm[2:] - 2.0 * lm[1:-1] + lm[:-2]
        log_convex = bool(np.all(second >= -1e-9 * (1.0 + np.abs(lm[1:-1]))))
        root = lm[1:] / p[1:]
        tail = root[root.size // 2:]
        growing = bool(np.all(np.diff(tail) > 0.0))
        return {"log_convex": log_convex, "root_growth": growing}


def gevrey(s: float, p_max: int = DEFAULT_PMAX) -> WeightSequence:
    """``M_p = p!^s``."""
    return WeightSequence(
        f"p!^{s:g}", lambda p: s * gammaln(p + 1.0), lambda p: s * np.log(p), p_max=p_max
    )


def _loglog_quotient(p):
    # log of log(p+e) - log of log(p-1+e), computed without cancellation
    a = np.log(p - 1.0 + math.e)
    return np.log1p(np.log1p(1.0 / (p - 1.0 + math.e)) / a)


def log_power(s: float = 1.0, p_max: int = DEFAULT_PMAX) -> WeightSequence:
    """``M_p = (log(p + e))^{s p}``."""

    def log_term(p):
        return s * p * np.log(np.log(p + math.e))

    def log_quotient(p):
        return s * (np.log(np.log(p - 1.0 + math.e)) + p * _loglog_quotient(p))

    return WeightSequence(f"log(p+e)^({s:g}p)", log_term, log_quotient, p_max=p_max)


def exp_square(p_max: int = DEFAULT_PMAX) -> WeightSequence:
    """``M_p = exp(p^2)``."""
    return WeightSequence("exp(p^2)", lambda p: p * p, lambda p: 2.0 * p - 1.0, p_max=p_max,
                          index_limit=200_000)


def constant_quotient(c: float, p_max: int = DEFAULT_PMAX) -> WeightSequence:
    """``M_p = c^p`` (every quotient equals ``c``); a degenerate test fixture."""
    lc = math.log(c)
    return WeightSequence(f"{c:g}^p", lambda p: p * lc, lambda p: np.full_like(p, lc), p_max=p_max)


def tabulated(values=None, log_values=None, label: str = "tabulated", p_max: int = DEFAULT_PMAX) -> WeightSequence:
    """Sequence given by explicit terms (or their logarithms) ``M_0 .. M_P``."""
    if (values is None) == (log_values is None):
        raise ValueError("give exactly one of values / log_values")
    logs = np.log(np.asarray(values, float)) if log_values is None else np.asarray(log_values, float)
    return WeightSequence(label, log_table=logs, p_max=p_max)


def _count_leq(M: WeightSequence, log_x: np.ndarray) -> np.ndarray:
    """Number of canonical quotients ``mu_p`` (p >= 1) with ``log mu_p <= log_x``.

    Closed-form sequences are searched exactly over integers up to
    ``2^50``; beyond that the index is located as a real number, which
    changes ``omega_M`` only at second order because the supremum is flat
    at its maximizer.
    """
    if M.tabulated:
        mus = M._mu_table
        return np.searchsorted(mus, log_x, side="right").astype(float)
    exact_top = min(M.index_limit, CLOSED_FORM_INDEX_LIMIT)
    lo = np.zeros(log_x.shape, dtype=np.int64)
    hi = np.full(log_x.shape, exact_top, dtype=np.int64)
    while True:
        active = lo < hi
        if not np.any(active):
            break
        mid = (lo + hi + 1) // 2
        ok = M.log_mu(np.where(active, mid, 1)) <= log_x
        lo = np.where(active & ok, mid, lo)
        hi = np.where(active & ~ok, mid - 1, hi)
    k = lo.astype(float)
    beyond = (lo == exact_top) & (M.index_limit > exact_top)
    if np.any(beyond):
        target = log_x[beyond]
        a = np.full(target.shape, math.log(exact_top))
        b = np.full(target.shape, math.log(M.index_limit))
        for _ in range(80):
            mid = 0.5 * (a + b)
            ok = M.log_mu(np.exp(mid)) <= target
            a = np.where(ok, mid, a)
            b = np.where(ok, b, mid)
        k[beyond] = np.exp(a)
    return k


def associated_function(M: WeightSequence, t) -> np.ndarray:
    """``omega_M(t) = sup_p log(t^p M_0 / M_p) = sum_{mu_p <= t} log(t / mu_p)``."""
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.zeros_like(t)
    pos = t > 0
    if np.any(pos):
        lt = np.log(t[pos])
        if np.any(t[pos] >= M.t_limit):
            raise TabulationTooShort(f"{M.label}: t exceeds the last quotient {M.t_limit:g}")
        k = _count_leq(M, lt)
        lm = M.log_M(k.astype(np.int64) if M.tabulated else k)
        val = k * lt - lm + M.log_M(np.zeros(1, dtype=np.int64))[0]
        out[pos] = np.where(k > 0, np.maximum(val, 0.0), 0.0)
    return out[0] if scalar else out


def counting_function(M: WeightSequence, x, indexing: str = "canonical"):
    """Count quotients ``<= x``; ``indexing`` is ``"canonical"`` (mu_p) or ``"shifted"`` (m_p)."""
    x = np.asarray(x, dtype=float)
    if np.any(x >= M.t_limit):
        raise TabulationTooShort(f"{M.label}: x exceeds the last quotient {M.t_limit:g}")
    with np.errstate(divide="ignore"):
        k = _count_leq(M, np.atleast_1d(np.log(x))).astype(np.int64)
    if indexing == "shifted":
        k = np.maximum(k - 1, 0)
    elif indexing != "canonical":
        raise ValueError("indexing must be 'canonical' or 'shifted'")
    return int(k[0]) if x.ndim == 0 else k


def _range(M: WeightSequence) -> dict:
    return {"sequence": M.label, "p_max": M.p_max}


def check_M2prime(M: WeightSequence) -> ConditionVerdict:
    """``M_{p+1} <= C H^{p+1} M_p`` with ``H`` on the ladder ``2^j``."""
    p = np.arange(M.p_max)
    step = M.log_M(p + 1) - M.log_M(p)
    rng = dict(_range(M), H_ladder=f"2^j, 0<=j<={LADDER_MAX}")
    for j in range(LADDER_MAX + 1):
        r = step - (p + 1) * j * math.log(2.0)
        s = classify_residual(r)
        if s.bounded:
            return holds("M.2'", {"H": 2.0 ** j, "C": math.exp(s.maximum)}, rng)
    i = int(np.argmax(r))
    return fails("M.2'", {"p": int(p[i]), "H": 2.0 ** LADDER_MAX, "log_excess": float(r[i])}, rng)


def check_M2(M: WeightSequence) -> ConditionVerdict:
    """``M_{p+q} <= C H^{p+q} M_p M_q`` on ``p + q <= p_max``."""
    P = M.p_max
    lm = M.log_M(np.arange(P + 1))
    p, q = np.meshgrid(np.arange(P + 1), np.arange(P + 1), indexing="ij")
    keep = (p + q <= P) & (p <= q)
    p, q = p[keep], q[keep]
    base = lm[p + q] - lm[p] - lm[q]
    tail = (p + q) >= 0.75 * P
    rng = dict(_range(M), H_ladder=f"2^j, 0<=j<={LADDER_MAX}")
    for j in range(LADDER_MAX + 1):
        r = base - (p + q) * j * math.log(2.0)
        s = classify_residual(r, tail_mask=tail)
        if s.bounded:
            return holds("M.2", {"H": 2.0 ** j, "C": math.exp(s.maximum)}, rng)
    i = int(np.argmax(r))
    return fails("M.2", {"p": int(p[i]), "q": int(q[i]), "H": 2.0 ** LADDER_MAX, "log_excess": float(r[i])}, rng)


def _eventual_start(ok: np.ndarray) -> int:
    """Smallest index from which ``ok`` is true to the end (len if never)."""
    bad = np.nonzero(~ok)[0]
    return int(bad[-1] + 1) if bad.size else 0


def check_M2star(M: WeightSequence, n_max: int = 16) -> ConditionVerdict:
    """``2 m_p <= m_{Np}`` for ``p >= p0`` (shifted indexing ``m_p = M_{p+1}/M_p``)."""
    rng = dict(_range(M), N_range=[2, n_max])
    worst = None
    for N in range(2, n_max + 1):
        p_end = (M.p_max - 1) // N
        if p_end < 8:
            return inconclusive("M.2*", rng, f"tabulation too short for N = {N}")
        p = np.arange(1, p_end + 1)
        ok = math.log(2.0) + M.log_m(p) <= M.log_m(N * p) + 1e-12
        start = _eventual_start(ok)
        if start <= p.size // 2:
            return holds("M.2*", {"N": N, "p0": int(p[start]) if start < p.size else None}, rng)
        worst = {"N": N, "p": int(p[start - 1])}
    return fails("M.2*", worst, rng)


def check_nonquasianalytic(M: WeightSequence) -> ConditionVerdict:
    """``sum_p 1/m_p < inf`` via a partial sum and a power-law tail certificate."""
    p = np.arange(1, M.p_max)
    a = np.exp(-M.log_m(p))
    partial = float(a.sum())
    window = slice(p.size // 2, None)
    pw, aw = p[window].astype(float), a[window]
    rng = dict(_range(M), beta_ladder="1 + 2^-j, 0<=j<=6")
    for j in range(7):
        beta = 1.0 + 2.0 ** -j
        g = pw ** beta * aw
        if np.all(np.diff(g) <= 1e-12 * g[:-1]):
            tail = float(g[-1] * pw[-1] ** (1.0 - beta) / (beta - 1.0))
            return holds("non-quasianalytic", {"partial_sum": partial, "tail_bound": tail, "beta": beta}, rng)
    g1 = pw * aw
    if np.all(np.diff(g1) >= -1e-12 * g1[:-1]):
        return fails(
            "non-quasianalytic",
            {"p_window": [int(pw[0]), int(pw[-1])], "min_p_over_m_p": float(g1.min()), "partial_sum": partial},
            rng,
        )
    return inconclusive("non-quasianalytic", rng, "tail neither power-law summable nor harmonic")


RELATION_T_CAP = 1e100


def _relation_residual(N: WeightSequence, M: WeightSequence, H: float, n: int = 2048,
                       t_cap: float = RELATION_T_CAP):
    # a bounded window cannot refute the inclusion: a large enough H hides any gap up to a fixed t
    T = min(t_cap, 0.99 * M.t_limit, 0.99 * N.t_limit / H)
    if T <= 1.0:
        return None, None
    t = np.logspace(-2, math.log10(T), n)
    return t, associated_function(M, t) - associated_function(N, H * t)


def relation_subset(N: WeightSequence, M: WeightSequence) -> ConditionVerdict:
    """``N ⊂ M``: ``omega_M(t) <= omega_N(H t) + log C`` for some ``C, H``."""
    rng = {"N": N.label, "M": M.label, "H_ladder": f"2^j, 0<=j<={LADDER_MAX}", "t_max": RELATION_T_CAP}
    last = None
    for j in range(LADDER_MAX + 1):
        H = 2.0 ** j
        t, r = _relation_residual(N, M, H)
        if t is None:
            break
        s = classify_residual(r)
        if s.bounded:
            return holds("subset", {"H": H, "log_C": max(s.maximum, 0.0)}, rng)
        last = {"H": H, "t": float(t[s.argmax]), "log_excess": s.maximum}
    if last is None:
        return inconclusive("subset", rng, "no usable t-window")
    return fails("subset", last, rng)


def relation_prec(N: WeightSequence, M: WeightSequence, depth: int = 10) -> ConditionVerdict:
    """``N ≺ M``: the subset inequality with every ``H`` in ``{1, 1/2, ..., 2^-depth}``."""
    rng = {"N": N.label, "M": M.label, "H_values": [2.0 ** -j for j in range(depth + 1)]}
    table = {}
    for j in range(depth + 1):
        H = 2.0 ** -j
        t, r = _relation_residual(N, M, H)
        if t is None:
            return inconclusive("prec", rng, "no usable t-window")
        s = classify_residual(r)
        if not s.bounded:
            return fails("prec", {"H": H, "t": float(t[s.argmax]), "log_excess": s.maximum}, rng)
        table[f"{H:g}"] = max(s.maximum, 0.0)
    return holds("prec", {"log_C_by_H": table}, rng)


def check_omega_seq(M: WeightSequence, n_max: int = 16) -> ConditionVerdict:
    """``exists C for all N exists p0: m_{Np} <= C m_p`` for ``p >= p0``.

    A finite range can never refute the existential ``C`` directly, so a
    doubling certificate ``2 m_p <= m_{Np}`` (condition (M.2)*) found on the
    range is used as the refutation: iterating it ``j`` times pushes the
    ratio ``m_{N^j p} / m_p`` past ``2^j``, beyond any candidate ``C``.
    """
    rng = dict(_range(M), N_range=[2, n_max], C_ladder=f"2^j, 0<=j<={LADDER_MAX}")
    star = check_M2star(M, n_max)
    if star.holds:
        N0 = star.witness["N"]
        return fails(
            "omega-seq",
            {"doubling_N": N0, "p0": star.witness["p0"],
             "refutes_C_with": f"N = {N0}^(j+1) for C = 2^j"},
            rng,
        )
    ratios = []
    for N in range(2, n_max + 1):
        p_end = (M.p_max - 1) // N
        if p_end < 8:
            return inconclusive("omega-seq", rng, f"tabulation too short for N = {N}")
        p = np.arange(1, p_end + 1)
        ratios.append((N, p, M.log_m(N * p) - M.log_m(p)))
    for j in range(LADDER_MAX + 1):
        logC = j * math.log(2.0)
        starts = {}
        for N, p, lr in ratios:
            start = _eventual_start(lr <= logC + 1e-12)
            if start > (3 * p.size) // 4:
                break
            starts[N] = int(p[start]) if start < p.size else None
        else:
            return holds("omega-seq", {"C": 2.0 ** j, "p0_by_N": starts}, rng)
    N, p, lr = ratios[-1]
    i = int(np.argmax(lr))
    return fails("omega-seq", {"N": N, "p": int(p[i]), "log_ratio": float(lr[i])}, rng)


def _phi_star_M(M: WeightSequence) -> YoungConjugate:
    return sequence_weight(M).conjugate()


def lemma22_bounds(M: WeightSequence, variant: str, value: float, p_max: int = 200) -> tuple[float, float]:
    """Paired constant and ``C`` for the four variants of the sequence lemma.

    ``variant`` ``"i"``/``"ii"`` take ``h`` and return ``(k, C)``;
    ``"iii"``/``"iv"`` take ``k`` and return ``(h, C)``.  Variants i and iii
    concern ``exp((1/k) phi*_M(kp)) <= C h^p M_p``; ii and iv concern
    ``k^p M_p <= C exp((1/h) phi*_M(hp))``.
    """
    for verdict in (check_M2(M), check_M2star(M)):
        if not verdict.holds:
            raise PreconditionFailed(f"{verdict.condition} not certified for {M.label}")
    conj = _phi_star_M(M)
    p = np.arange(p_max + 1, dtype=float)
    lm = M.log_M(p.astype(int))

    def res_22(k, h):
        return conj(k * p) / k - p * math.log(h) - lm

    def res_23(k, h):
        return p * math.log(k) + lm - conj(h * p) / h

    if variant in ("i", "ii"):
        h = float(value)
        ladder = [2.0 ** j for j in range(10, -31, -1)]
        res = (lambda c: res_22(c, h)) if variant == "i" else (lambda c: res_23(c, h))
    elif variant in ("iii", "iv"):
        k = float(value)
        ladder = [2.0 ** j for j in range(-30, 31)]
        res = (lambda c: res_22(k, c)) if variant == "iii" else (lambda c: res_23(k, c))
    else:
        raise ValueError("variant must be one of i, ii, iii, iv")
    for c in ladder:
        if c * p_max >= 0.9 * conj.y_limit:
            continue
        r = res(c)
        s = classify_residual(r)
        if s.bounded:
            return c, math.exp(s.maximum + 1e-9 * (1.0 + abs(s.maximum)))
    raise BudgetExhausted(f"lemma22 variant {variant}: ladder exhausted")


def lemma22_residual_max(M: WeightSequence, variant: str, value: float, paired: float, C: float,
                         p_max: int = 200) -> float:
    """Largest sampled value of ``log(lhs) - log(rhs)`` for a returned witness."""
    conj = _phi_star_M(M)
    p = np.arange(p_max + 1, dtype=float)
    lm = M.log_M(p.astype(int))
    if variant in ("i", "iii"):
        k, h = (paired, value) if variant == "i" else (value, paired)
        r = conj(k * p) / k - p * math.log(h) - lm
    else:
        k, h = (paired, value) if variant == "ii" else (value, paired)
        r = p * math.log(k) + lm - conj(h * p) / h
    return float(np.max(r - math.log(C)))
