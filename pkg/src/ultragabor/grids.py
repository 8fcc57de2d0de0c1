"""Weight grids ``a_{N,n}`` and the conditions (Q) and (wQ).

A grid here is always separable: ``a_{N,n}(t, x)`` is a power of
``exp(omega(t))`` times a rung of a weight system in ``x``, so

    -log a_{N,n}(t, x) = -rate(N, n) * omega(t) + log v_{lam(N, n)}(x).

Writing ``s = omega(t)``, every inequality of the form
``1/a_{M,m} <= eps/a_{N,n} + C/a_{K,k}`` becomes, for fixed ``x``, a
statement about the two-exponential function

    G(s) = exp(alpha + c1 s) - exp(beta + c2 s),  s >= 0,

whose supremum is available in closed form.  On a box domain ``s`` ranges
over all of ``[0, inf)``; on a lattice domain only over ``omega(j / a)``.
The remaining supremum over ``x`` is sampled and classified exactly as in
:mod:`ultragabor.systems`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numerics import classify_residual
from .systems import BEURLING, ROUMIEU, DEFAULT_RADIUS, WeightSystem, _Sampler, _usable, _constant, _noise
from .verdict import ConditionVerdict, fails, holds, inconclusive
from .weights import WeightFunction

I_MAX = 8
EPSILONS = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
EXIST_EPSILONS = (1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6)
K_DEPTH = 40


@dataclass(frozen=True)
class Domain:
    """Sampling domain for ``(t, x)``.

    ``kind = "box"`` lets ``t`` range over ``[0, inf)`` and samples ``|x|``
    on the weight-system grid; ``kind = "lattice"`` restricts to
    ``t in (1/a) Z`` and ``x in (1/b) Z``.
    """

    kind: str = "box"
    a: float = 1.0
    b: float = 1.0
    radius: float = DEFAULT_RADIUS

    def describe(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "radius": self.radius}
        return {"kind": "lattice", "t_step": 1.0 / self.a, "x_step": 1.0 / self.b, "radius": self.radius}


class WeightGrid:
    """``a_{N,n}(t, x) = exp(rate(N, n) omega(t)) / v_{lam(N, n)}(x)``.

    ``rate`` and ``lam`` are the two index maps; the builders below fix them
    so that ``a_{N,n+1} <= a_{N,n} <= a_{N+1,n}``.
    """

    def __init__(self, omega: WeightFunction | None, system: WeightSystem, kind: str, label: str,
                 domain: Domain | None = None):
        self.omega = omega
        self.system = system
        self.kind = kind
        self.label = label
        self.domain = domain or Domain()

    def rate(self, N: int, n: int) -> float:
        if self.omega is None:
            return 0.0
        return float(N) if self.kind == BEURLING else 1.0 / n

    def lam(self, N: int, n: int) -> float:
        return 1.0 / n if self.kind == BEURLING else float(N)

    def log_a(self, N: int, n: int, t, x) -> np.ndarray:
        """``log a_{N,n}(t, x)`` with broadcasting over ``t`` and ``x``."""
        t = np.asarray(t, dtype=float)
        s = self.omega(np.abs(t)) if self.omega is not None else np.zeros_like(t)
        return self.rate(N, n) * s - self.system.log_v(self.lam(N, n), np.asarray(x, dtype=float))

    def __call__(self, N: int, n: int, t, x) -> np.ndarray:
        return np.exp(self.log_a(N, n, t, x))

    def restrict(self, a: float, b: float, radius: float | None = None) -> "WeightGrid":
        """The same grid sampled on ``(1/a) Z x (1/b) Z``."""
        return WeightGrid(self.omega, self.system, self.kind, f"{self.label}|lattice(1/{a:g},1/{b:g})",
                          Domain("lattice", a, b, radius or self.domain.radius))


def build_beurling_grid(omega: WeightFunction, V: WeightSystem) -> WeightGrid:
    """``a_{N,n}(t, x) = exp(N omega(t)) / v_{1/n}(x)``: the quotient of the ``V_omega`` rung ``1/N`` by the ``V`` rung ``1/n``."""
    return WeightGrid(omega, V, BEURLING, f"A(V[{omega.label}],{V.label})")


def build_roumieu_grid(V: WeightSystem, omega: WeightFunction) -> WeightGrid:
    """``a_{N,n}(t, x) = exp(omega(t) / n) / v_N(x)``: the ``V_omega`` rung ``n`` over the ``V`` rung ``N``."""
    return WeightGrid(omega, V, ROUMIEU, f"A{{{V.label},V[{omega.label}]}}")


def constant_grid() -> WeightGrid:
    """``a_{N,n} = 1``."""
    from .systems import constant_system
    return WeightGrid(None, constant_system(), BEURLING, "constant-grid")


# ---------------------------------------------------------------------------
# closed-form supremum over s
# ---------------------------------------------------------------------------


def _log_diff(base: np.ndarray, d: np.ndarray) -> np.ndarray:
    """``log(exp(base) - exp(base + d))``, ``-inf`` where ``d >= 0``."""
    base, d = np.broadcast_arrays(base, d)
    out = np.full(base.shape, -np.inf)
    ok = d < 0
    # -expm1 keeps full relative accuracy when d is close to zero
    out[ok] = base[ok] + np.log(-np.expm1(d[ok]))
    return out


def sup_two_exponentials(alpha, gap, c1: float, c2: float, s_values: np.ndarray | None = None) -> np.ndarray:
    """``sup_{s >= 0} log(exp(alpha + c1 s) - exp(alpha + gap + c2 s))`` (``-inf`` if never positive).

    The second exponent is passed as the offset ``gap`` from the first so
    that nothing cancels when both are huge.  With ``s_values`` (sorted,
    starting at 0) the supremum is taken over that discrete set instead; the
    function of ``s`` is unimodal, so only the points bracketing the
    continuous maximiser matter.
    """
    alpha, gap = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(gap, dtype=float))

    def at(s):
        return _log_diff(alpha + c1 * s, gap + (c2 - c1) * s)

    limit = np.full(alpha.shape, -np.inf)
    if c1 > c2:
        if c1 > 0:
            limit[:] = np.inf
        elif c1 == 0:
            limit = alpha.copy()
    elif c1 == c2:
        if c1 > 0:
            limit = np.where(gap < 0, np.inf, -np.inf)
    vals = [at(0.0), limit]
    if c1 * c2 > 0 and c2 / c1 > 1.0:
        # a stationary point is a maximum only when c2 / c1 > 1; otherwise it is a minimum
        L = math.log(c2 / c1)
        star = (gap + L) / (c1 - c2)
        interior = np.isfinite(star) & (star > 0)
        # at the maximiser the second exponent sits exactly L below the first
        peak = np.where(interior, alpha + c1 * np.where(interior, star, 0.0) + math.log1p(-math.exp(-L)), -np.inf)
        if s_values is None:
            vals.append(peak)
        else:
            s_values = np.asarray(s_values, dtype=float)
            inside = interior & (star <= s_values[-1])
            # beyond the tabulated range the lattice is dense on the scale of s*
            vals.append(np.where(interior & ~inside, peak, -np.inf))
            j = np.clip(np.searchsorted(s_values, np.where(inside, star, 0.0)), 1, len(s_values) - 1)
            for jj in (j - 1, j):
                vals.append(np.where(inside, at(s_values[jj]), -np.inf))
    if s_values is not None:
        vals.append(at(np.asarray(s_values, dtype=float)[-1]))
    return np.maximum.reduce(vals)


def _lattice_s_values(omega: WeightFunction, a: float, s_max: float, cap: int = 400000) -> np.ndarray:
    """``omega(j / a)`` for ``j >= 0`` until ``omega`` exceeds ``s_max`` (sorted)."""
    hi = 1.0
    while omega(hi) < s_max and hi < min(omega.t_limit, 1e12):
        hi *= 2.0
    J = min(int(math.ceil(hi * a)) + 1, cap)
    vals = omega(np.arange(J + 1) / a)
    return np.maximum.accumulate(vals)


class _Evaluator:
    """Residuals ``sup_s log((1/a_{M,m} - eps/a_{N,n}) a_{K,k})`` as functions of ``|x|``."""

    def __init__(self, A: WeightGrid, s_cap: float = 400.0):
        self.A = A
        dom = A.domain
        if dom.kind == "box":
            self.S = _Sampler(A.system, dom.radius)
            self.s_values = None
        else:
            base = _Sampler(A.system, dom.radius).grid
            pts = np.unique(np.round(base * dom.b) / dom.b)
            self.S = _Sampler(A.system, dom.radius, points=pts)
            self.s_values = (_lattice_s_values(A.omega, dom.a, s_cap) if A.omega is not None else np.zeros(1))

    def residual(self, NMK: tuple[int, int, int], nmk: tuple[int, int, int], eps: float):
        (N, M, K), (n, m, k) = NMK, nmk
        A = self.A
        lams = [A.lam(M, m), A.lam(N, n), A.lam(K, k)]
        W = self.S.window(*lams)
        keep = self.S.grid <= W
        r = self.S.grid[keep]
        lv = [self.S.log_v(l)[keep] for l in lams]
        alpha = lv[0] - lv[2]
        gap = math.log(eps) + (lv[1] - lv[0])
        c1 = A.rate(K, k) - A.rate(M, m)
        c2 = A.rate(K, k) - A.rate(N, n)
        res = sup_two_exponentials(alpha, gap, c1, c2, self.s_values)
        # the maximiser divides by c2 - c1, which amplifies rounding in alpha - beta
        amp = 1.0 + (abs(c1) + abs(c2)) / abs(c1 - c2) if c1 != c2 else 1.0
        noise = amp * _noise(np.abs(lv[0]) + np.abs(lv[1]) + 2.0 * np.abs(lv[2]))
        return r, res, W, lams, noise


def _classify(r, res, W, noise=None):
    if np.any(np.isposinf(res)):
        i = int(np.argmax(np.isposinf(res)))
        return False, math.inf, i
    tail = r >= min(0.75 * W, W ** 0.75 if W > 1.0 else W)
    finite = np.where(np.isfinite(res), res, -1e300)
    s = classify_residual(finite, tail_mask=tail, noise=noise)
    return s.bounded, max(s.maximum, -1e300), s.argmax


def _ladder(base: int, steps: Sequence[int], mult: bool) -> list[int]:
    out = []
    for j in steps:
        v = base * 2 ** j if mult else base + j
        if v not in out:
            out.append(v)
    return out


def _universal(base: int) -> list[int]:
    # base, base+1, base+2 and geometric rungs up to base * 2^6
    return sorted(set([base, base + 1, base + 2] + [base * 2 ** j for j in (1, 3, 6)]))


def check_Q(
    A: WeightGrid,
    existential_eps: bool = False,
    n_universal: int = 4,
    i_max: int = I_MAX,
    epsilons: Sequence[float] | None = None,
    k_depth: int = K_DEPTH,
) -> ConditionVerdict:
    """``forall N exists M >= N exists n forall K >= M forall m >= n forall eps
    exists k >= m exists C: 1/a_{M,m} <= eps/a_{N,n} + C/a_{K,k}``.

    With ``existential_eps`` the ``eps`` quantifier is existential, giving
    (wQ).  ``N`` runs over ``1..n_universal``, the existential ``M, n`` over
    ``<= i_max``, the universal ``K, m`` over ``base, base+1, base+2,
    2 base, 8 base, 64 base`` and ``k`` over ``m 2^j, j <= k_depth``.
    """
    name = "wQ" if existential_eps else "Q"
    eps_list = tuple(epsilons or (EXIST_EPSILONS if existential_eps else EPSILONS))
    ev = _Evaluator(A)
    rng = {"grid": A.label, "domain": A.domain.describe(), "N": f"1..{n_universal}",
           "M,n": f"<= {i_max}", "K,m": "base+{0,1,2}, base*2^{1,3,6}", "k": f"m*2^j, j<={k_depth}",
           "eps": list(eps_list)}
    witness = {}
    counter = None
    cut_any = False
    for N in range(1, n_universal + 1):
        chosen = None
        pairs = sorted(((M, n) for M in range(N, i_max + 1) for n in range(1, i_max + 1)),
                       key=lambda p: (p[0] + p[1], p[0] == N, p))
        for M, n in pairs:
            table = {}
            failed = None
            cut = False
            for K in _universal(M):
                for m in _universal(n):
                    row = _search_k(ev, (N, M, K), (n, m), eps_list, existential_eps, k_depth)
                    if row["status"] != "ok":
                        failed = row
                        cut = row["status"] == "cut"
                        break
                    table[f"K={K},m={m}"] = row["entries"]
                if failed:
                    break
            if failed is None:
                chosen = {"M": M, "n": n, "table": table}
                break
            cut_any = cut_any or cut
            if not cut:
                counter = failed["counterexample"]
        if chosen is None:
            if cut_any or counter is None:
                return inconclusive(name, rng, "search windows too short")
            return fails(name, dict(counter, N=N), rng)
        witness[f"N={N}"] = chosen
    return holds(name, witness, rng)


def check_wQ(A: WeightGrid, **kwargs) -> ConditionVerdict:
    """(Q) with ``exists eps > 0`` in place of ``forall eps > 0``."""
    return check_Q(A, existential_eps=True, **kwargs)


def _search_k(ev: _Evaluator, NMK, nm, eps_list, existential, k_depth) -> dict:
    """For fixed ``(N, M, K, n, m)`` find ``k`` (and ``C``) per ``eps``."""
    n, m = nm
    entries = {}
    last = None
    any_cut = False
    k_floor = m
    for eps in eps_list:
        got = None
        cut = False
        j = 0
        while j <= k_depth:
            k = k_floor * 2 ** j
            r, res, W, lams, err = ev.residual(NMK, (n, m, k), eps)
            if len(r) < 8 or not _usable(W, lams, ev.A.domain.radius):
                cut = True
                break
            ok, mx, i = _classify(r, res, W, err)
            if ok:
                got = dict(eps=eps, k=k, **_constant(mx))
                break
            last = {"M": NMK[1], "K": NMK[2], "n": n, "m": m, "eps": eps, "k": k, "x": float(r[i])}
            j += 1
        if got is None:
            if existential:
                any_cut = any_cut or cut
                continue
            return {"status": "cut"} if cut else {"status": "fail", "counterexample": last}
        if existential:
            return {"status": "ok", "entries": got}
        entries[f"{eps:g}"] = got
        k_floor = got["k"]  # smaller eps never needs a smaller k
    if existential:
        return {"status": "cut"} if any_cut else {"status": "fail", "counterexample": last}
    return {"status": "ok", "entries": entries}


def c_eps_profile(A: WeightGrid, N: int, M: int, n: int, K: int, m: int,
                  epsilons: Sequence[float] = EPSILONS[1:], k_depth: int = K_DEPTH) -> dict:
    """``C(eps)`` for a fixed index tuple and its fitted power law.

    ``k`` is fixed at the value needed for the smallest ``eps`` so that only
    ``eps`` varies.  For the two-exponential structure the supremum scales
    like ``eps^(-c1 / (c2 - c1))``; in the Beurling case this exponent is
    ``theta / (1 - theta)`` with ``theta = (K - M) / (K - N)``.
    """
    ev = _Evaluator(A)
    eps_sorted = sorted(epsilons)
    k = None
    for j in range(k_depth + 1):
        kk = m * 2 ** j
        r, res, W, _, err = ev.residual((N, M, K), (n, m, kk), eps_sorted[0])
        ok, _, _ = _classify(r, res, W, err)
        if ok:
            k = kk
            break
    if k is None:
        raise ValueError("no k certifies the smallest eps")
    logC = []
    for eps in epsilons:
        r, res, W, _, err = ev.residual((N, M, K), (n, m, k), eps)
        logC.append(float(np.max(res - err)))
    c1 = A.rate(K, k) - A.rate(M, m)
    c2 = A.rate(K, k) - A.rate(N, n)
    predicted = c1 / (c2 - c1) if c2 != c1 else math.nan
    slope = float(np.polyfit(-np.log(np.asarray(epsilons)), np.asarray(logC), 1)[0])
    return {"N": N, "M": M, "n": n, "K": K, "m": m, "k": k, "epsilons": list(epsilons),
            "log_C": logC, "fitted_exponent": slope, "predicted_exponent": predicted}
