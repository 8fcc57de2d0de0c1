"""Weight systems on R^d and the checkers for their structural conditions.

Every system is handled through ``log v_lambda`` so that weights growing
like ``e^{e^x}`` stay representable.  Conditions quantify over parameters
``lambda``; here those quantifiers run over finite ladders of powers of two,
and every verdict records the ladders, windows and witnesses it used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from .numerics import classify_residual
from .verdict import ConditionVerdict, fails, holds, inconclusive
from .weights import WeightFunction, WeightSequence, associated_function

BEURLING = "beurling"
ROUMIEU = "roumieu"
DEFAULT_LADDER = tuple(2.0 ** j for j in range(-3, 4))
DEFAULT_RADIUS = 40.0
EXTENDED_RADIUS = 1e100
DN_THETAS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
OMEGA_THETAS = (2.0 ** -10, 2.0 ** -6, 0.1, 0.3, 0.5, 0.7, 0.9)
SEARCH_DEPTH = 40
DEEP_RUNGS = (48, 64, 96, 128, 192, 256)


class WeightSystem:
    """A parametric family ``lambda -> v_lambda`` of weights ``>= 1``.

    Parameters
    ----------
    log_weight:
        ``(lam, x) -> log v_lam(x)`` where ``x`` has shape ``(..., d)`` for
        ``d > 1`` and ``(...)`` for ``d = 1``.
    label:
        Name for reports.
    dim:
        Dimension ``d`` of the underlying space.
    radial:
        Whether ``v_lam`` depends on ``|x|`` only.
    max_radius:
        ``lam -> R`` such that ``v_lam`` is trustworthy for ``|x| < R``.
    ladder:
        Default parameter ladder used by the checkers.
    """

    def __init__(
        self,
        log_weight: Callable[[float, np.ndarray], np.ndarray],
        label: str,
        dim: int = 1,
        radial: bool = True,
        max_radius: Callable[[float], float] | None = None,
        ladder: Sequence[float] = DEFAULT_LADDER,
    ):
        self._log_weight = log_weight
        self.label = label
        self.dim = int(dim)
        self.radial = radial
        self._max_radius = max_radius or (lambda lam: math.inf)
        self.ladder = tuple(float(v) for v in ladder)

    def __repr__(self) -> str:
        return f"WeightSystem({self.label!r}, d={self.dim})"

    def log_v(self, lam: float, x) -> np.ndarray:
        if math.isinf(lam):
            return np.zeros(np.shape(x) if self.dim == 1 else np.shape(x)[:-1])
        return np.asarray(self._log_weight(float(lam), np.asarray(x, dtype=float)), dtype=float)

    def __call__(self, lam: float, x) -> np.ndarray:
        return np.exp(self.log_v(lam, x))

    def max_radius(self, lam: float) -> float:
        return math.inf if math.isinf(lam) else float(self._max_radius(float(lam)))

    def reflect(self) -> "WeightSystem":
        """The reflected system ``v_lam(-x)``."""
        if self.radial:
            return WeightSystem(self._log_weight, self.label + " (reflected)", self.dim, True,
                                self._max_radius, self.ladder)
        return WeightSystem(lambda lam, x: self._log_weight(lam, -x), self.label + " (reflected)",
                            self.dim, False, self._max_radius, self.ladder)


def _radial(x: np.ndarray, dim: int) -> np.ndarray:
    return np.abs(x) if dim == 1 else np.linalg.norm(x, axis=-1)


def build_from_weight_function(omega: WeightFunction, dim: int = 1) -> WeightSystem:
    """``v_lam(x) = exp(omega(|x|) / lam)``."""
    return WeightSystem(
        lambda lam, x: omega(_radial(x, dim)) / lam,
        f"V[{omega.label}]",
        dim=dim,
        max_radius=lambda lam: omega.t_limit,
    )


def build_from_weight_sequence(M: WeightSequence, dim: int = 1) -> WeightSystem:
    """``v_lam(x) = exp(omega_M(|x| / lam))``."""
    return WeightSystem(
        lambda lam, x: associated_function(M, _radial(x, dim) / lam),
        f"V[{M.label}]",
        dim=dim,
        max_radius=lambda lam: 0.99 * lam * M.t_limit,
    )


def constant_system(dim: int = 1) -> WeightSystem:
    """``v_lam = 1`` for every ``lam``."""
    return WeightSystem(lambda lam, x: np.zeros(np.shape(x) if dim == 1 else np.shape(x)[:-1]),
                        "constant", dim=dim)


def scaled_system(omega: WeightFunction, coefficient: Callable[[float], float], label: str,
                  dim: int = 1) -> WeightSystem:
    """``v_lam(x) = exp(c(lam) omega(|x|))`` for a non-increasing ``c``."""
    return WeightSystem(lambda lam, x: coefficient(lam) * omega(_radial(x, dim)), label, dim=dim,
                        max_radius=lambda lam: omega.t_limit)


def saturating_system(omega: WeightFunction, dim: int = 1) -> WeightSystem:
    """``v_lam = exp((2 - lam/(1+lam)) omega)``: exponents saturate as ``lam -> 0``.

    Shrinking ``lam`` never more than doubles the growth, which is exactly
    what the interpolation condition (DN) cannot tolerate.
    """
    return scaled_system(omega, lambda lam: 2.0 - lam / (1.0 + lam), f"saturating[{omega.label}]", dim)


def table_system(omega: WeightFunction, lams: Sequence[float], coefficients: Sequence[float],
                 label: str = "custom-table", dim: int = 1) -> WeightSystem:
    """``v_lam = exp(c(lam) omega)`` with ``c`` interpolated in ``log lam`` from a table."""
    order = np.argsort(lams)
    ll = np.log(np.asarray(lams, float)[order])
    cc = np.asarray(coefficients, float)[order]
    if np.any(np.diff(cc) > 0):
        raise ValueError("table coefficients must not increase with lambda")
    return scaled_system(omega, lambda lam: float(np.interp(math.log(lam), ll, cc)), label, dim)


def tensor_power(V: WeightSystem, dim: int) -> WeightSystem:
    """``v_lam(x_1, ..., x_d) = prod_i v_lam(x_i)`` for a one-dimensional ``V``."""
    if V.dim != 1:
        raise ValueError("tensor_power expects a one-dimensional system")
    return WeightSystem(
        lambda lam, x: np.sum(V.log_v(lam, x), axis=-1),
        f"{V.label}^(x{dim})",
        dim=dim,
        radial=False,
        max_radius=V._max_radius,
        ladder=V.ladder,
    )


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------


@dataclass
class _Sampler:
    """Caches ``log v_lam`` on a fixed radial grid ``r >= 0``.

    The grid is uniform on ``[0, radius]`` and geometric out to ``extended``;
    each residual is restricted to the radii where all its rungs are tabulated.
    """

    V: WeightSystem
    radius: float
    n: int = 4096
    extended: float = EXTENDED_RADIUS
    points: np.ndarray | None = None
    grid: np.ndarray = field(init=False)
    _cache: dict = field(default_factory=dict, init=False)

    def __post_init__(self):
        if self.points is not None:
            # explicit sample set (e.g. lattice points); no extension beyond it
            self.grid = np.unique(np.abs(np.asarray(self.points, dtype=float)))
            self.extended = float(self.grid[-1])
            return
        self.extended = max(self.extended, self.radius)
        lin = np.linspace(0.0, self.radius, self.n)
        geo = np.geomspace(1e-3, self.radius, self.n)
        far = np.geomspace(self.radius, self.extended, self.n)
        self.grid = np.unique(np.concatenate([lin, geo, far]))

    def _points(self, r):
        if self.V.dim == 1:
            return r
        pts = np.zeros(r.shape + (self.V.dim,))
        pts[..., 0] = r
        return pts

    def log_v(self, lam: float) -> np.ndarray:
        if lam not in self._cache:
            R = self.V.max_radius(lam)
            vals = np.full(self.grid.shape, np.nan)
            ok = self.grid < R
            vals[ok] = self.V.log_v(lam, self._points(self.grid[ok]))
            self._cache[lam] = vals
        return self._cache[lam]

    def window(self, *lams: float) -> float:
        return min([self.extended] + [self.V.max_radius(l) for l in lams])

    def residual(self, terms: Sequence[tuple[float, float]], *, shift: float = 0.0):
        """Residual ``sum c * log v_lam`` restricted to the common window.

        ``terms`` is a list of ``(coefficient, lam)``; a ``shift`` evaluates
        the first term at ``r + shift`` (used for the local-sup condition).
        Returns ``(r, residual, window, noise)`` where ``noise`` bounds the
        rounding error of the sum.
        """
        lams = [lam for _, lam in terms]
        W = self.window(*lams) - shift
        keep = self.grid <= W
        r = self.grid[keep]
        total = np.zeros(r.shape)
        scale = np.zeros(r.shape)
        for i, (c, lam) in enumerate(terms):
            if i == 0 and shift:
                vals = self.V.log_v(lam, self._points(r + shift)) if not math.isinf(lam) else 0.0
            else:
                vals = self.log_v(lam)[keep] if not math.isinf(lam) else 0.0
            total = total + c * vals
            scale = scale + np.abs(c * vals)
        return r, total, W, _noise(scale)


def _usable(W: float, lams: Sequence[float], radius: float, min_span: float = 2.0) -> bool:
    """A window is informative when it is the full radius or the slowest
    finite rung still sees ``|x| / lam >= min_span`` inside it."""
    if W >= radius:
        return True
    finite = [l for l in lams if not math.isinf(l)]
    return W >= min_span * max(finite) if finite else True


def _constant(log_c: float) -> dict:
    """Witness constant ``C = exp(log_c)`` (with ``log_c`` kept when huge)."""
    log_c = max(float(log_c), 0.0)
    return {"C": math.exp(log_c) if log_c < 700.0 else math.inf, "log_C": log_c}


def _noise(scale: np.ndarray) -> np.ndarray:
    """Rounding bound for a residual assembled from terms of total size ``scale``."""
    return 8.0 * np.finfo(float).eps * scale


def _bounded(r, res, W, noise=None):
    # outer quarter in linear scale for short windows, in log scale for long ones
    return classify_residual(res, tail_mask=r >= min(0.75 * W, W ** 0.75 if W > 1.0 else W), noise=noise)


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return "inf" if math.isinf(v) else f"{v:g}"


# ---------------------------------------------------------------------------
# (DN) and the double-bar Omega condition
# ---------------------------------------------------------------------------


def _non_radial_guard(V: WeightSystem):
    if not V.radial:
        raise NotImplementedError("condition checks sample radial systems; use the one-dimensional factor")


def check_DN(
    V: WeightSystem,
    radius: float = DEFAULT_RADIUS,
    ladder: Sequence[float] | None = None,
    thetas: Sequence[float] = DN_THETAS,
    mu_rungs: int = 6,
    depth: int = SEARCH_DEPTH,
) -> ConditionVerdict:
    """``exists lam forall mu <= lam forall theta exists nu <= mu:
    v_mu <= C v_lam^theta v_nu^(1-theta)``."""
    _non_radial_guard(V)
    lams = tuple(ladder or V.ladder)
    S = _Sampler(V, radius)
    rng = {"system": V.label, "lambda_ladder": list(lams), "mu": f"lambda*2^-i, 0<=i<={mu_rungs}",
           "theta": list(thetas), "nu": f"mu*2^-i, 0<=i<={depth} and i in {DEEP_RUNGS}", "radius": radius}
    counter = None
    cut_any = False
    for lam in sorted(lams, reverse=True):
        table = {}
        ok_lam = True
        for i in range(mu_rungs + 1):
            mu = lam * 2.0 ** -i
            for theta in thetas:
                found = None
                last = None
                cut = False
                # theta near 1 needs nu exponentially small in 1/(1-theta)
                for jn in list(range(depth + 1)) + [j for j in DEEP_RUNGS if j > depth]:
                    nu = mu * 2.0 ** -jn
                    r, res, W, err = S.residual([(1.0, mu), (-theta, lam), (-(1.0 - theta), nu)])
                    if not _usable(W, [lam, mu, nu], radius):
                        cut = True
                        break
                    s = _bounded(r, res, W, err)
                    if s.bounded:
                        found = dict(nu=nu, **_constant(s.maximum))
                        break
                    last = {"lambda": lam, "mu": mu, "theta": theta, "nu": nu, "x": float(r[s.argmax])}
                if found is None:
                    ok_lam = False
                    # a counterexample needs the whole nu ladder to be evaluated
                    if cut:
                        cut_any = True
                    else:
                        counter = last
                    break
                table[f"mu={_fmt(mu)},theta={theta:g}"] = found
            if not ok_lam:
                break
        if ok_lam:
            return holds("DN", {"lambda": lam, "table": table}, rng)
    if counter is None or cut_any:
        return inconclusive("DN", rng, "search windows too short")
    return fails("DN", counter, rng)


def check_ooOmega(
    V: WeightSystem,
    radius: float = DEFAULT_RADIUS,
    ladder: Sequence[float] | None = None,
    thetas: Sequence[float] = OMEGA_THETAS,
    mu_ratio_exp: int = 4,
    nu_rungs: int = 10,
) -> ConditionVerdict:
    """``forall lam exists mu >= lam forall nu >= mu forall theta:
    v_mu <= C v_lam^theta v_nu^(1-theta)``.

    ``mu`` is searched on ``lam 2^i`` with ``i <= mu_ratio_exp``; ``nu``
    ranges over ``mu 2^i`` (``i <= nu_rungs``) and the limit ``nu = inf``
    where ``v_nu = 1``.
    """
    _non_radial_guard(V)
    lams = tuple(ladder or V.ladder)
    S = _Sampler(V, radius)
    rng = {"system": V.label, "lambda_ladder": list(lams), "mu": f"lambda*2^i, 0<=i<={mu_ratio_exp}",
           "nu": f"mu*2^i, 0<=i<={nu_rungs}, and inf", "theta": list(thetas), "radius": radius}
    witness = {}
    for lam in sorted(lams):
        chosen = None
        last = None
        for i in range(mu_ratio_exp + 1):
            mu = lam * 2.0 ** i
            logC_max = 0.0
            failed = None
            for nu in [mu * 2.0 ** j for j in range(nu_rungs + 1)] + [math.inf]:
                for theta in thetas:
                    r, res, W, err = S.residual([(1.0, mu), (-theta, lam), (-(1.0 - theta), nu)])
                    s = _bounded(r, res, W, err)
                    if not s.bounded:
                        failed = {"lambda": lam, "mu": mu, "nu": nu, "theta": theta, "x": float(r[s.argmax])}
                        break
                    logC_max = max(logC_max, s.maximum)
                if failed:
                    break
            if failed is None:
                chosen = dict(mu=mu, **_constant(logC_max))
                break
            last = failed
        if chosen is None:
            return fails("ooOmega", last, rng)
        witness[f"lambda={lam:g}"] = chosen
    return holds("ooOmega", {"table": witness}, rng)


# ---------------------------------------------------------------------------
# [wM], [M], [N], [square]
# ---------------------------------------------------------------------------


def _direction(direction: str) -> str:
    d = direction.lower()
    if d not in (BEURLING, ROUMIEU):
        raise ValueError("direction must be 'beurling' or 'roumieu'")
    return d


def _search_pair(S, lams, make_terms, candidates, name, rng, shift=0.0):
    """Generic ``forall given exists candidate`` search on bounded residuals."""
    witness = {}
    for given in lams:
        got = None
        last = None
        cut = False
        for cand in candidates(given):
            terms = make_terms(given, cand)
            r, res, W, err = S.residual(terms, shift=shift)
            if W <= shift or not _usable(W + shift, [l for _, l in terms], S.radius):
                cut = True
                continue
            s = _bounded(r, res, W, err)
            if s.bounded:
                got = dict(paired=cand, **_constant(s.maximum))
                break
            last = {"given": given, "candidate": cand, "x": float(r[s.argmax])}
        if got is None:
            if last is None or cut:
                return inconclusive(name, rng, "search windows too short")
            return fails(name, last, rng)
        witness[_fmt(given)] = got
    return holds(name, {"table": witness}, rng)


def check_wM(V: WeightSystem, direction: str = BEURLING, radius: float = DEFAULT_RADIUS,
             ladder: Sequence[float] | None = None, depth: int = SEARCH_DEPTH) -> ConditionVerdict:
    """``sup_{|y|<=1} v_lam(x+y) <= C v_mu(x)`` (Beurling: ``mu <= lam``; Roumieu: ``lam >= mu``)."""
    _non_radial_guard(V)
    d = _direction(direction)
    lams = tuple(ladder or V.ladder)
    S = _Sampler(V, radius)
    name = f"wM[{d}]"
    rng = {"system": V.label, "ladder": list(lams), "search": f"2^(+-i), i<={depth}", "radius": radius}
    if d == BEURLING:
        # given lam, search mu = lam 2^-i; first term evaluated at |x| + 1
        return _search_pair(S, lams, lambda lam, mu: [(1.0, lam), (-1.0, mu)],
                            lambda lam: [lam * 2.0 ** -i for i in range(depth + 1)], name, rng, shift=1.0)
    return _search_pair(S, lams, lambda mu, lam: [(1.0, lam), (-1.0, mu)],
                        lambda mu: [mu * 2.0 ** i for i in range(depth + 1)], name, rng, shift=1.0)


def check_M(V: WeightSystem, direction: str = BEURLING, radius: float = DEFAULT_RADIUS,
            ladder: Sequence[float] | None = None, n: int = 401, depth: int = 20) -> ConditionVerdict:
    """``v_lam(x+y) <= C v_mu(x) v_nu(y)`` on a two-dimensional ``(x, y)`` grid."""
    _non_radial_guard(V)
    d = _direction(direction)
    lams = tuple(ladder or V.ladder)
    name = f"M[{d}]"
    rng = {"system": V.label, "ladder": list(lams), "grid": f"{n}x{n}", "radius": radius}

    def residual(lam, mu, nu):
        W = min(radius, V.max_radius(lam), 2.0 * V.max_radius(mu), 2.0 * V.max_radius(nu)) / 2.0
        u = np.linspace(-W, W, n)
        # x + y lies on the lattice of step du, so one 1-d evaluation suffices
        sums = np.linspace(-2.0 * W, 2.0 * W, 2 * n - 1)
        lv_sum = V.log_v(lam, np.abs(sums))
        I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        lmu, lnu = V.log_v(mu, np.abs(u)), V.log_v(nu, np.abs(u))
        res = lv_sum[I + J] - lmu[I] - lnu[J]
        noise = _noise(np.abs(lv_sum[I + J]) + np.abs(lmu[I]) + np.abs(lnu[J]))
        X, Y = u[I], u[J]
        tail = np.maximum(np.abs(X), np.abs(Y)) >= 0.75 * W
        return res, tail, W, X, Y, noise

    witness = {}
    last = None
    if d == BEURLING:
        for lam in lams:
            got = None
            cut = False
            for i in range(depth + 1):
                mu = lam * 2.0 ** -i
                res, tail, W, X, Y, err = residual(lam, mu, mu)
                if not _usable(2.0 * W, [lam, mu], radius):
                    cut = True
                    break
                s = classify_residual(res, tail_mask=tail, noise=err)
                if s.bounded:
                    got = dict(mu=mu, nu=mu, **_constant(s.maximum))
                    break
                last = {"lambda": lam, "mu": mu, "x": float(X.ravel()[s.argmax]), "y": float(Y.ravel()[s.argmax])}
            if got is None:
                if last is None or cut:
                    return inconclusive(name, rng, "search windows too short")
                return fails(name, last, rng)
            witness[_fmt(lam)] = got
        return holds(name, {"table": witness}, rng)
    for a_i, mu in enumerate(lams):
        for nu in lams[a_i:]:
            got = None
            cut = False
            for i in range(depth + 1):
                lam = max(mu, nu) * 2.0 ** i
                res, tail, W, X, Y, err = residual(lam, mu, nu)
                if not _usable(2.0 * W, [mu, nu], radius):
                    cut = True
                    break
                s = classify_residual(res, tail_mask=tail, noise=err)
                if s.bounded:
                    got = dict(lam=lam, **_constant(s.maximum))
                    break
                last = {"mu": mu, "nu": nu, "lambda": lam, "x": float(X.ravel()[s.argmax]), "y": float(Y.ravel()[s.argmax])}
            if got is None:
                if last is None or cut:
                    return inconclusive(name, rng, "search windows too short")
                return fails(name, last, rng)
            witness[f"{_fmt(mu)},{_fmt(nu)}"] = got
    return holds(name, {"table": witness}, rng)


def _sphere_area(dim: int) -> float:
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


INNER_RADIUS = 1e-12


def _integrability(r: np.ndarray, logf: np.ndarray, dim: int, tol: float = 1e-9):
    """Integral of ``f`` over ``|x| <= R`` plus a monotone-tail certificate.

    ``r`` is a geometric grid starting at a tiny radius ``r0``; the integral
    is taken in ``s = log r`` and the ball ``|x| <= r0`` is bounded by
    ``f(r0)`` times its volume.  The tail is the outer quarter of the range
    (log scale for long ranges).  Returns ``(status, integral, tail_bound,
    error_estimate)`` with status one of ``"holds"``, ``"fails"``, ``"unknown"``.
    """
    R, r0 = r[-1], r[0]
    area = _sphere_area(dim)
    s = np.log(r)
    dens = area * np.exp(logf + dim * s)
    inner = area / dim * math.exp(min(float(logf[0]), 700.0)) * r0 ** dim
    total = float(simpson(dens, x=s)) + inner
    coarse = float(simpson(dens[::2], x=s[::2])) + inner
    tail = r >= min(0.5 * R, R ** 0.75 if R > 1.0 else R)
    rt, lt = r[tail], logf[tail]
    q_hold = lt + (dim + 1) * np.log(rt)
    q_fail = lt + dim * np.log(rt)
    scale = tol * (1.0 + np.abs(q_hold[:-1]))
    if np.all(np.diff(q_hold) <= scale):
        bound = area * math.exp(min(float(logf[-1]) + dim * math.log(R), 700.0))
        return "holds", total, bound, abs(total - coarse)
    if np.all(np.diff(q_fail) >= -tol * (1.0 + np.abs(q_fail[:-1]))):
        return "fails", total, math.inf, abs(total - coarse)
    return "unknown", total, math.nan, abs(total - coarse)


def check_N(V: WeightSystem, direction: str = BEURLING, radius: float = DEFAULT_RADIUS,
            ladder: Sequence[float] | None = None, depth: int = SEARCH_DEPTH, n: int = 32769,
            extended: float = EXTENDED_RADIUS) -> ConditionVerdict:
    """``v_lam / v_mu`` integrable (Beurling: ``forall lam exists mu <= lam``; Roumieu: ``forall mu exists lam >= mu``).

    The ratio is sampled on a geometric radial grid reaching
    ``min(extended, max_radius)``; windows shorter than ``radius`` that do
    not cover the slowest rung are treated as undecidable.
    """
    _non_radial_guard(V)
    d = _direction(direction)
    lams = tuple(ladder or V.ladder)
    name = f"N[{d}]"
    rng = {"system": V.label, "ladder": list(lams), "search": f"2^(+-i), i<={depth}",
           "radius": f"[{INNER_RADIUS:g}, {extended:g}] geometric",
           "quadrature": "composite Simpson in log r, step-halving error"}
    witness = {}
    for given in lams:
        got = None
        last = None
        seen = []
        for i in range(depth + 1):
            lam, mu = (given, given * 2.0 ** -i) if d == BEURLING else (given * 2.0 ** i, given)
            W = min(extended, V.max_radius(lam), V.max_radius(mu))
            if not _usable(W, [lam, mu], radius):
                seen.append("unknown")
                continue
            r = np.geomspace(INNER_RADIUS, W, n)
            pts = r if V.dim == 1 else np.stack([r] + [np.zeros_like(r)] * (V.dim - 1), axis=-1)
            logf = V.log_v(lam, pts) - V.log_v(mu, pts)
            status, total, bound, err = _integrability(r, logf, V.dim)
            seen.append(status)
            if status == "holds":
                got = {"lambda": lam, "mu": mu, "integral": total, "tail_bound": bound,
                       "error_estimate": err, "radius": W}
                break
            last = {"lambda": lam, "mu": mu, "partial_integral": total, "radius": W}
        if got is None:
            if "fails" in seen and "unknown" not in seen:
                return fails(name, last, rng)
            return inconclusive(name, rng, f"tail not certifiable for parameter {given:g}")
        witness[_fmt(given)] = got
    return holds(name, {"table": witness}, rng)


def check_square(V: WeightSystem, direction: str = BEURLING, radius: float = DEFAULT_RADIUS,
                 ladder: Sequence[float] | None = None, depth: int = SEARCH_DEPTH) -> ConditionVerdict:
    """``v_lam v_mu <= C v_nu`` (Beurling: ``nu <= lam, mu``; Roumieu: ``lam = mu >= nu``)."""
    _non_radial_guard(V)
    d = _direction(direction)
    lams = tuple(ladder or V.ladder)
    S = _Sampler(V, radius)
    name = f"square[{d}]"
    rng = {"system": V.label, "ladder": list(lams), "search": f"2^(+-i), i<={depth}", "radius": radius}
    if d == BEURLING:
        pairs = [(a, b) for i, a in enumerate(lams) for b in lams[i:]]
        return _search_pair(S, pairs, lambda ab, nu: [(1.0, ab[0]), (1.0, ab[1]), (-1.0, nu)],
                            lambda ab: [min(ab) * 2.0 ** -i for i in range(depth + 1)], name, rng)
    return _search_pair(S, lams, lambda nu, lam: [(2.0, lam), (-1.0, nu)],
                        lambda nu: [nu * 2.0 ** i for i in range(depth + 1)], name, rng)


def check_discrete_l1(V: WeightSystem, a: float = 1.0, direction: str = BEURLING,
                      radius: float = DEFAULT_RADIUS, ladder: Sequence[float] | None = None,
                      depth: int = SEARCH_DEPTH) -> ConditionVerdict:
    """``sum_{k in aZ^d} v_lam(k) / v_mu(k) < inf`` with a shell-sum tail certificate."""
    d = _direction(direction)
    lams = tuple(ladder or V.ladder)
    name = f"discrete-l1[{d}]"
    rng = {"system": V.label, "a": a, "ladder": list(lams), "radius": radius}
    witness = {}
    for given in lams:
        got = None
        last = None
        seen = []
        for i in range(depth + 1):
            lam, mu = (given, given * 2.0 ** -i) if d == BEURLING else (given * 2.0 ** i, given)
            W = min(radius, V.max_radius(lam), V.max_radius(mu))
            if not _usable(W, [lam, mu], radius):
                seen.append("unknown")
                continue
            K = int(math.floor(W / a))
            res = lattice_partial_sums(V, lam, mu, a, K)
            seen.append(res["status"])
            if res["status"] == "holds":
                got = {"lambda": lam, "mu": mu, "partial_sum": res["partial_sum"], "tail_bound": res["tail_bound"]}
                break
            last = {"lambda": lam, "mu": mu, "partial_sum": res["partial_sum"], "K": K}
        if got is None:
            if "fails" in seen and "unknown" not in seen:
                return fails(name, last, rng)
            return inconclusive(name, rng, f"tail not certifiable for parameter {given:g}")
        witness[_fmt(given)] = got
    return holds(name, {"table": witness}, rng)


def lattice_partial_sums(V: WeightSystem, lam: float, mu: float, a: float, K: int) -> dict:
    """Shell sums of ``v_lam / v_mu`` over ``a Z^d`` with Chebyshev radius ``<= K``.

    The tail is certified summable when ``j^2 S(j)`` is non-increasing over
    the outer half of the shells, and divergent when ``j S(j)`` is
    non-decreasing there.
    """
    j = np.arange(-K, K + 1)
    if V.dim == 1:
        pts = a * j
        cheb = np.abs(j)
    else:
        mesh = np.meshgrid(*([j] * V.dim), indexing="ij")
        pts = a * np.stack(mesh, axis=-1)
        cheb = np.max(np.abs(np.stack(mesh, axis=0)), axis=0)
    vals = np.exp(V.log_v(lam, pts) - V.log_v(mu, pts))
    shells = np.bincount(cheb.ravel(), weights=vals.ravel(), minlength=K + 1)
    total = float(shells.sum())
    idx = np.arange(K + 1, dtype=float)
    half = slice(max(1, K // 2), None)
    g2 = idx[half] ** 2 * shells[half]
    g1 = idx[half] * shells[half]
    if np.all(np.diff(g2) <= 1e-12 * (1.0 + g2[:-1])):
        return {"status": "holds", "partial_sum": total, "tail_bound": float(g2[-1] / K)}
    if np.all(np.diff(g1) >= -1e-12 * (1.0 + g1[:-1])):
        return {"status": "fails", "partial_sum": total, "tail_bound": math.inf}
    return {"status": "unknown", "partial_sum": total, "tail_bound": math.nan}
