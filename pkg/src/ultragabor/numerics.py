"""Small numerical kernels shared by the checkers.

The functions here are deliberately generic: a vectorized golden-section
maximizer, a discrete Legendre transform with local refinement, and the
head/tail classifier used to decide whether a sampled residual stays bounded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BoundaryMaximum

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def golden_maximize(
    f: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    iterations: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Maximize a unimodal vectorized function independently on each bracket.

    ``f`` receives an array shaped like ``lo`` and must return values of the
    same shape.  Returns the refined maximizers and maxima.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(iterations):
        left = fc >= fd
        # keep [a, d] when the left probe wins, otherwise [c, b]; one of the
        # old probes is reused and only one new evaluation is needed
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        probe = np.where(left, b - GOLDEN * (b - a), a + GOLDEN * (b - a))
        fp = f(probe)
        c, d, fc, fd = (
            np.where(left, probe, d),
            np.where(left, c, probe),
            np.where(left, fp, fd),
            np.where(left, fc, fp),
        )
    x = np.where(fc >= fd, c, d)
    return x, np.maximum(fc, fd)


def legendre_sup(
    f: Callable[[np.ndarray], np.ndarray],
    slopes: np.ndarray,
    grid: np.ndarray,
    grid_values: np.ndarray | None = None,
    chunk: int = 256,
    check_boundary: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``sup_x (s x - f(x))`` over ``grid`` for every slope ``s``.

    The grid maximum is located first and then refined by golden section on
    the two neighbouring cells.  Raises :class:`BoundaryMaximum` when the grid
    maximizer sits on the right end of the grid.
    """
    s = np.atleast_1d(np.asarray(slopes, dtype=float))
    flat = s.ravel()
    fx = f(grid) if grid_values is None else grid_values
    n = grid.size
    values = np.empty_like(flat)
    where = np.empty_like(flat)
    for start in range(0, flat.size, chunk):
        block = flat[start:start + chunk]
        scores = block[:, None] * grid[None, :] - fx[None, :]
        idx = np.argmax(scores, axis=1)
        if check_boundary and np.any(idx == n - 1):
            bad = block[idx == n - 1][0]
            raise BoundaryMaximum(
                f"maximizer for slope {bad:g} reaches the grid end x = {grid[-1]:g}"
            )
        lo = grid[np.maximum(idx - 1, 0)]
        hi = grid[np.minimum(idx + 1, n - 1)]
        best_grid = scores[np.arange(block.size), idx]

        def objective(x, block=block):
            return block * x - f(x)

        xr, vr = golden_maximize(objective, lo, hi)
        better = vr > best_grid
        values[start:start + chunk] = np.where(better, vr, best_grid)
        where[start:start + chunk] = np.where(better, xr, grid[idx])
    return values.reshape(s.shape), where.reshape(s.shape)


@dataclass(frozen=True)
class ResidualSummary:
    """Head/tail description of a sampled residual."""

    bounded: bool
    maximum: float
    argmax: int
    head_max: float
    tail_max: float


def classify_residual(
    residual: np.ndarray,
    tail_mask: np.ndarray | None = None,
    tail_fraction: float = 0.25,
    tol: float = 1e-9,
    noise: np.ndarray | None = None,
) -> ResidualSummary:
    """Decide whether a residual sampled on a growing window looks bounded.

    The window is split into a head and a tail (the outer ``tail_fraction``
    of the samples, or an explicit mask).  The residual counts as bounded
    when nothing in the tail exceeds the head maximum by more than ``tol``
    (relative to the residual scale), i.e. the supremum is attained away from
    the truncation edge.

    ``noise`` is a pointwise rounding bound (residuals are often differences
    of huge log-weights).  The tail is then compared by its lower envelope
    against the head's upper envelope, and ``maximum`` is the largest lower
    envelope value, so it is only as large as the arithmetic can certify.
    """
    r = np.asarray(residual, dtype=float).ravel()
    if tail_mask is None:
        n_tail = max(1, int(round(tail_fraction * r.size)))
        mask = np.zeros(r.size, dtype=bool)
        mask[r.size - n_tail:] = True
    else:
        mask = np.asarray(tail_mask, dtype=bool).ravel()
    finite = np.where(np.isfinite(r), r, np.inf if np.any(r == np.inf) else -np.inf)
    err = np.zeros_like(finite) if noise is None else np.broadcast_to(np.asarray(noise, dtype=float), np.shape(residual)).ravel()
    lower = finite - err
    upper = finite + err
    head_max = float(upper[~mask].max()) if (~mask).any() else -np.inf
    tail_max = float(lower[mask].max()) if mask.any() else -np.inf
    idx = int(np.argmax(lower))
    scale = 1.0 + max(abs(head_max) if np.isfinite(head_max) else 0.0, 0.0)
    bounded = bool(np.isfinite(tail_max) and tail_max <= head_max + tol * scale) or tail_max == -np.inf
    return ResidualSummary(bounded, float(lower[idx]), idx, head_max, tail_max)


def trapezoid_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = 0.5 * step
    return w


def power_ladder(base: float, exponents) -> list[float]:
    return [float(base) * 2.0 ** int(j) for j in exponents]
