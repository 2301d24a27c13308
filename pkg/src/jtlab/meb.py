"""Minimum enclosing balls in R^d.

``min_enclosing_ball`` is Welzl's recursion with the move-to-front heuristic;
``brute_force_ball`` enumerates every support set of at most ``d + 1`` points
and is kept as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ValidationError

MAX_DIM = 16


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def contains(self, points, tol: float = 1e-10) -> bool:
        d = np.linalg.norm(np.atleast_2d(points) - self.center, axis=1)
        return bool(np.all(d <= self.radius + tol))

    def to_json(self) -> dict:
        return {"center": self.center.tolist(), "radius": self.radius}


def _as_points(points) -> np.ndarray:
    P = np.asarray(points, dtype=np.float64)
    if P.ndim == 1:
        P = P[None, :]
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValidationError("need a non-empty list of points")
    if P.shape[1] == 0 or P.shape[1] > MAX_DIM:
        raise ValidationError(f"point dimension must be in 1..{MAX_DIM}, got {P.shape[1]}")
    if not np.all(np.isfinite(P)):
        raise ValidationError("points must be finite")
    return P


def circumball(S: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest ball with all rows of ``S`` on its boundary, centred in their affine hull.

    Returns the centre and squared radius.  Affinely dependent sets fall back to
    a least-squares centre, which the caller must validate.
    """
    p0 = S[0]
    if S.shape[0] == 1:
        return p0.copy(), 0.0
    A = (S[1:] - p0).T
    G = A.T @ A
    rhs = 0.5 * np.diag(G)
    try:
        alpha = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        alpha = np.linalg.lstsq(G, rhs, rcond=None)[0]
    c = p0 + A @ alpha
    return c, float(np.sum((c - p0) ** 2))


def _outside(p, c, r2) -> bool:
    return float(np.sum((p - c) ** 2)) > r2 + 1e-12 * max(1.0, r2)


def _mtf(P, order: list, end: int, support: list, dim: int):
    if support:
        c, r2 = circumball(P[support])
    else:
        c, r2 = None, -1.0
    if len(support) == dim + 1:
        return c, r2
    i = 0
    while i < end:
        idx = order[i]
        if c is None or _outside(P[idx], c, r2):
            c, r2 = _mtf(P, order, i, support + [idx], dim)
            order.pop(i)
            order.insert(0, idx)
        i += 1
    return c, r2


def min_enclosing_ball(points) -> Ball:
    P = np.unique(_as_points(points), axis=0)
    order = list(range(P.shape[0]))
    c, r2 = _mtf(P, order, len(order), [], P.shape[1])
    return Ball(np.asarray(c, dtype=np.float64), float(np.sqrt(max(r2, 0.0))))


def brute_force_ball(points) -> Ball:
    """Exhaustive search over affinely independent support sets (small inputs only)."""
    P = np.unique(_as_points(points), axis=0)
    n, d = P.shape
    best = None
    for size in range(1, min(n, d + 1) + 1):
        for idx in combinations(range(n), size):
            S = P[list(idx)]
            if size > 1:
                A = S[1:] - S[0]
                sv = np.linalg.svd(A, compute_uv=False)
                if sv[-1] <= 1e-10 * max(1.0, sv[0]):
                    continue
            c, r2 = circumball(S)
            r = np.sqrt(r2)
            if best is not None and r >= best.radius:
                continue
            if np.all(np.linalg.norm(P - c, axis=1) <= r + 1e-12 * max(1.0, r)):
                best = Ball(c, float(r))
    return best
