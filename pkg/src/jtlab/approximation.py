"""Best approximation from finite-dimensional subspaces under factor norms.

The generic solver minimizes the convex, non-smooth map
``lam -> ||x - sum_i lam_i v_i||`` over C^k (realified to R^2k) by multistart
Nelder-Mead.  Uniqueness can only be falsified numerically, so probes return
one of three verdicts and fall back to ``inconclusive`` rather than guess.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import FactorMismatchError, ValidationError
from .factors import Element, FactorDescriptor, apply, norm
from .linalg import RealLinearMap, complexify, realify
from .meb import Ball, min_enclosing_ball

MAX_SUBSPACE_DIM = 8

UNIQUE = "unique"
NON_UNIQUE = "non_unique"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 16
    eps_f: float = 1e-6
    delta: float = 1e-2
    seed: int = 0
    max_iters: int = 4000
    restarts: int = 6
    xatol: float = 1e-11
    fatol: float = 1e-14
    ring_dirs: int = 16
    # witness pairs must sit in the sublevel set at eps_f * certify_factor
    certify_factor: float = 1e-3

    def __post_init__(self):
        if self.starts < 2:
            raise ValidationError("starts must be at least 2 (origin and projection seed)")
        for name in ("eps_f", "delta", "xatol", "fatol", "certify_factor"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if self.max_iters < 1 or self.restarts < 0 or self.ring_dirs < 0:
            raise ValidationError("max_iters must be >= 1; restarts and ring_dirs >= 0")

    @classmethod
    def from_mapping(cls, params: Mapping | None) -> "SolverConfig":
        if not params:
            return cls()
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(params) - set(known)
        if unknown:
            raise ValidationError(f"unknown solver parameters: {sorted(unknown)}")
        cast = {k: (int if known[k] == "int" else float)(v) for k, v in params.items()}
        return cls(**cast)

    def to_json(self) -> dict:
        return asdict(self)


class Subspace:
    """Span of linearly independent elements, orthonormalized in the ambient metric.

    Gram-Schmidt keeps the direction of the first basis vector, so a one-dimensional
    span of a Frobenius-normalized element keeps that element as its basis.
    """

    def __init__(self, factor: FactorDescriptor, basis: Sequence[Element]):
        if len(basis) == 0:
            raise ValidationError("a subspace needs at least one basis element")
        rows = []
        for b in basis:
            if b.factor != factor:
                raise FactorMismatchError(f"basis element lives in {b.factor}, not {factor}")
            v = b.coords.astype(np.complex128)
            scale = np.linalg.norm(v)
            for _ in range(2):
                for u in rows:
                    v = v - np.vdot(u, v) * u
            nv = np.linalg.norm(v)
            if nv <= 1e-10 * max(scale, 1e-300):
                raise ValidationError("subspace basis is linearly dependent")
            rows.append(v / nv)
        self.factor = factor
        self.V = np.array(rows)
        self.V.setflags(write=False)

    @classmethod
    def spanning(cls, factor: FactorDescriptor, vectors: Sequence[Element], tol: float = 1e-9) -> "Subspace | None":
        """Subspace spanned by possibly dependent vectors; ``None`` for the zero span."""
        if not vectors:
            return None
        A = np.array([v.coords for v in vectors])
        _, s, Vh = np.linalg.svd(A, full_matrices=False)
        keep = s > tol * max(1.0, s[0] if s.size else 0.0)
        if not np.any(keep):
            return None
        return cls(factor, [Element(factor, row, check=False) for row in Vh[keep]])

    @property
    def dim(self) -> int:
        return self.V.shape[0]

    @property
    def basis(self) -> list[Element]:
        return [Element(self.factor, v, check=False) for v in self.V]

    def element(self, coeffs) -> Element:
        c = np.asarray(coeffs, dtype=np.complex128)
        return Element(self.factor, c @ self.V, check=False)

    def coordinates(self, x: Element) -> np.ndarray:
        """Ambient orthogonal-projection coefficients."""
        return self.V.conj() @ x.coords

    def project(self, x: Element) -> Element:
        return self.element(self.coordinates(x))

    def contains(self, x: Element, tol: float = 1e-10) -> bool:
        return bool(np.linalg.norm(x.coords - self.project(x).coords) <= tol * max(1.0, x.euclidean_norm()))

    def to_json(self) -> dict:
        return {"factor": self.factor.to_json(), "basis": [b.to_json() for b in self.basis]}

    @classmethod
    def from_json(cls, obj) -> "Subspace":
        items = obj["basis"] if isinstance(obj, dict) else obj
        elems = [Element.from_json(e) for e in items]
        if not elems:
            raise ValidationError("empty subspace basis")
        return cls(elems[0].factor, elems)


@dataclass
class ApproxResult:
    distance: float
    coefficients: np.ndarray
    candidates: list[tuple[np.ndarray, float]]
    spread: float
    verdict: str
    evaluations: int = 0

    def to_json(self) -> dict:
        return {
            "distance": self.distance,
            "coefficients": {"re": self.coefficients.real.tolist(), "im": self.coefficients.imag.tolist()},
            "candidates": [
                {"re": c.real.tolist(), "im": c.imag.tolist(), "objective": f} for c, f in self.candidates
            ],
            "spread": self.spread,
            "verdict": self.verdict,
        }


def _check(x: Element, V: Subspace) -> None:
    if x.factor != V.factor:
        raise FactorMismatchError(f"element in {x.factor}, subspace in {V.factor}")
    if V.dim > MAX_SUBSPACE_DIM:
        raise ValidationError(f"subspace dimension {V.dim} exceeds {MAX_SUBSPACE_DIM}")


def search_radius(x: Element) -> float:
    """Coefficient bound containing every minimizer.

    ``||sum lam_i v_i|| <= ||x|| + dist <= 2||x||`` in the factor norm; the
    Euclidean coefficient norm exceeds the factor norm by at most ``sqrt(rank)``.
    """
    return 2.0 * norm(x) * math.sqrt(max(1, x.factor.rank))


def _max_pairwise(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    diff = points[:, None, :] - points[None, :, :]
    return float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))


def objective(x: Element, V: Subspace, coeffs) -> float:
    """Factor-norm residual ``||x - sum coeffs_i v_i||`` via the compiled kernel."""
    lam = realify(np.asarray(coeffs, dtype=np.complex128))
    return float(_kernels.residual_norm(lam, x.coords, np.ascontiguousarray(V.V), x.factor.blocks))


def _solve(x: Element, V: Subspace, cfg: SolverConfig):
    D = 2 * V.dim
    nx = norm(x)
    R = search_radius(x)
    rng = np.random.default_rng([cfg.seed, 7919])
    starts = np.zeros((cfg.starts, D))
    starts[1] = realify(V.coordinates(x))
    n_rand = cfg.starts - 2
    if n_rand > 0:
        g = rng.standard_normal((n_rand, D))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        starts[2:] = g * (R * rng.random((n_rand, 1)) ** (1.0 / D))
    scale = max(nx, 1e-300)
    P, F, evals = _kernels.multistart(
        starts, 0.2 * scale, x.coords, np.ascontiguousarray(V.V), x.factor.blocks,
        cfg.max_iters, cfg.xatol * max(1.0, scale), cfg.fatol * max(1.0, scale), cfg.restarts,
    )
    return P, F, int(evals), R


def _sorted_candidates(P: np.ndarray, F: np.ndarray, level: float):
    keep = [k for k in range(len(F)) if F[k] <= level]
    keep.sort(key=lambda k: (F[k], *P[k].tolist()))
    return P[keep], F[keep]


def distance_to_subspace(x: Element, V: Subspace, cfg: SolverConfig | None = None) -> ApproxResult:
    cfg = cfg or SolverConfig()
    _check(x, V)
    if norm(x) == 0.0:
        zero = np.zeros(V.dim, dtype=np.complex128)
        return ApproxResult(0.0, zero, [(zero, 0.0)], 0.0, UNIQUE)
    P, F, evals, _ = _solve(x, V, cfg)
    best = float(np.min(F))
    CP, CF = _sorted_candidates(P, F, best + cfg.eps_f)
    spread = _max_pairwise(CP)
    cands = [(complexify(p), float(f)) for p, f in zip(CP, CF)]
    verdict = NON_UNIQUE if spread >= cfg.delta else UNIQUE
    return ApproxResult(best, cands[0][0], cands, spread, verdict, evals)


@dataclass
class ProbeResult:
    verdict: str
    approx: ApproxResult
    diameter: float  # sublevel-set diameter estimate at dist + eps_f
    certified_diameter: float  # same at dist + eps_f * certify_factor
    witness: tuple[np.ndarray, np.ndarray] | None = None
    witness_objectives: tuple[float, float] | None = None
    extra: dict = field(default_factory=dict)

    @property
    def separation(self) -> float:
        if self.witness is None:
            return 0.0
        return float(np.linalg.norm(self.witness[0] - self.witness[1]))

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "distance": self.approx.distance,
            "coefficients": {"re": self.approx.coefficients.real.tolist(),
                             "im": self.approx.coefficients.imag.tolist()},
            "diameter": self.diameter,
            "certified_diameter": self.certified_diameter,
            "witness": None,
        }
        if self.witness is not None:
            out["witness"] = {
                "a": {"re": self.witness[0].real.tolist(), "im": self.witness[0].imag.tolist()},
                "b": {"re": self.witness[1].real.tolist(), "im": self.witness[1].imag.tolist()},
                "objectives": list(self.witness_objectives),
                "separation": self.separation,
            }
        return out


def _ring_directions(D: int, P: np.ndarray, center: np.ndarray, n_random: int, rng) -> np.ndarray:
    dirs = [np.eye(D)[k] for k in range(D)]
    if D == 2:
        ang = np.linspace(0.0, np.pi, 8, endpoint=False)[1:]
        dirs += [np.array([np.cos(a), np.sin(a)]) for a in ang]
    for g in rng.standard_normal((n_random, D)):
        dirs.append(g / np.linalg.norm(g))
    for p in P:
        d = p - center
        nd = np.linalg.norm(d)
        if nd > 1e-12:
            dirs.append(d / nd)
    dirs = np.array(dirs)
    return np.concatenate([dirs, -dirs])


def _farthest_pair(points: np.ndarray) -> tuple[int, int, float]:
    diff = points[:, None, :] - points[None, :, :]
    d2 = np.sum(diff * diff, axis=-1)
    i, j = np.unravel_index(np.argmax(d2), d2.shape)
    return int(i), int(j), float(np.sqrt(d2[i, j]))


def uniqueness_probe(x: Element, V: Subspace, eps_f: float | None = None, delta: float | None = None,
                     cfg: SolverConfig | None = None) -> ProbeResult:
    """Three-valued numerical uniqueness test for the best approximation of ``x`` in ``V``.

    Multistart candidates are complemented by a ring search that bisects the
    sublevel set ``{f <= dist + eps}`` along many directions around the
    incumbent.  ``non_unique`` needs a witness pair at least ``delta`` apart
    inside the tighter level ``dist + eps_f * certify_factor``; ``unique`` needs
    the ``dist + eps_f`` sublevel set to have diameter below ``delta``.
    """
    cfg = cfg or SolverConfig()
    eps_f = cfg.eps_f if eps_f is None else eps_f
    delta = cfg.delta if delta is None else delta
    _check(x, V)
    approx = distance_to_subspace(x, V, cfg)
    if norm(x) == 0.0:
        return ProbeResult(UNIQUE, approx, 0.0, 0.0)
    P, F, evals, R = _solve(x, V, SolverConfig(**{**cfg.to_json(), "seed": cfg.seed + 1}))
    P = np.vstack([P, np.array([realify(c) for c, _ in approx.candidates])])
    F = np.concatenate([F, [f for _, f in approx.candidates]])
    k0 = int(np.argmin(F))
    dist, center = float(F[k0]), P[k0]
    approx.distance = min(approx.distance, dist)
    rng = np.random.default_rng([cfg.seed, 104729])
    levels = {"hi": dist + eps_f, "lo": dist + eps_f * cfg.certify_factor}
    Vc = np.ascontiguousarray(V.V)
    sets = {}
    for name, level in levels.items():
        CP, CF = _sorted_candidates(P, F, level)
        dirs = _ring_directions(P.shape[1], CP, center, cfg.ring_dirs, rng)
        t = _kernels.sublevel_extent(center, dirs, level, x.coords, Vc, x.factor.blocks, 2.0 * R + 1.0, 60)
        ends = center + t[:, None] * dirs
        pts = np.vstack([CP, ends, center[None, :]])
        sets[name] = pts
    i, j, diam_lo = _farthest_pair(sets["lo"])
    diam_hi = _farthest_pair(sets["hi"])[2]
    extra = {"evaluations": approx.evaluations + evals}
    if diam_lo >= delta:
        a, b = sets["lo"][i], sets["lo"][j]
        fa = objective(x, V, complexify(a))
        fb = objective(x, V, complexify(b))
        return ProbeResult(NON_UNIQUE, approx, diam_hi, diam_lo,
                           (complexify(a), complexify(b)), (fa, fb), extra)
    verdict = UNIQUE if diam_hi < delta else INCONCLUSIVE
    return ProbeResult(verdict, approx, diam_hi, diam_lo, extra=extra)


# --- special cases with exact answers -------------------------------------

def ellinf_hilbert_best_approx(rows) -> ApproxResult:
    """Best approximation from the diagonal of an ℓ∞-sum of copies of C^k.

    Row ``i`` holds the coordinates of summand ``i``; the distance to the
    diagonal is the radius of the minimum enclosing ball of the realified rows,
    and the centre gives the unique minimizing coefficients.
    """
    try:
        R = np.array([np.asarray(r, dtype=np.complex128) for r in rows])
    except ValueError as exc:
        raise ValidationError("rows must all have the same length") from exc
    if R.ndim != 2 or R.shape[0] == 0 or R.shape[1] == 0:
        raise ValidationError("rows must all have the same non-zero length")
    ball = min_enclosing_ball(np.array([realify(r) for r in R]))
    center = complexify(ball.center)
    return ApproxResult(ball.radius, center, [(center, ball.radius)], 0.0, UNIQUE)


def ellinf_setting(rows) -> tuple[Element, Subspace]:
    """The same problem posed in ``direct_sum(n x rect(1,k))`` for the generic solver.

    Generic coefficients (orthonormal basis) equal ``sqrt(n)`` times the ball centre.
    """
    from .factors import direct_sum, rectangular

    R = np.array([np.asarray(r, dtype=np.complex128) for r in rows])
    n, k = R.shape
    F = direct_sum(*([rectangular(1, k)] * n))
    x = Element(F, R.ravel())
    basis = [Element(F, np.tile(np.eye(k)[j], n)) for j in range(k)]
    return x, Subspace(F, basis)


def conj_invariant_defect(V: np.ndarray) -> float:
    """Distance of the conjugated orthonormal rows of ``V`` from their span."""
    W = V.conj()
    resid = W - (W @ V.conj().T) @ V
    return float(np.linalg.norm(resid))


def spin_projection_approx(x: Element, K: Subspace) -> Element:
    """Orthogonal projection onto a conjugation-invariant subspace of a spin factor."""
    if x.factor.kind != "spin" or K.factor != x.factor:
        raise FactorMismatchError("spin projection needs x and K in one spin factor")
    defect = conj_invariant_defect(K.V)
    if defect > 1e-10:
        raise ValidationError(f"subspace is not closed under conjugation (defect {defect:.2e})")
    return K.project(x)


@dataclass
class ContractiveCheck:
    passed: bool
    samples: list[dict]
    preconditions: dict

    def to_json(self) -> dict:
        return {"passed": self.passed, "samples": self.samples, "preconditions": self.preconditions}


def contractive_projection_check(P: RealLinearMap, V: Subspace, samples: Sequence[Element],
                                 cfg: SolverConfig | None = None, tol: float = 1e-6) -> ContractiveCheck:
    """For a contractive projection with ``P(V) ⊆ V``: ``P(c_V(Px)) = c_V(Px)`` when unique."""
    cfg = cfg or SolverConfig()
    f = V.factor
    B = f.real_basis
    idem = (P @ P - P).norm(B)
    invariant = max(
        (np.linalg.norm(apply(P, v).coords - V.project(apply(P, v)).coords) for v in V.basis),
        default=0.0,
    )
    pre = {"idempotent": bool(idem <= 1e-9), "P(V)⊆V": bool(invariant <= 1e-9),
           "idempotence_residual": float(idem), "invariance_residual": float(invariant)}
    records = []
    ok = pre["idempotent"] and pre["P(V)⊆V"]
    for idx, x in enumerate(samples):
        px = apply(P, x)
        rec = {"index": idx, "contractive": bool(norm(px) <= norm(x) * (1 + 1e-9) + 1e-12)}
        if not rec["contractive"]:
            rec["status"] = "precondition_violated"
            ok = False
            records.append(rec)
            continue
        probe = uniqueness_probe(px, V, cfg=cfg)
        rec["verdict"] = probe.verdict
        if probe.verdict == UNIQUE:
            c = V.element(probe.approx.coefficients)
            gap = norm(apply(P, c) - c)
            rec["fixed_point_residual"] = gap
            rec["status"] = "holds" if gap <= tol else "violated"
            ok = ok and gap <= tol
        else:
            rec["status"] = "skipped"
        records.append(rec)
    return ContractiveCheck(bool(ok), records, pre)


__all__ = [
    "ApproxResult",
    "Ball",
    "ContractiveCheck",
    "ProbeResult",
    "SolverConfig",
    "Subspace",
    "contractive_projection_check",
    "distance_to_subspace",
    "ellinf_hilbert_best_approx",
    "ellinf_setting",
    "min_enclosing_ball",
    "objective",
    "spin_projection_approx",
    "uniqueness_probe",
]
