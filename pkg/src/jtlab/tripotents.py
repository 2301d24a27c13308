"""Tripotents, Peirce calculus, orthogonality, range tripotents and ranks."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import FactorMismatchError, InconsistencyError, NotTripotentError, ValidationError
from .factors import (
    Element,
    FactorDescriptor,
    L_operator,
    Q_operator,
    apply,
    canonical_complete_tripotent,
    norm,
    triple_product,
)
from .linalg import (
    DEFAULT_REL_TOL,
    RealLinearMap,
    partial_isometry_above,
    svd,
)

TRIPOTENT_TOL = 1e-9


@dataclass(frozen=True)
class TripotentCertificate:
    element: Element
    residual: float
    tol: float
    peirce_dims: tuple[int, int, int]  # complex dims of E2, E1, E0

    @property
    def minimal(self) -> bool:
        return self.peirce_dims[0] == 1

    @property
    def complete(self) -> bool:
        return self.peirce_dims[2] == 0

    @property
    def unitary(self) -> bool:
        return self.peirce_dims[0] == self.element.factor.dimension

    @property
    def factor(self) -> FactorDescriptor:
        return self.element.factor

    def to_json(self) -> dict:
        return {
            "element": self.element.to_json(),
            "residual": self.residual,
            "tol": self.tol,
            "minimal": self.minimal,
            "complete": self.complete,
            "unitary": self.unitary,
            "peirce_dims": {"2": self.peirce_dims[0], "1": self.peirce_dims[1], "0": self.peirce_dims[2]},
        }


@dataclass(frozen=True)
class PeirceDecomposition:
    P2: RealLinearMap
    P1: RealLinearMap
    P0: RealLinearMap

    def __getitem__(self, k: int) -> RealLinearMap:
        return (self.P0, self.P1, self.P2)[k]

    def component(self, k: int, x: Element) -> Element:
        return apply(self[k], x)

    def range_basis(self, k: int, factor: FactorDescriptor) -> np.ndarray:
        """Orthonormal complex basis (columns) of the Peirce-k space."""
        return complex_range_basis(self[k], factor)


def complex_range_basis(T: RealLinearMap, factor: FactorDescriptor, tol: float = 1e-6) -> np.ndarray:
    """Orthonormal complex basis of ``T(factor)`` for a complex-linear ``T``."""
    C = T.to_complex() @ factor.basis
    if C.size == 0:
        return np.zeros((factor.ambient_dim, 0), dtype=np.complex128)
    U, s, _ = np.linalg.svd(C, full_matrices=False)
    return U[:, s > tol]


def _peirce_maps(e: Element) -> PeirceDecomposition:
    L = L_operator(e, e)
    Q = Q_operator(e)
    Q2 = Q @ Q
    ident = RealLinearMap.identity(e.factor.ambient_dim)
    return PeirceDecomposition(P2=Q2, P1=2.0 * (L - Q2), P0=ident - 2.0 * L + Q2)


def tripotent_residual(e: Element) -> float:
    return norm(triple_product(e, e, e) - e)


def is_tripotent(e: Element, tol: float = TRIPOTENT_TOL) -> TripotentCertificate:
    """Certify ``{e,e,e} = e``; raises ``NotTripotentError`` carrying the residual."""
    residual = tripotent_residual(e)
    bound = tol * max(1.0, norm(e))
    if residual > bound:
        raise NotTripotentError(residual, bound)
    P = _peirce_maps(e)
    B = e.factor.real_basis
    dims = tuple(P[k].rank(B) // 2 for k in (2, 1, 0))
    return TripotentCertificate(e, residual, bound, dims)


def peirce(cert: TripotentCertificate) -> PeirceDecomposition:
    return _peirce_maps(cert.element)


def s_lambda(cert: TripotentCertificate, lam: complex) -> RealLinearMap:
    """The isometry ``lam^2 P2 + lam P1 + P0`` for a unit-modulus ``lam``."""
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValidationError(f"|lambda| must be 1, got {abs(lam)!r}")
    P = peirce(cert)
    return (lam * lam) * P.P2 + lam * P.P1 + P.P0


# --- spin factors ---------------------------------------------------------

@dataclass(frozen=True)
class SpinSpectrum:
    lam1: float
    lam2: float
    e1: Element
    e2: Element

    def reconstruct(self) -> Element:
        return self.lam1 * self.e1 + self.lam2 * self.e2


def _spin_spectral_vector(a: np.ndarray):
    t = complex(a @ a)
    theta = -0.5 * np.angle(t) if abs(t) > 0.0 else 0.0
    b = np.exp(1j * theta) * a
    p, q = b.real.copy(), b.imag.copy()
    np_, nq = float(np.linalg.norm(p)), float(np.linalg.norm(q))
    if np_ < nq:
        # only roundoff can make the real part shorter once t >= 0 is aligned
        np_ = nq = 0.5 * (np_ + nq)
    lam1, lam2 = np_ + nq, np_ - nq
    d = a.size
    if np_ > 0.0:
        u = p / np.linalg.norm(p)
    else:
        u = np.zeros(d)
        u[0] = 1.0
    q_perp = q - (q @ u) * u
    if np.linalg.norm(q_perp) > 1e-12 * max(1.0, nq):
        v = q_perp / np.linalg.norm(q_perp)
    else:
        # any real unit vector orthogonal to u completes the frame
        k = int(np.argmin(np.abs(u)))
        w = np.zeros(d)
        w[k] = 1.0
        w -= (w @ u) * u
        v = w / np.linalg.norm(w)
    phase = np.exp(-1j * theta)
    e1 = phase * (u + 1j * v) / 2.0
    e2 = phase * (u - 1j * v) / 2.0
    return lam1, lam2, e1, e2


def spin_spectral_decomposition(a: Element) -> SpinSpectrum:
    if a.factor.kind != "spin":
        raise FactorMismatchError(f"spin factor required, got {a.factor}")
    lam1, lam2, e1, e2 = _spin_spectral_vector(a.coords)
    f = a.factor
    return SpinSpectrum(lam1, lam2, Element(f, e1, check=False), Element(f, e2, check=False))


# --- range tripotents -----------------------------------------------------

def _range_coords(a: Element, cutoff: float) -> np.ndarray:
    out = np.zeros(a.factor.ambient_dim, dtype=np.complex128)
    for (f, off), block in zip(a.factor.leaves, a.blocks()):
        sl = slice(off, off + f.leaf_size)
        if f.kind == "spin":
            lam1, lam2, e1, e2 = _spin_spectral_vector(block)
            r = np.zeros_like(block)
            if lam1 > cutoff:
                r = r + e1
            if lam2 > cutoff:
                r = r + e2
            out[sl] = r
        else:
            out[sl] = partial_isometry_above(block, cutoff).ravel()
    return a.factor.project(out)


def range_tripotent(a: Element, rel_tol: float = DEFAULT_REL_TOL) -> TripotentCertificate:
    """Smallest tripotent ``r(a)`` with ``a`` positive in its Peirce-2 algebra."""
    cutoff = rel_tol * norm(a)
    r = Element(a.factor, _range_coords(a, cutoff), check=False)
    return is_tripotent(r, tol=1e-8)


def rank(x: FactorDescriptor | Element, rel_tol: float = DEFAULT_REL_TOL) -> int:
    """Triple rank of a factor (closed form) or of an element (numerical)."""
    if isinstance(x, FactorDescriptor):
        return x.rank
    cutoff = rel_tol * norm(x)
    total = 0
    for (f, _), block in zip(x.factor.leaves, x.blocks()):
        if f.kind == "spin":
            lam1, lam2, _, _ = _spin_spectral_vector(block)
            total += int(lam1 > cutoff) + int(lam2 > cutoff)
        else:
            s = svd(block).values
            k = int(np.count_nonzero(s > cutoff))
            # antisymmetric minimal tripotents are rank-two matrices
            total += k // 2 if f.kind == "antisymmetric" else k
    return total


def annihilator_basis(a: Element, rel_tol: float = DEFAULT_REL_TOL) -> list[Element]:
    """Orthonormal basis of ``{a}^perp``, the Peirce-0 space of ``r(a)``."""
    r = range_tripotent(a, rel_tol)
    B = complex_range_basis(peirce(r).P0, a.factor)
    out = [Element(a.factor, B[:, k], check=False) for k in range(B.shape[1])]
    for b in out:
        if L_operator(a, b).norm() > 1e-8 * max(1.0, norm(a)):
            raise InconsistencyError("annihilator vector is not orthogonal to a")
    return out


# --- relations ------------------------------------------------------------

class Relation(str, Enum):
    ORTHOGONAL = "orthogonal"
    COLINEAR = "colinear"
    NEITHER = "neither"


def _is_tripotent_quiet(x: Element, tol: float) -> TripotentCertificate | None:
    try:
        return is_tripotent(x, tol=tol)
    except NotTripotentError:
        return None


def orthogonality_tests(a: Element, b: Element, tol: float = 1e-8) -> dict[str, bool]:
    """Three characterizations of ``a ⊥ b``; they must agree."""
    a._same(b)
    na, nb = norm(a), norm(b)
    ra = range_tripotent(a).element
    rb = range_tripotent(b).element
    return {
        "L(a,b)=0": L_operator(a, b).norm() <= tol * max(1.0, na * nb),
        "{a,a,b}=0": norm(triple_product(a, a, b)) <= tol * max(1.0, na * na * nb),
        "r(a)⊥r(b)": L_operator(ra, rb).norm() <= tol,
    }


def relation(a: Element, b: Element, tol: float = 1e-8) -> Relation:
    tests = orthogonality_tests(a, b, tol)
    verdicts = set(tests.values())
    if len(verdicts) > 1:
        raise InconsistencyError(f"orthogonality characterizations disagree: {tests}")
    if verdicts.pop():
        return Relation.ORTHOGONAL
    ca = _is_tripotent_quiet(a, TRIPOTENT_TOL)
    cb = _is_tripotent_quiet(b, TRIPOTENT_TOL)
    if ca is not None and cb is not None and norm(a) > 0 and norm(b) > 0:
        a_in_1b = norm(apply(peirce(cb).P1, a) - a) <= tol
        b_in_1a = norm(apply(peirce(ca).P1, b) - b) <= tol
        if a_in_1b and b_in_1a:
            return Relation.COLINEAR
    return Relation.NEITHER


def complete_extension(x: Element, rel_tol: float = DEFAULT_REL_TOL) -> TripotentCertificate:
    """A complete tripotent ``e >= r(x)``: ``e - r(x)`` is a tripotent orthogonal to ``r(x)``.

    The range tripotent is extended by range tripotents of elements of the
    remaining Peirce-0 space until nothing orthogonal is left.  The first
    candidate is the Peirce-0 part of the canonical complete tripotent, so
    ``diag(1, 0)`` extends to the identity; generic elements are the fallback.
    """
    canonical = canonical_complete_tripotent(x.factor)
    if norm(x) == 0.0:
        return is_tripotent(canonical)
    cert = range_tripotent(x, rel_tol)
    rng = np.random.default_rng(20240611)
    for _ in range(2 * x.factor.rank + 1):
        if cert.complete:
            return cert
        P0 = peirce(cert).P0
        b = apply(P0, canonical)
        if norm(b) < 1e-6:
            B = complex_range_basis(P0, x.factor)
            weights = rng.standard_normal(B.shape[1]) + 1j * rng.standard_normal(B.shape[1])
            b = Element.projected(x.factor, B @ weights)
        piece = range_tripotent(b, 1e-6).element
        cert = is_tripotent(cert.element + piece, tol=1e-8)
    if not cert.complete:
        raise InconsistencyError("failed to extend the range tripotent to a complete one")
    return cert


# --- atomic functionals ---------------------------------------------------

@dataclass(frozen=True)
class AtomicFunctional:
    """``phi(x) = eta^* X xi`` on a rectangular factor."""

    factor: FactorDescriptor
    eta: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.factor.kind != "rectangular":
            raise ValidationError("atomic functionals are defined on rectangular factors")
        m, n = self.factor.shape
        eta = np.asarray(self.eta, dtype=np.complex128).ravel()
        xi = np.asarray(self.xi, dtype=np.complex128).ravel()
        if eta.size != m or xi.size != n:
            raise ValidationError("eta/xi sizes do not match the factor")
        if abs(np.linalg.norm(eta) - 1) > 1e-12 or abs(np.linalg.norm(xi) - 1) > 1e-12:
            raise ValidationError("eta and xi must be unit vectors")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "xi", xi)

    def __call__(self, x: Element) -> complex:
        if x.factor != self.factor:
            raise FactorMismatchError("functional and element live in different factors")
        return complex(self.eta.conj() @ x.matrix @ self.xi)

    def support(self) -> Element:
        return Element.from_matrix(self.factor, np.outer(self.eta, self.xi.conj()))


def seminorm(phi: AtomicFunctional, x: Element) -> float:
    """``sqrt(phi{x, x, s(phi)})``; dominates ``|phi(x)|``."""
    val = phi(triple_product(x, x, phi.support())).real
    return float(np.sqrt(max(val, 0.0)))


__all__ = [
    "AtomicFunctional",
    "PeirceDecomposition",
    "Relation",
    "SpinSpectrum",
    "TripotentCertificate",
    "annihilator_basis",
    "complete_extension",
    "complex_range_basis",
    "is_tripotent",
    "orthogonality_tests",
    "peirce",
    "range_tripotent",
    "rank",
    "relation",
    "s_lambda",
    "seminorm",
    "spin_spectral_decomposition",
]
