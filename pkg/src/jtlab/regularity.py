"""Generalized inverses, Peirce-2 Jordan algebras and BP-quasi-invertibility."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InconsistencyError, NotInvertibleError, ValidationError
from .factors import (
    Element,
    L_operator,
    Q_operator,
    bergmann,
    norm,
    triple_product,
)
from .linalg import (
    DEFAULT_REL_TOL,
    RealLinearMap,
    numerical_rank,
    pseudo_inverse_above,
    realify_basis,
)
from .tripotents import (
    TripotentCertificate,
    _spin_spectral_vector,
    complete_extension,
    complex_range_basis,
    peirce,
    range_tripotent,
)

BERGMANN_TOL = 1e-8


def generalized_inverse(a: Element, rel_tol: float = DEFAULT_REL_TOL) -> Element:
    """``a^dagger``: ``Q(a)b = a``, ``Q(b)a = b`` and ``[Q(a), Q(b)] = 0``.

    Matrix summands use ``(a^+)^*`` with ``a^+`` the Moore-Penrose inverse;
    spin summands invert the spectral values.  Singular values at or below
    ``rel_tol * ||a||`` are treated as zero.
    """
    cutoff = rel_tol * norm(a)
    out = np.zeros(a.factor.ambient_dim, dtype=np.complex128)
    for (f, off), block in zip(a.factor.leaves, a.blocks()):
        sl = slice(off, off + f.leaf_size)
        if f.kind == "spin":
            lam1, lam2, e1, e2 = _spin_spectral_vector(block)
            v = np.zeros_like(block)
            if lam1 > cutoff:
                v = v + e1 / lam1
            if lam2 > cutoff:
                v = v + e2 / lam2
            out[sl] = v
        else:
            out[sl] = pseudo_inverse_above(block, cutoff).conj().T.ravel()
    return Element.projected(a.factor, out)


def regular_inverse_residuals(a: Element, b: Element, rel_tol: float = DEFAULT_REL_TOL) -> dict[str, float]:
    """Scale-relative residuals of the von Neumann regularity identities for ``b = a^dagger``."""
    Qa, Qb = Q_operator(a), Q_operator(b)
    r = range_tripotent(a, rel_tol)
    P2 = peirce(r).P2
    B = a.factor.real_basis
    na, nb = max(norm(a), 1e-300), max(norm(b), 1e-300)
    comm = (Qa @ Qb - Qb @ Qa).norm(B)
    return {
        "Q(a)b=a": norm(triple_product(a, b, a) - a) / na,
        "Q(b)a=b": norm(triple_product(b, a, b) - b) / nb,
        "[Q(a),Q(b)]=0": comm / max(1.0, (na * nb) ** 2),
        "Q(a)Q(b)=P2(r(a))": (Qa @ Qb - P2).norm(B),
        "Q(b)Q(a)=P2(r(a))": (Qb @ Qa - P2).norm(B),
        "L(a,b)=L(r,r)": (L_operator(a, b) - L_operator(r.element, r.element)).norm(B),
    }


class Peirce2Algebra:
    """The JB*-algebra ``E2(e)``: product ``{x,e,y}``, involution ``{e,x,e}``, unit ``e``."""

    def __init__(self, tripotent: TripotentCertificate):
        self.tripotent = tripotent
        self.e = tripotent.element
        self.factor = self.e.factor

    @cached_property
    def basis(self) -> np.ndarray:
        return complex_range_basis(peirce(self.tripotent).P2, self.factor)

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def product(self, x: Element, y: Element) -> Element:
        return triple_product(x, self.e, y)

    def involution(self, x: Element) -> Element:
        return triple_product(self.e, x, self.e)

    def contains(self, x: Element, tol: float = 1e-8) -> bool:
        B = self.basis
        resid = x.coords - B @ (B.conj().T @ x.coords)
        return bool(np.linalg.norm(resid) <= tol * max(1.0, x.euclidean_norm()))

    def _coords(self, x: Element) -> np.ndarray:
        return self.basis.conj().T @ x.coords

    def _element(self, c: np.ndarray) -> Element:
        return Element(self.factor, self.basis @ c, check=False)

    def _require(self, x: Element) -> None:
        if not self.contains(x):
            raise ValidationError("element is not in the Peirce-2 space of the tripotent")

    def u_operator(self, x: Element) -> np.ndarray:
        """Complex matrix of ``z -> 2(x∘z)∘x - x²∘z`` on the algebra basis."""
        x2 = self.product(x, x)
        cols = []
        for k in range(self.dimension):
            z = self._element(np.eye(self.dimension)[:, k])
            u = 2.0 * self.product(self.product(x, z), x) - self.product(x2, z)
            cols.append(self._coords(u))
        return np.column_stack(cols) if cols else np.zeros((0, 0), dtype=np.complex128)

    def jordan_inverse(self, x: Element, rel_tol: float = DEFAULT_REL_TOL) -> Element:
        """``y`` with ``x∘y = e`` and ``x²∘y = x``, from ``U_x(y) = x``."""
        self._require(x)
        U = self.u_operator(x)
        if U.size == 0:
            raise NotInvertibleError("the Peirce-2 algebra of the zero tripotent is trivial")
        s = np.linalg.svd(U, compute_uv=False)
        if s[-1] == 0.0 or s[0] / s[-1] > 1.0 / rel_tol:
            raise NotInvertibleError("not invertible in E2(e)")
        y = self._element(np.linalg.solve(U, self._coords(x)))
        scale = max(1.0, norm(x) * norm(y))
        r1 = norm(self.product(x, y) - self.e)
        r2 = norm(self.product(self.product(x, x), y) - x) / max(1.0, norm(x))
        if r1 > 1e-8 * scale or r2 > 1e-8 * scale:
            raise NotInvertibleError(f"inverse failed verification (residuals {r1:.2e}, {r2:.2e})")
        return y

    def is_invertible(self, x: Element, rel_tol: float = DEFAULT_REL_TOL) -> bool:
        try:
            self.jordan_inverse(x, rel_tol)
        except NotInvertibleError:
            return False
        return True

    def _selfadjoint_basis(self) -> np.ndarray:
        Rb = realify_basis(self.basis)
        J = self.involution_map()
        S = 0.5 * (Rb + J.matrix @ Rb)
        U, s, _ = np.linalg.svd(S, full_matrices=False)
        return U[:, s > 1e-6]

    def involution_map(self) -> RealLinearMap:
        return Q_operator(self.e)

    def is_positive(self, x: Element, tol: float = 1e-9) -> bool:
        """Self-adjoint and the multiplication operator has spectrum >= -tol."""
        self._require(x)
        scale = max(1.0, norm(x))
        if norm(x - self.involution(x)) > tol * scale:
            return False
        Sb = self._selfadjoint_basis()
        if Sb.shape[1] == 0:
            return True
        M = L_operator(x, self.e).matrix
        T = Sb.T @ M @ Sb
        evals = np.linalg.eigvals(T).real
        return bool(np.min(evals) >= -tol * scale)


@dataclass(frozen=True)
class BpqCertificate:
    element: Element
    regular_inverse: Element
    bergmann_norm: float
    range_complete: bool
    peirce2_invertible: bool
    bpq: bool

    def to_json(self) -> dict:
        return {
            "element": self.element.to_json(),
            "regular_inverse": self.regular_inverse.to_json(),
            "bergmann_norm": self.bergmann_norm,
            "range_complete": self.range_complete,
            "peirce2_invertible": self.peirce2_invertible,
            "bpq": self.bpq,
        }


def bp_quasi_invertible(a: Element, rel_tol: float = DEFAULT_REL_TOL) -> BpqCertificate:
    """Decide BP-quasi-invertibility along three independent routes.

    1. ``B(a, a^dagger)`` vanishes.
    2. ``r(a)`` is complete.
    3. ``a`` is positive and invertible in ``E2(e)`` for a complete ``e >= r(a)``.

    Disagreement raises ``InconsistencyError``.
    """
    inv = generalized_inverse(a, rel_tol)
    bnorm = bergmann(a, inv).norm(a.factor.real_basis)
    r = range_tripotent(a, rel_tol)
    e = complete_extension(a, rel_tol)
    alg = Peirce2Algebra(e)
    p2 = alg.contains(a) and alg.is_positive(a) and alg.is_invertible(a, rel_tol)
    routes = {"bergmann": bnorm <= BERGMANN_TOL, "range_complete": r.complete, "peirce2": p2}
    if len(set(routes.values())) != 1:
        raise InconsistencyError(f"BP-quasi-invertibility routes disagree: {routes}")
    verdict = routes["bergmann"]
    if a.factor.kind == "rectangular":
        full = numerical_rank(a.matrix, rel_tol) == min(a.factor.shape) if norm(a) > 0 else False
        if full != verdict:
            raise InconsistencyError("BP verdict disagrees with the full-rank criterion")
    return BpqCertificate(a, inv, bnorm, r.complete, p2, verdict)
