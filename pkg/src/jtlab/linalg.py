"""Dense complex linear algebra: SVD, ranks, partial isometries, real-linear maps.

Complex vectors of length N are realified as length-2N real vectors with
real and imaginary parts interleaved, ``(re z0, im z0, re z1, im z1, ...)``.
Conjugate-linear operators such as ``Q(a)`` are only real-linear, so every
operator on a factor is stored as a real ``2N x 2N`` matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

DEFAULT_REL_TOL = 1e-9


def as_complex_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValidationError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError("matrix has non-finite entries")
    return A


def _check_rel_tol(rel_tol: float) -> None:
    if not 0.0 < rel_tol < 1.0:
        raise ValidationError(f"rel_tol must lie in (0, 1), got {rel_tol}")


@dataclass(frozen=True)
class SVDResult:
    """``A = left @ diag(values) @ right.conj().T`` with thin factors."""

    left: np.ndarray
    values: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left * self.values) @ self.right.conj().T


def svd(A) -> SVDResult:
    A = as_complex_matrix(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    # LAPACK already sorts, but the contract is explicit about it
    order = np.argsort(-s, kind="stable")
    return SVDResult(U[:, order], s[order], Vh[order].conj().T)


def numerical_rank(A, rel_tol: float = DEFAULT_REL_TOL) -> int:
    _check_rel_tol(rel_tol)
    s = svd(A).values
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def partial_isometry_above(A: np.ndarray, cutoff: float) -> np.ndarray:
    """Sum of ``u_i v_i^*`` over singular values strictly above ``cutoff``."""
    res = svd(A)
    keep = res.values > cutoff
    if not np.any(keep):
        return np.zeros_like(np.asarray(A, dtype=np.complex128))
    return res.left[:, keep] @ res.right[:, keep].conj().T


def polar_partial_isometry(A, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    _check_rel_tol(rel_tol)
    A = as_complex_matrix(A)
    smax = svd(A).values[0]
    if smax == 0.0:
        return np.zeros_like(A)
    return partial_isometry_above(A, rel_tol * smax)


def pseudo_inverse_above(A: np.ndarray, cutoff: float) -> np.ndarray:
    res = svd(A)
    keep = res.values > cutoff
    return (res.right[:, keep] / res.values[keep]) @ res.left[:, keep].conj().T


def operator_norm(A) -> float:
    return float(svd(A).values[0])


def realify(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def complexify(r) -> np.ndarray:
    r = np.asarray(r, dtype=np.float64)
    return r[0::2] + 1j * r[1::2]


def realify_complex_matrix(C: np.ndarray) -> np.ndarray:
    """Real matrix of the complex-linear map ``z -> C z``."""
    C = np.asarray(C, dtype=np.complex128)
    m, n = C.shape
    R = np.empty((2 * m, 2 * n))
    R[0::2, 0::2] = C.real
    R[0::2, 1::2] = -C.imag
    R[1::2, 0::2] = C.imag
    R[1::2, 1::2] = C.real
    return R


def realify_basis(B: np.ndarray) -> np.ndarray:
    """Real basis (as columns) of the realification of span(B)."""
    B = np.asarray(B, dtype=np.complex128)
    out = np.empty((2 * B.shape[0], 2 * B.shape[1]))
    for k in range(B.shape[1]):
        out[:, 2 * k] = realify(B[:, k])
        out[:, 2 * k + 1] = realify(1j * B[:, k])
    return out


class RealLinearMap:
    """Real-linear operator on the realification of C^N."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % 2:
            raise ValidationError(f"expected a 2N x 2N real matrix, got {matrix.shape}")
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] // 2

    @classmethod
    def identity(cls, dim: int) -> "RealLinearMap":
        return cls(np.eye(2 * dim))

    @classmethod
    def zero(cls, dim: int) -> "RealLinearMap":
        return cls(np.zeros((2 * dim, 2 * dim)))

    @classmethod
    def from_complex_linear(cls, C) -> "RealLinearMap":
        return cls(realify_complex_matrix(C))

    @classmethod
    def from_conjugate_linear(cls, C) -> "RealLinearMap":
        """The map ``z -> C conj(z)``."""
        R = realify_complex_matrix(C)
        R[:, 1::2] *= -1.0
        return cls(R)

    @classmethod
    def scalar(cls, dim: int, lam: complex) -> "RealLinearMap":
        return cls.from_complex_linear(lam * np.eye(dim))

    def __call__(self, z) -> np.ndarray:
        return complexify(self.matrix @ realify(z))

    def __matmul__(self, other: "RealLinearMap") -> "RealLinearMap":
        return RealLinearMap(self.matrix @ other.matrix)

    def __add__(self, other: "RealLinearMap") -> "RealLinearMap":
        return RealLinearMap(self.matrix + other.matrix)

    def __sub__(self, other: "RealLinearMap") -> "RealLinearMap":
        return RealLinearMap(self.matrix - other.matrix)

    def __neg__(self) -> "RealLinearMap":
        return RealLinearMap(-self.matrix)

    def __mul__(self, lam) -> "RealLinearMap":
        lam = complex(lam)
        if lam.imag == 0.0:
            return RealLinearMap(lam.real * self.matrix)
        return RealLinearMap.scalar(self.dim, lam) @ self

    __rmul__ = __mul__

    def is_complex_linear(self, tol: float = 1e-10) -> bool:
        J = realify_complex_matrix(1j * np.eye(self.dim))
        return bool(np.max(np.abs(self.matrix @ J - J @ self.matrix), initial=0.0) <= tol)

    def to_complex(self) -> np.ndarray:
        """Complex matrix of a complex-linear map (caller guarantees linearity)."""
        M = self.matrix
        return M[0::2, 0::2] + 1j * M[1::2, 0::2]

    def norm(self, real_basis: np.ndarray | None = None) -> float:
        """Euclidean operator norm, optionally restricted to ``span(real_basis)``."""
        M = self.matrix if real_basis is None else self.matrix @ real_basis
        if M.size == 0:
            return 0.0
        return float(np.linalg.norm(M, 2))

    def rank(self, real_basis: np.ndarray | None = None, tol: float = 1e-6) -> int:
        M = self.matrix if real_basis is None else self.matrix @ real_basis
        if M.size == 0:
            return 0
        s = np.linalg.svd(M, compute_uv=False)
        return int(np.count_nonzero(s > tol))

    def range_basis(self, real_basis: np.ndarray | None = None, tol: float = 1e-6) -> np.ndarray:
        """Orthonormal real columns spanning the range (restricted to a subspace)."""
        M = self.matrix if real_basis is None else self.matrix @ real_basis
        U, s, _ = np.linalg.svd(M, full_matrices=False)
        return U[:, s > tol]

    def __repr__(self) -> str:
        return f"RealLinearMap(dim={self.dim})"


def matrix_to_json(A) -> dict:
    A = as_complex_matrix(A)
    return {
        "rows": A.shape[0],
        "cols": A.shape[1],
        "re": A.real.tolist(),
        "im": A.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=np.float64)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise ValidationError(f"matrix entries do not match declared shape {rows}x{cols}")
    return as_complex_matrix(re + 1j * im)
