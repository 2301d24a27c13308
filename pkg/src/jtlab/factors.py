"""Finite-dimensional Cartan factors and their triple products.

Matrix kinds (rectangular, symmetric, antisymmetric) share the product
``{a,b,c} = (a b* c + c b* a) / 2``; symmetric and antisymmetric elements are
stored as full ``n x n`` matrices.  Spin factors use

    {x,y,z} = <x/y> z + <z/y> x - <x/conj z> conj y,  <x/y> = sum x_j conj(y_j)

with componentwise conjugation.  Direct sums act summand-wise and carry the
max norm.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import FactorMismatchError, ValidationError
from .linalg import RealLinearMap, operator_norm, realify_basis

KINDS = ("rectangular", "symmetric", "antisymmetric", "spin", "direct_sum")
_SHORT = {"rect": "rectangular", "sym": "symmetric", "asym": "antisymmetric", "spin": "spin"}


@dataclass(frozen=True)
class FactorDescriptor:
    kind: str
    dims: tuple[int, ...] = ()
    summands: tuple["FactorDescriptor", ...] = ()

    def __post_init__(self):
        k, d = self.kind, self.dims
        if k not in KINDS:
            raise ValidationError(f"unknown factor kind {k!r}")
        if k == "rectangular":
            ok = len(d) == 2 and min(d) >= 1
        elif k == "symmetric":
            ok = len(d) == 1 and d[0] >= 1
        elif k == "antisymmetric":
            ok = len(d) == 1 and d[0] >= 2
        elif k == "spin":
            ok = len(d) == 1 and d[0] >= 2
        else:
            ok = len(self.summands) >= 1 and not d
        if not ok or (k != "direct_sum" and self.summands):
            raise ValidationError(f"invalid dimensions for {k}: dims={d}, summands={len(self.summands)}")

    # --- layout -------------------------------------------------------
    @cached_property
    def leaves(self) -> tuple[tuple["FactorDescriptor", int], ...]:
        """Non-sum summands with their coordinate offsets, in storage order."""
        out, off = [], 0
        stack = [self]
        flat = []
        while stack:
            f = stack.pop(0)
            if f.kind == "direct_sum":
                stack = list(f.summands) + stack
            else:
                flat.append(f)
        for f in flat:
            out.append((f, off))
            off += f.leaf_size
        return tuple(out)

    @property
    def leaf_size(self) -> int:
        if self.kind == "rectangular":
            return self.dims[0] * self.dims[1]
        if self.kind in ("symmetric", "antisymmetric"):
            return self.dims[0] ** 2
        if self.kind == "spin":
            return self.dims[0]
        raise ValidationError("direct sums have no leaf size")

    @cached_property
    def ambient_dim(self) -> int:
        return sum(f.leaf_size for f, _ in self.leaves)

    @cached_property
    def blocks(self) -> np.ndarray:
        """Kernel block table: rows of ``(kind, offset, rows, cols)``."""
        rows = []
        for f, off in self.leaves:
            if f.kind == "spin":
                rows.append((_kernels.SPIN, off, f.dims[0], 1))
            else:
                m, n = f.shape
                rows.append((_kernels.MATRIX, off, m, n))
        return np.asarray(rows, dtype=np.int64)

    @property
    def shape(self) -> tuple[int, int]:
        if self.kind == "rectangular":
            return self.dims
        if self.kind in ("symmetric", "antisymmetric"):
            return (self.dims[0], self.dims[0])
        raise ValidationError(f"{self.kind} factor has no matrix shape")

    @property
    def is_matrix(self) -> bool:
        return self.kind in ("rectangular", "symmetric", "antisymmetric")

    @cached_property
    def basis(self) -> np.ndarray:
        """Orthonormal complex basis of the factor inside C^ambient_dim (columns)."""
        cols = []
        N = self.ambient_dim
        for f, off in self.leaves:
            for v in _leaf_basis(f):
                col = np.zeros(N, dtype=np.complex128)
                col[off:off + v.size] = v
                cols.append(col)
        return np.column_stack(cols)

    @cached_property
    def real_basis(self) -> np.ndarray:
        return realify_basis(self.basis)

    @property
    def dimension(self) -> int:
        """Complex dimension of the factor."""
        return self.basis.shape[1]

    @cached_property
    def _projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def project(self, coords) -> np.ndarray:
        """Orthogonal projection of ambient coordinates onto the factor."""
        return self._projector @ np.asarray(coords, dtype=np.complex128)

    @property
    def rank(self) -> int:
        if self.kind == "rectangular":
            return min(self.dims)
        if self.kind == "symmetric":
            return self.dims[0]
        if self.kind == "antisymmetric":
            return self.dims[0] // 2
        if self.kind == "spin":
            return 2
        return sum(s.rank for s in self.summands)

    def shorthand(self) -> str:
        if self.kind == "rectangular":
            return f"rect:{self.dims[0]},{self.dims[1]}"
        if self.kind == "symmetric":
            return f"sym:{self.dims[0]}"
        if self.kind == "antisymmetric":
            return f"asym:{self.dims[0]}"
        if self.kind == "spin":
            return f"spin:{self.dims[0]}"
        return "sum:" + ",".join(s.shorthand() for s in self.summands)

    def __str__(self) -> str:
        return self.shorthand()

    def to_json(self) -> dict:
        if self.kind == "rectangular":
            return {"kind": self.kind, "m": self.dims[0], "n": self.dims[1]}
        if self.kind in ("symmetric", "antisymmetric"):
            return {"kind": self.kind, "n": self.dims[0]}
        if self.kind == "spin":
            return {"kind": self.kind, "d": self.dims[0]}
        return {"kind": self.kind, "summands": [s.to_json() for s in self.summands]}

    @classmethod
    def from_json(cls, obj: dict) -> "FactorDescriptor":
        try:
            kind = obj["kind"]
            if kind == "rectangular":
                return rectangular(int(obj["m"]), int(obj["n"]))
            if kind == "symmetric":
                return symmetric(int(obj["n"]))
            if kind == "antisymmetric":
                return antisymmetric(int(obj["n"]))
            if kind == "spin":
                return spin(int(obj["d"]))
            if kind == "direct_sum":
                return direct_sum(*(cls.from_json(s) for s in obj["summands"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed factor descriptor: {exc}") from exc
        raise ValidationError(f"unknown factor kind {obj.get('kind')!r}")


def rectangular(m: int, n: int) -> FactorDescriptor:
    return FactorDescriptor("rectangular", (int(m), int(n)))


def symmetric(n: int) -> FactorDescriptor:
    return FactorDescriptor("symmetric", (int(n),))


def antisymmetric(n: int) -> FactorDescriptor:
    return FactorDescriptor("antisymmetric", (int(n),))


def spin(d: int) -> FactorDescriptor:
    return FactorDescriptor("spin", (int(d),))


def direct_sum(*summands: FactorDescriptor) -> FactorDescriptor:
    return FactorDescriptor("direct_sum", (), tuple(summands))


def _leaf_basis(f: FactorDescriptor) -> Iterable[np.ndarray]:
    if f.kind in ("rectangular", "spin"):
        yield from np.eye(f.leaf_size, dtype=np.complex128)
        return
    n = f.dims[0]
    sign = 1.0 if f.kind == "symmetric" else -1.0
    for i in range(n):
        for j in range(i, n):
            W = np.zeros((n, n), dtype=np.complex128)
            if i == j:
                if f.kind == "antisymmetric":
                    continue
                W[i, i] = 1.0
            else:
                W[i, j] = 1.0 / np.sqrt(2.0)
                W[j, i] = sign / np.sqrt(2.0)
            yield W.ravel()


def parse_factor(text: str) -> FactorDescriptor:
    """Parse ``rect:m,n | sym:n | asym:n | spin:d | sum:<factor>,<factor>``.

    Inside ``sum:`` a summand may carry a repeat count, e.g. ``sum:3*rect:1,2``.
    """
    text = text.strip()
    if text.startswith("sum:"):
        body = text[4:]
        parts = re.split(r",(?=\s*(?:\d+\*)?(?:rect|sym|asym|spin):)", body)
        summands = []
        for part in parts:
            m = re.fullmatch(r"\s*(\d+)\*(.+)", part)
            count, item = (int(m.group(1)), m.group(2)) if m else (1, part)
            summands.extend([parse_factor(item)] * count)
        if not summands or any(not p.strip() for p in parts):
            raise ValidationError(f"empty summand in {text!r}")
        return direct_sum(*summands)
    m = re.fullmatch(r"(rect|sym|asym|spin):\s*(\d+)\s*(?:,\s*(\d+))?", text)
    if not m:
        raise ValidationError(f"cannot parse factor shorthand {text!r}")
    kind, a, b = _SHORT[m.group(1)], int(m.group(2)), m.group(3)
    if kind == "rectangular":
        if b is None:
            raise ValidationError("rect needs two dimensions, e.g. rect:2,3")
        return rectangular(a, int(b))
    if b is not None:
        raise ValidationError(f"{m.group(1)} takes one dimension")
    return {"symmetric": symmetric, "antisymmetric": antisymmetric, "spin": spin}[kind](a)


class Element:
    """A point of a factor, stored as ambient complex coordinates."""

    __slots__ = ("factor", "coords")

    def __init__(self, factor: FactorDescriptor, coords, *, check: bool = True):
        coords = np.array(coords, dtype=np.complex128).ravel()
        if check:
            if coords.size != factor.ambient_dim:
                raise ValidationError(
                    f"{factor}: expected {factor.ambient_dim} coordinates, got {coords.size}")
            if not np.all(np.isfinite(coords)):
                raise ValidationError("element has non-finite coordinates")
            scale = max(1.0, float(np.max(np.abs(coords), initial=0.0)))
            for f, off in factor.leaves:
                if f.kind in ("symmetric", "antisymmetric"):
                    X = coords[off:off + f.leaf_size].reshape(f.shape)
                    sign = 1.0 if f.kind == "symmetric" else -1.0
                    if np.max(np.abs(X - sign * X.T)) > 1e-12 * scale:
                        raise ValidationError(f"coordinates violate the {f.kind} constraint")
        coords.setflags(write=False)
        self.factor = factor
        self.coords = coords

    @classmethod
    def zero(cls, factor: FactorDescriptor) -> "Element":
        return cls(factor, np.zeros(factor.ambient_dim), check=False)

    @classmethod
    def from_matrix(cls, factor: FactorDescriptor, X) -> "Element":
        return cls(factor, np.asarray(X, dtype=np.complex128).ravel())

    @classmethod
    def from_blocks(cls, factor: FactorDescriptor, blocks) -> "Element":
        return cls(factor, np.concatenate([np.asarray(b, dtype=np.complex128).ravel() for b in blocks]))

    @classmethod
    def projected(cls, factor: FactorDescriptor, coords) -> "Element":
        """Element nearest (ambient metric) to possibly off-factor coordinates."""
        return cls(factor, factor.project(coords), check=False)

    @property
    def matrix(self) -> np.ndarray:
        if not self.factor.is_matrix:
            raise ValidationError(f"{self.factor} elements are not single matrices")
        return self.coords.reshape(self.factor.shape)

    def blocks(self) -> list[np.ndarray]:
        """Per-summand views: matrices for matrix kinds, vectors for spin."""
        out = []
        for f, off in self.factor.leaves:
            v = self.coords[off:off + f.leaf_size]
            out.append(v.reshape(f.shape) if f.is_matrix else v)
        return out

    def _same(self, other: "Element") -> None:
        if other.factor != self.factor:
            raise FactorMismatchError(f"factor mismatch: {self.factor} vs {other.factor}")

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.factor, self.coords + other.coords, check=False)

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.factor, self.coords - other.coords, check=False)

    def __neg__(self) -> "Element":
        return Element(self.factor, -self.coords, check=False)

    def __mul__(self, lam) -> "Element":
        return Element(self.factor, complex(lam) * self.coords, check=False)

    __rmul__ = __mul__

    def __truediv__(self, lam) -> "Element":
        return Element(self.factor, self.coords / complex(lam), check=False)

    def conj(self) -> "Element":
        return Element(self.factor, self.coords.conj(), check=False)

    def euclidean_norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def allclose(self, other: "Element", atol: float = 1e-10) -> bool:
        self._same(other)
        return bool(np.max(np.abs(self.coords - other.coords), initial=0.0) <= atol)

    def to_json(self) -> dict:
        return {
            "factor": self.factor.to_json(),
            "re": self.coords.real.tolist(),
            "im": self.coords.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Element":
        try:
            factor = FactorDescriptor.from_json(obj["factor"])
            re_ = np.asarray(obj["re"], dtype=np.float64).ravel()
            im_ = np.asarray(obj.get("im", np.zeros_like(re_)), dtype=np.float64).ravel()
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed element object: {exc}") from exc
        if re_.shape != im_.shape:
            raise ValidationError("re and im have different lengths")
        return cls(factor, re_ + 1j * im_)

    def __repr__(self) -> str:
        return f"Element({self.factor}, {np.array2string(self.coords, precision=4)})"


def inner(x: Element, y: Element) -> complex:
    """Ambient inner product, linear in the first slot."""
    x._same(y)
    return complex(np.vdot(y.coords, x.coords))


def _triple_raw(factor: FactorDescriptor, x, y, z) -> np.ndarray:
    out = np.empty(factor.ambient_dim, dtype=np.complex128)
    for f, off in factor.leaves:
        sl = slice(off, off + f.leaf_size)
        if f.kind == "spin":
            xs, ys, zs = x[sl], y[sl], z[sl]
            yc = ys.conj()
            out[sl] = (xs @ yc) * zs + (zs @ yc) * xs - (xs @ zs) * yc
        else:
            X, Y, Z = (v[sl].reshape(f.shape) for v in (x, y, z))
            Yh = Y.conj().T
            out[sl] = (0.5 * (X @ Yh @ Z + Z @ Yh @ X)).ravel()
    return out


def triple_product(x: Element, y: Element, z: Element) -> Element:
    x._same(y)
    x._same(z)
    return Element(x.factor, _triple_raw(x.factor, x.coords, y.coords, z.coords), check=False)


def spin_invariants(v: np.ndarray) -> tuple[float, complex]:
    """``(<v/v>, <v/conj v>)`` for a spin vector."""
    return float(np.vdot(v, v).real), complex(v @ v)


def spin_norm(v: np.ndarray) -> float:
    s, t = spin_invariants(v)
    return float(np.sqrt(s + np.sqrt(max(s * s - abs(t) ** 2, 0.0))))


def leaf_norms(x: Element) -> list[float]:
    out = []
    for (f, _), block in zip(x.factor.leaves, x.blocks()):
        out.append(spin_norm(block) if f.kind == "spin" else operator_norm(block))
    return out


def norm(x: Element) -> float:
    return max(leaf_norms(x))


def _complex_matrix_of(fn, N: int) -> np.ndarray:
    """Columns ``fn(e_j)`` for the standard basis of C^N."""
    C = np.empty((N, N), dtype=np.complex128)
    for j in range(N):
        e = np.zeros(N, dtype=np.complex128)
        e[j] = 1.0
        C[:, j] = fn(e)
    return C


def L_operator(x: Element, y: Element) -> RealLinearMap:
    """``z -> {x, y, z}`` (complex-linear)."""
    x._same(y)
    f = x.factor
    C = _complex_matrix_of(lambda e: _triple_raw(f, x.coords, y.coords, e), f.ambient_dim)
    return RealLinearMap.from_complex_linear(C)


def Q_operator(a: Element) -> RealLinearMap:
    """``z -> {a, z, a}`` (conjugate-linear)."""
    f = a.factor
    # Q(a) e_j = C e_j because conj(e_j) = e_j
    C = _complex_matrix_of(lambda e: _triple_raw(f, a.coords, e, a.coords), f.ambient_dim)
    return RealLinearMap.from_conjugate_linear(C)


def bergmann(a: Element, b: Element) -> RealLinearMap:
    a._same(b)
    ident = RealLinearMap.identity(a.factor.ambient_dim)
    return ident - 2.0 * L_operator(a, b) + Q_operator(a) @ Q_operator(b)


def apply(T: RealLinearMap, x: Element) -> Element:
    return Element(x.factor, T(x.coords), check=False)


def matrix_unit(factor: FactorDescriptor, i: int, j: int, *, block: int = 0) -> Element:
    """``w_ij`` (0-based) placed in summand ``block`` of a matrix factor."""
    f, off = factor.leaves[block]
    m, n = f.shape
    coords = np.zeros(factor.ambient_dim, dtype=np.complex128)
    coords[off + i * n + j] = 1.0
    return Element(factor, coords)


def canonical_complete_tripotent(factor: FactorDescriptor) -> Element:
    """Deterministic complete tripotent: sum of diagonal units (paired for antisymmetric)."""
    coords = np.zeros(factor.ambient_dim, dtype=np.complex128)
    for f, off in factor.leaves:
        if f.kind == "spin":
            coords[off] = 1.0
            continue
        m, n = f.shape
        W = np.zeros((m, n), dtype=np.complex128)
        if f.kind == "antisymmetric":
            for k in range(n // 2):
                W[2 * k, 2 * k + 1] = 1.0
                W[2 * k + 1, 2 * k] = -1.0
        else:
            for k in range(min(m, n)):
                W[k, k] = 1.0
        coords[off:off + f.leaf_size] = W.ravel()
    return Element(factor, coords)
