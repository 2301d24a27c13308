"""Seeded random elements, tripotents and rank-controlled samples.

Rank control works on spectral forms: ``U diag(s) V*`` for rectangular
blocks (from the SVD of a Ginibre sample), ``U diag(s) U^T`` for symmetric,
``U (s_1 J ⊕ s_2 J ⊕ ...) U^T`` for antisymmetric and ``s_1 e_1 + s_2 e_2`` for
spin blocks.  Zeroing trailing ``s`` gives rank-deficient samples directly.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .factors import Element, FactorDescriptor

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def trial_rng(seed: int, salt: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, suite salt, trial index)."""
    return np.random.default_rng([int(seed), int(salt), int(index)])


def ginibre(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(ginibre(rng, n, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _leaf_block(f: FactorDescriptor, rng) -> np.ndarray:
    if f.kind == "spin":
        return ginibre(rng, 1, f.dims[0]).ravel()
    G = ginibre(rng, *f.shape)
    if f.kind == "symmetric":
        G = 0.5 * (G + G.T)
    elif f.kind == "antisymmetric":
        G = 0.5 * (G - G.T)
    return G.ravel()


def random_element(factor: FactorDescriptor, rng: np.random.Generator) -> Element:
    """Ginibre blocks for matrix kinds (symmetrized as needed), complex normal for spin."""
    return Element(factor, np.concatenate([_leaf_block(f, rng) for f, _ in factor.leaves]))


def _spectral_block(f: FactorDescriptor, rng, values: np.ndarray) -> np.ndarray:
    """Block with prescribed spectral values (length ``f.rank``, non-increasing)."""
    from .tripotents import _spin_spectral_vector

    if f.kind == "spin":
        _, _, e1, e2 = _spin_spectral_vector(_leaf_block(f, rng))
        return values[0] * e1 + values[1] * e2
    m, n = f.shape
    if f.kind == "rectangular":
        U, _, Vh = np.linalg.svd(ginibre(rng, m, n), full_matrices=False)
        return ((U * values) @ Vh).ravel()
    U = haar_unitary(rng, n)
    if f.kind == "symmetric":
        return ((U * values) @ U.T).ravel()
    D = np.zeros((n, n))
    for j, s in enumerate(values):
        D[2 * j:2 * j + 2, 2 * j:2 * j + 2] = s * _J
    return (U @ D @ U.T).ravel()


def controlled_element(factor: FactorDescriptor, rng: np.random.Generator, *, deficit: int = 0,
                       low: float = 0.2, high: float = 1.0) -> Element:
    """Element whose non-zero spectral values lie in ``[low, high]``, with ``deficit`` of them zeroed per block."""
    if deficit < 0 or not 0 <= low <= high:
        raise ValidationError("need deficit >= 0 and 0 <= low <= high")
    out = []
    for f, _ in factor.leaves:
        vals = np.sort(rng.uniform(low, high, f.rank))[::-1]
        if deficit:
            vals[max(f.rank - deficit, 0):] = 0.0
        out.append(_spectral_block(f, rng, vals))
    return Element.projected(factor, np.concatenate(out))


def rank_deficient_element(factor: FactorDescriptor, rng: np.random.Generator, deficit: int = 1) -> Element:
    """Random element with the trailing ``deficit`` spectral values of every block set to zero."""
    if deficit < 1:
        raise ValidationError("deficit must be at least 1")
    return controlled_element(factor, rng, deficit=deficit, low=0.0, high=2.0)


def random_tripotent(factor: FactorDescriptor, rng: np.random.Generator, rank: int | None = None):
    """Certified tripotent with ``rank`` ones per block (default: full rank)."""
    from .tripotents import is_tripotent

    k = None if rank is None else int(rank)
    out = []
    for f, _ in factor.leaves:
        r = f.rank if k is None else min(k, f.rank)
        vals = np.zeros(f.rank)
        vals[:r] = 1.0
        out.append(_spectral_block(f, rng, vals))
    return is_tripotent(Element.projected(factor, np.concatenate(out)))
