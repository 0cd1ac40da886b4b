"""Switched-system model: matrix tuples, index words, irreducibility.

Words use 1-based letters (i_1, ..., i_k); the product convention is
A(i_1, ..., i_k) = A_{i_k} @ ... @ A_{i_1}, i.e. the last letter acts last
and therefore sits leftmost in the product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import DimensionError, IndexOutOfRangeError
from .linalg import validate_matrix

Word = tuple[int, ...]


@dataclass(frozen=True)
class MatrixTuple:
    """Immutable N-tuple of d x d real matrices defining a switched system."""

    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.mats:
            raise DimensionError("a matrix tuple needs at least one matrix")
        validated = []
        dim = None
        for m in self.mats:
            a = validate_matrix(m).copy()
            a.flags.writeable = False
            if dim is None:
                dim = a.shape[0]
            elif a.shape[0] != dim:
                raise DimensionError("all matrices must share one dimension")
            validated.append(a)
        object.__setattr__(self, "mats", tuple(validated))

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    @property
    def n_mats(self) -> int:
        return len(self.mats)

    def mat(self, letter: int) -> np.ndarray:
        """Matrix for a 1-based letter."""
        if not 1 <= letter <= self.n_mats:
            raise IndexOutOfRangeError(
                f"letter {letter} outside [1, {self.n_mats}]"
            )
        return self.mats[letter - 1]

    def __iter__(self):
        return iter(self.mats)


def check_word(tpl: MatrixTuple, word: Sequence[int]) -> Word:
    w = tuple(int(i) for i in word)
    if not w:
        raise IndexOutOfRangeError("words must be nonempty")
    for i in w:
        if not 1 <= i <= tpl.n_mats:
            raise IndexOutOfRangeError(f"letter {i} outside [1, {tpl.n_mats}]")
    return w


def word_product(tpl: MatrixTuple, word: Sequence[int]) -> np.ndarray:
    """Product A_{i_k} ... A_{i_1} for the word (i_1, ..., i_k)."""
    w = check_word(tpl, word)
    out = tpl.mat(w[0]).copy()
    for letter in w[1:]:
        out = tpl.mat(letter) @ out
    return out


def canonical_rotation(word: Sequence[int]) -> Word:
    """Lexicographically least rotation of a word."""
    w = tuple(word)
    return min(tuple(w[r:] + w[:r]) for r in range(len(w)))


def minimal_period(word: Sequence[int]) -> int:
    """Smallest p with w extended periodically having period p (p divides |w|)."""
    w = tuple(word)
    k = len(w)
    for p in range(1, k + 1):
        if k % p == 0 and w == w[p:] + w[:p]:
            return p
    return k


# --------------------------------------------------------------------------
# Common invariant subspace search
# --------------------------------------------------------------------------

_RANK_TOL = 1e-10


@dataclass
class IrreducibilityVerdict:
    """Outcome of the common-invariant-subspace search.

    ``reducible`` verdicts carry an orthonormal basis of a proper nonzero
    invariant subspace; ``irreducible`` is only reported with an exhaustive
    eigenvector certificate; otherwise ``unknown``.
    """

    status: Literal["irreducible", "reducible", "unknown"]
    trials: int
    basis: Optional[np.ndarray] = None
    dimension: Optional[int] = None

    @property
    def is_reducible(self) -> bool:
        return self.status == "reducible"


def _orth_columns(m: np.ndarray, tol: float = _RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column space (SVD rank truncation)."""
    if m.size == 0:
        return m.reshape(m.shape[0], 0)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(s > tol * max(s[0], 1.0))) if s.size else 0
    return u[:, :rank]


def grow_invariant_subspace(mats: Sequence[np.ndarray], v: np.ndarray) -> np.ndarray:
    """Smallest subspace containing v and closed under every matrix.

    Returns an orthonormal basis (d x r). Iterates span growth until the
    dimension stabilizes.
    """
    d = len(v)
    basis = _orth_columns(np.asarray(v, dtype=float).reshape(d, 1))
    if basis.shape[1] == 0:
        return basis
    while True:
        images = [basis] + [a @ basis for a in mats]
        grown = _orth_columns(np.hstack(images))
        if grown.shape[1] == basis.shape[1] or grown.shape[1] == d:
            return grown
        basis = grown


def invariant_subspace_residual(
    mats: Sequence[np.ndarray], basis: np.ndarray
) -> float:
    """Max distance of A_i v from the subspace over all generators and basis vectors."""
    proj = basis @ basis.T
    worst = 0.0
    for a in mats:
        image = a @ basis
        worst = max(worst, float(np.max(np.abs(image - proj @ image))))
    return worst


def _eigenvector_candidates(m: np.ndarray, tol: float = 1e-9) -> list[np.ndarray]:
    """Real candidate vectors from the eigenvectors of m.

    Real eigenvalues contribute real eigenvectors; complex pairs contribute
    the real and imaginary parts (both lie in any real invariant subspace
    whose complexification meets the eigenline).
    """
    _, vecs = np.linalg.eig(m)
    out = []
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        for part in (np.real(v), np.imag(v)):
            nrm = np.linalg.norm(part)
            if nrm > tol:
                out.append(part / nrm)
    return out


def _short_word_products(tpl: MatrixTuple, max_len: int = 3) -> list[np.ndarray]:
    products = []
    frontier = [np.eye(tpl.dim)]
    for _ in range(max_len):
        frontier = [a @ m for m in frontier for a in tpl.mats]
        products.extend(frontier)
    # Deduplicate on rounded bytes; the exact set only feeds candidate vectors.
    seen, unique = set(), []
    for p in products:
        key = np.round(p, 12).tobytes()
        if key not in seen:
            seen.add(key)
            unique.append(p)
    return unique


def _algebra_basis(mats: Sequence[np.ndarray], d: int) -> list[np.ndarray]:
    """Basis of the (unital) algebra generated by the matrices, as matrices."""
    basis_vecs: list[np.ndarray] = []
    basis_mats: list[np.ndarray] = []

    def try_add(m: np.ndarray) -> bool:
        v = m.reshape(-1).astype(float)
        for b in basis_vecs:
            v = v - (v @ b) * b
        nrm = np.linalg.norm(v)
        if nrm <= _RANK_TOL * max(1.0, float(np.max(np.abs(m)))):
            return False
        basis_vecs.append(v / nrm)
        basis_mats.append(m)
        return True

    try_add(np.eye(d))
    queue = [np.asarray(m, dtype=float) for m in mats]
    while queue and len(basis_mats) < d * d:
        m = queue.pop(0)
        if try_add(m):
            for a in mats:
                queue.append(a @ m)
    return basis_mats


def _has_simple_spectrum(m: np.ndarray, tol: float = 1e-7) -> bool:
    vals = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(vals))))
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) <= tol * scale:
                return False
    return True


def irreducibility_check(
    tpl: MatrixTuple, trials: int = 32, seed: int = 0
) -> IrreducibilityVerdict:
    """Search for a common invariant subspace of the tuple.

    Certificate-producing for reducible tuples; for an irreducible verdict we
    require an element of the generated algebra with all-distinct eigenvalues
    whose eigenvector candidates all grow to the full space (such candidates
    are exhaustive: any proper invariant subspace contains one of them).
    Inconclusive runs report ``unknown``.
    """
    d = tpl.dim
    mats = list(tpl.mats)
    if d == 1:
        return IrreducibilityVerdict("irreducible", trials)

    products = _short_word_products(tpl)
    candidates: list[np.ndarray] = []
    for p in products:
        candidates.extend(_eigenvector_candidates(p))
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        v = rng.standard_normal(d)
        candidates.append(v / np.linalg.norm(v))

    for v in candidates:
        basis = grow_invariant_subspace(mats, v)
        if 0 < basis.shape[1] < d:
            return IrreducibilityVerdict(
                "reducible", trials, basis=basis, dimension=basis.shape[1]
            )

    # No proper subspace surfaced; look for an exhaustive certificate element.
    algebra = _algebra_basis(mats, d)
    certificate_pool = products + algebra
    for _ in range(8):
        coeffs = rng.standard_normal(len(algebra))
        certificate_pool.append(sum(c * b for c, b in zip(coeffs, algebra)))
    for m in certificate_pool:
        if not _has_simple_spectrum(m):
            continue
        if all(
            grow_invariant_subspace(mats, v).shape[1] == d
            for v in _eigenvector_candidates(m)
        ):
            return IrreducibilityVerdict("irreducible", trials)
    return IrreducibilityVerdict("unknown", trials)
