"""Dense real linear algebra at small dimension.

Eigenvalue magnitudes, induced operator norms, the simultaneous-congruence
SPD solve backing the orthogonal-similarity test, and SPD square roots.
All functions are pure and accept/return plain numpy arrays.
"""

from __future__ import annotations

import math
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .errors import (
    DimensionError,
    IllConditionedError,
    NonFiniteError,
    NotPositiveDefiniteError,
)

NormKind = Literal["one", "two", "inf"]

#: Hard cap on matrix dimension; the worked examples live at d <= 3 and
#: nothing in the package needs more than desk scale.
MAX_DIM = 64

_NORM_KINDS = ("one", "two", "inf")


def validate_matrix(m: np.ndarray) -> np.ndarray:
    """Check that ``m`` is a finite, square, float matrix of dim <= MAX_DIM.

    Returns the validated array as float64 (copying only if needed).
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {a.shape[0]} exceeds the cap {MAX_DIM}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("matrix has NaN or infinite entries")
    return a


def spectral_radius(m: np.ndarray) -> float:
    """Maximum modulus of the eigenvalues of ``m``."""
    a = validate_matrix(m)
    if not a.any():
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def induced_norm(m: np.ndarray, kind: NormKind = "two") -> float:
    """Operator norm of ``m`` induced by the l1, l2 or linf vector norm."""
    a = validate_matrix(m)
    if kind == "one":
        return float(np.max(np.sum(np.abs(a), axis=0)))
    if kind == "inf":
        return float(np.max(np.sum(np.abs(a), axis=1)))
    if kind == "two":
        # sqrt of the top eigenvalue of MᵀM; cheaper than a full SVD and
        # accurate enough at desk scale.
        top = float(np.max(np.linalg.eigvalsh(a.T @ a)))
        return math.sqrt(max(top, 0.0))
    raise ValueError(f"unknown norm kind {kind!r}; expected one of {_NORM_KINDS}")


def _sym_basis(d: int) -> list[np.ndarray]:
    """Orthonormal (Frobenius) basis of the symmetric d x d matrices."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = 1.0
        basis.append(e)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d))
            e[i, j] = inv_sqrt2
            e[j, i] = inv_sqrt2
            basis.append(e)
    return basis


def _sym_two_norm(s: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(s)))) if s.any() else 0.0


def _min_eig_and_vector(s: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eigh(s)
    return float(vals[0]), vecs[:, 0]


def _ascend_min_eigenvalue(
    mats: Sequence[np.ndarray], x0: np.ndarray, iters: int = 200
) -> np.ndarray:
    """Projected subgradient ascent for x -> lambda_min(sum x_i B_i) on the unit ball.

    The objective is concave and positively homogeneous, so the ascent is
    globally convergent; we only need a point with positive objective.
    """
    x = x0 / max(np.linalg.norm(x0), 1e-300)
    best_x, best_val = x.copy(), -np.inf
    for t in range(iters):
        q = sum(xi * b for xi, b in zip(x, mats))
        val, u = _min_eig_and_vector(q)
        if val > best_val:
            best_val, best_x = val, x.copy()
        grad = np.array([float(u @ b @ u) for b in mats])
        x = x + (0.5 / math.sqrt(t + 1.0)) * grad
        nrm = np.linalg.norm(x)
        if nrm > 1.0:
            x = x / nrm
    return best_x


def solve_spd_system(
    constraints: Iterable[tuple[np.ndarray, float]],
    tol: float = 1e-8,
) -> Optional[np.ndarray]:
    """Solve AᵀQA = c·Q simultaneously for a symmetric positive-definite Q.

    ``constraints`` is a sequence of pairs ``(A, c)``. The homogeneous system
    is reduced exactly to the nullspace of a stacked linear operator on the
    symmetric matrices; an SPD element of the nullspace is then searched for
    by deterministic candidates plus concave max-min-eigenvalue ascent.

    Returns Q normalized to trace d, or None when the nullspace holds no SPD
    matrix. Raises IllConditionedError when the numerical rank of the
    constraint operator is ambiguous at ``tol``.
    """
    pairs = [(validate_matrix(a), float(c)) for a, c in constraints]
    if not pairs:
        raise ValueError("need at least one constraint")
    d = pairs[0][0].shape[0]
    for a, _ in pairs:
        if a.shape[0] != d:
            raise DimensionError("constraint matrices must share one dimension")

    basis = _sym_basis(d)
    s = len(basis)
    rows = []
    for a, c in pairs:
        block = np.empty((s, s))
        for k, e in enumerate(basis):
            image = a.T @ e @ a - c * e
            block[:, k] = [float(np.sum(image * f)) for f in basis]
        rows.append(block)
    op = np.vstack(rows)

    _, sing, vt = np.linalg.svd(op)
    smax = sing[0] if sing.size else 0.0
    if smax <= 0.0:
        null_vecs = list(np.eye(s))
    else:
        cutoff = tol * smax
        ambiguous = np.any((sing > cutoff / 10.0) & (sing < cutoff * 10.0))
        if ambiguous:
            raise IllConditionedError(
                "singular values straddle the rank cutoff; nullspace rank ambiguous"
            )
        # op is (K*s, s) with K >= 1, so sing has exactly s entries.
        null_vecs = [vt[i] for i in range(s) if sing[i] <= cutoff]
    if not null_vecs:
        return None

    null_mats = []
    for v in null_vecs:
        q = sum(vk * e for vk, e in zip(v, basis))
        null_mats.append(0.5 * (q + q.T))

    def coords(sym: np.ndarray) -> np.ndarray:
        return np.array([float(np.sum(sym * e)) for e in basis])

    candidates: list[np.ndarray] = []
    proj_i = np.array([vec @ coords(np.eye(d)) for vec in null_vecs])
    if np.linalg.norm(proj_i) > 1e-12:
        candidates.append(proj_i)
    for i in range(len(null_mats)):
        e = np.zeros(len(null_mats))
        e[i] = 1.0
        candidates.append(e)
        candidates.append(-e)

    def assemble(x: np.ndarray) -> np.ndarray:
        q = sum(xi * b for xi, b in zip(x, null_mats))
        return 0.5 * (q + q.T)

    best_q, best_ratio = None, 0.0
    for x in candidates:
        q = assemble(x)
        top = _sym_two_norm(q)
        if top <= 0.0:
            continue
        lo, _ = _min_eig_and_vector(q)
        if lo / top > best_ratio:
            best_ratio, best_q = lo / top, q

    if best_ratio <= 1e-9 and len(null_mats) > 1:
        rng = np.random.default_rng(12345)
        starts = [c for c in candidates]
        starts += [rng.standard_normal(len(null_mats)) for _ in range(4)]
        for x0 in starts:
            x = _ascend_min_eigenvalue(null_mats, x0)
            q = assemble(x)
            top = _sym_two_norm(q)
            if top <= 0.0:
                continue
            lo, _ = _min_eig_and_vector(q)
            if lo / top > best_ratio:
                best_ratio, best_q = lo / top, q

    if best_q is None or best_ratio <= 1e-9:
        return None

    q = best_q * (d / float(np.trace(best_q)))
    qnorm = _sym_two_norm(q)
    for a, c in pairs:
        if _sym_two_norm(a.T @ q @ a - c * q) > tol * qnorm:
            return None
    return q


def spd_sqrt(q: np.ndarray) -> np.ndarray:
    """Symmetric G with GG = q for symmetric positive-definite q."""
    a = validate_matrix(q)
    qnorm = _sym_two_norm(0.5 * (a + a.T))
    if _sym_two_norm(0.5 * (a - a.T)) > 1e-10 * max(qnorm, 1.0):
        raise NotPositiveDefiniteError("input is not symmetric")
    a = 0.5 * (a + a.T)
    vals, vecs = np.linalg.eigh(a)
    if vals[0] <= 1e-12 * max(qnorm, 0.0):
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {vals[0]:.3e} is not safely positive"
        )
    g = (vecs * np.sqrt(vals)) @ vecs.T
    return 0.5 * (g + g.T)
