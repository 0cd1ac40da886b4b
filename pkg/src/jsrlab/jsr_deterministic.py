"""Deterministic joint spectral radius: brackets and extremal-norm diagnostics.

Lower bounds come from spectral radii of word products (valid at every
length), upper bounds from max norms of fixed-length products; the
Gripenberg search refines both with branch-and-bound pruning.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import BudgetExceededError
from .linalg import NormKind, induced_norm
from .system import MatrixTuple, Word, canonical_rotation

_CHUNK = 4096


def _batch_norms(stack: np.ndarray, kind: NormKind) -> np.ndarray:
    """Induced norms of a (B, d, d) stack."""
    if kind == "one":
        return np.abs(stack).sum(axis=1).max(axis=1)
    if kind == "inf":
        return np.abs(stack).sum(axis=2).max(axis=1)
    gram = np.swapaxes(stack, 1, 2) @ stack
    top = np.linalg.eigvalsh(gram)[:, -1]
    return np.sqrt(np.clip(top, 0.0, None))


def _batch_spectral_radii(stack: np.ndarray) -> np.ndarray:
    return np.abs(np.linalg.eigvals(stack)).max(axis=1)


@dataclass
class JsrBracket:
    """Enclosure lower <= rho_d <= upper with the witnessing word for lower."""

    lower: float
    upper: float
    lower_witness: Word
    upper_horizon: int
    norm_kind: NormKind
    exhausted: bool = False

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _iter_nodes(tpl: MatrixTuple, horizon: int) -> Iterator[tuple[Word, np.ndarray]]:
    """All words of length 1..horizon with their products, in DFS preorder."""
    word: list[int] = []

    def rec(product: np.ndarray) -> Iterator[tuple[Word, np.ndarray]]:
        yield tuple(word), product
        if len(word) < horizon:
            for letter in range(1, tpl.n_mats + 1):
                word.append(letter)
                yield from rec(tpl.mat(letter) @ product)
                word.pop()

    for letter in range(1, tpl.n_mats + 1):
        word.append(letter)
        yield from rec(tpl.mat(letter))
        word.pop()


def jsr_bounds_bruteforce(
    tpl: MatrixTuple,
    horizon: int,
    kind: NormKind = "two",
    cap: int = 10**7,
) -> JsrBracket:
    """Exhaustive bracket at a fixed horizon.

    upper: max over words of length exactly `horizon` of norm(A(w))^(1/horizon);
    lower: max over canonical rotations of length <= horizon of
    rho(A(w))^(1/len), with the witnessing word.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if tpl.n_mats**horizon > cap:
        raise BudgetExceededError(
            f"{tpl.n_mats}^{horizon} words exceed the enumeration cap {cap}"
        )

    best_lower = -1.0
    witness: Word = (1,)
    upper = 0.0

    canon_words: list[Word] = []
    canon_mats: list[np.ndarray] = []
    leaf_mats: list[np.ndarray] = []

    def flush_canon():
        nonlocal best_lower, witness
        if not canon_mats:
            return
        radii = _batch_spectral_radii(np.stack(canon_mats))
        lengths = np.array([len(w) for w in canon_words], dtype=float)
        values = radii ** (1.0 / lengths)
        for w, v in zip(canon_words, values):
            if v > best_lower:
                best_lower = float(v)
                witness = w
        canon_words.clear()
        canon_mats.clear()

    def flush_leaves():
        nonlocal upper
        if not leaf_mats:
            return
        norms = _batch_norms(np.stack(leaf_mats), kind)
        upper = max(upper, float(np.max(norms)) ** (1.0 / horizon))
        leaf_mats.clear()

    for word, product in _iter_nodes(tpl, horizon):
        if canonical_rotation(word) == word:
            canon_words.append(word)
            canon_mats.append(product)
            if len(canon_mats) >= _CHUNK:
                flush_canon()
        if len(word) == horizon:
            leaf_mats.append(product)
            if len(leaf_mats) >= _CHUNK:
                flush_leaves()
    flush_canon()
    flush_leaves()

    return JsrBracket(
        lower=best_lower,
        upper=upper,
        lower_witness=witness,
        upper_horizon=horizon,
        norm_kind=kind,
    )


def jsr_gripenberg(
    tpl: MatrixTuple,
    tol: float = 1e-9,
    budget: int = 100_000,
    kind: NormKind = "two",
) -> JsrBracket:
    """Best-first branch-and-bound refinement of the joint-spectral-radius bracket.

    A node's optimistic value sigma(w) = min over prefixes j of
    norm(A(i_1..i_j))^(1/j); branches with sigma <= lower + tol cannot improve
    the bracket beyond tol and are pruned. On a drained frontier the bracket
    has width <= tol; on budget exhaustion the best valid bracket so far is
    returned with ``exhausted`` set.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    best_lower = -1.0
    witness: Word = (1,)
    examined = 0
    deepest = 1

    heap: list[tuple[float, Word, np.ndarray, float]] = []
    for letter in range(1, tpl.n_mats + 1):
        product = tpl.mat(letter).copy()
        sigma = induced_norm(product, kind)
        value = float(np.max(np.abs(np.linalg.eigvals(product)))) if product.any() else 0.0
        examined += 1
        if value > best_lower:
            best_lower, witness = value, (letter,)
        heapq.heappush(heap, (-sigma, (letter,), product, sigma))

    exhausted = False
    while heap:
        top_sigma = -heap[0][0]
        if top_sigma <= best_lower + tol:
            heap.clear()
            break
        if examined + tpl.n_mats > budget:
            exhausted = True
            break
        _, word, product, sigma = heapq.heappop(heap)
        k = len(word) + 1
        deepest = max(deepest, k)
        for letter in range(1, tpl.n_mats + 1):
            examined += 1
            child = tpl.mat(letter) @ product
            child_word = word + (letter,)
            child_sigma = min(sigma, induced_norm(child, kind) ** (1.0 / k))
            radius = (
                float(np.max(np.abs(np.linalg.eigvals(child)))) if child.any() else 0.0
            )
            value = radius ** (1.0 / k)
            if value > best_lower:
                best_lower, witness = value, child_word
            if child_sigma > best_lower + tol:
                heapq.heappush(heap, (-child_sigma, child_word, child, child_sigma))

    alive = max((-item[0] for item in heap), default=0.0)
    upper = max(best_lower + tol, alive) if heap else best_lower + tol
    return JsrBracket(
        lower=best_lower,
        upper=upper,
        lower_witness=witness,
        upper_horizon=deepest,
        norm_kind=kind,
        exhausted=exhausted,
    )


@dataclass
class BarabanovApprox:
    """Finite-depth approximation of an extremal (Barabanov-style) norm.

    evaluate(x) = max over words w with |w| <= depth of
    scale^(-|w|) * norm(A(w) x), the empty word contributing norm(x).
    """

    depth: int
    scale: float
    norm_kind: NormKind
    products: np.ndarray = field(repr=False)  # (B, d, d), scale-normalized

    def evaluate(self, x: np.ndarray) -> float:
        v = np.asarray(x, dtype=float).reshape(-1)
        best = _vector_norm(v, self.norm_kind)
        if self.products.shape[0]:
            images = self.products @ v
            if self.norm_kind == "one":
                norms = np.abs(images).sum(axis=1)
            elif self.norm_kind == "inf":
                norms = np.abs(images).max(axis=1)
            else:
                norms = np.sqrt((images * images).sum(axis=1))
            best = max(best, float(np.max(norms)))
        return best

    __call__ = evaluate


def _vector_norm(v: np.ndarray, kind: NormKind) -> float:
    if kind == "one":
        return float(np.abs(v).sum())
    if kind == "inf":
        return float(np.abs(v).max())
    return float(np.linalg.norm(v))


def barabanov_approx(
    tpl: MatrixTuple,
    scale: float,
    depth: int,
    kind: NormKind = "two",
    cap: int = 200_000,
) -> BarabanovApprox:
    """Depth-limited extremal-norm evaluator at normalization ``scale``."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    total = sum(tpl.n_mats**k for k in range(1, depth + 1))
    if total > cap:
        raise BudgetExceededError(f"{total} products exceed the cap {cap}")

    products: list[np.ndarray] = []
    level = [np.eye(tpl.dim)]
    for _ in range(depth):
        level = [(a @ m) / scale for m in level for a in tpl.mats]
        products.extend(level)
    stack = (
        np.stack(products) if products else np.zeros((0, tpl.dim, tpl.dim))
    )
    return BarabanovApprox(depth=depth, scale=scale, norm_kind=kind, products=stack)
