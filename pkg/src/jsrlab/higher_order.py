"""Order-m Markov chains as sparse tensors and their order-1 lift.

A pair (nu, P) of tensors of orders m and m+1 drives switching where the
next letter depends on the previous m letters. Tensors are stored sparsely
as dicts from 1-based index tuples to probabilities; only windows reachable
from the nu-support need stochastic rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import StateExplosionError
from .markov import NU_ZERO_TOL, MarkovChain
from .system import MatrixTuple, Word, canonical_rotation, minimal_period

_SUM_TOL = 1e-12
_SHIFT_TOL = 1e-10

Window = tuple[int, ...]


def _clean_tensor(
    entries: dict, length: int, n_states: int, what: str
) -> dict[Window, float]:
    out: dict[Window, float] = {}
    for key, value in entries.items():
        idx = tuple(int(i) for i in key)
        if len(idx) != length:
            raise ValueError(f"{what} index {idx} must have length {length}")
        if any(not 1 <= i <= n_states for i in idx):
            raise ValueError(f"{what} index {idx} outside [1, {n_states}]")
        v = float(value)
        if not np.isfinite(v):
            raise ValueError(f"{what} entry {idx} is not finite")
        if v < -1e-15:
            raise ValueError(f"{what} entry {idx} is negative")
        if v > 0.0:
            out[idx] = out.get(idx, 0.0) + v
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class HigherOrderChain:
    """Shift-invariant order-m Markov switching law on sparse tensors."""

    order: int
    n_states: int
    p: dict[Window, float]
    nu: dict[Window, float]

    def __post_init__(self):
        m, n = self.order, self.n_states
        if m < 1 or n < 1:
            raise ValueError("order and n_states must be positive")
        p = _clean_tensor(self.p, m + 1, n, "transition tensor")
        nu = _clean_tensor(self.nu, m, n, "probability tensor")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "nu", nu)

        if abs(sum(nu.values()) - 1.0) > _SUM_TOL:
            raise ValueError("probability tensor must sum to 1")

        # Row sums over the support closure: every window reachable from the
        # nu-support must carry a full conditional distribution.
        rows: dict[Window, float] = {}
        for idx, value in p.items():
            rows[idx[:m]] = rows.get(idx[:m], 0.0) + value
        seen = set()
        frontier = [w for w in nu if nu[w] > NU_ZERO_TOL]
        while frontier:
            w = frontier.pop()
            if w in seen:
                continue
            seen.add(w)
            if abs(rows.get(w, 0.0) - 1.0) > _SUM_TOL:
                raise ValueError(f"reachable window {w} has row sum != 1")
            for j in self.successors(w):
                nxt = w[1:] + (j,)
                if nxt not in seen:
                    frontier.append(nxt)

        # Shift invariance: sum_i nu[i,w...] P[i,w...,j] == nu[w...,j].
        pushed: dict[Window, float] = {}
        for w, mass in nu.items():
            for j in self.successors(w):
                target = w[1:] + (j,)
                pushed[target] = pushed.get(target, 0.0) + mass * p[w + (j,)]
        for key in set(pushed) | set(nu):
            if abs(pushed.get(key, 0.0) - nu.get(key, 0.0)) > _SHIFT_TOL:
                raise ValueError("probability tensor is not shift-invariant")

    def successors(self, window: Window) -> tuple[int, ...]:
        """Letters j with P[window + (j,)] > 0, ascending."""
        return tuple(
            j for j in range(1, self.n_states + 1) if self.p.get(window + (j,), 0.0) > 0.0
        )

    def nu_support(self) -> list[Window]:
        return [w for w in self.nu if self.nu[w] > NU_ZERO_TOL]


def lift_states(n_states: int, order: int) -> list[Window]:
    """Lexicographically ordered state space of the order-1 lift."""
    return [
        tuple(w) for w in itertools.product(range(1, n_states + 1), repeat=order)
    ]


def lift_to_order_one(
    hoc: HigherOrderChain, tpl: MatrixTuple, cap: int = 4096
) -> tuple[MarkovChain, MatrixTuple]:
    """Canonical order-1 chain on N^m windows plus the matching lifted tuple.

    Lifted transitions exist only between overlapping windows; rows of
    windows absent from the tensor (necessarily unreachable from the
    nu-support) are completed with a deterministic self-successor so the
    lifted matrix is stochastic. The lifted tuple applies the last letter of
    each window.
    """
    if tpl.n_mats != hoc.n_states:
        raise ValueError("tuple size and chain state count differ")
    m, n = hoc.order, hoc.n_states
    if n**m > cap:
        raise StateExplosionError(f"{n}^{m} lifted states exceed the cap {cap}")

    states = lift_states(n, m)
    index = {w: i for i, w in enumerate(states)}
    size = len(states)

    p_hat = np.zeros((size, size))
    for idx, value in hoc.p.items():
        p_hat[index[idx[:m]], index[idx[1:]]] = value
    row_sums = p_hat.sum(axis=1)
    for i, w in enumerate(states):
        if row_sums[i] == 0.0:
            p_hat[i, index[w[1:] + (w[-1],)]] = 1.0
        elif abs(row_sums[i] - 1.0) > _SUM_TOL:
            raise ValueError(f"window {w} has partial row sum {row_sums[i]}")

    nu_hat = np.zeros(size)
    for w, value in hoc.nu.items():
        nu_hat[index[w]] = value

    lifted = MatrixTuple(tuple(tpl.mat(w[-1]) for w in states))
    return MarkovChain(p_hat, nu_hat), lifted


def distinct_window_check(word: Sequence[int], m: int) -> bool:
    """Whether the k cyclic length-m windows of the word are pairwise distinct."""
    w = tuple(word)
    k = len(w)
    if k < 1 or m < 1:
        raise ValueError("word must be nonempty and m >= 1")
    windows = {tuple(w[(j + t) % k] for t in range(m)) for j in range(k)}
    return len(windows) == k


def build_cycle_chain(
    word: Sequence[int], n_states: int, order: Optional[int] = None
) -> HigherOrderChain:
    """Deterministic chain cycling through the word.

    The word is reduced to its minimal period p; nu puts mass 1/p on the p
    cyclic windows and every transition is a unit step to the periodic
    successor. The default order is p itself; smaller orders are accepted
    whenever the windows stay pairwise distinct (required for determinism).
    """
    w = tuple(int(i) for i in word)
    if not w:
        raise ValueError("word must be nonempty")
    if any(not 1 <= i <= n_states for i in w):
        raise ValueError(f"letters outside [1, {n_states}]")
    p = minimal_period(w)
    reduced = w[:p]
    m = p if order is None else int(order)
    if m < 1:
        raise ValueError("order must be >= 1")

    windows = [
        tuple(reduced[(j + t) % p] for t in range(m)) for j in range(p)
    ]
    if len(set(windows)) != p:
        raise ValueError(
            f"windows of length {m} repeat along the cycle; "
            "use a larger order (the minimal period always works)"
        )
    nu = {win: 1.0 / p for win in windows}
    trans = {
        windows[j] + (reduced[(j + m) % p],): 1.0 for j in range(p)
    }
    return HigherOrderChain(order=m, n_states=n_states, p=trans, nu=nu)


@dataclass
class FinitenessWitness:
    """A word whose spectral-radius rate matches the deterministic bracket."""

    word: Word
    order: int
    value: float
    certified: bool


def finiteness_search(
    tpl: MatrixTuple,
    max_len: int,
    tol: float = 1e-9,
    kind: str = "two",
    bracket=None,
    budget: int = 200_000,
) -> Optional[FinitenessWitness]:
    """Search primitive necklaces up to max_len for a finiteness witness.

    A witness must match the Gripenberg lower bound; it is certified when it
    also touches the upper bound within tol, otherwise reported as an
    uncertified candidate. Returns None when no word reaches the reference
    lower bound. The witness order is the word's minimal period.
    """
    from .jsr_deterministic import jsr_gripenberg
    from .system import word_product

    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if bracket is None:
        bracket = jsr_gripenberg(tpl, tol=tol, budget=budget, kind=kind)

    best_value = -1.0
    best_word: Optional[Word] = None
    for k in range(1, max_len + 1):
        for letters in itertools.product(range(1, tpl.n_mats + 1), repeat=k):
            if canonical_rotation(letters) != letters:
                continue
            if minimal_period(letters) != k:
                continue
            radius = float(
                np.max(np.abs(np.linalg.eigvals(word_product(tpl, letters))))
            )
            value = radius ** (1.0 / k)
            if value > best_value + 1e-15:
                best_value, best_word = value, letters

    if best_word is None:
        return None
    scale = max(1.0, bracket.lower)
    if best_value < bracket.lower - 1e-12 * scale:
        return None
    certified = best_value >= bracket.upper - tol
    return FinitenessWitness(
        word=best_word,
        order=minimal_period(best_word),
        value=best_value,
        certified=certified,
    )
