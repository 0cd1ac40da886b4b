"""Order-1 Markov switching laws.

Stochastic matrices with optional invariant probabilities, the classical
recurrent/transient block decomposition, cycle and closed-walk enumeration
on the positive-transition graph, and seeded path sampling. States are
1-based everywhere on the public surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Literal, Optional, Sequence

import networkx as nx
import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import connected_components

from .errors import (
    BudgetExceededError,
    DegenerateDistributionError,
    DimensionError,
    NumericalFailureError,
)
from .linalg import spectral_radius

#: nu entries at or below this are treated as zero in positivity tests.
NU_ZERO_TOL = 1e-12

_ROW_SUM_TOL = 1e-12
_NEGATIVE_TOL = -1e-15
_STATIONARY_TOL = 1e-10


def _clamp_probabilities(a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=float).copy()
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} has non-finite entries")
    if np.any(a < _NEGATIVE_TOL):
        raise ValueError(f"{what} has negative entries beyond tolerance")
    a[a < 0.0] = 0.0
    return a


@dataclass(frozen=True)
class MarkovChain:
    """Stochastic matrix plus optional invariant probability row vector."""

    p: np.ndarray
    nu: Optional[np.ndarray] = None

    def __post_init__(self):
        p = _clamp_probabilities(self.p, "transition matrix")
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 1:
            raise DimensionError(f"transition matrix must be square, got {p.shape}")
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > _ROW_SUM_TOL:
            raise ValueError("transition matrix rows must sum to 1")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)
        if self.nu is not None:
            nu = _clamp_probabilities(self.nu, "invariant probability")
            if nu.shape != (p.shape[0],):
                raise DimensionError("invariant probability has wrong length")
            if abs(nu.sum() - 1.0) > _ROW_SUM_TOL:
                raise ValueError("invariant probability must sum to 1")
            if np.max(np.abs(nu @ p - nu)) > _STATIONARY_TOL:
                raise ValueError("nu is not invariant under p")
            nu.flags.writeable = False
            object.__setattr__(self, "nu", nu)

    @property
    def n_states(self) -> int:
        return self.p.shape[0]

    def nu_positive(self, state: int) -> bool:
        """Whether the 1-based state carries initial mass (requires nu)."""
        if self.nu is None:
            raise ValueError("chain has no invariant probability attached")
        return float(self.nu[state - 1]) > NU_ZERO_TOL

    def successors(self, state: int) -> tuple[int, ...]:
        """1-based states reachable in one positive-probability step."""
        row = self.p[state - 1]
        return tuple(int(j) + 1 for j in np.nonzero(row > 0.0)[0])

    def with_nu(self, nu: np.ndarray) -> "MarkovChain":
        return MarkovChain(self.p, nu)


# --------------------------------------------------------------------------
# Recurrent/transient decomposition
# --------------------------------------------------------------------------


@dataclass
class SccDecomposition:
    """Block decomposition of a stochastic matrix.

    ``permutation`` lists original 1-based indices in decomposed order:
    recurrent blocks first (each contiguous), transient states last.
    """

    permutation: tuple[int, ...]
    recurrent_blocks: list[tuple[tuple[int, ...], np.ndarray]]
    transient_indices: tuple[int, ...]
    transient_matrix: np.ndarray

    @property
    def n_recurrent(self) -> int:
        return len(self.recurrent_blocks)

    def permuted(self, p: np.ndarray) -> np.ndarray:
        """p reordered into the decomposed block pattern."""
        idx = np.array([i - 1 for i in self.permutation])
        return p[np.ix_(idx, idx)]


def scc_decompose(chain: MarkovChain) -> SccDecomposition:
    """Strongly-connected-component decomposition of the transition graph.

    Components without outgoing edges are the recurrent blocks; the rest form
    the transient block, whose submatrix has spectral radius < 1.
    """
    p = chain.p
    n = chain.n_states
    adj = scipy.sparse.csr_matrix((p > 0.0).astype(np.int8))
    n_comps, labels = connected_components(adj, directed=True, connection="strong")

    members: list[list[int]] = [[] for _ in range(n_comps)]
    for state, lab in enumerate(labels):
        members[lab].append(state)

    recurrent: list[list[int]] = []
    transient: list[int] = []
    for comp in range(n_comps):
        inside = np.zeros(n, dtype=bool)
        inside[members[comp]] = True
        leaks = np.any(p[np.ix_(inside, ~inside)] > 0.0) if n > len(members[comp]) else False
        if leaks:
            transient.extend(members[comp])
        else:
            recurrent.append(members[comp])
    recurrent.sort(key=min)
    transient.sort()

    blocks = []
    for idx in recurrent:
        blocks.append((tuple(i + 1 for i in idx), p[np.ix_(idx, idx)]))
    q = p[np.ix_(transient, transient)] if transient else np.zeros((0, 0))
    if transient and spectral_radius(q) >= 1.0 - 1e-12:
        raise NumericalFailureError("transient block has spectral radius >= 1")

    order = [i for idx in recurrent for i in idx] + transient
    return SccDecomposition(
        permutation=tuple(i + 1 for i in order),
        recurrent_blocks=blocks,
        transient_indices=tuple(i + 1 for i in transient),
        transient_matrix=q,
    )


@dataclass
class InvariantStructure:
    """Extreme invariant probabilities, one per recurrent block."""

    extremes: list[np.ndarray]
    blocks: list[tuple[int, ...]]

    def decompose(self, nu: np.ndarray) -> np.ndarray:
        """Coefficients alpha with nu = sum(alpha_j * extreme_j).

        Raises NumericalFailureError when nu does not reconstruct, i.e. it is
        not an invariant probability.
        """
        nu = np.asarray(nu, dtype=float)
        alphas = np.array(
            [sum(float(nu[i - 1]) for i in block) for block in self.blocks]
        )
        rebuilt = sum(a * e for a, e in zip(alphas, self.extremes))
        if np.max(np.abs(rebuilt - nu)) > _STATIONARY_TOL:
            raise NumericalFailureError("vector does not decompose over the extremes")
        return alphas

    def is_invariant(self, nu: np.ndarray) -> bool:
        try:
            self.decompose(nu)
        except NumericalFailureError:
            return False
        return True

    def mixture(self, alphas: Sequence[float]) -> np.ndarray:
        a = np.asarray(alphas, dtype=float)
        if a.shape != (len(self.extremes),) or np.any(a < 0) or abs(a.sum() - 1.0) > 1e-12:
            raise ValueError("alphas must be a probability vector over the blocks")
        return sum(ai * e for ai, e in zip(a, self.extremes))


def _block_stationary(block: np.ndarray) -> np.ndarray:
    """Unique stationary row vector of a strongly connected stochastic block."""
    k = block.shape[0]
    m = block.T - np.eye(k)
    m[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    x = np.linalg.solve(m, rhs)
    x[x < 0.0] = 0.0
    x = x / x.sum()
    if np.max(np.abs(x @ block - x)) > _STATIONARY_TOL:
        raise NumericalFailureError("stationary solve exceeded residual tolerance")
    return x


def invariant_probabilities(chain: MarkovChain) -> InvariantStructure:
    """Extreme invariant probabilities of the chain, extended by zeros to R^N."""
    dec = scc_decompose(chain)
    extremes, blocks = [], []
    for indices, block in dec.recurrent_blocks:
        local = _block_stationary(block)
        full = np.zeros(chain.n_states)
        for value, i in zip(local, indices):
            full[i - 1] = value
        extremes.append(full)
        blocks.append(indices)
    return InvariantStructure(extremes=extremes, blocks=blocks)


# --------------------------------------------------------------------------
# Cycle and closed-walk enumeration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CycleRecord:
    """A P-cycle: simple cycle or closed walk on the positive-transition graph."""

    indices: tuple[int, ...]
    kind: Literal["simple", "walk"]
    starting_index: int
    probability_positive: Optional[bool]


def _rotations(word: tuple[int, ...]) -> list[tuple[int, ...]]:
    return [word[r:] + word[:r] for r in range(len(word))]


def enumerate_simple_cycles(
    chain: MarkovChain,
    require_nu_positive: bool = False,
    cap: int = 10**6,
) -> list[CycleRecord]:
    """All simple cycles of the transition graph, one record per rotation class.

    Each cycle is reported at its lexicographically least rotation; with
    ``require_nu_positive`` only cycles having some rotation whose start
    carries nu-mass are kept, and the record stores such a qualifying start.
    """
    if require_nu_positive and chain.nu is None:
        raise ValueError("nu-filtered enumeration needs an invariant probability")
    graph = nx.DiGraph()
    graph.add_nodes_from(range(1, chain.n_states + 1))
    for i in range(1, chain.n_states + 1):
        for j in chain.successors(i):
            graph.add_edge(i, j)

    records = []
    count = 0
    for nodes in nx.simple_cycles(graph):
        count += 1
        if count > cap:
            raise BudgetExceededError(f"simple cycle count exceeds cap {cap}")
        rotations = sorted(_rotations(tuple(nodes)))
        canonical = rotations[0]
        if chain.nu is None:
            records.append(CycleRecord(canonical, "simple", canonical[0], None))
            continue
        qualifying = next(
            (rot for rot in rotations if chain.nu_positive(rot[0])), None
        )
        if require_nu_positive:
            if qualifying is None:
                continue
            records.append(CycleRecord(qualifying, "simple", qualifying[0], True))
        else:
            records.append(
                CycleRecord(canonical, "simple", canonical[0], qualifying is not None)
            )
    records.sort(key=lambda r: (len(r.indices), r.indices))
    return records


def enumerate_closed_walks(
    chain: MarkovChain,
    max_len: int,
    require_nu_positive: bool = False,
) -> Iterator[CycleRecord]:
    """Stream all closed walks of length <= max_len from each admissible start.

    Walks are P-cycles in the paper's sense: indices may repeat, every
    consecutive transition and the closing transition have positive
    probability. Rotations are distinct walks and are all emitted.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if require_nu_positive and chain.nu is None:
        raise ValueError("nu-filtered enumeration needs an invariant probability")

    starts = [
        s
        for s in range(1, chain.n_states + 1)
        if not require_nu_positive or chain.nu_positive(s)
    ]

    def walk_from(start: int) -> Iterator[tuple[int, ...]]:
        path = [start]

        def rec() -> Iterator[tuple[int, ...]]:
            last = path[-1]
            if chain.p[last - 1, start - 1] > 0.0:
                yield tuple(path)
            if len(path) < max_len:
                for nxt in chain.successors(last):
                    path.append(nxt)
                    yield from rec()
                    path.pop()

        yield from rec()

    for start in starts:
        positive = chain.nu_positive(start) if chain.nu is not None else None
        for walk in walk_from(start):
            yield CycleRecord(walk, "walk", start, positive)


def sample_path(chain: MarkovChain, horizon: int, seed: int) -> tuple[int, ...]:
    """Sample i_1 ~ nu and i_{t+1} ~ P[i_t, :]; deterministic per seed."""
    if chain.nu is None:
        raise ValueError("sampling needs an invariant probability")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    return _sample_with(chain, horizon, rng)


def _sample_with(
    chain: MarkovChain, horizon: int, rng: np.random.Generator
) -> tuple[int, ...]:
    nu = np.asarray(chain.nu, dtype=float)
    total = nu.sum()
    if total <= NU_ZERO_TOL:
        raise DegenerateDistributionError("initial distribution has no mass")
    letters = [int(rng.choice(chain.n_states, p=nu / total)) + 1]
    for _ in range(horizon - 1):
        row = chain.p[letters[-1] - 1]
        total = row.sum()
        if total <= NU_ZERO_TOL:
            raise DegenerateDistributionError(
                f"row {letters[-1]} has no outgoing mass"
            )
        letters.append(int(rng.choice(chain.n_states, p=row / total)) + 1)
    return tuple(letters)
