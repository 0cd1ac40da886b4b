"""Shared construction and brute-force oracle helpers for the test suite.

Oracles here are deliberately kept independent of the library paths they
check (plain enumeration, explicit arithmetic, direct invariance tests).
"""

import itertools

import numpy as np

from jsrlab import MarkovChain, MatrixTuple, invariant_probabilities


def example_32_tuple() -> MatrixTuple:
    """Planar three-matrix example: identity, quarter turn, scaled quarter turn."""
    a1 = np.eye(2)
    a2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    a3 = np.array([[0.0, -0.5], [1.0, 0.0]])
    return MatrixTuple((a1, a2, a3))


def example_32_chain() -> MarkovChain:
    p = np.array(
        [
            [0.5, 0.5, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
        ]
    )
    nu = np.array([0.5, 0.25, 0.25])
    return MarkovChain(p, nu)


def example_33_tuple() -> MatrixTuple:
    """3x3 pair: nilpotent shift and a rank-one closing matrix."""
    a1 = np.array(
        [
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0],
        ]
    )
    a2 = np.array(
        [
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
        ]
    )
    return MatrixTuple((a1, a2))


def uniform_iid_chain(n: int) -> MarkovChain:
    p = np.full((n, n), 1.0 / n)
    nu = np.full(n, 1.0 / n)
    return MarkovChain(p, nu)


def random_orthogonal(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_stochastic(
    rng: np.random.Generator, n: int, max_out_degree: int | None = None
) -> np.ndarray:
    """Random row-stochastic matrix, optionally with a sparse support."""
    p = np.zeros((n, n))
    for i in range(n):
        if max_out_degree is None:
            row = rng.random(n)
        else:
            deg = int(rng.integers(1, min(max_out_degree, n) + 1))
            row = np.zeros(n)
            row[rng.choice(n, size=deg, replace=False)] = rng.random(deg)
        p[i] = row / row.sum()
    return p


def random_chain_with_nu(
    rng: np.random.Generator, n: int, max_out_degree: int | None = None
) -> MarkovChain:
    """Random chain carrying a random mixture of its extreme invariant laws."""
    chain = MarkovChain(random_stochastic(rng, n, max_out_degree))
    structure = invariant_probabilities(chain)
    alphas = rng.random(len(structure.extremes))
    alphas = alphas / alphas.sum()
    return chain.with_nu(structure.mixture(alphas))


def least_rotation(word: tuple) -> tuple:
    return min(tuple(word[r:] + word[:r]) for r in range(len(word)))


def brute_simple_cycles(p: np.ndarray) -> set:
    """All simple cycles by exhaustive injective-tuple search, as rotation classes."""
    n = p.shape[0]
    found = set()
    for k in range(1, n + 1):
        for combo in itertools.permutations(range(1, n + 1), k):
            if all(p[combo[i] - 1, combo[(i + 1) % k] - 1] > 0 for i in range(k)):
                found.add(least_rotation(combo))
    return found


def brute_closed_walks(p: np.ndarray, max_len: int) -> set:
    """All closed walks up to max_len by exhaustive tuple search."""
    n = p.shape[0]
    found = set()
    for k in range(1, max_len + 1):
        for word in itertools.product(range(1, n + 1), repeat=k):
            if all(p[word[i] - 1, word[(i + 1) % k] - 1] > 0 for i in range(k)):
                found.add(word)
    return found


def char_poly_coeffs_3x3(m: np.ndarray) -> tuple[float, float, float]:
    """Coefficients (c2, c1, c0) of det(tI - M) = t^3 + c2 t^2 + c1 t + c0.

    Explicit trace/minor/determinant arithmetic; no eigensolver involved.
    """
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    minors = (
        m[1, 1] * m[2, 2]
        - m[1, 2] * m[2, 1]
        + m[0, 0] * m[2, 2]
        - m[0, 2] * m[2, 0]
        + m[0, 0] * m[1, 1]
        - m[0, 1] * m[1, 0]
    )
    det = float(np.linalg.det(m))
    return (-float(tr), float(minors), -det)
