"""Probabilistic joint spectral radius: exact finite-horizon expectations,
curve-derived upper bounds and seeded Monte-Carlo estimates.

E_n is the expectation of norm(A_{i_n} ... A_{i_1})^(1/n) over (nu, P)-words
of length n; its infimum over n equals the probabilistic joint spectral
radius, so every exact E_n (and the curve minimum in particular) is a valid
upper bound.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from .errors import BudgetExceededError, DegenerateDistributionError
from .higher_order import HigherOrderChain
from .linalg import NormKind, induced_norm
from .markov import NU_ZERO_TOL, MarkovChain, _sample_with
from .system import MatrixTuple, word_product

Chain = Union[MarkovChain, HigherOrderChain]


def max_threads() -> int:
    """Worker cap from JSRLAB_THREADS (default 1); results never depend on it."""
    try:
        return max(1, int(os.environ.get("JSRLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ExpectationCurve:
    """Exact expectation values E_n over a range of horizons."""

    horizons: list[int]
    values: list[float]
    norm_kind: NormKind
    exact: bool = True

    def minimum(self) -> float:
        return min(self.values)


@dataclass
class McEstimate:
    """Monte-Carlo estimate of the E_n summand over sampled paths."""

    horizon: int
    samples: int
    mean: float
    stderr: float
    seed: int


def _terms_order_one(
    tpl: MatrixTuple, chain: MarkovChain, n: int, kind: NormKind, cap: int
) -> Iterator[float]:
    if chain.nu is None:
        raise ValueError("exact expectation needs an invariant probability")
    inv_n = 1.0 / n
    count = 0

    def rec(state: int, depth: int, prob: float, product: np.ndarray) -> Iterator[float]:
        nonlocal count
        if depth == n:
            count += 1
            if count > cap:
                raise BudgetExceededError(
                    f"positive-probability words exceed the cap {cap}"
                )
            yield prob * induced_norm(product, kind) ** inv_n
            return
        row = chain.p[state - 1]
        for nxt in chain.successors(state):
            yield from rec(
                nxt, depth + 1, prob * float(row[nxt - 1]), tpl.mat(nxt) @ product
            )

    for start in range(1, chain.n_states + 1):
        mass = float(chain.nu[start - 1])
        if mass > NU_ZERO_TOL:
            yield from rec(start, 1, mass, tpl.mat(start))


def _terms_higher_order(
    tpl: MatrixTuple, hoc: HigherOrderChain, n: int, kind: NormKind, cap: int
) -> Iterator[float]:
    inv_n = 1.0 / n
    m = hoc.order
    count = 0

    if n <= m:
        # Marginalize nu over windows sharing the first n letters.
        prefix_mass: dict[tuple[int, ...], float] = {}
        for window in hoc.nu_support():
            key = window[:n]
            prefix_mass[key] = prefix_mass.get(key, 0.0) + hoc.nu[window]
        for prefix in sorted(prefix_mass):
            count += 1
            if count > cap:
                raise BudgetExceededError(
                    f"positive-probability words exceed the cap {cap}"
                )
            yield prefix_mass[prefix] * induced_norm(
                word_product(tpl, prefix), kind
            ) ** inv_n
        return

    def rec(
        window: tuple[int, ...], depth: int, prob: float, product: np.ndarray
    ) -> Iterator[float]:
        nonlocal count
        if depth == n:
            count += 1
            if count > cap:
                raise BudgetExceededError(
                    f"positive-probability words exceed the cap {cap}"
                )
            yield prob * induced_norm(product, kind) ** inv_n
            return
        for letter in hoc.successors(window):
            yield from rec(
                window[1:] + (letter,),
                depth + 1,
                prob * hoc.p[window + (letter,)],
                tpl.mat(letter) @ product,
            )

    for window in sorted(hoc.nu_support()):
        yield from rec(window, m, hoc.nu[window], word_product(tpl, window))


def exact_expectation(
    tpl: MatrixTuple,
    chain: Chain,
    n: int,
    kind: NormKind = "two",
    cap: int = 10**7,
) -> float:
    """Exact E_n by depth-first summation over positive-probability words.

    Terms are accumulated with exact summation (math.fsum), so the result is
    independent of enumeration order up to one final rounding.
    """
    if n < 1:
        raise ValueError("horizon must be >= 1")
    if isinstance(chain, HigherOrderChain):
        if tpl.n_mats != chain.n_states:
            raise ValueError("tuple size and chain state count differ")
        return math.fsum(_terms_higher_order(tpl, chain, n, kind, cap))
    if tpl.n_mats != chain.n_states:
        raise ValueError("tuple size and chain state count differ")
    return math.fsum(_terms_order_one(tpl, chain, n, kind, cap))


def prob_jsr_upper(
    tpl: MatrixTuple,
    chain: Chain,
    max_horizon: int,
    kind: NormKind = "two",
    cap: int = 10**7,
) -> tuple[float, ExpectationCurve]:
    """Minimum of E_n over n <= max_horizon, with the full curve.

    On budget exhaustion the curve computed so far is returned (it must
    contain at least one horizon, otherwise the error propagates).
    """
    if max_horizon < 1:
        raise ValueError("max_horizon must be >= 1")
    horizons: list[int] = []
    values: list[float] = []
    for n in range(1, max_horizon + 1):
        try:
            values.append(exact_expectation(tpl, chain, n, kind, cap))
        except BudgetExceededError:
            if not values:
                raise
            break
        horizons.append(n)
    curve = ExpectationCurve(horizons=horizons, values=values, norm_kind=kind)
    return curve.minimum(), curve


def _sample_higher_order(
    hoc: HigherOrderChain, n: int, rng: np.random.Generator
) -> tuple[int, ...]:
    support = sorted(hoc.nu_support())
    masses = np.array([hoc.nu[w] for w in support])
    total = masses.sum()
    if total <= NU_ZERO_TOL:
        raise DegenerateDistributionError("initial tensor has no mass")
    window = support[int(rng.choice(len(support), p=masses / total))]
    letters = list(window[:n]) if n <= hoc.order else list(window)
    while len(letters) < n:
        window = tuple(letters[-hoc.order:])
        succ = hoc.successors(window)
        if not succ:
            raise DegenerateDistributionError(f"window {window} has no successors")
        probs = np.array([hoc.p[window + (j,)] for j in succ])
        letters.append(succ[int(rng.choice(len(succ), p=probs / probs.sum()))])
    return tuple(letters)


def mc_estimate(
    tpl: MatrixTuple,
    chain: Chain,
    n: int,
    samples: int,
    seed: int,
    kind: NormKind = "two",
) -> McEstimate:
    """Mean of norm(A(w))^(1/n) over independently sampled length-n paths.

    Sample i draws from a Philox stream jumped i times off the seed, so the
    estimate is reproducible and independent of the worker count.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if n < 1:
        raise ValueError("horizon must be >= 1")
    base = np.random.Philox(seed)
    inv_n = 1.0 / n

    def one(i: int) -> float:
        rng = np.random.Generator(base.jumped(i))
        if isinstance(chain, HigherOrderChain):
            word = _sample_higher_order(chain, n, rng)
        else:
            word = _sample_with(chain, n, rng)
        return induced_norm(word_product(tpl, word), kind) ** inv_n

    workers = max_threads()
    values = np.empty(samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, v in enumerate(pool.map(one, range(samples))):
                values[i] = v
    else:
        for i in range(samples):
            values[i] = one(i)

    mean = float(values.mean())
    stderr = (
        float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    )
    return McEstimate(horizon=n, samples=samples, mean=mean, stderr=stderr, seed=seed)
