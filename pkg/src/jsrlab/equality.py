"""Equality and gap diagnostics between deterministic and Markovian radii.

Implements the cycle condition (every admissible cycle's spectral-radius
rate must equal the joint spectral radius), the pairwise-distinct-cycle
characterization of sup-over-chains equality, the orthogonal-similarity
certificate, cycle-semigroup irreducibility, and an aggregate gap report.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Literal, Optional

import numpy as np

from .errors import BudgetExceededError, JsrlabError
from .jsr_deterministic import (
    JsrBracket,
    _batch_spectral_radii,
    jsr_bounds_bruteforce,
    jsr_gripenberg,
)
from .jsr_probabilistic import exact_expectation, mc_estimate, prob_jsr_upper
from .linalg import NormKind, solve_spd_system, spd_sqrt
from .markov import NU_ZERO_TOL, CycleRecord, MarkovChain
from .system import (
    IrreducibilityVerdict,
    MatrixTuple,
    Word,
    canonical_rotation,
    irreducibility_check,
    minimal_period,
    word_product,
)


def _lyndon_words(n_symbols: int, max_len: int) -> Iterator[tuple[int, ...]]:
    """All Lyndon words over {1..n_symbols} of length <= max_len (Duval/FKM).

    Lyndon words are exactly the canonical representatives of primitive
    rotation classes, which is what cycle deduplication needs.
    """
    w = [0]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[-m])
        while w and w[-1] == n_symbols:
            w.pop()


@dataclass
class EqualityVerdict:
    """Outcome of the cycle-condition check, relative to a bracket and bound L."""

    status: Literal["consistent_up_to", "violated", "trivial"]
    max_len: int
    bracket: JsrBracket
    tol: float
    cycle: Optional[CycleRecord] = None
    ratio: Optional[float] = None
    cycles_checked: int = 0


def _admissible_cycle_classes(
    chain: MarkovChain, max_len: int, cap: int
) -> Iterator[tuple[int, list[tuple[Word, Word]]]]:
    """Primitive cycle classes grouped by length: (canonical word, reported rotation).

    A class is admissible when consecutive and closing transitions are
    positive and some rotation starts at a nu-positive state; the reported
    rotation is the least such rotation (an actual (nu, P)-cycle).
    """
    if chain.nu is None:
        raise ValueError("cycle condition needs an invariant probability")
    p = chain.p
    by_len: dict[int, list[tuple[Word, Word]]] = {}
    total = 0
    for word in _lyndon_words(chain.n_states, max_len):
        k = len(word)
        if any(p[word[j] - 1, word[(j + 1) % k] - 1] <= 0.0 for j in range(k)):
            continue
        rotations = sorted(word[r:] + word[:r] for r in range(k))
        start = next(
            (rot for rot in rotations if chain.nu[rot[0] - 1] > NU_ZERO_TOL), None
        )
        if start is None:
            continue
        total += 1
        if total > cap:
            raise BudgetExceededError(f"cycle classes exceed the cap {cap}")
        by_len.setdefault(k, []).append((word, start))
    for k in sorted(by_len):
        yield k, by_len[k]


def _batch_products(tpl: MatrixTuple, words: np.ndarray) -> np.ndarray:
    """Products A(w) for the (B, k) array of words, as a (B, d, d) stack."""
    stack = np.stack([np.asarray(m) for m in tpl.mats])
    out = stack[words[:, 0] - 1]
    for t in range(1, words.shape[1]):
        out = stack[words[:, t] - 1] @ out
    return out


def check_cycle_condition(
    tpl: MatrixTuple,
    chain: MarkovChain,
    max_len: int = 12,
    tol: float = 1e-9,
    bracket: Optional[JsrBracket] = None,
    kind: NormKind = "two",
    budget: int = 100_000,
    cap: int = 10**6,
) -> EqualityVerdict:
    """Check rho(A(cycle))^(1/k) == rho_d on every admissible cycle up to max_len.

    Cycles are deduplicated to primitive rotation classes (the rate is
    rotation- and power-invariant); the first class falling outside
    [lower - tol, upper + tol] yields a Violated verdict carrying an actual
    (nu, P)-cycle rotation. A bracket upper bound <= tol makes the condition
    vacuous (Trivial).
    """
    if bracket is None:
        bracket = jsr_gripenberg(tpl, tol=tol, budget=budget, kind=kind)
    if bracket.upper <= tol:
        return EqualityVerdict("trivial", max_len, bracket, tol)

    checked = 0
    for k, classes in _admissible_cycle_classes(chain, max_len, cap):
        words = np.array([w for w, _ in classes], dtype=np.int64)
        radii = _batch_spectral_radii(_batch_products(tpl, words))
        values = radii ** (1.0 / k)
        checked += len(classes)
        for (word, start), value in zip(classes, values):
            if value < bracket.lower - tol or value > bracket.upper + tol:
                record = CycleRecord(
                    indices=start,
                    kind="walk",
                    starting_index=start[0],
                    probability_positive=True,
                )
                return EqualityVerdict(
                    "violated",
                    max_len,
                    bracket,
                    tol,
                    cycle=record,
                    ratio=float(value),
                    cycles_checked=checked,
                )
    return EqualityVerdict(
        "consistent_up_to", max_len, bracket, tol, cycles_checked=checked
    )


def check_distinct_cycle(
    tpl: MatrixTuple,
    tol: float = 1e-9,
    bracket: Optional[JsrBracket] = None,
    kind: NormKind = "two",
    budget: int = 100_000,
    cap: int = 10**7,
) -> Optional[Word]:
    """First pairwise-distinct-index necklace attaining the bracket, if any.

    Returns the least word (length then lexicographic order) whose rate
    rho(A(w))^(1/k) reaches the Gripenberg lower bound and touches the upper
    bound within tol; None certifies, up to the bracket width, that no
    pairwise-distinct cycle attains the joint spectral radius.
    """
    if bracket is None:
        bracket = jsr_gripenberg(tpl, tol=tol, budget=budget, kind=kind)

    n = tpl.n_mats
    count = 0
    for k in range(1, n + 1):
        for subset in itertools.combinations(range(1, n + 1), k):
            first, rest = subset[0], subset[1:]
            for perm in itertools.permutations(rest):
                count += 1
                if count > cap:
                    raise BudgetExceededError(
                        f"distinct-index necklaces exceed the cap {cap}"
                    )
                word = (first,) + perm
                product = word_product(tpl, word)
                radius = (
                    float(np.max(np.abs(np.linalg.eigvals(product))))
                    if product.any()
                    else 0.0
                )
                value = radius ** (1.0 / k)
                if value >= bracket.lower - tol and value >= bracket.upper - tol:
                    return word
    return None


@dataclass
class OrthogonalCertificate:
    """Similarity G making every scale-normalized generator orthogonal."""

    g: np.ndarray
    scale: float
    residuals: list[float] = field(default_factory=list)


def orthogonal_similarity(
    tpl: MatrixTuple, scale: float, tol: float = 1e-8
) -> Optional[OrthogonalCertificate]:
    """Search for invertible G with scale^(-1) G A_i G^(-1) orthogonal for all i.

    Solves the simultaneous congruences A_i' Q A_i = scale^2 Q for an SPD Q
    and returns G = sqrt(Q) with per-matrix orthogonality defects; None when
    no SPD solution exists (e.g. any generator is singular while scale > 0).
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    q = solve_spd_system([(a, scale**2) for a in tpl.mats], tol=tol)
    if q is None:
        return None
    g = spd_sqrt(q)
    g_inv = np.linalg.inv(g)
    residuals = []
    eye = np.eye(tpl.dim)
    for a in tpl.mats:
        r = (g @ a @ g_inv) / scale
        defect = float(np.max(np.abs(np.linalg.eigvalsh(r.T @ r - eye))))
        residuals.append(defect)
    if max(residuals) > tol:
        return None
    return OrthogonalCertificate(g=g, scale=scale, residuals=residuals)


def cycle_semigroup_products(
    tpl: MatrixTuple,
    chain: MarkovChain,
    s: int,
    max_len: int,
    max_products: int = 64,
) -> tuple[list[np.ndarray], bool]:
    """Distinct products A(cycle) over closed walks starting at s, plus a
    truncation flag when the cap stopped the enumeration."""
    if not 1 <= s <= chain.n_states:
        raise ValueError(f"state {s} outside [1, {chain.n_states}]")
    p = chain.p
    products: list[np.ndarray] = []
    seen: set[bytes] = set()
    truncated = False

    path = [s]

    def rec(product: np.ndarray) -> bool:
        nonlocal truncated
        last = path[-1]
        if p[last - 1, s - 1] > 0.0:
            key = np.round(product, 12).tobytes()
            if key not in seen:
                if len(products) >= max_products:
                    truncated = True
                    return False
                seen.add(key)
                products.append(product)
        if len(path) < max_len:
            for nxt in range(1, chain.n_states + 1):
                if p[last - 1, nxt - 1] > 0.0:
                    path.append(nxt)
                    ok = rec(tpl.mat(nxt) @ product)
                    path.pop()
                    if not ok:
                        return False
        return True

    rec(tpl.mat(s))
    return products, truncated


def semigroup_irreducibility(
    tpl: MatrixTuple,
    chain: MarkovChain,
    s: int,
    max_len: int = 8,
    trials: int = 32,
    seed: int = 0,
    max_products: int = 64,
) -> IrreducibilityVerdict:
    """Common-invariant-subspace verdict for the cycle semigroup C(P, s).

    Generates cycle products up to max_len and runs the invariant-subspace
    search. An irreducible verdict on a truncated generating set remains
    sound; a reducible one is re-verified against the full enumeration and
    demoted to unknown if any omitted product breaks invariance.
    """
    products, truncated = cycle_semigroup_products(
        tpl, chain, s, max_len, max_products
    )
    if not products:
        # Empty semigroup: every subspace is vacuously invariant.
        if tpl.dim == 1:
            return IrreducibilityVerdict("irreducible", 0)
        basis = np.zeros((tpl.dim, 1))
        basis[0, 0] = 1.0
        return IrreducibilityVerdict("reducible", 0, basis=basis, dimension=1)

    verdict = irreducibility_check(MatrixTuple(tuple(products)), trials, seed)
    if verdict.is_reducible and truncated:
        from .system import invariant_subspace_residual

        all_products, _ = cycle_semigroup_products(
            tpl, chain, s, max_len, max_products=10**6
        )
        if invariant_subspace_residual(all_products, verdict.basis) > 1e-8:
            return IrreducibilityVerdict("unknown", trials)
    return verdict


# --------------------------------------------------------------------------
# Aggregate report
# --------------------------------------------------------------------------


@dataclass
class GapConfig:
    """Knobs for the aggregate gap report."""

    norm_kind: NormKind = "two"
    det_horizon: int = 4
    max_horizon: int = 8
    mc_horizon: int = 12
    mc_samples: int = 400
    seed: int = 0
    tol: float = 1e-9
    max_cycle_len: int = 8
    max_word_len: int = 4
    budget: int = 50_000
    cap: int = 10**6


def _section(fn):
    try:
        return fn()
    except (JsrlabError, ValueError) as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}


def gap_report(
    tpl: MatrixTuple, chain: Optional[MarkovChain], config: GapConfig
) -> dict:
    """Bundle every diagnostic into one JSON-ready report.

    Sections fail independently; the ratio interval is
    [mc_mean / upper, curve_min / lower] clamped to [0, 1] and omitted in
    the trivial (rho_d ~ 0) case.
    """
    cfg = config
    bracket = jsr_gripenberg(tpl, tol=cfg.tol, budget=cfg.budget, kind=cfg.norm_kind)

    def rho_d_section():
        brute = jsr_bounds_bruteforce(
            tpl, cfg.det_horizon, kind=cfg.norm_kind, cap=cfg.cap
        )
        lower = max(bracket.lower, brute.lower)
        witness = (
            bracket.lower_witness if bracket.lower >= brute.lower else brute.lower_witness
        )
        return {
            "lower": lower,
            "upper": min(bracket.upper, brute.upper),
            "witness": list(witness),
            "horizon": cfg.det_horizon,
            "norm": cfg.norm_kind,
            "gripenberg_exhausted": bracket.exhausted,
        }

    report: dict = {"rho_d": _section(rho_d_section)}
    trivial = bracket.upper <= cfg.tol
    report["trivial"] = trivial

    curve_min = None
    mc_mean = None
    if chain is not None and chain.nu is not None:

        def rho_p_section():
            nonlocal curve_min, mc_mean
            upper, curve = prob_jsr_upper(
                tpl, chain, cfg.max_horizon, kind=cfg.norm_kind, cap=cfg.cap
            )
            curve_min = upper
            mc = mc_estimate(
                tpl, chain, cfg.mc_horizon, cfg.mc_samples, cfg.seed, kind=cfg.norm_kind
            )
            mc_mean = mc.mean
            return {
                "curve": {"horizons": curve.horizons, "values": curve.values},
                "upper": upper,
                "mc": {
                    "horizon": mc.horizon,
                    "samples": mc.samples,
                    "mean": mc.mean,
                    "stderr": mc.stderr,
                    "seed": mc.seed,
                },
            }

        report["rho_p"] = _section(rho_p_section)

        def cycles_section():
            verdict = check_cycle_condition(
                tpl,
                chain,
                max_len=cfg.max_cycle_len,
                tol=cfg.tol,
                bracket=bracket,
                kind=cfg.norm_kind,
                cap=cfg.cap,
            )
            out = {
                "verdict": verdict.status,
                "max_len": verdict.max_len,
                "count": verdict.cycles_checked,
                "tol": verdict.tol,
            }
            if verdict.cycle is not None:
                out["cycle"] = list(verdict.cycle.indices)
                out["ratio"] = verdict.ratio
            return out

        report["cycles"] = _section(cycles_section)
    else:
        report["rho_p"] = None
        report["cycles"] = None

    def distinct_section():
        witness = check_distinct_cycle(
            tpl, tol=cfg.tol, bracket=bracket, kind=cfg.norm_kind
        )
        return {"witness": list(witness) if witness is not None else None}

    report["distinct_cycle"] = _section(distinct_section)

    def orthogonality_section():
        if trivial:
            return {"certificate": None, "residuals": None, "scale": None}
        scale = bracket.upper
        cert = orthogonal_similarity(tpl, scale)
        if cert is None:
            return {"certificate": None, "residuals": None, "scale": scale}
        return {
            "certificate": {"g": cert.g.tolist(), "scale": cert.scale},
            "residuals": cert.residuals,
            "scale": scale,
        }

    report["orthogonality"] = _section(orthogonality_section)

    def finiteness_section():
        from .higher_order import finiteness_search

        witness = finiteness_search(
            tpl, cfg.max_word_len, tol=cfg.tol, kind=cfg.norm_kind, bracket=bracket
        )
        if witness is None:
            return {"witness": None, "order": None}
        return {
            "witness": list(witness.word),
            "order": witness.order,
            "value": witness.value,
            "certified": witness.certified,
        }

    report["finiteness"] = _section(finiteness_section)

    if trivial or bracket.lower <= cfg.tol:
        report["ratio"] = None
    elif curve_min is not None and mc_mean is not None:
        low = min(max(mc_mean / bracket.upper, 0.0), 1.0)
        high = min(max(curve_min / bracket.lower, 0.0), 1.0)
        report["ratio"] = {"low": min(low, high), "high": high}
    else:
        report["ratio"] = None

    return report
