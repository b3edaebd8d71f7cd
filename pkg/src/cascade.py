#!/usr/bin/env python3
"""
Poisson Cascades and Their Random Zeta Function

Samples the nested Poisson point process Pi on (0, inf)^d (a unit-intensity
process at the root and an independent one below every retained point),
truncated at T on each level, and evaluates

    zeta_P(z) = sum over (P_{e1}, P_{e1 e2}, ..., P_{e1..ed}) of
                P_{e1}^{-z_1} ... P_{e1..ed}^{-z_d}

in its domain of absolute convergence and, via the regularized recursion,
on the half domain Re z_1 > ... > Re z_d > 1/2. Distributional checks
(operator stability, tail index, mean/variance of the regularized piece)
live here too.
"""

import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import ks_2samp

from config import get_t_ladder, get_threads
from errors import DomainError, InvalidParameter, PoleProximity

logger = logging.getLogger(__name__)

# spawn-key tag separating cascade streams from field streams
CASCADE_STREAM = 0xCA5CADE
POLE_DISTANCE = 1e-6

ZetaArg = Union[complex, Sequence[complex]]


@dataclass
class CascadeSample:
    """
    One truncated cascade

    points[j] holds the retained points of level j+1; parents[j][i] is the
    index in points[j-1] of the parent of points[j][i] (all zeros on level 1).
    Points of each branch are sorted increasingly.
    """
    d: int
    truncations: Tuple[float, ...]
    seed: int
    replicate: int
    points: List[np.ndarray] = field(default_factory=list)
    parents: List[np.ndarray] = field(default_factory=list)

    @property
    def T(self) -> float:
        return max(self.truncations)

    def level_counts(self) -> List[int]:
        return [p.size for p in self.points]


def _as_vector(z: ZetaArg) -> np.ndarray:
    return np.atleast_1d(np.asarray(z, dtype=complex))


def sample_cascade(d: int, T: float, seed: int, replicate: int = 0,
                   first_T: Optional[float] = None) -> CascadeSample:
    """
    Sample the cascade restricted to points <= T on every level

    Args:
        d: Depth
        T: Truncation of levels 2..d (and of level 1 unless first_T is given)
        seed: Base seed
        replicate: Replicate index; level j uses the stream keyed by
            (seed, replicate, j)
        first_T: Separate truncation for level 1

    Returns:
        CascadeSample
    """
    if d < 1:
        raise InvalidParameter(f"cascade depth must be >= 1, got {d}")
    if not T > 0 or (first_T is not None and not first_T > 0):
        raise InvalidParameter(f"truncation must be positive, got T={T}, first_T={first_T}")
    truncations = tuple([float(first_T if first_T is not None else T)] + [float(T)] * (d - 1))
    sample = CascadeSample(d=d, truncations=truncations, seed=seed, replicate=replicate)

    parent_count = 1
    for level, trunc in enumerate(truncations, start=1):
        seq = np.random.SeedSequence(seed, spawn_key=(CASCADE_STREAM, replicate, level))
        gen = np.random.Generator(np.random.Philox(seq))
        counts = gen.poisson(trunc, size=parent_count)
        parents = np.repeat(np.arange(parent_count), counts)
        positions = gen.uniform(0.0, trunc, size=parents.size)
        order = np.lexsort((positions, parents))
        sample.points.append(positions[order])
        sample.parents.append(parents[order])
        parent_count = parents.size
    return sample


def _masks(sample: CascadeSample, truncation: Optional[float]) -> List[np.ndarray]:
    """Points retained at every level under an extra uniform truncation"""
    masks = []
    for j, pts in enumerate(sample.points):
        keep = pts <= (truncation if truncation is not None else np.inf)
        if j > 0:
            keep &= masks[j - 1][sample.parents[j]]
        masks.append(keep)
    return masks


def intensity_count(sample: CascadeSample, box: float = 1.0) -> int:
    """#(Pi intersected with (0, box]^d)"""
    return int(_masks(sample, box)[-1].sum())


def _check_domain(z: np.ndarray, threshold: float, name: str):
    re = z.real
    ok = all(re[k] > re[k + 1] for k in range(z.size - 1)) and re[-1] > threshold
    if not ok:
        raise DomainError(f"z={list(z)} is outside {name}: need Re z_1 > ... > Re z_d > {threshold:g}")


def zeta_direct(sample: CascadeSample, z: ZetaArg, truncation: Optional[float] = None) -> complex:
    """Direct sum of x_1^{-z_1}...x_d^{-z_d} over the retained points of Pi"""
    z = _as_vector(z)
    masks = _masks(sample, truncation)
    # path product carried from the root down to the leaves
    weight = np.ones(1, dtype=complex)
    for j, pts in enumerate(sample.points):
        weight = weight[sample.parents[j]] * np.where(masks[j], pts, 1.0) ** (-z[j]) * masks[j]
    return complex(weight.sum())


def zeta_recursive(sample: CascadeSample, z: ZetaArg, regularize: bool = False,
                   truncation: Optional[float] = None, scaled: bool = False) -> complex:
    """
    Nested sum sum_k P_k^{-z_1} zeta~_k(z~), evaluated from the deepest level up

    With regularize=True the innermost sums become continued values
    sum_{P <= T} P^{-z_d} + T^{1-z_d}/(z_d - 1). With scaled=True the result
    is multiplied by (z_d - 1) inside the innermost level, which keeps
    z_d = 1 finite.
    """
    z = _as_vector(z)
    masks = _masks(sample, truncation)
    d = sample.d
    child = None
    for j in range(d - 1, -1, -1):
        pts = sample.points[j]
        terms = np.where(masks[j], pts, 1.0) ** (-z[j]) * masks[j]
        if child is not None:
            terms = terms * child
        n_parents = 1 if j == 0 else sample.points[j - 1].size
        sums = np.zeros(n_parents, dtype=complex)
        np.add.at(sums, sample.parents[j], terms)
        if j == d - 1:
            zd = z[-1]
            trunc = min(sample.truncations[j], truncation) if truncation is not None else sample.truncations[j]
            if scaled:
                sums = sums * (zd - 1.0)
                if regularize:
                    sums = sums + trunc ** (1.0 - zd)
            elif regularize:
                sums = sums + trunc ** (1.0 - zd) / (zd - 1.0)
        child = sums
    return complex(child[0])


@dataclass
class ZetaEval:
    z: Tuple[complex, ...]
    T: float
    mode: str
    raw: complex            # unregularized truncated sum
    regularizer: complex    # d=1: integral of t^{-z} over [1, T]; else 0
    value: complex          # estimate of zeta_P(z)
    scaled: complex         # estimate of (z_d - 1) zeta_P(z)
    ladder: List[float] = field(default_factory=list)
    increments: List[float] = field(default_factory=list)

    @property
    def uncertainty(self) -> float:
        return self.increments[-1] if self.increments else math.nan


def zeta_eval(sample: CascadeSample, z: ZetaArg, mode: str = "continued",
              ladder: Optional[Sequence[float]] = None) -> ZetaEval:
    """
    Evaluate zeta_P on one sample

    Args:
        sample: Cascade sample
        z: Argument (d components)
        mode: 'domain' (z in D, plain sum) or 'continued' (z in D/2, regularized recursion)
        ladder: Truncations for the Cauchy-increment diagnostic; values above the
            sample truncation are dropped (configured ladder when None)

    Raises:
        DomainError, PoleProximity
    """
    z = _as_vector(z)
    if z.size != sample.d:
        raise InvalidParameter(f"z has {z.size} components for a depth-{sample.d} cascade")
    if mode == "domain":
        _check_domain(z, 1.0, "D")
    elif mode == "continued":
        _check_domain(z, 0.5, "D/2")
        if abs(z[-1] - 1.0) < POLE_DISTANCE:
            raise PoleProximity(f"z_d={z[-1]} is within {POLE_DISTANCE:g} of the pole at 1")
    else:
        raise InvalidParameter(f"mode must be 'domain' or 'continued', got {mode!r}")

    rungs = sorted(t for t in (ladder if ladder is not None else get_t_ladder()) if t < sample.T)
    rungs.append(None)

    values = []
    for rung in rungs:
        if mode == "domain":
            values.append(zeta_recursive(sample, z, truncation=rung))
        else:
            values.append(zeta_recursive(sample, z, regularize=True, truncation=rung))
    increments = [abs(b - a) for a, b in zip(values, values[1:])]

    raw = zeta_recursive(sample, z)
    regularizer = 0j
    if sample.d == 1:
        zd, T = z[0], sample.truncations[0]
        regularizer = complex(math.log(T)) if zd == 1 else complex((T ** (1.0 - zd) - 1.0) / (1.0 - zd))
    value = values[-1]
    return ZetaEval(z=tuple(z), T=sample.T, mode=mode, raw=raw, regularizer=regularizer,
                    value=value, scaled=(z[-1] - 1.0) * value,
                    ladder=[r for r in rungs[:-1]] + [sample.T], increments=increments)


def regularized_piece(sample: CascadeSample, z: ZetaArg, a: float = 1.0,
                      gamma: Optional[Sequence[float]] = None) -> complex:
    """
    f_gamma(z; a) = (z_d - 1) (sum over Pi in F_gamma(a) of x^{-z} - I_gamma(z; a))

    F_gamma(a) = {y_k = x_1^{gamma_1}...x_k^{gamma_k} >= a for all k}. For d = 1
    the integral is cut at the truncation, so the mean is exactly zero.
    """
    z = _as_vector(z)
    d = sample.d
    gamma = np.ones(1) if gamma is None and d == 1 else np.asarray(gamma, dtype=float)
    if gamma.size != d:
        raise InvalidParameter(f"gamma needs {d} components")

    inside = []
    log_y = np.zeros(1)
    weight = np.ones(1, dtype=complex)
    ok = np.ones(1, dtype=bool)
    for j, pts in enumerate(sample.points):
        par = sample.parents[j]
        log_y = log_y[par] + gamma[j] * np.log(pts)
        ok = ok[par] & (log_y >= math.log(a))
        weight = weight[par] * pts ** (-z[j])
    total = complex(weight[ok].sum())

    zd = z[-1]
    if d == 1:
        g = gamma[0]
        lower = a ** (1.0 / g)
        T = sample.truncations[0]
        if T <= lower:
            integral = 0j
        else:
            integral = (lower ** (1.0 - zd) - T ** (1.0 - zd)) / (zd - 1.0)
        return (zd - 1.0) * (total - integral)
    return (zd - 1.0) * (total - i_gamma(z, a, gamma))


def i_gamma(z: ZetaArg, a: float, gamma: Sequence[float]) -> complex:
    """
    Closed form of the integral of x_1^{-z_1}...x_d^{-z_d} over F_gamma(a)

    a^{(1-z_1)/gamma_1} / (gamma_1...gamma_d)
      * prod_{k<d} 1 / ((z_k-1)/gamma_k - (z_{k+1}-1)/gamma_{k+1}) * gamma_d / (z_d - 1)

    Raises:
        DomainError: z outside {(Re z_1-1)/gamma_1 > ... > (Re z_d-1)/gamma_d > 0}
    """
    z = _as_vector(z)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.size != z.size:
        raise InvalidParameter("z and gamma must have the same length")
    if np.any(gamma <= 0) or np.any(np.diff(gamma) >= 0):
        raise InvalidParameter(f"gamma must be positive and strictly decreasing, got {list(gamma)}")
    if not a > 0:
        raise InvalidParameter(f"a must be positive, got {a}")
    ratios = (z.real - 1.0) / gamma
    if np.any(np.diff(ratios) >= 0) or ratios[-1] <= 0:
        raise DomainError(f"z={list(z)} is outside D_gamma for gamma={list(gamma)}")

    shifted = (z - 1.0) / gamma
    value = a ** ((1.0 - z[0]) / gamma[0]) / np.prod(gamma)
    for k in range(z.size - 1):
        value = value / (shifted[k] - shifted[k + 1])
    return complex(value * gamma[-1] / (z[-1] - 1.0))


# -- replicate drivers ----------------------------------------------------

def _zeta_chunk(args) -> Tuple[int, np.ndarray]:
    d, z, T, seed, start, stop, mode, first_T = args
    out = np.empty(stop - start, dtype=complex)
    for row, rep in enumerate(range(start, stop)):
        sample = sample_cascade(d, T, seed, rep, first_T)
        if mode == "domain":
            out[row] = (z[-1] - 1.0) * zeta_recursive(sample, z)
        else:
            out[row] = zeta_recursive(sample, z, regularize=True, scaled=True)
    return start, out


def zeta_samples(d: int, z: ZetaArg, M: int, T: float, seed: int, mode: str = "continued",
                 first_T: Optional[float] = None, first_replicate: int = 0,
                 threads: Optional[int] = None) -> np.ndarray:
    """M independent samples of (z_d - 1) zeta_P(z), replicate-deterministic"""
    z = _as_vector(z)
    if z.size != d:
        raise InvalidParameter(f"z has {z.size} components, expected {d}")
    _check_domain(z, 1.0 if mode == "domain" else 0.5, "D" if mode == "domain" else "D/2")
    workers = min(get_threads(threads), M)
    chunk = max(1, math.ceil(M / (4 * workers)))
    last = first_replicate + M
    tasks = [(d, z, T, seed, s, min(s + chunk, last), mode, first_T) for s in range(first_replicate, last, chunk)]
    if workers > 1:
        with Pool(processes=workers) as pool:
            results = pool.map(_zeta_chunk, tasks)
    else:
        results = [_zeta_chunk(task) for task in tasks]
    out = np.empty(M, dtype=complex)
    for start, block in results:
        out[start - first_replicate:start - first_replicate + block.size] = block
    return out


@dataclass
class StabilityReport:
    m: int
    p_modulus: float
    p_argument: float
    log_modulus_quantile_gap: float

    def passed(self, threshold: float = 0.01) -> bool:
        return self.p_modulus > threshold and self.p_argument > threshold


def stability_test(d: int, z: ZetaArg, m: int, M: int, T: float, seed: int = 0,
                   threads: Optional[int] = None) -> StabilityReport:
    """
    Compare sum_{j<=m} (z_d-1) zeta^{(j)}(z) with m^{z_1} (z_d-1) zeta(z)

    The right side uses level-1 truncation mT: m superposed unit processes on
    (0, T] rescaled by m form a unit process on (0, mT], so both sides have
    the same law at every finite T.
    """
    z = _as_vector(z)
    if m < 1:
        raise InvalidParameter(f"m must be >= 1, got {m}")
    copies = zeta_samples(d, z, M * m, T, seed, threads=threads).reshape(M, m).sum(axis=1)
    # disjoint replicate range for the right-hand side
    single = (m ** z[0]) * zeta_samples(d, z, M, T, seed, first_T=m * T,
                                        first_replicate=M * m, threads=threads)
    p_mod = float(ks_2samp(np.abs(copies), np.abs(single)).pvalue)
    p_arg = float(ks_2samp(np.angle(copies), np.angle(single)).pvalue)
    qs = np.linspace(0.1, 0.9, 9)
    with np.errstate(divide="ignore"):
        gap = float(np.max(np.abs(np.quantile(np.log(np.abs(copies)), qs) - np.quantile(np.log(np.abs(single)), qs))))
    report = StabilityReport(m=m, p_modulus=p_mod, p_argument=p_arg, log_modulus_quantile_gap=gap)
    logger.info(f"Stability d={d} z={list(z)} m={m}: p_mod={p_mod:.3g}, p_arg={p_arg:.3g}")
    return report


def hill_tail_index(samples: Sequence[float], k: Optional[int] = None) -> float:
    """
    Hill estimate of the tail index from the k largest values

    1 / ((1/k) sum_{i<=k} log(x_(i) / x_(k+1))) with x_(1) >= x_(2) >= ...
    """
    x = np.sort(np.abs(np.asarray(samples, dtype=float)))[::-1]
    x = x[x > 0]
    if k is None:
        k = max(10, int(math.sqrt(x.size)))
    if x.size <= k:
        raise InvalidParameter(f"Hill estimator needs more than k={k} positive samples, got {x.size}")
    h = float(np.mean(np.log(x[:k] / x[k])))
    return math.inf if h == 0 else 1.0 / h


@dataclass
class TailReport:
    index: float
    expected: float
    k: int
    samples: int

    @property
    def relative_error(self) -> float:
        if math.isinf(self.expected) and math.isinf(self.index):
            return 0.0
        return abs(self.index - self.expected) / self.expected


def tail_index(d: int, z: ZetaArg, M: int, T: float, seed: int = 0, k: Optional[int] = None,
               threads: Optional[int] = None) -> TailReport:
    """Hill tail index of |(z_d-1) zeta_P(z)|; the law has index 1/Re z_1"""
    z = _as_vector(z)
    samples = zeta_samples(d, z, M, T, seed, threads=threads)
    moduli = np.abs(samples)
    expected = 1.0 / z[0].real
    if d == 1 and z[0] == 1:
        # (z-1) zeta_P is identically 1
        expected = math.inf
    if np.ptp(moduli) <= 1e-12 * max(1.0, float(moduli.max())):
        return TailReport(index=math.inf, expected=expected, k=0, samples=M)
    k = k if k is not None else max(10, M // 100)
    return TailReport(index=hill_tail_index(moduli, k), expected=expected, k=k, samples=M)


def truncated_moment(samples: Sequence[complex], p: float) -> float:
    """Empirical E|X|^p"""
    return float(np.mean(np.abs(np.asarray(samples)) ** p))


def has_no_atoms(samples: Sequence[complex]) -> bool:
    """No repeated values among the samples"""
    arr = np.asarray(samples, dtype=complex)
    return np.unique(arr).size == arr.size


def fullness_condition_number(samples: Sequence[complex]) -> float:
    """Condition number of the (Re, Im) sample covariance matrix"""
    arr = np.asarray(samples, dtype=complex)
    return float(np.linalg.cond(np.cov(np.vstack([arr.real, arr.imag]))))
