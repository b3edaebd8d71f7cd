#!/usr/bin/env python3
"""
GREM Field Sampler and Partition Function Evaluator

Samples the hierarchical Gaussian field X_eps = sqrt(a_1) xi_{eps_1} + ... +
sqrt(a_d) xi_{eps_1..eps_d} and evaluates Z_n(beta) = sum_eps e^{beta sqrt(n) X_eps}
for a set of complex temperatures, replicate by replicate. Every level of
every replicate draws from its own counter-based stream keyed by
(seed, replicate, level), so ensembles are bit-identical whatever the
worker count. Values are kept as complex logarithms (log-modulus + i phase).
"""

import logging
import math
import struct
from dataclasses import dataclass
from enum import Enum
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtri

from config import get_log_domain_threshold, get_threads
from errors import InvalidParameter, ModelFileError
from model import ModelParams, Normalizers, as_complex, branching_numbers
from moments import variance_exact

logger = logging.getLogger(__name__)

ENSEMBLE_MAGIC = b"GREM"
ENSEMBLE_VERSION = 1
FLAG_LOG_DOMAIN = 1
_HEADER = struct.Struct("<4sIQQI")
# log of the largest and smallest normal float32
_LOG_F32_MAX = math.log(float(np.finfo(np.float32).max))
_LOG_F32_TINY = math.log(float(np.finfo(np.float32).tiny))

# leaf-by-beta block size for vectorised evaluation
_BLOCK_ELEMENTS = 1 << 22


class EvalMode(Enum):
    """How Z_n is evaluated from the sampled field"""
    LEAVES = "leaves"   # precomputed leaf exponents, one pass per beta block
    LEVELS = "levels"   # bottom-up recursion over levels, sharing ancestor sums


def level_normals(seed: int, replicate: int, level: int, count: int) -> np.ndarray:
    """
    Standard normals for one level of one replicate

    Philox keyed by SeedSequence(seed, spawn_key=(replicate, level)); raw
    64-bit words are mapped to uniforms on the 53-bit midpoint grid and
    through the inverse normal CDF.
    """
    seq = np.random.SeedSequence(seed, spawn_key=(replicate, level))
    raw = np.random.Philox(seq).random_raw(count)
    uniforms = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0 ** -53)
    return ndtri(uniforms)


class LeafField:
    """
    One realisation of the scaled field c_eps = sqrt(n) X_eps

    levels[k] holds sqrt(n a_{k+1}) xi for every node at depth k+1, in
    row-major order of the multi-index.
    """

    def __init__(self, levels: List[np.ndarray], counts: Sequence[int]):
        self.levels = levels
        self.counts = tuple(counts)
        self._exponents: Optional[np.ndarray] = None

    @classmethod
    def from_exponents(cls, exponents: Sequence[float]) -> "LeafField":
        """Single-level field with the given leaf exponents (closed-form fixtures)"""
        arr = np.asarray(exponents, dtype=float)
        return cls([arr], (arr.size,))

    @property
    def exponents(self) -> np.ndarray:
        if self._exponents is None:
            acc = self.levels[0]
            for lev, cnt in zip(self.levels[1:], self.counts[1:]):
                acc = (acc[:, None] + lev.reshape(acc.size, cnt)).ravel()
            self._exponents = acc
        return self._exponents

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def log_partition(self, betas) -> np.ndarray:
        """log Z for an array of betas, computed in leaf x beta blocks"""
        betas = np.atleast_1d(np.asarray(betas, dtype=complex))
        c = self.exponents
        cmax, cmin = c.max(), c.min()
        shift = np.where(betas.real >= 0, betas.real * cmax, betas.real * cmin)
        sums = np.zeros(betas.shape, dtype=complex)
        flat_b = betas.ravel()
        flat_shift = shift.ravel()
        flat_sums = sums.ravel()
        rows = max(1, _BLOCK_ELEMENTS // max(c.size, 1))
        for start in range(0, flat_b.size, rows):
            block = slice(start, start + rows)
            terms = np.exp(np.outer(flat_b[block], c) - flat_shift[block, None])
            flat_sums[block] = terms.sum(axis=1)
        with np.errstate(divide="ignore"):
            return flat_shift.reshape(betas.shape) + np.log(flat_sums.reshape(betas.shape))

    def log_partition_levels(self, beta: complex) -> complex:
        """log Z by recursion Z = sum_k e^{beta c_k} Z~_k from the bottom level up"""
        beta = complex(beta)
        child = None
        for lev, cnt in zip(reversed(self.levels), reversed(self.counts)):
            terms = beta * lev
            if child is not None:
                # one subtree value per node of this level
                terms = terms + child
            terms = terms.reshape(-1, cnt)
            shift = terms.real.max(axis=1, keepdims=True)
            with np.errstate(divide="ignore"):
                child = shift[:, 0] + np.log(np.exp(terms - shift).sum(axis=1))
        return complex(child[0])

    def newton_ratio(self, beta: complex) -> Tuple[complex, complex]:
        """(log Z, Z / Z') with the exact derivative Z' = sum c e^{beta c}"""
        beta = complex(beta)
        c = self.exponents
        shift = beta.real * (c.max() if beta.real >= 0 else c.min())
        w = np.exp(beta * c - shift)
        s0 = w.sum()
        s1 = (c * w).sum()
        log_z = shift + np.log(s0) if s0 != 0 else complex(-math.inf, 0.0)
        return complex(log_z), complex(s0 / s1) if s1 != 0 else complex(math.inf, 0.0)

    def log_abs_scale(self, beta: complex) -> float:
        """log sum |e^{beta c}|, the trivial bound on |Z|"""
        beta = complex(beta)
        x = beta.real * self.exponents
        m = x.max()
        return float(m + np.log(np.exp(x - m).sum()))

    def partition(self, beta: complex) -> complex:
        return complex(np.exp(self.log_partition(beta)[0]))


def sample_leaf_field(model: ModelParams, n: int, seed: int, replicate: int,
                      leaf_budget: Optional[int] = None) -> LeafField:
    """Field of one replicate; LeafBudgetExceeded above the leaf budget"""
    counts, _ = branching_numbers(model, n, leaf_budget)
    levels = []
    nodes = 1
    for k, (cnt, ak) in enumerate(zip(counts, model.a), start=1):
        nodes *= cnt
        levels.append(math.sqrt(n * ak) * level_normals(seed, replicate, k, nodes))
    return LeafField(levels, counts)


@dataclass
class SimConfig:
    model: ModelParams
    n: int
    seed: int
    replicates: int
    betas: List[complex]
    mode: EvalMode = EvalMode.LEAVES
    threads: Optional[int] = None
    leaf_budget: Optional[int] = None
    first_replicate: int = 0

    def __post_init__(self):
        if self.replicates < 1:
            raise InvalidParameter(f"replicates must be >= 1, got {self.replicates}")
        if not self.betas:
            raise InvalidParameter("beta set is empty")
        self.betas = [as_complex(b) for b in self.betas]
        if isinstance(self.mode, str):
            self.mode = EvalMode(self.mode)
        # validates n and the leaf budget before any worker starts
        branching_numbers(self.model, self.n, self.leaf_budget)

    @property
    def log_domain(self) -> bool:
        """Whether outputs are stored as (log-modulus, phase)"""
        biggest = max(abs(b) ** 2 for b in self.betas)
        return self.n * self.model.total_variance * biggest > get_log_domain_threshold()


@dataclass
class Replicate:
    index: int
    log_values: np.ndarray   # log Z_n(beta) per beta


@dataclass
class Ensemble:
    """M x B complex log partition functions sharing noise across betas"""
    config: SimConfig
    log_values: np.ndarray

    @property
    def values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_values)

    def replicate(self, index: int) -> Replicate:
        return Replicate(index=self.config.first_replicate + index, log_values=self.log_values[index])

    @property
    def zero_mask(self) -> np.ndarray:
        return np.isneginf(self.log_values.real)


def _simulate_chunk(args) -> Tuple[int, np.ndarray]:
    model, n, seed, start, stop, betas, mode, budget = args
    out = np.empty((stop - start, len(betas)), dtype=complex)
    for row, rep in enumerate(range(start, stop)):
        leaf_field = sample_leaf_field(model, n, seed, rep, budget)
        if mode is EvalMode.LEVELS:
            out[row] = [leaf_field.log_partition_levels(b) for b in betas]
        else:
            out[row] = leaf_field.log_partition(np.asarray(betas))
    return start, out


def sample_partition(config: SimConfig) -> Ensemble:
    """
    Evaluate Z_n(beta) for every replicate and beta

    Replicates are split into contiguous chunks handled by a process pool;
    chunks are placed by replicate index, so the result does not depend on
    the worker count.
    """
    workers = min(get_threads(config.threads), config.replicates)
    first, last = config.first_replicate, config.first_replicate + config.replicates
    chunk = max(1, math.ceil(config.replicates / (4 * workers)))
    tasks = [(config.model, config.n, config.seed, s, min(s + chunk, last), config.betas,
              config.mode, config.leaf_budget) for s in range(first, last, chunk)]

    logger.info(f"Simulating n={config.n}, M={config.replicates}, B={len(config.betas)} "
                f"with {workers} worker(s), mode={config.mode.value}")
    if workers > 1:
        with Pool(processes=workers) as pool:
            results = pool.map(_simulate_chunk, tasks)
    else:
        results = [_simulate_chunk(task) for task in tasks]

    log_values = np.empty((config.replicates, len(config.betas)), dtype=complex)
    for start, block in results:
        log_values[start - first:start - first + block.shape[0]] = block
    ensemble = Ensemble(config=config, log_values=log_values)
    zeros = int(ensemble.zero_mask.sum())
    if zeros:
        logger.warning(f"{zeros} partition values vanished exactly (ZeroValue)")
    return ensemble


@dataclass
class EnsembleSummary:
    """Per-beta statistics of F_n = (1/n) log |Z_n(beta)|"""
    betas: List[complex]
    free_energy: np.ndarray   # M x B, -inf where Z vanished
    median: np.ndarray
    iqr: np.ndarray
    zero_counts: np.ndarray


def empirical_log_partition(ensemble: Ensemble) -> EnsembleSummary:
    f = ensemble.log_values.real / ensemble.config.n
    zero_counts = ensemble.zero_mask.sum(axis=0)
    median = np.empty(f.shape[1])
    iqr = np.empty(f.shape[1])
    for j in range(f.shape[1]):
        col = f[:, j][np.isfinite(f[:, j])]
        if col.size == 0:
            median[j], iqr[j] = -math.inf, math.nan
            continue
        q1, q2, q3 = np.percentile(col, [25, 50, 75])
        median[j], iqr[j] = q2, q3 - q1
    return EnsembleSummary(betas=list(ensemble.config.betas), free_energy=f,
                           median=median, iqr=iqr, zero_counts=zero_counts)


NORMALIZATIONS = ("mean_var", "exp_cn", "boundary")


def boundary_sigma(model: ModelParams, n: int, u: float) -> float:
    """sigma(n) = sigma_1/2 - u / (2 sqrt(n a_1)) for the boundary central limit regime"""
    return model.sigma[0] / 2.0 - u / (2.0 * math.sqrt(n * model.a[0]))


def normalize_ensemble(ensemble: Ensemble, normalization: str) -> np.ndarray:
    """Normalize an existing ensemble column by column"""
    config = ensemble.config
    out = np.empty(ensemble.log_values.shape, dtype=complex)
    for j, beta in enumerate(config.betas):
        logs = ensemble.log_values[:, j]
        if normalization in ("mean_var", "boundary"):
            report = variance_exact(config.model, config.n, beta)
            half = 0.5 * report.log_var
            if not math.isfinite(half):
                raise InvalidParameter(f"Variance vanishes at beta={beta}; mean_var normalization undefined")
            with np.errstate(over="ignore"):
                out[:, j] = np.exp(logs - half) - np.exp(report.log_mean - half)
        elif normalization == "exp_cn":
            c_n = Normalizers(config.model, config.n).c_n(beta)
            out[:, j] = np.exp(logs - c_n)
        else:
            raise InvalidParameter(f"Unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")
    return out


def fluctuation_ensemble(config: SimConfig, normalization: str, u: Optional[float] = None) -> np.ndarray:
    """
    Normalized samples ready for distributional testing

    Args:
        config: Simulation configuration
        normalization: 'mean_var' for (Z - EZ)/sqrt(Var), 'exp_cn' for Z/e^{c_n},
            'boundary' for mean_var at sigma(n) = sigma_1/2 - u/(2 sqrt(n a_1))
            with tau taken from each configured beta
        u: Offset for the boundary mode

    Returns:
        M x B complex array

    Raises:
        PhaseBoundary: exp_cn on a phase boundary
    """
    if normalization == "boundary":
        if u is None:
            raise InvalidParameter("boundary normalization needs u")
        sigma_n = boundary_sigma(config.model, config.n, u)
        config = SimConfig(model=config.model, n=config.n, seed=config.seed, replicates=config.replicates,
                           betas=[complex(sigma_n, b.imag) for b in config.betas], mode=config.mode,
                           threads=config.threads, leaf_budget=config.leaf_budget,
                           first_replicate=config.first_replicate)
    elif normalization == "exp_cn":
        # fail before simulating
        norms = Normalizers(config.model, config.n)
        for beta in config.betas:
            norms.c_n(beta)
    elif normalization != "mean_var":
        raise InvalidParameter(f"Unknown normalization {normalization!r}; expected one of {NORMALIZATIONS}")
    return normalize_ensemble(sample_partition(config), normalization)


# -- binary ensemble files --------------------------------------------------

def write_ensemble(path: str, log_values: np.ndarray, log_domain: bool) -> bool:
    """
    Little-endian file: header {magic 'GREM', version u32, M u64, B u64, flags u32}
    then M x B complex64 values, or float32 (log-modulus, phase, zero-flag)
    triples when the log-domain flag is set

    A plain request whose moduli fall outside the complex64 range is stored
    in the log domain instead. Returns the log-domain flag actually written.
    """
    log_values = np.atleast_2d(np.asarray(log_values, dtype=complex))
    m, b = log_values.shape
    if not log_domain:
        finite = log_values.real[np.isfinite(log_values.real)]
        if finite.size and (finite.max() > _LOG_F32_MAX or finite.min() < _LOG_F32_TINY):
            logger.warning(f"log|Z| spans [{finite.min():.1f}, {finite.max():.1f}], outside complex64; "
                           f"writing {path} in the log domain")
            log_domain = True
    flags = FLAG_LOG_DOMAIN if log_domain else 0
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(ENSEMBLE_MAGIC, ENSEMBLE_VERSION, m, b, flags))
        if log_domain:
            zero = np.isneginf(log_values.real)
            triples = np.stack([np.where(zero, 0.0, log_values.real),
                                np.where(zero, 0.0, np.angle(np.exp(1j * log_values.imag))),
                                zero.astype(float)], axis=-1)
            fh.write(triples.astype("<f4").tobytes())
        else:
            fh.write(np.exp(log_values).astype("<c8").tobytes())
    logger.info(f"Wrote ensemble {m}x{b} to {path} (log_domain={log_domain})")
    return log_domain


def read_ensemble(path: str) -> Tuple[np.ndarray, bool]:
    """Returns (M x B log values, log_domain flag)"""
    try:
        with open(path, "rb") as fh:
            header = fh.read(_HEADER.size)
            payload = fh.read()
    except OSError as e:
        raise ModelFileError(f"Cannot read ensemble {path}: {e}")
    if len(header) != _HEADER.size:
        raise ModelFileError(f"{path}: truncated header")
    magic, version, m, b, flags = _HEADER.unpack(header)
    if magic != ENSEMBLE_MAGIC or version != ENSEMBLE_VERSION:
        raise ModelFileError(f"{path}: not a version {ENSEMBLE_VERSION} GREM ensemble")
    log_domain = bool(flags & FLAG_LOG_DOMAIN)
    if log_domain:
        triples = np.frombuffer(payload, dtype="<f4").reshape(m, b, 3).astype(float)
        logs = triples[..., 0] + 1j * triples[..., 1]
        logs = np.where(triples[..., 2] > 0, complex(-math.inf, 0.0), logs)
    else:
        values = np.frombuffer(payload, dtype="<c8").reshape(m, b).astype(complex)
        with np.errstate(divide="ignore"):
            logs = np.log(values)
    return logs, log_domain
