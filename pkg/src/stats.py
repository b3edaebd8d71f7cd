#!/usr/bin/env python3
"""
Fluctuation Test Battery

Compares normalized GREM ensembles with the limit laws of the partition
function: the constant 1 in the expectation phase, complex (or real) normal
laws where fluctuation levels dominate, the random zeta function of the
Poisson cascade in the glassy-plus-expectation phases, sub-Gaussian stable
laws when glassy and fluctuation levels coexist, and the beak mixtures.
Laws without a closed-form distribution are compared against samples from
the cascade module.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as sps

from cascade import hill_tail_index, zeta_samples
from errors import InvalidParameter, PhaseBoundary, UnknownLaw
from model import ModelParams, Normalizers, as_complex, beak_geometry, effective_zeta_argument
from moments import log_expectation
from phase import classify
from simulate import SimConfig, fluctuation_ensemble, sample_partition

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.01
TAIL_TOLERANCE = 0.15
REFERENCE_FACTOR = 4


class LawKind(Enum):
    """Limit laws of the normalized partition function"""
    CONST1 = "const1"                        # expectation phase
    COMPLEX_NORMAL = "complex_normal"        # fluctuation levels, tau != 0
    REAL_NORMAL = "real_normal"              # fluctuation levels, tau = 0
    CASCADE_ZETA = "cascade_zeta"            # glassy + expectation levels
    SUBGAUSSIAN_STABLE = "subgaussian_stable"  # glassy + fluctuation levels
    TWO_ATOM_MIX = "two_atom_mix"            # beak points


@dataclass
class LimitLaw:
    kind: LawKind
    var: float = 1.0
    z: Tuple[complex, ...] = ()
    index: float = math.nan
    isotropic: bool = True
    normalization: str = "exp_cn"
    T: float = 200.0
    seed: int = 7919

    def __post_init__(self):
        if isinstance(self.kind, str):
            try:
                self.kind = LawKind(self.kind)
            except ValueError:
                raise UnknownLaw(f"Unknown limit law {self.kind!r}; expected one of "
                                 f"{', '.join(k.value for k in LawKind)}")
        if self.kind in (LawKind.COMPLEX_NORMAL, LawKind.REAL_NORMAL) and not self.var > 0:
            raise InvalidParameter(f"normal law needs a positive variance, got {self.var}")
        if self.kind in (LawKind.CASCADE_ZETA, LawKind.TWO_ATOM_MIX) and not self.z:
            raise InvalidParameter(f"{self.kind.value} law needs a zeta argument")
        if self.kind is LawKind.SUBGAUSSIAN_STABLE and not 0 < self.index < 2:
            raise InvalidParameter(f"stable index must lie in (0, 2), got {self.index}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "var": self.var,
            "z": [{"re": c.real, "im": c.imag} for c in self.z],
            "index": self.index,
            "isotropic": self.isotropic,
            "normalization": self.normalization,
        }


@dataclass
class TestReport:
    name: str
    passed: bool
    statistic: float = math.nan
    p_value: float = math.nan
    samples: int = 0
    details: Dict[str, Any] = field(default_factory=dict)

    # not a pytest class
    __test__ = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _complex_array(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=complex).ravel()
    return arr[np.isfinite(arr)]


def argument_isotropy(samples) -> float:
    """KS p-value of arg W against the uniform law on (-pi, pi]"""
    arr = _complex_array(samples)
    return float(sps.kstest(np.angle(arr), "uniform", args=(-math.pi, 2.0 * math.pi)).pvalue)


def robust_complex_variance(samples) -> float:
    """
    E|W|^2 of a centred complex Gaussian bulk from the interquartile ranges
    of Re W and Im W
    """
    arr = _complex_array(samples)
    s_re = sps.iqr(arr.real, scale="normal")
    s_im = sps.iqr(arr.imag, scale="normal")
    return float(s_re ** 2 + s_im ** 2)


def test_complex_normal(samples, var: float = 1.0, threshold: float = DEFAULT_THRESHOLD) -> TestReport:
    """
    Check W ~ N_C(0, var)

    Re W and Im W are each KS-tested against N(0, var/2), the pseudo-variance
    |mean W^2| must stay below 4 var / sqrt(M), and arg W must look uniform.
    The three p-values share a Bonferroni-corrected threshold.
    """
    arr = _complex_array(samples)
    m = arr.size
    if m < 1000:
        logger.warning(f"Complex normal test on only {m} samples")
    scale = math.sqrt(var / 2.0)
    p_re = float(sps.kstest(arr.real, "norm", args=(0.0, scale)).pvalue)
    p_im = float(sps.kstest(arr.imag, "norm", args=(0.0, scale)).pvalue)
    p_arg = argument_isotropy(arr)
    pseudo = abs(np.mean(arr * arr))
    pseudo_ok = pseudo <= 4.0 * var / math.sqrt(m)
    p_min = min(p_re, p_im, p_arg)
    passed = p_min > threshold / 3.0 and pseudo_ok
    return TestReport(name="complex_normal", passed=bool(passed), statistic=float(pseudo), p_value=p_min,
                      samples=m, details={"p_re": p_re, "p_im": p_im, "p_arg": p_arg,
                                          "pseudo_variance": float(pseudo),
                                          "mean_square_modulus": float(np.mean(np.abs(arr) ** 2))})


def test_real_normal(samples, var: float = 1.0, threshold: float = DEFAULT_THRESHOLD) -> TestReport:
    """Check W ~ N(0, var) with a vanishing imaginary part"""
    arr = _complex_array(samples)
    p = float(sps.kstest(arr.real, "norm", args=(0.0, math.sqrt(var))).pvalue)
    imag = float(np.max(np.abs(arr.imag))) if arr.size else 0.0
    imag_ok = imag <= 1e-6 * max(1.0, float(np.max(np.abs(arr.real))))
    return TestReport(name="real_normal", passed=bool(p > threshold and imag_ok), p_value=p,
                      samples=arr.size, details={"max_imag": imag})


def ks_two_sample(samples, reference, threshold: float = DEFAULT_THRESHOLD,
                  on: str = "log_modulus") -> TestReport:
    """
    Two-sample KS of a complex ensemble against reference draws

    Heavy-tailed laws are compared on log |W| ('log_modulus'); 'argument'
    compares arg W. Passing means p > threshold.
    """
    a = _complex_array(samples)
    b = _complex_array(reference)
    if on == "log_modulus":
        a, b = a[a != 0], b[b != 0]
        x, y = np.log(np.abs(a)), np.log(np.abs(b))
    elif on == "argument":
        x, y = np.angle(a), np.angle(b)
    else:
        raise InvalidParameter(f"ks_two_sample compares 'log_modulus' or 'argument', got {on!r}")
    result = sps.ks_2samp(x, y)
    passed = result.pvalue > threshold
    return TestReport(name=f"ks_two_sample[{on}]", passed=bool(passed), statistic=float(result.statistic),
                      p_value=float(result.pvalue), samples=x.size, details={"reference": y.size})


def _zeta_reference(z: Sequence[complex], count: int, T: float, seed: int,
                    threads: Optional[int] = None) -> np.ndarray:
    """Samples of zeta_P(z) (not scaled by z_d - 1)"""
    z = tuple(complex(c) for c in z)
    scaled = zeta_samples(len(z), z, count, T, seed, mode="continued", threads=threads)
    return scaled / (z[-1] - 1.0)


def test_against_law(samples, law: LimitLaw, threshold: float = DEFAULT_THRESHOLD,
                     tolerance: float = 0.05, threads: Optional[int] = None) -> TestReport:
    """
    Test normalized samples against a limit law

    Args:
        samples: Normalized ensemble values (one beta)
        law: Target law
        threshold: p-value threshold
        tolerance: Maximal deviation for the constant law
        threads: Worker cap for reference sampling

    Returns:
        TestReport

    Raises:
        UnknownLaw
    """
    arr = _complex_array(samples)
    kind = law.kind
    if kind is LawKind.CONST1:
        dev = float(np.max(np.abs(arr - 1.0)))
        return TestReport(name="const1", passed=dev <= tolerance, statistic=dev, samples=arr.size)

    if kind is LawKind.COMPLEX_NORMAL:
        return test_complex_normal(arr, law.var, threshold)

    if kind is LawKind.REAL_NORMAL:
        return test_real_normal(arr, law.var, threshold)

    if kind in (LawKind.CASCADE_ZETA, LawKind.TWO_ATOM_MIX):
        reference = _zeta_reference(law.z, REFERENCE_FACTOR * arr.size, law.T, law.seed, threads)
        if kind is LawKind.TWO_ATOM_MIX:
            report = ks_two_sample(np.abs(arr), np.abs(reference), threshold)
            report.name = "two_atom_mix"
            return report
        by_modulus = ks_two_sample(arr, reference, threshold / 2.0)
        by_argument = ks_two_sample(arr, reference, threshold / 2.0, on="argument")
        return TestReport(name="cascade_zeta", passed=by_modulus.passed and by_argument.passed,
                          statistic=max(by_modulus.statistic, by_argument.statistic),
                          p_value=min(by_modulus.p_value, by_argument.p_value), samples=arr.size,
                          details={"log_modulus": by_modulus.to_dict(), "argument": by_argument.to_dict(),
                                   "z": [str(c) for c in law.z]})

    if kind is LawKind.SUBGAUSSIAN_STABLE:
        index = hill_tail_index(np.abs(arr), max(10, arr.size // 100))
        rel = abs(index - law.index) / law.index
        p_arg = argument_isotropy(arr) if law.isotropic else math.nan
        passed = rel <= TAIL_TOLERANCE and (not law.isotropic or p_arg > threshold)
        return TestReport(name="subgaussian_stable", passed=bool(passed), statistic=float(index),
                          p_value=p_arg, samples=arr.size,
                          details={"expected_index": law.index, "relative_error": rel})

    raise UnknownLaw(f"No test for law {kind}")


def select_law(model: ModelParams, n: int, beta) -> LimitLaw:
    """
    Limit law of the normalized Z_n(beta) from the composite phase (d1, d2, d3)

    Cascade arguments and the stable index use their finite-n values
    (beta sqrt(n a_k) / u_{n,k} and u_{n,1} / (sigma sqrt(n a_1))), which reach
    beta / sigma_k and sigma_1 / sigma only logarithmically.

    Raises:
        PhaseBoundary: beta on a phase boundary
    """
    beta = as_complex(beta)
    phase = classify(model, beta)
    counts = phase.counts
    if counts is None:
        raise PhaseBoundary(f"beta={beta} lies on a phase boundary ({phase.word}); no limit law selected")
    d1, d2, _ = counts
    isotropic = beta.imag != 0

    if d1 == 0 and d2 == 0:
        law = LimitLaw(kind=LawKind.CONST1, normalization="exp_cn")
    elif d1 == 0:
        kind = LawKind.COMPLEX_NORMAL if isotropic else LawKind.REAL_NORMAL
        law = LimitLaw(kind=kind, var=1.0, isotropic=isotropic, normalization="mean_var")
    elif d2 == 0:
        z = effective_zeta_argument(model, n, beta, d1)
        law = LimitLaw(kind=LawKind.CASCADE_ZETA, z=z, isotropic=isotropic, normalization="exp_cn")
    else:
        norms = Normalizers(model, n)
        index = norms.u(1) / (abs(beta.real) * math.sqrt(n * model.a[0]))
        index = min(max(index, 1e-6), 2.0 - 1e-6)
        law = LimitLaw(kind=LawKind.SUBGAUSSIAN_STABLE, index=index, isotropic=isotropic,
                       normalization="exp_cn")
    logger.info(f"Phase {phase.word} at beta={beta}: law {law.kind.value}")
    return law


def fluctuation_test(config: SimConfig, law: Optional[LimitLaw] = None,
                     threshold: float = DEFAULT_THRESHOLD) -> Dict[str, Any]:
    """
    Simulate, normalize and test every beta of a configuration

    Args:
        config: Simulation configuration
        law: Fixed law, or None to select one per beta

    Returns:
        Dict with one entry per beta (law and TestReport) and the overall verdict
    """
    results = []
    for beta in config.betas:
        target = law if law is not None else select_law(config.model, config.n, beta)
        single = SimConfig(model=config.model, n=config.n, seed=config.seed, replicates=config.replicates,
                           betas=[beta], mode=config.mode, threads=config.threads,
                           leaf_budget=config.leaf_budget, first_replicate=config.first_replicate)
        samples = fluctuation_ensemble(single, target.normalization)[:, 0]
        report = test_against_law(samples, target, threshold, threads=config.threads)
        logger.info(f"beta={beta}: {report.name} passed={report.passed} p={report.p_value:.3g}")
        results.append({"beta": {"re": beta.real, "im": beta.imag}, "law": target.to_dict(),
                        "report": report.to_dict()})
    return {"n": config.n, "replicates": config.replicates, "seed": config.seed,
            "results": results, "passed": all(r["report"]["passed"] for r in results)}


def beak_mixture_test(model: ModelParams, l: int, beta_star, n: int, M: int, seed: int = 0,
                      threads: Optional[int] = None, threshold: float = DEFAULT_THRESHOLD,
                      leaf_budget: Optional[int] = None) -> TestReport:
    """
    Exact-beak fluctuations

    l = 1: Z_n(beta*) / E Z_n(beta*) against the constant 1 (max deviation
    reported, tolerance 0.1). l >= 2: |Z_n(beta*) / e^{h_hat}| against
    |zeta_P(beta*/sigma_1, ..., beta*/sigma_{l-1})| by a log-modulus KS test.

    Raises:
        GeometryError: beta* is not on the beak of level l
    """
    beta_star = as_complex(beta_star)
    beak_geometry(model, beta_star, l)
    config = SimConfig(model=model, n=n, seed=seed, replicates=M, betas=[beta_star],
                       threads=threads, leaf_budget=leaf_budget)
    logs = sample_partition(config).log_values[:, 0]

    if l == 1:
        ratio = np.exp(logs - log_expectation(model, n, beta_star))
        dev = float(np.max(np.abs(ratio - 1.0)))
        return TestReport(name="beak_l1", passed=dev <= 0.1, statistic=dev, samples=M,
                          details={"median_deviation": float(np.median(np.abs(ratio - 1.0)))})

    h_hat = Normalizers(model, n).h_hat(beta_star, l)
    normalized = np.exp(logs - h_hat)
    law = LimitLaw(kind=LawKind.TWO_ATOM_MIX, z=effective_zeta_argument(model, n, beta_star, l - 1),
                   seed=seed + 1)
    report = test_against_law(normalized, law, threshold, threads=threads)
    report.name = f"beak_l{l}"
    report.details["z"] = [str(c) for c in law.z]
    return report
