#!/usr/bin/env python3
"""
Exact Moments of the GREM Partition Function

Closed-form finite-n expectations, variances and pair correlations of
Z_n(beta) obtained by splitting pairs of leaves according to their overlap
(the number of common edges), plus the complex normal distribution function
Phi(z) and truncated Gaussian exponential moments they rest on. Everything
is accumulated as complex logarithms so that n in the hundreds is fine.
"""

import cmath
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp, wofz

from errors import GeometryError, InvalidParameter, PhaseBoundary
from model import ModelParams, Normalizers, as_complex, log_branching_numbers, ring_index

logger = logging.getLogger(__name__)

NEG_INF = float("-inf")
LOG_HALF = math.log(0.5)


# -- complex log-domain helpers -------------------------------------------

def log_sum_exp_complex(logs: Sequence[complex]) -> complex:
    """log(sum(exp(x))) for complex x; -inf when every term (or the sum) vanishes"""
    finite = np.array([complex(x) for x in logs if complex(x).real != NEG_INF], dtype=complex)
    if finite.size == 0:
        return complex(NEG_INF, 0.0)
    with np.errstate(divide="ignore"):
        total = complex(logsumexp(finite))
    if not math.isfinite(total.real):
        return complex(NEG_INF, 0.0)
    return total


def expm1_complex(z: complex) -> complex:
    """exp(z) - 1 without cancellation for small |z|"""
    x, y = z.real, z.imag
    real = math.expm1(x) * math.cos(y) - 2.0 * math.sin(0.5 * y) ** 2
    return complex(real, math.exp(x) * math.sin(y))


def log_expm1_complex(z: complex) -> complex:
    if z == 0:
        return complex(NEG_INF, 0.0)
    if z.real > 1.0:
        return z + cmath.log(-expm1_complex(-z))
    return cmath.log(expm1_complex(z))


def _exp_or_inf(x: complex) -> complex:
    if x.real == NEG_INF:
        return 0j
    try:
        return cmath.exp(x)
    except OverflowError:
        return complex(math.inf, 0.0)


def _log_minus_one(log_n: float) -> float:
    """log(N - 1) from log N"""
    if log_n <= 0.0:
        return NEG_INF
    return log_n + math.log1p(-math.exp(-log_n))


# -- complex normal distribution function ---------------------------------

def phi_complex(z: complex) -> complex:
    """
    Entire continuation of the standard normal distribution function

    Phi(z) = 1/2 e^{-z^2/2} w(-iz/sqrt 2) with the Faddeeva function w, used
    where Re z <= 0 (the argument of w then lies in the closed upper half
    plane); the reflection Phi(z) = 1 - Phi(-z) covers Re z > 0.
    """
    z = complex(z)
    if z.real > 0:
        return 1.0 - phi_complex(-z)
    return 0.5 * cmath.exp(-0.5 * z * z) * complex(wofz(-1j * z / math.sqrt(2.0)))


def log_phi_complex(z: complex) -> complex:
    """log Phi(z) (imaginary part modulo 2 pi) without overflow"""
    z = complex(z)
    if z.real <= 0:
        return LOG_HALF - 0.5 * z * z + cmath.log(complex(wofz(-1j * z / math.sqrt(2.0))))
    lq = log_phi_complex(-z)
    if lq.real < -0.5:
        return complex(np.log1p(-np.exp(lq)))
    # 1 - q = -q (1 - 1/q)
    return lq + 1j * math.pi + complex(np.log1p(-np.exp(-lq)))


def mills_ratio_bound(x: float) -> float:
    """phi(x)/x, an upper bound for 1 - Phi(x) when x > 0"""
    if x <= 0:
        raise InvalidParameter(f"Mills ratio bound needs x > 0, got {x}")
    return math.exp(-0.5 * x * x) / (math.sqrt(2.0 * math.pi) * x)


def gauss_truncated_moment(w: complex, a: float, side: str = "upper") -> complex:
    """
    E[e^{w xi} 1{xi > a}] (side='upper') or E[e^{w xi} 1{xi < a}] (side='lower')
    for standard normal xi: e^{w^2/2} Phi(w - a), resp. e^{w^2/2} Phi(a - w)
    """
    w = complex(w)
    if side not in ("upper", "lower"):
        raise InvalidParameter(f"side must be 'upper' or 'lower', got {side!r}")
    if math.isinf(a):
        full = (a < 0) == (side == "upper")
        return cmath.exp(0.5 * w * w) if full else 0j
    arg = w - a if side == "upper" else a - w
    return _exp_or_inf(0.5 * w * w + log_phi_complex(arg))


def plane_gaf_covariance(t1: complex, t2: complex) -> complex:
    """E[X(t1) conj X(t2)] = e^{-(t1 - conj t2)^2 / 2} of the plane Gaussian analytic function"""
    return cmath.exp(-0.5 * (t1 - t2.conjugate()) ** 2)


# -- overlap decomposition -----------------------------------------------

def _log_pair_counts(log_n: Sequence[float]) -> List[float]:
    """log of the number of ordered leaf pairs with exactly l common edges, l = 0..d"""
    d = len(log_n)
    log_total = sum(log_n)
    counts = []
    for l in range(d + 1):
        if l == d:
            counts.append(log_total)
        else:
            counts.append(log_total + _log_minus_one(log_n[l]) + sum(log_n[l + 1:]))
    return counts


def _overlap_logs(model: ModelParams, log_n: Sequence[float], s: complex, w: complex) -> List[complex]:
    """log E over pairs with overlap l of e^{s X + w X'} times their count, l = 0..d"""
    counts = _log_pair_counts(log_n)
    out = []
    for l in range(model.d + 1):
        head = model.partial_variance(1, l)
        tail = model.partial_variance(l + 1, model.d)
        out.append(counts[l] + 0.5 * (s + w) ** 2 * head + 0.5 * (s * s + w * w) * tail)
    return out


def _log_covariance(model: ModelParams, log_n: Sequence[float], s: complex, w: complex) -> complex:
    """log Cov-type sum e^{(s^2+w^2)a/2} sum_{l>=1} count_l expm1(s w A_{1,l})"""
    counts = _log_pair_counts(log_n)
    terms = [counts[l] + log_expm1_complex(s * w * model.partial_variance(1, l))
             for l in range(1, model.d + 1)]
    return 0.5 * (s * s + w * w) * model.total_variance + log_sum_exp_complex(terms)


def log_expectation(model: ModelParams, n: int, beta) -> complex:
    beta = as_complex(beta)
    return sum(log_branching_numbers(model, n)) + 0.5 * beta * beta * model.total_variance * n


def expectation(model: ModelParams, n: int, beta) -> complex:
    """E Z_n(beta) = N_n exp(beta^2 a n / 2)"""
    return _exp_or_inf(log_expectation(model, n, beta))


def asymptotic_exponents(model: ModelParams, beta) -> List[float]:
    """b_l = log alpha + 2 sigma^2 a + sum_{m>l} (log alpha_m - |beta|^2 a_m), l = 1..d"""
    beta = as_complex(beta)
    r2 = abs(beta) ** 2
    base = model.log_total_alpha + 2.0 * beta.real ** 2 * model.total_variance
    return [base + sum(model.log_alpha[m - 1] - r2 * model.a[m - 1] for m in range(l + 1, model.d + 1))
            for l in range(1, model.d + 1)]


def asymptotic_log_variance(model: ModelParams, n: int, beta) -> Tuple[float, int, int]:
    """
    Leading behaviour of log Var Z_n(beta)

    Returns:
        (log variance estimate, dominant overlap index, multiplicity) where the
        multiplicity is 2 on a circle |beta| = sigma_k/sqrt 2 with k >= 2
    """
    beta = as_complex(beta)
    b = asymptotic_exponents(model, beta)
    k, on_circle = ring_index(model, beta)
    index = max(k, 1)
    factor = 2 if (on_circle and k >= 2) else 1
    return b[index - 1] * n + math.log(factor), index, factor


@dataclass
class MomentReport:
    n: int
    beta: complex
    log_mean: complex
    mean: complex
    log_second_abs: float
    second_abs: float
    log_var: float
    var: float
    log_overlap_terms: List[float]
    log_neg_b0_prime: float
    b: List[float]
    dominant: int
    boundary_factor: int

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        for key in ("beta", "log_mean", "mean"):
            value = getattr(self, key)
            out[key] = {"re": value.real, "im": value.imag}
        return out


def variance_exact(model: ModelParams, n: int, beta) -> MomentReport:
    """
    Exact E|Z_n|^2 and Var Z_n via the overlap decomposition

    B_{n,l} = #pairs(l) e^{2 sigma^2 A_{1,l} n + (sigma^2 - tau^2) A_{l+1,d} n};
    Var is assembled without cancellation as
    e^{(sigma^2-tau^2) a n} sum_{l>=1} count_l expm1(|beta|^2 A_{1,l} n),
    which vanishes exactly at beta = 0.
    """
    beta = as_complex(beta)
    log_n = log_branching_numbers(model, n)
    rt = math.sqrt(n)
    s, w = rt * beta, rt * beta.conjugate()

    overlap = [x.real for x in _overlap_logs(model, log_n, s, w)]
    log_second = log_sum_exp_complex(overlap).real
    log_var = _log_covariance(model, log_n, s, w).real
    log_mean = log_expectation(model, n, beta)

    # B'_{n,0} = B_{n,0} - |E Z|^2 = -N_n N_{n,2}...N_{n,d} e^{(sigma^2-tau^2) a n}
    log_neg_b0 = sum(log_n) + sum(log_n[1:]) + (beta.real ** 2 - beta.imag ** 2) * model.total_variance * n

    _, dominant, factor = asymptotic_log_variance(model, n, beta)
    report = MomentReport(
        n=n, beta=beta, log_mean=log_mean, mean=_exp_or_inf(log_mean),
        log_second_abs=log_second, second_abs=_exp_or_inf(log_second).real,
        log_var=log_var, var=_exp_or_inf(log_var).real,
        log_overlap_terms=overlap, log_neg_b0_prime=log_neg_b0,
        b=asymptotic_exponents(model, beta), dominant=dominant, boundary_factor=factor)
    logger.debug(f"Moments n={n} beta={beta}: log E|Z|^2={log_second:.6g}, log Var={log_var:.6g}")
    return report


def exp_vs_std_ratio(model: ModelParams, n: int, beta) -> float:
    """|E Z_n| / sqrt(Var Z_n)"""
    report = variance_exact(model, n, beta)
    if report.log_var == NEG_INF:
        return math.inf
    return math.exp(report.log_mean.real - 0.5 * report.log_var)


@dataclass
class PairCorrelation:
    """Exact second-order structure of (Z_n(beta1), Z_n(beta2))"""
    log_conj: complex           # log E[Z(beta1) conj Z(beta2)]
    log_plain: complex          # log E[Z(beta1) Z(beta2)]
    log_cov_conj: complex
    log_cov_plain: complex
    conj_terms: List[complex]   # log of the overlap-l pieces, l = 0..d
    plain_terms: List[complex]

    @property
    def conj(self) -> complex:
        return _exp_or_inf(self.log_conj)

    @property
    def plain(self) -> complex:
        return _exp_or_inf(self.log_plain)


def pair_correlation(model: ModelParams, n: int, beta1, beta2) -> PairCorrelation:
    """E[Z(beta1) conj Z(beta2)] and E[Z(beta1) Z(beta2)] split by overlap"""
    beta1, beta2 = as_complex(beta1), as_complex(beta2)
    log_n = log_branching_numbers(model, n)
    rt = math.sqrt(n)
    s = rt * beta1
    w_conj, w_plain = rt * beta2.conjugate(), rt * beta2
    conj_terms = _overlap_logs(model, log_n, s, w_conj)
    plain_terms = _overlap_logs(model, log_n, s, w_plain)
    return PairCorrelation(
        log_conj=log_sum_exp_complex(conj_terms),
        log_plain=log_sum_exp_complex(plain_terms),
        log_cov_conj=_log_covariance(model, log_n, s, w_conj),
        log_cov_plain=_log_covariance(model, log_n, s, w_plain),
        conj_terms=conj_terms, plain_terms=plain_terms)


@dataclass
class WindowCorrelation:
    """Normalized local correlations with their predicted limits"""
    scaling: str
    ring: int
    conj: complex
    plain: complex
    cov_conj: complex
    cov_plain: complex
    mean: complex
    limit_conj: Optional[complex]
    limit_cov_conj: complex
    limit_plain: complex
    limit_mean: complex


def _lambdas(model: ModelParams, beta_star: complex) -> List[complex]:
    """lambda_l = 2 sigma* A_{1,l} + beta* A_{l+1,d}, l = 0..d"""
    return [2.0 * beta_star.real * model.partial_variance(1, l) + beta_star * model.partial_variance(l + 1, model.d)
            for l in range(model.d + 1)]


def window_correlation(model: ModelParams, n: int, beta_star, t1: complex, t2: complex,
                       scaling: str = "sqrt") -> WindowCorrelation:
    """
    Local correlations of Z_n near beta*

    scaling='sqrt': beta* + t/sqrt(n) off the circles |beta| = sigma_k/sqrt 2,
    normalized by e^{g_n(beta*; t)} (e^{g-hat} inside the first circle).
    scaling='linear': beta* + t/n on a circle, normalized by e^{b_k n / 2}
    (k >= 2, from the exact pair counts) or N_n e^{beta*^2 a n / 2} (k = 1).
    """
    beta_star = as_complex(beta_star)
    t1, t2 = complex(t1), complex(t2)
    log_n = log_branching_numbers(model, n)
    k, on_circle = ring_index(model, beta_star)
    real_beta = beta_star.imag == 0
    a = model.total_variance

    if scaling == "sqrt":
        if on_circle:
            raise PhaseBoundary(f"beta*={beta_star} is on a circle; use linear scaling")
        step = 1.0 / math.sqrt(n)
        norms = Normalizers(model, n)
        gfun = norms.g_hat if k == 0 else norms.g_n
        log_norm1, log_norm2 = gfun(beta_star, t1), gfun(beta_star, t2)
        head = model.partial_variance(1, max(k, 1))
        limit_cov = cmath.exp(-0.5 * head * (t1 - t2.conjugate()) ** 2)
        limit_conj = None if k == 0 else limit_cov
        limit_plain = cmath.exp(-0.5 * head * (t1 - t2) ** 2) if real_beta else 0j
        limit_mean = complex(math.inf, 0.0) if k == 0 else 0j
    elif scaling == "linear":
        if not on_circle or real_beta:
            raise GeometryError(f"linear scaling needs non-real beta* on a circle |beta|=sigma_k/sqrt 2, got {beta_star}")
        step = 1.0 / n
        lam = _lambdas(model, beta_star)
        if k >= 2:
            counts = _log_pair_counts(log_n)
            half_b = 0.5 * (counts[k] + (beta_star.real ** 2 - beta_star.imag ** 2) * a * n
                            + abs(beta_star) ** 2 * model.partial_variance(1, k) * n)
            log_norm1 = log_norm2 = complex(half_b, 0.0)
            limit_cov = (cmath.exp(t1 * lam[k] + t2.conjugate() * lam[k].conjugate())
                         + cmath.exp(t1 * lam[k - 1] + t2.conjugate() * lam[k - 1].conjugate()))
            limit_conj = limit_cov
            limit_mean = 0j
        else:
            log_norm1 = log_norm2 = sum(log_n) + 0.5 * beta_star ** 2 * a * n
            limit_cov = cmath.exp(t1 * lam[1] + t2.conjugate() * lam[1].conjugate())
            limit_conj = None
            limit_mean = cmath.exp(beta_star * t1 * a)
        limit_plain = 0j
    else:
        raise InvalidParameter(f"scaling must be 'sqrt' or 'linear', got {scaling!r}")

    beta1, beta2 = beta_star + t1 * step, beta_star + t2 * step
    pair = pair_correlation(model, n, beta1, beta2)
    conj_norm = log_norm1 + log_norm2.conjugate()
    plain_norm = log_norm1 + log_norm2
    return WindowCorrelation(
        scaling=scaling, ring=k,
        conj=_exp_or_inf(pair.log_conj - conj_norm),
        plain=_exp_or_inf(pair.log_plain - plain_norm),
        cov_conj=_exp_or_inf(pair.log_cov_conj - conj_norm),
        cov_plain=_exp_or_inf(pair.log_cov_plain - plain_norm),
        mean=_exp_or_inf(log_expectation(model, n, beta1) - log_norm1),
        limit_conj=limit_conj, limit_cov_conj=limit_cov,
        limit_plain=limit_plain, limit_mean=limit_mean)
