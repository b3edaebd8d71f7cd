#!/usr/bin/env python3
"""
GREM Model Parameters and Normalizing Sequences

Defines the d-level Generalized Random Energy Model: level variances a_k,
branching exponents alpha_k, critical inverse temperatures
sigma_k = sqrt(2 log alpha_k / a_k), the branching numbers N_{n,k}, and every
normalizing sequence (u_{n,k}, c_n, g_n, d_{n,l}, h_{n,l}, f_n, r_n) used by
the moment, simulation and limit-law modules. Level indices are 1-based at
the interface.
"""

import cmath
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from config import get_boundary_tol, get_leaf_budget
from errors import (ConvexityViolation, GeometryError, InvalidParameter,
                    LeafBudgetExceeded, ModelFileError, NonConvergence,
                    PhaseBoundary, UnknownKind)

logger = logging.getLogger(__name__)

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# above this exponent floor(alpha^n) and alpha^n agree to double precision
_EXACT_FLOOR_LIMIT = 36.0


class BranchingRule(Enum):
    """How N_{n,k} is obtained from alpha_k"""
    FLOOR = "floor"         # N_{n,k} = floor(alpha_k^n)
    EXPLICIT = "explicit"   # user-supplied tables per n


@dataclass(frozen=True)
class ComplexTemp:
    """Complex inverse temperature beta = sigma + i tau"""
    sigma: float
    tau: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.tau)):
            raise InvalidParameter(f"beta must be finite, got {self.sigma}+{self.tau}i")

    @property
    def beta(self) -> complex:
        return complex(self.sigma, self.tau)

    @property
    def modulus(self) -> float:
        return math.hypot(self.sigma, self.tau)

    def conjugate(self) -> "ComplexTemp":
        return ComplexTemp(self.sigma, -self.tau)

    @classmethod
    def from_complex(cls, beta: Union[complex, float, "ComplexTemp"]) -> "ComplexTemp":
        if isinstance(beta, ComplexTemp):
            return beta
        beta = complex(beta)
        return cls(beta.real, beta.imag)

    @classmethod
    def parse(cls, text: str) -> "ComplexTemp":
        """Parse '0.3+0.1i', '-2', '1.5i' or '0.3-0.1j'"""
        cleaned = text.strip().replace(" ", "").replace("I", "j").replace("i", "j")
        try:
            return cls.from_complex(complex(cleaned))
        except ValueError:
            raise InvalidParameter(f"Cannot parse complex temperature {text!r}")

    def __str__(self) -> str:
        sign = "+" if self.tau >= 0 else "-"
        return f"{self.sigma:g}{sign}{abs(self.tau):g}i"


def as_complex(beta: Union[complex, float, ComplexTemp]) -> complex:
    if isinstance(beta, ComplexTemp):
        return beta.beta
    return complex(beta)


@dataclass(frozen=True)
class ModelParams:
    """Validated GREM parameters with derived critical temperatures"""
    d: int
    a: Tuple[float, ...]
    alpha: Tuple[float, ...]
    branching_rule: BranchingRule = BranchingRule.FLOOR
    explicit_counts: Optional[Dict[int, Tuple[int, ...]]] = field(default=None, compare=False)
    sigma: Tuple[float, ...] = field(init=False)

    def __post_init__(self):
        crit = tuple(math.sqrt(2.0 * math.log(al) / ak) for ak, al in zip(self.a, self.alpha))
        object.__setattr__(self, "sigma", crit)

    @property
    def log_alpha(self) -> Tuple[float, ...]:
        return tuple(math.log(al) for al in self.alpha)

    @property
    def total_variance(self) -> float:
        """a = a_1 + ... + a_d"""
        return float(sum(self.a))

    @property
    def log_total_alpha(self) -> float:
        """log alpha = log(alpha_1 * ... * alpha_d)"""
        return float(sum(self.log_alpha))

    def critical(self, k: int) -> float:
        """sigma_k with the convention sigma_{d+1} = +inf"""
        if k == self.d + 1:
            return math.inf
        if k == 0:
            return 0.0
        return self.sigma[k - 1]

    def partial_variance(self, l: int, m: int) -> float:
        """A_{l,m} = a_l + ... + a_m, zero when l > m"""
        if l > m:
            return 0.0
        return float(sum(self.a[l - 1:m]))


def build_model(d: int,
                a: Sequence[float],
                alpha: Sequence[float],
                branching_rule: Union[str, BranchingRule, Dict[str, Any]] = BranchingRule.FLOOR,
                explicit_counts: Optional[Dict[int, Sequence[int]]] = None) -> ModelParams:
    """
    Build and validate a GREM parameter set

    Args:
        d: Number of levels
        a: Level variances a_1..a_d (positive)
        alpha: Branching exponents alpha_1..alpha_d (> 1)
        branching_rule: 'floor', 'explicit', a BranchingRule, or the model-file
            form {"explicit": {n: [N_{n,1}, ...]}}
        explicit_counts: Tables for the explicit rule, keyed by n

    Returns:
        ModelParams with sigma_k computed

    Raises:
        InvalidParameter: wrong lengths, a_k <= 0 or alpha_k <= 1
        ConvexityViolation: sigma_1 < ... < sigma_d fails
    """
    if isinstance(branching_rule, dict):
        if "explicit" not in branching_rule:
            raise InvalidParameter(f"Unknown branching specification {branching_rule!r}")
        explicit_counts = branching_rule["explicit"]
        branching_rule = BranchingRule.EXPLICIT
    elif isinstance(branching_rule, str):
        try:
            branching_rule = BranchingRule(branching_rule.lower())
        except ValueError:
            raise InvalidParameter(f"Unknown branching rule {branching_rule!r}")

    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InvalidParameter(f"d must be an integer >= 1, got {d!r}")
    if len(a) != d or len(alpha) != d:
        raise InvalidParameter(f"a and alpha must have length d={d}, got {len(a)} and {len(alpha)}")

    a = tuple(float(x) for x in a)
    alpha = tuple(float(x) for x in alpha)
    for k, (ak, al) in enumerate(zip(a, alpha), start=1):
        if not math.isfinite(ak) or ak <= 0:
            raise InvalidParameter(f"a_{k} must be positive, got {ak}")
        if not math.isfinite(al) or al <= 1:
            raise InvalidParameter(f"alpha_{k} must exceed 1, got {al}")

    counts = None
    if branching_rule is BranchingRule.EXPLICIT:
        if not explicit_counts:
            raise InvalidParameter("Explicit branching rule needs N_{n,k} tables")
        counts = {}
        for key, row in explicit_counts.items():
            n = int(key)
            row = tuple(int(x) for x in row)
            if len(row) != d or any(x < 1 for x in row):
                raise InvalidParameter(f"Explicit counts for n={n} must be {d} positive integers")
            counts[n] = row

    model = ModelParams(d=d, a=a, alpha=alpha, branching_rule=branching_rule, explicit_counts=counts)

    for k in range(1, d):
        if not model.sigma[k - 1] < model.sigma[k]:
            raise ConvexityViolation(
                f"sigma ordering fails: sigma_{k}={model.sigma[k - 1]:.6g} "
                f">= sigma_{k + 1}={model.sigma[k]:.6g}; levels must satisfy sigma_1 < ... < sigma_d")

    logger.debug(f"Built GREM model d={d}, sigma={model.sigma}")
    return model


def load_model(path: str) -> ModelParams:
    """Read a model file {"d", "a", "alpha", "branching"}"""
    try:
        with open(path, "r") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ModelFileError(f"Cannot read model file {path}: {e}")
    if not isinstance(raw, dict):
        raise ModelFileError(f"Model file {path} must hold a JSON object")
    missing = [key for key in ("d", "a", "alpha") if key not in raw]
    if missing:
        raise ModelFileError(f"Model file {path} is missing {', '.join(missing)}")
    return build_model(raw["d"], raw["a"], raw["alpha"], raw.get("branching", "floor"))


def model_to_dict(model: ModelParams) -> Dict[str, Any]:
    if model.branching_rule is BranchingRule.EXPLICIT:
        branching: Any = {"explicit": {str(n): list(row) for n, row in model.explicit_counts.items()}}
    else:
        branching = "floor"
    return {"d": model.d, "a": list(model.a), "alpha": list(model.alpha), "branching": branching}


def _check_n(n: int):
    if not isinstance(n, (int,)) or isinstance(n, bool) or n < 1:
        raise InvalidParameter(f"n must be an integer >= 1, got {n!r}")


def branching_numbers(model: ModelParams,
                      n: int,
                      leaf_budget: Optional[int] = None,
                      enforce_budget: bool = True) -> Tuple[Tuple[int, ...], int]:
    """
    Branching numbers N_{n,1..d} and their product N_n

    Args:
        model: GREM parameters
        n: System size (>= 1)
        leaf_budget: Cap on N_n (defaults to the configured budget)
        enforce_budget: Refuse configurations above the budget

    Returns:
        (per-level counts, total count)

    Raises:
        InvalidParameter: n < 1 or no explicit table for n
        LeafBudgetExceeded: N_n above the leaf budget
    """
    _check_n(n)
    budget = get_leaf_budget(leaf_budget)

    if model.branching_rule is BranchingRule.EXPLICIT:
        if n not in model.explicit_counts:
            raise InvalidParameter(f"No explicit branching numbers for n={n}")
        counts = model.explicit_counts[n]
    else:
        if enforce_budget and n * model.log_total_alpha > math.log(budget) + 1.0:
            raise LeafBudgetExceeded(
                f"N_n ~ exp({n * model.log_total_alpha:.1f}) exceeds leaf budget {budget}")
        counts = tuple(int(math.floor(al ** n)) for al in model.alpha)

    total = 1
    for c in counts:
        total *= c
    if enforce_budget and total > budget:
        raise LeafBudgetExceeded(f"N_n={total} exceeds leaf budget {budget}")
    return counts, total


def log_branching_numbers(model: ModelParams, n: int) -> Tuple[float, ...]:
    """log N_{n,k} for every level, valid far beyond the leaf budget"""
    _check_n(n)
    if model.branching_rule is BranchingRule.EXPLICIT:
        counts, _ = branching_numbers(model, n, enforce_budget=False)
        return tuple(math.log(c) for c in counts)
    logs = []
    for lg in model.log_alpha:
        exponent = n * lg
        if exponent < _EXACT_FLOOR_LIMIT:
            logs.append(math.log(math.floor(math.exp(exponent))))
        else:
            logs.append(exponent)
    return tuple(logs)


def solve_u_log(log_n: float, max_iter: int = 100) -> float:
    """
    Solve sqrt(2 pi) u exp(u^2/2) = N for u > 0, given log N

    Newton's method on the logarithm of the defining relation,
    g(u) = log sqrt(2 pi) + log u + u^2/2 - log N, started from sqrt(2 log N).
    g is increasing on (0, inf), so the root is unique.

    Raises:
        InvalidParameter: N < 2
        NonConvergence: no convergence within max_iter iterations
    """
    if not log_n >= math.log(2.0) - 1e-15:
        raise InvalidParameter(f"solve_u needs N >= 2, got log N = {log_n}")

    def g(u: float) -> float:
        return LOG_SQRT_2PI + math.log(u) + 0.5 * u * u - log_n

    try:
        u = float(optimize.newton(g, math.sqrt(2.0 * log_n), fprime=lambda u: 1.0 / u + u,
                                  tol=1e-300, rtol=4.0 * np.finfo(float).eps, maxiter=max_iter))
    except (RuntimeError, ValueError) as e:
        raise NonConvergence(f"solve_u did not converge for log N = {log_n}: {e}")

    residual = math.expm1(LOG_SQRT_2PI + math.log(u) + 0.5 * u * u - log_n)
    if abs(residual) > 1e-12:
        raise NonConvergence(f"solve_u residual {residual:.3e} too large for log N = {log_n}")
    return u


def solve_u(N: float) -> float:
    """u with sqrt(2 pi) u exp(u^2/2) = N (relative residual <= 1e-12)"""
    if not N >= 2:
        raise InvalidParameter(f"solve_u needs N >= 2, got {N}")
    return solve_u_log(math.log(N))


def ring_index(model: ModelParams, beta: complex, tol: Optional[float] = None) -> Tuple[int, bool]:
    """
    Position of |beta| relative to the circles sigma_k / sqrt(2)

    Returns:
        (k, on_circle): k = #{j: sigma_j/sqrt(2) < |beta|}; when |beta| sits on
        the circle of level j within tol, k = j and on_circle is True
    """
    tol = get_boundary_tol() if tol is None else tol
    r2 = abs(beta) ** 2
    for j in range(1, model.d + 1):
        target = model.sigma[j - 1] ** 2 / 2.0
        if abs(r2 - target) <= tol * max(1.0, target):
            return j, True
    k = sum(1 for s in model.sigma if s * s / 2.0 < r2)
    return k, False


def _level_label(model: ModelParams, beta: complex, k: int):
    # local import: phase depends on this module
    from phase import classify_level
    return classify_level(model, beta, k)


def beak_geometry(model: ModelParams, beta_star: complex, l: int, tol: float = 1e-9):
    """Raise GeometryError unless beta* lies on the beak of level l"""
    if not 1 <= l <= model.d:
        raise InvalidParameter(f"level l must be in 1..{model.d}, got {l}")
    s, t = beta_star.real, beta_star.imag
    sl = model.sigma[l - 1]
    if not (s > sl / 2.0 and t > 0 and abs(s + t - sl) <= tol * max(1.0, sl)):
        raise GeometryError(
            f"beta*={beta_star} is not on the beak of level {l}: need sigma*>{sl / 2:.6g}, "
            f"tau*>0 and sigma*+tau*={sl:.6g}")


class Normalizers:
    """
    Normalizing sequences of a GREM at fixed n

    The u table solves N_{n,k} = sqrt(2 pi) u e^{u^2/2} exactly. Each builder
    evaluates its defining formula with the exact finite-n branching numbers.
    """

    def __init__(self, model: ModelParams, n: int):
        _check_n(n)
        self.model = model
        self.n = n
        self.log_counts = log_branching_numbers(model, n)
        self._u: Dict[int, float] = {}

    def u(self, k: int) -> float:
        """u_{n,k}"""
        if k not in self._u:
            self._u[k] = solve_u_log(self.log_counts[k - 1])
        return self._u[k]

    @property
    def u_table(self) -> Tuple[float, ...]:
        return tuple(self.u(k) for k in range(1, self.model.d + 1))

    def _scale(self, k: int) -> float:
        return math.sqrt(self.n * self.model.a[k - 1])

    # -- fluctuation normalizers c_{n,k} ----------------------------------

    def c_level(self, beta: complex, k: int, t: complex = 0.0) -> complex:
        """
        c_{n,k}(beta*; t) with local coordinate beta* + t/sqrt(n)

        t = 0 gives c_{n,k}(beta). For sigma < 0 the glassy term carries
        sgn(sigma), the reflection beta -> -beta being a symmetry in law.
        """
        from phase import LevelPhase
        label = _level_label(self.model, beta, k)
        ak = self.model.a[k - 1]
        log_nk = self.log_counts[k - 1]
        rt = math.sqrt(self.n)
        if label is LevelPhase.G:
            sign = -1.0 if beta.real < 0 else 1.0
            return sign * (beta + t / rt) * self._scale(k) * self.u(k)
        if label is LevelPhase.F:
            return 0.5 * log_nk + ak * (rt * abs(beta.real) + (t if beta.real >= 0 else -t)) ** 2
        if label is LevelPhase.E:
            return log_nk + 0.5 * ak * (rt * beta + t) ** 2
        raise PhaseBoundary(f"c_(n,{k}) undefined: beta={beta} lies on a {label.value} boundary of level {k}")

    def c_n(self, beta: complex, t: complex = 0.0) -> complex:
        return sum(self.c_level(beta, k, t) for k in range(1, self.model.d + 1))

    def c_tilde(self, beta: complex, t: complex = 0.0) -> complex:
        """c_n without the first level"""
        return sum(self.c_level(beta, k, t) for k in range(2, self.model.d + 1))

    # -- covariance-window normalizers g_n --------------------------------

    def g_level(self, beta_star: complex, l: int, t: complex = 0.0, first_branch: Optional[bool] = None) -> complex:
        ak = self.model.a[l - 1]
        log_nl = self.log_counts[l - 1]
        rt = math.sqrt(self.n)
        if first_branch is None:
            threshold = self.model.sigma[l - 1] / math.sqrt(2.0)
            gap = abs(beta_star) - threshold
            if abs(gap) <= get_boundary_tol() * max(1.0, threshold):
                raise PhaseBoundary(f"g_(n,{l}) undefined on the circle |beta*|={threshold:.6g}")
            first_branch = gap > 0
        if first_branch:
            return 0.5 * log_nl + ak * (rt * beta_star.real + t) ** 2
        return log_nl + 0.5 * ak * (rt * beta_star + t) ** 2

    def g_n(self, beta_star: complex, t: complex = 0.0) -> complex:
        return sum(self.g_level(beta_star, l, t) for l in range(1, self.model.d + 1))

    def g_hat(self, beta_star: complex, t: complex = 0.0) -> complex:
        """g-hat: first branch on level 1, second branch on levels 2..d"""
        total = self.g_level(beta_star, 1, t, first_branch=True)
        for l in range(2, self.model.d + 1):
            total += self.g_level(beta_star, l, t, first_branch=False)
        return total

    # -- beak boundary -----------------------------------------------------

    def d_nl(self, beta_star: complex, l: int) -> complex:
        """
        d_{n,l}: the representative with |Im d| <= pi of the class
        -beta* log(4 pi n log alpha_l) / (2 sigma_l) + i n a_l tau*^2 + 2 pi i Z
        """
        beak_geometry(self.model, beta_star, l)
        sl = self.model.sigma[l - 1]
        raw = (-beta_star * math.log(4.0 * math.pi * self.n * self.model.log_alpha[l - 1]) / (2.0 * sl)
               + 1j * self.n * self.model.a[l - 1] * beta_star.imag ** 2)
        m = round(raw.imag / (2.0 * math.pi))
        return raw - 2j * math.pi * m

    def beak_window(self, beta_star: complex, l: int, t: complex = 0.0) -> complex:
        """beta_{n,l}(t) = beta* + e^{-3 pi i/4} (d_{n,l} + t) / (sqrt(2) a_l tau* n)"""
        d = self.d_nl(beta_star, l)
        rotation = cmath.exp(-0.75j * math.pi)
        return beta_star + rotation * (d + t) / (math.sqrt(2.0) * self.model.a[l - 1] * beta_star.imag * self.n)

    def h_nl(self, beta_star: complex, l: int, t: complex = 0.0) -> complex:
        b = self.beak_window(beta_star, l, t)
        total = b * sum(self._scale(j) * self.u(j) for j in range(1, l + 1))
        for j in range(l + 1, self.model.d + 1):
            total += self.log_counts[j - 1] + 0.5 * b * b * self.n * self.model.a[j - 1]
        return total

    def h_hat(self, beta_star: complex, l: int) -> complex:
        """Normalizer exactly on the beak: glassy levels < l, expectation levels >= l"""
        beak_geometry(self.model, beta_star, l)
        total = beta_star * sum(self._scale(j) * self.u(j) for j in range(1, l))
        for j in range(l, self.model.d + 1):
            total += self.log_counts[j - 1] + 0.5 * beta_star ** 2 * self.n * self.model.a[j - 1]
        return total

    # -- arc boundary and fluctuation boundary ------------------------------

    def arc_levels(self, beta_star: complex, tol: float = 1e-9) -> Tuple[int, int]:
        """(d1, d2) for beta* on the arc |beta*|^2 = sigma_{d1+d2}^2 / 2"""
        s = abs(beta_star.real)
        d1 = sum(1 for sj in self.model.sigma if sj < 2.0 * s)
        k, on_circle = ring_index(self.model, beta_star, tol)
        if not on_circle or k <= d1:
            raise GeometryError(f"beta*={beta_star} is not on an E/F arc of the phase diagram")
        return d1, k - d1

    def f_n(self, beta_star: complex, t: complex = 0.0) -> complex:
        d1, d2 = self.arc_levels(beta_star)
        s = beta_star.real
        total = (beta_star + t / self.n) * sum(self._scale(j) * self.u(j) for j in range(1, d1 + 1))
        for j in range(d1 + 1, d1 + d2 + 1):
            total += 0.5 * self.log_counts[j - 1] + self.model.a[j - 1] * s * s * self.n
        for j in range(d1 + d2 + 1, self.model.d + 1):
            total += self.log_counts[j - 1] + 0.5 * self.model.a[j - 1] * beta_star ** 2 * self.n
        return total

    def r_n(self, beta: complex, tol: float = 1e-9) -> complex:
        """Normalizer on the line sigma = sigma_l / 2, |tau| >= sigma_l / 2"""
        s, t = beta.real, abs(beta.imag)
        l = None
        for j, sj in enumerate(self.model.sigma, start=1):
            if abs(s - sj / 2.0) <= tol * max(1.0, sj):
                l = j
                break
        if l is None:
            raise GeometryError(f"beta={beta} does not satisfy sigma = sigma_l/2 for any level")
        half = self.model.sigma[l - 1] / 2.0
        if t < half - tol:
            raise GeometryError(f"beta={beta} needs |tau| >= sigma_{l}/2 = {half:.6g}")

        extra = 0.0
        if abs(t - half) <= tol * max(1.0, half):
            k = l
        else:
            k, on_circle = ring_index(self.model, beta, tol)
            if on_circle and k > l:
                extra = 0.5 * math.log(2.0)
            k = max(k, l)

        total = beta * sum(self._scale(j) * self.u(j) for j in range(1, l))
        for j in range(l, k + 1):
            total += 0.5 * self.log_counts[j - 1] + self.model.a[j - 1] * s * s * self.n
        for j in range(k + 1, self.model.d + 1):
            total += self.log_counts[j - 1] + 0.5 * beta * beta * self.n * self.model.a[j - 1]
        return total + extra


NORMALIZER_KINDS = ("c_n", "c_tilde", "c_nk", "g_n", "g_hat", "d_nl", "h_nl", "h_hat", "f_n", "r_n")


def normalizer(model: ModelParams,
               n: int,
               kind: str,
               beta: Union[complex, ComplexTemp],
               t: complex = 0.0,
               level: Optional[int] = None) -> complex:
    """
    Evaluate one normalizing sequence

    Args:
        model: GREM parameters
        n: System size
        kind: One of NORMALIZER_KINDS
        beta: beta, or the window centre beta* for window kinds
        t: Local coordinate for window kinds
        level: Level index for c_nk, d_nl, h_nl and h_hat

    Returns:
        Complex value of the normalizer

    Raises:
        UnknownKind, PhaseBoundary, GeometryError
    """
    beta = as_complex(beta)
    norms = Normalizers(model, n)
    needs_level = kind in ("c_nk", "d_nl", "h_nl", "h_hat")
    if needs_level and level is None:
        raise InvalidParameter(f"normalizer kind {kind} needs a level")

    if kind == "c_n":
        return norms.c_n(beta, t)
    if kind == "c_tilde":
        return norms.c_tilde(beta, t)
    if kind == "c_nk":
        return norms.c_level(beta, level, t)
    if kind == "g_n":
        return norms.g_n(beta, t)
    if kind == "g_hat":
        return norms.g_hat(beta, t)
    if kind == "d_nl":
        return norms.d_nl(beta, level)
    if kind == "h_nl":
        return norms.h_nl(beta, level, t)
    if kind == "h_hat":
        return norms.h_hat(beta, level)
    if kind == "f_n":
        return norms.f_n(beta, t)
    if kind == "r_n":
        return norms.r_n(beta)
    raise UnknownKind(f"Unknown normalizer kind {kind!r}; expected one of {', '.join(NORMALIZER_KINDS)}")


def effective_zeta_argument(model: ModelParams, n: int, beta: complex, levels: int) -> Tuple[complex, ...]:
    """
    Finite-n counterpart (beta sqrt(n a_k) / u_{n,k})_k of (beta / sigma_k)_k

    Z_n(beta) / e^{c_n} is exactly a sum of P^{-z} over the rescaled extremes
    P = e^{-u (xi - u)}, with this z; it tends to beta / sigma_k as n grows.
    """
    beta = as_complex(beta)
    if beta.real < 0:
        beta = -beta
    norms = Normalizers(model, n)
    return tuple(beta * norms._scale(k) / norms.u(k) for k in range(1, levels + 1))


def level_words(d: int) -> List[str]:
    """All admissible composite phase words G^{d1} F^{d2} E^{d3}"""
    words = []
    for d1 in range(d + 1):
        for d2 in range(d - d1 + 1):
            words.append("G" * d1 + "F" * d2 + "E" * (d - d1 - d2))
    return words
