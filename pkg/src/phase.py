#!/usr/bin/env python3
"""
Phase Diagram of the Complex-Temperature GREM

Classifies complex inverse temperatures level by level into the glassy (G),
fluctuation (F) and expectation (E) phases, evaluates the limiting
log-partition function p(beta), the zero-density measure Xi = Laplacian of p,
and the continuous-hierarchy (CREM) limit driven by a concave profile A(t).
All grid routines are vectorised with numpy and agree with the scalar ones.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from config import get_boundary_tol
from errors import DegenerateProfile, InvalidParameter, ModelFileError
from model import ModelParams, as_complex, build_model

logger = logging.getLogger(__name__)

Rectangle = Tuple[float, float, float, float]   # (sigma_min, sigma_max, tau_min, tau_max)


class LevelPhase(Enum):
    """Phase of a single level k at beta"""
    G = "G"
    F = "F"
    E = "E"
    BOUNDARY_EF = "EF"
    BOUNDARY_EG = "EG"
    BOUNDARY_FG = "FG"
    TRIPLE_POINT = "GFE"

    @property
    def is_open(self) -> bool:
        return self in (LevelPhase.G, LevelPhase.F, LevelPhase.E)


# integer codes used by the grid routines
_CODES: Tuple[LevelPhase, ...] = tuple(LevelPhase)
_CODE = {label: i for i, label in enumerate(_CODES)}
_OPEN_CODES = (_CODE[LevelPhase.G], _CODE[LevelPhase.F], _CODE[LevelPhase.E])


@dataclass(frozen=True)
class CompositePhase:
    """Per-level labels; (d1, d2, d3) when every level is open"""
    labels: Tuple[LevelPhase, ...]

    @property
    def is_open(self) -> bool:
        return all(label.is_open for label in self.labels)

    @property
    def word(self) -> str:
        return "".join(label.value if label.is_open else f"[{label.value}]" for label in self.labels)

    @property
    def counts(self) -> Optional[Tuple[int, int, int]]:
        if not self.is_open:
            return None
        return (sum(1 for x in self.labels if x is LevelPhase.G),
                sum(1 for x in self.labels if x is LevelPhase.F),
                sum(1 for x in self.labels if x is LevelPhase.E))

    @property
    def ordered(self) -> bool:
        """No E before F or G and no F before G among the open labels"""
        rank = {LevelPhase.G: 0, LevelPhase.F: 1, LevelPhase.E: 2}
        ranks = [rank[x] for x in self.labels if x.is_open]
        return all(r1 <= r2 for r1, r2 in zip(ranks, ranks[1:]))


@dataclass
class LineComponent:
    """A boundary curve of level k near beta, with the linear density of Xi there"""
    kind: LevelPhase
    level: int
    nearest: complex
    distance: float
    density: float


@dataclass
class ZeroDensity:
    area_density: float
    lines: List[LineComponent] = field(default_factory=list)


def _level_codes(sigma_k: float, s: np.ndarray, t: np.ndarray, tol: float) -> np.ndarray:
    """Vectorised level classification; s, t are |sigma|, |tau|"""
    eps = tol * max(1.0, sigma_k * sigma_k)
    half = sigma_k / 2.0
    on_fg = np.abs(2.0 * s - sigma_k) <= eps
    on_eg = np.abs(s + t - sigma_k) <= eps
    on_ef = np.abs(2.0 * (s * s + t * t) - sigma_k * sigma_k) <= eps
    triple = on_fg & (np.abs(t - half) <= eps)

    g = (2.0 * s > sigma_k) & (s + t > sigma_k)
    f = (2.0 * s < sigma_k) & (2.0 * (s * s + t * t) > sigma_k * sigma_k)

    codes = np.full(np.shape(s), _CODE[LevelPhase.E], dtype=np.int8)
    codes = np.where(f, _CODE[LevelPhase.F], codes)
    codes = np.where(g, _CODE[LevelPhase.G], codes)
    codes = np.where(on_ef & (s < half), _CODE[LevelPhase.BOUNDARY_EF], codes)
    codes = np.where(on_eg & (s > half), _CODE[LevelPhase.BOUNDARY_EG], codes)
    codes = np.where(on_fg & (t > half), _CODE[LevelPhase.BOUNDARY_FG], codes)
    codes = np.where(triple, _CODE[LevelPhase.TRIPLE_POINT], codes)
    return codes


def classify_level(model: ModelParams, beta, k: int, tol: Optional[float] = None) -> LevelPhase:
    """
    Phase of level k at beta

    G if 2|sigma| > sigma_k and |sigma|+|tau| > sigma_k; F if 2|sigma| < sigma_k
    and 2(sigma^2+tau^2) > sigma_k^2; E on the rest of the open complement.
    Boundary labels are given when a defining equality holds within tol.
    """
    if not 1 <= k <= model.d:
        raise InvalidParameter(f"level k must be in 1..{model.d}, got {k}")
    beta = as_complex(beta)
    tol = get_boundary_tol() if tol is None else tol
    code = _level_codes(model.sigma[k - 1], np.asarray(abs(beta.real)), np.asarray(abs(beta.imag)), tol)
    return _CODES[int(code)]


def classify(model: ModelParams, beta, tol: Optional[float] = None) -> CompositePhase:
    labels = tuple(classify_level(model, beta, k, tol) for k in range(1, model.d + 1))
    phase = CompositePhase(labels)
    if not phase.ordered:
        # cannot happen for sigma_1 < ... < sigma_d
        logger.error(f"Level phase ordering violated at beta={as_complex(beta)}: {phase.word}")
    return phase


def level_log_partition(model: ModelParams, beta, k: int) -> float:
    """p_k(beta); boundaries take an adjacent case formula (they agree)"""
    beta = as_complex(beta)
    return float(_level_p(model, k, np.asarray(abs(beta.real)), np.asarray(abs(beta.imag))))


def _level_p(model: ModelParams, k: int, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    sk = model.sigma[k - 1]
    ak = model.a[k - 1]
    lg = model.log_alpha[k - 1]
    in_g = (2.0 * s >= sk) & (s + t >= sk)
    in_f = (2.0 * s <= sk) & (2.0 * (s * s + t * t) >= sk * sk)
    p_g = s * math.sqrt(2.0 * ak * lg)
    p_f = 0.5 * lg + ak * s * s
    p_e = lg + 0.5 * ak * (s * s - t * t)
    return np.where(in_g, p_g, np.where(in_f, p_f, p_e))


def log_partition_limit(model: ModelParams, beta) -> float:
    """p(beta) = sum_k p_k(beta), the limit of (1/n) log |Z_n(beta)|"""
    beta = as_complex(beta)
    return sum(level_log_partition(model, beta, k) for k in range(1, model.d + 1))


def real_log_partition(model: ModelParams, sigma: float) -> float:
    """Real-temperature free energy: glassy levels with sigma_k <= |sigma|, annealed above"""
    s = abs(sigma)
    total = 0.0
    for ak, lg, sk in zip(model.a, model.log_alpha, model.sigma):
        if sk <= s:
            total += s * math.sqrt(2.0 * ak * lg)
        else:
            total += lg + 0.5 * ak * s * s
    return total


# -- grids ----------------------------------------------------------------

def grid_axes(rectangle: Rectangle, nx: int, ny: int) -> Tuple[np.ndarray, np.ndarray]:
    xmin, xmax, ymin, ymax = rectangle
    if nx < 1 or ny < 1 or xmin > xmax or ymin > ymax:
        raise InvalidParameter(f"Bad grid {rectangle} with {nx}x{ny} points")
    return np.meshgrid(np.linspace(xmin, xmax, nx), np.linspace(ymin, ymax, ny))


def level_codes_grid(model: ModelParams, S: np.ndarray, T: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Array of level-phase codes with shape (d,) + S.shape"""
    tol = get_boundary_tol() if tol is None else tol
    s, t = np.abs(S), np.abs(T)
    return np.stack([_level_codes(sk, s, t, tol) for sk in model.sigma])


def labels_from_codes(codes: np.ndarray) -> List[str]:
    return [_CODES[int(c)].value for c in codes]


def composite_counts_grid(codes: np.ndarray) -> np.ndarray:
    """(d1, d2, d3) per point, -1 where some level sits on a boundary"""
    is_open = np.isin(codes, _OPEN_CODES).all(axis=0)
    counts = np.stack([(codes == _CODE[lbl]).sum(axis=0) for lbl in (LevelPhase.G, LevelPhase.F, LevelPhase.E)])
    return np.where(is_open, counts, -1)


def log_partition_grid(model: ModelParams, S: np.ndarray, T: np.ndarray) -> np.ndarray:
    s, t = np.abs(S), np.abs(T)
    return sum(_level_p(model, k, s, t) for k in range(1, model.d + 1))


def area_density_grid(model: ModelParams, S: np.ndarray, T: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    codes = level_codes_grid(model, S, T, tol)
    density = np.zeros(np.shape(S))
    for k in range(model.d):
        density = density + np.where(codes[k] == _CODE[LevelPhase.F], 2.0 * model.a[k], 0.0)
    return density


@dataclass
class CensusReport:
    words: Set[str]
    open_points: int
    boundary_points: int
    ordered: bool

    @property
    def phase_count(self) -> int:
        return len(self.words)


def phase_census(model: ModelParams, rectangle: Rectangle = (-3.0, 3.0, -3.0, 3.0),
                 nx: int = 400, ny: int = 400) -> CensusReport:
    """Distinct open composite phases met on a grid; boundary points are excluded"""
    S, T = grid_axes(rectangle, nx, ny)
    codes = level_codes_grid(model, S, T)
    counts = composite_counts_grid(codes)
    is_open = counts[0] >= 0

    # order check: along the levels the open ranks G=0, F=1, E=2 never decrease
    rank = np.select([codes == _CODE[LevelPhase.G], codes == _CODE[LevelPhase.F]], [0, 1], default=2)
    ordered = bool(np.all(np.diff(rank[:, is_open], axis=0) >= 0))

    words = set()
    for d1, d2, d3 in np.unique(counts[:, is_open].T, axis=0):
        words.add("G" * int(d1) + "F" * int(d2) + "E" * int(d3))
    report = CensusReport(words=words, open_points=int(is_open.sum()),
                          boundary_points=int((~is_open).sum()), ordered=ordered)
    logger.info(f"Phase census: {report.phase_count} open phases on {nx}x{ny} grid, ordered={ordered}")
    return report


# -- zero density ---------------------------------------------------------

def line_density(model: ModelParams, k: int, kind: LevelPhase, tau: float = 0.0) -> float:
    """Linear density of Xi on a level-k boundary curve"""
    ak = model.a[k - 1]
    if kind is LevelPhase.BOUNDARY_EF:
        return math.sqrt(ak * model.log_alpha[k - 1])
    if kind is LevelPhase.BOUNDARY_EG:
        return math.sqrt(2.0) * ak * abs(tau)
    if kind in (LevelPhase.BOUNDARY_FG, LevelPhase.TRIPLE_POINT):
        return 0.0
    raise InvalidParameter(f"{kind} is not a boundary curve")


def _nearest_on_curves(sk: float, s: float, t: float) -> Dict[LevelPhase, Tuple[float, float]]:
    """Nearest points (first quadrant) on the EF arc, EG segment and FG ray of one level"""
    half = sk / 2.0
    radius = sk / math.sqrt(2.0)
    theta = math.atan2(t, s) if (s or t) else math.pi / 2.0
    theta = min(max(theta, math.pi / 4.0), math.pi / 2.0)
    ef = (radius * math.cos(theta), radius * math.sin(theta))

    x = 0.5 * (s - t + sk)
    x = min(max(x, half), sk)
    eg = (x, sk - x)

    fg = (half, max(t, half))
    return {LevelPhase.BOUNDARY_EF: ef, LevelPhase.BOUNDARY_EG: eg, LevelPhase.BOUNDARY_FG: fg}


def zero_density(model: ModelParams, beta, tol: Optional[float] = None) -> ZeroDensity:
    """
    Xi at beta: area density sum_{k: beta in F_k} 2 a_k, plus the boundary
    curves of every level sorted by distance, each with its linear density
    """
    beta = as_complex(beta)
    s, t = abs(beta.real), abs(beta.imag)
    area = sum(2.0 * model.a[k - 1] for k in range(1, model.d + 1)
               if classify_level(model, beta, k, tol) is LevelPhase.F)

    lines = []
    for k, sk in enumerate(model.sigma, start=1):
        for kind, (x, y) in _nearest_on_curves(sk, s, t).items():
            # report the nearest point in the quadrant of beta
            point = complex(math.copysign(x, beta.real or 1.0), math.copysign(y, beta.imag or 1.0))
            lines.append(LineComponent(kind=kind, level=k, nearest=point,
                                       distance=math.hypot(x - s, y - t),
                                       density=line_density(model, k, kind, y)))
    lines.sort(key=lambda c: c.distance)
    return ZeroDensity(area_density=area, lines=lines)


# -- Laplacian identity ---------------------------------------------------

@dataclass
class JumpSample:
    kind: LevelPhase
    level: int
    point: complex
    measured: float
    expected: float

    @property
    def error(self) -> float:
        return abs(self.measured - self.expected)


@dataclass
class LaplacianReport:
    grid_h: float
    interior_points: int
    interior_max_error: float
    jumps: List[JumpSample]

    @property
    def max_jump_error(self) -> float:
        return max((j.error for j in self.jumps), default=0.0)

    def passed(self, interior_tol: float = 1e-4, jump_tol: float = 1e-6) -> bool:
        return self.interior_max_error <= interior_tol and self.max_jump_error <= jump_tol


def _p_point(model: ModelParams, s: float, t: float) -> float:
    return float(log_partition_grid(model, np.asarray(s), np.asarray(t)))


def _curve_samples(sk: float, kind: LevelPhase, count: int) -> List[Tuple[float, float, float, float]]:
    """Points (s, t) on one curve in the first quadrant with a unit normal (ns, nt)"""
    half = sk / 2.0
    out = []
    for i in range(1, count + 1):
        frac = i / (count + 1.0)
        if kind is LevelPhase.BOUNDARY_EF:
            theta = math.pi / 4.0 + frac * math.pi / 4.0
            r = sk / math.sqrt(2.0)
            out.append((r * math.cos(theta), r * math.sin(theta), math.cos(theta), math.sin(theta)))
        elif kind is LevelPhase.BOUNDARY_EG:
            x = half + frac * half
            out.append((x, sk - x, 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)))
        else:
            out.append((half, half * (1.0 + 3.0 * frac), 1.0, 0.0))
    return out


def laplacian_check(model: ModelParams, rectangle: Rectangle, grid_h: float,
                    samples_per_curve: int = 16) -> LaplacianReport:
    """
    Compare the finite-difference Laplacian of p with Xi

    Interior: five-point Laplacian on grid points whose whole stencil shares
    one open composite phase, against the area density. Boundaries: the jump
    of the normal derivative across sampled curve points, measured with
    second-order one-sided differences, against the linear density.

    Args:
        model: GREM parameters
        rectangle: (sigma_min, sigma_max, tau_min, tau_max), origin excluded
        grid_h: Grid spacing and one-sided step
        samples_per_curve: Boundary points tried per curve and quadrant

    Returns:
        LaplacianReport
    """
    xmin, xmax, ymin, ymax = rectangle
    if grid_h <= 0:
        raise InvalidParameter(f"grid_h must be positive, got {grid_h}")
    if xmin <= 0.0 <= xmax and ymin <= 0.0 <= ymax:
        raise InvalidParameter(f"rectangle {rectangle} must avoid the origin")

    nx = int(round((xmax - xmin) / grid_h)) + 1
    ny = int(round((ymax - ymin) / grid_h)) + 1
    xs = xmin + grid_h * np.arange(nx)
    ys = ymin + grid_h * np.arange(ny)
    S, T = np.meshgrid(xs, ys)
    P = log_partition_grid(model, S, T)
    codes = level_codes_grid(model, S, T)

    lap = (P[1:-1, 2:] + P[1:-1, :-2] + P[2:, 1:-1] + P[:-2, 1:-1] - 4.0 * P[1:-1, 1:-1]) / grid_h ** 2
    centre = codes[:, 1:-1, 1:-1]
    clean = np.isin(centre, _OPEN_CODES).all(axis=0)
    for shifted in (codes[:, 1:-1, 2:], codes[:, 1:-1, :-2], codes[:, 2:, 1:-1], codes[:, :-2, 1:-1]):
        clean &= (shifted == centre).all(axis=0)
    area = np.zeros_like(lap)
    for k in range(model.d):
        area += np.where(centre[k] == _CODE[LevelPhase.F], 2.0 * model.a[k], 0.0)
    errors = np.abs(lap - area)[clean]
    interior_max = float(errors.max()) if errors.size else 0.0

    jumps = []
    h = grid_h
    for k, sk in enumerate(model.sigma, start=1):
        for kind in (LevelPhase.BOUNDARY_EF, LevelPhase.BOUNDARY_EG, LevelPhase.BOUNDARY_FG):
            for s, t, ns, nt in _curve_samples(sk, kind, samples_per_curve):
                for qs, qt in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
                    x, y = qs * s, qt * t
                    if not (xmin <= x <= xmax and ymin <= y <= ymax):
                        continue
                    vx, vy = qs * ns, qt * nt
                    offsets = (-2, -1, 1, 2)
                    around = np.array([[x + j * h * vx for j in offsets], [y + j * h * vy for j in offsets]])
                    near = level_codes_grid(model, around[0], around[1])
                    if not np.isin(near, _OPEN_CODES).all():
                        continue
                    # other levels smooth; level k constant on each side
                    others = np.delete(near, k - 1, axis=0)
                    if not (others == others[:, :1]).all():
                        continue
                    if near[k - 1, 0] != near[k - 1, 1] or near[k - 1, 2] != near[k - 1, 3]:
                        continue
                    f0 = _p_point(model, x, y)
                    fp1 = _p_point(model, x + h * vx, y + h * vy)
                    fp2 = _p_point(model, x + 2 * h * vx, y + 2 * h * vy)
                    fm1 = _p_point(model, x - h * vx, y - h * vy)
                    fm2 = _p_point(model, x - 2 * h * vx, y - 2 * h * vy)
                    d_plus = (-3.0 * f0 + 4.0 * fp1 - fp2) / (2.0 * h)
                    d_minus = (-3.0 * f0 + 4.0 * fm1 - fm2) / (2.0 * h)
                    jumps.append(JumpSample(kind=kind, level=k, point=complex(x, y),
                                            measured=d_plus + d_minus,
                                            expected=line_density(model, k, kind, t)))

    report = LaplacianReport(grid_h=grid_h, interior_points=int(clean.sum()),
                             interior_max_error=interior_max, jumps=jumps)
    logger.info(f"Laplacian check h={grid_h}: interior max error {interior_max:.3e} on "
                f"{report.interior_points} points, {len(jumps)} jumps, max jump error {report.max_jump_error:.3e}")
    return report


# -- continuous hierarchy (CREM) -------------------------------------------

@dataclass(frozen=True)
class CremProfile:
    """Piecewise-linear increasing concave profile A on [0, 1] with A(0) = 0"""
    knots: Tuple[float, ...]
    values: Tuple[float, ...]
    alpha: float

    def __post_init__(self):
        t = np.asarray(self.knots, dtype=float)
        A = np.asarray(self.values, dtype=float)
        if t.size < 2 or t.size != A.size:
            raise InvalidParameter("CREM profile needs at least 2 knots with matching values")
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise InvalidParameter("CREM knots must increase strictly from 0 to 1")
        if A[0] != 0.0:
            raise InvalidParameter(f"CREM profile needs A(0)=0, got {A[0]}")
        if not self.alpha > 1:
            raise InvalidParameter(f"CREM alpha must exceed 1, got {self.alpha}")
        slopes = np.diff(A) / np.diff(t)
        if slopes[0] <= 0:
            raise DegenerateProfile("A' vanishes on an initial interval")
        if np.any(slopes < 0):
            raise InvalidParameter("CREM profile A must be increasing")
        if np.any(np.diff(slopes) > 1e-12 * max(1.0, float(slopes[0]))):
            raise InvalidParameter("CREM profile A must be concave (A' nonincreasing)")

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(np.asarray(self.values)) / np.diff(np.asarray(self.knots))

    @property
    def segment_sigma(self) -> np.ndarray:
        """sigma_t on each segment; +inf where A' = 0"""
        with np.errstate(divide="ignore"):
            return np.sqrt(2.0 * math.log(self.alpha) / self.slopes)

    def A(self, t: float) -> float:
        return float(np.interp(t, self.knots, self.values))

    def sigma_at(self, t: float) -> float:
        idx = min(int(np.searchsorted(self.knots, t, side="right")) - 1, len(self.knots) - 2)
        return float(self.segment_sigma[max(idx, 0)])

    def sqrt_slope_integral(self, upper: float) -> float:
        """Exact integral of sqrt(A'(t)) over [0, upper]"""
        t = np.asarray(self.knots)
        lengths = np.clip(np.minimum(t[1:], upper) - t[:-1], 0.0, None)
        return float(np.sum(np.sqrt(self.slopes) * lengths))


def load_profile(path: str, alpha: float) -> CremProfile:
    """
    Profile file: {"t": [...], "A": [...]} or {"knots": [[t, A], ...]}

    Raises:
        ModelFileError: unreadable file, missing keys or non-numeric knots
    """
    try:
        with open(path, "r") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ModelFileError(f"Cannot read profile {path}: {e}")
    if not isinstance(raw, dict):
        raise ModelFileError(f"Profile {path} must hold a JSON object")
    try:
        if "knots" in raw:
            t, A = zip(*raw["knots"])
        else:
            t, A = raw["t"], raw["A"]
        t = tuple(float(x) for x in t)
        A = tuple(float(x) for x in A)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFileError(f"Malformed profile {path}: {e!r}")
    return CremProfile(t, A, float(alpha))


@dataclass
class CremResult:
    p_infty: float
    gamma1: float
    gamma2: float
    gamma3: float
    p_glassy: float
    p_fluct: float
    p_expect: float

    @property
    def label(self) -> str:
        return "".join(c for c, g in zip("GFE", (self.gamma1, self.gamma2, self.gamma3)) if g > 0)

    def to_dict(self) -> Dict[str, float]:
        return {"p_infty": self.p_infty, "gamma1": self.gamma1, "gamma2": self.gamma2,
                "gamma3": self.gamma3, "phase": self.label}


def crem_log_partition(profile: CremProfile, beta) -> CremResult:
    """
    Limit log-partition function of the continuous hierarchy

    gamma1 = sup{t: beta in G_t}, gamma1 + gamma2 = inf{t: beta in E_t}
    (1 when beta is never in E_t). sigma_t is a nondecreasing step function,
    so both thresholds are found by binary search over the knots.
    """
    beta = as_complex(beta)
    s, u = abs(beta.real), abs(beta.imag)
    g = min(2.0 * s, s + u)
    h = s + u if u <= s else math.sqrt(2.0) * abs(beta)

    knots = np.asarray(profile.knots)
    sig = profile.segment_sigma
    i1 = int(np.searchsorted(sig, g, side="left"))
    i2 = int(np.searchsorted(sig, h, side="right"))
    gamma1 = float(knots[i1]) if i1 < sig.size else 1.0
    gamma12 = float(knots[i2]) if i2 < sig.size else 1.0
    gamma12 = max(gamma12, gamma1)

    log_alpha = math.log(profile.alpha)
    p_g = s * math.sqrt(2.0 * log_alpha) * profile.sqrt_slope_integral(gamma1)
    p_f = 0.5 * log_alpha * (gamma12 - gamma1) + s * s * (profile.A(gamma12) - profile.A(gamma1))
    p_e = log_alpha * (1.0 - gamma12) + 0.5 * (s * s - u * u) * (profile.A(1.0) - profile.A(gamma12))
    return CremResult(p_infty=p_g + p_f + p_e, gamma1=gamma1, gamma2=gamma12 - gamma1,
                      gamma3=1.0 - gamma12, p_glassy=p_g, p_fluct=p_f, p_expect=p_e)


def crem_as_grem(profile: CremProfile, d: int) -> ModelParams:
    """d-level GREM with a_1+...+a_k = A(k/d) and log alpha_k = log(alpha)/d"""
    cuts = [profile.A(k / d) for k in range(d + 1)]
    a = [cuts[k] - cuts[k - 1] for k in range(1, d + 1)]
    alpha = [profile.alpha ** (1.0 / d)] * d
    return build_model(d, a, alpha)
