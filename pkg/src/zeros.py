#!/usr/bin/env python3
"""
Zeros of Sampled Partition Functions

Locates every zero of one realisation of Z_n(beta) inside a rectangle with
the argument principle: the winding number of Z_n along the cell boundary is
obtained by phase tracking on an adaptively refined contour, cells are
quadrisected until each holds at most one zero, and zeros are polished by
Newton's method with the exact derivative. Also compares empirical zero
statistics with the limiting density Xi and the boundary spacing laws.
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config import get_threads, get_zero_tol
from errors import BoundaryZero, InvalidParameter, NonConvergence, NonIntegerWinding
from model import ModelParams, Normalizers, as_complex, beak_geometry
from phase import LevelPhase, area_density_grid, classify_level, log_partition_limit
from simulate import LeafField, sample_leaf_field

logger = logging.getLogger(__name__)

Rectangle = Tuple[float, float, float, float]

INITIAL_EDGE_POINTS = 32
MAX_STEP_PHASE = math.pi / 4.0
MAX_CONTOUR_POINTS = 200_000
WINDING_TOL = 1e-3
MAX_JITTER = 5
NEWTON_MAX_ITER = 60
DEFAULT_MAX_DEPTH = 14


@dataclass
class ZeroRecord:
    value: complex
    multiplicity: int
    residual: float
    depth: int


@dataclass
class CellAudit:
    rectangle: Rectangle
    winding: int
    depth: int


@dataclass
class ZeroSet:
    rectangle: Rectangle
    zeros: List[ZeroRecord] = field(default_factory=list)
    audit: List[CellAudit] = field(default_factory=list)
    replicate: Optional[int] = None

    @property
    def count(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    @property
    def locations(self) -> np.ndarray:
        return np.array([z.value for z in self.zeros], dtype=complex)


def _contour_points(rect: Rectangle, ts: np.ndarray) -> np.ndarray:
    """Counter-clockwise boundary parametrised by t in [0, 4)"""
    x0, x1, y0, y1 = rect
    edge = np.floor(ts).astype(int)
    frac = ts - edge
    xs = np.select([edge == 0, edge == 1, edge == 2], [x0 + frac * (x1 - x0), x1, x1 - frac * (x1 - x0)], x0)
    ys = np.select([edge == 0, edge == 1, edge == 2], [y0, y0 + frac * (y1 - y0), y1], y1 - frac * (y1 - y0))
    return xs + 1j * ys


def _wrap(delta: np.ndarray) -> np.ndarray:
    return (delta + np.pi) % (2.0 * np.pi) - np.pi


def winding_number(log_z: Callable[[np.ndarray], np.ndarray], rect: Rectangle) -> int:
    """
    Winding number of Z along the boundary of rect

    The contour is refined wherever the phase moves by more than pi/4 between
    neighbouring samples; the accumulated phase must be a multiple of 2 pi
    within WINDING_TOL turns.

    Raises:
        BoundaryZero: Z (numerically) vanishes on the contour
        NonIntegerWinding: contour resolution exhausted
    """
    ts = np.linspace(0.0, 4.0, 4 * INITIAL_EDGE_POINTS, endpoint=False)
    logs = log_z(_contour_points(rect, ts))
    min_gap = 1e-13 * 4.0
    while True:
        if np.any(np.isneginf(logs.real)):
            raise BoundaryZero(f"Z vanishes on the boundary of {rect}")
        phase = logs.imag
        closed = np.append(phase, phase[0])
        delta = _wrap(np.diff(closed))
        bad = np.nonzero(np.abs(delta) > MAX_STEP_PHASE)[0]
        if bad.size == 0:
            break
        nxt = np.append(ts[1:], 4.0)
        gaps = nxt[bad] - ts[bad]
        if np.any(gaps < min_gap):
            raise BoundaryZero(f"Phase jump not resolved near the boundary of {rect}")
        if ts.size + bad.size > MAX_CONTOUR_POINTS:
            raise NonIntegerWinding(f"Contour resolution exhausted on {rect}")
        mids = ts[bad] + 0.5 * gaps
        new_logs = log_z(_contour_points(rect, mids))
        order = np.argsort(np.concatenate([ts, mids]), kind="stable")
        ts = np.concatenate([ts, mids])[order]
        logs = np.concatenate([logs, new_logs])[order]

    turns = delta.sum() / (2.0 * np.pi)
    winding = int(round(turns))
    if abs(turns - winding) > WINDING_TOL:
        raise NonIntegerWinding(f"Winding {turns:.6f} on {rect} is not an integer")
    return winding


def _newton(field_: LeafField, start: complex, rect: Rectangle) -> Optional[complex]:
    """
    Newton iteration on Z; None when it leaves rect or does not settle

    Settled means a step below 1e-14 relative, or a small step that stopped
    shrinking (rounding floor of a multiple zero).
    """
    x0, x1, y0, y1 = rect
    z = start
    last = math.inf
    for _ in range(NEWTON_MAX_ITER):
        _, ratio = field_.newton_ratio(z)
        if not np.isfinite(ratio):
            return None
        z = z - ratio
        if not (x0 <= z.real <= x1 and y0 <= z.imag <= y1):
            return None
        step = abs(ratio)
        scale = max(1.0, abs(z))
        if step <= 1e-14 * scale or (step >= last and step <= 1e-6 * scale):
            return z
        last = step
    return None


def _residual(field_: LeafField, z: complex, model: Optional[ModelParams], n: Optional[int]) -> float:
    """|Z(z)| relative to e^{n p(z)}, or to sum |e^{z c}| without a model"""
    log_z, _ = field_.newton_ratio(z)
    if model is not None and n is not None:
        log_scale = n * log_partition_limit(model, z)
    else:
        log_scale = field_.log_abs_scale(z)
    return float(math.exp(log_z.real - log_scale)) if np.isfinite(log_z.real) else 0.0


def _split(rect: Rectangle, jitter: int) -> List[Rectangle]:
    x0, x1, y0, y1 = rect
    shift = 1e-7 * jitter
    xm = x0 + (0.5 + shift) * (x1 - x0)
    ym = y0 + (0.5 - shift) * (y1 - y0)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def find_zeros(field_: LeafField, rectangle: Rectangle, model: Optional[ModelParams] = None,
               n: Optional[int] = None, tol_z: Optional[float] = None,
               max_depth: int = DEFAULT_MAX_DEPTH) -> ZeroSet:
    """
    All zeros of Z(beta) = sum_eps e^{beta c_eps} in a rectangle

    Args:
        field_: Sampled leaf field of one replicate
        rectangle: (sigma_min, sigma_max, tau_min, tau_max)
        model, n: When given, residuals are relative to e^{n p(beta)}
        tol_z: Residual tolerance (configured default when None)
        max_depth: Quadrisection depth limit

    Returns:
        ZeroSet with zeros, multiplicities, residuals and the winding audit

    Raises:
        BoundaryZero, NonIntegerWinding
        NonConvergence: a cell at max_depth whose Newton polish misses tol_z
    """
    x0, x1, y0, y1 = rectangle
    if not (x0 < x1 and y0 < y1):
        raise InvalidParameter(f"Degenerate rectangle {rectangle}")
    tol_z = get_zero_tol() if tol_z is None else tol_z

    def log_z(points: np.ndarray) -> np.ndarray:
        return field_.log_partition(points)

    rect = rectangle
    for attempt in range(MAX_JITTER + 1):
        try:
            total = winding_number(log_z, rect)
            break
        except BoundaryZero:
            if attempt == MAX_JITTER:
                raise
            pad = 1e-6 * (attempt + 1) * max(x1 - x0, y1 - y0)
            rect = (x0 - pad, x1 + pad, y0 - pad, y1 + pad)
            logger.warning(f"Zero on contour, enlarging rectangle by {pad:.2e}")

    result = ZeroSet(rectangle=rect)
    stack = [(rect, total, 0)]
    while stack:
        cell, wind, depth = stack.pop()
        result.audit.append(CellAudit(cell, wind, depth))
        if wind == 0:
            continue
        cx0, cx1, cy0, cy1 = cell
        centre = complex(0.5 * (cx0 + cx1), 0.5 * (cy0 + cy1))
        if wind == 1 or depth >= max_depth:
            root = _newton(field_, centre, cell)
            residual = _residual(field_, root, model, n) if root is not None else math.inf
            if residual <= tol_z:
                result.zeros.append(ZeroRecord(root, wind, residual, depth))
                continue
            if depth >= max_depth:
                raise NonConvergence(f"No zero of {cell} polished below residual {tol_z:.0e} "
                                     f"at depth {depth} (winding {wind})")
            logger.debug(f"Newton did not settle in cell {cell} (residual {residual:.2e}); subdividing")

        for jitter in range(MAX_JITTER + 1):
            children = _split(cell, jitter)
            try:
                windings = [winding_number(log_z, child) for child in children]
                break
            except BoundaryZero:
                if jitter == MAX_JITTER:
                    raise
        if sum(windings) != wind:
            raise NonIntegerWinding(f"Winding {wind} of {cell} does not split additively: {windings}")
        for child, w in zip(children, windings):
            stack.append((child, w, depth + 1))

    result.zeros.sort(key=lambda z: (z.value.imag, z.value.real))
    logger.debug(f"Found {result.count} zeros in {rect} using {len(result.audit)} cells")
    return result


def _zeros_worker(args) -> ZeroSet:
    model, n, seed, replicate, rectangle, tol_z, budget = args
    field_ = sample_leaf_field(model, n, seed, replicate, budget)
    zs = find_zeros(field_, rectangle, model, n, tol_z)
    zs.replicate = replicate
    return zs


def find_zeros_ensemble(model: ModelParams, n: int, seed: int, replicates: int, rectangle: Rectangle,
                        threads: Optional[int] = None, tol_z: Optional[float] = None,
                        leaf_budget: Optional[int] = None, first_replicate: int = 0) -> List[ZeroSet]:
    """Zero sets of several replicates, ordered by replicate index"""
    workers = min(get_threads(threads), replicates)
    tasks = [(model, n, seed, r, rectangle, tol_z, leaf_budget)
             for r in range(first_replicate, first_replicate + replicates)]
    logger.info(f"Finding zeros for {replicates} replicates at n={n} in {rectangle} with {workers} worker(s)")
    if workers > 1:
        with Pool(processes=workers) as pool:
            sets = pool.map(_zeros_worker, tasks)
    else:
        sets = [_zeros_worker(task) for task in tasks]
    return sorted(sets, key=lambda zs: zs.replicate)


# -- statistics -----------------------------------------------------------

@dataclass
class DensityCell:
    rectangle: Rectangle
    count: int
    empirical: float   # (2 pi / n) count / (area * replicates)
    predicted: float   # area density of Xi at the cell centre


@dataclass
class ZeroStatistics:
    n: int
    replicates: int
    total: int
    cells: List[DensityCell]

    @property
    def pooled_density(self) -> float:
        """(2 pi / n) times zeros per unit area per replicate, over all cells"""
        area = sum((c.rectangle[1] - c.rectangle[0]) * (c.rectangle[3] - c.rectangle[2]) for c in self.cells)
        if not area:
            return 0.0
        return 2.0 * math.pi * self.total / (self.n * area * self.replicates)


def zero_statistics(zero_sets: Sequence[ZeroSet], model: ModelParams, n: int,
                    bins: Tuple[int, int] = (1, 1)) -> ZeroStatistics:
    """
    Binned empirical zero measure against Xi / (2 pi)

    Each cell reports (2 pi / n) * count / (area * replicates) next to the area
    density sum_{k: beta in F_k} 2 a_k at its centre.
    """
    if not zero_sets:
        raise InvalidParameter("zero_statistics needs at least one zero set")
    x0, x1, y0, y1 = zero_sets[0].rectangle
    nx, ny = bins
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    pts = np.concatenate([zs.locations for zs in zero_sets])
    weights = np.concatenate([np.array([z.multiplicity for z in zs.zeros], dtype=float) for zs in zero_sets])
    if pts.size:
        hist, _, _ = np.histogram2d(pts.real, pts.imag, bins=[xs, ys], weights=weights)
    else:
        hist = np.zeros((nx, ny))

    m = len(zero_sets)
    cx = 0.5 * (xs[:-1] + xs[1:])
    cy = 0.5 * (ys[:-1] + ys[1:])
    CX, CY = np.meshgrid(cx, cy, indexing="ij")
    predicted = area_density_grid(model, CX, CY)
    cells = []
    for i in range(nx):
        for j in range(ny):
            area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
            count = int(hist[i, j])
            cells.append(DensityCell(rectangle=(xs[i], xs[i + 1], ys[j], ys[j + 1]), count=count,
                                     empirical=2.0 * math.pi * count / (n * area * m),
                                     predicted=float(predicted[i, j])))
    return ZeroStatistics(n=n, replicates=m, total=int(sum(c.count for c in cells)), cells=cells)


def beak_spacing(model: ModelParams, n: int, beta_star: complex, l: int, finite_n: bool = True) -> float:
    """
    Predicted spacing of zeros along the beak boundary at beta*

    Asymptotically sqrt(2) pi / (a_l tau* n); the finite-n value
    2 pi / (n a_l |beta* - u_{n,l}/sqrt(n a_l)|) replaces sigma_l by its
    finite-n counterpart.
    """
    beta_star = as_complex(beta_star)
    beak_geometry(model, beta_star, l)
    al = model.a[l - 1]
    if not finite_n:
        return math.sqrt(2.0) * math.pi / (al * beta_star.imag * n)
    u = Normalizers(model, n).u(l)
    return 2.0 * math.pi / (n * al * abs(beta_star - u / math.sqrt(n * al)))


def arc_spacing(model: ModelParams, n: int, beta_star: complex) -> float:
    """2 pi / (a_k |beta*| n) on the arc of level k = d1 + d2"""
    beta_star = as_complex(beta_star)
    d1, d2 = Normalizers(model, n).arc_levels(beta_star)
    return 2.0 * math.pi / (model.a[d1 + d2 - 1] * abs(beta_star) * n)


def nearest_neighbour_spacings(zero_sets: Sequence[ZeroSet], centre: complex, radius: float) -> np.ndarray:
    """Nearest-neighbour distances among zeros within radius of centre, per replicate, pooled"""
    out = []
    for zs in zero_sets:
        pts = zs.locations
        pts = pts[np.abs(pts - centre) <= radius]
        if pts.size < 2:
            continue
        dist = np.abs(pts[:, None] - pts[None, :])
        np.fill_diagonal(dist, np.inf)
        out.extend(dist.min(axis=1))
    return np.asarray(out)


def beak_offset_fraction(zero_sets: Sequence[ZeroSet], model: ModelParams, l: int,
                         centre: complex, radius: float) -> float:
    """Share of zeros near a beak point lying outside the phase E_l"""
    near = [z for zs in zero_sets for z in zs.locations if abs(z - centre) <= radius]
    if not near:
        return math.nan
    outside = sum(1 for z in near if classify_level(model, z, l) is not LevelPhase.E)
    return outside / len(near)


def write_zeros_csv(path: str, zero_sets: Sequence[ZeroSet]) -> None:
    """Rows: replicate, re, im, multiplicity, residual, cell_depth"""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "re", "im", "multiplicity", "residual", "cell_depth"])
        for zs in zero_sets:
            for z in zs.zeros:
                writer.writerow([zs.replicate if zs.replicate is not None else 0,
                                 repr(z.value.real), repr(z.value.imag), z.multiplicity,
                                 f"{z.residual:.3e}", z.depth])
    logger.info(f"Wrote {sum(zs.count for zs in zero_sets)} zeros to {path}")
