"""Ellipticity, winding numbers and parameter scans for the system symbol."""

from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import config
from .errors import DomainError, NonEllipticError, ResolutionError
from .symbols import (
    Edge,
    RectanglePath,
    RectanglePoint,
    SpaceParams,
    SymbolSpec,
    compactify,
    composite_values,
    sample_det_curve,
    system_det_gamma1,
)


class Verdict(str, enum.Enum):
    FREDHOLM = "Fredholm"
    NOT_FREDHOLM = "NotFredholm"
    UNIQUELY_SOLVABLE = "UniquelySolvable"


@dataclass(frozen=True)
class EllipticityReport:
    min_abs_det: float
    arg_min_omega: RectanglePoint | None
    elliptic: bool
    relative_min: float = float("nan")
    tolerance: float = float("nan")


@dataclass(frozen=True)
class IndexReport:
    winding_number: int
    operator_index: int
    residual: float
    max_step: float = 0.0


def ellipticity(curve, tolerance: float | None = None, path: RectanglePath | None = None) -> EllipticityReport:
    """Minimum modulus along a sampled determinant curve.

    The verdict compares ``min |det| / max |det|`` against ``tolerance``.
    """
    curve = np.asarray(curve, dtype=complex).reshape(-1)
    if curve.size == 0:
        raise DomainError("empty curve")
    tol = config.get("ellipticity_tol") if tolerance is None else tolerance
    mag = np.abs(curve)
    k = int(np.argmin(mag))
    peak = mag.max()
    rel = mag[k] / peak if peak > 0 else 0.0
    omega = None
    if path is not None:
        omega = RectanglePoint(path.edges[k], path.coords[k])
    return EllipticityReport(float(mag[k]), omega, bool(rel > tol), float(rel), tol)


def winding_number(curve, tolerance: float | None = None) -> IndexReport:
    """Winding number of a closed sampled curve about the origin.

    Raises ``NonEllipticError`` if the curve passes through 0 and
    ``ResolutionError`` if consecutive samples are too far apart in argument
    for the accumulated increment to be trusted.
    """
    curve = np.asarray(curve, dtype=complex).reshape(-1)
    if curve.size < 3:
        raise DomainError("need at least three samples")
    rep = ellipticity(curve, tolerance)
    if not rep.elliptic:
        raise NonEllipticError(f"curve passes through 0 (relative min |det| = {rep.relative_min:.3e})")
    scale = np.abs(curve).max()
    if abs(curve[0] - curve[-1]) > 1e-8 * scale:
        raise DomainError("curve is not closed")
    steps = np.angle(curve[1:] / curve[:-1])
    total = steps.sum() / (2 * np.pi)
    wind = int(round(total))
    residual = abs(total - wind)
    max_step = float(np.abs(steps).max())
    if residual >= config.get("winding_residual") or max_step > 0.5 * np.pi:
        raise ResolutionError(f"argument increments too coarse (max step {max_step:.3f} rad, residual {residual:.3f})")
    return IndexReport(wind, -wind, float(residual), max_step)


def _refine_gamma1_min(det_fn, u: np.ndarray, mag: np.ndarray) -> tuple[float, float]:
    """Polish the sampled minimum of ``|det(tan(pi u/2))|`` by bounded 1-D search."""
    k = int(np.argmin(mag))
    lo = u[max(k - 1, 0)]
    hi = u[min(k + 1, u.size - 1)]
    if hi <= lo:
        return float(u[k]), float(mag[k])
    res = minimize_scalar(
        lambda v: float(np.abs(det_fn(compactify(np.array([v])))[0])),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-13},
    )
    if res.fun < mag[k]:
        return float(res.x), float(res.fun)
    return float(u[k]), float(mag[k])


def local_invertibility_at_zero(target, tolerance: float | None = None, n: int | None = None, refine: bool = True) -> EllipticityReport:
    """Ellipticity of the symbol on Gamma1 only (local invertibility at the corner point 0)."""
    tol = config.get("ellipticity_tol") if tolerance is None else tolerance
    path = RectanglePath.gamma1(n)
    u = 2 * path.param - 1
    if isinstance(target, SpaceParams):
        def det_fn(xi):
            return system_det_gamma1(target, xi)
    elif isinstance(target, SymbolSpec):
        def det_fn(xi):
            return composite_values(target, [Edge.GAMMA1] * len(xi), xi)
    else:
        raise DomainError(f"unsupported symbol target {type(target).__name__}")
    vals = det_fn(path.coords)
    mag = np.abs(vals)
    peak = mag.max()
    u_min, m_min = float(u[np.argmin(mag)]), float(mag.min())
    if refine:
        u_min, m_min = _refine_gamma1_min(det_fn, u, mag)
    rel = m_min / peak if peak > 0 else 0.0
    omega = RectanglePoint(Edge.GAMMA1, float(compactify(u_min)))
    return EllipticityReport(m_min, omega, bool(rel > tol), float(rel), tol)


def index_report(target, n_edge: int | None = None, tolerance: float | None = None, check_refinement: bool = True) -> IndexReport:
    """Winding number of the determinant over the whole rectangle.

    With ``check_refinement`` the computation is repeated on a path with twice
    the resolution and the two answers must agree.
    """
    path = RectanglePath.full(n_edge)
    rep = winding_number(sample_det_curve(target, path), tolerance)
    if check_refinement:
        fine = winding_number(sample_det_curve(target, path.refined(2)), tolerance)
        if fine.winding_number != rep.winding_number:
            raise ResolutionError(f"winding changed under refinement: {rep.winding_number} -> {fine.winding_number}")
    return rep


def full_ellipticity(target, n_edge: int | None = None, tolerance: float | None = None) -> EllipticityReport:
    path = RectanglePath.full(n_edge)
    return ellipticity(sample_det_curve(target, path), tolerance, path)


# ---------------------------------------------------------------------------
# closed-form criteria


def _is_int(v: float, tol: float = 1e-9) -> bool:
    return abs(v - round(v)) <= tol


def closed_form_fredholm(p: float, r: float) -> bool:
    """Fredholm unless ``p = 2`` and ``r`` is one of ``0, 1, 2, ...``."""
    return not (abs(p - 2.0) <= 1e-12 and _is_int(r) and round(r) >= 0)


def closed_form_verdict(p: float, r: float) -> Verdict:
    if not closed_form_fredholm(p, r):
        return Verdict.NOT_FREDHOLM
    if -1.0 < r < 0.0:
        return Verdict.UNIQUELY_SOLVABLE
    return Verdict.FREDHOLM


def _continuation_band(anchor: float, exceptional) -> tuple[float, float]:
    """Open interval around ``anchor`` bounded by the nearest exceptional values."""
    ex = np.asarray(sorted(exceptional), dtype=float)
    below = ex[ex < anchor]
    above = ex[ex > anchor]
    if np.any(np.isclose(ex, anchor)):
        raise DomainError("continuation anchor is itself exceptional")
    lo = float(below.max()) if below.size else -math.inf
    hi = float(above.min()) if above.size else math.inf
    return lo, hi


# ---------------------------------------------------------------------------
# region scan


@dataclass(frozen=True)
class RegionMap:
    p_grid: np.ndarray
    r_grid: np.ndarray
    verdicts: np.ndarray = field(repr=False)
    gamma1_min: np.ndarray = field(repr=False)
    closed_form_cells: np.ndarray = field(repr=False)
    band: tuple = (float("nan"), float("nan"))

    def counts(self) -> dict:
        return {v.value: int(np.sum(self.verdicts == v.value)) for v in Verdict}

    def cells(self, verdict: Verdict):
        ii, jj = np.nonzero(self.verdicts == Verdict(verdict).value)
        return [(float(self.p_grid[i]), float(self.r_grid[j])) for i, j in zip(ii, jj)]

    def exceptional_cells(self):
        return self.cells(Verdict.NOT_FREDHOLM)

    def verdict_at(self, p: float, r: float) -> Verdict:
        i = int(np.argmin(np.abs(self.p_grid - p)))
        j = int(np.argmin(np.abs(self.r_grid - r)))
        return Verdict(self.verdicts[i, j])

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("p,r,verdict\n")
            for i, p in enumerate(self.p_grid):
                for j, r in enumerate(self.r_grid):
                    fh.write(f"{p!r},{r!r},{self.verdicts[i, j]}\n")

    def summary(self) -> dict:
        return {
            "counts": self.counts(),
            "exceptional_cells": [[p, r] for p, r in self.exceptional_cells()],
            "closed_form_cells": int(self.closed_form_cells.sum()),
            "uniqueness_band": [_jsonable(self.band[0]), _jsonable(self.band[1])],
            "min_gamma1_relative": float(np.min(self.gamma1_min)),
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jsonable(v: float):
    return None if not math.isfinite(v) else v


def _grid_step(grid: np.ndarray) -> float:
    if grid.size < 2:
        return 0.0
    return float(np.min(np.diff(np.sort(grid))))


def scan_region(p_grid, r_grid, tolerance: float | None = None, n_xi: int | None = None, threads: int = 1, anchor=(2.0, None)) -> RegionMap:
    """Classify every ``(p, r)`` cell of a grid.

    A cell is Fredholm when the system symbol is elliptic on Gamma1 (local
    invertibility at 0).  Cells within one grid step of ``{p = 2} x Z`` are
    labelled by the closed-form criterion instead, because a numeric minimum
    next to an exact zero depends on resolution.  UniquelySolvable marks
    Fredholm cells in the horizontal band around the anchor row bounded by the
    nearest rows on which the Gamma1 symbol degenerates.
    """
    p_grid = np.asarray(p_grid, dtype=float).reshape(-1)
    r_grid = np.asarray(r_grid, dtype=float).reshape(-1)
    if p_grid.size == 0 or r_grid.size == 0:
        raise DomainError("empty scan grid")
    if np.any(~np.isfinite(p_grid)) or np.any(p_grid <= 1.0):
        raise DomainError("p grid must lie strictly inside (1, inf)")
    if np.any(~np.isfinite(r_grid)):
        raise DomainError("r grid must be finite")
    tol = config.get("ellipticity_tol") if tolerance is None else tolerance
    n_xi = n_xi or config.get("scan_xi_samples")
    anchor_p = anchor[0]
    anchor_r = config.get("scan_anchor_r") if anchor[1] is None else anchor[1]

    def row(p):
        return [local_invertibility_at_zero(SpaceParams(p, r), tol, n_xi).relative_min for r in r_grid]

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(row, p_grid))
    else:
        rows = [row(p) for p in p_grid]
    gmin = np.array(rows, dtype=float)
    degenerate = gmin <= tol

    dp, dr = _grid_step(p_grid), _grid_step(r_grid)
    near_p = np.abs(p_grid - 2.0) <= dp * (1 + 1e-9) if dp > 0 else np.isclose(p_grid, 2.0)
    dist_int = np.abs(r_grid - np.round(r_grid))
    near_r = dist_int <= dr * (1 + 1e-9) if dr > 0 else dist_int <= 1e-9
    closed = near_p[:, None] & near_r[None, :]

    fred = ~degenerate
    for i, j in zip(*np.nonzero(closed)):
        fred[i, j] = closed_form_fredholm(p_grid[i], r_grid[j])

    verdicts = np.where(fred, Verdict.FREDHOLM.value, Verdict.NOT_FREDHOLM.value).astype(object)
    band = (float("nan"), float("nan"))
    if p_grid.min() <= anchor_p <= p_grid.max() and r_grid.min() <= anchor_r <= r_grid.max():
        bad_rows = r_grid[np.any(degenerate, axis=0)]
        band = _continuation_band(anchor_r, bad_rows)
        in_band = (r_grid > band[0]) & (r_grid < band[1])
        uniq = fred & in_band[None, :]
        verdicts[uniq] = Verdict.UNIQUELY_SOLVABLE.value
    return RegionMap(p_grid, r_grid, verdicts.astype(str), gmin, closed, band)


# ---------------------------------------------------------------------------
# boundary value problem


def bvp_criterion(p: float, s: float) -> Verdict:
    """Solvability class of the mixed problem for data of smoothness ``s`` in ``L_p`` scale.

    The order of the boundary system is ``r = s - 1/p``; Fredholmness follows
    the closed-form system criterion at that order.  Unique solvability is
    propagated from the classical case ``(p, s) = (2, 1)`` across the strip
    between the nearest exceptional orders, which at ``p = 2`` sit at
    ``s = 1/2 + k``.
    """
    p, s = float(p), float(s)
    if not (1.0 < p < math.inf):
        raise DomainError(f"need 1 < p < inf, got {p}")
    if not s > 1.0 / p:
        raise DomainError(f"need s > 1/p = {1.0 / p:.6g} for the boundary trace to exist, got s = {s}")
    r = s - 1.0 / p
    if not closed_form_fredholm(p, r):
        return Verdict.NOT_FREDHOLM
    # exceptional orders at p = 2 expressed in s
    k_max = int(math.ceil(max(s, 1.0))) + 2
    exceptional = [0.5 + k for k in range(k_max + 1)]
    lo, hi = _continuation_band(1.0, exceptional)
    if lo < s < hi:
        return Verdict.UNIQUELY_SOLVABLE
    return Verdict.FREDHOLM
