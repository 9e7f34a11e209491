"""Layer potentials on the flat boundary of the upper half-plane.

The boundary axis is sampled on a sinh grid ``t = a sinh(s)`` with uniform
``s``; quadrature is the trapezoidal rule in ``s`` and derivatives are
fourth-order central differences in ``s`` followed by the chain rule.  The
grid is fine near the collision point ``t = 0`` and reaches far into the
algebraically decaying tails of harmonic traces.

Near-singular and singular integrals use a Gaussian-window subtraction: a
local Taylor polynomial of the density times ``exp(-y**2/sigma**2)`` is removed
from the integrand and its integral against the kernel is added back in closed
form.

The second half of the module turns mixed boundary data into an instance of
the model Mellin system, solves it with :mod:`mellinbvp.solver`, maps the
solution back to boundary corrections and evaluates the representation formula
at interior probes.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, special
from scipy.interpolate import CubicSpline

from . import config
from .errors import DomainError, GrowthWarning, NumericalError
from .mellin import LogGridFunction, MellinLine, log_nodes
from .solver import ModelSystemInstance, SystemSolution, solve_mellin, solve_nystrom

_SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# boundary grid


@dataclass(frozen=True)
class BoundaryGrid:
    """Symmetric sinh grid on ``[-t_max, t_max]`` with a node at ``t = 0``."""

    scale: float = 1.0
    t_max: float = 1e8
    n: int = 4097

    def __post_init__(self):
        if self.n < 9 or self.n % 2 == 0:
            raise DomainError(f"boundary grid needs an odd node count >= 9, got {self.n}")
        if not (self.scale > 0 and self.t_max > self.scale and np.isfinite(self.t_max)):
            raise DomainError("need 0 < scale < t_max < inf")

    @classmethod
    def from_config(cls, overrides: dict | None = None) -> "BoundaryGrid":
        opts = config.get("boundary_grid")
        opts.update(overrides or {})
        return cls(float(opts["scale"]), float(opts["t_max"]), int(opts["n"]))

    def to_json(self) -> dict:
        return {"scale": self.scale, "t_max": self.t_max, "n": self.n}

    @cached_property
    def s(self) -> np.ndarray:
        smax = math.asinh(self.t_max / self.scale)
        return np.linspace(-smax, smax, self.n)

    @property
    def ds(self) -> float:
        return float(self.s[1] - self.s[0])

    @cached_property
    def t(self) -> np.ndarray:
        t = self.scale * np.sinh(self.s)
        t[self.n // 2] = 0.0
        return t

    @cached_property
    def jac(self) -> np.ndarray:
        return self.scale * np.cosh(self.s)

    @cached_property
    def weights(self) -> np.ndarray:
        w = self.jac * self.ds
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def sample(self, f) -> np.ndarray:
        return np.asarray(f(self.t), dtype=float)

    def to_s(self, t):
        return np.arcsinh(np.asarray(t, dtype=float) / self.scale)

    def spacing_at(self, t) -> np.ndarray:
        return self.scale * np.cosh(self.to_s(t)) * self.ds

    def _fd(self, v: np.ndarray, order: int) -> np.ndarray:
        h = self.ds
        out = np.empty_like(v)
        if order == 1:
            out[2:-2] = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
            edge = np.gradient(v, h, edge_order=2)
        else:
            out[2:-2] = (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h * h)
            edge = np.gradient(np.gradient(v, h, edge_order=2), h, edge_order=2)
        out[:2] = edge[:2]
        out[-2:] = edge[-2:]
        return out

    def d_dt(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return self._fd(v, 1) / self.jac

    def d2_dt2(self, v) -> np.ndarray:
        # t_ss = t for the sinh map
        v = np.asarray(v, dtype=float)
        return (self._fd(v, 2) - self._fd(v, 1) * self.t / self.jac) / self.jac**2

    def spline(self, v) -> CubicSpline:
        return CubicSpline(self.s, np.asarray(v, dtype=float))

    def evaluate(self, v, t, nu: int = 0) -> np.ndarray:
        """Spline value (``nu = 0``) or ``t``-derivative (``nu = 1, 2``) at arbitrary ``t``."""
        t = np.asarray(t, dtype=float)
        sp = self.spline(v)
        s = self.to_s(t)
        jac = self.scale * np.cosh(s)
        if nu == 0:
            return sp(s)
        if nu == 1:
            return sp(s, 1) / jac
        if nu == 2:
            return (sp(s, 2) - sp(s, 1) * t / jac) / jac**2
        raise ValueError("nu must be 0, 1 or 2")

    def integral(self, v) -> float:
        return float(np.dot(self.weights, v))


def _window_sigma(grid: BoundaryGrid, t) -> np.ndarray:
    return config.get("log_window_nodes") * grid.spacing_at(t)


def _as_points(x) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.shape[-1] != 2:
        raise DomainError("points must have two coordinates")
    return pts.reshape(-1, 2)


# ---------------------------------------------------------------------------
# potentials at interior points


def double_layer(v, grid: BoundaryGrid, x) -> np.ndarray:
    """Double-layer potential ``(1/2pi) int x2 v(tau) / ((x1-tau)^2 + x2^2) dtau``.

    Accepts one point or an ``(m, 2)`` array.  Points below the axis are
    allowed (the kernel is odd in ``x2``); points on the axis are not.
    """
    v = np.asarray(v, dtype=float)
    pts = _as_points(x)
    if np.any(pts[:, 1] == 0.0):
        raise DomainError("double layer is not defined on the boundary; use the trace operators")
    f0 = grid.evaluate(v, pts[:, 0])
    f1 = grid.evaluate(v, pts[:, 0], 1)
    f2h = 0.5 * grid.evaluate(v, pts[:, 0], 2)
    sig = _window_sigma(grid, pts[:, 0])
    out = np.empty(len(pts))
    for k, (x1, a) in enumerate(pts):
        sg, aa, sk = np.sign(a), abs(a), sig[k]
        c2 = f2h[k] + f0[k] / sk**2
        y = grid.t - x1
        q = (f0[k] + f1[k] * y + c2 * y * y) * np.exp(-((y / sk) ** 2))
        body = np.dot(grid.weights, aa * (v - q) / (y * y + aa * aa))
        ex = special.erfcx(aa / sk)
        exact = f0[k] * math.pi * ex + c2 * aa * (sk * _SQRT_PI - math.pi * aa * ex)
        out[k] = sg * (body + exact) / (2 * math.pi)
    return out


def double_layer_normal_derivative(v, grid: BoundaryGrid, x) -> np.ndarray:
    """``-d/dx2`` of the double layer, written with the conjugate Poisson kernel.

    ``-(d2 W v)(x) = (1/2pi) int (x1-tau) v'(tau) / ((x1-tau)^2 + x2^2) dtau``;
    its boundary limit is the hypersingular trace.
    """
    v = np.asarray(v, dtype=float)
    pts = _as_points(x)
    if np.any(pts[:, 1] == 0.0):
        raise DomainError("use trace_operators on the boundary")
    dv = grid.d_dt(v)
    f0 = grid.evaluate(dv, pts[:, 0])
    f1 = grid.evaluate(dv, pts[:, 0], 1)
    sig = _window_sigma(grid, pts[:, 0])
    out = np.empty(len(pts))
    for k, (x1, a) in enumerate(pts):
        aa, sk = abs(a), sig[k]
        y = grid.t - x1
        q = (f0[k] + f1[k] * y) * np.exp(-((y / sk) ** 2))
        body = np.dot(grid.weights, -y * (dv - q) / (y * y + aa * aa))
        exact = -f1[k] * (sk * _SQRT_PI - math.pi * aa * special.erfcx(aa / sk))
        out[k] = (body + exact) / (2 * math.pi)
    return out


def _check_mean(v, grid: BoundaryGrid, tol: float | None) -> float:
    tol = config.get("zero_mean_tol") if tol is None else tol
    mass = grid.integral(np.abs(v))
    mean = grid.integral(v)
    rel = abs(mean) / mass if mass > 0 else 0.0
    if rel > tol:
        warnings.warn(
            f"density mean {mean:.3e} (relative {rel:.1e}) is not zero; the log potential grows at infinity",
            GrowthWarning,
            stacklevel=3,
        )
    return rel


def _log_window_moment(a: float, sigma: float, k: int) -> float:
    """``int 0.5 ln(y^2 + a^2) y^(2k) exp(-y^2/sigma^2) dy`` over the real line."""
    if a == 0.0:
        g = special.gamma(k + 0.5)
        return sigma ** (2 * k + 1) * (math.log(sigma) * g + 0.5 * g * special.digamma(k + 0.5))
    f = lambda y: 0.5 * math.log(y * y + a * a) * y ** (2 * k) * math.exp(-((y / sigma) ** 2))
    val, _ = integrate.quad(f, 0.0, 12 * sigma, points=[a], limit=200, epsabs=1e-15)
    return 2 * val


def single_layer(v, grid: BoundaryGrid, x, zero_mean_tol: float | None = None) -> np.ndarray:
    """Single-layer potential ``(1/2pi) int ln|x - tau| v(tau) dtau``.

    Emits :class:`GrowthWarning` when ``v`` has a non-negligible mean.  Points
    closer to the axis than a few local grid spacings use the windowed
    subtraction with numerically integrated window moments.
    """
    v = np.asarray(v, dtype=float)
    pts = _as_points(x)
    if np.any(pts[:, 1] == 0.0):
        raise DomainError("use trace_operators on the boundary")
    _check_mean(v, grid, zero_mean_tol)
    sig = _window_sigma(grid, pts[:, 0])
    out = np.empty(len(pts))
    for k, (x1, a) in enumerate(pts):
        y = grid.t - x1
        kern = 0.5 * np.log(y * y + a * a)
        if abs(a) > 4 * sig[k]:
            out[k] = np.dot(grid.weights, kern * v) / (2 * math.pi)
            continue
        sk = sig[k]
        f0 = float(grid.evaluate(v, x1))
        f1 = float(grid.evaluate(v, x1, 1))
        c2 = 0.5 * float(grid.evaluate(v, x1, 2)) + f0 / sk**2
        q = (f0 + f1 * y + c2 * y * y) * np.exp(-((y / sk) ** 2))
        body = np.dot(grid.weights, kern * (v - q))
        exact = f0 * _log_window_moment(abs(a), sk, 0) + c2 * _log_window_moment(abs(a), sk, 1)
        out[k] = (body + exact) / (2 * math.pi)
    return out


def newton_potential(f, x, box, n: int | None = None) -> np.ndarray:
    """Volume potential ``(1/2pi) int ln|x - y| f(y) dy`` over a rectangle.

    ``f`` is a vectorised callable ``f(y1, y2)`` supported in ``box = (a1, b1,
    a2, b2)``.  Tensor Gauss-Legendre quadrature; accurate for points outside
    the support, a smoke-level evaluation inside it.
    """
    a1, b1, a2, b2 = map(float, box)
    if not (a1 < b1 and 0.0 <= a2 < b2):
        raise DomainError("box must lie in the closed upper half-plane")
    n = config.get("newton_nodes") if n is None else int(n)
    g, w = np.polynomial.legendre.leggauss(n)
    y1 = 0.5 * (b1 - a1) * g + 0.5 * (b1 + a1)
    y2 = 0.5 * (b2 - a2) * g + 0.5 * (b2 + a2)
    w1 = 0.5 * (b1 - a1) * w
    w2 = 0.5 * (b2 - a2) * w
    Y1, Y2 = np.meshgrid(y1, y2, indexing="ij")
    fw = np.asarray(f(Y1, Y2), dtype=float) * np.outer(w1, w2)
    pts = _as_points(x)
    out = np.empty(len(pts))
    for k, (p1, p2) in enumerate(pts):
        r2 = (p1 - Y1) ** 2 + (p2 - Y2) ** 2
        out[k] = np.sum(0.5 * np.log(np.where(r2 > 0, r2, 1.0)) * fw) / (2 * math.pi)
    return out


# ---------------------------------------------------------------------------
# boundary traces


@dataclass(frozen=True)
class TraceValues:
    v_minus1: np.ndarray
    w0: np.ndarray
    w0_star: np.ndarray
    v_plus1: np.ndarray


def _pairwise(grid: BoundaryGrid, row_fn, block: int = 256) -> np.ndarray:
    out = np.empty(grid.n)
    for start in range(0, grid.n, block):
        idx = np.arange(start, min(start + block, grid.n))
        out[idx] = row_fn(idx)
    return out


def v_minus1(v, grid: BoundaryGrid) -> np.ndarray:
    """Logarithmic trace ``(1/2pi) int ln|t - tau| v(tau) dtau`` at the grid nodes."""
    v = np.asarray(v, dtype=float)
    t, wts = grid.t, grid.weights
    d1, d2 = grid.d_dt(v), grid.d2_dt2(v)
    sig = config.get("log_window_nodes") * grid.jac * grid.ds
    g0, g1 = special.gamma(0.5), special.gamma(1.5)
    i0 = sig * (np.log(sig) * g0 + 0.5 * g0 * special.digamma(0.5))
    i2 = sig**3 * (np.log(sig) * g1 + 0.5 * g1 * special.digamma(1.5))
    c2 = 0.5 * d2 + v / sig**2

    def rows(idx):
        y = t[None, :] - t[idx, None]
        sg = sig[idx, None]
        q = (v[idx, None] + d1[idx, None] * y + c2[idx, None] * y * y) * np.exp(-((y / sg) ** 2))
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = np.log(np.abs(y)) * (v[None, :] - q)
        integrand[np.arange(len(idx)), idx] = 0.0
        return integrand @ wts

    body = _pairwise(grid, rows)
    return (body + v * i0 + c2 * i2) / (2 * math.pi)


def v_plus1(v, grid: BoundaryGrid) -> np.ndarray:
    """Hypersingular trace ``(1/2pi) PV int v'(tau) / (t - tau) dtau`` at the grid nodes.

    This equals the boundary limit of ``-d/dx2`` of the double layer; see
    :func:`double_layer_normal_derivative`.
    """
    v = np.asarray(v, dtype=float)
    t, wts = grid.t, grid.weights
    f = grid.d_dt(v)
    fp = grid.d2_dt2(v)
    sig = config.get("log_window_nodes") * grid.jac * grid.ds

    def rows(idx):
        y = t[None, :] - t[idx, None]
        sg = sig[idx, None]
        q = (f[idx, None] + fp[idx, None] * y) * np.exp(-((y / sg) ** 2))
        with np.errstate(divide="ignore", invalid="ignore"):
            integrand = (f[None, :] - q) / (-y)
        integrand[np.arange(len(idx)), idx] = 0.0
        return integrand @ wts

    body = _pairwise(grid, rows)
    return (body - fp * sig * _SQRT_PI) / (2 * math.pi)


def w0(v) -> np.ndarray:
    """Direct value of the double layer on a flat boundary: identically zero."""
    return np.zeros_like(np.asarray(v, dtype=float))


w0_star = w0


def trace_operators(v, grid: BoundaryGrid) -> TraceValues:
    v = np.asarray(v, dtype=float)
    if v.shape != grid.t.shape:
        raise DomainError("density must be sampled on the boundary grid")
    if not np.all(np.isfinite(v)):
        raise NumericalError("density has non-finite samples")
    return TraceValues(v_minus1(v, grid), w0(v), w0_star(v), v_plus1(v, grid))


def richardson(heights, values) -> np.ndarray:
    """Polynomial extrapolation to height 0 (errors assumed smooth in the height)."""
    h = np.asarray(heights, dtype=float)
    vals = np.asarray(values, dtype=float)
    out = np.zeros(vals.shape[1:])
    for i in range(len(h)):
        li = 1.0
        for j in range(len(h)):
            if j != i:
                li *= h[j] / (h[j] - h[i])
        out = out + li * vals[i]
    return out


def plemelj_limit(v, grid: BoundaryGrid, x1, heights=None) -> np.ndarray:
    """Richardson-extrapolated interior limit of the double layer at ``x1``."""
    heights = config.get("plemelj_heights") if heights is None else list(heights)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    vals = [double_layer(v, grid, np.column_stack([x1, np.full_like(x1, h)])) for h in heights]
    return richardson(heights, vals)


def hypersingular_limit(v, grid: BoundaryGrid, x1, heights=None) -> np.ndarray:
    heights = config.get("plemelj_heights") if heights is None else list(heights)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    vals = [double_layer_normal_derivative(v, grid, np.column_stack([x1, np.full_like(x1, h)])) for h in heights]
    return richardson(heights, vals)


# ---------------------------------------------------------------------------
# manufactured harmonic cases


@dataclass(frozen=True)
class HarmonicTestCase:
    """``u = Re(c / (z + i))`` with ``z = x1 + i x2``, harmonic and decaying in the upper half-plane."""

    name: str
    formula_id: int
    coeff: complex

    def u(self, x1, x2):
        z = np.asarray(x1, dtype=float) + 1j * np.asarray(x2, dtype=float)
        return np.real(self.coeff / (z + 1j))

    def trace(self, t):
        return self.u(t, 0.0)

    def neumann(self, t):
        """``-(d u / d x2)`` on the axis."""
        z = np.asarray(t, dtype=float) + 0j
        return np.real(1j * self.coeff / (z + 1j) ** 2)

    def laplacian(self, points, h: float = 1e-3) -> np.ndarray:
        pts = _as_points(points)
        x1, x2 = pts[:, 0], pts[:, 1]
        u = self.u
        return (u(x1 + h, x2) + u(x1 - h, x2) + u(x1, x2 + h) + u(x1, x2 - h) - 4 * u(x1, x2)) / h**2

    def to_json(self, grid: BoundaryGrid | None = None, extension_mode: str = "true") -> dict:
        return {
            "case_name": self.name,
            "formula_id": self.formula_id,
            "grid": (grid or BoundaryGrid.from_config()).to_json(),
            "extension_mode": extension_mode,
        }


CASES = {
    1: HarmonicTestCase("real_part", 1, 1.0 + 0j),
    2: HarmonicTestCase("imag_part", 2, 1j),
}


def case_from_json(doc: dict) -> tuple[HarmonicTestCase, BoundaryGrid, str]:
    try:
        case = CASES[int(doc["formula_id"])]
    except (KeyError, ValueError) as exc:
        raise DomainError(f"unknown harmonic test case: {doc.get('formula_id')!r}") from exc
    grid = BoundaryGrid.from_config(doc.get("grid"))
    mode = doc.get("extension_mode", "true")
    if mode not in ("true", "bump"):
        raise DomainError(f"extension_mode must be 'true' or 'bump', got {mode!r}")
    return case, grid, mode


def bump_pair(t, amplitudes=None):
    """Smooth bumps ``A exp(-1/t - t)`` on the positive and ``B exp(-1/|t| - |t|)`` on the negative half-axis."""
    a, b = config.get("bump_amplitudes") if amplitudes is None else amplitudes
    t = np.asarray(t, dtype=float)
    at = np.where(t == 0.0, 1.0, np.abs(t))
    shape = np.where(t == 0.0, 0.0, np.exp(-1.0 / at - at))
    return a * np.where(t > 0, shape, 0.0), b * np.where(t < 0, shape, 0.0)


@dataclass(frozen=True)
class BoundaryData:
    """Mixed data: Dirichlet ``g1`` on the negative, Neumann ``h1`` on the positive half-axis, plus extensions."""

    grid: BoundaryGrid
    g_ext: np.ndarray = field(repr=False)
    h_ext: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("g_ext", "h_ext"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != self.grid.t.shape:
                raise DomainError(f"{name} must be sampled on the boundary grid")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def g1(self) -> np.ndarray:
        return self.g_ext[self.grid.t < 0]

    @property
    def h1(self) -> np.ndarray:
        return self.h_ext[self.grid.t > 0]

    def restricts_to(self, g1, h1, tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.g1, g1, rtol=0, atol=tol) and np.allclose(self.h1, h1, rtol=0, atol=tol))

    @classmethod
    def zeros(cls, grid: BoundaryGrid) -> "BoundaryData":
        return cls(grid, np.zeros(grid.n), np.zeros(grid.n))

    @classmethod
    def from_case(cls, case: HarmonicTestCase, grid: BoundaryGrid, mode: str = "true", amplitudes=None) -> "BoundaryData":
        """Extensions equal to the true global traces, optionally plus bumps on the complementary half-axes."""
        g = case.trace(grid.t)
        h = case.neumann(grid.t)
        if mode == "bump":
            b1, b2 = bump_pair(grid.t, amplitudes)
            g, h = g + b1, h + b2
        elif mode != "true":
            raise DomainError(f"extension_mode must be 'true' or 'bump', got {mode!r}")
        return cls(grid, g, h)


# ---------------------------------------------------------------------------
# reduction to the model Mellin system


@dataclass(frozen=True)
class AssembledSystem:
    data: BoundaryData
    G1: np.ndarray = field(repr=False)
    H1: np.ndarray = field(repr=False)
    instance: ModelSystemInstance


def _power_tail(t_nodes, vals, t_out):
    """Continue samples beyond the last node with a fitted power law."""
    sel = t_nodes >= t_nodes[-1] / 10
    tv, vv = t_nodes[sel], vals[sel]
    if np.any(vv == 0) or np.any(np.sign(vv) != np.sign(vv[-1])):
        return np.zeros_like(t_out)
    k, _ = np.polyfit(np.log(tv), np.log(np.abs(vv)), 1)
    # right-hand sides are derivatives of at most log-growing functions
    k = min(k, -1.0)
    return vv[-1] * (t_out / tv[-1]) ** k


def _to_log_grid(grid: BoundaryGrid, vals, t_out) -> np.ndarray:
    """Evaluate node samples at positive ``t_out``, extrapolating beyond ``t_max``."""
    out = np.empty_like(t_out)
    inside = t_out <= grid.t_max
    out[inside] = grid.evaluate(vals, t_out[inside])
    pos = grid.t > 0
    out[~inside] = _power_tail(grid.t[pos], vals[pos], t_out[~inside])
    return out


def assemble_model_system(data: BoundaryData, log_grid: dict | None = None, line: MellinLine | None = None) -> AssembledSystem:
    """Boundary system for the corrections, then the transformed Mellin system.

    With ``phi0`` supported on the positive and ``psi0`` on the negative
    half-axis the boundary equations read::

        phi0/2 + V_{-1} psi0 = G1 = -g0/2 - V_{-1} h0     on t > 0
        psi0/2 - V_{+1} phi0 = H1 = -h0/2 + V_{+1} g0     on t < 0

    Differentiating the first, reflecting the second and multiplying both by 2
    gives ``phi + K psi = G``, ``psi + K phi = H`` with ``phi = d phi0/dt``,
    ``psi(t) = psi0(-t)``, ``G = 2 G1'`` and ``H(t) = 2 H1(-t)``.
    """
    grid = data.grid
    log_grid = config.get("pipeline_grid") if log_grid is None else log_grid
    line = MellinLine(config.get("pipeline_beta")) if line is None else line
    G1 = -0.5 * data.g_ext - v_minus1(data.h_ext, grid)
    H1 = -0.5 * data.h_ext + v_plus1(data.g_ext, grid)
    G_nodes = 2.0 * grid.d_dt(G1)
    H_nodes = 2.0 * H1[::-1]  # reflection: the grid is symmetric
    if not (np.all(np.isfinite(G_nodes)) and np.all(np.isfinite(H_nodes))):
        raise NumericalError("non-finite right-hand side after differentiation")
    t = log_nodes(log_grid["t_min"], log_grid["t_max"], log_grid["n"])
    G = LogGridFunction(log_grid["t_min"], log_grid["t_max"], _to_log_grid(grid, G_nodes, t))
    H = LogGridFunction(log_grid["t_min"], log_grid["t_max"], _to_log_grid(grid, H_nodes, t))
    return AssembledSystem(data, G1, H1, ModelSystemInstance(G, H, line))


def corrections_from_solution(sol: SystemSolution, grid: BoundaryGrid):
    """Undo the variable maps: ``phi0 = int_0^t phi`` and ``psi0(t) = psi(-t)`` on the boundary nodes."""
    t_log = sol.phi.t
    x = sol.phi.x
    phi = sol.phi.values.real
    psi = sol.psi.values.real
    prim = integrate.cumulative_trapezoid(phi * t_log, x, initial=0.0) + phi[0] * t_log[0]
    phi0 = np.zeros(grid.n)
    psi0 = np.zeros(grid.n)
    pos = grid.t > 0
    tp = grid.t[pos]
    inside = (tp >= t_log[0]) & (tp <= t_log[-1])
    vals = np.zeros_like(tp)
    vals[inside] = CubicSpline(x, prim)(np.log(tp[inside]))
    vals[tp < t_log[0]] = prim[0] * tp[tp < t_log[0]] / t_log[0]
    phi0[pos] = vals
    neg = grid.t < 0
    tn = -grid.t[neg]
    inside = (tn >= t_log[0]) & (tn <= t_log[-1])
    vals = np.zeros_like(tn)
    vals[inside] = CubicSpline(x, psi)(np.log(tn[inside]))
    vals[tn < t_log[0]] = psi[0]
    psi0[neg] = vals
    return phi0, psi0


def boundary_residual(assembled: AssembledSystem, phi0, psi0) -> float:
    """Sup residual of the boundary system, relative to the sup of the data."""
    grid = assembled.data.grid
    pos, neg = grid.t > 0, grid.t < 0
    r1 = 0.5 * phi0 + v_minus1(psi0, grid) - assembled.G1
    r2 = 0.5 * psi0 - v_plus1(phi0, grid) - assembled.H1
    num = max(np.max(np.abs(r1[pos])), np.max(np.abs(r2[neg])))
    scale = max(np.max(np.abs(assembled.data.g_ext)), np.max(np.abs(assembled.data.h_ext)))
    return float(num / scale) if scale > 0 else float(num)


def reconstruct(grid: BoundaryGrid, g_total, h_total, probes, f=None, f_box=None) -> np.ndarray:
    """``u = N f + W g - V h`` at interior probes (``g = g0 + phi0``, ``h = h0 + psi0``)."""
    pts = _as_points(probes)
    if np.any(pts[:, 1] <= 0):
        raise DomainError("probes must lie strictly inside the upper half-plane")
    u = double_layer(g_total, grid, pts) - single_layer(h_total, grid, pts)
    if f is not None:
        if f_box is None:
            raise DomainError("a volume source needs its support box")
        u = u + newton_potential(f, pts, f_box)
    return u


def default_probes() -> np.ndarray:
    x1, x2 = np.meshgrid(config.get("probe_x1"), config.get("probe_x2"), indexing="ij")
    return np.column_stack([x1.ravel(), x2.ravel()])


@dataclass
class PipelineResult:
    case: HarmonicTestCase
    mode: str
    grid: BoundaryGrid
    probes: np.ndarray = field(repr=False)
    u_reconstructed: np.ndarray = field(repr=False)
    u_exact: np.ndarray = field(repr=False)
    phi0: np.ndarray = field(repr=False)
    psi0: np.ndarray = field(repr=False)
    solver_residual: float
    boundary_residual: float
    correction_error: float

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.u_reconstructed - self.u_exact)

    @property
    def relative_sup_error(self) -> float:
        return float(np.max(self.abs_err) / np.max(np.abs(self.u_exact)))

    def write_probe_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x1", "x2", "u_reconstructed", "u_exact", "abs_err"])
            for (a, b), ur, ue, e in zip(self.probes, self.u_reconstructed, self.u_exact, self.abs_err):
                w.writerow([repr(float(a)), repr(float(b)), repr(float(ur)), repr(float(ue)), repr(float(e))])

    def summary(self) -> dict:
        return {
            **self.case.to_json(self.grid, self.mode),
            "probes": int(len(self.probes)),
            "max_relative_probe_error": self.relative_sup_error,
            "solver_residual": self.solver_residual,
            "boundary_residual": self.boundary_residual,
            "correction_error": self.correction_error,
        }


def run_pipeline(
    case: HarmonicTestCase | int,
    mode: str = "true",
    grid: BoundaryGrid | None = None,
    probes=None,
    method: str = "mellin",
    amplitudes=None,
    log_grid: dict | None = None,
) -> PipelineResult:
    """Extension, boundary system, Mellin system, solve, corrections, representation."""
    case = CASES[case] if isinstance(case, int) else case
    grid = BoundaryGrid.from_config() if grid is None else grid
    probes = default_probes() if probes is None else _as_points(probes)
    data = BoundaryData.from_case(case, grid, mode, amplitudes)
    asm = assemble_model_system(data, log_grid)
    if method == "mellin":
        sol = solve_mellin(asm.instance)
    elif method == "nystrom":
        # the mesh must span the whole log grid; on wide grids this is
        # ill-conditioned and raises ConditioningError
        span = math.log(asm.instance.G.t_max / asm.instance.G.t_min)
        nodes = int(math.ceil(span / math.log(config.get("nystrom_ratio")))) + 1
        sol = solve_nystrom(asm.instance, n_nodes=max(nodes, config.get("nystrom_nodes")))
    else:
        raise DomainError(f"unknown solver method {method!r}")
    phi0, psi0 = corrections_from_solution(sol, grid)
    if mode == "bump":
        b1, b2 = bump_pair(grid.t, amplitudes)
    else:
        b1 = b2 = np.zeros(grid.n)
    corr_err = float(max(np.max(np.abs(phi0 + b1)), np.max(np.abs(psi0 + b2))))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GrowthWarning)
        u = reconstruct(grid, data.g_ext + phi0, data.h_ext + psi0, probes)
    return PipelineResult(
        case=case,
        mode=mode,
        grid=grid,
        probes=probes,
        u_reconstructed=u,
        u_exact=case.u(probes[:, 0], probes[:, 1]),
        phi0=phi0,
        psi0=psi0,
        solver_residual=sol.residual_norm,
        boundary_residual=boundary_residual(asm, phi0, psi0),
        correction_error=corr_err,
    )


def write_case_json(case: HarmonicTestCase, grid: BoundaryGrid, mode: str, path) -> None:
    with open(path, "w") as fh:
        json.dump(case.to_json(grid, mode), fh, indent=2, sort_keys=True)
        fh.write("\n")
