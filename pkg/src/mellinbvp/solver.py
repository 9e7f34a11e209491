"""Two independent solvers for the model system

    phi + K psi = G,   psi + K phi = H   on (0, inf),
    K v(t) = (1/pi) int_0^inf v(tau) dtau / (t + tau).

``solve_mellin`` diagonalises the decoupled equations ``(I +- K) u = G +- H``
with the Mellin transform; ``solve_nystrom`` discretises the coupled system
directly on a geometric mesh.  Agreement of the two is the main correctness
check, since they share no code beyond data interpolation.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import ConditioningError, DomainError, NonEllipticError, TruncationWarning
from .mellin import (
    LogGridFunction,
    MellinLine,
    apply_mellin_convolution,
    k1_kernel,
    multiply_symbol,
)
from .symbols import inv_sin

_K = k1_kernel(-1.0)


def scalar_symbol_min(beta: float, sign: int, n: int = 4001) -> float:
    """``min_xi |1 + sign / sin(pi (beta - i xi))|`` over a compactified line."""
    u = np.linspace(-1, 1, n)
    xi = np.tan(0.5 * np.pi * np.clip(u, -1 + 1e-12, 1 - 1e-12))
    return float(np.min(np.abs(1 + sign * inv_sin(beta, xi))))


def check_line(line: MellinLine, tolerance: float | None = None) -> None:
    tol = config.get("ellipticity_tol") if tolerance is None else tolerance
    for sign in (+1, -1):
        m = scalar_symbol_min(line.beta, sign)
        if m <= tol:
            raise NonEllipticError(
                f"symbol 1 {'+' if sign > 0 else '-'} 1/sin(pi(beta - i xi)) vanishes on beta = {line.beta}; "
                "choose a line with beta != 1/2"
            )


@dataclass(frozen=True)
class ModelSystemInstance:
    G: LogGridFunction
    H: LogGridFunction
    line: MellinLine = field(default_factory=lambda: MellinLine(config.get("solver_beta")))

    def __post_init__(self):
        if not isinstance(self.line, MellinLine):
            object.__setattr__(self, "line", MellinLine(self.line))
        if not self.G.same_grid(self.H):
            raise DomainError("G and H must share one grid")
        check_line(self.line)

    @property
    def grid(self) -> LogGridFunction:
        return self.G

    @property
    def decays(self) -> bool:
        b = self.line.beta
        return self.G.decays(b) and self.H.decays(b)

    def swapped(self) -> "ModelSystemInstance":
        return ModelSystemInstance(self.H, self.G, self.line)


@dataclass(frozen=True)
class SystemSolution:
    phi: LogGridFunction
    psi: LogGridFunction
    residual_norm: float
    method: str
    info: dict = field(default_factory=dict)


def apply_system(phi: LogGridFunction, psi: LogGridFunction, line: MellinLine | None = None):
    """Left-hand sides ``(phi + K psi, psi + K phi)`` by direct quadrature."""
    k_psi = apply_mellin_convolution(_K, 0.0, 0.0, psi, line)
    k_phi = apply_mellin_convolution(_K, 0.0, 0.0, phi, line)
    return phi + k_psi, psi + k_phi


def residual(instance: ModelSystemInstance, phi: LogGridFunction, psi: LogGridFunction) -> float:
    """Relative ``t**beta``-weighted grid norm of both equation residuals."""
    b = instance.line.beta
    lhs1, lhs2 = apply_system(phi, psi, instance.line)
    r1 = lhs1 - instance.G
    r2 = lhs2 - instance.H
    num = math.hypot(r1.norm(b), r2.norm(b))
    den = math.hypot(instance.G.norm(b), instance.H.norm(b))
    return num / den if den > 0 else num


def decouple(instance: ModelSystemInstance):
    """Right-hand sides of ``(I + K) u+ = G + H`` and ``(I - K) u- = G - H``."""
    return ((+1, instance.G + instance.H), (-1, instance.G - instance.H))


def recompose(u_plus: LogGridFunction, u_minus: LogGridFunction):
    return 0.5 * (u_plus + u_minus), 0.5 * (u_plus - u_minus)


def solve_mellin(instance: ModelSystemInstance, pad: int | None = None) -> SystemSolution:
    """Invert the scalar symbols ``1 +- 1/sin(pi(beta - i xi))`` on the instance line."""
    t0 = time.perf_counter()
    pad = config.get("spectral_padding") if pad is None else pad
    beta = instance.line.beta
    parts = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for sign, rhs in decouple(instance):
            parts[sign] = multiply_symbol(rhs, lambda xi, s=sign: 1.0 / (1.0 + s * inv_sin(beta, xi)), instance.line, pad)
    phi, psi = recompose(parts[+1], parts[-1])
    res = residual(instance, phi, psi)
    info = {"beta": beta, "pad": pad, "n": instance.G.n, "seconds": time.perf_counter() - t0}
    return SystemSolution(phi, psi, res, "MellinDiagonal", info)


def nystrom_mesh(instance: ModelSystemInstance, ratio: float | None = None, n_nodes: int | None = None):
    """Geometric nodes centred (in ``log t``) on the instance grid, with trapezoid weights."""
    ratio = config.get("nystrom_ratio") if ratio is None else ratio
    n_nodes = config.get("nystrom_nodes") if n_nodes is None else n_nodes
    if ratio <= 1 or n_nodes < 2:
        raise DomainError("mesh ratio must exceed 1 and hold at least two nodes")
    h = math.log(ratio)
    xc = 0.5 * (math.log(instance.G.t_min) + math.log(instance.G.t_max))
    x = xc + (np.arange(n_nodes) - 0.5 * (n_nodes - 1)) * h
    tau = np.exp(x)
    return tau, h * tau


def nystrom_matrix(tau: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``K_ij = w_j / (pi (tau_i + tau_j))``."""
    return weights[None, :] / (np.pi * (tau[:, None] + tau[None, :]))


def solve_nystrom(
    instance: ModelSystemInstance,
    ratio: float | None = None,
    n_nodes: int | None = None,
    coupling: float = 1.0,
) -> SystemSolution:
    """Dense collocation of ``phi + c K psi = G``, ``psi + c K phi = H`` (``c = coupling``).

    The solution is carried back to the instance grid with the Nystrom
    interpolant ``phi(t) = G(t) - c sum_j w_j psi_j / (pi (t + tau_j))``.
    """
    t0 = time.perf_counter()
    tau, w = nystrom_mesh(instance, ratio, n_nodes)
    n = tau.size
    beta = instance.line.beta
    # Work with t**beta-weighted unknowns: the similarity D K D^-1 with
    # D = diag(tau**beta) has entries depending on tau_i/tau_j only, so its
    # conditioning reflects the operator rather than the spread of the mesh.
    scale = tau**beta
    kmat = coupling * nystrom_matrix(tau, w) * scale[:, None] / scale[None, :]
    a = np.eye(2 * n)
    a[:n, n:] += kmat
    a[n:, :n] += kmat
    cond = float(np.linalg.cond(a))
    if cond > config.get("nystrom_max_cond"):
        raise ConditioningError(f"collocation matrix condition number {cond:.3e}")
    g = instance.G.interpolate(tau) * scale
    hh = instance.H.interpolate(tau) * scale
    sol = np.linalg.solve(a, np.concatenate([g, hh]))
    phi_n, psi_n = sol[:n] / scale, sol[n:] / scale
    t = instance.G.t
    kern = w[None, :] / (np.pi * (t[:, None] + tau[None, :]))
    phi = instance.G.with_values(instance.G.values - coupling * (kern @ psi_n))
    psi = instance.H.with_values(instance.H.values - coupling * (kern @ phi_n))
    if coupling == 1.0:
        res = residual(instance, phi, psi)
    else:
        b = instance.line.beta
        k_psi = apply_mellin_convolution(_K, 0.0, 0.0, psi, instance.line)
        k_phi = apply_mellin_convolution(_K, 0.0, 0.0, phi, instance.line)
        r1 = phi + coupling * k_psi - instance.G
        r2 = psi + coupling * k_phi - instance.H
        den = math.hypot(instance.G.norm(b), instance.H.norm(b))
        res = math.hypot(r1.norm(b), r2.norm(b)) / (den if den > 0 else 1.0)
    info = {
        "ratio": ratio or config.get("nystrom_ratio"),
        "nodes": n,
        "coupling": coupling,
        "condition": cond,
        "mesh": [float(tau[0]), float(tau[-1])],
        "seconds": time.perf_counter() - t0,
    }
    return SystemSolution(phi, psi, res, "Nystrom", info)


def relative_difference(a: LogGridFunction, b: LogGridFunction, beta: float) -> float:
    den = b.norm(beta)
    num = (a - b).norm(beta)
    return num / den if den > 0 else num


# ---------------------------------------------------------------------------
# manufactured data


def log_bump(t, center: float, width: float) -> np.ndarray:
    """Gaussian in ``log t`` centred at ``log t = center``."""
    return np.exp(-0.5 * ((np.log(t) - center) / width) ** 2)


def _moment_free(rng: np.random.Generator, n_bumps: int):
    """Random bump combination whose integrals against ``1`` and ``1/t`` vanish.

    Both moments of a log-bump are closed form, so two fixed correction bumps
    absorb them exactly.  The result makes ``K w`` vanish like ``t`` at 0 and
    like ``t**-2`` at infinity.
    """
    centers = rng.uniform(-2.0, 2.0, n_bumps)
    widths = rng.uniform(0.4, 1.0, n_bumps)
    amps = rng.normal(size=n_bumps)
    fix_c = np.array([-1.0, 1.0])
    fix_w = np.array([0.7, 0.7])

    def moments(c, s):
        # int exp(-(log t - c)^2/(2 s^2)) t^k dt/t = sqrt(2 pi) s exp(k c + k^2 s^2 / 2)
        m1 = np.sqrt(2 * np.pi) * s * np.exp(c + 0.5 * s**2)
        m0 = np.sqrt(2 * np.pi) * s * np.ones_like(c)
        return m1, m0

    b1, b0 = moments(centers, widths)
    f1, f0 = moments(fix_c, fix_w)
    rhs = -np.array([np.dot(amps, b1), np.dot(amps, b0)])
    fix = np.linalg.solve(np.array([f1, f0]), rhs)
    c_all = np.concatenate([centers, fix_c])
    w_all = np.concatenate([widths, fix_w])
    a_all = np.concatenate([amps, fix])

    def w(t):
        t = np.asarray(t, dtype=float)
        return sum(a * log_bump(t, c, s) for a, c, s in zip(a_all, c_all, w_all))

    return w


def manufactured_instance(rng: np.random.Generator | int, grid: dict | None = None, line: MellinLine | float | None = None, n_bumps: int = 3):
    """Instance with known solution ``(w_phi, w_psi)``.

    Returns ``(instance, phi_exact, psi_exact)``; the data are ``G = w_phi + K
    w_psi`` and ``H = w_psi + K w_phi`` with ``K`` applied by direct quadrature
    on the same grid.
    """
    rng = np.random.default_rng(rng)
    grid = config.get("solver_grid") if grid is None else grid
    line = MellinLine(config.get("solver_beta")) if line is None else line
    if not isinstance(line, MellinLine):
        line = MellinLine(line)
    t_min, t_max, n = grid["t_min"], grid["t_max"], grid["n"]
    w_phi = _moment_free(rng, n_bumps)
    w_psi = _moment_free(rng, n_bumps)
    phi = LogGridFunction.from_function(w_phi, t_min, t_max, n)
    psi = LogGridFunction.from_function(w_psi, t_min, t_max, n)
    G, H = apply_system(phi, psi, line)
    return ModelSystemInstance(G, H, line), phi, psi


def solve_report(sol: SystemSolution, instance: ModelSystemInstance) -> dict:
    return {
        "method": sol.method,
        "beta": instance.line.beta,
        "residual": sol.residual_norm,
        "grid": {"t_min": instance.G.t_min, "t_max": instance.G.t_max, "n": instance.G.n},
        "timings": {"seconds": sol.info.get("seconds", 0.0)},
        "info": {k: v for k, v in sol.info.items() if k != "seconds"},
    }
