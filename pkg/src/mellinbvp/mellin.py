"""Mellin transforms and Mellin convolution operators on the half-axis.

The substitution ``t = exp(x)`` turns the Mellin transform along the line
``Re z = beta`` into the Fourier transform of ``exp(beta x) u(exp(x))``.  All
discrete transforms therefore live on geometric grids (uniform in ``x``),
where the trapezoidal rule is spectrally accurate.

Operators handled here have the form

    c0 u(t) + (c1 / (pi i)) PV int u(tau) / (tau - t) dtau
            + int K(t / tau) u(tau) dtau / tau

with a meromorphic kernel ``K(t) = sum d_j / (t - c_j)^m_j``.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, signal
from scipy.interpolate import make_interp_spline

from . import config
from .errors import DomainError, TruncationWarning

_REAL_AXIS_TOL = 1e-14


@dataclass(frozen=True)
class KernelTerm:
    """One summand ``d / (t - c)^m`` of a meromorphic kernel."""

    d: complex
    c: complex
    m: int = 1

    def __post_init__(self):
        object.__setattr__(self, "d", complex(self.d))
        object.__setattr__(self, "c", complex(self.c))
        if self.c == 0:
            raise DomainError("kernel pole at t = 0 is not allowed")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"pole multiplicity must be a positive integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def on_positive_axis(self) -> bool:
        return is_positive_real(self.c)


def is_positive_real(c: complex) -> bool:
    """True when ``arg c == 0`` up to rounding."""
    c = complex(c)
    return c.real > 0 and abs(c.imag) <= _REAL_AXIS_TOL * abs(c)


@dataclass(frozen=True)
class MeromorphicKernel:
    """Finite sum of pole terms, ``K(t) = sum_j d_j / (t - c_j)^{m_j}``."""

    terms: tuple = ()

    def __post_init__(self):
        terms = []
        for term in self.terms:
            if not isinstance(term, KernelTerm):
                term = KernelTerm(*term)
            terms.append(term)
        object.__setattr__(self, "terms", tuple(terms))

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.zeros(t.shape, dtype=complex)
        for term in self.terms:
            out += term.d / (t - term.c) ** term.m
        return out

    @property
    def admissible(self) -> bool:
        return check_admissible(self)

    def split(self):
        """Separate terms with poles on the positive axis from the rest."""
        regular = [t for t in self.terms if not t.on_positive_axis]
        singular = [t for t in self.terms if t.on_positive_axis]
        return MeromorphicKernel(tuple(regular)), MeromorphicKernel(tuple(singular))

    def scaled(self, factor: complex) -> "MeromorphicKernel":
        return MeromorphicKernel(tuple(KernelTerm(factor * t.d, t.c, t.m) for t in self.terms))

    def __add__(self, other: "MeromorphicKernel") -> "MeromorphicKernel":
        return MeromorphicKernel(self.terms + other.terms)


def k1_kernel(c: complex = -1.0) -> MeromorphicKernel:
    """Kernel of ``(1/pi) int v(tau) dtau / (t - c tau)``, i.e. ``1/(pi (t - c))``."""
    return MeromorphicKernel(((1.0 / math.pi, c, 1),))


def cauchy_kernel(c1: complex) -> MeromorphicKernel:
    """The Cauchy term ``(c1/(pi i)) PV int u(tau) dtau/(tau - t)`` as a pole term at ``t = 1``."""
    return MeromorphicKernel(((1j * complex(c1) / math.pi, 1.0, 1),))


def check_admissible(kernel: MeromorphicKernel) -> bool:
    """True iff every pole on the positive real axis is simple."""
    for term in kernel.terms:
        if term.c == 0:
            raise DomainError("kernel pole at t = 0 is not allowed")
        if term.on_positive_axis and term.m != 1:
            return False
    return True


@dataclass(frozen=True)
class MellinLine:
    """Vertical line ``Re z = beta`` carrying the Mellin transform."""

    beta: float

    def __post_init__(self):
        beta = float(self.beta)
        if not 0.0 < beta < 1.0:
            raise DomainError(f"Mellin line requires 0 < beta < 1, got {beta}")
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_p(cls, p: float) -> "MellinLine":
        return cls(1.0 / p)


@dataclass(frozen=True)
class LogGridFunction:
    """Complex samples on a geometric grid ``t_k = t_min * q**k`` over ``[t_min, t_max]``."""

    t_min: float
    t_max: float
    values: np.ndarray = field(repr=False)
    truncated: bool = False

    def __post_init__(self):
        t_min, t_max = float(self.t_min), float(self.t_max)
        if not (0 < t_min < t_max and np.isfinite(t_max)):
            raise DomainError(f"need 0 < t_min < t_max < inf, got {t_min}, {t_max}")
        values = np.array(self.values, dtype=complex).reshape(-1)
        if values.size < 2:
            raise DomainError("a log grid needs at least two nodes")
        values.setflags(write=False)
        object.__setattr__(self, "t_min", t_min)
        object.__setattr__(self, "t_max", t_max)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, f, t_min=None, t_max=None, n=None) -> "LogGridFunction":
        grid = config.get("log_grid")
        t_min = grid["t_min"] if t_min is None else t_min
        t_max = grid["t_max"] if t_max is None else t_max
        n = grid["n"] if n is None else n
        t = log_nodes(t_min, t_max, n)
        return cls(t_min, t_max, f(t))

    @classmethod
    def zeros_like(cls, other: "LogGridFunction") -> "LogGridFunction":
        return cls(other.t_min, other.t_max, np.zeros(other.n, dtype=complex))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return np.linspace(math.log(self.t_min), math.log(self.t_max), self.n)

    @property
    def t(self) -> np.ndarray:
        return np.exp(self.x)

    @property
    def h(self) -> float:
        return (math.log(self.t_max) - math.log(self.t_min)) / (self.n - 1)

    def with_values(self, values, truncated=False) -> "LogGridFunction":
        return LogGridFunction(self.t_min, self.t_max, values, truncated)

    def same_grid(self, other: "LogGridFunction") -> bool:
        return (
            self.n == other.n
            and math.isclose(self.t_min, other.t_min, rel_tol=1e-12)
            and math.isclose(self.t_max, other.t_max, rel_tol=1e-12)
        )

    def weighted(self, beta: float) -> np.ndarray:
        return np.exp(beta * self.x) * self.values

    def decays(self, beta: float = 0.0, threshold: float | None = None) -> bool:
        """Endpoint magnitudes of ``t**beta u`` are small relative to the maximum."""
        threshold = config.get("decay_threshold") if threshold is None else threshold
        w = np.abs(self.weighted(beta))
        peak = w.max()
        if peak == 0:
            return True
        return bool(max(w[0], w[-1]) <= threshold * peak)

    def norm(self, beta: float = 0.0) -> float:
        """Discrete ``L^2(dt/t)`` norm of ``t**beta u`` (trapezoid in ``log t``)."""
        return float(np.sqrt(self.h * np.sum(np.abs(self.weighted(beta)) ** 2)))

    def interpolate(self, t, k: int = 5) -> np.ndarray:
        """Spline in ``log t``; zero outside the grid."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        inside = (t >= self.t_min * (1 - 1e-12)) & (t <= self.t_max * (1 + 1e-12))
        if np.any(inside):
            spline = make_interp_spline(self.x, self.values, k=min(k, self.n - 1))
            xs = np.clip(np.log(t[inside]), self.x[0], self.x[-1])
            out[inside] = spline(xs)
        return out

    def resample(self, t_min, t_max, n, k: int = 5) -> "LogGridFunction":
        t = log_nodes(t_min, t_max, n)
        return LogGridFunction(t_min, t_max, self.interpolate(t, k), self.truncated)

    def __add__(self, other):
        _check_same(self, other)
        return self.with_values(self.values + other.values, self.truncated or other.truncated)

    def __sub__(self, other):
        _check_same(self, other)
        return self.with_values(self.values - other.values, self.truncated or other.truncated)

    def __mul__(self, scalar):
        return self.with_values(self.values * scalar, self.truncated)

    __rmul__ = __mul__

    def to_csv(self, path) -> None:
        write_grid_csv(path, self.t, self.values)

    @classmethod
    def from_csv(cls, path) -> "LogGridFunction":
        t, values = read_grid_csv(path)
        ratios = t[1:] / t[:-1]
        if not np.allclose(ratios, ratios[0], rtol=1e-9):
            raise DomainError("CSV nodes are not geometrically spaced")
        return cls(t[0], t[-1], values)


def log_nodes(t_min: float, t_max: float, n: int) -> np.ndarray:
    return np.exp(np.linspace(math.log(t_min), math.log(t_max), int(n)))


def _check_same(a: LogGridFunction, b: LogGridFunction):
    if not a.same_grid(b):
        raise DomainError("grid mismatch between LogGridFunction operands")


def write_grid_csv(path, t, values) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "re", "im"])
        for tk, vk in zip(np.asarray(t), np.asarray(values, dtype=complex)):
            w.writerow([repr(float(tk)), repr(float(vk.real)), repr(float(vk.imag))])


def read_grid_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t", "re", "im"]:
        raise DomainError(f"{path}: expected header t,re,im")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise DomainError(f"{path}: need at least two rows")
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def kernel_to_json(kernel: MeromorphicKernel, c0: complex = 0.0, c1: complex = 0.0) -> dict:
    c0, c1 = complex(c0), complex(c1)
    return {
        "terms": [
            {"d_re": t.d.real, "d_im": t.d.imag, "c_re": t.c.real, "c_im": t.c.imag, "m": t.m}
            for t in kernel.terms
        ],
        "c0": [c0.real, c0.imag],
        "c1": [c1.real, c1.imag],
    }


def kernel_from_json(doc) -> tuple[MeromorphicKernel, complex, complex]:
    """Inverse of :func:`kernel_to_json`; accepts a dict or a JSON string."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        terms = tuple(
            KernelTerm(complex(t["d_re"], t.get("d_im", 0.0)), complex(t["c_re"], t.get("c_im", 0.0)), t.get("m", 1))
            for t in doc.get("terms", [])
        )
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed kernel document: {exc}") from exc
    c0 = _complex_field(doc.get("c0", 0.0))
    c1 = _complex_field(doc.get("c1", 0.0))
    return MeromorphicKernel(terms), c0, c1


def _complex_field(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    return complex(v)


# ---------------------------------------------------------------------------
# symbols by quadrature


def _principal_log(w: complex) -> complex:
    return complex(math.log(abs(w)), math.atan2(w.imag, w.real))


def _fourier_halfline(f, a: float, omega: float, epsabs: float, limit: int) -> complex:
    """``int_a^inf f(x) exp(-i omega x) dx`` for complex ``f`` decaying at infinity."""
    parts = {}
    for name, fn in (("re", lambda x: f(x).real), ("im", lambda x: f(x).imag)):
        if omega == 0.0:
            parts[name + "c"] = integrate.quad(fn, a, np.inf, epsabs=epsabs, epsrel=1e-12, limit=limit)[0]
            parts[name + "s"] = 0.0
            continue
        w = abs(omega)
        sgn = 1.0 if omega > 0 else -1.0
        parts[name + "c"] = integrate.quad(fn, a, np.inf, weight="cos", wvar=w, epsabs=epsabs, limlst=200)[0]
        parts[name + "s"] = sgn * integrate.quad(fn, a, np.inf, weight="sin", wvar=w, epsabs=epsabs, limlst=200)[0]
    cos_part = parts["rec"] + 1j * parts["imc"]
    sin_part = parts["res"] + 1j * parts["ims"]
    return cos_part - 1j * sin_part


def _weighted_kernel(kernel: MeromorphicKernel, beta: float, x: float) -> complex:
    """``exp(beta x) K(exp(x))`` without overflow for large ``|x|``."""
    val = 0.0j
    for term in kernel.terms:
        if x > 0:
            val += term.d * math.exp((beta - term.m) * x) / (1.0 - term.c * math.exp(-x)) ** term.m
        else:
            val += term.d * math.exp(beta * x) / (math.exp(x) - term.c) ** term.m
    return val


def _mellin_regular(kernel: MeromorphicKernel, beta: float, xi: float, epsabs, limit) -> complex:
    """``int_0^inf t^(beta - i xi - 1) K(t) dt`` for kernels without positive-real poles."""
    if not kernel.terms:
        return 0.0j

    def right(x):
        return _weighted_kernel(kernel, beta, x)

    def left(x):
        return _weighted_kernel(kernel, beta, -x)

    return _fourier_halfline(right, 0.0, xi, epsabs, limit) + _fourier_halfline(left, 0.0, -xi, epsabs, limit)


def _mellin_pv_pole(c: float, beta: float, xi: float, epsabs, limit) -> complex:
    """``PV int_0^inf t^(z-1) / (t - c) dt`` for a simple pole ``c > 0``."""
    z = complex(beta, -xi)
    lo, hi = 0.5 * c, 2.0 * c
    re_val = integrate.quad(lambda t: (t ** (z - 1)).real, lo, hi, weight="cauchy", wvar=c, epsabs=epsabs, limit=limit)[0]
    im_val = integrate.quad(lambda t: (t ** (z - 1)).imag, lo, hi, weight="cauchy", wvar=c, epsabs=epsabs, limit=limit)[0]
    core = re_val + 1j * im_val

    pole = MeromorphicKernel(((1.0, c, 1),))

    def right(x):
        return _weighted_kernel(pole, beta, x)

    def left(x):
        return _weighted_kernel(pole, beta, -x)

    tail_r = _fourier_halfline(right, math.log(hi), xi, epsabs, limit)
    tail_l = _fourier_halfline(left, -math.log(lo), -xi, epsabs, limit)
    return core + tail_r + tail_l


def mellin_symbol(kernel: MeromorphicKernel, c0: complex, c1: complex, line: MellinLine, xi) -> complex | np.ndarray:
    """Symbol ``c0 + c1 coth(pi (i beta + xi)) + M_beta K(xi)`` by adaptive quadrature.

    Positive-real simple poles are integrated as principal values.
    """
    if not isinstance(line, MellinLine):
        line = MellinLine(line)
    if not check_admissible(kernel):
        raise DomainError("kernel is not admissible: positive-real pole of multiplicity > 1")
    epsabs = config.get("quad_epsabs")
    limit = config.get("quad_limit")
    regular, singular = kernel.split()
    beta = line.beta

    def one(x):
        x = float(x)
        val = complex(c0)
        if c1 != 0:
            val += complex(c1) / np.tanh(np.pi * complex(x, beta))
        val += _mellin_regular(regular, beta, x, epsabs, limit)
        for term in singular.terms:
            val += term.d * _mellin_pv_pole(term.c.real, beta, x, epsabs, limit)
        return val

    xi_arr = np.asarray(xi, dtype=float)
    if xi_arr.ndim == 0:
        return one(xi_arr)
    return np.array([one(v) for v in xi_arr.ravel()]).reshape(xi_arr.shape)


def mellin_symbol_closed_form(kernel: MeromorphicKernel, c0: complex, c1: complex, line: MellinLine, xi):
    """Same symbol through residue calculus.

    For ``z = beta - i xi`` and a pole term ``1/(t - c)^m``,

        M = pi/sin(pi z) * (-1)^(m-1) * binom(z-1, m-1) * (-c)^(z-m)

    with the principal branch of ``(-c)``; a positive-real simple pole gives the
    principal value ``-pi cot(pi z) c^(z-1)``.
    """
    if not isinstance(line, MellinLine):
        line = MellinLine(line)
    z = line.beta - 1j * np.asarray(xi, dtype=float)
    out = np.full(z.shape, complex(c0), dtype=complex)
    if c1 != 0:
        out = out + complex(c1) * (-1j) / np.tan(np.pi * z)
    for term in kernel.terms:
        if term.on_positive_axis:
            if term.m != 1:
                raise DomainError("kernel is not admissible")
            out = out + term.d * (-np.pi / np.tan(np.pi * z)) * np.exp((z - 1) * math.log(term.c.real))
            continue
        log_mc = _principal_log(-term.c)
        falling = np.ones_like(z)
        for k in range(1, term.m):
            falling = falling * (z - k) / k
        out = out + term.d * np.pi / np.sin(np.pi * z) * (-1) ** (term.m - 1) * falling * np.exp((z - term.m) * log_mc)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# discrete transform pair


def conjugate_xi_grid(n: int, h: float) -> np.ndarray:
    """Frequencies ``(m - n//2) * 2 pi / (n h)``: the DFT partner of an ``n``-node grid with step ``h``."""
    m = np.arange(n) - n // 2
    return m * (2.0 * np.pi / (n * h))


def _is_conjugate(xi: np.ndarray, n: int, h: float) -> bool:
    return xi.shape == (n,) and np.allclose(xi, conjugate_xi_grid(n, h), rtol=0, atol=1e-12 * (1 + abs(xi).max()))


def _chunked_exp_sum(rows, cols, coeff, weights, sign):
    """``out[r] = sum_c exp(sign*1j*rows[r]*cols[c]) * weights[c]`` without a full matrix."""
    out = np.empty(rows.size, dtype=complex)
    step = max(1, 2 ** 22 // max(cols.size, 1))
    for s in range(0, rows.size, step):
        blk = rows[s : s + step, None] * cols[None, :]
        out[s : s + step] = np.exp(sign * 1j * blk) @ weights
    return coeff * out


def mellin_forward(u: LogGridFunction, line: MellinLine, xi_grid, fast: bool = True) -> np.ndarray:
    """Trapezoidal ``int t^(beta - i xi) u(t) dt/t`` on the grid of ``u``."""
    if not isinstance(line, MellinLine):
        line = MellinLine(line)
    if not u.decays(line.beta):
        warnings.warn("input does not decay at the grid ends; transform is truncated", TruncationWarning, stacklevel=2)
    xi = np.asarray(xi_grid, dtype=float).reshape(-1)
    x = u.x
    g = np.exp(line.beta * x) * u.values
    if fast and _is_conjugate(xi, u.n, u.h):
        n = u.n
        if n % 2 == 0:
            alt = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
            return u.h * np.exp(-1j * xi * x[0]) * np.fft.fft(g * alt)
    return _chunked_exp_sum(xi, x, u.h, g, -1)


def mellin_inverse(u_hat, xi_grid, line: MellinLine, like: LogGridFunction, fast: bool = True) -> LogGridFunction:
    """Trapezoidal ``(1/2pi) int t^(i xi - beta) u_hat(xi) d xi`` onto the grid of ``like``.

    ``xi_grid`` must be uniform.  The result carries ``truncated=True`` when
    ``u_hat`` has not decayed at the ends of the frequency window.
    """
    if not isinstance(line, MellinLine):
        line = MellinLine(line)
    xi = np.asarray(xi_grid, dtype=float).reshape(-1)
    u_hat = np.asarray(u_hat, dtype=complex).reshape(-1)
    if xi.size != u_hat.size or xi.size < 2:
        raise DomainError("frequency samples and grid differ in length")
    dxi = np.diff(xi)
    if not np.allclose(dxi, dxi[0], rtol=1e-9):
        raise DomainError("inverse transform needs a uniform frequency grid")
    step = dxi[0]
    mag = np.abs(u_hat)
    truncated = bool(mag.max() > 0 and max(mag[0], mag[-1]) > config.get("decay_threshold") * mag.max())
    if truncated:
        warnings.warn("transform has not decayed at the frequency window ends", TruncationWarning, stacklevel=2)
    x = like.x
    if fast and _is_conjugate(xi, like.n, like.h) and like.n % 2 == 0:
        n = like.n
        vals = np.fft.ifft(np.exp(1j * xi * x[0]) * u_hat) * n
        alt = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
        g = step / (2 * np.pi) * vals * alt
    else:
        g = _chunked_exp_sum(x, xi, step / (2 * np.pi), u_hat, +1)
    return like.with_values(np.exp(-line.beta * x) * g, truncated)


# ---------------------------------------------------------------------------
# direct quadrature of the operator


def _discrete_kernel(kernel: MeromorphicKernel, n: int, h: float, window_nodes: float) -> np.ndarray:
    """Weights ``w[k]``, ``k = -(n-1)..(n-1)``, with ``(Au)_i = sum_j w[i-j] u_j``.

    Regular pole terms use the trapezoidal rule.  A positive-real pole
    ``c = exp(q h)`` has its singular part ``(d/c) g(y)/y`` (``g`` a Gaussian
    window, ``y = x - log c``) split off and integrated with the alternating
    node rule ``PV int f(y)/(y - y0) ~ 2h sum_{odd offsets}``, which is
    spectrally accurate for smooth data.
    """
    offsets = np.arange(-(n - 1), n) * h
    regular, singular = kernel.split()
    w = h * regular(np.exp(offsets))
    sigma = window_nodes * h
    for term in singular.terms:
        x0 = math.log(term.c.real)
        q = x0 / h
        if abs(q - round(q)) > 1e-8:
            raise DomainError(
                f"positive-real pole at c={term.c.real} does not fall on the grid lattice "
                f"(log c / h = {q:.6f}); choose a grid whose step divides log c"
            )
        q = int(round(q))
        y = offsets - x0
        with np.errstate(divide="ignore", invalid="ignore"):
            smooth = term.d / (np.exp(offsets) - term.c.real) - (term.d / term.c.real) * np.exp(-(y / sigma) ** 2) / y
        smooth[n - 1 + q] = -term.d / (2 * term.c.real)
        w = w + h * smooth
        k = np.arange(-(n - 1), n) - q
        odd = (k % 2) != 0
        pv = np.zeros_like(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            pv[odd] = 2.0 * np.exp(-((k[odd] * h) / sigma) ** 2) / (k[odd] * h)
        # the rule approximates PV int u(y) g(s-y)/(s-y) dy with s - y = k h
        w = w + h * (term.d / term.c.real) * pv
    return w


def apply_mellin_convolution(kernel: MeromorphicKernel, c0: complex, c1: complex, u: LogGridFunction, line: MellinLine | None = None) -> LogGridFunction:
    """Evaluate the Mellin convolution operator at every node of ``u``.

    ``line`` fixes the weight ``t**beta`` used to judge decay at the grid ends
    (default ``beta = 1/2``).  Non-decaying input is still processed but the
    result is flagged ``truncated``.
    """
    if not check_admissible(kernel):
        raise DomainError("kernel is not admissible: positive-real pole of multiplicity > 1")
    beta = 0.5 if line is None else (line.beta if isinstance(line, MellinLine) else MellinLine(line).beta)
    truncated = not u.decays(beta)
    full = kernel + cauchy_kernel(c1) if c1 != 0 else kernel
    out = complex(c0) * u.values
    if full.terms:
        # convolve in the weighted variable so round-off scales with t**beta |u|
        n, h = u.n, u.h
        if beta * (n - 1) * h > 600:
            raise DomainError("grid too long for weighted evaluation on this line")
        w = _discrete_kernel(full, n, h, config.get("pv_window_nodes"))
        w = w * np.exp(beta * np.arange(-(n - 1), n) * h)
        scale = np.exp(beta * np.arange(n) * h)
        conv = signal.fftconvolve(w, u.values * scale)
        out = out + conv[n - 1 : 2 * n - 1] / scale
    return u.with_values(out, truncated or u.truncated)


def multiply_symbol(u: LogGridFunction, symbol, line: MellinLine, pad: int = 2) -> LogGridFunction:
    """Apply the operator with Mellin symbol ``symbol(xi)`` by forward-multiply-inverse.

    The grid is zero-padded by ``pad`` times its length on each side so that
    the circular convolution implied by the discrete transform does not wrap.
    """
    if not isinstance(line, MellinLine):
        line = MellinLine(line)
    big, lo = _padded(u, pad)
    xi = conjugate_xi_grid(big.n, big.h)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        u_hat = mellin_forward(big, line, xi)
        res = mellin_inverse(symbol(xi) * u_hat, xi, line, big)
    vals = res.values[lo : lo + u.n]
    return u.with_values(vals, u.truncated)


def _padded(u: LogGridFunction, pad: int):
    lo = pad * u.n
    total = u.n + 2 * lo
    if total % 2:
        total += 1
    vals = np.zeros(total, dtype=complex)
    vals[lo : lo + u.n] = u.values
    log_min = math.log(u.t_min) - lo * u.h
    t_min = math.exp(log_min)
    t_max = math.exp(log_min + (total - 1) * u.h)
    return LogGridFunction(t_min, t_max, vals), lo


def sample_function(f, grid: LogGridFunction | Sequence[float]) -> LogGridFunction:
    """Sample ``f`` on the nodes of an existing grid (or a ``(t_min, t_max, n)`` triple)."""
    if isinstance(grid, LogGridFunction):
        return grid.with_values(f(grid.t))
    t_min, t_max, n = grid
    return LogGridFunction.from_function(f, t_min, t_max, n)
