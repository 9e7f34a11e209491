"""Lifted symbols on the compactified rectangle.

The rectangle is the closed curve Gamma1 (eta = inf, xi running over the
extended line), Gamma2+ (xi = +inf, eta from inf down to 0), Gamma3
(eta = 0, xi from +inf back to -inf) and Gamma2- (xi = -inf, eta from 0 up to
inf), traversed clockwise in that order.

All closed forms are evaluated in exponent-scaled form so that the limits
xi -> +-inf are reached exactly instead of overflowing.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import config
from .errors import DomainError, SingularSampleError


class Edge(str, enum.Enum):
    GAMMA1 = "gamma1"
    GAMMA2_PLUS = "gamma2plus"
    GAMMA3 = "gamma3"
    GAMMA2_MINUS = "gamma2minus"


ORIENTATION = (Edge.GAMMA1, Edge.GAMMA2_PLUS, Edge.GAMMA3, Edge.GAMMA2_MINUS)


@dataclass(frozen=True)
class SpaceParams:
    """Lebesgue exponent ``p`` and smoothness order ``s`` (called ``r`` for the system)."""

    p: float
    s: float = 0.0

    def __post_init__(self):
        p, s = float(self.p), float(self.s)
        if not (1.0 < p < math.inf):
            raise DomainError(f"need 1 < p < inf, got p={p}")
        if not math.isfinite(s):
            raise DomainError("order must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "s", s)

    @property
    def beta(self) -> float:
        return 1.0 / self.p

    @property
    def r(self) -> float:
        return self.s


@dataclass(frozen=True)
class RectanglePoint:
    edge: Edge
    coord: float

    def __post_init__(self):
        edge = Edge(self.edge)
        coord = float(self.coord)
        if math.isnan(coord):
            raise DomainError("rectangle coordinate is NaN")
        if edge in (Edge.GAMMA2_PLUS, Edge.GAMMA2_MINUS) and coord < 0:
            raise DomainError("eta must lie in [0, inf] on Gamma2")
        object.__setattr__(self, "edge", edge)
        object.__setattr__(self, "coord", coord)

    def canonical(self) -> "RectanglePoint":
        """Representative of corner classes on Gamma1/Gamma3."""
        e, c = self.edge, self.coord
        if e is Edge.GAMMA2_MINUS and c == math.inf:
            return RectanglePoint(Edge.GAMMA1, -math.inf)
        if e is Edge.GAMMA2_PLUS and c == math.inf:
            return RectanglePoint(Edge.GAMMA1, math.inf)
        if e is Edge.GAMMA2_MINUS and c == 0:
            return RectanglePoint(Edge.GAMMA3, -math.inf)
        if e is Edge.GAMMA2_PLUS and c == 0:
            return RectanglePoint(Edge.GAMMA3, math.inf)
        return self

    def same_as(self, other: "RectanglePoint") -> bool:
        a, b = self.canonical(), other.canonical()
        return a.edge is b.edge and a.coord == b.coord


CORNERS = (
    (RectanglePoint(Edge.GAMMA1, -math.inf), RectanglePoint(Edge.GAMMA2_MINUS, math.inf)),
    (RectanglePoint(Edge.GAMMA2_MINUS, 0.0), RectanglePoint(Edge.GAMMA3, -math.inf)),
    (RectanglePoint(Edge.GAMMA3, math.inf), RectanglePoint(Edge.GAMMA2_PLUS, 0.0)),
    (RectanglePoint(Edge.GAMMA2_PLUS, math.inf), RectanglePoint(Edge.GAMMA1, math.inf)),
)


def compactify(u):
    """``xi = tan(pi u / 2)`` with exact infinities at ``u = +-1``."""
    u = np.asarray(u, dtype=float)
    out = np.tan(0.5 * np.pi * u)
    out = np.where(u >= 1.0, np.inf, out)
    out = np.where(u <= -1.0, -np.inf, out)
    return out


@dataclass(frozen=True)
class RectanglePath:
    """Oriented discretization of the rectangle.

    ``edges[k]`` and ``coords[k]`` describe the k-th sample.  Each edge holds
    ``n_edge`` samples including both of its corners, so consecutive edges
    repeat the shared corner and the path ends where it started.
    ``param`` is the position in ``[0, 4]`` along the curve.
    """

    edges: tuple = field(repr=False)
    coords: np.ndarray = field(repr=False)
    param: np.ndarray = field(repr=False)

    @classmethod
    def full(cls, n_edge: int | None = None) -> "RectanglePath":
        n_edge = int(n_edge or config.get("edge_samples"))
        if n_edge < 3:
            raise DomainError("need at least three samples per edge")
        v = np.linspace(0.0, 1.0, n_edge)
        edges, coords, params = [], [], []
        for k, edge in enumerate(ORIENTATION):
            if edge is Edge.GAMMA1:
                c = compactify(2 * v - 1)
            elif edge is Edge.GAMMA2_PLUS:
                c = compactify(1 - v)
            elif edge is Edge.GAMMA3:
                c = compactify(1 - 2 * v)
            else:
                c = compactify(v)
            edges.extend([edge] * n_edge)
            coords.append(c)
            params.append(k + v)
        return cls(tuple(edges), np.concatenate(coords), np.concatenate(params))

    @classmethod
    def gamma1(cls, n: int | None = None) -> "RectanglePath":
        n = int(n or config.get("edge_samples"))
        if n % 2 == 0:
            n += 1  # keep xi = 0 on the path
        v = np.linspace(-1.0, 1.0, n)
        return cls(tuple([Edge.GAMMA1] * n), compactify(v), 0.5 * (v + 1))

    def __len__(self):
        return len(self.edges)

    def points(self) -> Iterator[RectanglePoint]:
        for e, c in zip(self.edges, self.coords):
            yield RectanglePoint(e, c)

    def edge_slices(self):
        """Map each edge to the index array of its samples."""
        arr = np.array([e.value for e in self.edges])
        return {e: np.nonzero(arr == e.value)[0] for e in ORIENTATION if np.any(arr == e.value)}

    def refined(self, factor: int = 2) -> "RectanglePath":
        n_edge = len(self) // len(self.edge_slices())
        if all(e is Edge.GAMMA1 for e in self.edges):
            return RectanglePath.gamma1((n_edge - 1) * factor + 1)
        return RectanglePath.full((n_edge - 1) * factor + 1)


# ---------------------------------------------------------------------------
# scalar building blocks


def _sin_ratio(a1: float, a0: float, xi: np.ndarray) -> np.ndarray:
    """``sin(pi (a1 - i xi)) / sin(pi (a0 - i xi))`` stable for large ``|xi|``."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty(xi.shape, dtype=complex)
    pos = xi >= 0
    with np.errstate(over="ignore"):
        e = np.exp(-2 * np.pi * np.abs(xi))
    ea1, ea0 = np.exp(1j * np.pi * a1), np.exp(1j * np.pi * a0)
    out[pos] = (ea1 - e[pos] / ea1) / (ea0 - e[pos] / ea0)
    neg = ~pos
    out[neg] = (ea1 * e[neg] - 1 / ea1) / (ea0 * e[neg] - 1 / ea0)
    return out


def inv_sin(beta: float, xi) -> np.ndarray:
    """``1 / sin(pi (beta - i xi))``, exactly zero at ``xi = +-inf``."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=complex)
    fin = np.isfinite(xi)
    x = xi[fin]
    z = beta - 1j * x
    # 1/sin(pi z) = 2i / (e^{i pi z} - e^{-i pi z}); factor out the dominant exponential
    pos = x >= 0
    val = np.empty(x.shape, dtype=complex)
    zp = z[pos]
    val[pos] = 2j * np.exp(-1j * np.pi * zp) / (1 - np.exp(-2j * np.pi * zp))
    zn = z[~pos]
    val[~pos] = -2j * np.exp(1j * np.pi * zn) / (1 - np.exp(2j * np.pi * zn))
    out[fin] = val
    return out


def identity_gamma1(params: SpaceParams, xi) -> np.ndarray:
    """``e^{i pi s} sin(pi(beta + s - i xi)) / sin(pi(beta - i xi))``."""
    b, s = params.beta, params.s
    return np.exp(1j * np.pi * s) * _sin_ratio(b + s, b, xi)


def _branch_power(lam: np.ndarray, s: float, gamma: complex) -> np.ndarray:
    """``((lam - gamma)/(lam + gamma))**s`` on the branch continuous along the real line.

    The argument of the base is normalised to increase from 0 at
    ``lam = -inf`` through ``pi`` at ``lam = 0`` to ``2 pi`` at ``lam = +inf``,
    which is what makes the Gamma2 values meet the Gamma1 and Gamma3 values at
    all four corners.
    """
    lam = np.asarray(lam, dtype=float)
    out = np.empty(lam.shape, dtype=complex)
    inf = np.isinf(lam)
    out[inf & (lam > 0)] = np.exp(2j * np.pi * s)
    out[inf & (lam < 0)] = 1.0
    fin = ~inf
    l = lam[fin]
    num, den = l - gamma, l + gamma
    theta = np.angle(num) - np.angle(den) + 2 * np.pi
    mod = np.log(np.abs(num)) - np.log(np.abs(den))
    out[fin] = np.exp(s * (mod + 1j * theta))
    return out


def _validate_gamma(gamma: complex) -> complex:
    gamma = complex(gamma)
    if not (gamma.imag > 0):
        raise DomainError(f"branch parameter gamma needs 0 < arg gamma < pi, got {gamma}")
    return gamma


def _coerce_point(omega) -> RectanglePoint:
    if isinstance(omega, RectanglePoint):
        return omega
    edge, coord = omega
    return RectanglePoint(edge, coord)


def identity_values(params: SpaceParams, edges: Sequence[Edge], coords, gamma: complex | None = None) -> np.ndarray:
    """Vectorised identity symbol along arbitrary rectangle samples."""
    gamma = _validate_gamma(config.default_gamma() if gamma is None else gamma)
    coords = np.asarray(coords, dtype=float)
    edge_arr = np.array([Edge(e).value for e in edges])
    out = np.empty(coords.shape, dtype=complex)
    m1 = edge_arr == Edge.GAMMA1.value
    out[m1] = identity_gamma1(params, coords[m1])
    mp = edge_arr == Edge.GAMMA2_PLUS.value
    out[mp] = _branch_power(coords[mp], params.s, gamma)
    mm = edge_arr == Edge.GAMMA2_MINUS.value
    out[mm] = _branch_power(-coords[mm], params.s, gamma)
    m3 = edge_arr == Edge.GAMMA3.value
    out[m3] = np.exp(1j * np.pi * params.s)
    return out


def identity_symbol(params: SpaceParams, omega, gamma: complex | None = None) -> complex:
    """Symbol of the identity between spaces of order ``s``.

    Gamma1: ``e^{i pi s} sin pi(1/p + s - i xi) / sin pi(1/p - i xi)``;
    Gamma2: ``((eta - gamma)/(eta + gamma))**s`` continued along the edge;
    Gamma3: ``e^{i pi s}``.
    """
    w = _coerce_point(omega)
    return complex(identity_values(params, [w.edge], [w.coord], gamma)[0])


def _validate_c(c: complex) -> tuple[float, float]:
    c = complex(c)
    if c == 0:
        raise DomainError("c must be non-zero")
    arg = math.atan2(c.imag, c.real)
    if arg < 0:
        arg += 2 * math.pi
    if c.imag == 0 and c.real > 0:
        raise DomainError("arg c = 0 (positive real c) is not supported by the lifted symbol")
    if not 0 < arg < 2 * math.pi:
        raise DomainError(f"need 0 < arg c < 2 pi, got {arg}")
    return math.log(abs(c)), arg


def k1_gamma(c: complex, params: SpaceParams, xi) -> np.ndarray:
    """``e^{-i pi (z - 1)} c^{z - s - 1} / sin(pi z)`` with ``z = 1/p - i xi``.

    ``c^delta = |c|^delta e^{i delta arg c}`` with ``arg c`` in ``(0, 2 pi)``.
    Computed as a single exponential so that the decay at ``xi -> +-inf`` wins
    over the growth of the individual factors.
    """
    log_abs, arg = _validate_c(c)
    lc = complex(log_abs, arg)
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=complex)
    fin = np.isfinite(xi)
    x = xi[fin]
    z = params.beta - 1j * x
    expo = -1j * np.pi * (z - 1) + (z - params.s - 1) * lc
    pos = x >= 0
    val = np.empty(x.shape, dtype=complex)
    zp = z[pos]
    val[pos] = 2j * np.exp(expo[pos] - 1j * np.pi * zp) / (1 - np.exp(-2j * np.pi * zp))
    zn = z[~pos]
    val[~pos] = -2j * np.exp(expo[~pos] + 1j * np.pi * zn) / (1 - np.exp(2j * np.pi * zn))
    out[fin] = val
    return out


def k1_values(c: complex, params: SpaceParams, edges: Sequence[Edge], coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=float)
    edge_arr = np.array([Edge(e).value for e in edges])
    out = np.zeros(coords.shape, dtype=complex)
    m = (edge_arr == Edge.GAMMA1.value) | (edge_arr == Edge.GAMMA3.value)
    out[m] = k1_gamma(c, params, coords[m])
    if not np.any(m):
        _validate_c(c)
    return out


def k1_symbol(c: complex, params: SpaceParams, omega) -> complex:
    """Lifted symbol of ``(1/pi) int v(tau) dtau / (t - c tau)``; zero on Gamma2."""
    w = _coerce_point(omega)
    return complex(k1_values(c, params, [w.edge], [w.coord])[0])


@dataclass(frozen=True)
class SymbolSpec:
    """``d0 I + sum_j d_j K_{c_j}`` between spaces of order ``s``."""

    d0: complex
    terms: tuple
    params: SpaceParams
    gamma: complex = complex(0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "d0", complex(self.d0))
        terms = tuple((complex(d), complex(c)) for d, c in self.terms)
        gamma = _validate_gamma(self.gamma)
        for _, c in terms:
            _validate_c(c)
            cg = c * gamma
            if cg.imag == 0:
                raise DomainError(f"c*gamma = {cg} must not be real")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "gamma", gamma)


def composite_values(spec: SymbolSpec, edges, coords) -> np.ndarray:
    out = spec.d0 * identity_values(spec.params, edges, coords, spec.gamma)
    for d, c in spec.terms:
        out = out + d * k1_values(c, spec.params, edges, coords)
    return out


def composite_symbol(spec: SymbolSpec, omega) -> complex:
    w = _coerce_point(omega)
    return complex(composite_values(spec, [w.edge], [w.coord])[0])


@dataclass(frozen=True)
class SymbolMatrix:
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise DomainError("symbol matrix must be square")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries)) if self.dimension > 2 else complex(
            self.entries[0, 0] * self.entries[1, 1] - self.entries[0, 1] * self.entries[1, 0]
        )


def system_entries(params: SpaceParams, edges, coords, gamma: complex | None = None):
    """Diagonal and off-diagonal entries of the 2x2 system symbol."""
    d = identity_values(params, edges, coords, gamma)
    o = k1_values(-1.0, params, edges, coords)
    return d, o


def system_symbol(params: SpaceParams, omega, gamma: complex | None = None) -> SymbolMatrix:
    """Symbol of ``[[I, K], [K, I]]`` with ``K v = (1/pi) int v(tau) dtau/(t + tau)``."""
    w = _coerce_point(omega)
    d, o = system_entries(params, [w.edge], [w.coord], gamma)
    return SymbolMatrix([[d[0], o[0]], [o[0], d[0]]])


def system_det_gamma1(params: SpaceParams, xi) -> np.ndarray:
    """Closed form of the system determinant on Gamma1,
    ``(e^{2 pi r i} sin^2 pi(Xi + r) - e^{-2 pi r i}) / sin^2 pi Xi`` with ``Xi = 1/p - i xi``."""
    r = params.s
    ratio = _sin_ratio(params.beta + r, params.beta, xi)
    inv = inv_sin(params.beta, xi)
    return np.exp(2j * np.pi * r) * ratio**2 - np.exp(-2j * np.pi * r) * inv**2


def sample_det_curve(target, path: RectanglePath | None = None, gamma: complex | None = None) -> np.ndarray:
    """Determinant of a symbol along ``path``.

    ``target`` is either ``SpaceParams`` (the 2x2 system, order ``r = s``) or a
    ``SymbolSpec`` (scalar composite symbol).
    """
    path = RectanglePath.full() if path is None else path
    edges, coords = path.edges, path.coords
    if isinstance(target, SymbolSpec):
        vals = composite_values(target, edges, coords)
    elif isinstance(target, SpaceParams):
        d, o = system_entries(target, edges, coords, gamma)
        vals = d * d - o * o
    else:
        raise DomainError(f"unsupported symbol target {type(target).__name__}")
    bad = ~np.isfinite(vals)
    if np.any(bad):
        k = int(np.argmax(bad))
        pt = RectanglePoint(edges[k], coords[k])
        raise SingularSampleError(f"non-finite determinant at {pt}", pt)
    return vals


def write_curve_csv(path_out, path: RectanglePath, values) -> None:
    with open(path_out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "edge", "re_det", "im_det"])
        for u, e, v in zip(path.param, path.edges, np.asarray(values, dtype=complex)):
            w.writerow([repr(float(u)), e.value, repr(float(v.real)), repr(float(v.imag))])


def spec_to_json(spec: SymbolSpec) -> dict:
    return {
        "d0": [spec.d0.real, spec.d0.imag],
        "terms": [{"d_re": d.real, "d_im": d.imag, "c_re": c.real, "c_im": c.imag, "m": 1} for d, c in spec.terms],
        "p": spec.params.p,
        "s": spec.params.s,
        "gamma": [spec.gamma.real, spec.gamma.imag],
    }


def spec_from_json(doc: dict) -> SymbolSpec:
    from .mellin import _complex_field

    try:
        terms = tuple(
            (complex(t["d_re"], t.get("d_im", 0.0)), complex(t["c_re"], t.get("c_im", 0.0))) for t in doc.get("terms", [])
        )
        params = SpaceParams(doc["p"], doc.get("s", 0.0))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed symbol document: {exc}") from exc
    gamma = _complex_field(doc.get("gamma", config.DEFAULTS["gamma"]))
    return SymbolSpec(_complex_field(doc.get("d0", 1.0)), terms, params, gamma)
