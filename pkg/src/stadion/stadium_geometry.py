"""Stadium, periodic-orbit tangents and the circumscribing polygon envelope.

The stadium has semicircular caps of radius 1 centred at (+-L, 0) joined by the
flat segments y = +-1, |x| <= L.  A periodic orbit reflecting off the right cap
at polar angle phi defines the tangent line n(phi).x = 1 + L cos(phi); the left
cap carries the mirror image with normal angle pi - phi.  Intersecting
neighbouring tangent lines (together with the flats) gives the envelope.

Angles that are integer multiples of pi/16 are tracked as integers ("units"),
which lets vertices be computed exactly in the trigonometric field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .trigfield import FieldElement, ONE, from_trig, inverse

UNIT = math.pi / 16


class DegenerateEnvelopeError(ValueError):
    """The tangent data does not define a bounded convex polygon."""


class OutsideStadiumError(ValueError):
    pass


@dataclass(frozen=True)
class StadiumSpec:
    L: float = 1.0
    case: str = "custom"

    def __post_init__(self):
        if not float(self.L) > 0:
            raise ValueError(f"half flat length must be positive, got {self.L!r}")

    @property
    def exact_L(self) -> Optional[Fraction]:
        """L as a rational when it was given as int or Fraction."""
        if isinstance(self.L, (int, Fraction)) and not isinstance(self.L, bool):
            return Fraction(self.L)
        return None

    def contains(self, p, tol: float = 1e-12) -> bool:
        x, y = float(p[0]), float(p[1])
        L = float(self.L)
        if abs(x) <= L:
            return abs(y) <= 1 + tol
        cx = L if x > 0 else -L
        return math.hypot(x - cx, y) <= 1 + tol

    def boundary_samples(self, n: int) -> np.ndarray:
        """n points spread along the boundary proportionally to arc length."""
        L = float(self.L)
        total = 4 * L + 2 * math.pi
        s = np.arange(n) * (total / n)
        pts = np.empty((n, 2))
        for i, t in enumerate(s):
            if t < 2 * L:  # top flat, right to left
                pts[i] = (L - t, 1.0)
            elif t < 2 * L + math.pi:  # left cap
                a = math.pi / 2 + (t - 2 * L)
                pts[i] = (-L + math.cos(a), math.sin(a))
            elif t < 4 * L + math.pi:  # bottom flat
                pts[i] = (-L + (t - 2 * L - math.pi), -1.0)
            else:  # right cap
                a = -math.pi / 2 + (t - 4 * L - math.pi)
                pts[i] = (L + math.cos(a), math.sin(a))
        return pts


@dataclass(frozen=True)
class OrbitTangentSet:
    """Polar angles on the right cap where periodic orbits reflect.

    ``units`` holds the same angles as integer multiples of pi/16 when available.
    """

    cap_angles: tuple
    units: Optional[tuple] = None

    @classmethod
    def from_units(cls, units: Sequence[int]) -> "OrbitTangentSet":
        u = tuple(sorted(set(int(k) for k in units)))
        return cls(tuple(k * UNIT for k in u), u)

    @classmethod
    def symmetric_units(cls, nonnegative: Sequence[int]) -> "OrbitTangentSet":
        """Tangent set closed under phi -> -phi from its nonnegative half."""
        return cls.from_units([k for u in nonnegative for k in (u, -u)])

    def __post_init__(self):
        if not self.cap_angles:
            raise DegenerateEnvelopeError("tangent set is empty")
        for a in self.cap_angles:
            if not -math.pi / 2 < a < math.pi / 2:
                if math.isclose(abs(a), math.pi / 2):
                    raise DegenerateEnvelopeError("a cap tangent at +-pi/2 coincides with a flat side")
                raise DegenerateEnvelopeError(f"cap angle {a} outside (-pi/2, pi/2)")
        if self.units is not None and len(self.units) != len(self.cap_angles):
            raise ValueError("units and cap_angles disagree in length")


@dataclass(frozen=True)
class SupportLine:
    """Line n.x = h with n = (cos theta, sin theta); ``role`` is right/left/top/bottom."""

    theta: float
    h: float
    role: str
    unit: Optional[int] = None  # theta / (pi/16) modulo 32
    exact_h: Optional[FieldElement] = None

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])


@dataclass
class PolygonEnvelope:
    lines: list
    vertices: np.ndarray  # vertex i joins lines[i] and lines[i+1]
    interior_angles: np.ndarray
    side_lengths: np.ndarray  # length of the side lying on lines[i]
    exact_vertices: Optional[list] = None
    angle_units: Optional[list] = None  # interior angles in units of pi/16
    L: float = 1.0

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def to_json(self) -> dict:
        out = {
            "n_vertices": self.n_vertices,
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
            "interior_angles": [float(a) for a in self.interior_angles],
            "side_lengths": [float(s) for s in self.side_lengths],
            "normals": [float(l.theta) for l in self.lines],
        }
        if self.angle_units is not None:
            out["interior_angles_pi_over_16"] = list(self.angle_units)
        if self.exact_vertices is not None:
            out["exact_vertices"] = [[x.to_json(), y.to_json()] for x, y in self.exact_vertices]
        return out


def _cap_lines(stadium: StadiumSpec, tangents: OrbitTangentSet) -> list:
    L = float(stadium.L)
    Lq = stadium.exact_L
    lines = []
    units = tangents.units if tangents.units is not None else (None,) * len(tangents.cap_angles)
    for phi, k in zip(tangents.cap_angles, units):
        h = 1.0 + L * math.cos(phi)
        eh = None
        if k is not None and Lq is not None:
            eh = ONE + from_trig("cos", k).scale(Lq)
        lines.append(SupportLine(phi % (2 * math.pi), h, "right", None if k is None else k % 32, eh))
        lines.append(SupportLine((math.pi - phi) % (2 * math.pi), h, "left",
                                 None if k is None else (16 - k) % 32, eh))
    lines.append(SupportLine(math.pi / 2, 1.0, "top", 8, ONE))
    lines.append(SupportLine(3 * math.pi / 2, 1.0, "bottom", 24, ONE))
    return lines


def _intersect(l1: SupportLine, l2: SupportLine) -> tuple[float, float]:
    s = math.sin(l2.theta - l1.theta)
    x = (l1.h * math.sin(l2.theta) - l2.h * math.sin(l1.theta)) / s
    y = (l2.h * math.cos(l1.theta) - l1.h * math.cos(l2.theta)) / s
    return x, y


def _intersect_exact(l1: SupportLine, l2: SupportLine):
    inv = inverse(from_trig("sin", l2.unit - l1.unit))
    x = (l1.exact_h * from_trig("sin", l2.unit) - l2.exact_h * from_trig("sin", l1.unit)) * inv
    y = (l2.exact_h * from_trig("cos", l1.unit) - l1.exact_h * from_trig("cos", l2.unit)) * inv
    return x, y


def polygon_from_lines(lines: Sequence[SupportLine], L: float = 1.0) -> PolygonEnvelope:
    """Convex polygon cut out by support lines, sorted by normal angle."""
    lines = sorted(lines, key=lambda l: l.theta)
    n = len(lines)
    if n < 3:
        raise DegenerateEnvelopeError("need at least three support lines")
    gaps = []
    for i in range(n):
        g = (lines[(i + 1) % n].theta - lines[i].theta) % (2 * math.pi)
        if g < 1e-12:
            raise DegenerateEnvelopeError("parallel consecutive tangent lines")
        if g >= math.pi - 1e-12:
            raise DegenerateEnvelopeError("normal gap of pi or more leaves the polygon unbounded")
        gaps.append(g)
    verts = np.array([_intersect(lines[i], lines[(i + 1) % n]) for i in range(n)])
    angles = np.array([math.pi - g for g in gaps])
    sides = np.array([np.linalg.norm(verts[i] - verts[i - 1]) for i in range(n)])
    exact = None
    units = None
    if all(l.unit is not None for l in lines):
        units = [16 - ((lines[(i + 1) % n].unit - lines[i].unit) % 32) for i in range(n)]
        if all(l.exact_h is not None for l in lines):
            exact = [_intersect_exact(lines[i], lines[(i + 1) % n]) for i in range(n)]
    return PolygonEnvelope(list(lines), verts, angles, sides, exact, units, L)


def build_envelope(stadium: StadiumSpec, tangents: OrbitTangentSet) -> PolygonEnvelope:
    """Tangent polygon circumscribing the stadium."""
    return polygon_from_lines(_cap_lines(stadium, tangents), float(stadium.L))


def containment_violation(envelope: PolygonEnvelope, points: np.ndarray) -> float:
    """Largest amount by which any point lies outside the envelope (<= 0 means inside)."""
    normals = np.array([l.normal for l in envelope.lines])
    offsets = np.array([l.h for l in envelope.lines])
    return float(np.max(points @ normals.T - offsets))


def tangency_defects(envelope: PolygonEnvelope) -> list[float]:
    """|distance(cap centre, cap line) - 1| for every cap tangent line."""
    L = envelope.L
    out = []
    for l in envelope.lines:
        if l.role in ("right", "left"):
            cx = L if l.role == "right" else -L
            out.append(abs(l.h - l.normal[0] * cx - 1.0))
    return out


def tangency_on_sides(envelope: PolygonEnvelope, tol: float = 1e-12) -> bool:
    """Each tangency point lies on the closed side segment carried by its line.

    The side is then the local mirror at the orbit's reflection point, so an orbit
    hitting the cap at that point reflects identically off the polygon.
    """
    L = envelope.L
    n = envelope.n_vertices
    for i, l in enumerate(envelope.lines):
        if l.role not in ("right", "left"):
            continue
        cx = L if l.role == "right" else -L
        t = np.array([cx, 0.0]) + l.normal
        a, b = envelope.vertices[i - 1], envelope.vertices[i % n]
        ab = b - a
        s = float(np.dot(t - a, ab) / np.dot(ab, ab))
        if not (-tol <= s <= 1 + tol):
            return False
        if np.linalg.norm(a + s * ab - t) > 1e-10:
            return False
    return True


def envelope_radius(envelope: PolygonEnvelope, phi: float, side: str = "right") -> float:
    """Distance from a cap centre to the envelope along polar angle phi."""
    L = envelope.L
    centre = np.array([L if side == "right" else -L, 0.0])
    d = np.array([math.cos(phi), math.sin(phi)])
    best = math.inf
    for l in envelope.lines:
        nd = float(np.dot(l.normal, d))
        if nd > 1e-15:
            best = min(best, (l.h - float(np.dot(l.normal, centre))) / nd)
    return best


def deformation_map(p, stadium: StadiumSpec, envelope: PolygonEnvelope) -> tuple[float, float]:
    """Stretch the stadium onto the envelope: identity on |x| <= L, radial on the caps."""
    x, y = float(p[0]), float(p[1])
    if not stadium.contains((x, y)):
        raise OutsideStadiumError(f"point {(x, y)} lies outside the stadium")
    L = float(stadium.L)
    if abs(x) <= L:
        return x, y
    side = "right" if x > 0 else "left"
    cx = L if x > 0 else -L
    rho = math.hypot(x - cx, y)
    phi = math.atan2(y, x - cx)
    r = envelope_radius(envelope, phi, side)
    return cx + rho * r * math.cos(phi), rho * r * math.sin(phi)


@dataclass(frozen=True)
class DeformationBound:
    epsilon_pol: float
    spacing: float
    eta_pol: str = field(default=(
        "bounded and monotone in epsilon_pol; existence only, no numeric value is asserted"))


def epsilon_pol(spacing: float) -> float:
    """Largest radial gap between a unit circle and tangents spaced by ``spacing``."""
    return 2.0 * math.sin(spacing / 4) ** 2 / math.cos(spacing / 2)


def max_tangent_gap(tangents: OrbitTangentSet) -> float:
    """Largest angular gap between neighbouring cap normals, flats included."""
    angles = sorted(set(tangents.cap_angles) | {-math.pi / 2, math.pi / 2})
    return max(b - a for a, b in zip(angles, angles[1:]))


def envelope_accuracy_bound(case=None, *, spacing: Optional[float] = None,
                            tangents: Optional[OrbitTangentSet] = None) -> DeformationBound:
    """Sup-norm displacement of the deformation map.

    Accepts a preset name, an explicit spacing, or a tangent set (its largest gap is used).
    """
    if spacing is None:
        if tangents is None:
            from .presets import load_case
            tangents = load_case(case).tangents
        spacing = max_tangent_gap(tangents)
    if spacing < 0:
        raise ValueError("spacing must be nonnegative")
    return DeformationBound(epsilon_pol(spacing), spacing)


def sampled_deformation_sup(stadium: StadiumSpec, envelope: PolygonEnvelope, samples: int = 10000) -> float:
    """max |deformation_map(p) - p| over stadium boundary samples."""
    worst = 0.0
    for p in stadium.boundary_samples(samples):
        q = deformation_map(p, stadium, envelope)
        worst = max(worst, math.hypot(q[0] - p[0], q[1] - p[1]))
    return worst


def _as_fraction(a) -> Fraction:
    if isinstance(a, Fraction):
        return a
    if isinstance(a, (int, float, str)):
        return Fraction(a)
    if hasattr(a, "man_exp"):  # mpmath.mpf
        man, exp = a.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    return Fraction(float(a))


def continued_fraction_convergents(a):
    """Yield the convergents p/q of the exact value of ``a``."""
    x = _as_fraction(a)
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        t = math.floor(x)
        p0, q0, p1, q1 = p1, q1, t * p1 + p0, t * q1 + q0
        yield Fraction(p1, q1)
        frac = x - t
        if frac == 0:
            return
        x = 1 / frac


def rationalize(a, tol: float) -> Fraction:
    """First continued-fraction convergent within ``tol`` of ``a``."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    x = _as_fraction(a)
    last = None
    for c in continued_fraction_convergents(x):
        last = c
        if abs(x - c) < tol:
            return c
    return last


def rationalize_tangents(cap_angles: Sequence[float], tol: float) -> list[Fraction]:
    """Each angle / pi replaced by a nearby rational, making the envelope a rational polygon."""
    return [rationalize(a / math.pi, tol) for a in cap_angles]
