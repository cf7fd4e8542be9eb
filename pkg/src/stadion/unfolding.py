"""Mirror unfolding of a rational quarter polygon into its elementary pattern (EPP).

Copies of the polygon P are exact isometries T(x) = M x + t with M in the
dihedral group of order 2N (N = 32 / gcd of the side normal units) and t in the
trigonometric field.  Reflecting copy T across its own side s gives T o R_s, where
R_s is the reflection of P across that side.

Every copy of the EPP has a distinct linear part; two EPP copies glued along a
side either touch in the plane (an internal gluing) or are related by a
translation, which is a period of the unfolded surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .stadium_geometry import PolygonEnvelope, SupportLine, polygon_from_lines
from .trigfield import B, C, ONE, ZERO, FieldElement, from_trig, inverse


class IrrationalPolygonError(ValueError):
    """Angles or side directions are not integer multiples of pi/16."""


class ClosureBudgetError(RuntimeError):
    pass


class GeometryInconsistencyError(ArithmeticError):
    pass


# dihedral elements: (k, 0) rotation by k pi/16; (k, 1) reflection x -> [[c, s], [s, -c]] x with angle k pi/16

def dihedral_mul(g, h):
    (a, s), (b, t) = g, h
    if s == 0:
        return ((a + b) % 32, t)
    return ((a - b) % 32, 1 - t)


def _apply_linear(g, x: FieldElement, y: FieldElement):
    k, s = g
    c, sn = from_trig("cos", k), from_trig("sin", k)
    if s == 0:
        return c * x - sn * y, sn * x + c * y
    return c * x + sn * y, sn * x - c * y


def _linear_float(g) -> np.ndarray:
    k, s = g
    c, sn = math.cos(k * math.pi / 16), math.sin(k * math.pi / 16)
    if s == 0:
        return np.array([[c, -sn], [sn, c]])
    return np.array([[c, sn], [sn, -c]])


@dataclass(frozen=True)
class Isometry:
    linear: tuple  # dihedral element
    tx: FieldElement
    ty: FieldElement

    @staticmethod
    def identity() -> "Isometry":
        return Isometry((0, 0), ZERO, ZERO)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        x, y = _apply_linear(self.linear, other.tx, other.ty)
        return Isometry(dihedral_mul(self.linear, other.linear), x + self.tx, y + self.ty)

    def apply(self, x: FieldElement, y: FieldElement):
        u, v = _apply_linear(self.linear, x, y)
        return u + self.tx, v + self.ty

    def apply_float(self, pts: np.ndarray) -> np.ndarray:
        return pts @ _linear_float(self.linear).T + np.array([float(self.tx), float(self.ty)])

    @property
    def orientation(self) -> int:
        return -1 if self.linear[1] else 1

    @property
    def translation(self) -> tuple:
        return (self.tx, self.ty)


def side_reflection(unit: int, h: FieldElement) -> Isometry:
    """Reflection across n.x = h with n at angle unit * pi/16."""
    n = (from_trig("cos", unit), from_trig("sin", unit))
    return Isometry(((2 * unit + 16) % 32, 1), n[0] * h * 2, n[1] * h * 2)


@dataclass
class RationalPolygon:
    """Convex polygon with exact side data; side i joins vertex i-1 to vertex i."""

    units: list  # outward normal angle of each side in pi/16
    offsets: list  # exact FieldElement h_i of n_i.x = h_i
    labels: list
    vertices: list  # exact (x, y)
    angle_units: list  # interior angle at vertex i in pi/16

    @property
    def n_sides(self) -> int:
        return len(self.units)

    def float_vertices(self) -> np.ndarray:
        return np.array([[float(x), float(y)] for x, y in self.vertices])

    def reflection(self, i: int) -> Isometry:
        return side_reflection(self.units[i], self.offsets[i])

    def side_index(self, label: str) -> int:
        return self.labels.index(label)

    def angles(self) -> list[Fraction]:
        """Interior angles as rational multiples of pi."""
        return [Fraction(u, 16) for u in self.angle_units]

    @classmethod
    def from_envelope(cls, env: PolygonEnvelope, labels: Optional[Sequence[str]] = None) -> "RationalPolygon":
        if env.exact_vertices is None or env.angle_units is None:
            raise IrrationalPolygonError("polygon has no exact pi/16 data; rationalize it first")
        # envelope vertex i joins lines i and i+1, so side i spans vertices i-1..i
        labels = list(labels) if labels is not None else [l.role for l in env.lines]
        return cls([l.unit for l in env.lines], [l.exact_h for l in env.lines], labels,
                   list(env.exact_vertices), list(env.angle_units))


def square(side: int = 1) -> RationalPolygon:
    s = FieldElement.rational(side)
    lines = [SupportLine(0.0, float(side), "a", 0, s), SupportLine(math.pi / 2, float(side), "top", 8, s),
             SupportLine(math.pi, 0.0, "left", 16, ZERO), SupportLine(3 * math.pi / 2, 0.0, "b", 24, ZERO)]
    return RationalPolygon.from_envelope(polygon_from_lines(lines), ["a", "top", "left", "b"])


def cap_centre_offset() -> FieldElement:
    """Distance r + 1 = 1/sin(pi/8) placing the 3pi/8 cap tangent line through the origin."""
    return B + C


def quarter_polygon(case_units: Sequence[int], L=1) -> RationalPolygon:
    """Upper-left quarter of the envelope in the frame where side a is x = r + L + 1.

    The left cap centre sits at (r + 1, 0) with r + 1 = B + C, side b is y = 0 and
    the flat is y = 1.  ``case_units`` are the nonnegative tangent angles in pi/16;
    the cap line with normal angle pi - k pi/16 is labelled ``t<k>`` and the
    vertical tangent (k = 0) is ``v``.
    """
    Lq = Fraction(L)
    cc = cap_centre_offset()
    c = cc + Lq
    units = sorted(set(int(k) for k in case_units))
    if 0 not in units:
        raise ValueError("the quarter construction needs the vertical tangent (unit 0)")
    lines = [SupportLine(0.0, float(c), "a", 0, c),
             SupportLine(math.pi / 2, 1.0, "f", 8, ONE),
             SupportLine(3 * math.pi / 2, 0.0, "b", 24, ZERO)]
    for k in units:
        u = 16 - k
        h = ONE + from_trig("cos", u) * cc
        lines.append(SupportLine(u * math.pi / 16, float(h), "v" if k == 0 else f"t{k}", u, h))
    env = polygon_from_lines(lines)
    return RationalPolygon.from_envelope(env, [l.role for l in env.lines])


def quarter_frame(L=1) -> dict:
    """Frame constants of the quarter polygon: r, centre line c = r + L + 1, cap centre."""
    cc = cap_centre_offset()
    return {"r": cc - 1, "c": cc + Fraction(L), "cap_centre": cc}


# ---------------------------------------------------------------- EPP

@dataclass
class PolygonCopy:
    transform: Isometry
    block: int
    index_in_block: int
    sign: int

    @property
    def orientation(self) -> int:
        return self.transform.orientation

    @property
    def key(self):
        return self.transform.linear

    @property
    def label(self) -> str:
        return f"{self.block + 1}{self.index_in_block + 1}"


@dataclass
class Epp:
    polygon: RationalPolygon
    copies: list
    closure_sides: tuple
    group_order: int

    def __post_init__(self):
        self._by_key = {c.key: i for i, c in enumerate(self.copies)}

    def copy_with_key(self, key) -> Optional[int]:
        return self._by_key.get(key)

    @property
    def sign_assignment(self) -> list[int]:
        return [c.sign for c in self.copies]

    def neighbour(self, i: int, s: int):
        """(copy index, translation) for the copy glued to side s of copy i."""
        target = self.copies[i].transform @ self.polygon.reflection(s)
        j = self.copy_with_key(target.linear)
        if j is None:
            return None, None
        other = self.copies[j].transform
        return j, (other.tx - target.tx, other.ty - target.ty)

    def is_maximal(self) -> bool:
        return all(self.neighbour(i, s)[0] is not None
                   for i in range(len(self.copies)) for s in range(self.polygon.n_sides))

    def copy_polygons(self) -> list[np.ndarray]:
        v = self.polygon.float_vertices()
        return [c.transform.apply_float(v) for c in self.copies]

    def boundary_sides(self) -> list[tuple[int, int]]:
        out = []
        for i in range(len(self.copies)):
            for s in range(self.polygon.n_sides):
                j, t = self.neighbour(i, s)
                if j is not None and not (t[0].is_zero() and t[1].is_zero()):
                    out.append((i, s))
        return out

    def to_json(self) -> dict:
        return {
            "copies": [{"label": c.label, "linear": list(c.key), "sign": c.sign,
                        "translation": [c.transform.tx.to_json(), c.transform.ty.to_json()]}
                       for c in self.copies],
            "group_order": self.group_order,
            "boundary_sides": [[self.copies[i].label, self.polygon.labels[s]] for i, s in self.boundary_sides()],
        }


def _linear_group(poly: RationalPolygon) -> set:
    gens = [((2 * u + 16) % 32, 1) for u in poly.units]
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        g = frontier.pop()
        for h in gens:
            k = dihedral_mul(g, h)
            if k not in seen:
                seen.add(k)
                frontier.append(k)
    return seen


def _convex_overlap(p: np.ndarray, q: np.ndarray, tol: float = 1e-9) -> bool:
    """True when two convex polygons share interior area (touching does not count)."""
    for poly in (p, q):
        n = len(poly)
        for i in range(n):
            e = poly[(i + 1) % n] - poly[i]
            axis = np.array([-e[1], e[0]])
            pa, qa = p @ axis, q @ axis
            if pa.max() <= qa.min() + tol * np.linalg.norm(axis) or qa.max() <= pa.min() + tol * np.linalg.norm(axis):
                return False
    return True


def build_epp(polygon: RationalPolygon, seed_sides: Sequence = (), closure_sides: Sequence[str] = ("a", "b"),
              copy_budget: int = 4096, require_maximal: bool = True) -> Epp:
    """Elementary pattern: closure under ``closure_sides`` gives a block; blocks are then
    reflected across ``seed_sides`` in breadth-first order.

    ``seed_sides`` is either a list of side labels or a list of tiers (lists of labels);
    each tier is exhausted over all blocks before the next one is tried.  A candidate
    block is accepted only when none of its linear parts is present yet and it does
    not overlap the pattern built so far.  Signs follow orientation parity.
    """
    group = _linear_group(polygon)
    cl = [polygon.side_index(s) for s in closure_sides]
    if seed_sides and all(isinstance(s, str) for s in seed_sides):
        tiers = [list(seed_sides)]
    else:
        tiers = [list(t) for t in seed_sides]
    tiers = [[polygon.side_index(s) for s in t] for t in tiers]

    def block_of(T: Isometry) -> list[Isometry]:
        out, seen = [T], {T.linear}
        i = 0
        while i < len(out):
            for s in cl:
                U = out[i] @ polygon.reflection(s)
                if U.linear not in seen:
                    seen.add(U.linear)
                    out.append(U)
            i += 1
            if len(out) > copy_budget:
                raise ClosureBudgetError("closure sides generate an unbounded block")
        return out

    v = polygon.float_vertices()
    copies: list[PolygonCopy] = []
    keys: set = set()
    shapes: list[np.ndarray] = []

    def accept(block: list[Isometry]):
        b = len({c.block for c in copies})
        for j, T in enumerate(block):
            copies.append(PolygonCopy(T, b, j, T.orientation))
            keys.add(T.linear)
            shapes.append(T.apply_float(v))

    def _grow(queue, seeds):
        while queue:
            b = queue.pop(0)
            members = [c for c in copies if c.block == b]
            for c in members:
                for s in seeds:
                    cand = block_of(c.transform @ polygon.reflection(s))
                    if any(T.linear in keys for T in cand):
                        continue
                    polys = [T.apply_float(v) for T in cand]
                    if any(_convex_overlap(p, q) for p in polys for q in shapes):
                        continue
                    accept(cand)
                    queue.append(copies[-1].block)
                    if len(copies) > copy_budget:
                        raise ClosureBudgetError(f"more than {copy_budget} copies")

    accept(block_of(Isometry.identity()))
    for seeds in tiers:
        queue = sorted({c.block for c in copies})
        _grow(queue, seeds)
    epp = Epp(polygon, copies, tuple(closure_sides), len(group))
    if require_maximal and len(keys) != len(group):
        raise ClosureBudgetError(
            f"pattern stalled with {len(keys)} of {len(group)} orientations; add seed sides")
    return epp


# ---------------------------------------------------------------- periods

D_X = (FieldElement.rational(2), ZERO)
D_Y = (ZERO, FieldElement.rational(2))


@dataclass
class Period:
    label: str
    source: tuple  # (copy index, side index)
    target: tuple
    vector: tuple  # exact (x, y)
    a_x: FieldElement = None
    a_y: FieldElement = None
    multiplicity: int = 1
    members: list = field(default_factory=list)  # all boundary pairs sharing this vector

    @property
    def vector_float(self) -> tuple[float, float]:
        return float(self.vector[0]), float(self.vector[1])

    def integer_coefficients(self) -> tuple[list[int], list[int]]:
        """Integers a_xf, a_yf with a = (1/4) sum_f a_f X_f."""
        ax = [c * 4 for c in self.a_x.coeffs]
        ay = [c * 4 for c in self.a_y.coeffs]
        if any(c.denominator != 1 for c in ax + ay):
            raise GeometryInconsistencyError(f"period {self.label} has coefficients outside (1/4)Z")
        return [int(c) for c in ax], [int(c) for c in ay]

    def I_constants(self) -> tuple[int, int]:
        ax, ay = self.integer_coefficients()
        return sum(abs(c) for c in ax[1:]), sum(abs(c) for c in ay[1:])


def decompose_period(vector: tuple, base_x: tuple = D_X, base_y: tuple = D_Y) -> tuple[FieldElement, FieldElement]:
    """Exact (a_x, a_y) with vector = a_x base_x + a_y base_y."""
    (bx1, bx2), (by1, by2) = base_x, base_y
    det = bx1 * by2 - by1 * bx2
    if det.is_zero():
        raise GeometryInconsistencyError("base periods are parallel")
    inv = inverse(det)
    ax = (vector[0] * by2 - vector[1] * by1) * inv
    ay = (bx1 * vector[1] - bx2 * vector[0]) * inv
    rx = float(ax) * float(bx1) + float(ay) * float(by1) - float(vector[0])
    ry = float(ax) * float(bx2) + float(ay) * float(by2) - float(vector[1])
    if math.hypot(rx, ry) > 1e-8 * (1 + math.hypot(float(vector[0]), float(vector[1]))):
        raise GeometryInconsistencyError("decomposition residual too large")
    return ax, ay


def _canonical(v: tuple) -> tuple:
    """Representative of {v, -v} so that a period and its inverse compare equal."""
    x, y = v
    fx, fy = float(x), float(y)
    if fx > 1e-12 or (abs(fx) <= 1e-12 and fy > 0):
        return v
    return (-x, -y)


def boundary_pairs(epp: Epp) -> list[tuple[tuple, tuple, tuple]]:
    """Unordered boundary gluings ((i, s), (j, s), t) with T_j = tau_t o T_i o R_s."""
    out = []
    seen = set()
    for i in range(len(epp.copies)):
        for s in range(epp.polygon.n_sides):
            j, t = epp.neighbour(i, s)
            if t[0].is_zero() and t[1].is_zero():
                continue
            key = (min((i, s), (j, s)), max((i, s), (j, s)))
            if key in seen:
                continue
            seen.add(key)
            out.append(((i, s), (j, s), t))
    return out


def enumerate_periods(epp: Epp, base_x: tuple = D_X, base_y: tuple = D_Y) -> list[Period]:
    """Distinct period vectors (up to sign) linking parallel sides of opposite-orientation copies."""
    groups: dict = {}
    order = []
    for (i, s), (j, _), t in boundary_pairs(epp):
        if epp.copies[i].orientation == epp.copies[j].orientation:
            raise GeometryInconsistencyError("glued copies share an orientation")
        k = _canonical(t)
        if k not in groups:
            groups[k] = []
            order.append(k)
        groups[k].append(((i, s), (j, s)))
    periods = []
    lab = lambda c, s: f"{epp.copies[c].label}{s + 1}"
    for k in order:
        (src, dst) = groups[k][0]
        ax, ay = decompose_period(k, base_x, base_y)
        periods.append(Period(f"{lab(*src)}->{lab(*dst)}", src, dst, k, ax, ay, len(groups[k]), groups[k]))
    return periods


# ---------------------------------------------------------------- topology

def genus_from_angles(angles: Sequence[Fraction]) -> int:
    """Genus of the translation surface of a rational polygon with angles m_i pi / n_i."""
    fr = [Fraction(a) for a in angles]
    if any(a <= 0 for a in fr):
        raise IrrationalPolygonError("angles must be positive rational multiples of pi")
    N = reduce(math.lcm, (a.denominator for a in fr), 1)
    g = 1 + Fraction(N, 2) * sum((a.numerator - 1) / Fraction(a.denominator) for a in fr)
    if g.denominator != 1:
        raise GeometryInconsistencyError(f"non-integral genus {g}")
    return int(g)


def genus(polygon) -> int:
    if isinstance(polygon, RationalPolygon):
        return genus_from_angles(polygon.angles())
    angles = []
    for a in polygon:
        if isinstance(a, float):
            raise IrrationalPolygonError("pass angles as exact fractions of pi")
        angles.append(Fraction(a))
    return genus_from_angles(angles)


def _rank(rows: list[list[int]]) -> int:
    """Rank over the rationals by fraction-free elimination."""
    m = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                m[i] = [p[col] * a - f * b for a, b in zip(m[i], p)]
                g = reduce(math.gcd, m[i], 0)
                if g > 1:
                    m[i] = [a // g for a in m[i]]
        rank += 1
    return rank


@dataclass
class Homology:
    edges: list  # ((i, s), (j, s), internal?)
    vertex_loops: list
    period_loops: list
    euler: tuple  # (V, E, F)

    @property
    def genus(self) -> int:
        V, E, F = self.euler
        return (2 - (V - E + F)) // 2


def surface_homology(epp: Epp, pairs=None) -> Homology:
    """Dual-graph cycles of the glued surface, with vertex loops and one loop per boundary pair."""
    n, ns = len(epp.copies), epp.polygon.n_sides
    edge_of = {}
    edges = []
    for i in range(n):
        for s in range(ns):
            j, t = epp.neighbour(i, s)
            key = (min((i, s), (j, s)), max((i, s), (j, s)))
            if key not in edge_of:
                edge_of[key] = len(edges)
                edges.append((key[0], key[1], t[0].is_zero() and t[1].is_zero()))
    E = len(edges)

    def cross(i, s):
        """Signed edge and destination when leaving copy i through side s."""
        j, _ = epp.neighbour(i, s)
        key = (min((i, s), (j, s)), max((i, s), (j, s)))
        return edge_of[key], (1 if (i, s) == key[0] else -1), j

    # vertex loops: walk around each corner class alternating its two sides
    seen = set()
    vloops = []
    for i in range(n):
        for v in range(ns):
            if (i, v) in seen:
                continue
            sides = (v, (v + 1) % ns)
            vec = [0] * E
            cur, k = i, 0
            while True:
                seen.add((cur, v))
                e, sg, nxt = cross(cur, sides[k % 2])
                vec[e] += sg
                cur, k = nxt, k + 1
                if cur == i and k % 2 == 0:
                    break
            vloops.append(vec)
    # spanning tree over internal edges
    parent = {0: None}
    queue = [0]
    while queue:
        i = queue.pop(0)
        for s in range(ns):
            e, sg, j = cross(i, s)
            if edges[e][2] and j not in parent:
                parent[j] = (i, e, sg)
                queue.append(j)
    if len(parent) != n:
        raise GeometryInconsistencyError("internal gluings do not connect the pattern")

    def path(i):
        vec = [0] * E
        while parent[i] is not None:
            p, e, sg = parent[i]
            vec[e] += sg
            i = p
        return vec

    ploops = []
    for (i, s), (j, _), _t in (pairs if pairs is not None else boundary_pairs(epp)):
        e, sg, _ = cross(i, s)
        pi_, pj = path(i), path(j)
        ploops.append([a + (sg if k == e else 0) - b for k, (a, b) in enumerate(zip(pi_, pj))])
    return Homology(edges, vloops, ploops, (len(vloops), E, n))


@dataclass
class UnfoldingSummary:
    genus: int
    independent_period_count: int
    linking_period_count: int
    boundary_pair_count: int
    coefficient_lcm: int
    homology_rank: int
    w: int = 4

    def to_json(self) -> dict:
        return dict(self.__dict__)


def independent_period_count(epp: Epp, periods: Sequence[Period]) -> tuple[int, int]:
    """(rank of the period loops in H1, rank of H1) for one loop per distinct period."""
    pairs = []
    for p in periods:
        (i, s), (j, _) = p.source, p.target
        pairs.append(((i, s), (j, s), p.vector))
    h = surface_homology(epp, pairs)
    rv = _rank(h.vertex_loops)
    V, E, F = h.euler
    h1 = (E - F + 1) - rv
    return _rank(h.vertex_loops + h.period_loops) - rv, h1


def summarize(epp: Epp, periods: Optional[Sequence[Period]] = None) -> UnfoldingSummary:
    periods = enumerate_periods(epp) if periods is None else periods
    indep, h1 = independent_period_count(epp, periods)
    lcm = reduce(math.lcm, (p.a_x.denominator_lcm() for p in periods), 1)
    lcm = reduce(math.lcm, (p.a_y.denominator_lcm() for p in periods), lcm)
    return UnfoldingSummary(genus(epp.polygon), indep, len(periods), len(boundary_pairs(epp)), lcm, h1)


def case_seed_sides(polygon: RationalPolygon) -> list[list[str]]:
    """Seed tiers for the preset quarters: the tangent through the origin, then every cap side."""
    cap = [l for l in polygon.labels if l not in ("a", "b")]
    return [["t6"], cap]


def case_epp(case_units: Sequence[int], L=1) -> Epp:
    P = quarter_polygon(case_units, L)
    return build_epp(P, case_seed_sides(P))


# ---------------------------------------------------------------- singular diagonals

def singular_corners(polygon: RationalPolygon) -> list[int]:
    """Vertices whose angle m pi / n has m > 1, i.e. cone points of the unfolded surface."""
    return [i for i, a in enumerate(polygon.angles()) if a.numerator != 1]


@dataclass
class Diagonal:
    x: FieldElement
    segments: list  # (y_low, y_high) pieces inside the pattern
    kind: str = "saddle"  # saddle | vertex | axis

    @property
    def x_float(self) -> float:
        return float(self.x)


def _vertical_intervals(shapes: list[np.ndarray], x: float, tol: float = 1e-11):
    """Per-copy (index, y_low, y_high) where the vertical line x meets the copy."""
    out = []
    for idx, poly in enumerate(shapes):
        if x < poly[:, 0].min() - tol or x > poly[:, 0].max() + tol:
            continue
        ys = []
        n = len(poly)
        for k in range(n):
            (x0, y0), (x1, y1) = poly[k], poly[(k + 1) % n]
            if abs(x1 - x0) < 1e-14:
                if abs(x - x0) <= tol:
                    ys += [y0, y1]
                continue
            s = (x - x0) / (x1 - x0)
            if -1e-12 <= s <= 1 + 1e-12:
                ys.append(y0 + s * (y1 - y0))
        if ys and max(ys) - min(ys) > tol:
            out.append((idx, min(ys), max(ys)))
    return out


def singular_diagonals(epp: Epp, max_steps: int = 400, tol: float = 1e-9) -> list[Diagonal]:
    """Vertical saddle connections traced through the pattern's boundary gluings.

    Starting at each singular vertex instance, the vertical line is followed up and
    down inside the union of copies; on reaching a boundary side it re-enters at the
    glued side shifted by the period, whose exact x component is added to the
    abscissa.  The trace ends at the next singular vertex.
    """
    P = epp.polygon
    shapes = epp.copy_polygons()
    sing = singular_corners(P)
    sing_pts = []
    for i, c in enumerate(epp.copies):
        for v in sing:
            x, y = c.transform.apply(*P.vertices[v])
            sing_pts.append((x, y, float(x), float(y)))
    sing_arr = np.array([[p[2], p[3]] for p in sing_pts])
    nb = {}
    for i in range(len(epp.copies)):
        for s in range(P.n_sides):
            j, t = epp.neighbour(i, s)
            if not (t[0].is_zero() and t[1].is_zero()):
                nb[(i, s)] = t

    def is_singular(px, py):
        return bool(np.any(np.hypot(sing_arr[:, 0] - px, sing_arr[:, 1] - py) < tol))

    def exit_side(px, py, direction):
        """Boundary side through (px, py) of a copy lying on the incoming side of the point."""
        for (i, s), t in nb.items():
            poly = shapes[i]
            a, b = poly[s - 1], poly[s]
            ab = b - a
            L2 = float(ab @ ab)
            u = float((np.array([px, py]) - a) @ ab) / L2
            if not (-1e-9 <= u <= 1 + 1e-9):
                continue
            if np.hypot(*(a + u * ab - np.array([px, py]))) > tol:
                continue
            centroid = poly.mean(axis=0)
            if (centroid[1] - py) * direction < 0 or abs(ab[0]) > 1e-12:
                return i, s, t
        return None

    found: dict = {}
    for (x, y, fx, fy) in sing_pts:
        for direction in (1, -1):
            cx, px, py = x, fx, fy
            visited = set()
            for _ in range(max_steps):
                comps = _vertical_intervals(shapes, px)
                # connected stretch of the union through py heading in ``direction``
                ivs = sorted((lo, hi) for _, lo, hi in comps)
                lo_end = hi_end = None
                for lo, hi in ivs:
                    if lo - tol <= py <= hi + tol:
                        lo_end = lo if lo_end is None else min(lo_end, lo)
                        hi_end = hi if hi_end is None else max(hi_end, hi)
                if lo_end is None:
                    break
                changed = True
                while changed:
                    changed = False
                    for lo, hi in ivs:
                        if lo <= hi_end + tol and hi > hi_end + tol:
                            hi_end, changed = hi, True
                        if hi >= lo_end - tol and lo < lo_end - tol:
                            lo_end, changed = lo, True
                end = hi_end if direction > 0 else lo_end
                if (end - py) * direction <= tol:
                    break
                key = round(float(cx), 9)
                seg = (min(py, end), max(py, end))
                found.setdefault(key, [cx, []])[1].append(seg)
                if is_singular(px, end):
                    break
                state = (key, round(end, 7), direction)
                if state in visited:
                    break
                visited.add(state)
                hit = exit_side(px, end, direction)
                if hit is None:
                    break
                _, _, t = hit
                cx = cx + t[0]
                px, py = px + float(t[0]), end + float(t[1])
    out = []
    for key in sorted(found):
        xe, segs = found[key]
        out.append(Diagonal(xe, sorted(segs)))
    return out


def diagonal_abscissas(epp: Epp, axis_sides: Sequence[str] = ("a", "b")) -> list[Diagonal]:
    """Vertical lines on which the wave function is expected to nearly vanish.

    The union of traced vertical saddle connections, the vertical lines through
    every singular vertex of the pattern, and the vertical images of the sides on
    the symmetry axes (exact nodal lines of every copy's contribution).
    """
    P = epp.polygon
    items: dict = {}

    def add(x, kind, seg=None):
        k = x.coeffs
        if k not in items:
            items[k] = Diagonal(x, [], kind)
        if seg is not None:
            items[k].segments.append(seg)

    for d in singular_diagonals(epp):
        for seg in d.segments:
            add(d.x, "saddle", seg)
    for c in epp.copies:
        for v in singular_corners(P):
            x, _ = c.transform.apply(*P.vertices[v])
            add(x, "vertex")
        for lab in axis_sides:
            s = P.side_index(lab)
            (x0, y0) = c.transform.apply(*P.vertices[s - 1])
            (x1, y1) = c.transform.apply(*P.vertices[s])
            if x0 == x1:
                add(x0, "axis", (min(float(y0), float(y1)), max(float(y0), float(y1))))
    return sorted(items.values(), key=lambda d: float(d.x))
