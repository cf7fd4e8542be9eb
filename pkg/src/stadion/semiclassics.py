"""Quantization, semiclassical wave functions and their residual certificates.

The wave function is the signed sum of the plane wave exp(i p.r) over the images
of a point in the copies of the elementary pattern, times -1/4.  Grouping each
block of four copies related by the two symmetry-axis sides gives

    Psi(x, y) = sum_b s_b exp(2 pi i Phi_b) sin(2 pi K_bx (x - c)) sin(2 pi K_by y)

with K_b = 2 Z M_b^T (m, n) and Phi_b = 2 Z ((m, n).t_b + kappa_bx c), where
x = c is the vertical symmetry side.  K and Phi are exact field elements; the
phases are reduced mod 1 at 50 digits and the sine arguments are reduced in
double-double arithmetic, so the construction zeros (x = c, y = 0) are exact and
finite differences remain meaningful at Z ~ 1e9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import mpmath
import numpy as np

from .presets import load_case
from .stadium_geometry import OrbitTangentSet, envelope_accuracy_bound
from .trigfield import A, B, C, ONE, FieldElement, from_trig
from .unfolding import (Diagonal, Epp, boundary_pairs, case_epp, decompose_period, diagonal_abscissas,
                        quarter_frame)


class DegenerateModeError(ValueError):
    pass


class DiagonalNotRepresentableError(ValueError):
    pass


@dataclass(frozen=True)
class ModeNumbers:
    m: int
    n: int

    def __post_init__(self):
        if abs(self.m) + abs(self.n) == 0:
            raise DegenerateModeError("|m| + |n| must be positive")

    @property
    def canonical(self) -> bool:
        return 0 <= self.m < self.n


def quantize_momentum(Z: int, mode: ModeNumbers) -> tuple[float, float]:
    """p with p.D_x = 8 pi m Z and p.D_y = 8 pi n Z for |D_x| = |D_y| = 2."""
    if not isinstance(mode, ModeNumbers):
        mode = ModeNumbers(*mode)
    return 4 * math.pi * mode.m * Z, 4 * math.pi * mode.n * Z


def energy_over_pi2(Z: int, mode: ModeNumbers) -> int:
    """E / pi^2 = 8 Z^2 (m^2 + n^2), exact."""
    if not isinstance(mode, ModeNumbers):
        mode = ModeNumbers(*mode)
    return 8 * Z * Z * (mode.m ** 2 + mode.n ** 2)


def energy(Z: int, mode: ModeNumbers) -> float:
    return math.pi ** 2 * energy_over_pi2(Z, mode)


def bswf_eval(p, point, sign: int = 1) -> complex:
    """Signed plane wave +-exp(i p.r)."""
    return sign * complex(math.cos(p[0] * point[0] + p[1] * point[1]), math.sin(p[0] * point[0] + p[1] * point[1]))


# ---------------------------------------------------------------- double-double helpers

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd(x: FieldElement) -> tuple[float, float]:
    with mpmath.workdps(50):
        v = x.to_mpf(50)
        hi = float(v)
        return hi, float(v - mpmath.mpf(hi))


def _frac_product(k_hi, k_lo, u_hi, u_lo):
    """(k * u) mod 1 in [-1/2, 1/2] for double-double k and u."""
    p, e = _two_prod(k_hi, u_hi)
    e = e + (k_hi * u_lo + k_lo * u_hi)
    f = p - np.rint(p)
    f = f + e
    return f - np.rint(f)


def _frac_mp(x: FieldElement, scale: int) -> float:
    with mpmath.workdps(60):
        v = x.to_mpf(60) * scale
        return float(v - mpmath.nint(v))


# ---------------------------------------------------------------- wave function model

@dataclass(frozen=True)
class WaveTerm:
    """s exp(2 pi i 2Z phase) sin(2 pi 2Z kappa_x u) sin(2 pi 2Z kappa_y y)."""

    sign: int
    kappa_x: FieldElement
    kappa_y: FieldElement
    phase: FieldElement


@dataclass
class SwfSpec:
    case: str
    Z: int
    mode: ModeNumbers
    L: object = 1
    eps: Optional[float] = None  # accuracy of the simultaneous approximation
    approximation: object = None
    units: Optional[tuple] = None  # nonnegative tangent units in pi/16; preset when None

    def __post_init__(self):
        if not isinstance(self.mode, ModeNumbers):
            self.mode = ModeNumbers(*self.mode)

    @property
    def n_irrationals(self) -> int:
        return 3 if self.case.upper() == "A" else 7


@lru_cache(maxsize=16)
def _pattern(units: tuple, L) -> Epp:
    return case_epp(units, L)


def case_pattern(case: str, L=1, units: Optional[Sequence[int]] = None) -> Epp:
    if units is None:
        units = load_case(case).tangent_units
    return _pattern(tuple(int(k) for k in units), Fraction(L))


def epp_terms(epp: Epp, mode: ModeNumbers, c: FieldElement) -> list[WaveTerm]:
    """One sine-product term per block of the pattern."""
    m, n = mode.m, mode.n
    terms = []
    for copy in epp.copies:
        if copy.index_in_block != 0:
            continue
        k, refl = copy.key
        cs, sn = from_trig("cos", k), from_trig("sin", k)
        if refl:
            kx, ky = cs * m + sn * n, sn * m - cs * n
        else:
            kx, ky = cs * m + sn * n, cs * n - sn * m
        t = copy.transform
        phase = t.tx * m + t.ty * n + kx * c
        terms.append(WaveTerm(copy.sign, kx, ky, phase))
    return terms


def printed_terms_A(mode: ModeNumbers, c: FieldElement) -> list[WaveTerm]:
    """The closed four-term form for case A with every prefactor a unit-modulus phase."""
    m, n = mode.m, mode.n
    h = A.scale(Fraction(1, 2))
    return [
        WaveTerm(1, ONE * m, ONE * n, c * m),
        WaveTerm(-1, ONE * n, ONE * m, c * n),
        WaveTerm(1, h * (m - n), h * (m + n), h * c * (m - n)),
        WaveTerm(-1, h * (m + n), h * (m - n), h * c * (m + n)),
    ]


def printed_momenta_BC(mode: ModeNumbers) -> list[tuple[FieldElement, FieldElement]]:
    """(kappa_x, kappa_y) of the eight sine products of the closed B/C form, up to sign."""
    m, n = mode.m, mode.n
    h = Fraction(1, 2)
    a = A.scale(h)
    return [
        (ONE * m, ONE * n), ((B * n - C * m).scale(h), (B * m + C * n).scale(h)),
        (ONE * n, ONE * m), ((B * m + C * n).scale(h), (B * n - C * m).scale(h)),
        (a * (m - n), a * (m + n)), ((B * n + C * m).scale(h), (B * m - C * n).scale(h)),
        (a * (m + n), a * (m - n)), ((B * m - C * n).scale(h), (B * n + C * m).scale(h)),
    ]


class SwfModel:
    """Evaluator for one wave function: values, gradient and Laplacian."""

    def __init__(self, Z: int, mode: ModeNumbers, terms: Sequence[WaveTerm], c: FieldElement,
                 epp: Optional[Epp] = None, case: str = "custom", eps: Optional[float] = None):
        if not isinstance(mode, ModeNumbers):
            mode = ModeNumbers(*mode)
        self.Z, self.mode, self.terms, self.c, self.epp, self.case, self.eps = int(Z), mode, list(terms), c, epp, case, eps
        self.degenerate = abs(mode.m) == abs(mode.n)
        Z2 = 2 * self.Z
        self.sign = np.array([t.sign for t in self.terms], dtype=float)
        self.kx_dd = np.array([_dd(t.kappa_x * Z2) for t in self.terms])
        self.ky_dd = np.array([_dd(t.kappa_y * Z2) for t in self.terms])
        fr = np.array([_frac_mp(t.phase, Z2) for t in self.terms])
        self.phase = np.exp(2j * np.pi * fr)
        self.phase_frac = fr
        self.kx = 2 * np.pi * self.kx_dd[:, 0]
        self.ky = 2 * np.pi * self.ky_dd[:, 0]
        self.c_dd = _dd(c)

    @property
    def energy(self) -> float:
        return energy(self.Z, self.mode)

    # coordinates ------------------------------------------------------

    def local(self, x, y):
        """Double-double u = x - c and y from plain floats."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u_hi, u_lo = _two_sum(x, -self.c_dd[0])
        u_lo = u_lo - self.c_dd[1]
        u_hi, u_lo = _two_sum(u_hi, u_lo)
        return (u_hi, u_lo), (y, np.zeros_like(y))

    def _angles(self, u, y):
        u_hi, u_lo = (np.atleast_1d(np.asarray(a, dtype=float)) for a in u)
        y_hi, y_lo = (np.atleast_1d(np.asarray(a, dtype=float)) for a in y)
        fx = _frac_product(self.kx_dd[:, 0, None], self.kx_dd[:, 1, None], u_hi[None, :], u_lo[None, :])
        fy = _frac_product(self.ky_dd[:, 0, None], self.ky_dd[:, 1, None], y_hi[None, :], y_lo[None, :])
        return 2 * np.pi * fx, 2 * np.pi * fy

    def _coef(self):
        return (self.sign * self.phase)[:, None]

    # evaluation --------------------------------------------------------

    def eval_local(self, u, y) -> np.ndarray:
        ax, ay = self._angles(u, y)
        return np.sum(self._coef() * np.sin(ax) * np.sin(ay), axis=0)

    def __call__(self, x, y) -> np.ndarray:
        return self.eval_local(*self.local(x, y))

    def gradient_local(self, u, y) -> tuple[np.ndarray, np.ndarray]:
        ax, ay = self._angles(u, y)
        co = self._coef()
        gx = np.sum(co * self.kx[:, None] * np.cos(ax) * np.sin(ay), axis=0)
        gy = np.sum(co * self.ky[:, None] * np.sin(ax) * np.cos(ay), axis=0)
        return gx, gy

    def gradient(self, x, y):
        return self.gradient_local(*self.local(x, y))

    def laplacian_local(self, u, y) -> np.ndarray:
        ax, ay = self._angles(u, y)
        k2 = (self.kx ** 2 + self.ky ** 2)[:, None]
        return np.sum(-k2 * self._coef() * np.sin(ax) * np.sin(ay), axis=0)

    def laplacian(self, x, y):
        return self.laplacian_local(*self.local(x, y))

    @property
    def dominant_part(self) -> str:
        """'real' or 'imag', whichever carries the larger sampled magnitude."""
        if not hasattr(self, "_dominant"):
            g = np.linspace(0.013, 0.987, 64)
            xx, yy = np.meshgrid(float(self.c) - 1.0 + g, g)
            v = self(xx.ravel(), yy.ravel())
            self._dominant = "real" if np.abs(v.real).max() >= np.abs(v.imag).max() else "imag"
        return self._dominant

    def part(self, z):
        return np.real(z) if self.dominant_part == "real" else np.imag(z)

    def phase_deviation_bound(self, eps: float) -> float:
        """Upper bound on sum_b |exp(2 pi i Phi_b) - 1| from the approximation accuracy."""
        total = 0.0
        for t in self.terms:
            w = t.phase * 2
            if any(q.denominator != 1 for q in w.coeffs):
                raise ValueError("phase is not an integer combination of the generators")
            total += 2 * math.pi * eps * float(sum(abs(q) for q in w.coeffs[1:]))
        return total


def build_swf(spec: SwfSpec) -> SwfModel:
    case = spec.case.upper()
    epp = case_pattern(case, spec.L, spec.units)
    c = quarter_frame(spec.L)["c"]
    model = SwfModel(spec.Z, spec.mode, epp_terms(epp, spec.mode, c), c, epp, case, spec.eps)
    model.units = None if spec.units is None else tuple(spec.units)
    return model


def swf_eval_A(spec: SwfSpec, x, y):
    if spec.case.upper() != "A":
        raise ValueError("swf_eval_A needs case A")
    return build_swf(spec)(x, y)


def swf_eval_BC(spec: SwfSpec, x, y):
    if spec.case.upper() not in ("B", "C"):
        raise ValueError("swf_eval_BC needs case B or C")
    return build_swf(spec)(x, y)


def printed_swf_A(spec: SwfSpec) -> SwfModel:
    c = quarter_frame(spec.L)["c"]
    return SwfModel(spec.Z, spec.mode, printed_terms_A(spec.mode, c), c, None, "A", spec.eps)


# ---------------------------------------------------------------- geometry helpers

def _side_points(model: SwfModel, i: int, samples: int, endpoints: bool = True):
    """Double-double local coordinates of samples along side i of the quarter polygon."""
    P = model.epp.polygon
    (x0, y0), (x1, y1) = P.vertices[i - 1], P.vertices[i]
    if endpoints:
        s = np.linspace(0.0, 1.0, samples)
    else:
        s = (np.arange(samples) + 0.5) / samples
    ax, bx = _dd(x0 - model.c), _dd(x1 - x0)
    ay, by = _dd(y0), _dd(y1 - y0)

    def line(a, b):
        p, e = _two_prod(s, b[0])
        e = e + s * b[1]
        h, l = _two_sum(a[0], p)
        l = l + e + a[1]
        return _two_sum(h, l)

    return line(ax, bx), line(ay, by)


def _side_normal(model: SwfModel, i: int) -> np.ndarray:
    u = model.epp.polygon.units[i]
    return np.array([math.cos(u * math.pi / 16), math.sin(u * math.pi / 16)])


# ---------------------------------------------------------------- residual certificates

@dataclass
class SideResidual:
    side: str
    max_abs: float
    J_x: int
    J_y: int
    bound: float  # 2 pi (|m| J_x + |n| J_y) eps
    tight_bound: float  # same with the -1/4 normalisation carried through
    pair_sum: float  # 1/4 sum over boundary pairs of |1 - exp(i p.t)|
    construction_zero: bool

    @property
    def ok(self) -> bool:
        return self.max_abs <= self.bound


def side_constants(epp: Epp) -> dict:
    """Per-side J_x, J_y and the boundary pairs on each side."""
    P = epp.polygon
    out = {lab: {"J_x": 0, "J_y": 0, "pairs": []} for lab in P.labels}
    for (i, s), (j, _), t in boundary_pairs(epp):
        ax, ay = decompose_period(t)
        Ix = sum(abs(q * 4) for q in ax.coeffs[1:])
        Iy = sum(abs(q * 4) for q in ay.coeffs[1:])
        if Ix.denominator != 1 or Iy.denominator != 1:
            raise ValueError("period coefficients outside (1/4)Z")
        d = out[P.labels[s]]
        d["J_x"] += int(Ix)
        d["J_y"] += int(Iy)
        d["pairs"].append((i, j, t, ax, ay))
    return out


def boundary_residual(model: SwfModel, eps: float, samples_per_side: int = 4096,
                      zero_sides: Sequence[str] = ("a", "b")) -> list[SideResidual]:
    """Sampled max |Psi| on every side with the period-mismatch bound."""
    P = model.epp.polygon
    consts = side_constants(model.epp)
    m, n = abs(model.mode.m), abs(model.mode.n)
    out = []
    for i, lab in enumerate(P.labels):
        u, y = _side_points(model, i, samples_per_side)
        vals = np.abs(model.eval_local(u, y))
        J = consts[lab]
        pair_sum = 0.0
        for (_, _, t, ax, ay) in J["pairs"]:
            w = (ax * model.mode.m + ay * model.mode.n) * (4 * model.Z)
            pair_sum += 2 * abs(math.sin(math.pi * _frac_mp(w, 1)))
        bound = 2 * math.pi * (m * J["J_x"] + n * J["J_y"]) * eps
        out.append(SideResidual(lab, float(vals.max()), J["J_x"], J["J_y"], bound, bound / 4, pair_sum / 4,
                                lab in zero_sides))
    return out


def admissible_modes(J_x: int, J_y: int, N_third: float, fraction: float = 0.01, nmax: int = 1000) -> list[ModeNumbers]:
    """Modes 0 <= m < n with m J_x + n J_y <= fraction * N^(1/3)."""
    lim = fraction * N_third
    out = []
    for nn in range(1, nmax + 1):
        if nn * J_y > lim:
            break
        for mm in range(0, nn):
            if mm * J_x + nn * J_y <= lim:
                out.append(ModeNumbers(mm, nn))
    return out


def wavelength_mismatch(model: SwfModel, period_vector: tuple, Z: int, q: Sequence[int], eps: float) -> dict:
    """|D - |I_mn| lambda| for one period and its bound (|m| I_x + |n| I_y) eps lambda."""
    ax, ay = decompose_period(period_vector)
    m, n = model.mode.m, model.mode.n
    wx = [q_ * 4 for q_ in ax.coeffs]
    wy = [q_ * 4 for q_ in ay.coeffs]
    qs = [Z] + list(q) + [0] * (8 - 1 - len(q))
    I_mn = int(sum((m * a + n * b) * qq for a, b, qq in zip(wx, wy, qs)))
    Ix = float(sum(abs(a) for a in wx[1:]))
    Iy = float(sum(abs(b) for b in wy[1:]))
    D = math.hypot(float(period_vector[0]), float(period_vector[1]))
    with mpmath.workdps(60):
        pt = (ax * m + ay * n) * (4 * Z)  # p.t / (2 pi) as a field element
        v = pt.to_mpf(60)
        dev = float(v - I_mn)
        ptf = float(v)
    if I_mn == 0:
        return {"D": D, "I_mn": 0, "mismatch": D, "bound": math.inf, "degenerate": True}
    lam = D / abs(ptf)  # lambda = 2 pi / |p . D_hat|
    mismatch = abs(D - abs(I_mn) * lam)
    bound = (abs(m) * Ix + abs(n) * Iy) * eps * lam
    return {"D": D, "I_mn": I_mn, "lambda": lam, "mismatch": mismatch, "bound": bound,
            "deviation": dev, "degenerate": False}


# ---------------------------------------------------------------- singular diagonals

@dataclass
class DiagonalResidual:
    x: FieldElement
    kind: str
    max_abs: float
    bound: float  # term-by-term certificate
    printed_bound: float  # 4 pi ((m+n) sum|x_l| + n sum|x'_l| + 2m + 4n) eps
    corrected_bound: float  # same with the constant 2m + 5n

    @property
    def ok(self) -> bool:
        return self.max_abs <= self.bound


def diagonal_certificate(model: SwfModel, x: FieldElement, eps: float) -> float:
    """sum_b 2 pi eps sum_{l>=1} |w_bl| with 2 Z w_b = K_bx (x - c); needs integer w_b."""
    u = x - model.c
    total = 0.0
    for t in model.terms:
        w = t.kappa_x * u * 2
        if not w.in_span(range(4)) or any(q.denominator != 1 for q in w.coeffs):
            raise DiagonalNotRepresentableError(f"abscissa {x} gives non-integral phase {w}")
        total += 2 * math.pi * eps * float(sum(abs(q) for q in w.coeffs[1:]))
    return total


def diagonal_residual(model: SwfModel, diagonals: Optional[Sequence[Diagonal]] = None, eps: float = None,
                      samples: int = 2048, y_range: tuple = (0.0, 1.0)) -> list[DiagonalResidual]:
    if model.case != "A":
        raise DiagonalNotRepresentableError("diagonal certificates are built for case A only")
    eps = model.eps if eps is None else eps
    diagonals = diagonal_abscissas(model.epp) if diagonals is None else diagonals
    m, n = abs(model.mode.m), abs(model.mode.n)
    out = []
    for d in diagonals:
        if not d.x.in_span(range(4)) or any(q.denominator != 1 for q in d.x.coeffs):
            raise DiagonalNotRepresentableError(f"abscissa {d.x} is not an integer combination of 1, A, B, C")
        cert = diagonal_certificate(model, d.x, eps)
        xs = [abs(q) for q in d.x.coeffs[1:4]]
        xp = [abs(q) for q in (d.x * A).coeffs[1:4]]
        core = (m + n) * float(sum(xs)) + n * float(sum(xp))
        printed = 4 * math.pi * (core + 2 * m + 4 * n) * eps
        corrected = 4 * math.pi * (core + 2 * m + 5 * n) * eps
        ys = [np.linspace(*y_range, samples)]
        for lo, hi in d.segments:
            ys.append(np.linspace(lo, hi, max(16, samples // 8)))
        yv = np.concatenate(ys)
        u = _dd(d.x - model.c)
        uh = np.full_like(yv, u[0])
        ul = np.full_like(yv, u[1])
        vals = np.abs(model.eval_local((uh, ul), (yv, np.zeros_like(yv))))
        out.append(DiagonalResidual(d.x, d.kind, float(vals.max()), cert, printed, corrected))
    return out


# ---------------------------------------------------------------- periodic skeleton

@dataclass
class PocEntry:
    m: int
    n: int
    E0_over_pi2: int
    p2_half_over_pi2: int
    E_over_pi2: int
    aperiodic_over_pi2: int

    @property
    def equal(self) -> bool:
        return self.E_over_pi2 == self.aperiodic_over_pi2


def poc_E0_over_pi2(Z: int, n: int) -> int:
    """E0 / pi^2 from sqrt(2 E0) D_x = 8 pi Z n with D_x = 2."""
    if n == 0:
        raise DegenerateModeError("the transverse quantum number must be nonzero")
    root = Fraction(8 * Z * n, 2)  # sqrt(2 E0) / pi
    val = root * root / 2
    if val.denominator != 1:
        raise ArithmeticError("non-integral E0")
    return int(val)


def poc_spectrum(Z: int, mmax: int) -> list[PocEntry]:
    """Skeleton levels p^2/2 + E0 against the aperiodic formula for |m|, |n| <= mmax, n != 0.

    Here m counts the momentum along D_y and n the transverse quantum number.
    """
    out = []
    for m in range(-mmax, mmax + 1):
        for n in range(-mmax, mmax + 1):
            if n == 0:
                continue
            p_over_pi = Fraction(8 * Z * m, 2)  # p D_y = 8 pi m Z
            half_p2 = p_over_pi * p_over_pi / 2
            e0 = poc_E0_over_pi2(Z, n)
            total = half_p2 + e0
            out.append(PocEntry(m, n, e0, int(half_p2), int(total), energy_over_pi2(Z, ModeNumbers(m, n))))
    return out


def poc_profile(x, E0: float, a: float = 1.0, b: float = 0.0):
    """Transverse standing wave a sin(sqrt(2 E0) x) + b cos(sqrt(2 E0) x)."""
    k = math.sqrt(2 * E0)
    return a * np.sin(k * np.asarray(x)) + b * np.cos(k * np.asarray(x))


# ---------------------------------------------------------------- nodal distance and accuracy

@dataclass
class NodalEstimate:
    l_mn: Optional[float]
    validity_M: float
    floor: float
    valid: bool
    scaled: Optional[float]  # |(m + n) Z l_mn|
    C1_bound: float  # (1/2) sqrt(pi (m J_x + n J_y)) N^(-1/6)
    reason: str = ""


def nodal_distance(model: SwfModel, side: str, s: float, eps: float, J: tuple) -> NodalEstimate:
    """Linear estimate of the distance from a boundary point to the nearest nodal line.

    Uses the dominant (real or imaginary) part of Psi; the other part is small by the
    near-reality of the phases, or vanishes identically.
    """
    P = model.epp.polygon
    i = P.side_index(side)
    u, y = _side_points(model, i, 1)
    if s != 0.0:
        (x0, y0), (x1, y1) = P.vertices[i - 1], P.vertices[i]
        ax, bx = _dd(x0 - model.c), _dd(x1 - x0)
        ay, by = _dd(y0), _dd(y1 - y0)
        u = _two_sum(np.array([ax[0]]), np.array([s * bx[0] + ax[1] + s * bx[1]]))
        y = _two_sum(np.array([ay[0]]), np.array([s * by[0] + ay[1] + s * by[1]]))
    psi = float(model.part(model.eval_local(u, y))[0])
    gx, gy = model.gradient_local(u, y)
    nrm = _side_normal(model, i)
    dn = float(model.part(gx[0]) * nrm[0] + model.part(gy[0]) * nrm[1])
    m, n = abs(model.mode.m), abs(model.mode.n)
    scale = (m + n) * model.Z
    M = abs(dn) / scale
    mJ = m * J[0] + n * J[1]
    floor = 4 * math.sqrt(math.pi * mJ) * math.sqrt(eps)  # N^(-1/6) = eps^(1/2) when N = eps^-3
    c1 = 0.5 * math.sqrt(math.pi * mJ) * math.sqrt(eps)
    if psi == 0.0:
        return NodalEstimate(0.0, M, floor, True, 0.0, c1, "on a nodal line")
    if M <= floor:
        return NodalEstimate(None, M, floor, False, None, c1, "normal derivative below the validity floor")
    l = -psi / dn
    return NodalEstimate(l, M, floor, True, abs(scale * l), c1)


@dataclass
class AccuracyReport:
    epsilon_pol: float
    epsilon_mn: float
    composite: float
    admissibility_ratio: float
    regime: str
    valid_points: int = 0
    sampled_points: int = 0
    eta: str = "bounded by eta_max; existence only, no numeric value is asserted"

    def to_json(self) -> dict:
        return dict(self.__dict__)


def spectrum_accuracy_report(model: SwfModel, eps: float, samples_per_side: int = 256) -> AccuracyReport:
    """Composite displacement bound epsilon_pol + epsilon_mn and the admissibility ratio."""
    units = getattr(model, "units", None)
    if units is not None:
        bound = envelope_accuracy_bound(tangents=OrbitTangentSet.symmetric_units(units)).epsilon_pol
    else:
        bound = envelope_accuracy_bound(model.case).epsilon_pol
    consts = side_constants(model.epp)
    worst = 0.0
    mJ_max = 0.0
    valid = total = 0
    m, n = abs(model.mode.m), abs(model.mode.n)
    for lab, J in consts.items():
        mJ_max = max(mJ_max, m * J["J_x"] + n * J["J_y"])
        for s in (np.arange(samples_per_side) + 0.5) / samples_per_side:
            est = nodal_distance(model, lab, float(s), eps, (J["J_x"], J["J_y"]))
            total += 1
            if est.valid and est.l_mn is not None:
                valid += 1
                worst = max(worst, abs(est.l_mn))
    ratio = mJ_max * eps  # (m J_x + n J_y) / N^(1/3)
    if valid == 0:
        regime = "no boundary point passes the validity floor"
    elif worst == 0.0:
        regime = "polygon envelope dominates"
    else:
        r = bound / worst
        regime = ("comparable" if 0.1 <= r <= 10 else
                  "polygon envelope dominates" if r > 10 else "nodal displacement dominates")
    return AccuracyReport(bound, worst, bound + worst, ratio, regime, valid, total)


def inside_quarter(epp: Epp, x, y, tol: float = 1e-12) -> np.ndarray:
    P = epp.polygon
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.ones(np.broadcast(x, y).shape, dtype=bool)
    for u, h in zip(P.units, P.offsets):
        th = u * math.pi / 16
        ok &= math.cos(th) * x + math.sin(th) * y <= float(h) + tol
    return ok
