from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stadion.semiclassics import (DegenerateModeError, DiagonalNotRepresentableError, ModeNumbers, SwfSpec,
                                  _two_sum, admissible_modes, boundary_residual, bswf_eval, build_swf,
                                  diagonal_residual, energy, energy_over_pi2, epp_terms, inside_quarter,
                                  nodal_distance, poc_E0_over_pi2, poc_profile, poc_spectrum, printed_momenta_BC,
                                  printed_swf_A, quantize_momentum, side_constants, spectrum_accuracy_report,
                                  wavelength_mismatch)
from stadion.trigfield import A
from stadion.unfolding import D_X, D_Y, enumerate_periods

Z_A, EPS_A, Q_A = 186445124, 8.67e-4, (263673223, 344505668, 142698920)
Z_B, EPS_B = 6743502, 4.951e-2


def _model(case="A", m=1, n=2, Z=None, eps=None):
    Z = Z if Z is not None else (Z_A if case == "A" else Z_B)
    eps = eps if eps is not None else (EPS_A if case == "A" else EPS_B)
    return build_swf(SwfSpec(case, Z, ModeNumbers(m, n), eps=eps))


def _interior(model, k=1000, seed=0):
    rng = np.random.default_rng(seed)
    V = model.epp.polygon.float_vertices()
    pts = []
    while len(pts) < k:
        x = rng.uniform(V[:, 0].min(), V[:, 0].max(), 4 * k)
        y = rng.uniform(0.0, 1.0, 4 * k)
        ok = inside_quarter(model.epp, x, y, tol=-1e-3) & (y > 1e-3)
        pts.extend(zip(x[ok], y[ok]))
    pts = np.array(pts[:k])
    return pts[:, 0], pts[:, 1]


# ---------------------------------------------------------------- quantization


def test_quantize_momentum():
    assert quantize_momentum(1, ModeNumbers(1, 0)) == (4 * math.pi, 0.0)
    px, py = quantize_momentum(Z_A, ModeNumbers(1, 2))
    assert px == 4 * math.pi * Z_A and py == 8 * math.pi * Z_A
    assert px * 2 == pytest.approx(8 * math.pi * Z_A)


def test_zero_mode_rejected():
    with pytest.raises(DegenerateModeError):
        ModeNumbers(0, 0)
    with pytest.raises(DegenerateModeError):
        quantize_momentum(1, (0, 0))


def test_energy():
    assert energy(1, ModeNumbers(1, 1)) == pytest.approx(16 * math.pi ** 2)
    assert energy_over_pi2(3, (2, 5)) == energy_over_pi2(3, (5, 2)) == energy_over_pi2(3, (-2, 5))


def test_bswf():
    assert abs(bswf_eval((3.0, 4.0), (0.2, -0.7))) == pytest.approx(1.0)
    assert bswf_eval((0.0, 0.0), (1.0, 2.0), sign=-1) == -1
    p = (2.0, 0.5)
    a = bswf_eval(p, (0.1, 0.3))
    b = bswf_eval(p, (0.1 + 2 * math.pi / p[0], 0.3))
    assert abs(a - b) < 1e-12


# ---------------------------------------------------------------- wave function form


@pytest.mark.parametrize("mode", [(1, 2), (2, 3), (0, 1), (3, 7), (-2, 5)])
def test_pattern_model_equals_printed_case_a(mode):
    m = _model("A", *mode)
    p = printed_swf_A(SwfSpec("A", Z_A, ModeNumbers(*mode)))
    x, y = _interior(m, 300)
    assert np.max(np.abs(m(x, y) - p(x, y))) <= 1e-12


@pytest.mark.parametrize("case", ["B", "C"])
@pytest.mark.parametrize("mode", [(0, 1), (1, 2), (2, 5)])
def test_bc_momenta_match_printed_form(case, mode):
    m = _model(case, *mode)
    assert len(m.terms) == 8
    mine = {frozenset((t.kappa_x * sx, t.kappa_y * sy) for sx in (1, -1) for sy in (1, -1)) for t in m.terms}
    printed = {frozenset((kx * sx, ky * sy) for sx in (1, -1) for sy in (1, -1))
               for kx, ky in printed_momenta_BC(ModeNumbers(*mode))}
    assert mine == printed


@pytest.mark.parametrize("case", ["A", "B", "C"])
def test_construction_zeros(case):
    m = _model(case)
    x = np.linspace(float(m.c) - 3, float(m.c), 400)
    assert np.max(np.abs(m(x, np.zeros_like(x)))) < 1e-12
    u = (np.zeros(400), np.zeros(400))
    y = np.linspace(0, 1, 400)
    assert np.max(np.abs(m.eval_local(u, (y, np.zeros(400))))) < 1e-12
    # the nearest double to c is off by delta, so |Psi| <= sum |k_x| delta there
    (uh, ul), _ = m.local(np.array([float(m.c)]), np.array([0.0]))
    delta = abs(uh[0] + ul[0])
    assert np.max(np.abs(m(np.full(400, float(m.c)), y))) <= np.abs(m.kx).sum() * delta * (1 + 1e-9)


@pytest.mark.parametrize("case", ["A", "B", "C"])
def test_antisymmetry(case):
    m = _model(case)
    x, y = _interior(m, 500)
    (uh, ul), (yh, yl) = m.local(x, y)
    psi = m.eval_local((uh, ul), (yh, yl))
    assert np.max(np.abs(m.eval_local((uh, ul), (-yh, -yl)) + psi)) <= 1e-10
    assert np.max(np.abs(m.eval_local((-uh, -ul), (yh, yl)) + psi)) <= 1e-10


@pytest.mark.parametrize("mode", [(1, 1), (3, 3)])
def test_degenerate_mode_vanishes(mode):
    m = _model("A", *mode)
    assert m.degenerate
    g = np.linspace(0.0, 1.0, 100)
    xx, yy = np.meshgrid(float(m.c) - 2 + 2 * g, g)
    assert np.max(np.abs(m(xx.ravel(), yy.ravel()))) < 1e-12


def test_antidiagonal_mode_vanishes_up_to_phases():
    m = _model("A", 2, -2)
    assert m.degenerate
    g = np.linspace(0.0, 1.0, 100)
    xx, yy = np.meshgrid(float(m.c) - 2 + 2 * g, g)
    assert np.max(np.abs(m(xx.ravel(), yy.ravel()))) <= m.phase_deviation_bound(EPS_A)


@pytest.mark.parametrize("case,mode", [("A", (1, 2)), ("A", (2, 5)), ("B", (1, 2)), ("C", (1, 3))])
def test_helmholtz(case, mode):
    m = _model(case, *mode)
    x, y = _interior(m, 1000)
    psi = m(x, y)
    res = np.abs(-0.5 * m.laplacian(x, y) - m.energy * psi)
    assert res.max() / (m.energy * np.abs(psi).max()) <= 1e-6


def _fd_gradient(m, x, y, h):
    (uh, ul), (yh, yl) = m.local(x, y)
    fx = (m.eval_local(_two_sum(uh, ul + h), (yh, yl)) - m.eval_local(_two_sum(uh, ul - h), (yh, yl))) / (2 * h)
    fy = (m.eval_local((uh, ul), _two_sum(yh, yl + h)) - m.eval_local((uh, ul), _two_sum(yh, yl - h))) / (2 * h)
    return fx, fy


@pytest.mark.parametrize("case,mode", [("A", (1, 2)), ("B", (1, 2)), ("C", (2, 3))])
def test_gradient_matches_finite_differences_large_Z(case, mode):
    m = _model(case, *mode)
    x, y = _interior(m, 1000, seed=4)
    gx, gy = m.gradient(x, y)
    pn = math.hypot(*quantize_momentum(m.Z, m.mode))
    fx, fy = _fd_gradient(m, x, y, 1e-3 / pn)
    scale = pn * np.abs(m(x, y)).max()
    assert max(np.abs(fx - gx).max(), np.abs(fy - gy).max()) / scale <= 1e-6


def test_gradient_matches_finite_differences_unit_Z():
    m = _model("A", 1, 2, Z=1)
    x, y = _interior(m, 1000, seed=5)
    gx, gy = m.gradient(x, y)
    fx, fy = _fd_gradient(m, x, y, 1e-6)
    scale = max(np.abs(gx).max(), np.abs(gy).max())
    assert max(np.abs(fx - gx).max(), np.abs(fy - gy).max()) / scale <= 1e-6


@pytest.mark.parametrize("case,mode", [("A", (1, 2)), ("A", (2, 7)), ("B", (1, 2)), ("C", (1, 2))])
def test_near_reality(case, mode):
    m = _model(case, *mode)
    eps = m.eps
    budget = m.phase_deviation_bound(eps)
    assert np.max(np.abs(m.phase - 1)) <= budget
    x, y = _interior(m, 2000)
    psi = m(x, y)
    assert np.abs(psi.imag).max() <= budget
    assert np.abs(psi.imag).max() / np.abs(psi.real).max() <= budget


@pytest.mark.parametrize("mode", [(1, 2), (2, 5)])
def test_quasi_degeneracy(mode):
    m = _model("A", *mode)
    r = _model("A", -mode[0], -mode[1])
    budget = m.phase_deviation_bound(EPS_A) + r.phase_deviation_bound(EPS_A)
    x, y = _interior(m, 1000)
    assert np.max(np.abs(m(x, y) - r(x, y))) <= budget


# ---------------------------------------------------------------- residual certificates


@pytest.mark.parametrize("case,mode", [("A", (0, 1)), ("A", (1, 2)), ("A", (2, 3)), ("B", (1, 2)), ("C", (0, 1))])
def test_boundary_residual_below_bounds(case, mode):
    m = _model(case, *mode)
    for r in boundary_residual(m, m.eps, 2048):
        assert r.max_abs <= r.pair_sum + 1e-12
        assert r.pair_sum <= r.tight_bound + 1e-12
        assert r.max_abs <= r.bound
        if r.construction_zero:
            assert r.max_abs < 1e-12


def test_boundary_bound_linear_in_mode():
    a = {r.side: r.bound for r in boundary_residual(_model("A", 1, 2), EPS_A, 16)}
    b = {r.side: r.bound for r in boundary_residual(_model("A", 2, 4), EPS_A, 16)}
    for s in a:
        assert b[s] == pytest.approx(2 * a[s])


def test_side_constants_are_sums_over_pairs():
    m = _model("A")
    consts = side_constants(m.epp)
    assert consts["a"]["J_x"] == consts["a"]["J_y"] == 0
    assert consts["f"]["J_x"] == 8 and consts["f"]["J_y"] == 8
    for lab, d in consts.items():
        jx = sum(int(sum(abs(c * 4) for c in ax.coeffs[1:])) for *_, ax, _ in d["pairs"])
        assert jx == d["J_x"]


def test_admissible_modes():
    modes = admissible_modes(8, 8, 1 / EPS_A)
    assert modes == [ModeNumbers(0, 1)]
    assert admissible_modes(40, 44, 1 / EPS_A) == []


def test_wavelength_mismatch():
    m = _model("A", 1, 2)
    base = wavelength_mismatch(m, D_X, Z_A, Q_A, EPS_A)
    assert base["mismatch"] == 0.0
    for p in enumerate_periods(m.epp):
        w = wavelength_mismatch(m, p.vector, Z_A, Q_A, EPS_A)
        if w["degenerate"]:
            assert w["mismatch"] == w["D"]
        else:
            assert w["mismatch"] <= w["bound"] + 1e-15


def test_wavelength_mismatch_degenerate():
    m = _model("A", 1, 0)
    w = wavelength_mismatch(m, D_Y, Z_A, Q_A, EPS_A)
    assert w["degenerate"] and w["mismatch"] == pytest.approx(2.0)


@pytest.mark.parametrize("mode", [(0, 1), (1, 2), (1, 3), (2, 3)])
def test_diagonal_residual(mode):
    m = _model("A", *mode)
    rows = diagonal_residual(m, eps=EPS_A, samples=512)
    assert len(rows) == 26
    for d in rows:
        assert d.max_abs <= d.bound
        assert d.max_abs <= d.printed_bound
        assert d.corrected_bound > d.printed_bound
    zero = [d for d in rows if d.x.is_zero()][0]
    assert zero.max_abs <= zero.printed_bound
    axis = [d for d in rows if d.x == m.c][0]
    assert axis.max_abs < 1e-12


def test_diagonal_requires_case_a():
    with pytest.raises(DiagonalNotRepresentableError):
        diagonal_residual(_model("B"), eps=EPS_B)


def test_diagonal_printed_bound_linear():
    a = diagonal_residual(_model("A", 1, 2), eps=EPS_A, samples=8)
    b = diagonal_residual(_model("A", 2, 4), eps=EPS_A, samples=8)
    for d, e in zip(a, b):
        assert e.printed_bound == pytest.approx(2 * d.printed_bound)


def test_diagonal_expansion_times_sqrt2():
    for d in diagonal_residual(_model("A"), eps=EPS_A, samples=4):
        xp = d.x * A
        assert float(xp) == pytest.approx(math.sqrt(2) * float(d.x), abs=1e-12)


# ---------------------------------------------------------------- periodic skeleton


def test_poc_spectrum_identity():
    rows = poc_spectrum(Z_A, 10)
    assert len(rows) == 21 * 20
    assert all(r.equal for r in rows)


def test_poc_E0_quantization():
    for n in (1, -2, 5):
        e0 = poc_E0_over_pi2(Z_A, n)
        assert math.sqrt(2 * e0) * 2 == pytest.approx(8 * Z_A * abs(n))
    with pytest.raises(DegenerateModeError):
        poc_E0_over_pi2(Z_A, 0)


def test_poc_profile_vanishes_at_walls():
    e0 = math.pi ** 2 * poc_E0_over_pi2(1, 1)
    x = np.array([0.0, 2.0])
    assert np.max(np.abs(poc_profile(x, e0))) < 1e-12


# ---------------------------------------------------------------- nodal estimates


def test_nodal_distance_on_side_a_is_zero():
    m = _model("A")
    est = nodal_distance(m, "a", 0.5, EPS_A, (0, 0))
    assert est.l_mn == 0.0


def test_nodal_distance_small_on_cap():
    m = _model("A", 1, 2)
    consts = side_constants(m.epp)
    seen = 0
    for lab in ("f", "t6", "t4", "t2", "v"):
        J = (consts[lab]["J_x"], consts[lab]["J_y"])
        for s in np.linspace(0.05, 0.95, 9):
            est = nodal_distance(m, lab, float(s), EPS_A, J)
            if est.valid:
                seen += 1
                assert est.scaled < 1
            else:
                assert est.reason
    assert seen > 0


def test_accuracy_report():
    m = _model("A", 1, 2)
    rep = spectrum_accuracy_report(m, EPS_A, 16)
    assert rep.composite == pytest.approx(rep.epsilon_pol + rep.epsilon_mn)
    assert rep.epsilon_pol == pytest.approx(0.0196, abs=5e-5)
    assert 0 < rep.admissibility_ratio < 1
    assert rep.valid_points > 0
    assert "no numeric value" in rep.eta


def test_terms_count_matches_blocks():
    m = _model("A")
    assert len(epp_terms(m.epp, m.mode, m.c)) == len(m.epp.copies) // 4


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=-6, max_value=6), st.integers(min_value=1, max_value=6),
       st.integers(min_value=1, max_value=10 ** 9))
def test_helmholtz_property(m, n, Z):
    model = _model("A", m, n, Z=Z)
    if model.degenerate:
        return
    x, y = _interior(model, 50, seed=Z % 97)
    psi = model(x, y)
    top = np.abs(psi).max()
    if top == 0:
        return
    res = np.abs(-0.5 * model.laplacian(x, y) - model.energy * psi).max()
    assert res / (model.energy * top) <= 1e-6
