from __future__ import annotations

import math

import mpmath
import pytest

from stadion.diophantine import (Sweeper, case_irrationals, descriptive_N, dirichlet_bound, dirichlet_search,
                                 exact_errors, lll_candidates, longdouble_scan, min_Z_for_accuracy, resolve_threads,
                                 step_function)

TRIPLE = case_irrationals([1, 2, 3])
SEPTUPLE = case_irrationals(range(1, 8))

TRIPLE_ROWS = [
    (8.67e-4, 186445124, (263673223, 344505668, 142698920)),
    (8.62e-4, 287348498, (406372143, 530950792, 219927019)),
    (7.94e-4, 937322935, (1325574807, 1731946950, 717395916)),
    (6.40e-4, 937322935, (1325574807, 1731946950, 717395916)),
    (3.60e-4, 1038226309, (1468273727, 1918392074, 794624015)),
]

SEPTUPLE_ROWS = [
    (4.951e-2, 6743502, (9536752, 12460367, 5161253, 13227855, 11214034, 2631184, 7492978)),
    (4.691e-2, 8019788, (11341693, 14818636, 6138080, 15731380, 13336420, 3129166, 8911111)),
    (4.685e-2, 8019788, (11341693, 14818636, 6138080, 15731380, 13336420, 3129166, 8911111)),
    (4.356e-2, 11214034, (15859039, 20720833, 8582850, 21997119, 18648257, 4375499, 12460367)),
    (3.316e-2, 31934867, (45162722, 59007940, 24441889, 62642495, 53105743, 12460367, 35484123)),
    (2.905e-2, 226662402, (320549043, 418817508, 173479892, 444614295, 376925799, 88439282, 251853767)),
    (2.825e-2, 287337890, (406357141, 530931191, 219918900, 563633546, 477825448, 112113683, 319272757)),
]


def _brute_min_Z(X, eps, z_end):
    with mpmath.workdps(40):
        vals = [x.to_mpf(40) for x in X]
        for Z in range(1, z_end + 1):
            if all(abs(Z * v - mpmath.nint(Z * v)) < eps for v in vals):
                return Z
    return None


@pytest.mark.parametrize("eps", [0.3, 0.1, 0.05, 0.03, 0.02])
def test_min_Z_matches_brute_force(eps):
    res = min_Z_for_accuracy(TRIPLE, eps, 30000)
    assert res.found
    assert res.Z == _brute_min_Z(TRIPLE, eps, 30000)
    assert res.max_error < eps


@pytest.mark.parametrize("eps", [0.3, 0.2, 0.15, 0.12])
def test_septuple_small_matches_brute_force(eps):
    res = min_Z_for_accuracy(SEPTUPLE, eps, 20000)
    assert res.found
    assert res.Z == _brute_min_Z(SEPTUPLE, eps, 20000)


def test_longdouble_oracle_agrees():
    eps = 2e-3
    res = min_Z_for_accuracy(TRIPLE, eps, 10 ** 7)
    assert longdouble_scan(TRIPLE, eps, 10 ** 7) == res.Z


def test_exact_errors_and_q():
    Z, q = TRIPLE_ROWS[0][1], TRIPLE_ROWS[0][2]
    qs, errs = exact_errors(TRIPLE, Z)
    assert tuple(qs) == q
    assert max(abs(e) for e in errs) < 8.67e-4


@pytest.mark.parametrize("eps,Z,q", TRIPLE_ROWS)
def test_triple_reference_q_values(eps, Z, q):
    qs, errs = exact_errors(TRIPLE, Z)
    assert tuple(qs) == q
    assert max(abs(e) for e in errs) < eps


@pytest.mark.parametrize("eps,Z,q", SEPTUPLE_ROWS)
def test_septuple_reference_q_values(eps, Z, q):
    qs, errs = exact_errors(SEPTUPLE, Z)
    assert tuple(qs) == q
    assert max(abs(e) for e in errs) < eps


def test_triple_step_function():
    grid = [row[0] for row in TRIPLE_ROWS]
    got = step_function(TRIPLE, grid, 2 * 10 ** 9)
    assert [z for _, z in got] == [row[1] for row in TRIPLE_ROWS]


def test_septuple_step_function():
    grid = [row[0] for row in SEPTUPLE_ROWS]
    got = step_function(SEPTUPLE, grid, 10 ** 9)
    assert [z for _, z in got] == [row[1] for row in SEPTUPLE_ROWS]


def test_dirichlet_guarantee():
    for N in (10, 1000, 10 ** 5):
        res = dirichlet_search(TRIPLE, N)
        assert res.found and res.Z <= N
        assert res.max_error < dirichlet_bound(N, 3)


def test_dirichlet_n_2e9_triple():
    res = dirichlet_search(TRIPLE, 2 * 10 ** 9)
    assert res.Z == 937322935


def test_step_function_monotone_and_validated():
    with pytest.raises(ValueError):
        step_function(TRIPLE, [0.01, 0.02], 100)
    got = step_function(TRIPLE, [0.2, 0.05, 0.01, 0.004], 10 ** 7)
    zs = [z for _, z in got]
    assert None not in zs
    assert zs == sorted(zs)


def test_cap_exhausted_returns_none():
    res = min_Z_for_accuracy(TRIPLE, 1e-9, 1000)
    assert not res.found


def test_bad_inputs():
    with pytest.raises(ValueError):
        min_Z_for_accuracy(TRIPLE, 0.0, 10)
    with pytest.raises(ValueError):
        dirichlet_search([], 10)


def test_loose_accuracy_gives_one():
    assert min_Z_for_accuracy(TRIPLE, 0.7, 10).Z == 1


def test_thread_count_does_not_change_result():
    a = Sweeper(TRIPLE, threads=1, block=1 << 12).first(1e-2, 1, 10 ** 6)
    b = Sweeper(TRIPLE, threads=4, block=1 << 12).first(1e-2, 1, 10 ** 6)
    assert a.Z == b.Z == 296970


def test_resolve_threads(monkeypatch):
    monkeypatch.setenv("STADION_THREADS", "1")
    assert resolve_threads() == 1
    assert resolve_threads(10 ** 6) >= 1


def test_lll_candidates_are_valid_and_not_better_than_minimal():
    cands = [c for c in lll_candidates(TRIPLE, scales=(10 ** 4, 10 ** 6, 10 ** 8)) if c.Z <= 10 ** 7]
    assert cands
    for c in cands:
        qs, errs = exact_errors(TRIPLE, c.Z)
        assert c.q == qs
        best = min_Z_for_accuracy(TRIPLE, c.max_error * (1 + 1e-12), c.Z)
        assert best.Z <= c.Z


def test_descriptive_N():
    assert descriptive_N(4.951e-2, 7) == pytest.approx(1371353804, rel=1e-6)
    assert descriptive_N(7.94e-4, 3) == pytest.approx(2.0e9, rel=2e-3)
    assert math.isclose(dirichlet_bound(2 * 10 ** 9, 7), 4.691e-2, rel_tol=1e-3)
