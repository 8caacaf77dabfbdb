from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.physics.quantum.cg import CG

from cavityz2.levels import (
    branching_ratios,
    build_level_scheme,
    clebsch_gordan,
    clebsch_gordan_squared,
    half_integer,
)

PAIRS = [("1/2", "3/2"), ("1/2", "1/2"), (1, 2), (2, 3), (2, 2), (1, 1), ("3/2", "5/2")]


def _sym(x):
    return sympy.Rational(Fraction(x).numerator, Fraction(x).denominator)


def _sublevels(j):
    j = Fraction(j)
    return [-j + k for k in range(int(2 * j) + 1)]


@pytest.mark.parametrize("F,Fp", PAIRS)
def test_cg_matches_sympy(F, Fp):
    for m in _sublevels(F):
        for q in (-1, 0, 1):
            mp = m + q
            if abs(mp) > Fraction(Fp):
                continue
            ref = CG(_sym(F), _sym(m), 1, q, _sym(Fp), _sym(mp)).doit()
            assert clebsch_gordan(F, m, q, Fp, mp) == pytest.approx(float(ref), abs=1e-14)
            assert clebsch_gordan_squared(F, m, q, Fp, mp) == Fraction(str(sympy.nsimplify(ref ** 2)))


def test_two_level_couplings():
    s = build_level_scheme("1/2", "3/2")
    h = Fraction(1, 2)
    assert s.coupling_sq[(-h, h)] == Fraction(1, 3)
    assert s.coupling_sq[(h, 3 * h)] == 1
    assert branching_ratios("1/2", "3/2")[(h, h)] == Fraction(2, 3)


@pytest.mark.parametrize("F,Fp", PAIRS)
def test_branching_columns_sum_to_one(F, Fp):
    table = branching_ratios(F, Fp)
    for mp in _sublevels(Fp):
        assert sum(v for (m, p), v in table.items() if p == mp) == 1


@pytest.mark.parametrize("F,Fp", PAIRS)
def test_mirror_symmetry_of_couplings(F, Fp):
    s = build_level_scheme(F, Fp)
    for (m, mp), v in s.coupling_sq.items():
        assert s.coupling_sq[(-m, -mp)] == v


@given(st.sampled_from(PAIRS))
def test_decay_channels_conserve_probability(pair):
    import numpy as np
    s = build_level_scheme(*pair)
    # every excited level decays with total weight one
    total = sum(b * L.conj().T @ L for b, L in s.jump_operators())
    exc = np.diag(total)[s.n_ground:]
    assert np.allclose(exc, 1.0)


def test_dimensions():
    s = build_level_scheme(2, 3)
    assert (s.n_ground, s.n_excited, s.dim) == (5, 7, 12)
    assert list(s.ground_levels) == [Fraction(m) for m in range(-2, 3)]


@pytest.mark.parametrize("bad", [("1/3", "1/2"), (1, "5/2"), (-1, 0), ("x", 1)])
def test_invalid_momenta(bad):
    with pytest.raises(ValueError):
        build_level_scheme(*bad)


def test_half_integer_parsing():
    assert half_integer("3/2") == Fraction(3, 2)
    assert half_integer(1.5) == Fraction(3, 2)
    with pytest.raises(ValueError):
        half_integer(0.3)


def test_selection_rule():
    with pytest.raises(ValueError):
        clebsch_gordan(1, 0, 2, 2, 2)


def test_f2_branching_table_against_sympy():
    table = branching_ratios(2, 3)
    for mp in range(-3, 4):
        col = {}
        for m in range(-2, 3):
            q = mp - m
            if abs(q) <= 1:
                col[m] = CG(2, m, 1, q, 3, mp).doit() ** 2
        total = sum(col.values())
        for m, v in col.items():
            assert table[(Fraction(m), Fraction(mp))] == Fraction(str(sympy.nsimplify(v / total)))
    assert table[(Fraction(2), Fraction(3))] == 1
    assert table[(Fraction(2), Fraction(2))] == Fraction(1, 3)
    assert table[(Fraction(1), Fraction(2))] == Fraction(2, 3)
