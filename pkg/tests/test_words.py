"""Exact-arithmetic checks on the shared bracket-series engine.

The word coefficients are Fractions, so every identity here is tested with
no tolerance at all.  The plan evaluator is compared against the hand-written
degree-4 formula on concrete matrices.
"""

from fractions import Fraction

import numpy as np
import pytest

from lbcalc import words as engine
from lbcalc.errors import DomainError, ValidationError
from lbcalc.matrices import commutator
from lbcalc.sampling import generator


def test_degree_one_words_carry_coefficient_one():
    coeffs = engine.word_coefficients(4)
    assert coeffs[(0,)] == 1
    assert coeffs[(1,)] == 1


def test_degree_two_words_form_the_half_commutator():
    coeffs = engine.word_coefficients(2)
    assert coeffs[(0, 1)] == Fraction(1, 2)
    assert coeffs[(1, 0)] == Fraction(-1, 2)
    assert (0, 0) not in coeffs
    assert (1, 1) not in coeffs


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6, 7])
def test_equal_arguments_collapse_to_twice_the_letter(order):
    # log(exp(t) exp(t)) = 2t, so the coefficients of each degree above one
    # must cancel exactly over all words of that degree
    coeffs = engine.word_coefficients(order)
    for k in range(2, order + 1):
        assert sum(c for w, c in coeffs.items() if len(w) == k) == 0


@pytest.mark.parametrize("order", [3, 4, 5, 6])
def test_single_letter_words_vanish_above_degree_one(order):
    # log(exp(x)) = x: pure-x and pure-y words contribute nothing
    coeffs = engine.word_coefficients(order)
    for k in range(2, order + 1):
        assert coeffs.get((0,) * k, Fraction(0)) == 0
        assert coeffs.get((1,) * k, Fraction(0)) == 0


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6, 7, 8])
def test_mirror_symmetry(order):
    # reversing words is an antiautomorphism, so log(exp(y) exp(x)) read
    # backwards is the original series: c(w) = c(w reversed, letters swapped)
    coeffs = engine.word_coefficients(order)
    for w, c in coeffs.items():
        mirror = tuple(1 - u for u in reversed(w))
        assert coeffs.get(mirror, Fraction(0)) == c


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6, 7, 8])
def test_swap_antisymmetry(order):
    # inverting the group element flips the series: z(-y, -x) = -z(x, y),
    # hence c(w) = (-1)^(|w|+1) c(w with letters swapped)
    coeffs = engine.word_coefficients(order)
    for w, c in coeffs.items():
        swapped = tuple(1 - u for u in w)
        assert coeffs.get(swapped, Fraction(0)) == (-1) ** (len(w) + 1) * c


def test_plan_order_two_is_the_exact_textbook_sum():
    x = np.array([[0.0, 0.125], [0.0, 0.0]], dtype=complex)
    y = np.array([[0.0, 0.0], [0.125, 0.0]], dtype=complex)
    got = engine.apply_plan(2, x, y, commutator)
    want = x + y + 0.5 * commutator(x, y)
    assert np.array_equal(got, want)


def _dynkin4(x, y):
    c = commutator
    z = x + y + 0.5 * c(x, y)
    z = z + (c(x, c(x, y)) + c(y, c(y, x))) / 12.0
    return z - c(y, c(x, c(x, y))) / 24.0


def test_plan_matches_the_degree_four_formula():
    rng = generator(7)
    worst = 0.0
    for _ in range(50):
        x = 0.05 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        y = 0.05 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        got = engine.apply_plan(4, x, y, commutator)
        worst = max(worst, float(np.max(np.abs(got - _dynkin4(x, y)))))
    assert worst < 1e-15


def test_plan_respects_shared_prefixes():
    # every parent index must point at an earlier node, letters in {0, 1}
    for order in (1, 4, 8):
        plan = engine.evaluation_plan(order)
        for k, (parent, letter, weight) in enumerate(plan):
            assert parent is None or 0 <= parent < k
            assert letter in (0, 1)
            assert isinstance(weight, float)


def test_checked_order_accepts_the_documented_range():
    for order in range(1, engine.MAX_ORDER + 1):
        assert engine.checked_order(order) == order


def test_checked_order_rejects_bad_values():
    with pytest.raises(ValidationError):
        engine.checked_order(2.0)
    with pytest.raises(ValidationError):
        engine.checked_order(True)
    with pytest.raises(DomainError):
        engine.checked_order(0)
    with pytest.raises(DomainError):
        engine.checked_order(engine.MAX_ORDER + 1)
