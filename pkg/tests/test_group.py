import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantor_energy.errors import UsageError
from cantor_energy.group import (
    CylinderId,
    GroupElement,
    Resolution,
    add,
    coset_members,
    coset_words,
    cylinder_diameter,
    haar_measure,
    metric,
    metric_numerators,
    shell_level,
    trailing_zero_table,
    walsh,
    walsh_matrix,
)

N = 20
elements = st.integers(0, (1 << N) - 1).map(lambda b: GroupElement(b, N))


def test_resolution_bounds():
    assert Resolution(24).size == 1 << 24
    for bad in (0, 31, -1, 2.5, True):
        with pytest.raises(UsageError):
            Resolution(bad)


def test_add_examples():
    y = GroupElement(0b1011, 4)
    assert add(GroupElement.zero(4), y) == y
    assert add(y, y) == GroupElement.zero(4)
    assert add(GroupElement(0b011, 3), GroupElement(0b101, 3)).bits == 0b110


def test_add_resolution_mismatch():
    with pytest.raises(UsageError):
        add(GroupElement(1, 3), GroupElement(1, 4))


@given(elements, elements, elements)
def test_group_laws(x, y, z):
    zero = GroupElement.zero(N)
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert x + zero == x
    assert x + x == zero


def test_from_coordinates_uses_lsb_for_x1():
    x = GroupElement.from_coordinates([1, 0, 0], 3)
    assert x.bits == 1
    assert x.coordinate(1) == 1 and x.coordinates() == (1, 0, 0)


def test_metric_examples():
    x = GroupElement.from_coordinates([1, 0, 0, 0], 4)
    assert metric(x, x) == 0
    assert metric(x, GroupElement.zero(4)) == Fraction(1, 2)
    a = GroupElement.from_coordinates([0, 1, 1])
    b = GroupElement.from_coordinates([0, 0, 1])
    assert metric(a, b) == Fraction(1, 4)


def test_metric_matches_definition_on_small_group():
    n = 5
    for a, b in itertools.product(range(1 << n), repeat=2):
        x, y = GroupElement(a, n), GroupElement(b, n)
        expected = sum(Fraction(1, 2 ** i) * abs(x.coordinate(i) - y.coordinate(i)) for i in range(1, n + 1))
        assert metric(x, y) == expected
        assert Fraction(int(metric_numerators(np.array([a ^ b]), n)[0]), 1 << n) == expected


def test_shell_level():
    assert shell_level(GroupElement.zero(6)) is None
    assert shell_level(GroupElement.from_coordinates([1, 0, 1, 1], 6)) == 1
    assert shell_level(GroupElement.from_coordinates([0, 0, 1, 0, 1], 6)) == 3


def test_trailing_zero_table_agrees_with_shell_level():
    n = 9
    table = trailing_zero_table(n)
    assert table[0] == n
    for z in range(1, 1 << n):
        assert table[z] == shell_level(GroupElement(z, n)) - 1


def test_walsh_examples():
    for bits in range(16):
        x = GroupElement(bits, 4)
        assert walsh(0, x) == 1
        assert walsh(1, x) == (-1) ** x.coordinate(1)
    # K_2^2: x_1 = 0, x_2 = 1
    for x in coset_members(CylinderId.first_shell(2), 6):
        assert walsh(2, x) == -1 and walsh(3, x) == -1


def test_walsh_index_out_of_range():
    with pytest.raises(UsageError):
        walsh(16, GroupElement(0, 4))
    with pytest.raises(UsageError):
        walsh(-1, GroupElement(0, 4))


@given(st.integers(0, (1 << N) - 1), elements, elements)
def test_walsh_is_a_character(k, x, y):
    assert walsh(k, x + y) == walsh(k, x) * walsh(k, y)


def test_orthogonality():
    n = 8
    w = walsh_matrix(n).astype(np.int64)
    assert np.array_equal(w @ w.T, (1 << n) * np.eye(1 << n, dtype=np.int64))


def test_walsh_matrix_matches_scalar_walsh():
    n = 5
    w = walsh_matrix(n)
    for k in range(1 << n):
        for i in range(1 << n):
            assert w[k, i] == walsh(k, GroupElement(i, n))


def test_coset_members_examples():
    n = 4
    assert sorted(x.bits for x in coset_members(CylinderId(0, 0), n)) == list(range(16))
    assert [x.bits for x in coset_members(CylinderId(4, 11), n)] == [11]
    assert [x.bits for x in coset_members(CylinderId(1, 0), 2)] == [0b00, 0b10]


@pytest.mark.parametrize("level", range(0, 7))
def test_coset_members_partition(level):
    n = 6
    seen = []
    for idx in range(1 << level):
        c = CylinderId(level, idx)
        words = [x.bits for x in coset_members(c, n)]
        assert len(words) == 1 << (n - level)
        assert all(w % (1 << level) == idx for w in words)
        assert np.array_equal(np.array(words), coset_words(c, n))
        seen += words
    assert sorted(seen) == list(range(1 << n))


def test_coset_level_exceeds_resolution():
    with pytest.raises(UsageError):
        list(coset_members(CylinderId(5, 0), 4))


def test_subgroup_and_first_shell_ids():
    assert CylinderId.subgroup(3).index == 0
    assert CylinderId.first_shell(3).index == 4
    x = GroupElement.from_coordinates([0, 0, 1, 1], 4)
    assert CylinderId.first_shell(3).contains(x)
    assert CylinderId.containing(x, 3) == CylinderId(3, 4)


def test_haar_measure_is_exact():
    assert haar_measure(0) == 1
    assert haar_measure(7) == Fraction(1, 128)
    assert CylinderId(5, 3).haar_measure() == Fraction(1, 32)


@pytest.mark.parametrize("level", [0, 1, 3, 6])
def test_cylinder_diameter(level):
    n = 6
    words = coset_words(CylinderId(level, 0), n)
    diam = max(Fraction(int(v), 1 << n) for v in metric_numerators(words[:, None] ^ words[None, :], n).ravel())
    assert diam == cylinder_diameter(level, n) == Fraction(1, 2 ** level) - Fraction(1, 2 ** n)
    assert cylinder_diameter(level) == Fraction(1, 2 ** level)
