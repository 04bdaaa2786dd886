import pytest
from hypothesis import given
from hypothesis import strategies as st

from omlkit.qint import QuadraticInteger, is_square_free

D = st.sampled_from([1, 2, 3, 5])
small = st.integers(-50, 50)


def q(a, b, d):
    return QuadraticInteger(a, b if d != 1 else 0, d)


@given(small, small, small, small, small, small, D)
def test_ring_laws(a1, b1, a2, b2, a3, b3, d):
    x, y, z = q(a1, b1, d), q(a2, b2, d), q(a3, b3, d)
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == QuadraticInteger(0, 0, d)
    assert -(-x) == x


@given(small, small, D)
def test_zero_iff_both_parts_zero(a, b, d):
    x = q(a, b, d)
    # sqrt(D) is irrational for square-free D > 1
    assert x.is_zero() == (x.a == 0 and x.b == 0)


def test_sqrt2_squares_to_two():
    r = QuadraticInteger(0, 1, 2)
    assert r * r == QuadraticInteger(2, 0, 2)
    assert r * r == 2


def test_cancellation_example():
    # (1, rt2, 0) . (rt2, -1, 0) = rt2 - rt2
    r = QuadraticInteger(0, 1, 2)
    assert (1 * r + r * -1).is_zero()


def test_mixed_radicands_rejected():
    with pytest.raises(ValueError):
        QuadraticInteger(1, 1, 2) + QuadraticInteger(1, 1, 3)


def test_square_free():
    assert [n for n in range(1, 20) if is_square_free(n)] == [1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19]


def test_str():
    assert str(QuadraticInteger(1, 1, 2)) == "1+rt"
    assert str(QuadraticInteger(0, -2, 2)) == "-2*rt"
    assert str(QuadraticInteger(3)) == "3"
