from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stringlinks.tensor import Substitution, TensorSeries, bch, substitute

from support import seeded


def gen(n, N, i):
    return TensorSeries.generator(n, N, i)


def one(n, N):
    return TensorSeries.one(n, N)


def random_primitive(n, N, rng, max_coeff=3):
    """Random Lie-style primitive: combination of commutator monomials."""
    from stringlinks.lie import LieElement, lyndon_words
    coords = {}
    for d in range(1, N + 1):
        for w in lyndon_words(n, d):
            if rng.random() < 0.3:
                c = rng.randint(-max_coeff, max_coeff)
                if c:
                    coords[w] = Fraction(c)
    return LieElement(n, coords).to_tensor(N)


def test_unit_and_concatenation():
    a = gen(2, 4, 1) + gen(2, 4, 2).scale(3)
    assert one(2, 4) * a == a
    assert a * one(2, 4) == a
    assert gen(2, 4, 1) * gen(2, 4, 2) == TensorSeries.from_terms(2, 4, [((1, 2), 1)])


def test_geometric_series_inverse():
    u = one(2, 5) + gen(2, 5, 1)
    inv = u.inverse()
    # 1 - X1 + X1^2 - ... up to the truncation
    expected = TensorSeries.from_terms(
        2, 5, [(tuple([1] * m), (-1) ** m) for m in range(6)])
    assert inv == expected
    assert u * inv == one(2, 5)
    assert inv * u == one(2, 5)


def test_exp_log_basics():
    z = TensorSeries.zero(2, 4)
    assert z.exp() == one(2, 4)
    x = gen(2, 5, 1)
    assert x.exp().log() == x
    # direct series oracle: exp(X1) = sum X1^m / m!
    expected = TensorSeries.from_terms(
        2, 5, [(tuple([1] * m), Fraction(1, factorial(m))) for m in range(6)])
    assert x.exp() == expected


def test_exp_log_round_trips_random():
    rng = seeded(5)
    for _ in range(10):
        p = random_primitive(3, 5, rng)
        assert p.exp().log() == p
        u = one(3, 5) + p  # arbitrary constant-term-1 series
        assert u.log().exp() == u


def test_domain_preconditions():
    with pytest.raises(ValueError):
        (one(2, 3) + gen(2, 3, 1)).exp()
    with pytest.raises(ValueError):
        gen(2, 3, 1).log()
    with pytest.raises(ValueError):
        gen(2, 3, 1).inverse()


def test_truncation_mismatch_is_an_error():
    with pytest.raises(ValueError):
        gen(2, 3, 1) * gen(2, 4, 1)
    with pytest.raises(ValueError):
        gen(2, 3, 1) + gen(3, 3, 1)
    assert gen(2, 4, 1).truncate(2) == gen(2, 2, 1)
    with pytest.raises(ValueError):
        gen(2, 4, 1).truncate(5)


def test_primitivity():
    assert (gen(2, 4, 1) + gen(2, 4, 2)).is_primitive()
    assert gen(2, 4, 1).exp().is_grouplike()
    assert not (one(2, 2) + gen(2, 2, 1)).is_grouplike()
    assert not (one(2, 4) + gen(2, 4, 1)).is_grouplike()
    comm = gen(2, 4, 1) * gen(2, 4, 2) - gen(2, 4, 2) * gen(2, 4, 1)
    assert comm.is_primitive()
    assert not (gen(2, 4, 1) * gen(2, 4, 2)).is_primitive()


def test_bch_basics():
    x1, x2 = gen(2, 4, 1), gen(2, 4, 2)
    assert bch(x1, -x1).is_zero()
    assert bch(x1, TensorSeries.zero(2, 4)) == x1
    low = bch(x1, x2).truncate(2)
    half = Fraction(1, 2)
    expected = TensorSeries.from_terms(
        2, 2, [((1,), 1), ((2,), 1), ((1, 2), half), ((2, 1), -half)])
    assert low == expected


def test_bch_requires_primitives():
    with pytest.raises(ValueError):
        bch(gen(2, 3, 1) * gen(2, 3, 2), gen(2, 3, 1))


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_bch_of_primitives_is_primitive(seed):
    rng = seeded(seed)
    a = random_primitive(2, 5, rng)
    b = random_primitive(2, 5, rng)
    assert bch(a, b).is_primitive()


def test_products_of_grouplikes_are_grouplike():
    rng = seeded(17)
    for _ in range(8):
        u = random_primitive(3, 4, rng).exp()
        v = random_primitive(3, 4, rng).exp()
        assert (u * v).is_grouplike()


def test_substitute_identity_and_composition():
    n, N = 2, 4
    ident = [gen(n, N, i) for i in range(1, n + 1)]
    rng = seeded(3)
    s = random_primitive(n, N, rng).exp()
    assert substitute(ident, s) == s
    # composing two substitutions = substituting the composed images
    f = [gen(n, N, 2), gen(n, N, 1)]               # swap generators
    g = [gen(n, N, 1) + gen(n, N, 2).scale(2), gen(n, N, 2)]
    fg = [substitute(f, img) for img in g]
    assert substitute(f, substitute(g, s)) == substitute(fg, s)


def test_substitution_object_reusable():
    n, N = 2, 3
    sub = Substitution([gen(n, N, 2), gen(n, N, 1)])
    a = gen(n, N, 1) * gen(n, N, 1)
    b = gen(n, N, 1) * gen(n, N, 2)
    assert sub(a) == gen(n, N, 2) * gen(n, N, 2)
    assert sub(b) == gen(n, N, 2) * gen(n, N, 1)


def test_rendering():
    s = TensorSeries.from_terms(2, 3, [((), 1), ((1, 2), Fraction(-1, 2))])
    assert str(s) == "1 * 1  +  -1/2 * X1 X2"
    assert str(TensorSeries.zero(2, 3)) == "0"
