import random
from collections import Counter

import pytest

from cphabe.errors import ParameterError, PointValidationError
from cphabe.field import Fp2Element, fp2_mul
from cphabe.pairing import (
    TOY,
    G1Point,
    GtElement,
    distortion,
    generate_params,
    hash_to_g1,
    pairing,
    point_add,
    point_neg,
    scalar_mul,
)


def all_toy_points():
    """Brute-force enumeration of y^2 = x^3 + x over F_43, plus infinity."""
    p = TOY.p
    pts = [G1Point.at_infinity(TOY)]
    for x in range(p):
        for y in range(p):
            if (y * y - x**3 - x) % p == 0:
                pts.append(G1Point(x, y, False, TOY))
    return pts


def test_toy_parameters():
    assert TOY.p % 4 == 3
    assert TOY.p + 1 == 4 * 11
    assert len(all_toy_points()) == 44


def test_group_law_identity_and_order(toy_params):
    P = toy_params.p0
    O = G1Point.at_infinity(TOY)
    assert P + O == P and O + P == P
    assert scalar_mul(TOY.q, P).infinity
    assert P + point_neg(P) == O


def test_scalar_mul_matches_repeated_addition_exhaustively():
    for P in all_toy_points():
        acc = G1Point.at_infinity(TOY)
        for k in range(44):
            assert scalar_mul(k, P) == acc
            acc = point_add(acc, P)


def test_off_curve_point_rejected():
    with pytest.raises(PointValidationError):
        G1Point(1, 1, False, TOY)


def test_distortion_image_on_curve_over_fp2():
    assert distortion(G1Point.at_infinity(TOY)) is None
    for P in all_toy_points()[1:]:
        x, y = distortion(P)
        assert fp2_mul(y, y) == fp2_mul(fp2_mul(x, x), x) + x
        nx, ny = distortion(-P)
        assert nx == x and ny == -y


def test_pairing_exhaustive_bilinearity_on_toy(toy_params):
    P = toy_params.p0
    e = pairing(P, P)
    for a in range(11):
        for b in range(11):
            assert pairing(a * P, b * P) == e ** (a * b)


def test_pairing_order_is_exactly_q_on_toy(toy_params):
    e = pairing(toy_params.p0, toy_params.p0)
    powers = [(e**k).is_one() for k in range(1, 12)]
    assert powers == [False] * 10 + [True]


def test_pairing_with_infinity_is_one(toy_params):
    O = G1Point.at_infinity(TOY)
    assert pairing(toy_params.p0, O).is_one()
    assert pairing(O, toy_params.p0).is_one()


def test_pairing_rejects_non_subgroup_point():
    two_torsion = G1Point(0, 0, False, TOY)
    P = hash_to_g1(b"x", TOY)
    with pytest.raises(PointValidationError):
        pairing(two_torsion, P)


def test_small_bilinearity_and_symmetry(small_system):
    params, _ = small_system
    P = params.p0
    e = pairing(P, P)
    assert not e.is_one()
    e.validate()
    rng = random.Random(5)
    for _ in range(10):
        a, b = rng.randrange(params.q), rng.randrange(params.q)
        assert pairing(a * P, b * P) == e ** (a * b)
        assert pairing(a * P, b * P) == pairing(b * P, a * P)


def test_pairing_additive_in_first_argument(small_system):
    params, _ = small_system
    rng = random.Random(6)
    P, Q, R = (rng.randrange(1, params.q) * params.p0 for _ in range(3))
    assert pairing(P + Q, R) == pairing(P, R) * pairing(Q, R)


def test_bdh_consistency(small_system):
    params, _ = small_system
    P = params.p0
    rng = random.Random(7)
    a, b, c = (rng.randrange(1, params.q) for _ in range(3))
    assert pairing(P, P) ** (a * b * c) == pairing(a * P, b * P) ** c


def test_hash_to_g1_deterministic_and_in_subgroup(small):
    P = hash_to_g1(b"msg", small)
    assert P == hash_to_g1(b"msg", small)
    assert scalar_mul(small.q, P).infinity
    assert not P.infinity


def test_hash_to_g1_distribution_on_toy():
    subgroup = {P for P in all_toy_points() if scalar_mul(11, P).infinity and not P.infinity}
    assert len(subgroup) == 10
    hits = Counter(hash_to_g1(f"m{i}".encode(), TOY) for i in range(1000))
    assert set(hits) <= subgroup
    assert len(hits) >= 9


def test_generate_params_deterministic():
    a = generate_params(16, b"seed", p_bits=64)
    b = generate_params(16, b"seed", p_bits=64)
    assert a == b
    m = a.modulus
    assert m.q.bit_length() == 16 and m.p.bit_length() == 64
    assert m.p % 4 == 3 and m.h * m.q == m.p + 1
    assert scalar_mul(m.q, a.p0).infinity and not a.p0.infinity
    assert generate_params(16, b"other", p_bits=64) != a


def test_generate_params_rejects_tiny_q():
    with pytest.raises(ParameterError):
        generate_params(4, b"s")


def test_gt_validate_rejects_non_member(toy_params):
    g = GtElement(Fp2Element.from_ints(2, 0, TOY.p), TOY.q)
    with pytest.raises(ValueError):
        g.validate()
