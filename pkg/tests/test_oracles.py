import pytest

from cphabe.hashing import TAG_H1, TAG_HA, frame
from cphabe.oracles import OracleSuite, h1, h2, h_a, h_dm
from cphabe.pairing import TOY, GtElement, pairing


def test_frame_layout_is_bit_exact():
    assert frame(TAG_H1, [b"ab", b""]) == b"\x01\x00\x00\x00\x02ab\x01\x00\x00\x00\x00"


def test_tags_separate_oracles():
    assert frame(TAG_H1, [b"x"]) != frame(TAG_HA, [b"x"])


def test_h1_deterministic_in_subgroup(small):
    P = h1(b"pk", small)
    assert P == h1(b"pk", small)
    assert P.in_subgroup() and not P.infinity


def test_h1_distinct_over_1000_inputs(small):
    points = {h1(f"pk-{i}".encode(), small) for i in range(1000)}
    assert len(points) == 1000


def test_h2_equal_for_equal_gt(small_system):
    params, _ = small_system
    P = params.p0
    assert h2(pairing(2 * P, 3 * P)) == h2(pairing(6 * P, P))
    assert h2(pairing(2 * P, 3 * P)) != h2(pairing(P, P))


def test_h2_of_identity_is_fixed_and_nonzero(small):
    one = GtElement.one(small)
    assert h2(one) == h2(one)
    assert h2(one) != bytes(32)
    assert len(h2(one, 128)) == 16


def test_h2_rejects_bad_length():
    with pytest.raises(ValueError):
        h2(GtElement.one(TOY), 12)


def test_h_a_nonzero_and_in_range_on_toy():
    # q = 11 hits zero often, exercising the counter escape
    values = [h_a(f"u{i}".encode(), TOY.q) for i in range(10_000)]
    assert min(values) >= 1 and max(values) < TOY.q
    assert h_a(b"u1", TOY.q) == values[1]


def test_h_a_small_range(small):
    for i in range(200):
        v = h_a(f"user{i}".encode(), small.q)
        assert 1 <= v < small.q


def test_h_dm_no_collisions_over_samples(small):
    seen = set()
    for d in range(100):
        for a in range(100):
            seen.add(h_dm(f"dom{d}".encode(), f"attr{a}".encode(), small.q))
    assert len(seen) == 10_000
    assert 0 not in seen


def test_h_dm_depends_on_domain(small):
    assert h_dm(b"d1", b"a", small.q) != h_dm(b"d2", b"a", small.q)


def test_suite_matches_functions(small):
    s = OracleSuite(256, small)
    assert s.h1(b"x") == h1(b"x", small)
    assert s.h_a(b"x") == h_a(b"x", small.q)
    assert s.h_dm(b"d", b"a") == h_dm(b"d", b"a", small.q)
    with pytest.raises(ValueError):
        OracleSuite(7, small)

