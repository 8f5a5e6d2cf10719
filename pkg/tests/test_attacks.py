import pytest

from conftest import issue, make_hierarchy, random_policy, render
from cphabe.attacks import (
    RecoveredDomainKey,
    attack1_recover,
    attack2_recover,
    theorem1_decrypt,
    transcript,
    unmask_q,
)
from cphabe.errors import MixedDomainKeys, NotAuthorized, OracleCollision, PathMismatch
from cphabe.oracles import h_a
from cphabe.scheme import attribute_point, decrypt, encrypt


def white_box(hier, did):
    dm = hier.domain_keys[did]
    return RecoveredDomainKey(dm.params, dm.path, dm.sk, dm.q_tuple)


def test_unmask_q_white_box():
    params, _, hier, _ = make_hierarchy(31)
    for did, dm in hier.domain_keys.items():
        a = hier.registry.domain_attributes(did)[0]
        ident, _ = issue(hier, b"unmask-a", [a])
        other, _ = issue(hier, b"unmask-b", [a])
        assert unmask_q(ident) == dm.q_tuple[-1]
        assert h_a(b"unmask-a", params.q) * unmask_q(ident) == ident.masked_q
        assert unmask_q(ident) == unmask_q(other)
        assert ident.masked_q != other.masked_q


@pytest.mark.parametrize("seed", range(50))
def test_attacks_recover_exact_domain_key(seed):
    params, _, hier, rng = make_hierarchy(500 + seed)
    did = rng.choice(sorted(hier.domain_keys))
    dm = hier.domain_keys[did]
    a1, a2 = hier.registry.domain_attributes(did)[:2]
    ident, (k1, k2) = issue(hier, b"attacker", [a1, a2])

    r1 = attack1_recover(ident, k1)
    assert r1.sk == dm.sk and r1.q_tuple == dm.q_tuple
    assert r1.trace["A"] == (dm.mk * h_a(b"attacker", params.q) % params.q) * attribute_point(
        params, dm.public_key, k1.attribute
    )

    r2 = attack2_recover(ident, k1, k2)
    assert r2.sk == dm.sk and r2.q_tuple == dm.q_tuple
    mk_u = h_a(b"attacker", params.q)
    assert r2.trace["C"] == (mk_u * dm.mk % params.q) * attribute_point(params, dm.public_key, k1.attribute)
    assert r1 == r2 and r1.digest() == r2.digest()


@pytest.mark.parametrize("extra", [1, 2])
def test_end_to_end_against_larger_clauses(extra):
    params, _, hier, rng = make_hierarchy(77, max_depth=3)
    did = max(hier.domain_keys, key=lambda d: d.count("."))
    attrs = hier.registry.domain_attributes(did)
    # attacker holds only the first attribute (attack 1) or the first two (attack 2)
    ident, keys = issue(hier, b"eve", attrs[:2])
    clause = attrs[: 2 + extra]
    msg = rng.randbytes(32)
    ct = encrypt(params, msg, render([clause]), hier.registry, rng)
    with pytest.raises(NotAuthorized):
        decrypt(ct, ident, keys)
    assert theorem1_decrypt(ct, attack1_recover(ident, keys[0])) == msg
    assert theorem1_decrypt(ct, attack2_recover(ident, keys[0], keys[1])) == msg


def test_universal_decrypt_white_box():
    params, _, hier, rng = make_hierarchy(88, max_depth=3)
    for did in hier.domain_keys:
        for _ in range(3):
            clauses = random_policy(hier, rng, must_include=did)
            msg = rng.randbytes(32)
            ct = encrypt(params, msg, render(clauses), hier.registry, rng)
            assert theorem1_decrypt(ct, white_box(hier, did)) == msg


def test_level_one_key_decrypts_anything():
    params, _, hier, rng = make_hierarchy(90, max_depth=3)
    top = white_box(hier, "D1")
    for _ in range(5):
        clauses = random_policy(hier, rng)
        msg = rng.randbytes(32)
        ct = encrypt(params, msg, render(clauses), hier.registry, rng)
        assert theorem1_decrypt(ct, top) == msg


def test_universal_decrypt_depth_one_clause():
    params, _, hier, rng = make_hierarchy(92, max_depth=1)
    a = hier.registry.domain_attributes("D1")[:3]
    msg = rng.randbytes(32)
    ct = encrypt(params, msg, render([a]), hier.registry, rng)
    assert theorem1_decrypt(ct, white_box(hier, "D1")) == msg


def test_flipped_bit_only_flips_that_bit():
    params, _, hier, rng = make_hierarchy(93, max_depth=2)
    did = sorted(hier.domain_keys)[-1]
    msg = rng.randbytes(32)
    ct = encrypt(params, msg, render([hier.registry.domain_attributes(did)[:2]]), hier.registry, rng)
    forged = type(ct)(ct.params, ct.structure, ct.registry_digest, bytes([ct.v[0] ^ 1]) + ct.v[1:], ct.u0, ct.components)
    out = theorem1_decrypt(forged, white_box(hier, did))
    assert out[0] == msg[0] ^ 1 and out[1:] == msg[1:]


def test_path_mismatch_for_foreign_domain():
    seed = 94
    while True:
        params, _, hier, rng = make_hierarchy(seed, max_depth=3, max_branching=2)
        leaves = [d for d in hier.domain_keys if d.count(".") == 1]
        if len(leaves) >= 2:
            break
        seed += 1
    ct = encrypt(params, bytes(32), render([hier.registry.domain_attributes(leaves[0])[:1]]), hier.registry, rng)
    with pytest.raises(PathMismatch):
        theorem1_decrypt(ct, white_box(hier, leaves[1]))


def test_oracle_collision_and_mismatched_owner():
    params, _, hier, _ = make_hierarchy(95)
    a1, a2 = hier.registry.domain_attributes("D1")[:2]
    ident, (k1, _) = issue(hier, b"x", [a1, a2])
    with pytest.raises(OracleCollision):
        attack2_recover(ident, k1, type(k1)(k1.params, k1.user_public_key, k1.domain_public_key,
                                              type(k1.attribute)("alias", k1.attribute.public_key), k1.key))
    _, (other,) = issue(hier, b"y", [a1])
    with pytest.raises(MixedDomainKeys):
        attack1_recover(ident, other)


def test_transcript_shape():
    params, _, hier, rng = make_hierarchy(96)
    a1 = hier.registry.domain_attributes("D1")[0]
    ident, (k1,) = issue(hier, b"t", [a1])
    rec = attack1_recover(ident, k1)
    doc = transcript("attack1", rec, b"\x01", ["identity", "attribute"], expected=b"\x01")
    assert doc["plaintext_match"] == "match"
    assert set(doc["intermediates"]) == {"A", "unmasked_q"}
    assert doc["recovered_key_digest"] == rec.digest()
