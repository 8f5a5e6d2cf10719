"""Key recovery against the CP-HABE key delegation, and universal decryption.

Everything here runs on public values plus one user's own issued keys:
system parameters, public keys, public oracle evaluations, the user's
identity key and one or two attribute keys. No master-key type is
imported by this module.

* ``unmask_q``: strip mk_u from the identity key's last component.
* ``attack1_recover``: one attribute key gives the domain key SK.
* ``attack2_recover``: two attribute keys give SK without touching the
  identity key's masked component.
* ``theorem1_decrypt``: with SK and the Q-tuple of a domain, decrypt any
  ciphertext having a clause administered by that domain.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .errors import MixedDomainKeys, OracleCollision, PathMismatch, ValidationError
from .field import int_to_hex, inv_mod
from .oracles import h2, h_a, h_dm
from .pairing import G1Point, pairing
from .scheme import Ciphertext, SystemParams, UserAttributeKey, UserIdentityKey


@dataclass(frozen=True)
class RecoveredDomainKey:
    params: SystemParams
    domain_path: tuple[bytes, ...]
    sk: G1Point
    q_tuple: tuple[G1Point, ...]
    trace: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def domain_public_key(self) -> bytes:
        return self.domain_path[-1]

    @property
    def level(self) -> int:
        return len(self.domain_path)

    def digest(self) -> str:
        h = hashlib.sha256()
        for P in (self.sk,) + self.q_tuple:
            h.update(_point_text(P).encode())
        return h.hexdigest()


def _point_text(P: G1Point) -> str:
    return "infinity" if P.infinity else f"{int_to_hex(P.x)},{int_to_hex(P.y)}"


def _same_owner(identity_key: UserIdentityKey, *keys: UserAttributeKey) -> None:
    for k in keys:
        if k.domain_public_key != identity_key.domain_public_key or k.user_public_key != identity_key.user_public_key:
            raise MixedDomainKeys("attribute key does not match the identity key's user and domain")


def unmask_q(identity_key: UserIdentityKey) -> G1Point:
    q = identity_key.params.q
    return inv_mod(h_a(identity_key.user_public_key, q), q) * identity_key.masked_q


def _recovered(identity_key: UserIdentityKey, sk: G1Point, trace: dict) -> RecoveredDomainKey:
    q_last = unmask_q(identity_key)
    trace["unmasked_q"] = q_last
    return RecoveredDomainKey(
        identity_key.params,
        identity_key.domain_path,
        sk,
        identity_key.q_tuple_prefix + (q_last,),
        trace,
    )


def attack1_recover(identity_key: UserIdentityKey, attr_key: UserAttributeKey) -> RecoveredDomainKey:
    """SK = attribute key - H_dm(PK_a) * (mk * mk_u * P0)."""
    _same_owner(identity_key, attr_key)
    q = identity_key.params.q
    h = h_dm(attr_key.domain_public_key, attr_key.attribute.public_key, q)
    a = h * identity_key.masked_q
    return _recovered(identity_key, attr_key.key - a, {"A": a})


def attack2_recover(
    identity_key: UserIdentityKey, attr_key_1: UserAttributeKey, attr_key_2: UserAttributeKey
) -> RecoveredDomainKey:
    """B = K1 - K2 = (h1 - h2) mk mk_u P0, so C = h1/(h1 - h2) * B and SK = K1 - C."""
    _same_owner(identity_key, attr_key_1, attr_key_2)
    if attr_key_1.attribute == attr_key_2.attribute:
        raise ValidationError("attack 2 needs two distinct attributes")
    q = identity_key.params.q
    dpk = attr_key_1.domain_public_key
    h1v = h_dm(dpk, attr_key_1.attribute.public_key, q)
    h2v = h_dm(dpk, attr_key_2.attribute.public_key, q)
    if (h1v - h2v) % q == 0:
        raise OracleCollision("oracle collision, choose different attributes")
    b = attr_key_1.key - attr_key_2.key
    c = (h1v * inv_mod(h1v - h2v, q)) % q * b
    return _recovered(identity_key, attr_key_1.key - c, {"B": b, "C": c})


def matching_clause(ct: Ciphertext, recovered: RecoveredDomainKey) -> int | None:
    for i, clause in enumerate(ct.structure.clauses):
        if clause.domain_path == recovered.domain_path:
            return i
    return None


def theorem1_decrypt(ct: Ciphertext, recovered: RecoveredDomainKey) -> bytes:
    """M = V xor H2( e(nA U0, SK) * prod_j e(-nA Q_j, U_{j+1}) ), j = 1..t-1."""
    params = ct.params
    q = params.q
    n_a = ct.structure.n_a % q
    idx = matching_clause(ct, recovered)
    if idx is None:
        if recovered.level != 1 or any(c.domain_path[0] != recovered.domain_path[0] for c in ct.structure.clauses):
            raise PathMismatch("no clause of the ciphertext is administered by the recovered domain")
        path_components = ()
    else:
        path_components = ct.components[idx].path_components
    acc = pairing(n_a * ct.u0, recovered.sk)
    for j, u_next in enumerate(path_components, start=1):
        acc = acc * pairing(-(n_a * recovered.q_tuple[j]), u_next)
    mask = h2(acc, params.n)
    return bytes(x ^ y for x, y in zip(ct.v, mask))


def transcript(
    attack: str,
    recovered: RecoveredDomainKey,
    plaintext: bytes,
    consumed: list[str],
    expected: bytes | None = None,
) -> dict:
    """Machine-readable report of one attack run."""
    verdict = "unknown" if expected is None else ("match" if expected == plaintext else "mismatch")
    return {
        "attack": attack,
        "inputs_consumed": consumed,
        "domain_path": [pk.hex() for pk in recovered.domain_path],
        "intermediates": {k: _point_text(v) for k, v in sorted(recovered.trace.items())},
        "recovered_key_digest": recovered.digest(),
        "plaintext": plaintext.hex(),
        "plaintext_match": verdict,
    }
