"""Random oracles H1, H2, H_A and the per-domain family H_dm.

All are SHAKE-256 instances separated by a one-byte tag (see ``hashing``).
H_dm is keyed by the domain's public key so that anyone holding the two
public keys can evaluate it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import ValidationError
from .field import PrimeModulus, int_to_hex
from .hashing import TAG_H2, TAG_HA, TAG_HDM, counter, xof, xof_int
from .pairing import G1Point, GtElement, hash_to_g1


@lru_cache(maxsize=4096)
def h1(pk: bytes, curve: PrimeModulus) -> G1Point:
    return hash_to_g1(pk, curve)


def gt_bytes(g: GtElement) -> bytes:
    a, b = g.value.raw
    return f"{int_to_hex(a)}:{int_to_hex(b)}".encode()


def h2(g: GtElement, n: int = 256) -> bytes:
    if n <= 0 or n % 8:
        raise ValidationError("n must be a positive multiple of 8")
    return xof(TAG_H2, (gt_bytes(g),), n // 8)


def _nonzero_scalar(tag: int, fields: tuple[bytes, ...], q: int) -> int:
    # 16 extra bytes keep the mod-q bias negligible
    nbytes = (q.bit_length() + 7) // 8 + 16
    v = xof_int(tag, fields, nbytes) % q
    c = 0
    while v == 0:
        v = xof_int(tag, fields + (counter(c),), nbytes) % q
        c += 1
    return v


def h_a(pk: bytes, q: int) -> int:
    """User key scalar mk_u in [1, q)."""
    return _nonzero_scalar(TAG_HA, (pk,), q)


def h_dm(dm_public_key: bytes, attr_pk: bytes, q: int) -> int:
    """Per-domain attribute oracle in [1, q); the attribute point is h_dm * P0."""
    return _nonzero_scalar(TAG_HDM, (dm_public_key, attr_pk), q)


@dataclass(frozen=True)
class OracleSuite:
    n: int
    curve: PrimeModulus

    def __post_init__(self):
        if self.n <= 0 or self.n % 8:
            raise ValidationError("n must be a positive multiple of 8")

    def h1(self, pk: bytes) -> G1Point:
        return h1(pk, self.curve)

    def h2(self, g: GtElement) -> bytes:
        return h2(g, self.n)

    def h_a(self, pk: bytes) -> int:
        return h_a(pk, self.curve.q)

    def h_dm(self, dm_public_key: bytes, attr_pk: bytes) -> int:
        return h_dm(dm_public_key, attr_pk, self.curve.q)
