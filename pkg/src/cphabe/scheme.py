"""The CP-HABE construction: Setup, CreateDM, CreateUser, Encrypt, Decrypt.

Hierarchy: the root master (RM) holds mk0 and creates the single
first-level domain DM_1; domains create child domains; leaf-ish domains
issue user keys for the attributes they administer. Every key object
carries the public ``SystemParams`` so it can be used on its own.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .errors import (
    ForeignAttribute,
    IssuanceRefused,
    MixedDomainKeys,
    NotAuthorized,
    ParameterError,
    PathMismatch,
    PointValidationError,
    ValidationError,
)
from .field import PrimeModulus
from .hashing import TAG_SCALAR, counter, xof_int
from .oracles import OracleSuite, h1, h2, h_a, h_dm
from .pairing import G1Point, PairingParams, derive_generator, generate_modulus, pairing, preset_modulus
from .policy import AccessStructure, AttributeId, Registry, parse, satisfies


class RandomSource(Protocol):
    def randrange(self, start: int, stop: int) -> int: ...


def _rng(rng: RandomSource | None) -> RandomSource:
    return rng if rng is not None else secrets.SystemRandom()


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


@dataclass(frozen=True)
class SystemParams:
    modulus: PrimeModulus
    p0: G1Point
    q0: G1Point
    n: int = 256

    def __post_init__(self):
        if self.q0.infinity or not self.q0.in_subgroup():
            raise ParameterError("q0 must be a non-identity subgroup point")
        if self.p0.infinity or not self.p0.in_subgroup():
            raise ParameterError("p0 must have order q")
        if self.n <= 0 or self.n % 8:
            raise ParameterError("n must be a positive multiple of 8")

    @property
    def q(self) -> int:
        return self.modulus.q

    @property
    def pairing_params(self) -> PairingParams:
        return PairingParams(self.modulus, self.p0)

    @property
    def oracles(self) -> OracleSuite:
        return OracleSuite(self.n, self.modulus)

    @property
    def message_bytes(self) -> int:
        return self.n // 8


@dataclass(frozen=True)
class RootMasterKey:
    params: SystemParams
    mk0: int = field(repr=False)


@dataclass(frozen=True)
class DomainMasterKey:
    params: SystemParams
    level: int
    public_key: bytes
    mk: int = field(repr=False)
    sk: G1Point = field(repr=False)
    q_tuple: tuple[G1Point, ...]
    path: tuple[bytes, ...]

    def __post_init__(self):
        if self.level < 1 or len(self.path) != self.level or len(self.q_tuple) != self.level + 1:
            raise ValidationError("inconsistent domain level, path and Q-tuple")
        if self.path[-1] != self.public_key:
            raise ValidationError("path must end at the domain's own public key")
        if self.q_tuple[0] != self.params.q0:
            raise ValidationError("Q-tuple must start with Q0")
        if not 1 <= self.mk < self.params.q:
            raise ValidationError("mk out of range")


@dataclass(frozen=True)
class UserIdentityKey:
    params: SystemParams
    user_public_key: bytes
    domain_path: tuple[bytes, ...]
    q_tuple_prefix: tuple[G1Point, ...]
    masked_q: G1Point

    def __post_init__(self):
        if len(self.q_tuple_prefix) != len(self.domain_path):
            raise ValidationError("Q-tuple prefix must have one entry per domain on the path")

    @property
    def domain_public_key(self) -> bytes:
        return self.domain_path[-1]


@dataclass(frozen=True)
class UserAttributeKey:
    params: SystemParams
    user_public_key: bytes
    domain_public_key: bytes
    attribute: AttributeId
    key: G1Point


@dataclass(frozen=True)
class ClauseComponents:
    path_components: tuple[G1Point, ...]  # U_{i2} .. U_{it}
    u: G1Point  # U_i


@dataclass(frozen=True)
class Ciphertext:
    params: SystemParams
    structure: AccessStructure
    registry_digest: str
    v: bytes
    u0: G1Point
    components: tuple[ClauseComponents, ...]

    def __post_init__(self):
        if len(self.components) != len(self.structure.clauses):
            raise ValidationError("one component block per clause required")
        for clause, comp in zip(self.structure.clauses, self.components):
            if len(comp.path_components) != len(clause.domain_path) - 1:
                raise ValidationError("path component count must equal domain depth - 1")
        if len(self.v) != self.params.message_bytes:
            raise ValidationError("V has the wrong length")


# ---------------------------------------------------------------- Setup


def derive_scalar(seed: bytes, label: bytes, q: int) -> int:
    """Deterministic scalar in [1, q) from a seed."""
    nbytes = (q.bit_length() + 7) // 8 + 16
    c = 0
    while True:
        v = xof_int(TAG_SCALAR, (label, seed, counter(c)), nbytes) % q
        if v:
            return v
        c += 1


def setup_on_group(modulus: PrimeModulus, n: int, seed: bytes) -> tuple[SystemParams, RootMasterKey]:
    """Fresh P0 and mk0 on an existing group."""
    pp = derive_generator(modulus, seed)
    mk0 = derive_scalar(seed, b"mk0", modulus.q)
    params = SystemParams(modulus, pp.p0, mk0 * pp.p0, n)
    return params, RootMasterKey(params, mk0)


def setup(q_bits: int, n: int = 256, seed: bytes = b"", p_bits: int | None = None) -> tuple[SystemParams, RootMasterKey]:
    return setup_on_group(generate_modulus(q_bits, seed, p_bits), n, seed)


def setup_preset(preset: str, n: int = 256, seed: bytes = b"") -> tuple[SystemParams, RootMasterKey]:
    return setup_on_group(preset_modulus(preset), n, seed)


# ---------------------------------------------------------------- CreateDM


def create_dm(parent: RootMasterKey | DomainMasterKey, child_pk: bytes, rng: RandomSource | None = None) -> DomainMasterKey:
    if not child_pk:
        raise ValidationError("child public key must be non-empty")
    params = parent.params
    p_child = h1(child_pk, params.modulus)
    mk_child = _rng(rng).randrange(1, params.q)
    q_child = mk_child * params.p0
    if isinstance(parent, RootMasterKey):
        # SK_0 is the identity, so SK_1 = mk0 * P_1
        sk = parent.mk0 * p_child
        q_tuple = (params.q0, q_child)
        path = (child_pk,)
    else:
        if child_pk in parent.path:
            raise ValidationError("child public key already on the parent's path")
        sk = parent.sk + parent.mk * p_child
        q_tuple = parent.q_tuple + (q_child,)
        path = parent.path + (child_pk,)
    return DomainMasterKey(params, len(path), child_pk, mk_child, sk, q_tuple, path)


# ---------------------------------------------------------------- CreateUser


def attribute_point(params: SystemParams, domain_pk: bytes, attribute: AttributeId) -> G1Point:
    """P_a = H_dm(PK_a) * P0 for the given domain."""
    return h_dm(domain_pk, attribute.public_key, params.q) * params.p0


def create_user(
    dm: DomainMasterKey,
    user_pk: bytes,
    attribute: AttributeId | str,
    registry: Registry,
) -> tuple[UserIdentityKey, UserAttributeKey]:
    name = attribute if isinstance(attribute, str) else attribute.name
    attr = registry.attribute(name)
    if registry.domain_public_key(registry.attribute_domain(name)) != dm.public_key:
        raise ForeignAttribute(f"attribute {name!r} is not administered by this domain")
    if not registry.is_authorized(user_pk, name):
        raise IssuanceRefused(f"user is not authorized for {name!r}")
    params = dm.params
    q = params.q
    mk_u = h_a(user_pk, q)
    identity = UserIdentityKey(
        params,
        user_pk,
        dm.path,
        dm.q_tuple[:-1],
        mk_u * dm.q_tuple[-1],
    )
    coeff = dm.mk * mk_u * h_dm(dm.public_key, attr.public_key, q) % q
    key = UserAttributeKey(params, user_pk, dm.public_key, attr, dm.sk + coeff * params.p0)
    return identity, key


# ---------------------------------------------------------------- Encrypt


def encrypt(
    params: SystemParams,
    message: bytes,
    policy: str | AccessStructure,
    registry: Registry,
    rng: RandomSource | None = None,
) -> Ciphertext:
    if len(message) != params.message_bytes:
        raise ValidationError(f"message must be exactly {params.n} bits")
    structure = parse(policy, registry) if isinstance(policy, str) else policy
    roots = {c.domain_path[0] if c.domain_path else None for c in structure.clauses}
    if None in roots:
        raise PathMismatch("clause without a resolved domain path")
    if len(roots) != 1:
        raise PathMismatch("all clauses must route through the same first-level domain")
    (root_pk,) = roots
    q = params.q
    curve = params.modulus
    r = _rng(rng).randrange(1, q)
    n_a = structure.n_a
    blind = pairing(params.q0, (r * n_a % q) * h1(root_pk, curve))
    v = _xor(message, h2(blind, params.n))
    components = []
    for clause in structure.clauses:
        path = clause.domain_path
        path_components = tuple(r * h1(pk, curve) for pk in path[1:])
        total = sum(h_dm(path[-1], a.public_key, q) for a in clause.attributes)
        components.append(ClauseComponents(path_components, (r * total % q) * params.p0))
    return Ciphertext(params, structure, registry.digest(), v, r * params.p0, tuple(components))


# ---------------------------------------------------------------- Decrypt


def decrypt(ct: Ciphertext, identity_key: UserIdentityKey, attr_keys: Sequence[UserAttributeKey]) -> bytes:
    for k in attr_keys:
        if k.domain_public_key != identity_key.domain_public_key or k.user_public_key != identity_key.user_public_key:
            raise MixedDomainKeys("attribute keys must belong to the identity key's user and domain")
    idx = satisfies([k.attribute for k in attr_keys], ct.structure)
    if idx is None:
        raise NotAuthorized("not authorized: no clause of the policy is satisfied")
    clause = ct.structure.clauses[idx]
    if clause.domain_path != identity_key.domain_path:
        raise PathMismatch("satisfied clause belongs to a different domain")
    held = {k.attribute.name: k for k in attr_keys}
    for a in clause.attributes:
        if held[a.name].attribute.public_key != a.public_key:
            raise MixedDomainKeys(f"key for {a.name!r} does not match the ciphertext's attribute")

    params = ct.params
    q = params.q
    n_a = ct.structure.n_a
    if n_a % clause.size:
        raise ValidationError("n_A is not a multiple of the clause size")
    coeff = n_a // clause.size % q
    comp = ct.components[idx]

    key_sum = G1Point.at_infinity(params.modulus)
    for a in clause.attributes:
        key_sum = key_sum + held[a.name].key
    numerator = pairing(ct.u0, coeff * key_sum)
    denominator = pairing(identity_key.masked_q, coeff * comp.u)
    for j, u_ij in enumerate(comp.path_components, start=2):
        denominator = denominator * pairing(u_ij, (n_a % q) * identity_key.q_tuple_prefix[j - 1])
    return _xor(ct.v, h2(numerator / denominator, params.n))


def check_subgroup(*points: G1Point) -> None:
    for P in points:
        if not P.in_subgroup():
            raise PointValidationError("point is not in the order-q subgroup")
