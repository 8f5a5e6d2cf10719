"""Canonical JSON documents for params, keys and ciphertexts.

Integers are lowercase big-endian hex without leading zeros; byte strings
are plain hex; points are ``{"x": .., "y": ..}`` or ``"infinity"``. Every
document carries ``"version": "habe-v1"`` and a ``"type"`` field, and
every key or ciphertext embeds the public system parameters.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import MalformedDocument, PointValidationError, ValidationError, VersionMismatch
from .field import PrimeModulus, hex_to_int, int_to_hex
from .pairing import G1Point, GtElement
from .policy import VERSION, AccessStructure, AttributeId, ConjunctionClause, parse
from .scheme import (
    Ciphertext,
    ClauseComponents,
    DomainMasterKey,
    RootMasterKey,
    SystemParams,
    UserAttributeKey,
    UserIdentityKey,
)


def _int(doc, key) -> int:
    try:
        return hex_to_int(doc[key])
    except KeyError:
        raise MalformedDocument(f"missing field {key!r}") from None
    except ValidationError as exc:
        raise MalformedDocument(str(exc)) from exc


def _field(doc, key):
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise MalformedDocument(f"missing field {key!r}") from None


def _bytes(s) -> bytes:
    if not isinstance(s, str):
        raise MalformedDocument("expected a hex byte string")
    try:
        return bytes.fromhex(s)
    except ValueError as exc:
        raise MalformedDocument(f"bad hex bytes {s!r}") from exc


def point_to_doc(P: G1Point):
    if P.infinity:
        return "infinity"
    return {"x": int_to_hex(P.x), "y": int_to_hex(P.y)}


def point_from_doc(doc, curve: PrimeModulus) -> G1Point:
    if doc == "infinity":
        return G1Point.at_infinity(curve)
    if not isinstance(doc, dict):
        raise MalformedDocument("point must be an object or 'infinity'")
    P = G1Point(_int(doc, "x"), _int(doc, "y"), False, curve)
    if not P.in_subgroup():
        raise PointValidationError("point is not in the order-q subgroup")
    return P


def gt_to_doc(g: GtElement):
    a, b = g.value.raw
    return {"a": int_to_hex(a), "b": int_to_hex(b)}


def gt_from_doc(doc, curve: PrimeModulus) -> GtElement:
    g = GtElement._from_raw((_int(doc, "a"), _int(doc, "b")), curve)
    g.validate()
    return g


def params_to_doc(params: SystemParams) -> dict:
    m = params.modulus
    return {
        "p": int_to_hex(m.p),
        "q": int_to_hex(m.q),
        "h": int_to_hex(m.h),
        "n": params.n,
        "p0": point_to_doc(params.p0),
        "q0": point_to_doc(params.q0),
    }


def params_from_doc(doc) -> SystemParams:
    try:
        curve = PrimeModulus(_int(doc, "p"), _int(doc, "q"), _int(doc, "h"))
    except MalformedDocument:
        raise
    except ValidationError as exc:
        raise MalformedDocument(f"invalid group parameters: {exc}") from exc
    n = _field(doc, "n")
    if not isinstance(n, int):
        raise MalformedDocument("n must be an integer")
    try:
        return SystemParams(curve, point_from_doc(_field(doc, "p0"), curve), point_from_doc(_field(doc, "q0"), curve), n)
    except PointValidationError:
        raise
    except ValidationError as exc:
        raise MalformedDocument(str(exc)) from exc


def _attr_doc(a: AttributeId) -> dict:
    return {"name": a.name, "public_key": a.public_key.hex()}


def _attr_from(doc) -> AttributeId:
    return AttributeId(_field(doc, "name"), _bytes(_field(doc, "public_key")))


def structure_to_doc(s: AccessStructure) -> dict:
    return {
        "policy": s.text,
        "clauses": [
            {
                "domain": c.domain,
                "domain_path": [pk.hex() for pk in c.domain_path],
                "attributes": [_attr_doc(a) for a in c.attributes],
            }
            for c in s.clauses
        ],
    }


def structure_from_doc(doc) -> AccessStructure:
    clauses = []
    for c in _field(doc, "clauses"):
        clauses.append(
            ConjunctionClause(
                tuple(_attr_from(a) for a in _field(c, "attributes")),
                _field(c, "domain"),
                tuple(_bytes(pk) for pk in _field(c, "domain_path")),
            )
        )
    s = AccessStructure(tuple(clauses))
    # the embedded policy text must agree with the clause records
    if parse(_field(doc, "policy")).text != s.text:
        raise MalformedDocument("policy text does not match clause records")
    return s


# ---------------------------------------------------------------- dispatch


def to_document(obj) -> dict[str, Any]:
    doc: dict[str, Any] = {"version": VERSION}
    if isinstance(obj, SystemParams):
        doc.update(type="params", **params_to_doc(obj))
        return doc
    doc["params"] = params_to_doc(obj.params)
    if isinstance(obj, RootMasterKey):
        doc.update(type="root_master_key", mk0=int_to_hex(obj.mk0))
    elif isinstance(obj, DomainMasterKey):
        doc.update(
            type="domain_master_key",
            level=obj.level,
            public_key=obj.public_key.hex(),
            mk=int_to_hex(obj.mk),
            sk=point_to_doc(obj.sk),
            q_tuple=[point_to_doc(P) for P in obj.q_tuple],
            path=[pk.hex() for pk in obj.path],
        )
    elif isinstance(obj, UserIdentityKey):
        doc.update(
            type="user_identity_key",
            user_public_key=obj.user_public_key.hex(),
            domain_path=[pk.hex() for pk in obj.domain_path],
            q_tuple_prefix=[point_to_doc(P) for P in obj.q_tuple_prefix],
            masked_q=point_to_doc(obj.masked_q),
        )
    elif isinstance(obj, UserAttributeKey):
        doc.update(
            type="user_attribute_key",
            user_public_key=obj.user_public_key.hex(),
            domain_public_key=obj.domain_public_key.hex(),
            attribute=_attr_doc(obj.attribute),
            key=point_to_doc(obj.key),
        )
    elif isinstance(obj, Ciphertext):
        doc.update(
            type="ciphertext",
            structure=structure_to_doc(obj.structure),
            registry_digest=obj.registry_digest,
            v=obj.v.hex(),
            u0=point_to_doc(obj.u0),
            components=[
                {"path_components": [point_to_doc(P) for P in c.path_components], "u": point_to_doc(c.u)}
                for c in obj.components
            ],
        )
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return doc


def from_document(doc: dict[str, Any]):
    if not isinstance(doc, dict):
        raise MalformedDocument("document must be a JSON object")
    if doc.get("version") != VERSION:
        raise VersionMismatch(f"expected version {VERSION!r}, got {doc.get('version')!r}")
    kind = _field(doc, "type")
    try:
        if kind == "params":
            return params_from_doc(doc)
        params = params_from_doc(_field(doc, "params"))
        curve = params.modulus

        def pt(d):
            return point_from_doc(d, curve)

        if kind == "root_master_key":
            return RootMasterKey(params, _int(doc, "mk0"))
        if kind == "domain_master_key":
            return DomainMasterKey(
                params,
                _field(doc, "level"),
                _bytes(_field(doc, "public_key")),
                _int(doc, "mk"),
                pt(_field(doc, "sk")),
                tuple(pt(P) for P in _field(doc, "q_tuple")),
                tuple(_bytes(pk) for pk in _field(doc, "path")),
            )
        if kind == "user_identity_key":
            return UserIdentityKey(
                params,
                _bytes(_field(doc, "user_public_key")),
                tuple(_bytes(pk) for pk in _field(doc, "domain_path")),
                tuple(pt(P) for P in _field(doc, "q_tuple_prefix")),
                pt(_field(doc, "masked_q")),
            )
        if kind == "user_attribute_key":
            return UserAttributeKey(
                params,
                _bytes(_field(doc, "user_public_key")),
                _bytes(_field(doc, "domain_public_key")),
                _attr_from(_field(doc, "attribute")),
                pt(_field(doc, "key")),
            )
        if kind == "ciphertext":
            return Ciphertext(
                params,
                structure_from_doc(_field(doc, "structure")),
                _field(doc, "registry_digest"),
                _bytes(_field(doc, "v")),
                pt(_field(doc, "u0")),
                tuple(
                    ClauseComponents(tuple(pt(P) for P in _field(c, "path_components")), pt(_field(c, "u")))
                    for c in _field(doc, "components")
                ),
            )
    except (PointValidationError, MalformedDocument, VersionMismatch):
        raise
    except (ValidationError, TypeError, AttributeError) as exc:
        raise MalformedDocument(f"invalid {kind} document: {exc}") from exc
    raise MalformedDocument(f"unknown document type {kind!r}")


def dumps(obj) -> str:
    return json.dumps(to_document(obj), indent=2, sort_keys=True) + "\n"


def loads(text: str, expect: type | None = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from exc
    obj = from_document(doc)
    if expect is not None and not isinstance(obj, expect):
        raise MalformedDocument(f"expected a {expect.__name__}, got {type(obj).__name__}")
    return obj
