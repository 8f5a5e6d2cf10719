"""DNF access policies and the attribute/domain registry.

Policy grammar (whitespace is insignificant)::

    policy := clause ('|' clause)*
    clause := '(' attr ('&' attr)* ')' | attr
    attr   := [A-Za-z0-9_]+
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable

from .errors import (
    DuplicateAttribute,
    MalformedDocument,
    MultiDomainClause,
    PolicySyntaxError,
    RegistryError,
    UnknownAttribute,
    ValidationError,
    VersionMismatch,
)

VERSION = "habe-v1"
_NAME_RE = re.compile(r"[A-Za-z0-9_]+")


@dataclass(frozen=True)
class AttributeId:
    name: str
    public_key: bytes = b""

    def __post_init__(self):
        if not _NAME_RE.fullmatch(self.name):
            raise ValidationError(f"bad attribute name {self.name!r}")


@dataclass(frozen=True)
class ConjunctionClause:
    attributes: tuple[AttributeId, ...]
    domain: str | None = None
    # public keys from the first-level domain down to ``domain``
    domain_path: tuple[bytes, ...] = ()

    def __post_init__(self):
        if not self.attributes:
            raise ValidationError("empty clause")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise DuplicateAttribute(f"duplicate attribute in clause {names}")

    @property
    def names(self) -> frozenset[str]:
        return frozenset(a.name for a in self.attributes)

    @property
    def size(self) -> int:
        return len(self.attributes)

    def __str__(self) -> str:
        if len(self.attributes) == 1:
            return self.attributes[0].name
        return "(" + " & ".join(a.name for a in self.attributes) + ")"


@dataclass(frozen=True)
class AccessStructure:
    clauses: tuple[ConjunctionClause, ...]

    def __post_init__(self):
        if not self.clauses:
            raise ValidationError("access structure needs at least one clause")

    @property
    def n_a(self) -> int:
        return lcm_of([c.size for c in self.clauses])

    @property
    def text(self) -> str:
        return " | ".join(str(c) for c in self.clauses)

    def __str__(self) -> str:
        return self.text


def lcm_of(sizes: Iterable[int]) -> int:
    sizes = list(sizes)
    if not sizes:
        raise ValidationError("lcm of an empty list")
    if any(s < 1 for s in sizes):
        raise ValidationError("clause sizes must be positive")
    return reduce(lambda a, b: a * b // math.gcd(a, b), sizes, 1)


def satisfies(user_attrs: Iterable[AttributeId | str], structure: AccessStructure) -> int | None:
    """Index of the first clause covered by ``user_attrs``, else None."""
    held = {a if isinstance(a, str) else a.name for a in user_attrs}
    for i, clause in enumerate(structure.clauses):
        if clause.names <= held:
            return i
    return None


# ---------------------------------------------------------------- parser


_TOKEN_RE = re.compile(r"(?:(?P<name>[A-Za-z0-9_]+)|(?P<op>[()&|])|(?P<bad>\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m.group("bad") is not None:
            raise PolicySyntaxError(f"unexpected character {m.group('bad')!r}", m.start("bad"))
        if m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        elif m.group("op") is not None:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise PolicySyntaxError(f"expected {want!r}, got {got!r}", tok[2])
        self.i += 1
        return tok

    def policy(self) -> list[list[str]]:
        clauses = [self.clause()]
        while self.peek()[:2] == ("op", "|"):
            self.i += 1
            clauses.append(self.clause())
        self.take("end")
        return clauses

    def clause(self) -> list[str]:
        if self.peek()[:2] == ("op", "("):
            self.i += 1
            names = [self.take("name")[1]]
            while self.peek()[:2] == ("op", "&"):
                self.i += 1
                names.append(self.take("name")[1])
            self.take("op", ")")
            return names
        return [self.take("name")[1]]


def parse(policy_text: str, registry: Registry | None = None) -> AccessStructure:
    """Parse a DNF policy; with a registry, resolve attributes and clause domains."""
    raw = _Parser(policy_text).policy()
    clauses = []
    for names in raw:
        if registry is None:
            clauses.append(ConjunctionClause(tuple(AttributeId(n) for n in names)))
            continue
        attrs = tuple(registry.attribute(n) for n in names)
        domains = {registry.attribute_domain(n) for n in names}
        if len(domains) != 1:
            raise MultiDomainClause(f"clause {names} spans domains {sorted(domains)}")
        (domain,) = domains
        clauses.append(ConjunctionClause(attrs, domain, registry.domain_path(domain)))
    return AccessStructure(tuple(clauses))


# ---------------------------------------------------------------- registry


def _unhex_bytes(s) -> bytes:
    if not isinstance(s, str):
        raise MalformedDocument("expected a hex string")
    try:
        return bytes.fromhex(s)
    except ValueError as exc:
        raise MalformedDocument(f"bad hex {s!r}") from exc


@dataclass
class Registry:
    """Public directory: domains (tree under one first-level domain), attributes, authorizations.

    ``domains`` maps id -> (public key, parent id or None).
    ``attributes`` maps name -> (public key, domain id).
    ``authorizations`` maps user public key -> attribute names the user may request.
    """

    domains: dict[str, tuple[bytes, str | None]] = field(default_factory=dict)
    attributes: dict[str, tuple[bytes, str]] = field(default_factory=dict)
    authorizations: dict[bytes, set[str]] = field(default_factory=dict)

    def add_domain(self, domain_id: str, public_key: bytes, parent: str | None = None) -> None:
        if domain_id in self.domains:
            raise RegistryError(f"domain {domain_id!r} already registered")
        if parent is not None and parent not in self.domains:
            raise RegistryError(f"unknown parent domain {parent!r}")
        if parent is None and any(par is None for _, par in self.domains.values()):
            raise RegistryError("only one first-level domain is supported")
        if not public_key:
            raise RegistryError("domain public key must be non-empty")
        self.domains[domain_id] = (public_key, parent)

    def add_attribute(self, name: str, public_key: bytes, domain_id: str) -> AttributeId:
        if name in self.attributes:
            raise RegistryError(f"attribute {name!r} already registered")
        if domain_id not in self.domains:
            raise RegistryError(f"unknown domain {domain_id!r}")
        attr = AttributeId(name, public_key)
        self.attributes[name] = (public_key, domain_id)
        return attr

    def authorize(self, user_pk: bytes, name: str) -> None:
        if name not in self.attributes:
            raise UnknownAttribute(f"unknown attribute {name!r}")
        self.authorizations.setdefault(user_pk, set()).add(name)

    def is_authorized(self, user_pk: bytes, name: str) -> bool:
        return name in self.authorizations.get(user_pk, ())

    def attribute(self, name: str) -> AttributeId:
        try:
            return AttributeId(name, self.attributes[name][0])
        except KeyError:
            raise UnknownAttribute(f"unknown attribute {name!r}") from None

    def attribute_domain(self, name: str) -> str:
        try:
            return self.attributes[name][1]
        except KeyError:
            raise UnknownAttribute(f"unknown attribute {name!r}") from None

    def domain_attributes(self, domain_id: str) -> list[str]:
        return [n for n, (_, d) in self.attributes.items() if d == domain_id]

    def domain_public_key(self, domain_id: str) -> bytes:
        try:
            return self.domains[domain_id][0]
        except KeyError:
            raise RegistryError(f"unknown domain {domain_id!r}") from None

    def domain_by_key(self, public_key: bytes) -> str:
        for did, (pk, _) in self.domains.items():
            if pk == public_key:
                return did
        raise RegistryError("no domain with that public key")

    def domain_path(self, domain_id: str) -> tuple[bytes, ...]:
        path = []
        cur = domain_id
        while cur is not None:
            if cur not in self.domains:
                raise RegistryError(f"unknown domain {cur!r}")
            if len(path) > len(self.domains):
                raise RegistryError("cycle in domain tree")
            pk, cur = self.domains[cur]
            path.append(pk)
        return tuple(reversed(path))

    # ---- serialization

    def to_document(self) -> dict:
        return {
            "version": VERSION,
            "type": "registry",
            "domains": {
                d: {"public_key": pk.hex(), "parent": par} for d, (pk, par) in sorted(self.domains.items())
            },
            "attributes": {
                n: {"public_key": pk.hex(), "domain": d} for n, (pk, d) in sorted(self.attributes.items())
            },
            "authorizations": {u.hex(): sorted(names) for u, names in sorted(self.authorizations.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n"

    def digest(self) -> str:
        doc = self.to_document()
        doc.pop("authorizations")
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()

    @classmethod
    def from_document(cls, doc) -> Registry:
        if not isinstance(doc, dict):
            raise MalformedDocument("registry must be an object")
        if doc.get("version") != VERSION:
            raise VersionMismatch(f"expected version {VERSION}, got {doc.get('version')!r}")
        reg = cls()
        try:
            pending = dict(doc.get("domains", {}))
            # parents before children
            while pending:
                ready = [d for d, v in pending.items() if v.get("parent") is None or v["parent"] in reg.domains]
                if not ready:
                    raise RegistryError("domain tree has unknown parents or a cycle")
                for d in sorted(ready):
                    v = pending.pop(d)
                    reg.add_domain(d, _unhex_bytes(v["public_key"]), v.get("parent"))
            for n, v in doc.get("attributes", {}).items():
                reg.add_attribute(n, _unhex_bytes(v["public_key"]), v["domain"])
            for u, names in doc.get("authorizations", {}).items():
                for n in names:
                    reg.authorize(_unhex_bytes(u), n)
        except (KeyError, TypeError, AttributeError) as exc:
            raise MalformedDocument(f"malformed registry: {exc}") from exc
        return reg

    @classmethod
    def loads(cls, text: str) -> Registry:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"registry is not valid JSON: {exc}") from exc
        return cls.from_document(doc)

    def public_view(self) -> Registry:
        """Copy without the authorization table."""
        return Registry(dict(self.domains), dict(self.attributes), {})
