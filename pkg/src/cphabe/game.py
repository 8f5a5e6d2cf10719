"""Semantic-security game: Setup, Phase 1, Challenge, Phase 2, Guess.

The challenger builds a fresh system and a random domain hierarchy for
every trial. Adversaries only ever see JSON documents: the public
parameters, the public registry (domains, attributes, authorizations),
the keys they were issued and the challenge ciphertext.
"""

from __future__ import annotations

import copy
import hashlib
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import encoding
from .attacks import RecoveredDomainKey, attack1_recover, attack2_recover, theorem1_decrypt
from .errors import HabeError
from .hashing import TAG_TRIAL, counter, xof
from .oracles import h_a, h_dm
from .pairing import preset_modulus
from .policy import Registry, parse, satisfies
from .scheme import DomainMasterKey, UserAttributeKey, UserIdentityKey, create_dm, create_user, encrypt, setup_on_group


@dataclass
class IssuedKey:
    user: str  # user public key, hex
    attribute: str
    identity: str  # serialized UserIdentityKey
    key: str  # serialized UserAttributeKey


class AdversaryStrategy:
    """Base adversary. Subclasses override the hooks they need.

    ``white_box`` may be filled with the adversary's recovered key and the
    names it used, so the challenger can check them against ground truth
    after the trial. It is never read back by the adversary.
    """

    name = "base"

    def begin(self, rng: random.Random) -> None:
        self.rng = rng
        self.white_box: dict = {}

    def choose_queries(self, params_doc: str, registry_doc: str) -> list[tuple[str, str]]:
        return []

    def choose_challenge(self, issued: list[IssuedKey]) -> tuple[bytes, bytes, str]:
        raise NotImplementedError

    def phase2_queries(self, ct_doc: str) -> list[tuple[str, str]]:
        return []

    def guess(self, ct_doc: str) -> int:
        return self.rng.randrange(2)


def _random_messages(rng: random.Random, nbytes: int) -> tuple[bytes, bytes]:
    m0 = rng.randbytes(nbytes)
    m1 = rng.randbytes(nbytes)
    while m1 == m0:
        m1 = rng.randbytes(nbytes)
    return m0, m1


class _KeyRecoveryAdversary(AdversaryStrategy):
    """Shared Challenge and Guess logic for both attacks."""

    min_first_clause = 2

    def choose_queries(self, params_doc, registry_doc):
        self.params = encoding.loads(params_doc)
        self.registry = Registry.loads(registry_doc)
        return self._pick()

    def _pick(self) -> list[tuple[str, str]]:
        raise NotImplementedError

    def _policy(self, required: list[str]) -> str:
        rng = self.rng
        domain = self.registry.attribute_domain(required[0])
        pool = [a for a in self.registry.domain_attributes(domain) if a not in required]
        size = rng.randint(self.min_first_clause, len(required) + len(pool))
        first = required + rng.sample(pool, size - len(required))
        rng.shuffle(first)
        clauses = [first]
        for _ in range(rng.randint(0, 2)):
            d = rng.choice(sorted(self.registry.domains))
            attrs = self.registry.domain_attributes(d)
            clause = rng.sample(attrs, rng.randint(2, len(attrs)))
            # must not be covered by the queried attributes
            if not set(clause) <= set(required):
                clauses.append(clause)
        return " | ".join("(" + " & ".join(c) + ")" for c in clauses)

    def choose_challenge(self, issued):
        self.issued = issued
        m0, m1 = _random_messages(self.rng, self.params.message_bytes)
        self.messages = (m0, m1)
        return m0, m1, self._policy([k.attribute for k in issued])

    def _recover(self) -> RecoveredDomainKey:
        raise NotImplementedError

    def guess(self, ct_doc):
        ct = encoding.loads(ct_doc)
        recovered = self._recover()
        self.white_box["recovered"] = recovered
        m = theorem1_decrypt(ct, recovered)
        if m == self.messages[0]:
            return 0
        if m == self.messages[1]:
            return 1
        return self.rng.randrange(2)


class Attack1Adversary(_KeyRecoveryAdversary):
    """One attribute key a0 for one user u0; challenge clause CC_1 holds a0 and at least one more."""

    name = "attack1"
    min_first_clause = 2

    def _pick(self):
        reg = self.registry
        domain = self.rng.choice(sorted(reg.domains))
        a0 = self.rng.choice(reg.domain_attributes(domain))
        users = sorted(u for u, names in reg.authorizations.items() if a0 in names)
        u0 = self.rng.choice(users)
        self.white_box.update(user=u0.hex(), attributes=[a0])
        return [(u0.hex(), a0)]

    def _recover(self):
        k = self.issued[0]
        return attack1_recover(
            encoding.loads(k.identity, UserIdentityKey), encoding.loads(k.key, UserAttributeKey)
        )


class Attack2Adversary(_KeyRecoveryAdversary):
    """Two attribute keys a1, a2 of one domain for user u0; CC_1 has more than two attributes."""

    name = "attack2"
    min_first_clause = 3

    def _pick(self):
        reg = self.registry
        q = self.params.q
        candidates = []
        for u, names in sorted(reg.authorizations.items()):
            for d in sorted(reg.domains):
                dpk = reg.domain_public_key(d)
                mine = sorted(n for n in reg.domain_attributes(d) if n in names)
                if len(reg.domain_attributes(d)) < 3:
                    continue
                hs = {n: h_dm(dpk, reg.attribute(n).public_key, q) for n in mine}
                # h1 - h2 must be invertible mod q
                candidates += [(u, a1, a2) for a1 in mine for a2 in mine if a1 != a2 and hs[a1] != hs[a2]]
        u0, a1, a2 = self.rng.choice(candidates)
        self.white_box.update(user=u0.hex(), attributes=[a1, a2])
        return [(u0.hex(), a1), (u0.hex(), a2)]

    def _recover(self):
        k1, k2 = self.issued
        return attack2_recover(
            encoding.loads(k1.identity, UserIdentityKey),
            encoding.loads(k1.key, UserAttributeKey),
            encoding.loads(k2.key, UserAttributeKey),
        )


class RandomAdversary(AdversaryStrategy):
    """Queries nothing and guesses a uniform bit."""

    name = "random"

    def choose_queries(self, params_doc, registry_doc):
        self.params = encoding.loads(params_doc)
        self.registry = Registry.loads(registry_doc)
        return []

    def choose_challenge(self, issued):
        m0, m1 = _random_messages(self.rng, self.params.message_bytes)
        d = self.rng.choice(sorted(self.registry.domains))
        attrs = self.registry.domain_attributes(d)
        return m0, m1, "(" + " & ".join(self.rng.sample(attrs, 2)) + ")"


def attack1_adversary() -> AdversaryStrategy:
    return Attack1Adversary()


def attack2_adversary() -> AdversaryStrategy:
    return Attack2Adversary()


def random_adversary() -> AdversaryStrategy:
    return RandomAdversary()


ADVERSARIES = {"attack1": attack1_adversary, "attack2": attack2_adversary, "random": random_adversary}


# ---------------------------------------------------------------- challenger


@dataclass
class Hierarchy:
    registry: Registry
    domain_keys: dict[str, DomainMasterKey]
    users: list[bytes]


def random_hierarchy(
    params, root, rng: random.Random, tag: bytes, max_depth: int = 3, max_branching: int = 2
) -> Hierarchy:
    """Tree of depth 1..max_depth under DM_1, 3-5 attributes per domain, 3 users."""
    reg = Registry()
    keys: dict[str, DomainMasterKey] = {}
    depth = rng.randint(1, max_depth)

    def add(did: str, parent: str | None):
        pk = b"dm:" + did.encode() + b":" + tag
        reg.add_domain(did, pk, parent)
        keys[did] = create_dm(root if parent is None else keys[parent], pk, rng)

    add("D1", None)
    level = ["D1"]
    for _ in range(depth - 1):
        nxt = []
        for parent in level:
            for c in range(rng.randint(1, max_branching)):
                did = f"{parent}.{c + 1}"
                add(did, parent)
                nxt.append(did)
        level = nxt

    users = [b"user:" + bytes([k]) + tag for k in range(3)]
    serial = 0
    for did in keys:
        names = []
        for _ in range(rng.randint(3, 5)):
            name = f"attr{serial}"
            serial += 1
            reg.add_attribute(name, rng.randbytes(16), did)
            names.append(name)
        # one user holds every attribute of the domain, the rest a random subset
        owner = rng.choice(users)
        for name in names:
            for u in users:
                if u == owner or rng.random() < 0.5:
                    reg.authorize(u, name)
    return Hierarchy(reg, keys, users)


@dataclass
class GameResult:
    trials: int
    wins: int
    seed: bytes
    verdicts: list[dict] = field(default_factory=list)

    @property
    def win_rate(self) -> float:
        return self.wins / self.trials

    @property
    def digests(self) -> list[str]:
        return sorted(v["digest"] for v in self.verdicts)

    def to_document(self) -> dict:
        return {
            "trials": self.trials,
            "wins": self.wins,
            "win_rate": self.win_rate,
            "seed": self.seed.hex(),
            "verdicts": self.verdicts,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n"


def trial_seed(seed: bytes, index: int) -> bytes:
    return xof(TAG_TRIAL, (seed, counter(index)), 32)


def _white_box(adv: AdversaryStrategy, hier: Hierarchy, params) -> tuple[bool | None, bool | None]:
    rec = adv.white_box.get("recovered")
    if rec is None:
        return None, None
    dm = hier.domain_keys[hier.registry.domain_by_key(rec.domain_public_key)]
    key_ok = rec.sk == dm.sk and rec.q_tuple == dm.q_tuple
    c = rec.trace.get("C")
    if c is None:
        return key_ok, None
    q = params.q
    a1 = hier.registry.attribute(adv.white_box["attributes"][0])
    mk_u = h_a(bytes.fromhex(adv.white_box["user"]), q)
    expected = (mk_u * dm.mk % q) * h_dm(dm.public_key, a1.public_key, q) % q * params.p0
    return key_ok, c == expected


def play_trial(adversary: AdversaryStrategy, seed: bytes, index: int, preset: str = "small", n: int = 256) -> dict:
    ts = trial_seed(seed, index)
    crng = random.Random(ts + b"/challenger")
    adv = copy.deepcopy(adversary)
    adv.begin(random.Random(ts + b"/adversary"))

    # Setup
    params, root = setup_on_group(preset_modulus(preset), n, ts)
    hier = random_hierarchy(params, root, crng, ts[:8])
    reg = hier.registry
    verdict = {"index": index, "seed": ts.hex(), "status": "ok", "win": False, "phase1_queries": 0, "phase2_queries": 0}

    held: dict[bytes, set[str]] = {}
    issued: list[IssuedKey] = []
    refused = 0

    def answer(queries) -> None:
        nonlocal refused
        for user_hex, name in queries:
            user = bytes.fromhex(user_hex)
            try:
                dm = hier.domain_keys[reg.attribute_domain(name)]
                ident, key = create_user(dm, user, name, reg)
            except HabeError:
                refused += 1
                continue
            held.setdefault(user, set()).add(name)
            issued.append(IssuedKey(user_hex, name, encoding.dumps(ident), encoding.dumps(key)))

    def violates(structure) -> bool:
        return any(satisfies(attrs, structure) is not None for attrs in held.values())

    # Phase 1
    q1 = adv.choose_queries(encoding.dumps(params), reg.dumps())
    verdict["phase1_queries"] = len(q1)
    answer(q1)

    # Challenge
    m0, m1, policy = adv.choose_challenge(list(issued))
    try:
        structure = parse(policy, reg)
    except HabeError as exc:
        return {**verdict, "status": f"rule-break: bad policy ({exc.code})", "digest": ""}
    if len(m0) != params.message_bytes or len(m1) != params.message_bytes or m0 == m1:
        return {**verdict, "status": "rule-break: messages", "digest": ""}
    if violates(structure):
        return {**verdict, "status": "rule-break: queried keys satisfy the challenge policy", "digest": ""}
    b = crng.randrange(2)
    ct = encrypt(params, (m0, m1)[b], structure, reg, crng)
    ct_doc = encoding.dumps(ct)
    verdict["digest"] = hashlib.sha256(ct_doc.encode()).hexdigest()
    verdict["policy"] = structure.text

    # Phase 2
    q2 = adv.phase2_queries(ct_doc)
    verdict["phase2_queries"] = len(q2)
    answer(q2)
    if violates(structure):
        return {**verdict, "status": "rule-break: queried keys satisfy the challenge policy"}

    # Guess
    try:
        guess = adv.guess(ct_doc)
    except HabeError as exc:
        return {**verdict, "status": f"adversary error ({exc.code})"}
    key_ok, c_ok = _white_box(adv, hier, params)
    verdict.update(b=b, guess=guess, win=guess == b, refused=refused, recovered_matches=key_ok, intermediate_matches=c_ok)
    return verdict


def _play(args):
    return play_trial(*args)


def run_game(
    adversary: AdversaryStrategy,
    trials: int,
    seed: bytes,
    preset: str = "small",
    n: int = 256,
    workers: int = 1,
) -> GameResult:
    """Play ``trials`` independent games; each trial gets a fresh copy of ``adversary``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    jobs = [(adversary, seed, i, preset, n) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            verdicts = list(pool.map(_play, jobs))
    else:
        verdicts = [_play(j) for j in jobs]
    wins = sum(1 for v in verdicts if v["win"])
    return GameResult(trials, wins, seed, verdicts)
