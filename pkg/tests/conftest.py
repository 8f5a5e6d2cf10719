import random

import pytest

from cphabe.game import random_hierarchy
from cphabe.pairing import TOY, derive_generator, preset_modulus
from cphabe.scheme import setup_on_group

CRITERIA = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(CRITERIA):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")


@pytest.fixture(scope="session")
def toy():
    return TOY


@pytest.fixture(scope="session")
def toy_params():
    return derive_generator(TOY, b"toy-tests")


@pytest.fixture(scope="session")
def small():
    return preset_modulus("small")


@pytest.fixture(scope="session")
def small_system():
    return setup_on_group(preset_modulus("small"), 256, b"tests")


def make_hierarchy(seed: int, max_depth=3, max_branching=2):
    """Fresh params, root key and random hierarchy for one trial."""
    tag = seed.to_bytes(4, "big")
    params, root = setup_on_group(preset_modulus("small"), 256, b"h" + tag)
    rng = random.Random(seed)
    return params, root, random_hierarchy(params, root, rng, tag, max_depth, max_branching), rng


def issue(hier, user: bytes, names):
    """Authorize ``user`` for ``names`` (all in one domain) and issue the keys."""
    from cphabe.scheme import create_user

    reg = hier.registry
    ident, keys = None, []
    for name in names:
        reg.authorize(user, name)
        dm = hier.domain_keys[reg.attribute_domain(name)]
        ident, key = create_user(dm, user, name, reg)
        keys.append(key)
    return ident, keys


def random_policy(hier, rng, max_clauses=4, max_size=4, must_include=None):
    """Random DNF over the hierarchy; clause 0 lives in ``must_include`` domain if given."""
    reg = hier.registry
    domains = sorted(hier.domain_keys)
    clauses = []
    for i in range(rng.randint(1, max_clauses)):
        d = must_include if (i == 0 and must_include) else rng.choice(domains)
        attrs = reg.domain_attributes(d)
        clauses.append(rng.sample(attrs, rng.randint(1, min(max_size, len(attrs)))))
    return clauses


def render(clauses):
    return " | ".join("(" + " & ".join(c) + ")" for c in clauses)
