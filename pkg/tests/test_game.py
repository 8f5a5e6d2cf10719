from cphabe.game import (
    ADVERSARIES,
    AdversaryStrategy,
    RandomAdversary,
    attack1_adversary,
    attack2_adversary,
    play_trial,
    run_game,
)
from cphabe.policy import Registry, parse


class Cheater(AdversaryStrategy):
    """Asks for every key of a clause and then challenges on that clause."""

    name = "cheater"
    late = False

    def choose_queries(self, params_doc, registry_doc):
        self.registry = Registry.loads(registry_doc)
        self.nbytes = 32
        user, names = sorted(self.registry.authorizations.items())[0]
        first = sorted(names)[0]
        domain = self.registry.attribute_domain(first)
        self.names = sorted(n for n in names if self.registry.attribute_domain(n) == domain)[:2]
        self.user = user.hex()
        return [] if self.late else [(self.user, n) for n in self.names]

    def choose_challenge(self, issued):
        return bytes(32), b"\x01" * 32, "(" + " & ".join(self.names) + ")"

    def phase2_queries(self, ct_doc):
        return [(self.user, n) for n in self.names] if self.late else []

    def guess(self, ct_doc):
        return 0


class LateCheater(Cheater):
    late = True


class SameMessages(RandomAdversary):
    def choose_challenge(self, issued):
        _, _, policy = super().choose_challenge(issued)
        return bytes(32), bytes(32), policy


def test_cheater_always_caught():
    for adv in (Cheater(), LateCheater()):
        res = run_game(adv, 10, b"cheat")
        assert res.wins == 0
        assert all(v["status"] == "rule-break: queried keys satisfy the challenge policy" for v in res.verdicts)


def test_equal_messages_rejected():
    res = run_game(SameMessages(), 5, b"same")
    assert res.wins == 0
    assert all(v["status"] == "rule-break: messages" for v in res.verdicts)


def test_runs_are_deterministic():
    a = run_game(attack1_adversary(), 4, b"det")
    b = run_game(attack1_adversary(), 4, b"det")
    assert a.dumps() == b.dumps()
    assert run_game(attack1_adversary(), 4, b"other").digests != a.digests


def test_attack_adversaries_never_use_phase_two():
    for name in ("attack1", "attack2"):
        res = run_game(ADVERSARIES[name](), 10, b"p2-" + name.encode())
        assert all(v["phase2_queries"] == 0 for v in res.verdicts)
        assert all(v["status"] == "ok" for v in res.verdicts)
        assert res.win_rate == 1.0


def test_challenge_policy_shapes():
    for make, queries, min_size in ((attack1_adversary, 1, 2), (attack2_adversary, 2, 3)):
        for i in range(10):
            v = play_trial(make(), b"shape", i)
            assert v["phase1_queries"] == queries and v["refused"] == 0
            first = parse(v["policy"]).clauses[0]
            assert first.size >= min_size
            assert v["recovered_matches"] is True


def test_attack2_checks_intermediate():
    v = play_trial(attack2_adversary(), b"c-check", 0)
    assert v["intermediate_matches"] is True
    assert play_trial(attack1_adversary(), b"c-check", 0)["intermediate_matches"] is None


def test_random_adversary_roughly_even():
    res = run_game(RandomAdversary(), 60, b"coin")
    assert 0.2 < res.win_rate < 0.8
    assert all(v["recovered_matches"] is None for v in res.verdicts)
