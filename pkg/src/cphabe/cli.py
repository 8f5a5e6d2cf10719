"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation/parse error,
3 cryptographic contract violation (e.g. not authorized).
"""

from __future__ import annotations

import argparse
import json
import random
import secrets
import sys
from pathlib import Path

from . import encoding
from .attacks import attack1_recover, attack2_recover, theorem1_decrypt, transcript
from .errors import ContractError, HabeError, ValidationError
from .game import ADVERSARIES, run_game
from .pairing import PRESETS
from .policy import Registry
from .scheme import (
    Ciphertext,
    DomainMasterKey,
    RootMasterKey,
    SystemParams,
    UserAttributeKey,
    UserIdentityKey,
    create_dm,
    create_user,
    decrypt,
    encrypt,
    setup_preset,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _hex_bytes(s: str) -> bytes:
    try:
        return bytes.fromhex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex string: {s!r}") from None


def _rng(seed: str | None, *context: bytes):
    if seed is None:
        return secrets.SystemRandom()
    return random.Random(b"/".join((seed.encode(),) + context))


def _read(path: str, expect=None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    return encoding.loads(text, expect)


def _read_registry(path: str) -> Registry:
    p = Path(path)
    if not p.exists():
        return Registry()
    return Registry.loads(p.read_text())


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _emit(args, doc: dict, human: list[str]) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print("\n".join(human))


# ---------------------------------------------------------------- commands


def cmd_setup(args):
    params, root = setup_preset(args.preset, args.n, args.seed.encode())
    out = Path(args.out)
    _write(out / "params.habe", encoding.dumps(params))
    _write(out / "rootmk.habe", encoding.dumps(root))
    _emit(args, {"params": str(out / "params.habe"), "root": str(out / "rootmk.habe")},
          [f"wrote {out / 'params.habe'}", f"wrote {out / 'rootmk.habe'}"])


def cmd_create_dm(args):
    parent = _read(args.parent, (RootMasterKey, DomainMasterKey))
    dm = create_dm(parent, args.pk, _rng(args.seed, b"create-dm", args.pk))
    _write(Path(args.out), encoding.dumps(dm))
    _emit(args, {"domain_master_key": args.out, "level": dm.level}, [f"wrote {args.out} (level {dm.level})"])


def cmd_create_user(args):
    dm = _read(args.dm, DomainMasterKey)
    reg = Registry.loads(Path(args.registry).read_text())
    ident, key = create_user(dm, args.user_pk, args.attr, reg)
    domain = reg.domain_by_key(dm.public_key)
    out = Path(args.out)
    ident_path = out / f"user-{args.user_pk.hex()}-{domain}.habe"
    key_path = out / f"user-{args.user_pk.hex()}-{domain}-{args.attr}.habe"
    _write(ident_path, encoding.dumps(ident))
    _write(key_path, encoding.dumps(key))
    _emit(args, {"identity": str(ident_path), "attribute_key": str(key_path)},
          [f"wrote {ident_path}", f"wrote {key_path}"])


def cmd_encrypt(args):
    params = _read(args.params, SystemParams)
    reg = Registry.loads(Path(args.registry).read_text())
    try:
        msg = bytes.fromhex(args.msg_hex)
    except ValueError:
        raise ValidationError("message is not valid hex") from None
    if len(args.msg_hex) != params.n // 4:
        raise ValidationError(f"message must be exactly {params.n // 4} hex characters")
    ct = encrypt(params, msg, args.policy, reg, _rng(args.seed, b"encrypt", msg))
    _write(Path(args.out), encoding.dumps(ct))
    _emit(args, {"ciphertext": args.out, "policy": ct.structure.text}, [f"wrote {args.out}"])


def cmd_decrypt(args):
    ct = _read(args.ct, Ciphertext)
    ident = _read(args.identity, UserIdentityKey)
    keys = [_read(f, UserAttributeKey) for f in args.attr_keys]
    m = decrypt(ct, ident, keys)
    _emit(args, {"plaintext": m.hex()}, [m.hex()])


def _attack_report(args, name, recovered, consumed):
    ct = _read(args.ct, Ciphertext)
    m = theorem1_decrypt(ct, recovered)
    doc = transcript(name, recovered, m, consumed + [args.ct], args.expect_hex)
    human = [f"{name}: inputs {', '.join(doc['inputs_consumed'])}"]
    human += [f"  {k} = {v}" for k, v in doc["intermediates"].items()]
    human += [
        f"  recovered key digest {doc['recovered_key_digest']}",
        f"  plaintext match: {doc['plaintext_match']}",
        m.hex(),
    ]
    _emit(args, doc, human)


def cmd_attack1(args):
    ident = _read(args.identity, UserIdentityKey)
    key = _read(args.attr_key, UserAttributeKey)
    _attack_report(args, "attack1", attack1_recover(ident, key), [args.identity, args.attr_key])


def cmd_attack2(args):
    ident = _read(args.identity, UserIdentityKey)
    k1 = _read(args.attr_key1, UserAttributeKey)
    k2 = _read(args.attr_key2, UserAttributeKey)
    _attack_report(args, "attack2", attack2_recover(ident, k1, k2), [args.identity, args.attr_key1, args.attr_key2])


def cmd_game(args):
    result = run_game(ADVERSARIES[args.adversary](), args.trials, args.seed.encode(), args.preset, workers=args.workers)
    doc = result.to_document()
    if args.json:
        print(result.dumps(), end="")
        return
    statuses = sorted({v["status"] for v in result.verdicts})
    print(f"adversary: {args.adversary}")
    print(f"trials: {result.trials}")
    print(f"wins: {result.wins}")
    print(f"win_rate: {doc['win_rate']}")
    print(f"statuses: {', '.join(statuses)}")


def cmd_registry(args):
    needed = {"add-domain": ("id", "pk"), "add-attr": ("name", "pk", "domain"), "authorize": ("user_pk", "attr")}
    missing = [f"--{a.replace('_', '-')}" for a in needed[args.action] if getattr(args, a) is None]
    if missing:
        raise UsageError(f"registry {args.action} needs {', '.join(missing)}")
    reg = _read_registry(args.registry)
    if args.action == "add-domain":
        reg.add_domain(args.id, args.pk, args.parent)
    elif args.action == "add-attr":
        reg.add_attribute(args.name, args.pk, args.domain)
    elif args.action == "authorize":
        reg.authorize(args.user_pk, args.attr)
    _write(Path(args.registry), reg.dumps())
    if args.json:
        print(reg.dumps(), end="")


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = _Parser(prog="cphabe", description="CP-HABE scheme, key-recovery attacks and security game")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("setup", parents=[common], help="generate params.habe and rootmk.habe")
    p.add_argument("--preset", choices=PRESETS, default="small")
    p.add_argument("--seed", required=True)
    p.add_argument("--n", type=int, default=256, help="message length in bits")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("create-dm", parents=[common], help="create a child domain master key")
    p.add_argument("--parent", required=True)
    p.add_argument("--pk", required=True, type=_hex_bytes)
    p.add_argument("--out", required=True)
    p.add_argument("--seed")
    p.set_defaults(func=cmd_create_dm)

    p = sub.add_parser("create-user", parents=[common], help="issue identity and attribute keys")
    p.add_argument("--dm", required=True)
    p.add_argument("--user-pk", required=True, type=_hex_bytes)
    p.add_argument("--attr", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_create_user)

    p = sub.add_parser("encrypt", parents=[common])
    p.add_argument("--params", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--msg-hex", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", parents=[common])
    p.add_argument("--ct", required=True)
    p.add_argument("--identity", required=True)
    p.add_argument("--attr-keys", required=True, nargs="+")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("attack1", parents=[common], help="recover SK from one attribute key and decrypt")
    p.add_argument("--identity", required=True)
    p.add_argument("--attr-key", required=True)
    p.add_argument("--ct", required=True)
    p.add_argument("--expect-hex", type=_hex_bytes)
    p.set_defaults(func=cmd_attack1)

    p = sub.add_parser("attack2", parents=[common], help="recover SK from two attribute keys and decrypt")
    p.add_argument("--identity", required=True)
    p.add_argument("--attr-key1", required=True)
    p.add_argument("--attr-key2", required=True)
    p.add_argument("--ct", required=True)
    p.add_argument("--expect-hex", type=_hex_bytes)
    p.set_defaults(func=cmd_attack2)

    p = sub.add_parser("game", parents=[common], help="run the semantic-security game")
    p.add_argument("--adversary", choices=sorted(ADVERSARIES), required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", required=True)
    p.add_argument("--preset", choices=PRESETS, default="small")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("registry", parents=[common], help="edit a registry file")
    p.add_argument("action", choices=["add-domain", "add-attr", "authorize"])
    p.add_argument("--registry", required=True)
    p.add_argument("--id")
    p.add_argument("--pk", type=_hex_bytes)
    p.add_argument("--parent")
    p.add_argument("--name")
    p.add_argument("--domain")
    p.add_argument("--user-pk", type=_hex_bytes)
    p.add_argument("--attr")
    p.set_defaults(func=cmd_registry)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "game" and args.trials < 1:
        print("cphabe: error: --trials must be at least 1", file=sys.stderr)
        return 1
    try:
        args.func(args)
    except UsageError as exc:
        print(f"cphabe: error: {exc}", file=sys.stderr)
        return 1
    except ContractError as exc:
        print(f"cphabe: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"cphabe: [{exc.code}] {exc}", file=sys.stderr)
        return 2
    except HabeError as exc:
        print(f"cphabe: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cphabe: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
