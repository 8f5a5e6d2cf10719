"""SHAKE-256 with length-prefixed, tagged field framing.

Each field is encoded as ``tag (1 byte) || len (4 bytes, big-endian) || bytes``
and the encodings are concatenated, so distinct tags or field splits can
never produce the same XOF input.
"""

from __future__ import annotations

import hashlib
from typing import Iterable

TAG_H1 = 0x01
TAG_H2 = 0x02
TAG_HA = 0x03
TAG_HDM = 0x04
TAG_P0 = 0x05
TAG_PARAMS = 0x06
TAG_SCALAR = 0x07
TAG_TRIAL = 0x08

XOF_NAME = "shake_256"


def frame(tag: int, fields: Iterable[bytes]) -> bytes:
    prefix = bytes([tag])
    out = bytearray()
    for f in fields:
        out += prefix
        out += len(f).to_bytes(4, "big")
        out += f
    return bytes(out)


def xof(tag: int, fields: Iterable[bytes], nbytes: int) -> bytes:
    return hashlib.shake_256(frame(tag, fields)).digest(nbytes)


def xof_int(tag: int, fields: Iterable[bytes], nbytes: int) -> int:
    return int.from_bytes(xof(tag, fields, nbytes), "big")


def counter(c: int) -> bytes:
    return c.to_bytes(4, "big")
