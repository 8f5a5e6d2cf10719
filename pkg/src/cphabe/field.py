"""Arithmetic in F_p and F_p^2 = F_p[i]/(i^2 + 1).

Values are plain canonical residues. The ``fp2_*_raw`` helpers work on
``(a, b)`` int pairs and are what the pairing kernels call; the element
classes wrap them for the public API.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import ModulusMismatch, NotInvertible, ParameterError, ValidationError

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)
# the first 13 primes are a deterministic witness set below this bound
_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981


@lru_cache(maxsize=4096)
def is_probable_prime(n: int, rounds: int = 64) -> bool:
    """Miller-Rabin; deterministic below ~3.3e24, else ``rounds`` seeded witnesses."""
    if n < 2:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _DETERMINISTIC_BOUND:
        witnesses = _SMALL_PRIMES[:13]
    else:
        # seeded by n so the verdict is reproducible
        rng = random.Random(n)
        witnesses = [rng.randrange(2, n - 1) for _ in range(rounds)]
    for a in witnesses:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """Group parameters: base field prime p, subgroup order q, cofactor h = (p+1)/q."""

    p: int
    q: int
    h: int

    def __post_init__(self):
        if self.h * self.q != self.p + 1:
            raise ParameterError("h*q must equal p+1")
        if self.p % 4 != 3:
            raise ParameterError("p must be 3 mod 4")
        if not is_probable_prime(self.p):
            raise ParameterError("p is not prime")
        if not is_probable_prime(self.q):
            raise ParameterError("q is not prime")

    @property
    def byte_length(self) -> int:
        return (self.p.bit_length() + 7) // 8


# ---------------------------------------------------------------- F_p


@dataclass(frozen=True)
class FpElement:
    value: int
    p: int

    def __post_init__(self):
        if not 0 <= self.value < self.p:
            object.__setattr__(self, "value", self.value % self.p)

    def _check(self, other: FpElement) -> None:
        if self.p != other.p:
            raise ModulusMismatch(f"modulus {self.p} vs {other.p}")

    def __add__(self, other: FpElement) -> FpElement:
        return fp_add(self, other)

    def __sub__(self, other: FpElement) -> FpElement:
        return fp_sub(self, other)

    def __mul__(self, other: FpElement) -> FpElement:
        return fp_mul(self, other)

    def __neg__(self) -> FpElement:
        return fp_neg(self)

    def __pow__(self, e: int) -> FpElement:
        return fp_pow(self, e)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FpElement({self.value} mod {self.p})"


def fp_add(x: FpElement, y: FpElement) -> FpElement:
    x._check(y)
    return FpElement((x.value + y.value) % x.p, x.p)


def fp_sub(x: FpElement, y: FpElement) -> FpElement:
    x._check(y)
    return FpElement((x.value - y.value) % x.p, x.p)


def fp_mul(x: FpElement, y: FpElement) -> FpElement:
    x._check(y)
    return FpElement(x.value * y.value % x.p, x.p)


def fp_neg(x: FpElement) -> FpElement:
    return FpElement(-x.value % x.p, x.p)


def inv_mod(x: int, m: int) -> int:
    if x % m == 0:
        raise NotInvertible(f"{x} has no inverse mod {m}")
    return pow(x, -1, m)


def fp_inv(x: FpElement) -> FpElement:
    return FpElement(inv_mod(x.value, x.p), x.p)


def fp_pow(x: FpElement, e: int) -> FpElement:
    if e < 0:
        raise ValidationError("exponent must be non-negative")
    return FpElement(pow(x.value, e, x.p), x.p)


def sqrt_mod(x: int, p: int) -> int | None:
    """Square root for p = 3 mod 4, smaller root of the pair, None for non-residues."""
    x %= p
    if x == 0:
        return 0
    r = pow(x, (p + 1) // 4, p)
    if r * r % p != x:
        return None
    return min(r, p - r)


def fp_sqrt(x: FpElement) -> FpElement | None:
    r = sqrt_mod(x.value, x.p)
    return None if r is None else FpElement(r, x.p)


# ---------------------------------------------------------------- F_p^2 kernels


def fp2_mul_raw(x: tuple[int, int], y: tuple[int, int], p: int) -> tuple[int, int]:
    a, b = x
    c, d = y
    ac = a * c
    bd = b * d
    # Karatsuba: (a+b)(c+d) - ac - bd = ad + bc
    return (ac - bd) % p, ((a + b) * (c + d) - ac - bd) % p


def fp2_sqr_raw(x: tuple[int, int], p: int) -> tuple[int, int]:
    a, b = x
    return (a + b) * (a - b) % p, 2 * a * b % p


def fp2_inv_raw(x: tuple[int, int], p: int) -> tuple[int, int]:
    a, b = x
    norm = (a * a + b * b) % p
    if norm == 0:
        raise NotInvertible("zero has no inverse in F_p^2")
    t = pow(norm, -1, p)
    return a * t % p, -b * t % p


def fp2_pow_raw(x: tuple[int, int], e: int, p: int) -> tuple[int, int]:
    result = (1, 0)
    for bit in bin(e)[2:]:
        result = fp2_sqr_raw(result, p)
        if bit == "1":
            result = fp2_mul_raw(result, x, p)
    return result


# ---------------------------------------------------------------- F_p^2


@dataclass(frozen=True)
class Fp2Element:
    """a + b*i with i^2 = -1."""

    a: FpElement
    b: FpElement

    def __post_init__(self):
        if self.a.p != self.b.p:
            raise ModulusMismatch("components live in different fields")

    @classmethod
    def from_ints(cls, a: int, b: int, p: int) -> Fp2Element:
        return cls(FpElement(a % p, p), FpElement(b % p, p))

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def raw(self) -> tuple[int, int]:
        return self.a.value, self.b.value

    def __add__(self, other: Fp2Element) -> Fp2Element:
        return fp2_add(self, other)

    def __sub__(self, other: Fp2Element) -> Fp2Element:
        return fp2_sub(self, other)

    def __mul__(self, other: Fp2Element) -> Fp2Element:
        return fp2_mul(self, other)

    def __neg__(self) -> Fp2Element:
        return Fp2Element(-self.a, -self.b)

    def __pow__(self, e: int) -> Fp2Element:
        return fp2_pow(self, e)

    def is_zero(self) -> bool:
        return self.a.value == 0 and self.b.value == 0

    def __repr__(self) -> str:
        return f"Fp2Element({self.a.value} + {self.b.value}i mod {self.p})"


def _check2(x: Fp2Element, y: Fp2Element) -> int:
    if x.p != y.p:
        raise ModulusMismatch(f"modulus {x.p} vs {y.p}")
    return x.p


def fp2_add(x: Fp2Element, y: Fp2Element) -> Fp2Element:
    _check2(x, y)
    return Fp2Element(x.a + y.a, x.b + y.b)


def fp2_sub(x: Fp2Element, y: Fp2Element) -> Fp2Element:
    _check2(x, y)
    return Fp2Element(x.a - y.a, x.b - y.b)


def fp2_mul(x: Fp2Element, y: Fp2Element) -> Fp2Element:
    p = _check2(x, y)
    return Fp2Element.from_ints(*fp2_mul_raw(x.raw, y.raw, p), p)


def fp2_inv(x: Fp2Element) -> Fp2Element:
    return Fp2Element.from_ints(*fp2_inv_raw(x.raw, x.p), x.p)


def fp2_pow(x: Fp2Element, e: int) -> Fp2Element:
    if e < 0:
        raise ValidationError("exponent must be non-negative")
    return Fp2Element.from_ints(*fp2_pow_raw(x.raw, e, x.p), x.p)


def fp2_conj(x: Fp2Element) -> Fp2Element:
    return Fp2Element(x.a, -x.b)


# ---------------------------------------------------------------- hex


_HEX_RE = re.compile(r"0|[1-9a-f][0-9a-f]*")


def int_to_hex(n: int) -> str:
    if n < 0:
        raise ValidationError("negative integers have no hex encoding")
    return format(n, "x")


def hex_to_int(s: str) -> int:
    if not isinstance(s, str) or not _HEX_RE.fullmatch(s):
        raise ValidationError(f"not a canonical lowercase hex integer: {s!r}")
    return int(s, 16)
