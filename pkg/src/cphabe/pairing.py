"""Symmetric pairing on the supersingular curve y^2 = x^3 + x over F_p.

With p = 3 mod 4 the curve has p + 1 points and embedding degree 2. The
pairing is the reduced Tate pairing e(P, phi(Q)) with the distortion map
phi(x, y) = (-x, i*y), so it is symmetric and non-degenerate on the single
cyclic subgroup G1 of order q.

Points are affine; scalar multiplication and the Miller loop run in
Jacobian coordinates internally. The ``_*_raw`` kernels take ``(x, y)`` int
tuples with ``None`` standing for the point at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ParameterError, PointValidationError, ValidationError
from .field import (
    Fp2Element,
    PrimeModulus,
    fp2_inv_raw,
    fp2_mul_raw,
    fp2_pow_raw,
    fp2_sqr_raw,
    is_probable_prime,
    sqrt_mod,
)
from .hashing import TAG_H1, TAG_P0, TAG_PARAMS, counter, xof_int


MAX_HASH_ATTEMPTS = 256
MAX_COFACTOR_CANDIDATES = 10**6


# ---------------------------------------------------------------- kernels


def _on_curve(x: int, y: int, p: int) -> bool:
    return (y * y - x * x * x - x) % p == 0


def _add_raw(P, Q, p: int):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + 1) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _double_raw(P, p: int):
    if P is None:
        return None
    x1, y1 = P
    if y1 == 0:
        return None
    lam = (3 * x1 * x1 + 1) * pow(2 * y1, -1, p) % p
    x3 = (lam * lam - 2 * x1) % p
    return x3, (lam * (x1 - x3) - y1) % p


def _jdouble(X: int, Y: int, Z: int, p: int):
    # Jacobian doubling for a = 1; caller handles Y == 0
    YY = Y * Y % p
    S = 4 * X * YY % p
    ZZ = Z * Z % p
    M = (3 * X * X + ZZ * ZZ) % p
    X3 = (M * M - 2 * S) % p
    return X3, (M * (S - X3) - 8 * YY * YY) % p, 2 * Y * Z % p


def _to_affine(X: int, Y: int, Z: int, p: int):
    zi = pow(Z, -1, p)
    zi2 = zi * zi % p
    return X * zi2 % p, Y * zi2 * zi % p


def _mul_raw(k: int, P, p: int):
    """Left-to-right double-and-add in Jacobian coordinates; ``k`` must be non-negative."""
    if k == 0 or P is None:
        return None
    x2, y2 = P
    X, Y, Z = x2, y2, 1
    inf = False
    for bit in bin(k)[3:]:
        if not inf:
            if Y == 0:
                inf = True
            else:
                X, Y, Z = _jdouble(X, Y, Z, p)
        if bit == "1":
            if inf:
                X, Y, Z, inf = x2, y2, 1, False
                continue
            ZZ = Z * Z % p
            H = (x2 * ZZ - X) % p
            R = (y2 * ZZ * Z - Y) % p
            if H == 0:
                if R == 0:
                    X, Y, Z = _jdouble(X, Y, Z, p)
                else:
                    inf = True
                continue
            HH = H * H % p
            HHH = H * HH % p
            V = X * HH % p
            X3 = (R * R - HHH - 2 * V) % p
            Y = (R * (V - X3) - Y * HHH) % p
            X = X3
            Z = Z * H % p
    if inf:
        return None
    return _to_affine(X, Y, Z, p)


def _miller_raw(P, Q, q: int, p: int) -> tuple[int, int]:
    """Miller function f_{q,P} evaluated at phi(Q) = (-xQ, i*yQ).

    T is kept in Jacobian coordinates. Line values are scaled by nonzero
    F_p factors and vertical lines (which land in F_p at phi(Q)) are
    dropped; the final exponentiation erases both.
    """
    xP, yP = P
    xQ, yQ = Q
    f = (1, 0)
    X, Y, Z = xP, yP, 1
    inf = False
    for bit in bin(q)[3:]:
        f = fp2_sqr_raw(f, p)
        if not inf:
            if Y == 0:
                inf = True
            else:
                ZZ = Z * Z % p
                M = (3 * X * X + ZZ * ZZ) % p
                # tangent at T, times 2*Y*Z^3
                line = ((M * (xQ * ZZ + X) - 2 * Y * Y) % p, yQ * 2 * Y * ZZ * Z % p)
                f = fp2_mul_raw(f, line, p)
                X, Y, Z = _jdouble(X, Y, Z, p)
        if bit == "1":
            if inf:
                X, Y, Z, inf = xP, yP, 1, False
                continue
            ZZ = Z * Z % p
            H = (xP * ZZ - X) % p
            R = (yP * ZZ * Z - Y) % p
            if H == 0:
                if R != 0:
                    inf = True
                    continue
                # T == P: tangent line
                M = (3 * X * X + ZZ * ZZ) % p
                line = ((M * (xQ * ZZ + X) - 2 * Y * Y) % p, yQ * 2 * Y * ZZ * Z % p)
                f = fp2_mul_raw(f, line, p)
                X, Y, Z = _jdouble(X, Y, Z, p)
                continue
            ZH = Z * H % p
            # chord through T and P, times Z*H
            line = ((R * (xQ + xP) - yP * ZH) % p, yQ * ZH % p)
            f = fp2_mul_raw(f, line, p)
            HH = H * H % p
            HHH = H * HH % p
            V = X * HH % p
            X3 = (R * R - HHH - 2 * V) % p
            Y = (R * (V - X3) - Y * HHH) % p
            X = X3
            Z = ZH
    return f


def _final_exp_raw(f: tuple[int, int], m: PrimeModulus) -> tuple[int, int]:
    p = m.p
    # f^(p-1) = conj(f) / f, then the remaining (p+1)/q = h
    g = fp2_mul_raw((f[0], -f[1] % p), fp2_inv_raw(f, p), p)
    return fp2_pow_raw(g, m.h, p)


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class G1Point:
    """Affine point on y^2 = x^3 + x. Construction validates the curve equation."""

    x: int
    y: int
    infinity: bool
    curve: PrimeModulus = field(repr=False)

    def __post_init__(self):
        if self.infinity:
            if self.x or self.y:
                object.__setattr__(self, "x", 0)
                object.__setattr__(self, "y", 0)
            return
        p = self.curve.p
        if not (0 <= self.x < p and 0 <= self.y < p):
            raise PointValidationError("coordinate out of range")
        if not _on_curve(self.x, self.y, p):
            raise PointValidationError(f"({self.x}, {self.y}) is not on the curve")

    @classmethod
    def at_infinity(cls, curve: PrimeModulus) -> G1Point:
        return cls(0, 0, True, curve)

    @classmethod
    def _from_raw(cls, raw, curve: PrimeModulus) -> G1Point:
        if raw is None:
            return cls(0, 0, True, curve)
        return cls(raw[0], raw[1], False, curve)

    @property
    def raw(self):
        return None if self.infinity else (self.x, self.y)

    def in_subgroup(self) -> bool:
        return self.infinity or _subgroup_check(self.x, self.y, self.curve)

    def __add__(self, other: G1Point) -> G1Point:
        return point_add(self, other)

    def __sub__(self, other: G1Point) -> G1Point:
        return point_add(self, point_neg(other))

    def __neg__(self) -> G1Point:
        return point_neg(self)

    def __rmul__(self, k: int) -> G1Point:
        return scalar_mul(k, self)

    def __repr__(self) -> str:
        if self.infinity:
            return "G1Point(infinity)"
        return f"G1Point({self.x:#x}, {self.y:#x})"


@lru_cache(maxsize=8192)
def _subgroup_check(x: int, y: int, curve: PrimeModulus) -> bool:
    return _mul_raw(curve.q, (x, y), curve.p) is None


@dataclass(frozen=True)
class GtElement:
    """Element of the order-q subgroup of F_p^2^*."""

    value: Fp2Element
    q: int

    @classmethod
    def one(cls, curve: PrimeModulus) -> GtElement:
        return cls(Fp2Element.from_ints(1, 0, curve.p), curve.q)

    @classmethod
    def _from_raw(cls, raw, curve: PrimeModulus) -> GtElement:
        return cls(Fp2Element.from_ints(raw[0], raw[1], curve.p), curve.q)

    @property
    def p(self) -> int:
        return self.value.p

    def validate(self) -> None:
        if self.value.is_zero() or fp2_pow_raw(self.value.raw, self.q, self.p) != (1, 0):
            raise ValidationError("not an element of the order-q subgroup of F_p^2")

    def is_one(self) -> bool:
        return self.value.raw == (1, 0)

    def __mul__(self, other: GtElement) -> GtElement:
        return GtElement(self.value * other.value, self.q)

    def __truediv__(self, other: GtElement) -> GtElement:
        inv = fp2_inv_raw(other.value.raw, self.p)
        return GtElement(Fp2Element.from_ints(*fp2_mul_raw(self.value.raw, inv, self.p), self.p), self.q)

    def __pow__(self, e: int) -> GtElement:
        raw = fp2_pow_raw(self.value.raw, e % self.q, self.p)
        return GtElement(Fp2Element.from_ints(*raw, self.p), self.q)

    def __repr__(self) -> str:
        a, b = self.value.raw
        return f"GtElement({a:#x} + {b:#x}i)"


@dataclass(frozen=True)
class PairingParams:
    modulus: PrimeModulus
    p0: G1Point

    def __post_init__(self):
        if self.p0.infinity or not self.p0.in_subgroup():
            raise ParameterError("p0 must have order q")


# ---------------------------------------------------------------- group law


def _same_curve(P: G1Point, Q: G1Point) -> None:
    if P.curve != Q.curve:
        raise PointValidationError("points lie on different curves")


def point_add(P: G1Point, Q: G1Point) -> G1Point:
    _same_curve(P, Q)
    return G1Point._from_raw(_add_raw(P.raw, Q.raw, P.curve.p), P.curve)


def point_neg(P: G1Point) -> G1Point:
    if P.infinity:
        return P
    return G1Point(P.x, -P.y % P.curve.p, False, P.curve)


def scalar_mul(k: int, P: G1Point) -> G1Point:
    """k*P with k reduced modulo the full group order p + 1.

    For subgroup points this agrees with reduction mod q; using p + 1 keeps
    the result correct for every rational point, including cofactor multiples.
    """
    curve = P.curve
    return G1Point._from_raw(_mul_raw(k % (curve.p + 1), P.raw, curve.p), curve)


def distortion(P: G1Point) -> tuple[Fp2Element, Fp2Element] | None:
    """phi(x, y) = (-x, i*y); ``None`` is the point at infinity."""
    if P.infinity:
        return None
    p = P.curve.p
    return Fp2Element.from_ints(-P.x, 0, p), Fp2Element.from_ints(0, P.y, p)


def pairing(P: G1Point, Q: G1Point) -> GtElement:
    _same_curve(P, Q)
    curve = P.curve
    for R in (P, Q):
        if not R.in_subgroup():
            raise PointValidationError("pairing input is not in the order-q subgroup")
    if P.infinity or Q.infinity:
        return GtElement.one(curve)
    f = _miller_raw(P.raw, Q.raw, curve.q, curve.p)
    return GtElement._from_raw(_final_exp_raw(f, curve), curve)


# ---------------------------------------------------------------- hashing & params


def hash_to_g1(msg: bytes, curve: PrimeModulus, tag: int = TAG_H1) -> G1Point:
    """Try-and-increment onto the curve, then clear the cofactor."""
    p = curve.p
    nbytes = curve.byte_length + 16
    for c in range(MAX_HASH_ATTEMPTS):
        x = xof_int(tag, (msg, counter(c)), nbytes) % p
        y = sqrt_mod(x * x * x + x, p)
        if y is None:
            continue
        R = _mul_raw(curve.h, (x, y), p)
        if R is not None:
            return G1Point._from_raw(R, curve)
    raise ValidationError("hash_to_g1 failed to find a point")


def _sample_prime(bits: int, seed: bytes) -> int:
    nbytes = (bits + 7) // 8
    for c in range(MAX_COFACTOR_CANDIDATES):
        cand = xof_int(TAG_PARAMS, (b"q", seed, counter(c)), nbytes)
        cand = (cand >> (8 * nbytes - bits)) | (1 << (bits - 1)) | 1
        if is_probable_prime(cand):
            return cand
    raise ParameterError("no prime q found")


def generate_modulus(q_bits: int, seed: bytes, p_bits: int | None = None) -> PrimeModulus:
    if q_bits < 8:
        raise ParameterError("q_bits must be at least 8")
    if p_bits is None:
        p_bits = max(512, 2 * q_bits)
    if p_bits < q_bits + 3:
        raise ParameterError("p_bits must exceed q_bits by at least 3")
    q = _sample_prime(q_bits, seed)
    h = -(-(1 << (p_bits - 1)) // q)
    h += -h % 2
    for _ in range(MAX_COFACTOR_CANDIDATES):
        p = h * q - 1
        if p % 4 == 3 and is_probable_prime(p):
            return PrimeModulus(p, q, h)
        h += 2
    raise ParameterError("cofactor search exhausted")


def derive_generator(curve: PrimeModulus, seed: bytes) -> PairingParams:
    return PairingParams(curve, hash_to_g1(seed, curve, tag=TAG_P0))


def generate_params(q_bits: int, seed: bytes, p_bits: int | None = None) -> PairingParams:
    """Deterministic parameters: prime q, p = h*q - 1, and P0 hashed from the seed."""
    return derive_generator(generate_modulus(q_bits, seed, p_bits), seed)


TOY = PrimeModulus(43, 11, 4)
PRESETS = ("toy", "small")
_SMALL_SEED = b"cphabe/preset/small"


@lru_cache(maxsize=None)
def preset_modulus(name: str) -> PrimeModulus:
    """``toy``: q = 11, p = 43. ``small``: q of 80 bits, p of 512 bits. Neither is secure."""
    if name == "toy":
        return TOY
    if name == "small":
        return generate_modulus(80, _SMALL_SEED, 512)
    raise ParameterError(f"unknown preset {name!r}; expected one of {PRESETS}")
