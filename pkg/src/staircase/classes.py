"""Quasi-perfect classes and the numerical predicates built on them.

A class is stored as the integral tuple ``(d, m, p, q, t, eps)``: degree
coordinates ``(d, m)``, center ``p/q``, and the pair ``(t, eps)`` from which
``(d, m)`` are recovered.  Accumulation points, volumes and obstruction values
are computed exactly over Q or over a real quadratic field.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .scalars import (
    NotInFieldError,
    QuadExt,
    quad_sign,
    quad_sqrt,
    sqrt_exact,
)


class ClassInvariantError(ValueError):
    pass


class NoClassError(ValueError):
    """The center admits no quasi-perfect class."""


class EpsilonMismatchError(ValueError):
    pass


def cf_to_fraction(cf) -> tuple[int, int]:
    """``[a0, a1, ..., an]`` -> lowest-terms ``(p, q)``."""
    cf = list(cf)
    if not cf:
        raise ValueError("empty continued fraction")
    if any(a < 1 for a in cf):
        raise ValueError(f"continued fraction entries must be positive: {cf}")
    p, q = 1, 0
    for a in reversed(cf):
        p, q = a * p + q, p
    return p, q


def fraction_to_cf(p: int, q: int) -> list[int]:
    out = []
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def weight_expansion(p: int, q: int) -> list[int]:
    """Euclidean weight sequence of ``p/q``.

    Satisfies ``sum(w) == p + q - 1`` and ``sum(w*w) == p*q``.
    """
    if q < 1 or p < q:
        raise ValueError(f"need p >= q >= 1, got {p}/{q}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"{p}/{q} is not in lowest terms")
    weights: list[int] = []
    while q:
        a, r = divmod(p, q)
        weights.extend([q] * a)
        p, q = q, r
    return weights


@dataclass(frozen=True)
class QuasiPerfect:
    d: int
    m: int
    p: int
    q: int
    t: int
    eps: int = 1

    def __post_init__(self):
        d, m, p, q, t, eps = self.d, self.m, self.p, self.q, self.t, self.eps
        problems = []
        if eps not in (1, -1):
            problems.append(f"eps={eps}")
        if q < 1 or p < q or math.gcd(p, q) != 1:
            problems.append(f"center {p}/{q} not in lowest terms with p >= q >= 1")
        if t < 0 or t * t != p * p - 6 * p * q + q * q + 8:
            problems.append(f"t={t} does not satisfy t^2 = p^2 - 6pq + q^2 + 8")
        if 8 * d != 3 * (p + q) + eps * t or 8 * m != p + q + 3 * eps * t:
            problems.append("(d, m) disagree with (p, q, t, eps)")
        if 3 * d - m != p + q or d * d - m * m != p * q - 1:
            problems.append("Diophantine identities fail")
        if (eps == 1) != (3 * m > d):
            problems.append(f"eps={eps} inconsistent with m/d={m}/{d}")
        if problems:
            raise ClassInvariantError(f"{self.as_tuple()}: " + "; ".join(problems))

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return (self.d, self.m, self.p, self.q, self.t, self.eps)

    @property
    def center(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def ratio(self) -> Fraction:
        """``m/d``, the b-value naturally attached to the class."""
        return Fraction(self.m, self.d)

    @property
    def m_prime(self) -> int:
        return self.m - self.q

    @property
    def d_prime(self) -> int:
        return self.d - 3 * self.q

    def weights(self) -> list[int]:
        return weight_expansion(self.p, self.q)

    def cf(self) -> list[int]:
        return fraction_to_cf(self.p, self.q)

    @property
    def label(self) -> str:
        cf = self.cf()
        if len(cf) == 1:
            return f"E[{cf[0]}]"
        return f"E[{cf[0]};{','.join(map(str, cf[1:]))}]"

    def to_json(self) -> dict:
        return {"d": self.d, "m": self.m, "p": self.p, "q": self.q, "t": self.t, "eps": self.eps}

    @classmethod
    def from_json(cls, obj: dict) -> QuasiPerfect:
        return cls(obj["d"], obj["m"], obj["p"], obj["q"], obj["t"], obj.get("eps", 1))

    def __str__(self) -> str:
        return f"({self.d},{self.m},{self.p},{self.q},{self.t})"


SEED_CLASS = QuasiPerfect(1, 1, 1, 1, 2, 1)


def from_center(p: int, q: int) -> QuasiPerfect:
    """The unique quasi-perfect class with center ``p/q``."""
    if math.gcd(p, q) != 1:
        raise ValueError(f"{p}/{q} is not in lowest terms")
    t2 = p * p - 6 * p * q + q * q + 8
    t = math.isqrt(t2) if t2 >= 0 else -1
    if t < 0 or t * t != t2:
        raise NoClassError(f"{p}/{q}: p^2 - 6pq + q^2 + 8 = {t2} is not a perfect square")
    for eps in (1, -1):
        d8, m8 = 3 * (p + q) + eps * t, p + q + 3 * eps * t
        if d8 % 8 == 0 and m8 % 8 == 0:
            return QuasiPerfect(d8 // 8, m8 // 8, p, q, t, eps)
    raise NoClassError(f"{p}/{q}: neither sign of eps gives integral (d, m)")


_CF_RE = re.compile(r"^\s*\[\s*(\d+)\s*(?:[;,]\s*(\d+(?:\s*,\s*\d+)*))?\s*\]\s*$")


def parse_center(text: str) -> tuple[int, int]:
    """Accepts ``"[7;4]"``, ``"[7,4]"``, ``"29/4"`` or ``"8"``."""
    m = _CF_RE.match(text)
    if m:
        head, tail = m.groups()
        cf = [int(head)] + ([int(a) for a in tail.split(",")] if tail else [])
        return cf_to_fraction(cf)
    try:
        f = Fraction(text.strip())
    except ValueError:
        raise ValueError(f"cannot parse center {text!r}") from None
    return f.numerator, f.denominator


def class_from_text(text: str) -> QuasiPerfect:
    return from_center(*parse_center(text))


def _check_eps(E: QuasiPerfect, F: QuasiPerfect) -> None:
    if E.eps != F.eps:
        raise EpsilonMismatchError(f"{E} and {F} have different eps")


def adjacent(E: QuasiPerfect, F: QuasiPerfect) -> bool:
    _check_eps(E, F)
    if F.center < E.center:
        E, F = F, E
    return (E.p + E.q) * (F.p + F.q) - E.t * F.t == 8 * E.p * F.q


def t_compatible(E: QuasiPerfect, F: QuasiPerfect, t2: int) -> bool:
    _check_eps(E, F)
    ok = E.t * F.t - 4 * t2 == E.p * F.p - 3 * (E.p * F.q + E.q * F.p) + E.q * F.q
    if adjacent(E, F):
        # for adjacent classes compatibility reduces to a determinant
        assert ok == (abs(F.p * E.q - E.p * F.q) == t2), (E, F, t2)
    return ok


def coef_B(b):
    """``B(b) = (3-b)^2/(1-b^2) - 2``, the middle coefficient of the acc quadratic."""
    return (3 - b) * (3 - b) / (1 - b * b) - 2


@dataclass(frozen=True)
class AccPoint:
    b: object
    z: object
    coefB: object

    def residual(self):
        return self.z * self.z - self.coefB * self.z + 1


def acc_of_b(b) -> AccPoint:
    """Larger root of ``z^2 - B(b) z + 1 = 0``, exactly."""
    if isinstance(b, int):
        b = Fraction(b)
    if quad_sign(b) < 0 or quad_sign(b - 1) >= 0:
        raise ValueError(f"blow-up size {b} outside [0, 1)")
    B = coef_B(b)
    disc = B * B - 4
    if isinstance(disc, QuadExt):
        root = quad_sqrt(disc)
    else:
        root = sqrt_exact(disc)
    z = (B + root) / 2
    if isinstance(z, QuadExt):
        z = z.simplify()
    return AccPoint(b, z, B)


def volume_at_acc(b, z):
    """Volume at an accumulation point, ``(1 + z)/(3 - b)``."""
    return (1 + z) / (3 - b)


def volume_squared(b, z):
    """Square of the volume curve ``sqrt(z/(1-b^2))`` at an arbitrary z."""
    return z / (1 - b * b)


class NonPositiveDenominatorError(ValueError):
    pass


def obstruction_mu(E: QuasiPerfect, b, z):
    """Two-branch obstruction of E near its center.

    Only claimed to be the true obstruction near ``p/q``; elsewhere it is used
    as a documented stand-in.
    """
    denom = E.d - E.m * b
    if quad_sign(denom) <= 0:
        raise NonPositiveDenominatorError(f"d - m b = {denom} for {E}")
    if quad_sign(z * E.q - E.p) < 0:
        return E.q * z / denom
    return E.p / denom


def is_blocked(E: QuasiPerfect, b) -> bool:
    acc = acc_of_b(b)
    mu = obstruction_mu(E, b, acc.z)
    return quad_sign(mu - volume_at_acc(b, acc.z)) > 0


def is_blocking_candidate(E: QuasiPerfect) -> bool:
    """True iff the center exceeds ``3 + 2 sqrt 2``."""
    return E.p * E.p - 6 * E.p * E.q + E.q * E.q > 0 and E.p > 3 * E.q


def symmetry_B(E: QuasiPerfect) -> QuasiPerfect:
    """``(D,M,P,Q,T) -> (M-Q, D-3Q, (P-5Q+T)/2, (-P+5Q+T)/2, P-7Q)``."""
    D, M, P, Q, T = E.d, E.m, E.p, E.q, E.t
    if (P - 5 * Q + T) % 2:
        raise ClassInvariantError(f"P - 5Q + T is odd for {E}")
    d, m = M - Q, D - 3 * Q
    p, q, t = (P - 5 * Q + T) // 2, (-P + 5 * Q + T) // 2, abs(P - 7 * Q)
    eps = 1 if 3 * m > d else -1
    return QuasiPerfect(d, m, p, q, t, eps)


def acc_key(E: QuasiPerfect):
    """Rational key ordering ``acc(m/d)`` for classes with ``m/d > 1/3``.

    On (1/3, 1) the larger root of the acc quadratic increases with B, and
    B increases with b, so comparing B(m/d) compares acc(m/d).
    """
    r = E.ratio
    if not (Fraction(1, 3) < r < 1):
        raise ValueError(f"m/d = {r} outside (1/3, 1) for {E}")
    return coef_B(r)


__all__ = [
    "AccPoint",
    "ClassInvariantError",
    "EpsilonMismatchError",
    "NoClassError",
    "NonPositiveDenominatorError",
    "NotInFieldError",
    "QuasiPerfect",
    "SEED_CLASS",
    "acc_key",
    "acc_of_b",
    "adjacent",
    "cf_to_fraction",
    "class_from_text",
    "coef_B",
    "fraction_to_cf",
    "from_center",
    "is_blocked",
    "is_blocking_candidate",
    "obstruction_mu",
    "parse_center",
    "symmetry_B",
    "t_compatible",
    "volume_at_acc",
    "volume_squared",
    "weight_expansion",
]
