"""Exact scalar tower.

Rationals are plain :class:`fractions.Fraction`.  On top of them this module
provides elements of real quadratic fields (:class:`QuadExt`), linear forms in
the blow-up parameter ``b`` (:class:`LinFormB`), and small integer vectors and
matrices.  Every comparison is decided exactly; floats only appear in the
one-way rendering helpers at the bottom of the module.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

Rational = Fraction

_TRIAL_LIMIT = 1 << 16


class FieldMismatchError(ValueError):
    """Raised when elements of different quadratic fields are combined."""


class NotInFieldError(ValueError):
    pass


class IndefiniteSignError(ValueError):
    """A linear form in b changes sign on the requested b-interval."""


class IncommensurableError(ValueError):
    pass


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Return ``(s, D)`` with ``n == s*s*D`` and ``D`` square-free."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    square, core, rest = 1, 1, n
    p = 2
    while p * p <= rest and p < _TRIAL_LIMIT:
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            square *= p ** (e // 2)
            if e % 2:
                core *= p
        p += 1 if p == 2 else 2
    if rest > 1:
        r = math.isqrt(rest)
        if r * r == rest:
            square *= r
        elif p * p > rest:
            core *= rest
        else:
            from sympy import factorint  # only reached for large cofactors

            for prime, e in factorint(rest).items():
                square *= prime ** (e // 2)
                if e % 2:
                    core *= prime
    return square, core


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def rational_sqrt(r: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    r = Fraction(r)
    if r < 0:
        return None
    if _is_square(r.numerator) and _is_square(r.denominator):
        return Fraction(math.isqrt(r.numerator), math.isqrt(r.denominator))
    return None


class QuadExt:
    """An element ``rat + coef*sqrt(disc)`` of the real quadratic field Q(sqrt(disc)).

    ``disc`` is reduced to its square-free part on construction, so two
    elements of the same field always carry the same ``disc``.
    """

    __slots__ = ("rat", "coef", "disc")

    def __init__(self, rat=0, coef=0, disc: int = 5):
        disc = int(disc)
        if disc <= 1:
            raise ValueError(f"discriminant must exceed 1, got {disc}")
        s, core = squarefree_decompose(disc)
        if core == 1:
            raise ValueError(f"{disc} is a perfect square")
        object.__setattr__(self, "rat", Fraction(rat))
        object.__setattr__(self, "coef", Fraction(coef) * s)
        object.__setattr__(self, "disc", core)

    @classmethod
    def _raw(cls, rat: Fraction, coef: Fraction, disc: int) -> QuadExt:
        obj = object.__new__(cls)
        object.__setattr__(obj, "rat", rat)
        object.__setattr__(obj, "coef", coef)
        object.__setattr__(obj, "disc", disc)
        return obj

    @classmethod
    def sqrt_of(cls, n: int) -> QuadExt:
        return cls(0, 1, n)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    def _coerce(self, other) -> QuadExt | None:
        if isinstance(other, QuadExt):
            if other.disc != self.disc:
                raise FieldMismatchError(
                    f"cannot combine Q(sqrt({self.disc})) with Q(sqrt({other.disc}))")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt._raw(Fraction(other), Fraction(0), self.disc)
        return None

    @property
    def is_rational(self) -> bool:
        return self.coef == 0

    def simplify(self) -> Fraction | QuadExt:
        """Drop to a Fraction when the irrational part vanishes."""
        return self.rat if self.coef == 0 else self

    def conjugate(self) -> QuadExt:
        return QuadExt._raw(self.rat, -self.coef, self.disc)

    def norm(self) -> Fraction:
        return self.rat * self.rat - self.coef * self.coef * self.disc

    def sign(self) -> int:
        return quad_sign(self)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._raw(self.rat + o.rat, self.coef + o.coef, self.disc)

    __radd__ = __add__

    def __neg__(self) -> QuadExt:
        return QuadExt._raw(-self.rat, -self.coef, self.disc)

    def __pos__(self) -> QuadExt:
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._raw(self.rat - o.rat, self.coef - o.coef, self.disc)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._raw(
            self.rat * o.rat + self.coef * o.coef * self.disc,
            self.rat * o.coef + self.coef * o.rat,
            self.disc,
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadExt:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadExt._raw(self.rat / n, -self.coef / n, self.disc)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int) -> QuadExt:
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        result = QuadExt._raw(Fraction(1), Fraction(0), self.disc)
        k = abs(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __abs__(self) -> QuadExt:
        return -self if quad_sign(self) < 0 else self

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadExt):
            if other.disc != self.disc:
                return self.coef == 0 and other.coef == 0 and self.rat == other.rat
            return self.rat == other.rat and self.coef == other.coef
        if isinstance(other, (int, Fraction)):
            return self.coef == 0 and self.rat == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.coef == 0:
            return hash(self.rat)
        return hash((self.rat, self.coef, self.disc))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return quad_sign(self - o)

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def __bool__(self) -> bool:
        return self.rat != 0 or self.coef != 0

    def __float__(self) -> float:
        return to_float(self)

    def __str__(self) -> str:
        return format_quad(self)

    def __repr__(self) -> str:
        return f"QuadExt({format_quad(self)!r})"


Scalar = Union[int, Fraction, QuadExt]


def quad_sign(a) -> int:
    """Exact sign of ``a`` (int, Fraction or QuadExt), never via floats."""
    if isinstance(a, (int, Fraction)):
        return (a > 0) - (a < 0)
    r, c = a.rat, a.coef
    sr, sc = (r > 0) - (r < 0), (c > 0) - (c < 0)
    if sc == 0:
        return sr
    if sr == 0 or sr == sc:
        return sc
    # opposite signs: the larger magnitude wins
    lhs, rhs = r * r, c * c * a.disc
    if lhs > rhs:
        return sr
    return sc


def quad_arith(a: QuadExt, b: QuadExt, op: str) -> QuadExt:
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    if isinstance(a, QuadExt) and isinstance(b, QuadExt) and a.disc != b.disc:
        raise FieldMismatchError(f"fields differ: {a.disc} vs {b.disc}")
    return ops[op]()


def sqrt_exact(r: Fraction, disc: int | None = None) -> Fraction | QuadExt:
    """Square root of a non-negative rational as a Fraction or QuadExt.

    If ``disc`` is given the root must lie in Q(sqrt(disc)).
    """
    r = Fraction(r)
    if r < 0:
        raise NotInFieldError(f"negative radicand {r}")
    root = rational_sqrt(r)
    if root is not None:
        return root if disc is None else QuadExt._raw(root, Fraction(0), disc)
    # sqrt(n/d) = sqrt(n*d)/d = s*sqrt(D)/d
    s, core = squarefree_decompose(r.numerator * r.denominator)
    if disc is not None and core != disc:
        raise NotInFieldError(f"sqrt({r}) is not in Q(sqrt({disc}))")
    return QuadExt._raw(Fraction(0), Fraction(s, r.denominator), core)


def quad_sqrt(x: QuadExt) -> QuadExt:
    """Non-negative square root of ``x`` inside its own field.

    Raises NotInFieldError if ``x`` is not a square in Q(sqrt(D)).
    """
    D = x.disc
    if quad_sign(x) < 0:
        raise NotInFieldError(f"{x} is negative")
    if x.coef == 0:
        return sqrt_exact(x.rat, D) if x.rat else x
    # (u + v sqrt D)^2 = x  =>  u^2 + D v^2 = a,  2uv = c
    n_root = rational_sqrt(x.norm())
    if n_root is None:
        raise NotInFieldError(f"{x} is not a square in Q(sqrt({D}))")
    for u2 in ((x.rat + n_root) / 2, (x.rat - n_root) / 2):
        u = rational_sqrt(u2)
        if u is None or u == 0:
            continue
        root = QuadExt._raw(u, x.coef / (2 * u), D)
        if quad_sign(root) < 0:
            root = -root
        if root * root == x:
            return root
    raise NotInFieldError(f"{x} is not a square in Q(sqrt({D}))")


_QUAD_RE = re.compile(
    r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*([+-]?\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*$"
)


def format_quad(x: QuadExt) -> str:
    """Textual form ``"a/b + c/d*sqrt(D)"``."""
    op = "-" if x.coef < 0 else "+"
    return f"{x.rat} {op} {abs(x.coef)}*sqrt({x.disc})"


def parse_quad(text: str) -> QuadExt:
    m = _QUAD_RE.match(text)
    if not m:
        raise ValueError(f"not a quadratic-field literal: {text!r}")
    rat, op, coef, disc = m.groups()
    c = Fraction(coef)
    return QuadExt(Fraction(rat), -c if op == "-" else c, int(disc))


def format_scalar(x) -> str:
    if isinstance(x, QuadExt):
        return format_quad(x)
    if isinstance(x, LinFormB):
        return format_linform(x)
    return str(Fraction(x))


def parse_scalar(text: str):
    """Inverse of :func:`format_scalar`."""
    if "sqrt" in text:
        return parse_quad(text)
    if "b" in text:
        return parse_linform(text)
    return Fraction(text.strip())


@dataclass(frozen=True)
class LinFormB:
    """The linear form ``const + b_coef*b`` in the symbolic blow-up size b."""

    const: Fraction
    b_coef: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "const", Fraction(self.const))
        object.__setattr__(self, "b_coef", Fraction(self.b_coef))

    @classmethod
    def b(cls) -> LinFormB:
        return cls(0, 1)

    @staticmethod
    def _lift(other) -> LinFormB | None:
        if isinstance(other, LinFormB):
            return other
        if isinstance(other, (int, Fraction)):
            return LinFormB(other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return LinFormB(self.const + o.const, self.b_coef + o.b_coef)

    __radd__ = __add__

    def __neg__(self) -> LinFormB:
        return LinFormB(-self.const, -self.b_coef)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return LinFormB(self.const - o.const, self.b_coef - o.b_coef)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LinFormB(self.const * other, self.b_coef * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division of a linear form by zero")
            return LinFormB(self.const / other, self.b_coef / other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.const == o.const and self.b_coef == o.b_coef

    def __hash__(self) -> int:
        return hash((self.const, self.b_coef))

    def __bool__(self) -> bool:
        return bool(self.const) or bool(self.b_coef)

    def __call__(self, b):
        return self.evaluate(b)

    def evaluate(self, b):
        """Specialize at ``b`` (Fraction or QuadExt)."""
        value = self.const + self.b_coef * b
        if isinstance(value, QuadExt):
            return value
        return Fraction(value)

    def root(self) -> Fraction | None:
        """The b at which the form vanishes (None for constants)."""
        if self.b_coef == 0:
            return None
        return -self.const / self.b_coef

    def __str__(self) -> str:
        return format_linform(self)

    def __repr__(self) -> str:
        return f"LinFormB({format_linform(self)!r})"


_LIN_RE = re.compile(r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*b\s*$")


def format_linform(x: LinFormB) -> str:
    op = "-" if x.b_coef < 0 else "+"
    return f"{x.const} {op} {abs(x.b_coef)}*b"


def parse_linform(text: str) -> LinFormB:
    m = _LIN_RE.match(text)
    if not m:
        raise ValueError(f"not a linear form in b: {text!r}")
    const, op, coef = m.groups()
    c = Fraction(coef)
    return LinFormB(Fraction(const), -c if op == "-" else c)


#: the interval on which every blow-up size lives
UNIT_INTERVAL = (Fraction(0), Fraction(1))


def sign(x, b_range=None) -> int:
    """Exact sign of a scalar.

    Linear forms in b are signed on the open interval ``b_range``
    (default ``(0, 1)``); a form that is not of constant sign there raises
    :class:`IndefiniteSignError`.
    """
    if isinstance(x, LinFormB):
        lo, hi = b_range if b_range is not None else UNIT_INTERVAL
        s_lo, s_hi = quad_sign(x.evaluate(lo)), quad_sign(x.evaluate(hi))
        if s_lo == s_hi or s_hi == 0:
            return s_lo if s_lo else s_hi
        if s_lo == 0:
            return s_hi
        raise IndefiniteSignError(f"{x} changes sign on ({lo}, {hi})")
    return quad_sign(x)


@dataclass(frozen=True)
class IVec2:
    x: int
    y: int

    def __iter__(self) -> Iterator[int]:
        yield self.x
        yield self.y

    def __neg__(self) -> IVec2:
        return IVec2(-self.x, -self.y)

    def __add__(self, other: IVec2) -> IVec2:
        return IVec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: IVec2) -> IVec2:
        return IVec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: int) -> IVec2:
        return IVec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def is_primitive(self) -> bool:
        return math.gcd(self.x, self.y) == 1

    def cross(self, other) -> int:
        return self.x * other[1] - self.y * other[0]

    def __getitem__(self, i: int) -> int:
        return (self.x, self.y)[i]

    def to_list(self) -> list[int]:
        return [self.x, self.y]

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class IMat2:
    """Integer 2x2 matrix ``((a, b), (c, d))``."""

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls) -> IMat2:
        return cls(1, 0, 0, 1)

    @classmethod
    def shear(cls, n: IVec2, sign: int) -> IMat2:
        """``I + sign * n n^T J`` with ``J = ((0,-1),(1,0))``; fixes ``n``."""
        nx, ny = n
        return cls(1 + sign * nx * ny, -sign * nx * nx, sign * ny * ny, 1 - sign * nx * ny)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def apply(self, v):
        """Multiply a 2-vector of any scalar type (or an IVec2)."""
        x, y = v
        out = (self.a * x + self.b * y, self.c * x + self.d * y)
        return IVec2(*out) if isinstance(v, IVec2) else out

    def __matmul__(self, other: IMat2) -> IMat2:
        return IMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def rows(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


def _parts(x) -> list[Fraction]:
    """Rational coordinates of a scalar over its natural basis."""
    if isinstance(x, LinFormB):
        return [x.const, x.b_coef]
    if isinstance(x, QuadExt):
        return [x.rat, x.coef]
    return [Fraction(x)]


def affine_length(v, b_range=None) -> tuple[object, IVec2]:
    """Split ``v`` as ``length * w`` with ``w`` primitive integral and length > 0."""
    v1, v2 = v
    p1, p2 = _parts(v1), _parts(v2)
    if len(p1) != len(p2):
        # e.g. (QuadExt, Fraction): pad the rational side
        width = max(len(p1), len(p2))
        p1 += [Fraction(0)] * (width - len(p1))
        p2 += [Fraction(0)] * (width - len(p2))
    direction = None
    for a, c in zip(p1, p2):
        if a == 0 and c == 0:
            continue
        den = math.lcm(a.denominator, c.denominator)
        ia, ic = int(a * den), int(c * den)
        g = math.gcd(ia, ic)
        w = IVec2(ia // g, ic // g)
        if direction is None:
            direction = w
        elif w != direction and w != -direction:
            raise IncommensurableError(f"{v} is not a multiple of a lattice vector")
    if direction is None:
        raise ValueError("zero vector has no affine length")
    length = v1 / direction.x if direction.x else v2 / direction.y
    if sign(length, b_range) < 0:
        direction, length = -direction, -length
    return length, direction


# one-way rendering helpers ------------------------------------------------


def _approx(x, bits: int) -> Fraction:
    """Rational within 2**-bits of ``x`` (Fraction or QuadExt)."""
    if not isinstance(x, QuadExt):
        return Fraction(x)
    c = x.coef
    scale = 1 << bits
    radicand = c.numerator * c.numerator * x.disc * scale * scale
    irr = Fraction(math.isqrt(radicand), c.denominator * scale)
    return x.rat + (irr if c >= 0 else -irr)


def to_float(x) -> float:
    """Render an exact scalar as the nearest 64-bit float (within one ulp)."""
    if isinstance(x, (int, Fraction)):
        return float(x)
    if not x:
        return 0.0
    bits = 128
    while True:
        approx = _approx(x, bits)
        if abs(approx) > Fraction(1, 1 << (bits - 64)):
            return float(approx)
        bits *= 2


def sqrt_to_float(x) -> float:
    """Render ``sqrt(x)`` for an exact non-negative scalar ``x``."""
    if sign(x) < 0:
        raise ValueError("square root of a negative value")
    if not x:
        return 0.0
    bits = 128
    while True:
        approx = _approx(x, bits)
        if approx > Fraction(1, 1 << (bits - 64)):
            break
        bits *= 2
    scale = 1 << bits
    n, d = approx.numerator, approx.denominator
    return float(Fraction(math.isqrt(n * d * scale * scale), d * scale))
