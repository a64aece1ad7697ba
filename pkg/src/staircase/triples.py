"""Generating triples, their x/y mutations, and the limits they determine."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .classes import (
    SEED_CLASS,
    QuasiPerfect,
    acc_key,
    adjacent,
    coef_B,
    from_center,
    t_compatible,
)
from .scalars import QuadExt, quad_sign, sqrt_exact

_WORD_RE = re.compile(r"^[xy]*$")


class MutationError(AssertionError):
    """A mutated class disagrees with the class recomputed from its center."""


def check_word(word: str) -> str:
    if not _WORD_RE.match(word):
        raise ValueError(f"mutation word must be over {{x, y}}: {word!r}")
    return word


@dataclass(frozen=True)
class GeneratingTriple:
    """``(E_left, E_mid, E_right)`` plus provenance.

    Equality compares the three classes only; ``word``/``level``/``quasi``
    record how the triple was reached.
    """

    left: QuasiPerfect
    mid: QuasiPerfect
    right: QuasiPerfect
    word: str = field(default="", compare=False)
    level: int = field(default=0, compare=False)
    quasi: bool = field(default=False, compare=False)

    @property
    def classes(self) -> tuple[QuasiPerfect, QuasiPerfect, QuasiPerfect]:
        return (self.left, self.mid, self.right)

    @property
    def key(self) -> tuple[int, str]:
        return (self.level, self.word)

    def to_json(self) -> dict:
        return {
            "n": self.level,
            "word": self.word,
            "left": self.left.to_json(),
            "mid": self.mid.to_json(),
            "right": self.right.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> GeneratingTriple:
        return cls(
            QuasiPerfect.from_json(obj["left"]),
            QuasiPerfect.from_json(obj["mid"]),
            QuasiPerfect.from_json(obj["right"]),
            word=obj.get("word", ""),
            level=obj.get("n", 0),
        )

    def __str__(self) -> str:
        return f"T{self.level}[{self.word or '*'}]({self.left}, {self.mid}, {self.right})"


def _combine(k: int, E: QuasiPerfect, F: QuasiPerfect, t_expected: int) -> QuasiPerfect:
    """``k*E - F`` on (d, m, p, q), re-derived from its center."""
    d, m = k * E.d - F.d, k * E.m - F.m
    p, q = k * E.p - F.p, k * E.q - F.q
    new = from_center(p, q)
    if (new.d, new.m) != (d, m):
        raise MutationError(f"degree coordinates {(d, m)} disagree with center class {new}")
    if new.t != t_expected:
        raise MutationError(f"t from center {new.t} != expected {t_expected}")
    return new


def mutate_x(T: GeneratingTriple) -> GeneratingTriple:
    """``(L, M, R) -> (L, t_L M - R, M)``."""
    L, M, R = T.classes
    new = _combine(L.t, M, R, L.t * M.t - R.t)
    if T.quasi:
        # x steps down the family of seed quasi-triples
        return GeneratingTriple(L, new, M, "", T.level - 1, True)
    return GeneratingTriple(L, new, M, T.word + "x", T.level)


def mutate_y(T: GeneratingTriple) -> GeneratingTriple:
    """``(L, M, R) -> (M, t_R M - L, R)``."""
    L, M, R = T.classes
    new = _combine(R.t, M, L, R.t * M.t - L.t)
    return GeneratingTriple(M, new, R, T.word + "y", T.level, False)


def mutate_letter(T: GeneratingTriple, letter: str) -> GeneratingTriple:
    if letter == "x":
        return mutate_x(T)
    if letter == "y":
        return mutate_y(T)
    raise ValueError(f"unknown mutation {letter!r}")


def apply_word(T: GeneratingTriple, word: str) -> GeneratingTriple:
    for letter in check_word(word):
        T = mutate_letter(T, letter)
    return T


def base_triple(n: int) -> GeneratingTriple:
    """``(E[2n+6], E[2n+7; 2n+4], E[2n+8])``."""
    if n < 0:
        raise ValueError("family index must be >= 0")
    T = GeneratingTriple(
        from_center(2 * n + 6, 1),
        from_center(4 * n * n + 22 * n + 29, 2 * n + 4),
        from_center(2 * n + 8, 1),
        word="",
        level=n,
    )
    report = verify_triple(T)
    if not report.ok:
        raise AssertionError(f"base triple {n} fails {report.failures()}")
    return T


def seed_quasi_triple(n: int) -> GeneratingTriple:
    """``((1,1,1,1,2), E[2n+6], E[2n+8])``; satisfies (a)-(d) only."""
    if n < 0:
        raise ValueError("family index must be >= 0")
    return GeneratingTriple(
        SEED_CLASS, from_center(2 * n + 6, 1), from_center(2 * n + 8, 1),
        word="", level=n, quasi=True,
    )


def triple_at(n: int, word: str) -> GeneratingTriple:
    return apply_word(base_triple(n), word)


def predecessor(T: GeneratingTriple) -> tuple[str, GeneratingTriple]:
    """Undo the last mutation: returns ``(letter, T')`` with ``letter(T') == T``."""
    if not T.word:
        raise ValueError("a base triple has no predecessor")
    letter, word = T.word[-1], T.word[:-1]
    L, M, R = T.classes
    if letter == "x":
        # T = (L, t_L M' - R', M') with M' = R
        old_right = _combine(L.t, R, M, L.t * R.t - M.t)
        prev = GeneratingTriple(L, R, old_right, word, T.level)
    else:
        old_left = _combine(R.t, L, M, R.t * L.t - M.t)
        prev = GeneratingTriple(old_left, L, R, word, T.level)
    return letter, prev


def tree_enumerate(n: int, depth: int) -> list[GeneratingTriple]:
    """All triples reachable from ``base_triple(n)`` by words of length <= depth.

    Returned in in-order (x-subtree, node, y-subtree), which sorts them by
    middle center.
    """
    if depth < 0:
        return []
    out: list[GeneratingTriple] = []

    def walk(T: GeneratingTriple, remaining: int) -> None:
        if remaining:
            walk(mutate_x(T), remaining - 1)
        out.append(T)
        if remaining:
            walk(mutate_y(T), remaining - 1)

    walk(base_triple(n), depth)
    return out


def iter_classes(triples) -> list[QuasiPerfect]:
    """Distinct classes occurring in ``triples``, sorted by center."""
    seen = {}
    for T in triples:
        for E in T.classes:
            seen[E.as_tuple()] = E
    return sorted(seen.values(), key=lambda E: E.center)


@dataclass
class TripleReport:
    ordered: bool
    t_at_least_3: bool
    same_eps: bool
    a: bool
    b: bool
    c: bool
    d: bool
    e: bool | None

    @property
    def ok(self) -> bool:
        return all(v is not False for v in self.as_dict().values())

    def as_dict(self) -> dict[str, bool | None]:
        return dict(self.__dict__)

    def failures(self) -> list[str]:
        return [k for k, v in self.as_dict().items() if v is False]


def verify_triple(T: GeneratingTriple) -> TripleReport:
    """Check the generating-triple axioms (a)-(e).

    Quasi-triples are exempt from (e) and from ``t >= 3``; their (e) entry is
    None.
    """
    L, M, R = T.classes
    same_eps = L.eps == M.eps == R.eps
    ordered = L.center < M.center < R.center
    if not same_eps:
        return TripleReport(ordered, False, False, False, False, False, False, False)
    a = adjacent(L, R)
    b = adjacent(L, M) and t_compatible(L, M, R.t) and R.t == L.q * M.p - L.p * M.q
    c = adjacent(R, M) and t_compatible(M, R, L.t) and L.t == M.q * R.p - M.p * R.q
    d = L.t * R.t - M.t == L.q * R.p - L.p * R.q
    if T.quasi:
        return TripleReport(ordered, True, True, a, b, c, d, None)
    t3 = min(L.t, M.t, R.t) >= 3
    # (e) via the monotone comparator; acc_key asserts m/d > 1/3
    key_m = acc_key(M)
    e = acc_key(R) > key_m and acc_key(L) > key_m
    return TripleReport(ordered, t3, True, a, b, c, d, e)


def identity_suite(T: GeneratingTriple) -> dict[str, bool]:
    """The seven coefficient identities every generating triple satisfies."""
    L, M, R = T.classes
    pl, ql, tl = L.p, L.q, L.t
    pm, qm, tm = M.p, M.q, M.t
    pr, qr, tr = R.p, R.q, R.t
    q_xm = tl * qm - qr
    q_ym = tr * qm - ql
    vi_lhs = (tl * (1 + pm * qm - 6 * qm * qm), tl * qm * qm)
    vi_rhs = (q_xm * (pm - 6 * qm) + qm * (pr - 6 * qr), q_xm * qm + qm * qr)
    vii_lhs = (-tr * (-qm * qm), -tr * (qm * pm - 1))
    vii_rhs = (q_ym * qm + qm * ql, -q_ym * pm - qm * pl)
    return {
        "i": pl + ql == qm * tr - qr * tm and 7 * pl - ql == pm * tr - tm * pr,
        "ii": pr + qr == pm * tl - pl * tm and pr - 7 * qr == ql * tm - qm * tl,
        "iii": (
            pm + qm == qr * tl + pl * tr
            and 7 * pm - qm == 6 * pl * tr + pr * tl - ql * tr
            and 7 * qm - pm == 6 * qr * tl + ql * tr - pr * tl
        ),
        "iv": pl * (pr - 6 * qr) + ql * qr == tm,
        "v": ql * tl + qr * tr + qm * tm == qm * tl * tr,
        "vi": vi_lhs == vi_rhs,
        "vii": vii_lhs == vii_rhs,
    }


# pre-staircases and their limits -------------------------------------------


def dominant_root(t: int) -> QuadExt:
    """``(t + sqrt(t^2 - 4))/2``, the growth rate of ``E_{k+1} = t E_k - E_{k-1}``."""
    if t < 3:
        raise ValueError(f"recursion parameter {t} < 3 has no irrational growth rate")
    return (t + sqrt_exact(Fraction(t * t - 4))) / 2


class PreStaircase:
    """Classes ``E_{k+1} = t E_k - E_{k-1}`` seeded by two classes.

    Steps are produced lazily and cached.  The limits of ``m_k/d_k`` and
    ``p_k/q_k`` are available in closed form through the dominant root.
    """

    def __init__(self, seeds: tuple[QuasiPerfect, QuasiPerfect], t: int, blocking: QuasiPerfect):
        self.seeds = seeds
        self.t_param = t
        self.blocking = blocking
        self._steps: list[QuasiPerfect] = list(seeds)
        self.lam = dominant_root(t)

    def step(self, k: int) -> QuasiPerfect:
        t = self.t_param
        while len(self._steps) <= k:
            prev, cur = self._steps[-2], self._steps[-1]
            self._steps.append(_recurse(t, cur, prev))
        return self._steps[k]

    def steps(self) -> Iterator[QuasiPerfect]:
        k = 0
        while True:
            yield self.step(k)
            k += 1

    @property
    def b_inf(self) -> QuadExt:
        E0, E1 = self.seeds
        return (E1.m * self.lam - E0.m) / (E1.d * self.lam - E0.d)

    @property
    def z_inf(self) -> QuadExt:
        E0, E1 = self.seeds
        return (E1.p * self.lam - E0.p) / (E1.q * self.lam - E0.q)

    @property
    def ascending(self) -> bool:
        return self.step(1).center > self.step(0).center


def _recurse(t: int, cur: QuasiPerfect, prev: QuasiPerfect) -> QuasiPerfect:
    """Next recursion step.  Its t is not a simple function of the seeds, so
    the class is rebuilt from its center and the degree coordinates checked."""
    p, q = t * cur.p - prev.p, t * cur.q - prev.q
    new = from_center(p, q)
    if (new.d, new.m) != (t * cur.d - prev.d, t * cur.m - prev.m):
        raise MutationError(f"recursion step {new} disagrees with linear combination")
    return new


@dataclass(frozen=True)
class StaircaseLimits:
    b_inf: QuadExt
    z_inf: QuadExt
    lam: QuadExt


_ORACLE_STEPS = 60
_ORACLE_TOL = Fraction(1, 10**30)


def ascending_staircase(T: GeneratingTriple) -> PreStaircase:
    return PreStaircase((T.left, T.mid), T.right.t, T.right)


def descending_staircase(T: GeneratingTriple) -> PreStaircase:
    return PreStaircase((T.right, T.mid), T.left.t, T.left)


def _certify(stairs: PreStaircase, b_inf, z_inf) -> None:
    # iterate the integer recursion and compare with the closed forms
    t = stairs.t_param
    (E0, E1) = stairs.seeds
    prev = (E0.d, E0.m, E0.p, E0.q)
    cur = (E1.d, E1.m, E1.p, E1.q)
    for _ in range(_ORACLE_STEPS):
        prev, cur = cur, tuple(t * c - p for c, p in zip(cur, prev))
    d, m, p, q = cur
    if quad_sign(abs(b_inf - Fraction(m, d)) - _ORACLE_TOL) >= 0:
        raise AssertionError(f"b_inf {b_inf} disagrees with iterated m/d")
    if quad_sign(abs(z_inf - Fraction(p, q)) - _ORACLE_TOL) >= 0:
        raise AssertionError(f"z_inf {z_inf} disagrees with iterated p/q")
    residual = z_inf * z_inf - coef_B(b_inf) * z_inf + 1
    if residual != 0:
        raise AssertionError(f"z_inf is not acc(b_inf): residual {residual}")
    if quad_sign(z_inf - 1) < 0:
        raise AssertionError("z_inf is the smaller root")


def staircase_limits(T: GeneratingTriple, certify: bool = True) -> StaircaseLimits:
    """Closed-form ``(b_inf, z_inf)`` of the ascending pre-staircase of T."""
    stairs = ascending_staircase(T)
    b_inf, z_inf = stairs.b_inf, stairs.z_inf
    if certify:
        _certify(stairs, b_inf, z_inf)
    return StaircaseLimits(b_inf, z_inf, stairs.lam)


def triple_with_left(T: GeneratingTriple) -> GeneratingTriple:
    """A triple of the same family whose left class is ``T.right``."""
    # y-mutations keep the right class, so walk back past them
    while T.word.endswith("y"):
        _, T = predecessor(T)
    if not T.word:
        return base_triple(T.level + 1)
    _, prev = predecessor(T)
    return mutate_y(prev)


@dataclass(frozen=True)
class BlockedInterval:
    owner: QuasiPerfect
    lower: QuadExt
    upper: QuadExt
    disc_lower: int
    disc_upper: int

    def contains(self, b) -> bool:
        return quad_sign(b - self.lower) > 0 and quad_sign(self.upper - b) > 0


def lower_endpoint(T: GeneratingTriple) -> QuadExt:
    """Left endpoint of the b-interval blocked by ``T.right``."""
    return staircase_limits(T).b_inf


def upper_endpoint(T: GeneratingTriple) -> QuadExt:
    """Right endpoint of the b-interval blocked by ``T.left``."""
    stairs = descending_staircase(T)
    b_sup = stairs.b_inf
    _certify_upper(stairs, b_sup)
    return b_sup


def _certify_upper(stairs: PreStaircase, b_sup) -> None:
    t = stairs.t_param
    E0, E1 = stairs.seeds
    prev, cur = (E0.d, E0.m), (E1.d, E1.m)
    for _ in range(_ORACLE_STEPS):
        prev, cur = cur, (t * cur[0] - prev[0], t * cur[1] - prev[1])
    if quad_sign(abs(b_sup - Fraction(cur[1], cur[0])) - _ORACLE_TOL) >= 0:
        raise AssertionError(f"upper endpoint {b_sup} disagrees with iterated m/d")


def blocked_interval(T: GeneratingTriple) -> BlockedInterval:
    """The b-interval blocked by ``T.right``.

    The lower end comes from the ascending staircase of T; the upper end from
    the descending staircase of a triple having ``T.right`` on its left.
    """
    lower = lower_endpoint(T)
    upper = upper_endpoint(triple_with_left(T))
    R, L = T.right, T.left
    if not (Fraction(R.d_prime, R.m_prime) < lower < L.ratio):
        raise AssertionError(f"lower endpoint {lower} violates d'/m' < b < m_L/d_L for {T}")
    if not lower < upper:
        raise AssertionError(f"empty blocked interval for {R}")
    return BlockedInterval(R, lower, upper, lower.disc, upper.disc)


def middle_centers(triples) -> list[Fraction]:
    return [T.mid.center for T in triples]
