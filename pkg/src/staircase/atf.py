"""Decorated quadrilaterals and their mutations.

A base diagram ``OXVY`` has ``O`` at the origin, ``X`` on the positive
x-axis and ``Y`` on the positive y-axis.  It is stored as four affine lengths
(over any exact scalar type), three primitive nodal rays and the two slanted
edge directions.  A mutation extends the nodal ray at one vertex until it hits
the opposite side, cuts there, and shears the triangle that does not contain
``O`` by the monodromy ``I +- n n^T J`` of that ray.

The same code runs symbolically (lengths are :class:`LinFormB`, signs decided
on a b-interval) and specialized (lengths in Q or a real quadratic field).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .classes import QuasiPerfect, SEED_CLASS, volume_at_acc
from .scalars import IMat2, IVec2, LinFormB, affine_length, sign
from .triples import (
    GeneratingTriple,
    base_triple,
    mutate_letter,
    predecessor,
    staircase_limits,
)

E_X = IVec2(1, 0)
E_Y = IVec2(0, 1)


class RayMissesSideError(ValueError):
    pass


class ClosureViolationError(AssertionError):
    pass


class QuadInvariantError(ValueError):
    """Closure, area, positivity or convexity fails."""


def _vadd(u, v):
    return (u[0] + v[0], u[1] + v[1])


def _vsub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def _vscale(k, v):
    return (v[0] * k, v[1] * k)


def _mul_lin(u, v) -> tuple[Fraction, Fraction, Fraction]:
    """Product of two linear forms as coefficients of ``1, b, b^2``."""
    u, v = _as_lin(u), _as_lin(v)
    return (
        u.const * v.const,
        u.const * v.b_coef + u.b_coef * v.const,
        u.b_coef * v.b_coef,
    )


def _as_lin(x) -> LinFormB:
    return x if isinstance(x, LinFormB) else LinFormB(x, 0)


AREA_POLY = (Fraction(1, 2), Fraction(0), Fraction(-1, 2))


@dataclass(frozen=True)
class DecoratedQuad:
    len_OX: object
    len_OY: object
    len_XV: object
    len_VY: object
    ray_X: IVec2
    ray_V: IVec2
    ray_Y: IVec2
    dir_XV: IVec2
    dir_VY: IVec2
    # open b-interval on which symbolic lengths are signed; None when specialized
    b_range: tuple | None = field(default=None, compare=False)

    @property
    def symbolic(self) -> bool:
        return any(isinstance(x, LinFormB) for x in self.lengths().values())

    def lengths(self) -> dict[str, object]:
        return {"OX": self.len_OX, "OY": self.len_OY, "XV": self.len_XV, "VY": self.len_VY}

    def rays(self) -> dict[str, IVec2]:
        return {"X": self.ray_X, "V": self.ray_V, "Y": self.ray_Y}

    def dirs(self) -> dict[str, IVec2]:
        return {"XV": self.dir_XV, "VY": self.dir_VY}

    def vertices(self) -> dict[str, tuple]:
        zero = self.len_OX * 0
        X = (self.len_OX, zero)
        V = _vadd(X, _vscale(self.len_XV, self.dir_XV))
        return {"O": (zero, zero), "X": X, "V": V, "Y": (zero, self.len_OY)}

    def closure(self) -> tuple:
        """``OX + XV + VY - OY`` as a vector; zero for a valid diagram."""
        V = self.vertices()["V"]
        end = _vadd(V, _vscale(self.len_VY, self.dir_VY))
        return (end[0], end[1] - self.len_OY)

    def area(self):
        """Shoelace area.  For symbolic quads: coefficients of ``1, b, b^2``."""
        V = self.vertices()["V"]
        if self.symbolic:
            a = _mul_lin(self.len_OX, V[1])
            c = _mul_lin(V[0], self.len_OY)
            return tuple((x + y) / 2 for x, y in zip(a, c))
        return (self.len_OX * V[1] + V[0] * self.len_OY) / 2

    def sign(self, x) -> int:
        return sign(x, self.b_range)

    def specialize(self, b) -> DecoratedQuad:
        def ev(x):
            return x.evaluate(b) if isinstance(x, LinFormB) else x

        return replace(
            self,
            len_OX=ev(self.len_OX), len_OY=ev(self.len_OY),
            len_XV=ev(self.len_XV), len_VY=ev(self.len_VY),
            b_range=None,
        )

    def with_range(self, b_range) -> DecoratedQuad:
        return replace(self, b_range=b_range)

    def same_data(self, other: DecoratedQuad) -> bool:
        return self == other

    def mismatches(self, other: DecoratedQuad) -> list[str]:
        out = []
        for name in ("len_OX", "len_OY", "len_XV", "len_VY", "ray_X", "ray_V", "ray_Y",
                     "dir_XV", "dir_VY"):
            a, b = getattr(self, name), getattr(other, name)
            if a != b:
                out.append(f"{name}: {a} != {b}")
        return out


def check_invariants(Q: DecoratedQuad, b=None) -> None:
    """Closure, area ``(1-b^2)/2``, positive lengths and convexity.

    ``b`` is the specialized blow-up size (needed for the area of a
    specialized quad); symbolic quads are checked as identities in b.
    """
    cx, cy = Q.closure()
    if cx != 0 or cy != 0:
        raise QuadInvariantError(f"closure fails: {Q.closure()}")
    area = Q.area()
    if Q.symbolic:
        if area != AREA_POLY:
            raise QuadInvariantError(f"area {area} != (1 - b^2)/2")
    elif b is not None and area != (1 - b * b) / 2:
        raise QuadInvariantError(f"area {area} != (1 - b^2)/2 at b = {b}")
    for name, length in Q.lengths().items():
        if Q.sign(length) <= 0:
            raise QuadInvariantError(f"|{name}| = {length} is not positive")
    edges = [E_X, Q.dir_XV, Q.dir_VY, -E_Y]
    for u, v in zip(edges, edges[1:] + edges[:1]):
        if u.cross(v) <= 0:
            raise QuadInvariantError(f"not convex at edges {u}, {v}")


def q0() -> DecoratedQuad:
    """Moment polygon of H_b with the three standard nodal rays."""
    b = LinFormB.b()
    return DecoratedQuad(
        len_OX=LinFormB(1), len_OY=1 - b, len_XV=1 - b, len_VY=b,
        ray_X=IVec2(-2, 1), ray_V=IVec2(0, -1), ray_Y=IVec2(1, -1),
        dir_XV=IVec2(-1, 1), dir_VY=IVec2(-1, 0),
        b_range=(Fraction(0), Fraction(1)),
    )


@dataclass(frozen=True)
class MutationMatrix:
    mat: IMat2
    vertex: str
    sign: int


# side opposite each mutable vertex that its nodal ray must cross
DESIGNATED_SIDE = {"V": "OX", "X": "VY", "Y": "XV"}


def _sides(Q: DecoratedQuad) -> dict[str, tuple]:
    P = Q.vertices()
    return {
        "OX": (P["O"], E_X, Q.len_OX),
        "XV": (P["X"], Q.dir_XV, Q.len_XV),
        "VY": (P["V"], Q.dir_VY, Q.len_VY),
        "YO": (P["Y"], -E_Y, Q.len_OY),
    }


def _hit(Q: DecoratedQuad, W, n: IVec2, side) -> tuple | None:
    """Solve ``W + r n = A + s d``; returns ``(r, s, L)`` or None if parallel."""
    A, d, L = side
    det = d.cross(n)
    if det == 0:
        return None
    e1, e2 = _vsub(A, W)
    r = (d.x * e2 - d.y * e1) / det
    s = (n.x * e2 - n.y * e1) / det
    return r, s, L


def _strictly_inside(Q: DecoratedQuad, hit) -> bool:
    if hit is None:
        return False
    r, s, L = hit
    return Q.sign(r) > 0 and Q.sign(s) > 0 and Q.sign(L - s) > 0


def _positive_multiple(Q: DecoratedQuad, vec, direction: IVec2) -> bool:
    lam = vec[0] / direction.x if direction.x else vec[1] / direction.y
    return vec == _vscale(lam, direction) and Q.sign(lam) > 0


def mutate_step(Q: DecoratedQuad, vertex: str) -> tuple[DecoratedQuad, MutationMatrix]:
    """Mutate at ``vertex`` in {"V", "X", "Y"}; returns the new quad and the shear used."""
    vertex = vertex.upper()
    if vertex not in DESIGNATED_SIDE:
        raise ValueError(f"cannot mutate at {vertex!r}")
    pts = Q.vertices()
    W, n = pts[vertex], Q.rays()[vertex]
    sides = _sides(Q)
    target = DESIGNATED_SIDE[vertex]
    hit = _hit(Q, W, n, sides[target])
    if not _strictly_inside(Q, hit):
        others = [k for k, side in sides.items()
                  if k != target and vertex not in k and _strictly_inside(Q, _hit(Q, W, n, side))]
        where = others[0] if others else "no side interior"
        raise RayMissesSideError(
            f"nodal ray {n} from {vertex} misses the interior of {target} (hits {where})")
    A, d, _ = sides[target]
    s = hit[1]
    P = _vadd(A, _vscale(s, d))

    U = pts["X"] if vertex == "V" else pts["V"]
    candidates = []
    for sgn in (1, -1):
        M = IMat2.shear(n, sgn)
        U_new = _vadd(W, M.apply(_vsub(U, W)))
        if vertex == "V":
            flat = _positive_multiple(Q, _vsub(U_new, W), -Q.dir_VY)
        elif vertex == "X":
            flat = _positive_multiple(Q, _vsub(U_new, W), E_X)
        else:
            flat = _positive_multiple(Q, _vsub(U_new, W), E_Y)
        if flat:
            candidates.append((sgn, M, U_new))
    if not candidates:
        raise ClosureViolationError(f"neither shear sign closes the diagram at {vertex}")
    if len(candidates) > 1:
        raise AssertionError(f"both shear signs close the diagram at {vertex}")
    sgn, M, U_new = candidates[0]

    rng = Q.b_range
    if vertex == "V":
        len_XV, dir_XV = affine_length(_vsub(U_new, P), rng)
        len_VY, dir_VY = affine_length(_vsub(pts["Y"], U_new), rng)
        new = replace(
            Q, len_OX=P[0], len_XV=len_XV, len_VY=len_VY, dir_XV=dir_XV, dir_VY=dir_VY,
            ray_X=-n, ray_V=M.apply(Q.ray_X),
        )
        if P[1] != 0:
            raise ClosureViolationError("split point left the x-axis")
    elif vertex == "X":
        len_XV, dir_XV = affine_length(_vsub(P, U_new), rng)
        len_VY, dir_VY = affine_length(_vsub(pts["Y"], P), rng)
        new = replace(
            Q, len_OX=U_new[0], len_XV=len_XV, len_VY=len_VY, dir_XV=dir_XV, dir_VY=dir_VY,
            ray_X=M.apply(Q.ray_V), ray_V=-n,
        )
    else:
        len_XV, dir_XV = affine_length(_vsub(P, pts["X"]), rng)
        len_VY, dir_VY = affine_length(_vsub(U_new, P), rng)
        new = replace(
            Q, len_OY=U_new[1], len_XV=len_XV, len_VY=len_VY, dir_XV=dir_XV, dir_VY=dir_VY,
            ray_Y=M.apply(Q.ray_V), ray_V=-n,
        )
    cx, cy = new.closure()
    if cx != 0 or cy != 0:
        raise ClosureViolationError(f"mutation at {vertex} broke closure: {new.closure()}")
    check_invariants(new)
    return new, MutationMatrix(M, vertex, sgn)


def mutate(Q: DecoratedQuad, vertex: str) -> DecoratedQuad:
    return mutate_step(Q, vertex)[0]


# association with generating triples --------------------------------------


def b_size(T: GeneratingTriple) -> tuple[Fraction, Fraction]:
    """Open b-interval on which every length of the associated quad is positive."""
    L, R = T.left, T.right
    mp, dp = R.m_prime, R.d_prime
    if mp <= 0:
        raise ValueError(f"m' <= 0 for {R}")
    lo = max(Fraction(0), Fraction(dp, mp))
    hi = min(Fraction(1), L.ratio)
    if dp > 0:
        hi = min(hi, Fraction(mp, dp))
    if not lo < hi:
        raise QuadInvariantError(f"empty b-interval for {T}")
    return lo, hi


def nodal_ray_V(T: GeneratingTriple) -> IVec2:
    """Ray at V, fixed by the mutation that produced T."""
    if not T.word:
        # base triples are y-mutations of the seed quasi-triple
        return IVec2(-SEED_CLASS.q, SEED_CLASS.p)
    letter, prev = predecessor(T)
    if letter == "y":
        E = prev.left
        return IVec2(-E.q, E.p)
    E = prev.right
    return IVec2(-(E.p - 6 * E.q), -E.q)


def associate(T: GeneratingTriple) -> DecoratedQuad:
    """The symbolic quadrilateral whose data is read off from T."""
    L, M, R = T.classes
    b = LinFormB.b()
    Q = DecoratedQuad(
        len_OY=(L.d - L.m * b) / L.q,
        len_OX=(R.m_prime * b - R.d_prime) / R.q,
        len_VY=(R.m_prime - R.d_prime * b) / (L.q * M.q),
        len_XV=(L.m - L.d * b) / (R.q * M.q),
        ray_Y=IVec2(L.q, -L.p),
        ray_X=IVec2(R.p - 6 * R.q, R.q),
        ray_V=nodal_ray_V(T),
        dir_VY=IVec2(-L.q * L.q, L.q * L.p - 1),
        dir_XV=IVec2(1 + R.p * R.q - 6 * R.q * R.q, R.q * R.q),
        b_range=b_size(T),
    )
    check_invariants(Q)
    return Q


def vmut_table(k: int) -> DecoratedQuad:
    """Expected data after k v-mutations of q0."""
    b = LinFormB.b()
    return DecoratedQuad(
        len_OY=1 - b, len_OX=k * b - (k - 1), len_VY=k - (k - 1) * b, len_XV=1 - b,
        ray_Y=IVec2(1, -1), ray_V=IVec2(-2 * k, -1), ray_X=IVec2(2 * k - 2, 1),
        dir_VY=IVec2(-1, 0), dir_XV=IVec2(2 * k - 1, 1),
    )


def yvmut_table(k: int) -> DecoratedQuad:
    """Expected data of y v^k q0 (|V Y| numerator recomputed from the geometry)."""
    b = LinFormB.b()
    return DecoratedQuad(
        len_OY=1 + k - k * b, len_OX=k * b - (k - 1),
        len_VY=(k - (k - 1) * b) / (2 * k), len_XV=(k - (1 + k) * b) / (2 * k),
        ray_Y=IVec2(1, -(2 + 2 * k)), ray_V=IVec2(-1, 1), ray_X=IVec2(2 * k - 2, 1),
        dir_VY=IVec2(-1, 1 + 2 * k), dir_XV=IVec2(2 * k - 1, 1),
    )


def v_matrix(k: int) -> IMat2:
    """Monodromy used for the (k+1)-st v-mutation."""
    return IMat2(1 + 2 * k, -4 * k * k, 1, 1 - 2 * k)


def x_matrix(R: QuasiPerfect) -> IMat2:
    p, q = R.p, R.q
    return IMat2(1 - p * q + 6 * q * q, (p - 6 * q) ** 2, -q * q, 1 + p * q - 6 * q * q)


def y_matrix(L: QuasiPerfect) -> IMat2:
    p, q = L.p, L.q
    return IMat2(1 - p * q, -q * q, p * p, 1 + p * q)


@dataclass
class BaseRun:
    n: int
    quads: list[DecoratedQuad]
    matrices: list[MutationMatrix]
    table_ok: list[bool]
    matrix_ok: list[bool]
    final_ok: bool
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return all(self.table_ok) and all(self.matrix_ok) and self.final_ok


def association_base_run(n: int) -> BaseRun:
    """Run ``y v^(n+2)`` on q0 over ``((n+1)/(n+2), (n+2)/(n+3))``."""
    rng = (Fraction(n + 1, n + 2), Fraction(n + 2, n + 3))
    Q = q0().with_range(rng)
    quads, matrices, table_ok, matrix_ok = [Q], [], [], []
    for k in range(1, n + 3):
        Q, M = mutate_step(Q, "V")
        quads.append(Q)
        matrices.append(M)
        table_ok.append(Q == vmut_table(k))
        matrix_ok.append(M.mat == v_matrix(k - 1))
    k = n + 2
    Q, M = mutate_step(Q, "Y")
    quads.append(Q)
    matrices.append(M)
    table_ok.append(Q == yvmut_table(k))
    matrix_ok.append(M.mat == y_matrix(SEED_CLASS))
    target = associate(base_triple(n))
    return BaseRun(n, quads, matrices, table_ok, matrix_ok, Q == target, Q.mismatches(target))


def verify_association_base(n: int) -> bool:
    return association_base_run(n).ok


@dataclass
class StepRun:
    triple: GeneratingTriple
    letter: str
    before: DecoratedQuad
    after: DecoratedQuad
    expected: DecoratedQuad
    matrix: MutationMatrix
    matrix_ok: bool

    @property
    def ok(self) -> bool:
        return self.after == self.expected and self.matrix_ok


def association_step_run(T: GeneratingTriple, letter: str) -> StepRun:
    """Mutate ``associate(T)`` at the letter's vertex and compare with ``associate(letter T)``."""
    T2 = mutate_letter(T, letter)
    lo1, hi1 = b_size(T)
    lo2, hi2 = b_size(T2)
    rng = (max(lo1, lo2), min(hi1, hi2))
    if not rng[0] < rng[1]:
        raise QuadInvariantError(f"no common b-interval for {T} and its {letter}-mutation")
    before = associate(T).with_range(rng)
    after, M = mutate_step(before, letter.upper())
    expected = associate(T2)
    oracle = x_matrix(T.right) if letter == "x" else y_matrix(T.left)
    return StepRun(T, letter, before, after, expected, M, M.mat == oracle)


def verify_association_step(T: GeneratingTriple, letter: str) -> bool:
    return association_step_run(T, letter).ok


def vy_decomposition(T: GeneratingTriple) -> tuple[Fraction, Fraction]:
    """Coefficients ``(c1, c2)`` with ``dir_VY = c1 ray_V + c2 ray_X``."""
    Q = associate(T)
    nV, nX, v = Q.ray_V, Q.ray_X, Q.dir_VY
    det = nV.cross(nX)
    if det == 0:
        raise ZeroDivisionError(f"nodal rays at V and X are parallel for {T}")
    c1 = Fraction(v.cross(nX), det)
    c2 = Fraction(nV.cross(v), det)
    L, M, R = T.classes
    q_xm = L.t * M.q - R.q
    if (c1, c2) != (Fraction(q_xm, L.t), Fraction(M.q, L.t)):
        raise AssertionError(f"decomposition {(c1, c2)} disagrees with {(q_xm, M.q)}/{L.t}")
    return c1, c2


# the limit run --------------------------------------------------------------


def embedded_ellipsoid(Q: DecoratedQuad):
    """``(|OX|, |OY|, |OY|/|OX|)``: the ellipsoid ``E(|OX|, |OY|)`` that the diagram embeds."""
    return Q.len_OX, Q.len_OY, Q.len_OY / Q.len_OX


@dataclass
class LimitStep:
    k: int
    quad: DecoratedQuad
    ox_after_x: object  # |OX| of the x-mutation of this step

    @property
    def slope(self) -> Fraction:
        """Slope magnitude ``p/q`` of the nodal ray at Y."""
        return Fraction(-self.quad.ray_Y.y, self.quad.ray_Y.x)

    @property
    def ellipsoid(self):
        a, c, _ = embedded_ellipsoid(self.quad)
        return a, c


@dataclass
class LimitTrace:
    triple: GeneratingTriple
    b: object
    z: object
    volume: object
    steps: list[LimitStep]


def limit_run(T: GeneratingTriple, k_max: int, b=None) -> LimitTrace:
    """Specialize ``associate(T)`` at ``b_E`` and apply k_max y-mutations.

    ``b`` overrides the blow-up size (useful for probing positivity).
    """
    limits = staircase_limits(T)
    if b is None:
        b = limits.b_inf
    Q = associate(T).specialize(b)
    check_invariants(Q, b)
    steps = []
    for k in range(k_max + 1):
        ox_x = mutate(Q, "X").len_OX
        steps.append(LimitStep(k, Q, ox_x))
        if k < k_max:
            Q = mutate(Q, "Y")
            check_invariants(Q, b)
    return LimitTrace(T, b, limits.z_inf, volume_at_acc(limits.b_inf, limits.z_inf), steps)
