"""
The convolution algebra of equivariant classes on Y x Y.

A KClass stores, for every orbit of the diagonal action on Y x Y, a virtual
character of the stabilizer of the orbit's base pair. Its value at a pair
(x, z) and an element g fixing both is read off by transporting back to the
base pair. Convolution is computed from the character-sum formula, so the
specialization at every s is an algebra map.

Usage:
    from jcells.fingroup import standard_groups, GAction
    from jcells.ksquare import KClass, abelian_idempotents

    G = standard_groups("Z2")
    A = GAction.from_generators(G, [(1, 0)])
    family = abelian_idempotents(A)
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from jcells.arith import Cyclotomic, as_cyclotomic
from jcells.errors import InconsistentSystemError, StructureCheckError, UnclassifiedCaseError
from jcells.fingroup import Character, Cocycle2, FinGroup, GAction, irreducible_characters, is_coboundary
from jcells.linalg import rank, row_reduce, solve, transpose
from jcells.report import ValidationResult

logger = logging.getLogger(__name__)

ZERO = Cyclotomic(1)


@dataclass
class Stabilizer:
    group: FinGroup
    embedding: Tuple[int, ...]
    local: Dict[int, int]
    characters: List[Character]


class PairOrbits:
    """Orbits of the diagonal action on Y x Y with base pairs, transports and stabilizers."""

    def __init__(self, action: GAction):
        G = action.group
        self.action = action
        self.base: List[Tuple[int, int]] = []
        self._where: Dict[Tuple[int, int], Tuple[int, int]] = {}
        for x in range(action.degree):
            for z in range(action.degree):
                if (x, z) in self._where:
                    continue
                k = len(self.base)
                self.base.append((x, z))
                for g in range(G.order):
                    pair = (action.act(g, x), action.act(g, z))
                    if pair not in self._where:
                        self._where[pair] = (k, g)

        self.stabilizers: List[Stabilizer] = []
        for x, z in self.base:
            H, embedding = G.subgroup(action.pair_stabilizer(x, z))
            self.stabilizers.append(Stabilizer(H, embedding, {g: i for i, g in enumerate(embedding)},
                                               irreducible_characters(H)))
        logger.debug(f"{action}: {len(self.base)} orbits on pairs")

    def __len__(self):
        return len(self.base)

    def locate(self, x: int, z: int) -> Tuple[int, int]:
        """(orbit index, t) with t . base = (x, z)."""
        return self._where[(x, z)]

    def is_diagonal(self, k: int) -> bool:
        x, z = self.base[k]
        return x == z


@lru_cache(maxsize=128)
def pair_orbits(action: GAction) -> PairOrbits:
    return PairOrbits(action)


def _same_action(a: GAction, b: GAction) -> bool:
    return a is b or (a.perms == b.perms and a.group.table == b.group.table)


def _project(stab: Stabilizer, class_values: Sequence[Cyclotomic]) -> Dict[int, Cyclotomic]:
    """Coefficients of a class function (given per class) in the irreducible characters."""
    H = stab.group
    coefficients = {}
    for i, chi in enumerate(stab.characters):
        total = ZERO
        for cls_, value, chi_value in zip(H.conjugacy_classes, class_values, chi.values):
            if value:
                total = total + value * chi_value.conjugate() * len(cls_)
        total = total / H.order
        if total:
            coefficients[i] = total
    return coefficients


class KClass:
    """An element of K_G(Y x Y) tensored with a cyclotomic field."""

    def __init__(self, action: GAction, coefficients: Optional[Mapping[int, Mapping[int, object]]] = None):
        self.action = action
        self.orbits = pair_orbits(action)
        cleaned: Dict[int, Dict[int, Cyclotomic]] = {}
        for k, row in (coefficients or {}).items():
            if not 0 <= k < len(self.orbits):
                raise ValueError(f"Invalid orbit index: {k}. Expected 0..{len(self.orbits) - 1}")
            n_chars = len(self.orbits.stabilizers[k].characters)
            kept = {}
            for i, c in row.items():
                if not 0 <= i < n_chars:
                    raise ValueError(f"Invalid character index {i} for orbit {k}")
                c = as_cyclotomic(c)
                if c:
                    kept[int(i)] = c
            if kept:
                cleaned[int(k)] = kept
        self.coefficients = cleaned
        self._values: Dict[Tuple[int, int], Cyclotomic] = {}

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, action: GAction) -> "KClass":
        return cls(action)

    @classmethod
    def orbit_class(cls, action: GAction, x: int, z: int, character: int = 0) -> "KClass":
        """The orbit of (x, z) carrying an irreducible character of its base stabilizer (trivial by default)."""
        k, _ = pair_orbits(action).locate(x, z)
        return cls(action, {k: {character: 1}})

    @classmethod
    def diagonal(cls, action: GAction) -> "KClass":
        orbits = pair_orbits(action)
        return cls(action, {k: {0: 1} for k in range(len(orbits)) if orbits.is_diagonal(k)})

    @classmethod
    def from_values(cls, action: GAction, func: Callable[[int, int, int], object]) -> "KClass":
        """
        The class whose value at (x, z, g) is func(x, z, g).

        func is only called with g fixing x and z, and must be invariant under
        simultaneous conjugation.
        """
        orbits = pair_orbits(action)
        coefficients = {}
        for k, (x0, z0) in enumerate(orbits.base):
            stab = orbits.stabilizers[k]
            H = stab.group
            reps = [as_cyclotomic(func(x0, z0, stab.embedding[c[0]])) for c in H.conjugacy_classes]
            for h in range(H.order):
                if as_cyclotomic(func(x0, z0, stab.embedding[h])) != reps[H.class_index[h]]:
                    raise ValueError(f"Values on orbit {k} are not a class function of the stabilizer")
            coefficients[k] = _project(stab, reps)
        return cls(action, coefficients)

    @classmethod
    def from_specializations(cls, action: GAction, matrices: Sequence["SpecMatrix"]) -> "KClass":
        """
        Rebuild a class from one specialization per conjugacy class with a
        nonempty fixed set, using M_{gsg^-1}(gx, gz) = M_s(x, z).
        """
        G = action.group
        by_class: Dict[int, SpecMatrix] = {}
        for m in matrices:
            by_class[G.class_index[m.element]] = m
            if tuple(m.points) != action.fixed_points(m.element):
                raise ValueError(f"Specialization at {G.label(m.element)} is not indexed by its fixed points")
            for c in G.centralizer(m.element):
                for x in m.points:
                    for z in m.points:
                        if m.entry(action.act(c, x), action.act(c, z)) != m.entry(x, z):
                            raise ValueError(
                                f"Specialization at {G.label(m.element)} does not commute with its centralizer")
        for cls_ in G.conjugacy_classes:
            index = G.class_index[cls_[0]]
            if action.fixed_points(cls_[0]) and index not in by_class:
                raise ValueError(f"Missing specialization for the class of {G.label(cls_[0])}")

        def value(x: int, z: int, h: int):
            m = by_class[G.class_index[h]]
            # g with g s g^-1 = h
            g = G.mul(G.conjugators[h], G.inv(G.conjugators[m.element]))
            gi = G.inv(g)
            return m.entry(action.act(gi, x), action.act(gi, z))

        return cls.from_values(action, value)

    @classmethod
    def graph(cls, action: GAction, perm: Sequence[int]) -> "KClass":
        """The graph {(y, perm(y))} of a permutation of Y commuting with the action."""
        for p in action.perms:
            if any(p[perm[y]] != perm[p[y]] for y in range(action.degree)):
                raise ValueError("Permutation does not commute with the action")
        return cls.from_values(action, lambda x, z, g: 1 if perm[x] == z else 0)

    # -- evaluation ------------------------------------------------------------

    def orbit_value(self, k: int, h: int) -> Cyclotomic:
        """Character value on orbit k at an element h of the base stabilizer."""
        stab = self.orbits.stabilizers[k]
        local = stab.local[h]
        key = (k, stab.group.class_index[local])
        cached = self._values.get(key)
        if cached is None:
            cached = ZERO
            for i, c in self.coefficients.get(k, {}).items():
                cached = cached + c * stab.characters[i](local)
            self._values[key] = cached
        return cached

    def value(self, x: int, z: int, g: int) -> Cyclotomic:
        if self.action.act(g, x) != x or self.action.act(g, z) != z:
            raise ValueError(f"Element {g} does not fix the pair ({x}, {z})")
        k, t = self.orbits.locate(x, z)
        if k not in self.coefficients:
            return ZERO
        G = self.action.group
        return self.orbit_value(k, G.conj(G.inv(t), g))

    def specialize_at(self, s: int) -> "SpecMatrix":
        return specialize_at(self, s)

    def restrict(self, subgroup: FinGroup, embedding: Sequence[int],
                 action: Optional[GAction] = None) -> "KClass":
        """The same sheaf viewed equivariantly for a subgroup."""
        action = action or self.action.restrict(subgroup, embedding)
        return KClass.from_values(action, lambda x, z, h: self.value(x, z, embedding[h]))

    # -- algebra ---------------------------------------------------------------

    def _check(self, other: "KClass"):
        if not isinstance(other, KClass):
            raise TypeError(f"Expected a KClass, got {type(other).__name__}")
        if not _same_action(self.action, other.action):
            raise ValueError("KClasses live on different actions")

    def __add__(self, other: "KClass") -> "KClass":
        self._check(other)
        coefficients = {k: dict(row) for k, row in self.coefficients.items()}
        for k, row in other.coefficients.items():
            target = coefficients.setdefault(k, {})
            for i, c in row.items():
                target[i] = target.get(i, ZERO) + c
        return KClass(self.action, coefficients)

    def __neg__(self) -> "KClass":
        return KClass(self.action, {k: {i: -c for i, c in row.items()} for k, row in self.coefficients.items()})

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __mul__(self, scalar) -> "KClass":
        if isinstance(scalar, KClass):
            return NotImplemented
        s = as_cyclotomic(scalar)
        return KClass(self.action, {k: {i: c * s for i, c in row.items()} for k, row in self.coefficients.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "KClass") -> "KClass":
        return convolve(self, other)

    def __eq__(self, other):
        if not isinstance(other, KClass) or not _same_action(self.action, other.action):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(tuple(sorted((k, i, c) for k, row in self.coefficients.items() for i, c in row.items())))

    def is_zero(self) -> bool:
        return not self.coefficients

    def denominators_divide_power_of(self, n: int) -> bool:
        """Every coordinate of every coefficient lies in Z[1/n]."""
        for row in self.coefficients.values():
            for c in row.values():
                for coord in c.coords:
                    d = coord.denominator
                    while d > 1:
                        g = gcd(d, n)
                        if g == 1:
                            return False
                        d //= g
        return True

    # -- text / json -----------------------------------------------------------

    def to_text(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for k in sorted(self.coefficients):
            stab = self.orbits.stabilizers[k]
            x, z = self.orbits.base[k]
            for i, c in sorted(self.coefficients[k].items()):
                parts.append(f"({c}) O{(x, z)}[{stab.characters[i].label}]")
        return " + ".join(parts)

    def __repr__(self):
        return f"KClass({self.to_text()})"

    def to_json(self) -> Dict:
        return {
            'group': self.action.group.name,
            'degree': self.action.degree,
            'orbits': [
                {'base': list(self.orbits.base[k]),
                 'coefficients': [[i, c.to_json()] for i, c in sorted(row.items())]}
                for k, row in sorted(self.coefficients.items())
            ],
        }

    @classmethod
    def from_json(cls, action: GAction, data: Mapping) -> "KClass":
        orbits = pair_orbits(action)
        if data.get('degree', action.degree) != action.degree:
            raise ValueError(f"KClass data is for {data['degree']} points, action has {action.degree}")
        coefficients = {}
        for entry in data.get('orbits', []):
            base = tuple(entry['base'])
            k, _ = orbits.locate(*base)
            if orbits.base[k] != base:
                raise ValueError(f"{base} is not the base pair of its orbit; expected {orbits.base[k]}")
            coefficients[k] = {int(i): Cyclotomic.from_json(c) for i, c in entry['coefficients']}
        return cls(action, coefficients)


def convolve(a: KClass, b: KClass) -> KClass:
    """
    (a * b) at (x, z, h) = sum over y fixed by h of a(x, y, h) b(y, z, h),
    projected onto the characters of each base stabilizer.
    """
    a._check(b)
    action = a.action
    orbits = a.orbits
    if a.is_zero() or b.is_zero():
        return KClass(action)
    coefficients = {}
    for k, (x0, z0) in enumerate(orbits.base):
        stab = orbits.stabilizers[k]
        class_values = []
        for cls_ in stab.group.conjugacy_classes:
            h = stab.embedding[cls_[0]]
            total = ZERO
            for y in action.fixed_points(h):
                left = a.value(x0, y, h)
                if left:
                    right = b.value(y, z0, h)
                    if right:
                        total = total + left * right
            class_values.append(total)
        coefficients[k] = _project(stab, class_values)
    return KClass(action, coefficients)


# ---------------------------------------------------------------------------
# Specializations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpecMatrix:
    """Matrix of a class at an element s, indexed by the fixed points of s."""
    element: int
    points: Tuple[int, ...]
    rows: Tuple[Tuple[Cyclotomic, ...], ...]

    @classmethod
    def build(cls, element: int, points: Sequence[int], rows: Sequence[Sequence]) -> "SpecMatrix":
        points = tuple(points)
        if len(rows) != len(points) or any(len(r) != len(points) for r in rows):
            raise ValueError(f"Specialization must be {len(points)}x{len(points)}")
        return cls(element, points, tuple(tuple(as_cyclotomic(x) for x in r) for r in rows))

    @property
    def size(self) -> int:
        return len(self.points)

    def entry(self, x: int, z: int) -> Cyclotomic:
        return self.rows[self.points.index(x)][self.points.index(z)]

    def _check(self, other: "SpecMatrix"):
        if self.element != other.element or self.points != other.points:
            raise ValueError("Specializations at different elements")

    def __matmul__(self, other: "SpecMatrix") -> "SpecMatrix":
        self._check(other)
        n = self.size
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                total = ZERO
                for k in range(n):
                    if self.rows[i][k] and other.rows[k][j]:
                        total = total + self.rows[i][k] * other.rows[k][j]
                row.append(total)
            rows.append(tuple(row))
        return SpecMatrix(self.element, self.points, tuple(rows))

    def __add__(self, other: "SpecMatrix") -> "SpecMatrix":
        self._check(other)
        return SpecMatrix(self.element, self.points,
                          tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)))

    def rank(self) -> int:
        return rank([list(r) for r in self.rows]) if self.rows else 0

    def trace(self) -> Cyclotomic:
        total = ZERO
        for i in range(self.size):
            total = total + self.rows[i][i]
        return total

    def is_identity(self) -> bool:
        return all(self.rows[i][j] == (1 if i == j else 0) for i in range(self.size) for j in range(self.size))

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def to_text(self) -> str:
        if not self.rows:
            return "[]"
        cells = [[str(x) for x in r] for r in self.rows]
        width = max(len(c) for r in cells for c in r)
        return "\n".join("[ " + "  ".join(c.rjust(width) for c in r) + " ]" for r in cells)


def specialize_at(a: KClass, s: int) -> SpecMatrix:
    points = a.action.fixed_points(s)
    return SpecMatrix(s, points, tuple(tuple(a.value(x, z, s) for z in points) for x in points))


def matrix_in_basis(spec: SpecMatrix, basis: Sequence[Sequence]) -> List[List[Cyclotomic]]:
    """
    Matrix of the specialization on the span of the given functions on the
    fixed points (which must be invariant); column j holds the coordinates of
    the image of basis[j].
    """
    columns = transpose([[as_cyclotomic(x) for x in b] for b in basis])
    result_columns = []
    for b in basis:
        image = [sum((spec.rows[i][j] * as_cyclotomic(b[j]) for j in range(spec.size)), ZERO)
                 for i in range(spec.size)]
        try:
            coords, _ = solve(columns, image, zero=ZERO)
        except InconsistentSystemError:
            raise ValueError("Basis does not span an invariant subspace")
        result_columns.append(coords)
    return transpose(result_columns)


# ---------------------------------------------------------------------------
# Simple modules
# ---------------------------------------------------------------------------

@dataclass
class IsotypicComponent:
    character: Character
    multiplicity: int
    basis: List[List[Cyclotomic]]
    ranks: List[int] = field(default_factory=list)


@dataclass
class ModuleDecomposition:
    element: int
    points: Tuple[int, ...]
    image: Tuple[int, ...]
    components: List[IsotypicComponent]

    def nonzero(self) -> List[IsotypicComponent]:
        return [c for c in self.components if c.multiplicity]


def build_module(action: GAction, s: int, idempotents: Sequence[KClass] = (),
                 image: Optional[Sequence[int]] = None) -> ModuleDecomposition:
    """
    Decompose C[Y^s] under an image subgroup (default the centralizer of s)
    and report, per isotypic component, the rank of each idempotent on the
    multiplicity space.
    """
    G = action.group
    points = action.fixed_points(s)
    if not points:
        raise ValueError(f"empty fixed set: {G.label(s)} fixes no point")
    elements = tuple(sorted(image)) if image is not None else G.centralizer(s)
    for h in elements:
        if any(action.act(h, y) not in points for y in points):
            raise ValueError(f"Element {G.label(h)} does not preserve the fixed points of {G.label(s)}")
    H, embedding = G.subgroup(elements)
    n = len(points)
    position = {y: i for i, y in enumerate(points)}
    matrices = [spec for spec in (specialize_at(k, s) for k in idempotents)]

    components = []
    for chi in irreducible_characters(H):
        d = chi.degree
        projector = [[ZERO] * n for _ in range(n)]
        for h_local, h in enumerate(embedding):
            weight = chi(h_local).conjugate() * Fraction(d, H.order)
            hinv = G.inv(h)
            for x in points:
                projector[position[x]][position[action.act(hinv, x)]] += weight
        proj_rank = rank(projector)
        if proj_rank % d:
            raise StructureCheckError(f"Isotypic projector for {chi.label} has rank {proj_rank}")
        reduced, _ = row_reduce(transpose(projector), n)
        ranks = []
        for spec in matrices:
            product = [[sum((spec.rows[i][k] * projector[k][j] for k in range(n) if spec.rows[i][k]), ZERO)
                        for j in range(n)] for i in range(n)]
            r = rank(product)
            if r % d:
                raise StructureCheckError(f"Idempotent rank {r} on {chi.label} is not a multiple of {d}")
            ranks.append(r // d)
        components.append(IsotypicComponent(chi, proj_rank // d, reduced, ranks))
    return ModuleDecomposition(s, points, elements, components)


def multiplicity_ranks(k: KClass) -> Dict[int, List[int]]:
    """Ranks on every multiplicity space, per class representative with a nonempty fixed set."""
    G = k.action.group
    result = {}
    for s in G.class_reps:
        if k.action.fixed_points(s):
            module = build_module(k.action, s, [k])
            result[s] = [c.ranks[0] for c in module.components if c.multiplicity]
    return result


def check_family(family: Sequence[KClass], name: str = "idempotent family") -> ValidationResult:
    """Orthogonal idempotents summing to the diagonal, each of rank at most one everywhere."""
    result = ValidationResult(name)
    if not family:
        result.add_error("empty family")
        return result
    action = family[0].action
    total = KClass.zero(action)
    for i, a in enumerate(family):
        total = total + a
        for j, b in enumerate(family):
            product = a @ b
            if i == j:
                result.check(product == a, f"member {i} is idempotent", f"member {i} is not idempotent")
            elif not product.is_zero():
                result.add_error(f"members {i} and {j} are not orthogonal")
    result.check(total == KClass.diagonal(action), "members sum to the diagonal class",
                 "members do not sum to the diagonal class")
    for i, a in enumerate(family):
        worst = max((r for ranks in multiplicity_ranks(a).values() for r in ranks), default=0)
        result.check(worst <= 1, f"member {i} has rank <= 1 on every multiplicity space",
                     f"member {i} has rank {worst} on some multiplicity space")
    result.data['size'] = len(family)
    return result


# ---------------------------------------------------------------------------
# Idempotents
# ---------------------------------------------------------------------------

def abelian_idempotents(action: GAction, base: int = 0) -> List[Tuple[Character, KClass]]:
    """
    t_rho = 1/#Y sum_y rho(g_y^-1) [O(base, y)] for the characters rho of
    C[Y], where g_y moves base to y.
    """
    if not action.is_transitive:
        raise ValueError(f"{action} is not transitive")
    if not action.image_is_abelian:
        raise ValueError(f"{action} does not have abelian image")
    G = action.group
    stabilizer = action.stabilizer(base)
    n = action.degree
    orbits = pair_orbits(action)
    result = []
    for rho in irreducible_characters(G):
        if rho.degree != 1 or not rho.is_trivial_on(stabilizer):
            continue
        coefficients = {}
        for y in range(n):
            k, _ = orbits.locate(base, y)
            g = action.transporter(base, y)
            coefficients[k] = {0: rho(G.inv(g)) / n}
        result.append((rho, KClass(action, coefficients)))
    if len(result) != n:
        raise StructureCheckError(f"Found {len(result)} characters in C[Y] for {n} points")
    logger.debug(f"{len(result)} abelian idempotents for {action}")
    return result


def _require_s3(group: FinGroup):
    if group.order != 6 or group.is_abelian:
        raise UnclassifiedCaseError(f"{group.name} is not S3")


def classify_s3_action(action: GAction) -> str:
    """'point', 'sign', 'three-point' or 'regular'."""
    _require_s3(action.group)
    if not action.is_transitive:
        raise UnclassifiedCaseError(f"unclassified case: non-transitive action on {action.degree} points")
    cases = {1: 'point', 2: 'sign', 3: 'three-point', 6: 'regular'}
    return cases[action.degree]


def _transpositions(group: FinGroup) -> List[int]:
    return [g for g in range(group.order) if group.element_orders[g] == 2]


def three_point_displayed(action: GAction) -> List[KClass]:
    """(1/3)(diagonal + off-diagonal) and (2/3)diagonal - (1/3)off-diagonal."""
    diagonal = KClass.diagonal(action)
    off = KClass.orbit_class(action, 0, 1)
    third = Fraction(1, 3)
    return [(diagonal + off) * third, diagonal * (2 * third) - off * third]


def _three_point_family(action: GAction) -> List[KClass]:
    G = action.group
    first, second = [], []
    for s in G.class_reps:
        points = action.fixed_points(s)
        n = len(points)
        if n == 3:
            j = [[Fraction(1, 3)] * 3 for _ in range(3)]
            first.append(SpecMatrix.build(s, points, j))
            second.append(SpecMatrix.build(s, points, [[(1 if a == b else 0) - j[a][b] for b in range(3)]
                                                       for a in range(3)]))
        elif n == 1:
            first.append(SpecMatrix.build(s, points, [[1]]))
            second.append(SpecMatrix.build(s, points, [[0]]))
    return [KClass.from_specializations(action, first), KClass.from_specializations(action, second)]


def _regular_family(action: GAction) -> List[KClass]:
    G = action.group
    base = 0
    diagonal = KClass.diagonal(action)

    def orbit(g: int) -> KClass:
        return KClass.orbit_class(action, base, action.act(g, base))

    sixth = Fraction(1, 6)
    t_triv = KClass.zero(action)
    t_sgn = KClass.zero(action)
    for g in range(G.order):
        sign = -1 if G.element_orders[g] == 2 else 1
        t_triv = t_triv + orbit(g) * sixth
        t_sgn = t_sgn + orbit(g) * (sign * sixth)
    a, b = _transpositions(G)[:2]
    t_std = ((diagonal + orbit(a)) @ (diagonal - orbit(b))) * Fraction(1, 3)
    t_std2 = diagonal - t_triv - t_sgn - t_std
    return [t_triv, t_sgn, t_std, t_std2]


def s3_idempotents(action: GAction, image: Optional[Sequence[int]] = None) -> List[KClass]:
    """
    Rank one idempotents for the transitive S3-sets, optionally restricted to
    an image subgroup (the non-transitive three-point cases).
    """
    case = classify_s3_action(action)
    if case == 'point':
        family = [KClass.diagonal(action)]
    elif case == 'sign':
        family = [k for _, k in abelian_idempotents(action)]
    elif case == 'three-point':
        family = _three_point_family(action)
    else:
        family = _regular_family(action)

    if image is None:
        logger.debug(f"{len(family)} idempotents for the {case} S3-set")
        return family

    G = action.group
    sub, embedding = G.subgroup(image)
    sub_action = action.restrict(sub, embedding)
    restricted = [k.restrict(sub, embedding, action=sub_action) for k in family]
    restricted = [k for k in restricted if not k.is_zero()]
    tau = next((t for t in _transpositions(G) if all(G.mul(t, h) == G.mul(h, t) for h in embedding)), None)
    return refine_family(restricted, action.perms[tau] if tau is not None else None)


def refine_family(family: Sequence[KClass], perm: Optional[Sequence[int]]) -> List[KClass]:
    """
    Split members of rank > 1 by (diagonal +- graph(perm))/2, for an
    involution perm commuting with the action and with every member.
    """
    refined = []
    for member in family:
        worst = max((r for ranks in multiplicity_ranks(member).values() for r in ranks), default=0)
        if worst <= 1:
            refined.append(member)
            continue
        if perm is None:
            raise UnclassifiedCaseError("unclassified case: no involution available to split a rank 2 member")
        diagonal = KClass.diagonal(member.action)
        swap = KClass.graph(member.action, perm)
        if member @ swap != swap @ member:
            raise UnclassifiedCaseError("unclassified case: the splitting involution does not commute with the member")
        for sign in (1, -1):
            piece = member @ ((diagonal + swap * sign) * Fraction(1, 2))
            if piece.is_zero():
                continue
            worst = max((r for ranks in multiplicity_ranks(piece).values() for r in ranks), default=0)
            if worst > 1:
                raise StructureCheckError(f"Refined member still has rank {worst}")
            refined.append(piece)
    return refined


def displayed_triv3_element(t_std: KClass, t_triv: KClass) -> KClass:
    """t_std - (9/2) t_std * t_triv."""
    return t_std - (t_std @ t_triv) * Fraction(9, 2)


def two_triv_matrices(action: GAction) -> List[List[List[Cyclotomic]]]:
    """
    Matrices of the three-point idempotents restricted to a Z/2 image, on the
    trivial part of C[Y] in the basis (constant function, indicator of the
    moved pair).
    """
    if classify_s3_action(action) != 'three-point':
        raise UnclassifiedCaseError("two-triv matrices need the three-point S3-set")
    G = action.group
    tau = _transpositions(G)[0]
    family = s3_idempotents(action, image=G.closure([tau]))
    moved = [0 if action.act(tau, y) == y else 1 for y in range(action.degree)]
    basis = [[1] * action.degree, moved]
    return [matrix_in_basis(k.specialize_at(k.action.group.identity), basis) for k in family]


# ---------------------------------------------------------------------------
# Centrally extended sets
# ---------------------------------------------------------------------------

def transport_cocycle(action: GAction, cocycle: Cocycle2, base: int, y: int) -> Cocycle2:
    """Move a cocycle on Stab(base) to Stab(y) along some t with t.base = y."""
    G = action.group
    t = action.transporter(base, y)
    H, emb = G.subgroup(action.stabilizer(y))
    _, emb0 = G.subgroup(action.stabilizer(base))
    local0 = {g: i for i, g in enumerate(emb0)}
    back = [local0[G.conj(G.inv(t), g)] for g in emb]
    return Cocycle2(H, cocycle.modulus,
                    [[cocycle(back[a], back[b]) for b in range(H.order)] for a in range(H.order)], check=False)


class CEOrbitData:
    """
    A central extension of each point stabilizer, given by cocycles.

    Cocycles at points of one orbit must agree, up to coboundary, with the
    base cocycle transported along a transversal.
    """

    def __init__(self, action: GAction, cocycles: Mapping[int, Cocycle2]):
        self.action = action
        self._stabilizers: Dict[int, Tuple[FinGroup, Tuple[int, ...]]] = {}
        missing = [y for y in range(action.degree) if y not in cocycles]
        if missing:
            raise ValueError(f"Missing cocycles for points {missing}")
        self.cocycles = dict(cocycles)
        moduli = {c.modulus for c in self.cocycles.values()}
        if len(moduli) != 1:
            raise ValueError(f"Cocycles use different moduli: {sorted(moduli)}")
        self.modulus = moduli.pop()
        for y, c in self.cocycles.items():
            if c.group.table != self.stabilizer(y)[0].table:
                raise ValueError(f"Cocycle at point {y} is not defined on its stabilizer")
        for orbit in action.orbits:
            base = orbit[0]
            for y in orbit[1:]:
                moved = self.transport(base, y)
                split, _ = is_coboundary(self.cocycles[y] - moved)
                if not split:
                    raise ValueError(f"Cocycle at point {y} is not the transport of the cocycle at {base}")

    @classmethod
    def transported(cls, action: GAction, base_cocycles: Mapping[int, Cocycle2]) -> "CEOrbitData":
        """Spread one cocycle per orbit base point to the whole orbit."""
        cocycles = {}
        for orbit in action.orbits:
            if orbit[0] not in base_cocycles:
                raise ValueError(f"Missing cocycle for orbit base point {orbit[0]}")
            for y in orbit:
                cocycles[y] = transport_cocycle(action, base_cocycles[orbit[0]], orbit[0], y)
        return cls(action, cocycles)

    def stabilizer(self, y: int) -> Tuple[FinGroup, Tuple[int, ...]]:
        if y not in self._stabilizers:
            self._stabilizers[y] = self.action.group.subgroup(self.action.stabilizer(y))
        return self._stabilizers[y]

    def transport(self, base: int, y: int) -> Cocycle2:
        return transport_cocycle(self.action, self.cocycles[base], base, y)

    def restrict_to(self, y: int, elements: Sequence[int]) -> Tuple[Cocycle2, FinGroup]:
        """The cocycle at y restricted to a subgroup of its stabilizer."""
        G = self.action.group
        _, emb = self.stabilizer(y)
        local = {g: i for i, g in enumerate(emb)}
        K, kemb = G.subgroup(elements)
        c = self.cocycles[y]
        idx = [local[g] for g in kemb]
        return Cocycle2(K, c.modulus, [[c(idx[a], idx[b]) for b in range(K.order)] for a in range(K.order)],
                        check=False), K


def opp_product_is_split(ce: CEOrbitData, pair: Tuple[int, int]) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """
    Whether the extension of Stab(y1, y2) obtained from the extension at y1
    and the opposite of the extension at y2 splits, with the witness cochain.
    """
    if not ce.action.is_transitive:
        raise ValueError("non-transitive set: opposite products are only checked on transitive sets")
    y1, y2 = pair
    elements = ce.action.pair_stabilizer(y1, y2)
    c1, _ = ce.restrict_to(y1, elements)
    c2, _ = ce.restrict_to(y2, elements)
    return is_coboundary(c1 - c2)


# ---------------------------------------------------------------------------
# Rigid uniqueness
# ---------------------------------------------------------------------------

def rigid_unique(action: GAction, target: Character, base: int = 0) -> KClass:
    """
    Solve for the class j with j mu_rho = delta(rho, target) mu_target at
    every s with nonempty fixed set, and check that it equals t_target.
    """
    family = abelian_idempotents(action, base)
    G = action.group
    orbits = pair_orbits(action)
    unknowns = [(k, i) for k in range(len(orbits)) for i in range(len(orbits.stabilizers[k].characters))]
    column = {u: n for n, u in enumerate(unknowns)}
    characters = [rho for rho, _ in family]
    if target not in characters:
        raise ValueError(f"{target.label} does not occur in C[Y]")

    def mu(rho: Character, y: int) -> Cyclotomic:
        return rho(action.transporter(base, y))

    rows, rhs = [], []
    for s in range(G.order):
        points = action.fixed_points(s)
        if not points:
            continue
        for rho in characters:
            for x in points:
                row = [ZERO] * len(unknowns)
                for z in points:
                    k, t = orbits.locate(x, z)
                    stab = orbits.stabilizers[k]
                    local = stab.local[G.conj(G.inv(t), s)]
                    weight = mu(rho, z)
                    for i, chi in enumerate(stab.characters):
                        row[column[(k, i)]] = row[column[(k, i)]] + chi(local) * weight
                rows.append(row)
                rhs.append(mu(target, x) if rho == target else ZERO)
    solution, kernel = solve(rows, rhs, zero=ZERO)
    if kernel:
        raise StructureCheckError(f"Constraints leave {len(kernel)} free parameters")
    coefficients: Dict[int, Dict[int, Cyclotomic]] = {}
    for (k, i), value in zip(unknowns, solution):
        if value:
            coefficients.setdefault(k, {})[i] = value
    j = KClass(action, coefficients)
    expected = dict((rho, k) for rho, k in family)[target]
    if j != expected:
        raise StructureCheckError(f"Solved class differs from t_{target.label}")
    logger.info(f"✓ Rigid uniqueness holds for {target.label} on {action}")
    return j
