"""
Finite groups as multiplication tables, their actions on finite sets,
character tables and Z/N-valued 2-cocycles.

Usage:
    from jcells.fingroup import standard_groups, irreducible_characters
    G = standard_groups("Z2xS3")
    table = irreducible_characters(G)
"""

import re
import random
import logging
import threading
from collections import OrderedDict, deque
from functools import cached_property
from itertools import product
from math import gcd, isqrt
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import nextprime, primitive_root

from jcells.arith import Cyclotomic
from jcells.config import get_settings
from jcells.errors import StructureCheckError
from jcells.linalg import nullspace_mod_prime, solve_mod, solve_mod_prime

logger = logging.getLogger(__name__)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class FinGroup:
    """A finite group given by its multiplication table on indices 0..order-1."""

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        generators: Sequence[int] = (),
        name: str = "G",
        labels: Optional[Sequence[str]] = None,
        check: bool = True,
    ):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.name = name
        self.labels = tuple(labels) if labels else tuple(str(i) for i in range(self.order))
        self.factors: Tuple["FinGroup", ...] = ()

        if any(len(row) != self.order for row in self.table):
            raise ValueError(f"Multiplication table of {name} is not square")
        identity = next((e for e in range(self.order)
                         if all(self.table[e][g] == g == self.table[g][e] for g in range(self.order))), None)
        if identity is None:
            raise ValueError(f"Multiplication table of {name} has no identity")
        self.identity = identity

        inverse = []
        for g in range(self.order):
            row = self.table[g]
            if sorted(row) != list(range(self.order)):
                raise ValueError(f"Row {g} of the table of {name} is not a permutation")
            inverse.append(row.index(identity))
        self.inverse = tuple(inverse)
        if any(self.table[self.inverse[g]][g] != identity for g in range(self.order)):
            raise ValueError(f"Inverse table of {name} is inconsistent")

        self.generators = tuple(generators) if generators else tuple(g for g in range(self.order) if g != identity)
        if check:
            self._check_associative()
        if len(self.closure(self.generators)) != self.order:
            raise ValueError(f"Generators {self.generators} do not generate {name}")

    def _check_associative(self):
        settings = get_settings()
        n = self.order
        t = self.table
        if n <= settings.exhaustive_associativity_order:
            triples = product(range(n), repeat=3)
        else:
            rng = random.Random(n)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                       for _ in range(settings.associativity_sample))
        for a, b, c in triples:
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise ValueError(f"Table of {self.name} is not associative at ({a}, {b}, {c})")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def from_permutations(cls, generators: Sequence[Sequence[int]], name: str = "G") -> "FinGroup":
        """The group generated by permutations of 0..m-1, elements in breadth-first order."""
        gens = [tuple(p) for p in generators]
        m = len(gens[0]) if gens else 0
        identity = tuple(range(m))
        elements = [identity]
        index = {identity: 0}
        queue = deque([identity])
        while queue:
            x = queue.popleft()
            for p in gens:
                y = tuple(p[x[i]] for i in range(m))
                if y not in index:
                    index[y] = len(elements)
                    elements.append(y)
                    queue.append(y)
        table = [[index[tuple(a[b[i]] for i in range(m))] for b in elements] for a in elements]
        labels = [_cycle_notation(p) for p in elements]
        group = cls(table, generators=[index[p] for p in gens], name=name, labels=labels)
        group.permutations = tuple(elements)
        return group

    # -- basic operations -----------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, g: int, h: int) -> int:
        """g h g^-1"""
        return self.table[self.table[g][h]][self.inverse[g]]

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverse[g], -k
        result = self.identity
        for _ in range(k):
            result = self.table[result][g]
        return result

    def label(self, g: int) -> str:
        return self.labels[g]

    def element(self, text: str) -> int:
        """Element index from an index string or a label."""
        if text in self.labels:
            return self.labels.index(text)
        try:
            g = int(text)
        except ValueError:
            raise ValueError(f"Unknown element {text!r} of {self.name}; labels are {list(self.labels)}")
        if not 0 <= g < self.order:
            raise ValueError(f"Element index {g} out of range for {self.name} of order {self.order}")
        return g

    def closure(self, elements: Iterable[int]) -> Tuple[int, ...]:
        """The subgroup generated by the given elements."""
        found = {self.identity}
        frontier = [self.identity]
        gens = list(elements)
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.table[g][x]
                    if y not in found:
                        found.add(y)
                        new.append(y)
            frontier = new
        return tuple(sorted(found))

    # -- derived structure -----------------------------------------------------

    @cached_property
    def element_orders(self) -> Tuple[int, ...]:
        orders = []
        for g in range(self.order):
            k, x = 1, g
            while x != self.identity:
                x = self.table[x][g]
                k += 1
            orders.append(k)
        return tuple(orders)

    @cached_property
    def exponent(self) -> int:
        e = 1
        for o in self.element_orders:
            e = _lcm(e, o)
        return e

    @cached_property
    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a] for a in self.generators for b in self.generators)

    @cached_property
    def conjugacy_classes(self) -> Tuple[Tuple[int, ...], ...]:
        """Classes sorted by smallest element, so the identity class comes first."""
        seen = set()
        classes = []
        for g in range(self.order):
            if g in seen:
                continue
            cls_ = tuple(sorted({self.conj(x, g) for x in range(self.order)}))
            seen.update(cls_)
            classes.append(cls_)
        classes.sort(key=lambda c: (c[0] != self.identity, c[0]))
        return tuple(classes)

    @cached_property
    def class_index(self) -> Tuple[int, ...]:
        index = [0] * self.order
        for i, cls_ in enumerate(self.conjugacy_classes):
            for g in cls_:
                index[g] = i
        return tuple(index)

    @property
    def class_reps(self) -> Tuple[int, ...]:
        return tuple(c[0] for c in self.conjugacy_classes)

    @cached_property
    def conjugators(self) -> Tuple[int, ...]:
        """For each g, some x with x . rep . x^-1 = g where rep is the class representative."""
        result = [None] * self.order
        for cls_ in self.conjugacy_classes:
            rep = cls_[0]
            for x in range(self.order):
                g = self.conj(x, rep)
                if result[g] is None:
                    result[g] = x
        return tuple(result)

    def centralizer(self, g: int) -> Tuple[int, ...]:
        return tuple(x for x in range(self.order) if self.table[x][g] == self.table[g][x])

    def is_subgroup(self, elements: Iterable[int]) -> bool:
        elements = set(elements)
        return self.identity in elements and all(self.table[a][self.inverse[b]] in elements
                                                 for a in elements for b in elements)

    def subgroup(self, elements: Iterable[int], name: Optional[str] = None) -> Tuple["FinGroup", Tuple[int, ...]]:
        """
        The subgroup on the given elements as its own FinGroup.

        Returns:
            (subgroup, embedding) where embedding[i] is the element of self
            that subgroup element i stands for
        """
        embedding = tuple(sorted(set(elements)))
        if not self.is_subgroup(embedding):
            raise ValueError(f"{list(embedding)} is not a subgroup of {self.name}")
        local = {g: i for i, g in enumerate(embedding)}
        table = [[local[self.table[a][b]] for b in embedding] for a in embedding]
        gens = _small_generating_set(self, embedding)
        sub = FinGroup(table, generators=[local[g] for g in gens],
                       name=name or f"{self.name}<{','.join(map(str, embedding))}>",
                       labels=[self.labels[g] for g in embedding], check=False)
        return sub, embedding

    @cached_property
    def subgroups(self) -> Tuple[Tuple[int, ...], ...]:
        """All subgroups as sorted element tuples."""
        found = {self.closure([g]) for g in range(self.order)}
        frontier = set(found)
        while frontier:
            new = set()
            for h in frontier:
                for k in found:
                    joined = self.closure(set(h) | set(k))
                    if joined not in found and joined not in new:
                        new.add(joined)
            found |= new
            frontier = new
        return tuple(sorted(found, key=lambda s: (len(s), s)))

    def __repr__(self):
        return f"FinGroup({self.name}, order={self.order})"


def _small_generating_set(group: FinGroup, elements: Sequence[int]) -> List[int]:
    gens: List[int] = []
    span = group.closure([])
    for g in elements:
        if g not in span:
            gens.append(g)
            span = group.closure(gens)
    return gens


def _cycle_notation(perm: Sequence[int]) -> str:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cycle.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append("(" + "".join(str(i + 1) for i in cycle) + ")")
    return "".join(cycles) or "()"


def cyclic(n: int) -> FinGroup:
    if n < 1:
        raise ValueError(f"Invalid cyclic group order: {n}")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FinGroup(table, generators=[1 % n], name=f"Z{n}", labels=[str(i) for i in range(n)])


def symmetric3() -> FinGroup:
    """S3 generated by the transpositions (12) and (23)."""
    return FinGroup.from_permutations([(1, 0, 2), (0, 2, 1)], name="S3")


def direct_product(g: FinGroup, h: FinGroup, name: Optional[str] = None) -> FinGroup:
    """Element (a, b) has index a * |h| + b."""
    n, m = g.order, h.order
    table = [[g.table[a1][a2] * m + h.table[b1][b2] for a2 in range(n) for b2 in range(m)]
             for a1 in range(n) for b1 in range(m)]
    gens = [a * m + h.identity for a in g.generators] + [g.identity * m + b for b in h.generators]
    labels = [f"({g.labels[a]},{h.labels[b]})" for a in range(n) for b in range(m)]
    group = FinGroup(table, generators=gens, name=name or f"{g.name}x{h.name}", labels=labels, check=False)
    group.factors = (g, h)
    return group


def elementary_abelian_2(k: int) -> FinGroup:
    if k < 0:
        raise ValueError(f"Invalid rank for an elementary abelian 2-group: {k}")
    if k == 0:
        return cyclic(1)
    group = cyclic(2)
    for _ in range(k - 1):
        group = direct_product(group, cyclic(2))
    group.name = f"Z2^{k}" if k > 1 else "Z2"
    return group


_SPEC_PATTERNS = [
    (re.compile(r'(?:cyclic\((\d+)\)|Z(\d+))$'), lambda m: cyclic(int(m.group(1) or m.group(2)))),
    (re.compile(r'(?:elementary-abelian-2\((\d+)\)|Z2\^(\d+))$'),
     lambda m: elementary_abelian_2(int(m.group(1) or m.group(2)))),
    (re.compile(r'S3$'), lambda m: symmetric3()),
]


def standard_groups(spec: str) -> FinGroup:
    """
    Named groups: cyclic(n) / Zn, elementary-abelian-2(k) / Z2^k, S3, and
    direct products written with 'x', e.g. 'Z2xS3' or 'cyclic(2) x S3'.
    """
    pieces = [p for p in re.split(r'\s*[x×]\s*', spec.strip()) if p]
    if not pieces:
        raise ValueError(f"unsupported group spec: {spec!r}")
    groups = []
    for piece in pieces:
        for pattern, build in _SPEC_PATTERNS:
            match = pattern.match(piece)
            if match:
                groups.append(build(match))
                break
        else:
            raise ValueError(f"unsupported group spec: {piece!r} in {spec!r}")
    group = groups[0]
    for other in groups[1:]:
        group = direct_product(group, other)
    logger.debug(f"Built {group.name} of order {group.order}")
    return group


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------

class Character:
    """A class function with cyclotomic values, one per conjugacy class."""

    def __init__(self, group: FinGroup, values: Sequence, label: str = ""):
        if len(values) != len(group.conjugacy_classes):
            raise ValueError(f"Character of {group.name} needs {len(group.conjugacy_classes)} values")
        self.group = group
        self.values = tuple(Cyclotomic(v.order, v.coords).lift(_lcm(v.order, group.exponent))
                            if isinstance(v, Cyclotomic) else Cyclotomic(group.exponent, [v])
                            for v in values)
        self.label = label

    def __call__(self, g: int) -> Cyclotomic:
        return self.values[self.group.class_index[g]]

    @property
    def degree(self) -> int:
        return int(self.values[0].to_fraction())

    def inner(self, other: "Character") -> Cyclotomic:
        """<self, other> = 1/|G| sum_g self(g) conj(other(g))."""
        total = Cyclotomic(self.group.exponent)
        for cls_, a, b in zip(self.group.conjugacy_classes, self.values, other.values):
            total = total + a * b.conjugate() * len(cls_)
        return total / self.group.order

    def inner_with(self, class_function: Sequence) -> Cyclotomic:
        """<class_function, self> for a class function given per class."""
        total = Cyclotomic(self.group.exponent)
        for cls_, a, b in zip(self.group.conjugacy_classes, class_function, self.values):
            total = total + b.conjugate() * a * len(cls_)
        return total / self.group.order

    def is_trivial_on(self, elements: Iterable[int]) -> bool:
        d = self.values[0]
        return all(self(g) == d for g in elements)

    def __eq__(self, other):
        return isinstance(other, Character) and self.group.table == other.group.table and self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"Character({self.label or '?'} of {self.group.name}: {[str(v) for v in self.values]})"


TABLE_CACHE_SIZE = 128
_TABLES: "OrderedDict[Tuple, Tuple[Tuple[Tuple[Cyclotomic, ...], str], ...]]" = OrderedDict()
_TABLE_LOCK = threading.Lock()


def irreducible_characters(group: FinGroup) -> List[Character]:
    """
    All irreducible characters, trivial character first.

    The last TABLE_CACHE_SIZE tables are memoised per group structure. Abelian groups use homomorphisms
    to Z/exponent, S3 and direct products use known tables, anything else goes
    through mod-p splitting of the class algebra.
    """
    bound = get_settings().max_character_table_order
    if group.order > bound:
        raise ValueError(f"Group order {group.order} exceeds the character table bound {bound}")

    key = (group.name, group.order, group.table)
    with _TABLE_LOCK:
        cached = _TABLES.get(key)
        if cached is not None:
            _TABLES.move_to_end(key)
    if cached is None:
        if group.is_abelian:
            chars = _abelian_characters(group)
        elif group.order == 6:
            chars = _s3_characters(group)
        elif group.factors:
            chars = _product_characters(group)
        else:
            chars = dixon_characters(group)
        _verify_table(group, chars)
        chars.sort(key=lambda c: (not all(v == 1 for v in c.values), c.degree, c.label))
        cached = tuple((c.values, c.label) for c in chars)
        with _TABLE_LOCK:
            _TABLES[key] = cached
            while len(_TABLES) > TABLE_CACHE_SIZE:
                _TABLES.popitem(last=False)
        logger.debug(f"Computed {len(cached)} irreducible characters of {group.name}")
    return [Character(group, values, label) for values, label in cached]


def _verify_table(group: FinGroup, chars: List[Character]):
    if sum(c.degree ** 2 for c in chars) != group.order:
        raise StructureCheckError(f"Character degrees of {group.name} do not satisfy sum of squares = |G|")
    if len(chars) != len(group.conjugacy_classes):
        raise StructureCheckError(f"{group.name} has {len(group.conjugacy_classes)} classes but {len(chars)} characters")
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            if a.inner(b) != (1 if i == j else 0):
                raise StructureCheckError(f"Characters {a.label} and {b.label} of {group.name} are not orthonormal")


def homomorphisms_to_cyclic(group: FinGroup, n: int) -> List[Tuple[int, ...]]:
    """All homomorphisms group -> Z/n, as value tuples indexed by element."""
    gens = group.generators
    choices = [[a for a in range(n) if (a * group.element_orders[g]) % n == 0] for g in gens]
    homs = []
    for assignment in product(*choices):
        values: List[Optional[int]] = [None] * group.order
        values[group.identity] = 0
        queue = deque([group.identity])
        ok = True
        while queue and ok:
            x = queue.popleft()
            for g, a in zip(gens, assignment):
                y = group.table[g][x]
                v = (a + values[x]) % n
                if values[y] is None:
                    values[y] = v
                    queue.append(y)
                elif values[y] != v:
                    ok = False
                    break
        if ok:
            homs.append(tuple(values))
    return homs


def _abelian_characters(group: FinGroup) -> List[Character]:
    e = group.exponent
    chars = []
    for hom in homomorphisms_to_cyclic(group, e):
        values = [Cyclotomic.root_of_unity(e, hom[c[0]]) for c in group.conjugacy_classes]
        exps = [hom[g] for g in group.generators]
        if all(v == 0 for v in exps):
            label = "triv"
        elif e == 2 and len(exps) == 1:
            label = "sgn"
        else:
            label = "chi[" + ",".join(str(v) for v in exps) + "]"
        chars.append(Character(group, values, label))
    return chars


def _s3_characters(group: FinGroup) -> List[Character]:
    if group.is_abelian:
        raise ValueError(f"{group.name} is not S3")
    orders = [group.element_orders[c[0]] for c in group.conjugacy_classes]
    table = {
        'triv': {1: 1, 2: 1, 3: 1},
        'sgn': {1: 1, 2: -1, 3: 1},
        'std': {1: 2, 2: 0, 3: -1},
    }
    return [Character(group, [Cyclotomic.rational(row[o]) for o in orders], label) for label, row in table.items()]


def _product_characters(group: FinGroup) -> List[Character]:
    g, h = group.factors
    m = h.order
    chars = []
    for a in irreducible_characters(g):
        for b in irreducible_characters(h):
            values = []
            for cls_ in group.conjugacy_classes:
                x = cls_[0]
                values.append(a(x // m) * b(x % m))
            chars.append(Character(group, values, f"{a.label}x{b.label}"))
    return chars


def dixon_characters(group: FinGroup) -> List[Character]:
    """
    Character table by simultaneous diagonalisation of the class matrices
    modulo a prime p = 1 mod exponent, then exact recovery of each value from
    eigenvalue multiplicities.
    """
    n = group.order
    e = group.exponent
    classes = group.conjugacy_classes
    k = len(classes)
    cidx = group.class_index
    sizes = [len(c) for c in classes]

    p = nextprime(2 * n)
    while (p - 1) % e:
        p = nextprime(p)
    zeta = pow(primitive_root(p), (p - 1) // e, p)

    # M_r[s][t] = #{x in C_r : x^-1 g_t in C_s}
    matrices = []
    for r in range(1, k):
        m = [[0] * k for _ in range(k)]
        for t in range(k):
            gt = classes[t][0]
            for x in classes[r]:
                m[cidx[group.mul(group.inv(x), gt)]][t] += 1
        matrices.append([[v % p for v in row] for row in m])

    spaces = [[[1 if i == j else 0 for i in range(k)] for j in range(k)]]
    for m in matrices:
        refined = []
        for basis in spaces:
            if len(basis) == 1:
                refined.append(basis)
                continue
            refined.extend(_split_eigenspaces(m, basis, p))
        spaces = refined
    if any(len(b) != 1 for b in spaces) or len(spaces) != k:
        raise StructureCheckError(f"Class algebra of {group.name} did not split modulo {p}")

    inv_class = [cidx[group.inv(c[0])] for c in classes]
    chars = []
    for index, (w,) in enumerate(spaces):
        scale = pow(w[0], -1, p)
        omega = [(x * scale) % p for x in w]
        s = sum(omega[t] * omega[inv_class[t]] * pow(sizes[t], -1, p) for t in range(k)) % p
        d2 = (n * pow(s, -1, p)) % p
        degree = next((d for d in range(1, isqrt(n) + 1) if (d * d) % p == d2), None)
        if degree is None:
            raise StructureCheckError(f"No character degree matches {d2} mod {p} for {group.name}")
        modp = [(degree * omega[t] * pow(sizes[t], -1, p)) % p for t in range(k)]

        values = []
        for t in range(k):
            g = classes[t][0]
            o = group.element_orders[g]
            zeta_o = pow(zeta, e // o, p)
            powers = [modp[cidx[group.power(g, l)]] for l in range(o)]
            value = Cyclotomic(e)
            for j in range(o):
                mult = sum(powers[l] * pow(zeta_o, (-j * l) % o, p) for l in range(o)) * pow(o, -1, p) % p
                if mult > degree:
                    raise StructureCheckError(f"Eigenvalue multiplicity {mult} exceeds degree {degree}")
                if mult:
                    value = value + Cyclotomic.root_of_unity(e, j * (e // o)) * mult
            values.append(value)
        chars.append(Character(group, values, f"chi{index}"))
    return chars


def _split_eigenspaces(m: List[List[int]], basis: List[List[int]], p: int) -> List[List[List[int]]]:
    """Split the invariant subspace spanned by basis into eigenspaces of m (mod p)."""
    k = len(m)
    d = len(basis)
    images = [[sum(m[i][j] * b[j] for j in range(k)) % p for i in range(k)] for b in basis]
    # Coordinates of each image in the basis: solve basis^T . c = image
    coords = []
    for image in images:
        rows = [[basis[j][i] for j in range(d)] + [image[i]] for i in range(k)]
        coords.append(solve_mod_prime(rows, d, p))
    restricted = [[coords[j][i] for j in range(d)] for i in range(d)]
    pieces = []
    found = 0
    for lam in range(p):
        shifted = [[(restricted[i][j] - (lam if i == j else 0)) % p for j in range(d)] for i in range(d)]
        kernel = nullspace_mod_prime(shifted, d, p)
        if kernel:
            pieces.append([[sum(v[j] * basis[j][i] for j in range(d)) % p for i in range(k)] for v in kernel])
            found += len(kernel)
            if found == d:
                break
    if found != d:
        raise StructureCheckError(f"Class matrix is not diagonalisable modulo {p}")
    return pieces


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------

class GAction:
    """A group acting on points 0..degree-1; perms[g][y] = g . y."""

    def __init__(self, group: FinGroup, degree: int, perms: Sequence[Sequence[int]], check: bool = True):
        self.group = group
        self.degree = degree
        self.perms = tuple(tuple(p) for p in perms)
        if len(self.perms) != group.order:
            raise ValueError(f"Expected {group.order} permutations, got {len(self.perms)}")
        if check:
            for g, perm in enumerate(self.perms):
                if sorted(perm) != list(range(degree)):
                    raise ValueError(f"Image of element {g} is not a permutation of {degree} points")
            for g in range(group.order):
                for h in range(group.order):
                    gh = self.perms[group.mul(g, h)]
                    pg, ph = self.perms[g], self.perms[h]
                    if any(gh[y] != pg[ph[y]] for y in range(degree)):
                        raise ValueError("non-homomorphic action data")

    @classmethod
    def from_generators(cls, group: FinGroup, images: Sequence[Sequence[int]]) -> "GAction":
        """Extend permutations given for group.generators to the whole group."""
        if len(images) != len(group.generators):
            raise ValueError(f"{group.name} has {len(group.generators)} generators, got {len(images)} permutations")
        degree = len(images[0]) if images else 0
        perms: List[Optional[Tuple[int, ...]]] = [None] * group.order
        perms[group.identity] = tuple(range(degree))
        queue = deque([group.identity])
        while queue:
            x = queue.popleft()
            for g, image in zip(group.generators, images):
                if len(image) != degree:
                    raise ValueError("All generator permutations must act on the same number of points")
                y = group.mul(g, x)
                candidate = tuple(image[perms[x][pt]] for pt in range(degree))
                if perms[y] is None:
                    perms[y] = candidate
                    queue.append(y)
                elif perms[y] != candidate:
                    raise ValueError("non-homomorphic action data")
        return cls(group, degree, perms)

    @classmethod
    def coset_action(cls, group: FinGroup, subgroup: Iterable[int]) -> "GAction":
        """Left multiplication on cosets gH; the coset H is point 0."""
        h = tuple(sorted(set(subgroup)))
        if not group.is_subgroup(h):
            raise ValueError(f"{list(h)} is not a subgroup of {group.name}")
        coset_of = {}
        cosets = []
        for g in [group.identity] + [x for x in range(group.order) if x != group.identity]:
            if g in coset_of:
                continue
            coset = tuple(sorted(group.mul(g, x) for x in h))
            for y in coset:
                coset_of[y] = len(cosets)
            cosets.append(coset)
        perms = [[coset_of[group.mul(g, c[0])] for c in cosets] for g in range(group.order)]
        return cls(group, len(cosets), perms, check=False)

    @classmethod
    def trivial(cls, group: FinGroup, degree: int) -> "GAction":
        return cls(group, degree, [tuple(range(degree))] * group.order, check=False)

    def act(self, g: int, y: int) -> int:
        return self.perms[g][y]

    @cached_property
    def orbits(self) -> Tuple[Tuple[int, ...], ...]:
        seen = set()
        orbits = []
        for y in range(self.degree):
            if y in seen:
                continue
            orbit = tuple(sorted({self.perms[g][y] for g in range(self.group.order)}))
            seen.update(orbit)
            orbits.append(orbit)
        return tuple(orbits)

    @property
    def is_transitive(self) -> bool:
        return len(self.orbits) == 1

    def stabilizer(self, y: int) -> Tuple[int, ...]:
        return tuple(g for g in range(self.group.order) if self.perms[g][y] == y)

    def pair_stabilizer(self, x: int, z: int) -> Tuple[int, ...]:
        return tuple(g for g in range(self.group.order) if self.perms[g][x] == x and self.perms[g][z] == z)

    def fixed_points(self, s: int) -> Tuple[int, ...]:
        return tuple(y for y in range(self.degree) if self.perms[s][y] == y)

    def transporter(self, x: int, y: int) -> int:
        """Some g with g . x = y."""
        for g in range(self.group.order):
            if self.perms[g][x] == y:
                return g
        raise ValueError(f"Points {x} and {y} are in different orbits")

    @cached_property
    def image_is_abelian(self) -> bool:
        gens = [self.perms[g] for g in self.group.generators]
        return all(tuple(a[b[y]] for y in range(self.degree)) == tuple(b[a[y]] for y in range(self.degree))
                   for a in gens for b in gens)

    def permutation_character(self) -> List[int]:
        """Number of fixed points, per conjugacy class."""
        return [len(self.fixed_points(c[0])) for c in self.group.conjugacy_classes]

    def restrict(self, subgroup: FinGroup, embedding: Sequence[int]) -> "GAction":
        """The action of a subgroup (given with its embedding)."""
        return GAction(subgroup, self.degree, [self.perms[g] for g in embedding], check=False)

    def __repr__(self):
        return f"GAction({self.group.name} on {self.degree} points)"


def decompose_permutation_character(action: GAction) -> List[Tuple[Character, int]]:
    """Irreducible constituents of C[points] with their multiplicities."""
    perm_char = action.permutation_character()
    result = []
    for chi in irreducible_characters(action.group):
        m = chi.inner_with(perm_char)
        if not m.is_rational() or m.to_fraction().denominator != 1:
            raise StructureCheckError(f"Non-integral multiplicity {m} of {chi.label}")
        if m.to_fraction():
            result.append((chi, int(m.to_fraction())))
    return result


# ---------------------------------------------------------------------------
# 2-cocycles
# ---------------------------------------------------------------------------

class Cocycle2:
    """Normalised Z/modulus-valued 2-cocycle with trivial action."""

    def __init__(self, group: FinGroup, modulus: int, values, check: bool = True):
        if modulus <= 0:
            raise ValueError(f"Invalid modulus: {modulus}. Expected a positive integer")
        n = group.order
        if isinstance(values, Mapping):
            table = [[0] * n for _ in range(n)]
            for (g, h), v in values.items():
                table[g][h] = v % modulus
        else:
            table = [[v % modulus for v in row] for row in values]
        self.group = group
        self.modulus = modulus
        self.table = tuple(tuple(row) for row in table)
        if check:
            self._check()

    def _check(self):
        G, c, N = self.group, self.table, self.modulus
        e = G.identity
        for g in range(G.order):
            if c[e][g] or c[g][e]:
                raise ValueError(f"Cocycle is not normalised at element {g}")
        for g in range(G.order):
            for h in range(G.order):
                gh = G.mul(g, h)
                for k in range(G.order):
                    if (c[g][h] + c[gh][k] - c[h][k] - c[g][G.mul(h, k)]) % N:
                        raise ValueError(f"Cocycle identity fails at ({g}, {h}, {k})")

    def __call__(self, g: int, h: int) -> int:
        return self.table[g][h]

    @classmethod
    def zero(cls, group: FinGroup, modulus: int) -> "Cocycle2":
        return cls(group, modulus, [[0] * group.order for _ in range(group.order)], check=False)

    @classmethod
    def coboundary(cls, group: FinGroup, modulus: int, cochain: Sequence[int]) -> "Cocycle2":
        """db(g, h) = b(g) + b(h) - b(gh); cochain must vanish at the identity."""
        if cochain[group.identity] % modulus:
            raise ValueError("Cochain must vanish at the identity")
        table = [[cochain[g] + cochain[h] - cochain[group.mul(g, h)] for h in range(group.order)]
                 for g in range(group.order)]
        return cls(group, modulus, table, check=False)

    def __add__(self, other: "Cocycle2") -> "Cocycle2":
        if other.group.table != self.group.table or other.modulus != self.modulus:
            raise ValueError("Cocycles live on different groups or moduli")
        return Cocycle2(self.group, self.modulus,
                        [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.table, other.table)], check=False)

    def __neg__(self) -> "Cocycle2":
        return Cocycle2(self.group, self.modulus, [[-a for a in row] for row in self.table], check=False)

    def __sub__(self, other: "Cocycle2") -> "Cocycle2":
        return self + (-other)

    def __eq__(self, other):
        return (isinstance(other, Cocycle2) and self.modulus == other.modulus
                and self.group.table == other.group.table and self.table == other.table)

    def __hash__(self):
        return hash((self.modulus, self.table))


def carry_cocycle(group: FinGroup, modulus: int = 2) -> Cocycle2:
    """On Z/n (as built by cyclic), c(a, b) = 1 when a + b >= n: the extension Z/(n*modulus)."""
    n = group.order
    if group.table != cyclic(n).table:
        raise ValueError(f"{group.name} is not presented as cyclic({n})")
    return Cocycle2(group, modulus, [[1 if a + b >= n else 0 for b in range(n)] for a in range(n)])


def bilinear_cocycle(group: FinGroup, left: Sequence[int], right: Sequence[int], modulus: int) -> Cocycle2:
    """c(g, h) = left(g) * right(h) for homomorphisms left, right: group -> Z/modulus."""
    return Cocycle2(group, modulus, [[left[g] * right[h] for h in range(group.order)] for g in range(group.order)],
                    check=False)


def is_coboundary(c: Cocycle2) -> Tuple[bool, Optional[Tuple[int, ...]]]:
    """
    Decide whether c = db by solving the linear system over Z/N.

    Returns:
        (True, b) with the witness cochain, or (False, None)
    """
    G, N = c.group, c.modulus
    if N <= 0:
        raise ValueError("modulus 0")
    rows = []
    rhs = []
    for g in range(G.order):
        for h in range(G.order):
            row = [0] * G.order
            row[g] += 1
            row[h] += 1
            row[G.mul(g, h)] -= 1
            rows.append(row)
            rhs.append(c(g, h))
    solution = solve_mod(rows, rhs, N)
    if solution is None:
        return False, None
    witness = tuple(solution)
    if Cocycle2.coboundary(G, N, witness) != c:
        raise StructureCheckError("Coboundary witness does not reproduce the cocycle")
    return True, witness
