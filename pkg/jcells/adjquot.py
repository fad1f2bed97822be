"""
Adjoint quotients of torus-by-finite groups, at the level of lattices.

A finite group Gamma acts on the cocharacter lattice Z^n of a torus. For
each conjugacy class of gamma the quotient has a component of dimension
d(gamma) = rank of the coinvariants Z^n / (1 - gamma) Z^n, and the
centralizer of gamma acts on what is left.

Usage:
    from jcells.adjquot import LatticeAuto, coinvariants
    report = coinvariants(LatticeAuto.parse("0,1;1,0"))
    print(report.free_rank, report.torsion)   # 1 []
"""

import random
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from jcells.arith import TorusChar
from jcells.config import get_settings
from jcells.errors import StructureCheckError
from jcells.fingroup import FinGroup
from jcells.jmodels import entry_satisfies
from jcells.linalg import (SmithNormalForm, determinant, identity, integer_rank, matmul, nullspace, solve)
from jcells.report import ValidationResult
from jcells.repring import RingSpec, fundamental_character

logger = logging.getLogger(__name__)

IntMatrix = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class LatticeAuto:
    """gamma acting on Z^n by an invertible integer matrix of finite order."""
    matrix: IntMatrix

    def __post_init__(self):
        n = len(self.matrix)
        if n == 0 or any(len(row) != n for row in self.matrix):
            raise ValueError("Invalid lattice automorphism: expected a nonempty square matrix")
        if abs(determinant([list(r) for r in self.matrix])) != 1:
            raise ValueError(f"Invalid lattice automorphism {self.to_text()}: determinant must be +1 or -1")
        _ = self.order

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> "LatticeAuto":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))

    @classmethod
    def parse(cls, text: str) -> "LatticeAuto":
        """Rows separated by ';', entries by ',': "0,1;1,0"."""
        try:
            rows = [[int(x) for x in row.split(',')] for row in text.strip().split(';') if row.strip()]
        except ValueError:
            raise ValueError(f"Could not parse matrix: {text!r}. Expected e.g. '0,1;1,0'")
        return cls.of(rows)

    @classmethod
    def identity(cls, n: int) -> "LatticeAuto":
        return cls.of(identity(n))

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def order(self) -> int:
        bound = get_settings().max_lattice_order
        one = tuple(tuple(r) for r in identity(self.rank))
        power = self.matrix
        for k in range(1, bound + 1):
            if power == one:
                return k
            power = _mul(power, self.matrix)
        raise ValueError(f"infinite-order input: {self.to_text()} has no order up to {bound}")

    def __matmul__(self, other: "LatticeAuto") -> "LatticeAuto":
        return LatticeAuto(_mul(self.matrix, other.matrix))

    def fixed_rank(self) -> int:
        """Rank of the gamma-fixed sublattice."""
        return self.rank - integer_rank(_minus_identity(self.matrix))

    def to_text(self) -> str:
        return ";".join(",".join(str(x) for x in row) for row in self.matrix)


def _mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return tuple(tuple(r) for r in matmul(a, b))


def _minus_identity(m: IntMatrix) -> List[List[int]]:
    return [[(1 if i == j else 0) - x for j, x in enumerate(row)] for i, row in enumerate(m)]


@dataclass
class CoinvariantReport:
    free_rank: int
    torsion: List[int]
    fixed_rank: int

    @property
    def d(self) -> int:
        return self.free_rank

    def to_dict(self) -> Dict:
        return {'d': self.free_rank, 'free_rank': self.free_rank, 'torsion': list(self.torsion),
                'fixed_rank': self.fixed_rank}


def coinvariants(a: LatticeAuto) -> CoinvariantReport:
    """Z^n / (1 - gamma) Z^n via the Smith form of 1 - gamma."""
    factors = SmithNormalForm(_minus_identity(a.matrix)).invariant_factors()
    free_rank = a.rank - len(factors)
    torsion = [f for f in factors if f > 1]
    report = CoinvariantReport(free_rank, torsion, a.fixed_rank())
    if report.free_rank != report.fixed_rank:
        raise StructureCheckError(f"Coinvariants of {a.to_text()} have rank {free_rank}, fixed lattice {report.fixed_rank}")
    return report


def naive_cokernel(matrix: Sequence[Sequence[int]], modulus: int) -> int:
    """
    |Z^n / (image + modulus Z^n)| by enumerating the image mod modulus;
    a slow oracle for the Smith form.
    """
    n = len(matrix)
    columns = [tuple(matrix[i][j] % modulus for i in range(n)) for j in range(len(matrix[0]))]
    seen = {tuple([0] * n)}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for c in columns:
            w = tuple((x + y) % modulus for x, y in zip(v, c))
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return modulus ** n // len(seen)


# ---------------------------------------------------------------------------
# Actions of a finite group
# ---------------------------------------------------------------------------

def actions_from_generators(group: FinGroup, images: Sequence[LatticeAuto]) -> Dict[int, LatticeAuto]:
    """Extend matrices given for group.generators to a homomorphism."""
    if len(images) != len(group.generators):
        raise ValueError(f"{group.name} has {len(group.generators)} generators, got {len(images)} matrices")
    n = images[0].rank if images else 0
    actions: Dict[int, LatticeAuto] = {group.identity: LatticeAuto.identity(n)}
    queue = deque([group.identity])
    while queue:
        x = queue.popleft()
        for g, image in zip(group.generators, images):
            y = group.mul(g, x)
            candidate = image @ actions[x]
            if y not in actions:
                actions[y] = candidate
                queue.append(y)
            elif actions[y] != candidate:
                raise ValueError("non-homomorphic action data")
    return actions


def check_homomorphism(group: FinGroup, actions: Mapping[int, LatticeAuto]):
    if set(actions) != set(range(group.order)):
        raise ValueError(f"Actions must be given for all {group.order} elements of {group.name}")
    for g in range(group.order):
        for h in range(group.order):
            if actions[g] @ actions[h] != actions[group.mul(g, h)]:
                raise ValueError("non-homomorphic action data")


def _fixed_basis(a: LatticeAuto) -> List[List[Fraction]]:
    return nullspace([[Fraction(x) for x in row] for row in _minus_identity(a.matrix)], a.rank)


def _restrict_to_fixed(h: LatticeAuto, basis: List[List[Fraction]]) -> Tuple[Tuple[Fraction, ...], ...]:
    """Matrix of h on span(basis), columns = coordinates of h b_k."""
    if not basis:
        return ()
    columns_as_rows = [list(col) for col in zip(*basis)]
    coords = []
    for b in basis:
        image = [sum(Fraction(x) * y for x, y in zip(row, b)) for row in h.matrix]
        solution, _ = solve(columns_as_rows, image)
        coords.append(tuple(solution))
    return tuple(tuple(c[k] for c in coords) for k in range(len(basis)))


@dataclass
class QuotientComponent:
    gamma: int
    label: str
    class_size: int
    d: int
    torsion: List[int]
    centralizer_order: int
    residual_order: int
    residual: List[Tuple[Tuple[Fraction, ...], ...]] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'gamma': self.label,
            'class_size': self.class_size,
            'd': self.d,
            'torsion': list(self.torsion),
            'centralizer_order': self.centralizer_order,
            'residual_order': self.residual_order,
            'residual': [[[str(x) for x in row] for row in m] for m in self.residual],
        }


def component_quotient(rank: int, group: FinGroup, actions: Mapping[int, LatticeAuto]) -> List[QuotientComponent]:
    """
    One component per conjugacy class of Gamma: its dimension d(gamma) and
    the image of the centralizer of gamma on the gamma-fixed lattice, which
    acts in the second quotient step.
    """
    if any(a.rank != rank for a in actions.values()):
        raise ValueError(f"All lattice automorphisms must have rank {rank}")
    check_homomorphism(group, actions)
    components = []
    for members in group.conjugacy_classes:
        gamma = members[0]
        report = coinvariants(actions[gamma])
        basis = _fixed_basis(actions[gamma])
        residual = []
        for h in group.centralizer(gamma):
            m = _restrict_to_fixed(actions[h], basis)
            if m not in residual:
                residual.append(m)
        components.append(QuotientComponent(
            gamma=gamma,
            label=group.label(gamma),
            class_size=len(members),
            d=report.d,
            torsion=report.torsion,
            centralizer_order=len(group.centralizer(gamma)),
            residual_order=max(len(residual), 1),
            residual=residual,
        ))
    if sum(c.class_size for c in components) != group.order:
        raise StructureCheckError(f"Conjugacy classes of {group.name} do not partition the group")
    logger.debug(f"{group.name} on Z^{rank}: components of dimension {[c.d for c in components]}")
    return components


def cartan_classes(group: FinGroup) -> List[Tuple[int, Tuple[int, ...]]]:
    """Cyclic subgroups up to conjugacy, as (generator, elements)."""
    seen = []
    result = []
    for g in range(group.order):
        subgroup = group.closure([g])
        conjugates = {tuple(sorted(group.conj(x, h) for h in subgroup)) for x in range(group.order)}
        if any(c in seen for c in conjugates):
            continue
        seen.extend(conjugates)
        result.append((g, subgroup))
    return result


# ---------------------------------------------------------------------------
# Pin_2n -> O_2n decomposition
# ---------------------------------------------------------------------------

def _genuine(char: TorusChar) -> Optional[bool]:
    """True if every exponent is half-odd, False if all are integers, None if mixed."""
    if char.is_zero():
        return None
    parities = {e % 2 for exps in char.terms for e in exps}
    if char.rank == 0:
        return False
    if parities == {1}:
        return True
    if parities == {0}:
        return False
    return None


def rep_decomposition_check(spec: RingSpec, cover: bool = True, samples: int = 50,
                            seed: int = 0) -> ValidationResult:
    """
    Split the character ring of the double cover Pin_2n of O_2n by the
    action of the central kernel: non-genuine characters (factoring through
    O_2n) and genuine ones. Each summand must be a module over the first.
    Without the cover there is a single summand.
    """
    if spec.family != 'O_even':
        raise ValueError(f"Invalid ring for decomposition: {spec}. Expected O_even")
    if spec.rank > 2:
        raise ValueError(f"Rank {spec.rank} exceeds the decomposition budget 2")
    n = spec.rank
    result = ValidationResult(f"Pin_{2 * n} decomposition over O_{2 * n}" if cover else f"O_{2 * n} decomposition")
    base = RingSpec('Pin', n) if cover else spec

    even_labels = ['1'] + [f'V{i}' for i in range(1, n + 1)] + ['det']
    odd_labels = ['pi'] if cover else []
    even = {label: fundamental_character(base, label if label != '1' else 'V0').char for label in even_labels}
    odd = {label: fundamental_character(base, label).char for label in odd_labels}
    result.data['summands'] = [even_labels] + ([odd_labels] if odd_labels else [])

    for label, char in even.items():
        result.check(_genuine(char) is False, f"{label} factors through O_{2 * n}", f"{label} is not in the even summand")
    for label, char in odd.items():
        result.check(_genuine(char) is True, f"{label} is genuine", f"{label} is not in the odd summand")

    if cover and n == 1:
        # Pin_2 torus coordinate z = w^2: the split is the even/odd split of R(SL_2) in w
        for label, char in even.items():
            result.check(entry_satisfies(TorusChar(1, {(e[0] * 2,): c for e, c in char.terms.items()}), 'FULL'),
                         f"{label} is even in R(SL_2)", f"{label} is not even in R(SL_2)")
        for label, char in odd.items():
            result.check(entry_satisfies(TorusChar(1, {(e[0] * 2,): c for e, c in char.terms.items()}), 'ODD'),
                         f"{label} is odd in R(SL_2)", f"{label} is not odd in R(SL_2)")

    rng = random.Random(seed)
    failures = 0

    def combination(pool: Dict[str, TorusChar]) -> TorusChar:
        total = TorusChar.zero(n)
        for char in pool.values():
            total = total + char * rng.randint(-2, 2)
        return total if total else next(iter(pool.values()))

    for _ in range(samples):
        e1, e2 = combination(even), combination(even)
        if _genuine(e1 * e2) is True:
            failures += 1
        if odd:
            o1, o2 = combination(odd), combination(odd)
            if (e1 * o1) and _genuine(e1 * o1) is not True:
                failures += 1
            if (o1 * o2) and _genuine(o1 * o2) is not False:
                failures += 1
    result.check(failures == 0, f"{samples} random products respect the grading",
                 f"{failures} random products break the grading")
    return result
