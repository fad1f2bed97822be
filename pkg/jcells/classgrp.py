"""
Unipotent classes of classical groups by partitions.

Types follow the group carrying the unipotent: A_n = SL_{n+1}, B_n = SO_{2n+1},
C_n = Sp_{2n}, D_n = SO_{2n}.

Usage:
    from jcells.classgrp import LieType, Partition, centralizer, a_value
    t = LieType.parse("C3")
    u = Partition.parse("2,2,2")
    centralizer(t, u).component_order   # 2
    a_value(t, u)                       # 3
"""

import re
import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import pandas as pd
import yaml

from jcells.arith import HalfLaurent
from jcells.config import FIXTURE_DIR, get_settings
from jcells.errors import StructureCheckError
from jcells.fingroup import FinGroup, elementary_abelian_2
from jcells.linalg import SparseEliminator
from jcells.report import ValidationResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LieType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in ('A', 'B', 'C', 'D'):
            raise ValueError(f"Invalid type family: {self.family}. Expected one of A, B, C, D")
        if self.rank < 1 or (self.family == 'D' and self.rank < 2):
            raise ValueError(f"Invalid rank {self.rank} for type {self.family}")

    @classmethod
    def parse(cls, text: str) -> "LieType":
        match = re.fullmatch(r'\s*([ABCD])\s*_?\s*(\d+)\s*', text or '')
        if not match:
            raise ValueError(f"Invalid Lie type: {text!r}. Expected e.g. 'C3'")
        return cls(match.group(1), int(match.group(2)))

    def __str__(self):
        return f"{self.family}{self.rank}"

    @property
    def form(self) -> str:
        return {'A': 'sl', 'B': 'so', 'C': 'sp', 'D': 'so'}[self.family]

    @property
    def natural_dimension(self) -> int:
        n = self.rank
        return {'A': n + 1, 'B': 2 * n + 1, 'C': 2 * n, 'D': 2 * n}[self.family]

    @property
    def dimension(self) -> int:
        n = self.rank
        return {'A': n * (n + 2), 'B': n * (2 * n + 1), 'C': n * (2 * n + 1), 'D': n * (2 * n - 1)}[self.family]

    @property
    def degrees(self) -> List[int]:
        n = self.rank
        if self.family == 'A':
            return list(range(2, n + 2))
        if self.family in ('B', 'C'):
            return [2 * i for i in range(1, n + 1)]
        return sorted([2 * i for i in range(1, n)] + [n])

    def cartan_matrix(self) -> List[List[int]]:
        n = self.rank
        A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        chain = n if self.family != 'D' else n - 1
        for i in range(chain - 1):
            A[i][i + 1] = A[i + 1][i] = -1
        if self.family == 'B' and n > 1:
            A[n - 1][n - 2] = -2
        elif self.family == 'C' and n > 1:
            A[n - 2][n - 1] = -2
        elif self.family == 'D' and n > 2:
            A[n - 1][n - 3] = A[n - 3][n - 1] = -1
        return A


def parse_types(text: str) -> List[LieType]:
    """'A1xA1' -> [A1, A1]."""
    pieces = [p for p in re.split(r'\s*[x×]\s*', text.strip()) if p]
    if not pieces:
        raise ValueError(f"Invalid Lie type: {text!r}")
    return [LieType.parse(p) for p in pieces]


@dataclass(frozen=True)
class Partition:
    parts: Tuple[int, ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("Invalid partition: empty")
        if any(p <= 0 for p in self.parts):
            raise ValueError(f"Invalid partition {self.parts}: parts must be positive")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError(f"Invalid partition {self.parts}: parts must be weakly decreasing")

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Accepts '2,2,2', '(2,2,2)', '2,1^4' and '2^3'."""
        body = (text or '').strip().strip('()[]')
        parts = []
        for token in re.split(r'\s*,\s*|\s+', body):
            if not token:
                continue
            match = re.fullmatch(r'(\d+)(?:\^(\d+))?', token)
            if not match:
                raise ValueError(f"Invalid partition: {text!r}. Expected e.g. '2,1^4'")
            parts.extend([int(match.group(1))] * int(match.group(2) or 1))
        return cls(tuple(sorted(parts, reverse=True)))

    @classmethod
    def of(cls, parts: Sequence[int]) -> "Partition":
        return cls(tuple(sorted(parts, reverse=True)))

    def __str__(self):
        return "(" + ",".join(str(p) for p in self.parts) + ")"

    @property
    def size(self) -> int:
        return sum(self.parts)

    def multiplicities(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for p in self.parts:
            counts[p] = counts.get(p, 0) + 1
        return counts

    def dual(self) -> "Partition":
        return Partition(tuple(sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))

    def dominates(self, other: "Partition") -> bool:
        if self.size != other.size:
            return False
        a = b = 0
        for i in range(max(len(self.parts), len(other.parts))):
            a += self.parts[i] if i < len(self.parts) else 0
            b += other.parts[i] if i < len(other.parts) else 0
            if a < b:
                return False
        return True

    def has_distinct_parts(self) -> bool:
        return len(set(self.parts)) == len(self.parts)


def partitions_of(n: int, largest: Optional[int] = None) -> Iterator[Partition]:
    """All partitions of n in reverse lexicographic order."""
    largest = n if largest is None else largest

    def build(remaining: int, cap: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in build(remaining - first, first):
                yield (first,) + rest

    for parts in build(n, largest):
        yield Partition(parts)


def validate_partition(t: LieType, u: Partition) -> bool:
    if u.size != t.natural_dimension:
        return False
    counts = u.multiplicities()
    if t.family == 'C':
        return all(m % 2 == 0 for a, m in counts.items() if a % 2)
    if t.family in ('B', 'D'):
        return all(m % 2 == 0 for a, m in counts.items() if a % 2 == 0)
    return True


def valid_partitions(t: LieType) -> List[Partition]:
    return [u for u in partitions_of(t.natural_dimension) if validate_partition(t, u)]


def _require_valid(t: LieType, u: Partition):
    if not validate_partition(t, u):
        raise ValueError(f"Invalid partition {u} for type {t}: wrong size or parity")


def is_very_even(t: LieType, u: Partition) -> bool:
    return t.family == 'D' and all(a % 2 == 0 and m % 2 == 0 for a, m in u.multiplicities().items())


# ---------------------------------------------------------------------------
# Centralizers
# ---------------------------------------------------------------------------

_FACTOR_DIMENSION = {
    'Sp': lambda m: m * (m + 1) // 2,
    'O': lambda m: m * (m - 1) // 2,
    'SO': lambda m: m * (m - 1) // 2,
    'Z2': lambda m: 0,
}


@dataclass
class CentralizerDescriptor:
    lie_type: LieType
    partition: Partition
    factors: List[Tuple[str, int]]
    det_condition: bool
    component_order: int
    very_even: bool = False

    @property
    def component_group(self) -> FinGroup:
        k = self.component_order.bit_length() - 1
        return elementary_abelian_2(k)

    @property
    def reductive_dimension(self) -> int:
        return sum(_FACTOR_DIMENSION[kind](m) for kind, m in self.factors)

    def to_text(self) -> str:
        body = " x ".join(f"{kind}{m}" if kind != 'Z2' else "Z/2" for kind, m in self.factors) or "1"
        return f"S({body})" if self.det_condition else body

    def to_dict(self) -> Dict:
        return {
            'type': str(self.lie_type),
            'partition': list(self.partition.parts),
            'factors': [[kind, m] for kind, m in self.factors],
            'det_condition': self.det_condition,
            'component_order': self.component_order,
            'very_even': self.very_even,
            'reductive_dimension': self.reductive_dimension,
        }


def centralizer(t: LieType, u: Partition) -> CentralizerDescriptor:
    """Reductive part of the centralizer, by the Springer-Steinberg description."""
    _require_valid(t, u)
    counts = sorted(u.multiplicities().items(), reverse=True)
    factors: List[Tuple[str, int]] = []
    if t.family == 'A':
        raise ValueError("centralizer descriptors are implemented for types B, C and D")
    if t.family == 'C':
        for a, m in counts:
            factors.append(('Sp', m) if a % 2 else ('O', m))
        even_parts = sum(1 for a, _ in counts if a % 2 == 0)
        return CentralizerDescriptor(t, u, factors, det_condition=False, component_order=2 ** even_parts)

    odd_parts = 0
    for a, m in counts:
        if a % 2 == 0:
            factors.append(('Sp', m))
        elif m % 2:
            factors.append(('SO', m))
            factors.append(('Z2', 1))
            odd_parts += 1
        else:
            factors.append(('O', m))
            odd_parts += 1
    order = 2 ** (odd_parts - 1) if odd_parts else 1
    return CentralizerDescriptor(t, u, factors, det_condition=odd_parts > 0, component_order=order,
                                 very_even=is_very_even(t, u))


def centralizer_dimension(t: LieType, u: Partition) -> int:
    """dim of the centralizer of u in the Lie algebra, from the dual partition."""
    _require_valid(t, u)
    squares = sum(p * p for p in u.dual().parts)
    odd = sum(1 for p in u.parts if p % 2)
    if t.form == 'sl':
        return squares - 1
    if t.form == 'sp':
        return (squares + odd) // 2
    return (squares - odd) // 2


def a_value(t: LieType, u: Partition) -> int:
    """Dimension of the Springer fibre: (dim Z(u) - rank) / 2."""
    diff = centralizer_dimension(t, u) - t.rank
    if diff < 0 or diff % 2:
        raise StructureCheckError(f"Centralizer dimension of {u} in {t} gives a non-integral a-value")
    return diff // 2


def nilpotent_and_form(t: LieType, u: Partition) -> Tuple[List[List[int]], List[List[int]], int]:
    """
    A nilpotent e of Jordan type u preserving a nondegenerate form F.

    Returns:
        (e, F, epsilon) with F^T = epsilon F; epsilon is 0 for type A (no form)
    """
    _require_valid(t, u)
    N = t.natural_dimension
    e = [[0] * N for _ in range(N)]
    F = [[0] * N for _ in range(N)]
    epsilon = {'sl': 0, 'so': 1, 'sp': -1}[t.form]
    offset = 0

    def jordan(start: int, a: int, sign: int = 1):
        for i in range(a - 1):
            e[start + i + 1][start + i] = sign

    if epsilon == 0:
        for a in u.parts:
            jordan(offset, a)
            offset += a
        return e, F, epsilon

    for a, m in sorted(u.multiplicities().items(), reverse=True):
        block_sign = (-1) ** (a + 1)
        if block_sign == epsilon:
            for _ in range(m):
                jordan(offset, a)
                for i in range(a):
                    F[offset + i][offset + a - 1 - i] = (-1) ** (i + 1)
                offset += a
        else:
            # pairs W + W* with e = (J, -J^T) and F = [[0, I], [eps I, 0]]
            for _ in range(m // 2):
                jordan(offset, a)
                for i in range(a - 1):
                    e[offset + a + i][offset + a + i + 1] = -1
                for i in range(a):
                    F[offset + i][offset + a + i] = 1
                    F[offset + a + i][offset + i] = epsilon
                offset += 2 * a
    return e, F, epsilon


def centralizer_dimension_oracle(t: LieType, u: Partition) -> int:
    """dim ker ad(e) on the Lie algebra, by exact elimination."""
    e, F, epsilon = nilpotent_and_form(t, u)
    N = len(e)
    basis: List[Dict[Tuple[int, int], int]] = []
    if epsilon == 0:
        basis = [{(i, j): 1} for i in range(N) for j in range(N)]
    else:
        # X = F^-1 A with A^T = -epsilon A; F is a signed permutation so F^-1 = F^T
        for i in range(N):
            for j in range(i, N):
                if i == j and epsilon == 1:
                    continue
                A = {(i, j): 1}
                if i != j:
                    A[(j, i)] = -epsilon
                X: Dict[Tuple[int, int], int] = {}
                for (r, c), v in A.items():
                    for k in range(N):
                        if F[r][k]:
                            X[(k, c)] = X.get((k, c), 0) + F[r][k] * v
                basis.append(X)

    eliminator = SparseEliminator()
    for X in basis:
        bracket: Dict[Tuple[int, int], int] = {}
        for (r, c), v in X.items():
            for j in range(N):
                if e[c][j]:
                    bracket[(r, j)] = bracket.get((r, j), 0) + v * e[c][j]
            for i in range(N):
                if e[i][r]:
                    bracket[(i, c)] = bracket.get((i, c), 0) - e[i][r] * v
        eliminator.add(bracket)
    dimension = len(basis) - eliminator.rank
    if epsilon == 0:
        dimension -= 1
    return dimension


def check_centralizer(t: LieType, u: Partition) -> ValidationResult:
    """Compare the partition formula with the oracle and with the reductive factors."""
    result = ValidationResult(f"centralizer of {u} in {t}")
    formula = centralizer_dimension(t, u)
    oracle = centralizer_dimension_oracle(t, u)
    result.check(formula == oracle, f"dim Z = {formula} matches ad(e) kernel",
                 f"dim Z formula {formula} != ad(e) kernel {oracle}")
    descriptor = centralizer(t, u)
    reductive = descriptor.reductive_dimension
    result.check(reductive <= oracle, f"reductive part has dimension {reductive}",
                 f"reductive part {reductive} exceeds dim Z = {oracle}")
    result.data.update({'dim_z': oracle, 'reductive_dimension': reductive,
                        'unipotent_dimension': oracle - reductive})
    return result


# ---------------------------------------------------------------------------
# Weyl groups
# ---------------------------------------------------------------------------

@dataclass
class ExplicitWeylGroup:
    name: str
    cartan: List[List[int]]
    degrees: List[int]

    @property
    def rank(self) -> int:
        return len(self.cartan)


def load_weyl_groups(path: Optional[Union[str, Path]] = None) -> Dict[str, ExplicitWeylGroup]:
    path = Path(path) if path else FIXTURE_DIR / "weyl_groups.yaml"
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise FileNotFoundError(f"Weyl group fixture not found: {path}")
    except yaml.YAMLError as e:
        raise ValueError(f"Invalid YAML in Weyl group fixture: {e}")
    groups = {}
    for name, entry in data.get('weyl_groups', {}).items():
        cartan = [list(map(int, row)) for row in entry['cartan']]
        if any(len(row) != len(cartan) for row in cartan):
            raise ValueError(f"Cartan matrix of {name} is not square")
        groups[name] = ExplicitWeylGroup(name, cartan, [int(d) for d in entry['degrees']])
    return groups


def weyl_length_distribution(cartan: Sequence[Sequence[int]]) -> Dict[int, int]:
    """Number of elements of each length, by breadth-first search on the orbit of a regular weight."""
    n = len(cartan)
    start = tuple([1] * n)
    distance = {start: 0}
    queue = deque([start])
    while queue:
        weight = queue.popleft()
        for k in range(n):
            moved = tuple(weight[i] - weight[k] * cartan[k][i] for i in range(n))
            if moved not in distance:
                distance[moved] = distance[weight] + 1
                queue.append(moved)
    counts: Dict[int, int] = {}
    for d in distance.values():
        counts[d] = counts.get(d, 0) + 1
    return counts


def _q_integer(d: int) -> HalfLaurent:
    """1 + q + ... + q^(d-1)"""
    return HalfLaurent({2 * i: 1 for i in range(d)})


def _from_degrees(degrees: Sequence[int]) -> HalfLaurent:
    result = HalfLaurent.constant(1)
    for d in degrees:
        result = result * _q_integer(d)
    return result


def _brute_force(cartan: Sequence[Sequence[int]]) -> HalfLaurent:
    return HalfLaurent({2 * length: count for length, count in weyl_length_distribution(cartan).items()})


def poincare_polynomial(types: Union[str, LieType, ExplicitWeylGroup, Sequence], check: bool = True) -> HalfLaurent:
    """
    Sum over the Weyl group of q^length, from the degrees; cross-checked by
    enumeration when the rank is within the brute-force bound.
    """
    if isinstance(types, str):
        explicit = None
        try:
            parts = parse_types(types)
        except ValueError:
            explicit = load_weyl_groups().get(types.strip())
            if explicit is None:
                raise ValueError(f"unsupported type: {types!r}")
            parts = [explicit]
    elif isinstance(types, (LieType, ExplicitWeylGroup)):
        parts = [types]
    else:
        parts = list(types)

    bound = get_settings().brute_force_rank
    result = HalfLaurent.constant(1)
    for part in parts:
        if isinstance(part, LieType):
            degrees, cartan, rank = part.degrees, part.cartan_matrix(), part.rank
        elif isinstance(part, ExplicitWeylGroup):
            degrees, cartan, rank = part.degrees, part.cartan, part.rank
        else:
            raise ValueError(f"unsupported type: {part!r}")
        value = _from_degrees(degrees)
        if check and rank <= bound:
            enumerated = _brute_force(cartan)
            if enumerated != value:
                raise StructureCheckError(f"Poincare polynomial of {part} disagrees with enumeration")
        result = result * value
    return result


# ---------------------------------------------------------------------------
# Levi subgroups
# ---------------------------------------------------------------------------

_DUAL_TAIL = {'B': 'SO', 'C': 'Sp', 'D': 'SO'}
_GROUP_TAIL = {'B': 'Sp', 'C': 'SO', 'D': 'SO'}


@dataclass
class LeviCandidate:
    """GL_a^(m'/2) blocks plus a tail partition u''."""
    lie_type: LieType
    gl_blocks: List[Tuple[int, int]]
    tail: Tuple[int, ...]
    flags: List[str] = field(default_factory=list)

    @property
    def tail_size(self) -> int:
        return sum(self.tail)

    def _gl_text(self) -> List[str]:
        return [f"GL{a}" + (f"^{count}" if count > 1 else "") for a, count in self.gl_blocks]

    def dual_label(self) -> str:
        pieces = self._gl_text()
        if self.tail_size:
            pieces.append(f"{_DUAL_TAIL[self.lie_type.family]}{self.tail_size}")
        return " x ".join(pieces) or "1"

    def group_label(self) -> str:
        """The Levi on the side of the group whose dual carries u."""
        pieces = self._gl_text()
        family = self.lie_type.family
        size = self.tail_size
        if family == 'C':
            tail = f"SO{size + 1}"
        elif family == 'B':
            tail = f"Sp{size - 1}" if size > 1 else ""
        else:
            tail = f"SO{size}" if size else ""
        if tail:
            pieces.append(tail)
        return " x ".join(pieces) or "1"

    @property
    def is_torus(self) -> bool:
        return not self.tail and all(a == 1 for a, _ in self.gl_blocks)

    def to_dict(self) -> Dict:
        return {
            'gl_blocks': [[a, count] for a, count in self.gl_blocks],
            'tail': list(self.tail),
            'dual_levi': self.dual_label(),
            'levi': self.group_label(),
            'flags': list(self.flags),
        }


def _tail_splits(family: str, tail: Dict[int, int]) -> bool:
    """
    Whether the tail is distinguished in a product of two classical groups of
    the allowed kind: each side has distinct parts, parts with multiplicity
    two go one to each side.
    """
    doubles = [a for a, m in tail.items() if m == 2]
    singles = [a for a, m in tail.items() if m == 1]
    shared = sum(doubles)
    for assignment in product((0, 1), repeat=len(singles)):
        left = shared + sum(a for a, side in zip(singles, assignment) if side == 0)
        right = shared + sum(a for a, side in zip(singles, assignment) if side == 1)
        if family == 'C' and left % 2 == 0 and right % 2 == 0:
            return True
        if family == 'B' and (left + right) % 2 == 1:
            return True
        if family == 'D' and left % 2 == 0 and right % 2 == 0:
            return True
    return not tail


def levi_candidates(t: LieType, u: Partition) -> List[LeviCandidate]:
    """
    All rewritings u = (GL blocks with even multiplicity m') + tail u'' with
    m'' in {0, 1, 2}, the tail distinguished in a semisimple centralizer.
    """
    if t.family == 'A':
        raise ValueError("levi_candidates needs type B, C or D")
    _require_valid(t, u)
    counts = sorted(u.multiplicities().items(), reverse=True)
    # parts whose tail multiplicity is forced to vanish
    frozen_parity = 1 if t.family == 'C' else 0
    choices = []
    for a, m in counts:
        if a % 2 == frozen_parity:
            options = [0] if m % 2 == 0 else []
        else:
            options = [k for k in (0, 1, 2) if k <= m and (m - k) % 2 == 0]
        if not options:
            raise StructureCheckError(f"No admissible tail multiplicity for part {a} of {u}")
        choices.append(options)

    candidates = []
    for split in product(*choices):
        tail = {a: k for (a, _), k in zip(counts, split) if k}
        size = sum(a * k for a, k in tail.items())
        if t.family == 'C' and size % 2:
            continue
        if t.family == 'B' and size % 2 == 0:
            continue
        if t.family == 'D' and size % 2:
            continue
        if not _tail_splits(t.family, tail):
            continue
        gl_blocks = [(a, (m - k) // 2) for (a, m), k in zip(counts, split) if m - k]
        tail_parts = tuple(sorted((a for a, k in tail.items() for _ in range(k)), reverse=True))
        flags = []
        if t.family == 'D' and tail and not any(k == 1 for k in tail.values()):
            flags.append('balanced-split')
        if is_very_even(t, u):
            flags.append('very-even')
        if any(k == 2 for k in tail.values()):
            flags.append('two-sided-tail')
        candidates.append(LeviCandidate(t, gl_blocks, tail_parts, flags))
    logger.debug(f"{len(candidates)} Levi candidates for {u} in {t}")
    return candidates


def partition_table(t: LieType) -> pd.DataFrame:
    """One row per valid partition: centralizer, component group, a-value, Levi count."""
    rows = []
    for u in valid_partitions(t):
        descriptor = centralizer(t, u) if t.family != 'A' else None
        rows.append({
            'partition': str(u),
            'centralizer': descriptor.to_text() if descriptor else None,
            'component_order': descriptor.component_order if descriptor else None,
            'dim_z': centralizer_dimension(t, u),
            'a_value': a_value(t, u),
            'levi_candidates': len(levi_candidates(t, u)) if t.family != 'A' else None,
        })
    return pd.DataFrame(rows)
