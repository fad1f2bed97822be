"""
Block matrix models of J_u over rank-1 character rings.

A model is a square block pattern; each block carries a tag saying which
characters of SL_2 its entries may be:

    FULL  even characters (R(PGL_2))
    ODD   odd characters (span of V(k), k odd)
    ANY   all of R(SL_2)

Usage:
    from jcells.jmodels import load_model, fiber_image_rank
    model = load_model("sl2-j0")
    report = fiber_image_rank(model, "zeta4")
    print(report.dimension, report.block_diagonal)   # 2 True
"""

import random
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import sympy
import yaml

from jcells.arith import Cyclotomic, Scalar, TorusChar, as_cyclotomic, parse_point
from jcells.config import FIXTURE_DIR, get_settings
from jcells.errors import StructureCheckError
from jcells.linalg import SparseEliminator
from jcells.report import ValidationResult
from jcells.repring import decompose_sl2, in_odd_module, sl2_irreducible

logger = logging.getLogger(__name__)

TAGS = ('FULL', 'ODD', 'ANY')
MODEL_FILE = "jmodels.yaml"


def _product_tag(left: str, right: str) -> str:
    if 'ANY' in (left, right):
        return 'ANY'
    return 'FULL' if (left == 'ODD') == (right == 'ODD') else 'ODD'


def _lands_in(tag: str, target: str) -> bool:
    return target == 'ANY' or tag == target


def entry_satisfies(char: TorusChar, tag: str) -> bool:
    """Membership of a rank-1 character in the ring or module named by tag."""
    if tag not in TAGS:
        raise ValueError(f"Invalid block tag: {tag}. Expected one of {', '.join(TAGS)}")
    if char.rank != 1 or not char.is_integral() or char.invert([0]) != char:
        return False
    if char.is_zero() or tag == 'ANY':
        return True
    if tag == 'ODD':
        return in_odd_module(char)
    even = all(k % 2 == 0 for k in decompose_sl2(char))
    if even != (char.negate(0) == char):
        raise StructureCheckError(f"Even-module tests disagree on {char}")
    return even


@dataclass(frozen=True)
class BlockAlgebraModel:
    name: str
    block_sizes: Tuple[int, ...]
    block_tags: Tuple[Tuple[str, ...], ...]
    description: str = ""

    def __post_init__(self):
        blocks = len(self.block_sizes)
        if blocks == 0 or any(s < 1 for s in self.block_sizes):
            raise ValueError(f"Invalid block sizes for {self.name}: {self.block_sizes}")
        if len(self.block_tags) != blocks or any(len(row) != blocks for row in self.block_tags):
            raise ValueError(f"Model {self.name} needs a {blocks}x{blocks} tag pattern")
        for I in range(blocks):
            for J in range(blocks):
                tag = self.block_tags[I][J]
                if tag not in TAGS:
                    raise ValueError(f"Invalid block tag: {tag}. Expected one of {', '.join(TAGS)}")
                if tag != self.block_tags[J][I]:
                    raise ValueError(f"Tag pattern of {self.name} is not symmetric at block ({I}, {J})")
            if self.block_tags[I][I] == 'ODD':
                raise ValueError(f"Diagonal block {I} of {self.name} cannot be ODD")
        for I in range(blocks):
            for J in range(blocks):
                for K in range(blocks):
                    product = _product_tag(self.block_tags[I][J], self.block_tags[J][K])
                    if not _lands_in(product, self.block_tags[I][K]):
                        raise ValueError(
                            f"Tag pattern of {self.name} is not closed: ({I},{J})*({J},{K}) gives {product}, "
                            f"block ({I},{K}) is {self.block_tags[I][K]}"
                        )

    @property
    def size(self) -> int:
        return sum(self.block_sizes)

    @property
    def offsets(self) -> List[int]:
        result, total = [], 0
        for s in self.block_sizes:
            result.append(total)
            total += s
        return result

    def block_of(self, index: int) -> int:
        for b, (start, s) in enumerate(zip(self.offsets, self.block_sizes)):
            if start <= index < start + s:
                return b
        raise IndexError(f"Index {index} outside a {self.size}x{self.size} model")

    def tag_at(self, i: int, j: int) -> str:
        return self.block_tags[self.block_of(i)][self.block_of(j)]

    def has_odd_blocks(self) -> bool:
        return any('ODD' in row for row in self.block_tags)

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'block_sizes': list(self.block_sizes),
            'block_tags': [list(row) for row in self.block_tags],
            'description': self.description,
        }


def _read_models(path: Optional[Path] = None) -> Dict:
    path = Path(path) if path else FIXTURE_DIR / MODEL_FILE
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise FileNotFoundError(f"Model fixtures not found: {path}. Set JCELLS_FIXTURE_DIR or run from the project root.")
    except yaml.YAMLError as e:
        raise ValueError(f"Invalid YAML in model fixtures: {e}")
    return data.get('models', {})


def available_models(path: Optional[Path] = None) -> List[str]:
    return sorted(_read_models(path))


def load_model(name: str, path: Optional[Path] = None) -> BlockAlgebraModel:
    models = _read_models(path)
    if name not in models:
        raise ValueError(f"Unknown model: {name}. Expected one of {', '.join(sorted(models))}")
    entry = models[name]
    return BlockAlgebraModel(
        name=name,
        block_sizes=tuple(int(s) for s in entry['block_sizes']),
        block_tags=tuple(tuple(str(t) for t in row) for row in entry['block_tags']),
        description=entry.get('description', ''),
    )


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockElement:
    model: BlockAlgebraModel
    entries: Tuple[Tuple[TorusChar, ...], ...]
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        n = self.model.size
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError(f"Element of {self.model.name} must be {n}x{n}")
        if self.check:
            violation = self.first_violation()
            if violation is not None:
                i, j = violation
                raise StructureCheckError(
                    f"Entry ({i}, {j}) = {self.entries[i][j]} is not in the {self.model.tag_at(i, j)} block"
                )

    @classmethod
    def from_rows(cls, model: BlockAlgebraModel, rows: Sequence[Sequence[TorusChar]]) -> "BlockElement":
        return cls(model, tuple(tuple(row) for row in rows))

    @classmethod
    def zero(cls, model: BlockAlgebraModel) -> "BlockElement":
        n = model.size
        return cls.from_rows(model, [[TorusChar.zero(1)] * n for _ in range(n)])

    @classmethod
    def identity(cls, model: BlockAlgebraModel) -> "BlockElement":
        n = model.size
        return cls.from_rows(model, [[TorusChar.one(1) if i == j else TorusChar.zero(1) for j in range(n)]
                                     for i in range(n)])

    @classmethod
    def matrix_unit(cls, model: BlockAlgebraModel, i: int, j: int, char: TorusChar) -> "BlockElement":
        n = model.size
        rows = [[TorusChar.zero(1)] * n for _ in range(n)]
        rows[i][j] = char
        return cls.from_rows(model, rows)

    def first_violation(self) -> Optional[Tuple[int, int]]:
        for i, row in enumerate(self.entries):
            for j, char in enumerate(row):
                if char and not entry_satisfies(char, self.model.tag_at(i, j)):
                    return i, j
        return None

    def __add__(self, other: "BlockElement") -> "BlockElement":
        if other.model != self.model:
            raise ValueError(f"Cannot add elements of {self.model.name} and {other.model.name}")
        return BlockElement.from_rows(self.model, [[a + b for a, b in zip(r1, r2)]
                                                   for r1, r2 in zip(self.entries, other.entries)])

    def __matmul__(self, other: "BlockElement") -> "BlockElement":
        return model_multiply(self, other)

    def evaluate(self, z0) -> List[List[Cyclotomic]]:
        return [[as_cyclotomic(c.evaluate([z0])) if c else Cyclotomic.rational(0) for c in row]
                for row in self.entries]

    def to_text(self) -> str:
        return "\n".join("[ " + " | ".join(c.to_text() for c in row) + " ]" for row in self.entries)


def model_multiply(a: BlockElement, b: BlockElement) -> BlockElement:
    """Matrix product; the result is re-checked against every block tag."""
    if a.model != b.model:
        raise ValueError(f"Cannot multiply elements of {a.model.name} and {b.model.name}")
    n = a.model.size
    zero = TorusChar.zero(1)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            total = zero
            for k in range(n):
                x, y = a.entries[i][k], b.entries[k][j]
                if x and y:
                    total = total + x * y
            row.append(total)
        rows.append(row)
    product = BlockElement(a.model, tuple(tuple(r) for r in rows), check=False)
    violation = product.first_violation()
    if violation is not None:
        i, j = violation
        raise StructureCheckError(
            f"Model {a.model.name} is not closed: product entry ({i}, {j}) = {rows[i][j]} "
            f"leaves the {a.model.tag_at(i, j)} block"
        )
    return product


def _weights_for(tag: str, max_weight: int) -> List[int]:
    if tag == 'FULL':
        return list(range(0, max_weight + 1, 2))
    if tag == 'ODD':
        return list(range(1, max_weight + 1, 2))
    return list(range(max_weight + 1))


def random_element(model: BlockAlgebraModel, rng: random.Random, max_weight: int = 3,
                   density: float = 1.0) -> BlockElement:
    """Random integer combination of V(k) in every admissible entry."""
    n = model.size
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            char = TorusChar.zero(1)
            if rng.random() < density:
                for k in _weights_for(model.tag_at(i, j), max_weight):
                    char = char + sl2_irreducible(k) * rng.randint(-2, 2)
            row.append(char)
        rows.append(row)
    return BlockElement.from_rows(model, rows)


def closure_test(model: BlockAlgebraModel, samples: int = 1000, seed: int = 0,
                 density: Optional[float] = None) -> ValidationResult:
    """Multiply random pairs and confirm every product stays in the model."""
    if density is None:
        density = 1.0 if model.size <= 4 else 0.15
    rng = random.Random(seed)
    result = ValidationResult(f"closure of {model.name}")
    one = BlockElement.identity(model)
    probe = random_element(model, rng, density=density)
    result.check(model_multiply(one, probe) == probe and model_multiply(probe, one) == probe,
                 "identity is neutral", "identity is not neutral")
    failures = 0
    for _ in range(samples):
        a = random_element(model, rng, density=density)
        b = random_element(model, rng, density=density)
        try:
            model_multiply(a, b)
        except StructureCheckError as e:
            failures += 1
            if failures <= 5:
                result.add_error(str(e))
    result.check(failures == 0, f"{samples} random products stay in the model",
                 f"{failures} of {samples} random products leave the model")
    result.data['samples'] = samples
    return result


# ---------------------------------------------------------------------------
# Fibers
# ---------------------------------------------------------------------------

def _ring_generators(tag: str) -> List[TorusChar]:
    if tag == 'FULL':
        return [TorusChar.one(1), sl2_irreducible(2)]
    if tag == 'ODD':
        return [sl2_irreducible(1)]
    return [TorusChar.one(1), sl2_irreducible(1), sl2_irreducible(2)]


Monomial = Tuple[int, int, TorusChar]


def spanning_family(model: BlockAlgebraModel, depth: Optional[int] = None) -> List[Monomial]:
    """
    Matrix units times ring generators, and their products of length up to
    depth. Each member is (row, column, character).
    """
    if depth is None:
        depth = get_settings().product_depth
    if depth < 1:
        raise ValueError(f"Invalid product depth: {depth}. Expected at least 1")
    n = model.size
    generators: List[Monomial] = []
    for i in range(n):
        for j in range(n):
            for char in _ring_generators(model.tag_at(i, j)):
                generators.append((i, j, char))
    by_row: Dict[int, List[Monomial]] = defaultdict(list)
    for g in generators:
        by_row[g[0]].append(g)

    seen = set(generators)
    family = list(generators)
    layer = generators
    for _ in range(depth - 1):
        new_layer = []
        for i, j, c in layer:
            for _, l, d in by_row[j]:
                product = (i, l, c * d)
                if product in seen:
                    continue
                if not entry_satisfies(product[2], model.tag_at(i, l)):
                    raise StructureCheckError(f"Generator product at ({i}, {l}) leaves the model: {product[2]}")
                seen.add(product)
                new_layer.append(product)
        family.extend(new_layer)
        layer = new_layer
    logger.debug(f"Spanning family of {model.name}: {len(family)} elements (depth {depth})")
    return family


@dataclass
class FiberReport:
    model: str
    point: str
    dimension: int
    ambient: int
    block_diagonal: bool
    family_size: int

    def to_dict(self) -> Dict:
        return {
            'model': self.model,
            'point': self.point,
            'dimension': self.dimension,
            'ambient': self.ambient,
            'block_diagonal': self.block_diagonal,
            'family_size': self.family_size,
        }


def fiber_image_rank(model: BlockAlgebraModel, z0: Union[str, Scalar],
                     depth: Optional[int] = None) -> FiberReport:
    """Dimension of the span of the model's spanning family evaluated at z = z0."""
    point = parse_point(z0) if isinstance(z0, str) else z0
    if point == 0:
        raise ValueError("Evaluation point must be nonzero")
    family = spanning_family(model, depth)
    eliminator = SparseEliminator()
    values: Dict[TorusChar, Cyclotomic] = {}
    block_diagonal = True
    for i, j, char in family:
        if char not in values:
            values[char] = as_cyclotomic(char.evaluate([point]))
        value = values[char]
        if not value:
            continue
        if model.block_of(i) != model.block_of(j):
            block_diagonal = False
        eliminator.add({(i, j): value})
    report = FiberReport(model.name, str(point), eliminator.rank, model.size ** 2, block_diagonal, len(family))
    logger.debug(f"Fiber of {model.name} at {point}: {report.dimension}/{report.ambient}")
    return report


@dataclass
class EvaluationClass:
    """A point class of the invariant coordinate x = z + 1/z."""
    equation: str
    invariant: Scalar
    representative: Scalar
    dimension: int

    def to_dict(self) -> Dict:
        return {
            'equation': self.equation,
            'x': str(self.invariant),
            'representative': str(self.representative),
            'dimension': self.dimension,
        }


def _cyclotomic_order(factor, z) -> Optional[int]:
    degree = sympy.degree(factor, z)
    for n in range(1, 4 * degree * degree + 3):
        if sympy.totient(n) == degree and sympy.expand(sympy.cyclotomic_poly(n, z) - factor) == 0:
            return n
    return None


def unique_nonisomorphism_locus(model: BlockAlgebraModel) -> List[EvaluationClass]:
    """
    Classes where the fiber map fails to be an isomorphism: the zeros of the
    odd generator V(1) = z + 1/z, up to z -> 1/z, kept when the fiber there
    is smaller than the full matrix algebra.
    """
    if not model.has_odd_blocks():
        return []
    z = sympy.symbols('z')
    numerator = sympy.numer(sympy.together(z + 1 / z))
    _, factors = sympy.factor_list(numerator, z)
    classes = []
    for factor, _ in factors:
        order = _cyclotomic_order(factor, z)
        if order is None:
            raise ValueError(f"Unsupported model {model.name}: factor {factor} is not cyclotomic")
        representative = Cyclotomic.root_of_unity(order)
        report = fiber_image_rank(model, representative)
        if report.dimension < report.ambient:
            constant = factor.subs(z, 0)
            equation = f"{sympy.sstr(sympy.expand(factor - constant))} = {-constant}".replace('**', '^')
            invariant = representative + representative.inverse()
            classes.append(EvaluationClass(equation, invariant, representative, report.dimension))
            logger.info(f"✓ {model.name}: fiber drops to {report.dimension}/{report.ambient} where {factor} = 0")
    return classes
