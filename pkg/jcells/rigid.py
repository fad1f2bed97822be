"""
Rigid pairing fixtures: Gram matrices B between cocentre elements (rows)
and rigid quotient representations (columns), with the optional change of
basis Phi over Z[q^(1/2), q^(-1/2)].

Fixtures live in data/fixtures/rigid/<name>.json.

Usage:
    from jcells.rigid import load_example, rigid_determinant
    example = load_example("sl2")
    print(rigid_determinant(example).factored_text())   # (q^{1/2}+q^{-1/2})^2
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
import sympy

from jcells.arith import HalfLaurent, poly_divides_power
from jcells.classgrp import ExplicitWeylGroup, LieType, poincare_polynomial
from jcells.config import FIXTURE_DIR
from jcells.errors import StructureCheckError
from jcells.linalg import determinant, matmul, transpose
from jcells.report import ValidationResult

logger = logging.getLogger(__name__)

SHIPPED_EXAMPLES = ('sl2', 'pgl2', 'so7')
FIXTURE_VERSION = 1


@dataclass(frozen=True)
class CellBlock:
    cell: str
    a: int
    rows: Tuple[int, ...]
    columns: Tuple[int, ...]

    def to_dict(self) -> Dict:
        return {'cell': self.cell, 'a': self.a, 'rows': list(self.rows), 'columns': list(self.columns)}


@dataclass
class RigidExample:
    name: str
    alpha_labels: List[str]
    beta_labels: List[str]
    B: List[List[int]]
    blocks: List[CellBlock]
    Phi: Optional[List[List[HalfLaurent]]] = None
    finite_weyl_type: str = ""
    group: str = ""
    version: int = FIXTURE_VERSION

    def __post_init__(self):
        n = len(self.B)
        if any(len(row) != n for row in self.B):
            raise ValueError(f"Invalid fixture {self.name}: B must be square")
        if any(not isinstance(x, int) or isinstance(x, bool) for row in self.B for x in row):
            raise ValueError(f"Invalid fixture {self.name}: B must have integer entries")
        if len(self.alpha_labels) != n or len(self.beta_labels) != n:
            raise ValueError(
                f"Invalid fixture {self.name}: {n}x{n} matrix with {len(self.beta_labels)} row labels "
                f"and {len(self.alpha_labels)} column labels"
            )
        rows = sorted(i for b in self.blocks for i in b.rows)
        columns = sorted(j for b in self.blocks for j in b.columns)
        if rows != list(range(n)) or columns != list(range(n)):
            raise ValueError(f"Invalid fixture {self.name}: cell blocks must partition rows and columns")
        if self.Phi is not None and (len(self.Phi) != n or any(len(row) != n for row in self.Phi)):
            raise ValueError(f"Invalid fixture {self.name}: Phi must be {n}x{n}")

    @property
    def size(self) -> int:
        return len(self.B)

    @classmethod
    def from_dict(cls, data: Dict) -> "RigidExample":
        version = int(data.get('version', FIXTURE_VERSION))
        if version != FIXTURE_VERSION:
            raise ValueError(f"Unsupported fixture version: {version}. Expected {FIXTURE_VERSION}")
        phi = data.get('Phi')
        if phi is not None:
            phi = [[HalfLaurent.parse(str(x)) for x in row] for row in phi]
        blocks = [CellBlock(b['cell'], int(b['a']), tuple(b['rows']), tuple(b['columns'])) for b in data['blocks']]
        return cls(
            name=data['name'],
            alpha_labels=list(data['alpha_labels']),
            beta_labels=list(data['beta_labels']),
            B=[list(row) for row in data['B']],
            blocks=blocks,
            Phi=phi,
            finite_weyl_type=data.get('finite_weyl_type', ''),
            group=data.get('group', ''),
            version=version,
        )

    def to_dict(self) -> Dict:
        return {
            'version': self.version,
            'name': self.name,
            'group': self.group,
            'finite_weyl_type': self.finite_weyl_type,
            'alpha_labels': list(self.alpha_labels),
            'beta_labels': list(self.beta_labels),
            'B': [list(row) for row in self.B],
            'Phi': None if self.Phi is None else [[x.to_text() for x in row] for row in self.Phi],
            'blocks': [b.to_dict() for b in self.blocks],
        }

    def cell_of_row(self, i: int) -> CellBlock:
        return next(b for b in self.blocks if i in b.rows)

    def cell_of_column(self, j: int) -> CellBlock:
        return next(b for b in self.blocks if j in b.columns)

    def to_frame(self) -> pd.DataFrame:
        """B as a labeled table; rows indexed by (cell, a, element)."""
        index = pd.MultiIndex.from_tuples(
            [(self.cell_of_row(i).cell, self.cell_of_row(i).a, label) for i, label in enumerate(self.beta_labels)],
            names=['cell', 'a', 'element'],
        )
        return pd.DataFrame(self.B, index=index, columns=self.alpha_labels)


def load_example(name: str, directory: Optional[Union[str, Path]] = None) -> RigidExample:
    directory = Path(directory) if directory else FIXTURE_DIR / "rigid"
    path = directory / f"{name}.json"
    if not path.exists():
        available = sorted(p.stem for p in directory.glob("*.json")) if directory.exists() else []
        raise ValueError(f"Unknown example: {name}. Expected one of {', '.join(available) or 'none'}")
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in fixture {path}: {e}")
    example = RigidExample.from_dict(data)
    logger.debug(f"Loaded rigid fixture {name}: {example.size}x{example.size}")
    return example


def identity_example(n: int) -> RigidExample:
    """B = Phi = identity, one cell."""
    one, zero = HalfLaurent.constant(1), HalfLaurent()
    return RigidExample(
        name=f"identity{n}",
        alpha_labels=[f"r{i}" for i in range(n)],
        beta_labels=[f"t{i}" for i in range(n)],
        B=[[1 if i == j else 0 for j in range(n)] for i in range(n)],
        blocks=[CellBlock("(all)", 0, tuple(range(n)), tuple(range(n)))],
        Phi=[[one if i == j else zero for j in range(n)] for i in range(n)],
    )


def block_determinants(e: RigidExample) -> List[Tuple[str, int, int]]:
    """(cell, a, det of the cell's square block of B) in fixture order."""
    result = []
    for block in e.blocks:
        if len(block.rows) != len(block.columns):
            raise StructureCheckError(f"Cell {block.cell} of {e.name} is not square")
        sub = [[e.B[i][j] for j in block.columns] for i in block.rows]
        result.append((block.cell, block.a, determinant(sub)))
    return result


def check_structure(e: RigidExample) -> ValidationResult:
    """Block-diagonal integer B with nonzero determinant; Phi upper-triangular in the a-ordering."""
    result = ValidationResult(f"structure of {e.name}")

    off_block = [
        (i, j) for i in range(e.size) for j in range(e.size)
        if e.B[i][j] and e.cell_of_row(i) != e.cell_of_column(j)
    ]
    for i, j in off_block[:5]:
        result.add_error(f"B[{e.beta_labels[i]}, {e.alpha_labels[j]}] = {e.B[i][j]} lies outside every cell block")
    if not off_block:
        result.add_info(f"B is block-diagonal with block sizes {[len(b.rows) for b in e.blocks]}")

    dets = block_determinants(e)
    for cell, a, det in dets:
        if det == 0:
            result.add_error(f"Cell {cell} (a={a}) has a singular block")
    total = determinant(e.B)
    result.check(total != 0, f"det B = {total}", "det B = 0")
    result.data['det_B'] = total
    result.data['block_sizes'] = [len(b.rows) for b in e.blocks]
    result.data['block_determinants'] = [{'cell': c, 'a': a, 'det': d} for c, a, d in dets]

    a_values = [e.cell_of_row(i).a for i in range(e.size)]
    if any(x < y for x, y in zip(a_values, a_values[1:])):
        result.add_error(f"Rows are not ordered by decreasing a-value: {a_values}")

    if e.Phi is None:
        result.add_info("No Phi matrix; checked B only")
    else:
        below = [(i, j) for i in range(e.size) for j in range(i) if e.Phi[i][j]]
        for i, j in below[:5]:
            result.add_error(f"Phi[{i}, {j}] = {e.Phi[i][j]} is below the diagonal")
        if not below:
            result.add_info("Phi is upper-triangular")
    return result


def rigid_determinant(e: RigidExample) -> HalfLaurent:
    """det(Phi^T B) in exact Laurent arithmetic."""
    if e.Phi is None:
        raise ValueError(f"Example {e.name} has no Phi matrix")
    product = matmul(transpose(e.Phi), e.B, zero=HalfLaurent())
    det = determinant(product, exact_div=lambda a, b: a.exact_div(b),
                      one=HalfLaurent.constant(1), zero=HalfLaurent())
    logger.debug(f"Rigid determinant of {e.name}: {det}")
    return det


def _offending_factors(det: HalfLaurent, base: HalfLaurent) -> List[str]:
    _, det_poly = det.to_poly()
    _, base_poly = base.to_poly()
    v = det_poly.gens[0]
    _, factors = sympy.factor_list(det_poly.as_expr(), v)
    offending = []
    for factor, _ in factors:
        if sympy.degree(factor, v) > 0 and sympy.rem(base_poly.as_expr(), factor, v) != 0:
            offending.append(sympy.sstr(factor))
    return offending


def vanishing_vs_poincare(e: RigidExample,
                          t: Union[str, LieType, ExplicitWeylGroup, Sequence, None] = None) -> ValidationResult:
    """
    Every zero of the rigid determinant must be a zero of the Poincare
    polynomial of the finite Weyl group: det divides a power of P_W(q).
    """
    t = t if t is not None else e.finite_weyl_type
    if not t:
        raise ValueError(f"Example {e.name} names no finite Weyl group; pass one explicitly")
    result = ValidationResult(f"vanishing of {e.name} against P_{t}")
    det = rigid_determinant(e)
    poincare = poincare_polynomial(t)
    result.data['determinant'] = det.to_text()
    result.data['poincare'] = poincare.to_text()
    if det.is_zero():
        result.add_error("Rigid determinant is identically zero")
        return result
    if len(det.terms) == 1:
        result.add_info(f"det = {det} is a unit")
        result.data['power'] = 0
        return result
    k = poly_divides_power(det, poincare)
    result.data['power'] = k
    if k is None:
        for factor in _offending_factors(det, poincare):
            result.add_error(f"factor {factor} of the rigid determinant does not divide P_{t}(q = v^2)")
        if result.passed:
            result.add_error(f"det = {det} does not divide a power of P_{t}")
    else:
        result.add_info(f"det = {det.factored_text()} divides P_{t}^{k}")
    return result
