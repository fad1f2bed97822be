"""
Representation rings of classical groups as Weyl-invariant torus characters.

Disconnected groups (O_2n, O_2n+1, Pin_2n) are presented factor by factor,
one factor per conjugacy class of Cartan subgroups: C1 is the identity
component's Cartan, C2 the Cartan of the other component.

Usage:
    from jcells.repring import RingSpec, fundamental_character
    delta = fundamental_character(RingSpec("Spin", 2), "delta+")
    print(delta.char)   # z1^1/2 z2^1/2 + z1^-1/2 z2^-1/2
"""

import re
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional

from jcells.arith import Cyclotomic, TorusChar
from jcells.config import get_settings
from jcells.errors import StructureCheckError
from jcells.report import ValidationResult

logger = logging.getLogger(__name__)

FAMILIES = ('Sp', 'SO_odd', 'SO_even', 'O_even', 'O_odd', 'Spin', 'Pin', 'GL', 'SL', 'PGL')


@dataclass(frozen=True)
class RingSpec:
    """
    family and rank parameter: Sp(n) = Sp_2n, SO_odd(n) = SO_2n+1,
    SO_even(n) = SO_2n, Spin(n) = Spin_2n, Pin(n) = Pin_2n, O_even(n) = O_2n,
    O_odd(n) = O_2n+1, GL(n) = GL_n, SL(1) = SL_2, PGL(1) = PGL_2.
    """
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"Invalid ring family: {self.family}. Expected one of {', '.join(FAMILIES)}")
        if self.rank < 1:
            raise ValueError(f"Invalid rank {self.rank} for {self.family}")
        if self.family in ('SL', 'PGL') and self.rank != 1:
            raise ValueError(f"{self.family} is supported in rank 1 only")

    @property
    def factors(self) -> Dict[str, int]:
        """Factor tag -> torus rank."""
        n = self.rank
        if self.family in ('O_even', 'Pin'):
            return {'C1': n, 'C2': n - 1}
        if self.family == 'O_odd':
            return {'C1': n, 'C2': n}
        return {'C1': n}

    def __str__(self):
        return f"{self.family}({self.rank})"


# ---------------------------------------------------------------------------
# Weyl groups
# ---------------------------------------------------------------------------

def _weyl_kind(spec: RingSpec, factor: str, which: str = "") -> str:
    family = spec.family
    if family == 'GL':
        return 'A'
    if family in ('SO_even',) or (family == 'Spin' and which != 'spin'):
        return 'D'
    return 'B'


def weyl_generators(kind: str, rank: int) -> List[Callable[[TorusChar], TorusChar]]:
    """Substitutions generating the Weyl group of type A (permutations), B or D."""
    gens: List[Callable[[TorusChar], TorusChar]] = []
    for i in range(rank - 1):
        perm = list(range(rank))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(lambda c, p=tuple(perm): c.permute(p))
    if rank >= 1 and kind == 'B':
        gens.append(lambda c: c.invert([rank - 1]))
    if rank >= 2 and kind == 'D':
        gens.append(lambda c: c.invert([rank - 2, rank - 1]))
    return gens


def is_weyl_invariant(char: TorusChar, kind: str) -> bool:
    return all(g(char) == char for g in weyl_generators(kind, char.rank))


@dataclass(frozen=True)
class ClassFunctionElt:
    spec: RingSpec
    char: TorusChar
    factor_tag: str = 'C1'
    weyl_kind: str = 'B'

    def __post_init__(self):
        expected = self.spec.factors.get(self.factor_tag)
        if expected is None:
            raise ValueError(f"{self.spec} has no factor {self.factor_tag}")
        if self.char.rank != expected:
            raise ValueError(f"Factor {self.factor_tag} of {self.spec} has torus rank {expected}, got {self.char.rank}")
        if not is_weyl_invariant(self.char, self.weyl_kind):
            raise StructureCheckError(f"Character {self.char} is not invariant under W({self.weyl_kind}{self.char.rank})")

    @property
    def dimension(self) -> int:
        return self.char.dimension()

    def __str__(self):
        return self.char.to_text()


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------

def _monomials(rank: int, with_inverses: bool = True) -> List[TorusChar]:
    result = []
    for j in range(rank):
        weight = [0] * rank
        weight[j] = 1
        result.append(TorusChar.monomial(weight))
        if with_inverses:
            weight[j] = -1
            result.append(TorusChar.monomial(weight))
    return result


def elementary(monomials: List[TorusChar], i: int, rank: int) -> TorusChar:
    """i-th elementary symmetric polynomial of the given monomials."""
    if i < 0 or i > len(monomials):
        return TorusChar.zero(rank)
    e = [TorusChar.one(rank)] + [TorusChar.zero(rank) for _ in range(i)]
    for m in monomials:
        for k in range(i, 0, -1):
            e[k] = e[k] + e[k - 1] * m
    return e[i]


def exterior_power(spec: RingSpec, i: int, factor: str = 'C1') -> TorusChar:
    """Character of the i-th exterior power of the defining representation on a factor."""
    n = spec.factors[factor]
    family = spec.family
    if family == 'GL':
        return elementary(_monomials(n, with_inverses=False), i, n)
    weights = _monomials(n)
    if family in ('SO_odd', 'O_odd'):
        weights.append(TorusChar.one(n))
        value = elementary(weights, i, n)
        if family == 'O_odd' and factor == 'C2':
            value = value * (-1) ** i
        return value
    if family in ('O_even', 'Pin') and factor == 'C2':
        # eigenvalues z^+-1, 1, -1 on the non-identity component
        return elementary(weights, i, n) - elementary(weights, i - 2, n)
    return elementary(weights, i, n)


def half_middle(n: int, sign: int) -> TorusChar:
    """V_n^+ (sign=1) or V_n^- (sign=-1) for SO_2n."""
    middle = elementary(_monomials(n), n, n)
    top_even = TorusChar.zero(n)
    top_odd = TorusChar.zero(n)
    for signs in product((1, -1), repeat=n):
        term = TorusChar.monomial(signs)
        if sum(1 for s in signs if s < 0) % 2 == 0:
            top_even = top_even + term
        else:
            top_odd = top_odd + term
    rest = (middle - top_even - top_odd).exact_div(2)
    return (top_even if sign > 0 else top_odd) + rest


def half_spin(n: int, sign: int) -> TorusChar:
    """Delta^+ (even number of minus signs) or Delta^- (odd) for Spin_2n."""
    total = TorusChar.zero(n)
    for signs in product((1, -1), repeat=n):
        minus = sum(1 for s in signs if s < 0)
        if (minus % 2 == 0) == (sign > 0):
            total = total + TorusChar.monomial([Fraction(s, 2) for s in signs])
    return total


def sl2_irreducible(k: int) -> TorusChar:
    """V(k): z^k + z^(k-2) + ... + z^-k."""
    if k < 0:
        raise ValueError(f"Invalid highest weight: {k}")
    return TorusChar(1, {(2 * (k - 2 * j),): 1 for j in range(k + 1)})


_SELECTOR = re.compile(r'^(?:V\((\d+)\)|V(\d+)([+-])?|delta([+-])|spin|pi|det)$', re.IGNORECASE)


def fundamental_character(spec: RingSpec, which: str, factor: str = 'C1') -> ClassFunctionElt:
    """
    Selectors: 'V1'.., 'V3+'/'V3-' (SO_2n middle halves), 'delta+'/'delta-'
    (Spin_2n), 'spin' (Spin_2n+1 spin character on the same torus), 'pi'
    (Pin), 'det', and 'V(k)' for SL_2/PGL_2.
    """
    text = which.strip()
    match = _SELECTOR.match(text)
    if not match:
        raise ValueError(f"Invalid selector: {which!r}")
    n = spec.factors.get(factor)
    if n is None:
        raise ValueError(f"{spec} has no factor {factor}")
    family = spec.family
    lowered = text.lower()
    kind = _weyl_kind(spec, factor, lowered)

    if match.group(1) is not None:
        if family not in ('SL', 'PGL'):
            raise ValueError(f"Invalid selector {which!r} for {spec}: V(k) needs SL or PGL")
        k = int(match.group(1))
        if family == 'PGL' and k % 2:
            raise ValueError(f"V({k}) is not a representation of PGL_2")
        return ClassFunctionElt(spec, sl2_irreducible(k), factor, 'B')

    if match.group(2) is not None:
        i = int(match.group(2))
        if family in ('SL', 'PGL'):
            raise ValueError(f"Invalid selector {which!r} for {spec}: use V(k)")
        half = match.group(3)
        if half:
            if family not in ('SO_even', 'Spin') or i != n:
                raise ValueError(f"Invalid selector {which!r}: V{n}+/- exists for SO_2n and Spin_2n only")
            return ClassFunctionElt(spec, half_middle(n, 1 if half == '+' else -1), factor, 'D')
        limit = n if family == 'GL' else (2 * n + 1 if family in ('SO_odd', 'O_odd') else 2 * n)
        if not 0 <= i <= limit:
            raise ValueError(f"Invalid selector {which!r}: exterior powers of {spec} run from 0 to {limit}")
        return ClassFunctionElt(spec, exterior_power(spec, i, factor), factor, kind)

    if lowered.startswith('delta'):
        if family != 'Spin':
            raise ValueError(f"Invalid selector {which!r}: half-spin characters need Spin")
        return ClassFunctionElt(spec, half_spin(n, 1 if match.group(4) == '+' else -1), factor, 'D')

    if lowered == 'spin':
        if family != 'Spin':
            raise ValueError(f"Invalid selector {which!r}: spin character needs Spin")
        return ClassFunctionElt(spec, half_spin(n, 1) + half_spin(n, -1), factor, 'B')

    if lowered == 'pi':
        if family != 'Pin':
            raise ValueError(f"Invalid selector {which!r}: pi needs Pin")
        value = half_spin(n, 1) + half_spin(n, -1) if factor == 'C1' else TorusChar.zero(n)
        return ClassFunctionElt(spec, value, factor, 'B')

    # det
    if family == 'GL':
        return ClassFunctionElt(spec, TorusChar.monomial([1] * n), factor, 'A')
    sign = -1 if family in ('O_even', 'O_odd', 'Pin') and factor == 'C2' else 1
    return ClassFunctionElt(spec, TorusChar(n, {(0,) * n: sign}), factor, kind)


def component_characters(spec: RingSpec, which: str) -> Dict[str, ClassFunctionElt]:
    """The character on every factor of the presentation."""
    return {tag: fundamental_character(spec, which, tag) for tag in spec.factors}


# ---------------------------------------------------------------------------
# SL_2
# ---------------------------------------------------------------------------

def _require_symmetric(char: TorusChar):
    if char.rank != 1:
        raise ValueError(f"Expected a rank 1 character, got rank {char.rank}")
    if not char.is_integral():
        raise ValueError(f"{char} has half-integer exponents")
    if char.invert([0]) != char:
        raise ValueError(f"{char} is not invariant under z -> 1/z")


def decompose_sl2(char: TorusChar) -> Dict[int, int]:
    """Multiplicity of each V(k), by peeling off leading terms."""
    _require_symmetric(char)
    remaining = char
    result: Dict[int, int] = {}
    while not remaining.is_zero():
        (top,), coeff = remaining.items()[0]
        k = top // 2
        if k < 0:
            raise StructureCheckError(f"Negative leading weight while decomposing {char}")
        result[k] = result.get(k, 0) + coeff
        remaining = remaining - sl2_irreducible(k) * coeff
    return dict(sorted(result.items(), reverse=True))


def in_odd_module(char: TorusChar) -> bool:
    """Only odd highest weights; cross-checked against char(-z) = -char(z)."""
    decomposition = decompose_sl2(char)
    odd = all(k % 2 for k in decomposition)
    antisymmetric = char.negate(0) == -char
    if odd != antisymmetric:
        raise StructureCheckError(f"Odd-module tests disagree on {char}")
    return odd


@dataclass
class VanishingCertificate:
    char: str
    point: str
    value: str
    decomposition: Dict[int, int]


def odd_vanishing_locus(char: TorusChar) -> VanishingCertificate:
    """An odd character vanishes at z = zeta4, i.e. where z^2 = -1."""
    if not in_odd_module(char):
        raise ValueError(f"{char} is not in the odd module")
    zeta4 = Cyclotomic.root_of_unity(4)
    value = char.evaluate([zeta4])
    if value != 0:
        raise StructureCheckError(f"{char} does not vanish at zeta4: {value}")
    return VanishingCertificate(char.to_text(), 'zeta4', str(value), decompose_sl2(char))


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

def _alternating_sum(spec: RingSpec, top: int, start: Optional[TorusChar] = None) -> TorusChar:
    """start + V_{top} + V_{top-2} + ... down to V_0 or V_1."""
    n = spec.rank
    total = start if start is not None else TorusChar.zero(n)
    i = top
    while i >= 0:
        total = total + exterior_power(RingSpec('SO_even', n), i)
        i -= 2
    return total


def verify_presentation(spec: RingSpec) -> ValidationResult:
    """Check the defining relations of the presentation in exact arithmetic."""
    budget = get_settings().rank_budget
    if spec.rank > budget:
        raise ValueError(f"Rank {spec.rank} exceeds the exact expansion budget {budget}")
    if spec.family not in ('O_even', 'Pin', 'SO_even'):
        raise ValueError(f"No presentation check for {spec.family}; expected O_even, Pin or SO_even")
    n = spec.rank
    result = ValidationResult(f"presentation of {spec}")

    if spec.family in ('O_even', 'Pin'):
        dets = component_characters(spec, 'det')
        for tag, det in dets.items():
            result.check(det.char * det.char == TorusChar.one(det.char.rank),
                         f"det^2 = 1 on {tag}", f"det^2 != 1 on {tag}")
    if spec.family == 'O_even':
        dets = component_characters(spec, 'det')
        middles = component_characters(spec, f'V{n}')
        for tag in spec.factors:
            result.check(dets[tag].char * middles[tag].char == middles[tag].char,
                         f"det V{n} = V{n} on {tag}", f"det V{n} != V{n} on {tag}")
        restricted = middles['C1'].char
        result.check(restricted == half_middle(n, 1) + half_middle(n, -1),
                     f"V{n} restricts to V{n}+ + V{n}- on SO", f"V{n} does not split on SO")
    if spec.family == 'Pin':
        pis = component_characters(spec, 'pi')
        dets = component_characters(spec, 'det')
        result.check(pis['C1'].char == half_spin(n, 1) + half_spin(n, -1),
                     "pi restricts to delta+ + delta- on Spin", "pi does not restrict to delta+ + delta-")
        for tag in spec.factors:
            result.check(pis[tag].char * dets[tag].char == pis[tag].char,
                         f"pi det = pi on {tag}", f"pi det != pi on {tag}")
    if spec.family in ('SO_even', 'O_even') and n >= 2:
        plus = _alternating_sum(spec, n - 2, half_middle(n, 1))
        minus = _alternating_sum(spec, n - 2, half_middle(n, -1))
        odd = _alternating_sum(spec, n - 1)
        result.check(plus * minus == odd * odd, f"SO_{2 * n} relation holds",
                     f"SO_{2 * n} relation fails")
    if spec.family == 'SO_even':
        result.check(exterior_power(spec, n) == half_middle(n, 1) + half_middle(n, -1),
                     f"V{n} = V{n}+ + V{n}-", f"V{n} != V{n}+ + V{n}-")
    logger.debug(f"Checked presentation of {spec}: passed={result.passed}")
    return result
