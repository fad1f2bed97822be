"""
Exact scalar arithmetic.

Rationals are fractions.Fraction. Cyclotomic numbers live in Q(zeta_N) in the
power basis modulo the N-th cyclotomic polynomial. HalfLaurent is a Laurent
polynomial in v = q^(1/2); TorusChar is a Laurent polynomial in torus
coordinates z_1..z_n with half-integer exponents. Half-integer exponents are
always stored doubled.

Nothing here uses floating point.
"""

import re
import logging
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import Poly, QQ, Symbol, Rational as SympyRational, cyclotomic_poly, factor_list, factorint, totient

from jcells.config import get_settings

logger = logging.getLogger(__name__)

Rational = Fraction

_X = Symbol('x')
_V = Symbol('v')


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"Expected a rational number, got {value!r}")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, Cyclotomic):
        return value.to_fraction()
    raise ValueError(f"Expected a rational number, got {value!r}")


def fraction_from_sympy(value) -> Fraction:
    """Convert a sympy Integer/Rational to a Fraction."""
    return Fraction(int(value.p), int(value.q))


def fraction_to_sympy(value: Fraction):
    return SympyRational(value.numerator, value.denominator)


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(order: int) -> Tuple[int, ...]:
    """Coefficients of the order-th cyclotomic polynomial, lowest degree first."""
    poly = cyclotomic_poly(order, _X, polys=True)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _degree(order: int) -> int:
    return len(_cyclotomic_coeffs(order)) - 1


def _reduce(coeffs: List[Fraction], order: int) -> List[Fraction]:
    """Reduce a coefficient list (lowest first) modulo the monic cyclotomic polynomial."""
    phi = _cyclotomic_coeffs(order)
    d = len(phi) - 1
    coeffs = list(coeffs)
    for k in range(len(coeffs) - 1, d - 1, -1):
        c = coeffs[k]
        if c:
            base = k - d
            for j in range(d):
                if phi[j]:
                    coeffs[base + j] -= c * phi[j]
            coeffs[k] = Fraction(0)
    coeffs = coeffs[:d]
    coeffs.extend([Fraction(0)] * (d - len(coeffs)))
    return coeffs


def _mobius(n: int) -> int:
    exponents = factorint(n)
    if any(e > 1 for e in exponents.values()):
        return 0
    return -1 if len(exponents) % 2 else 1


@lru_cache(maxsize=None)
def _normalized_traces(order: int) -> Tuple[Fraction, ...]:
    """Tr(zeta^i)/phi(N) for each basis power i (Ramanujan sums)."""
    phi_n = int(totient(order))
    traces = []
    for i in range(_degree(order)):
        g = gcd(i, order) if i else order
        m = order // g
        traces.append(Fraction(_mobius(m) * phi_n, int(totient(m))) / phi_n)
    return tuple(traces)


class Cyclotomic:
    """Element of Q(zeta_order), coordinates in the power basis."""

    __slots__ = ('order', 'coords')

    def __init__(self, order: int, coords: Iterable = (0,)):
        if order < 1:
            raise ValueError(f"Invalid cyclotomic order: {order}. Expected a positive integer")
        coords = [to_fraction(c) for c in coords]
        d = _degree(order)
        if len(coords) > d:
            coords = _reduce(coords, order)
        else:
            coords.extend([Fraction(0)] * (d - len(coords)))
        self.order = order
        self.coords = tuple(coords)

    @classmethod
    def rational(cls, value, order: int = 1) -> "Cyclotomic":
        return cls(order, [to_fraction(value)])

    @classmethod
    def root_of_unity(cls, order: int, k: int = 1) -> "Cyclotomic":
        """zeta_order ** k."""
        k %= order
        coeffs = [Fraction(0)] * (k + 1)
        coeffs[k] = Fraction(1)
        return cls(order, coeffs)

    # -- coercion -----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> Optional["Cyclotomic"]:
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Cyclotomic(1, [other])
        return None

    def lift(self, order: int) -> "Cyclotomic":
        """The same number written in Q(zeta_order); order must be a multiple of self.order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"Cannot lift order {self.order} to order {order}")
        step = order // self.order
        coeffs = [Fraction(0)] * (step * (len(self.coords) - 1) + 1)
        for i, c in enumerate(self.coords):
            coeffs[i * step] = c
        return Cyclotomic(order, coeffs)

    def _common(self, other: "Cyclotomic") -> Tuple["Cyclotomic", "Cyclotomic"]:
        if self.order == other.order:
            return self, other
        if self.is_rational():
            return Cyclotomic(other.order, [self.coords[0]]), other
        if other.is_rational():
            return self, Cyclotomic(self.order, [other.coords[0]])
        m = _lcm(self.order, other.order)
        return self.lift(m), other.lift(m)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def normalized_trace(self) -> Fraction:
        """Trace to Q divided by the field degree; independent of the order used."""
        return sum((c * t for c, t in zip(self.coords, _normalized_traces(self.order))), Fraction(0))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._common(other)
        return Cyclotomic(a.order, [x + y for x, y in zip(a.coords, b.coords)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-c for c in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_rational():
            s = other.coords[0]
            return Cyclotomic(self.order, [c * s for c in self.coords])
        if self.is_rational():
            s = self.coords[0]
            return Cyclotomic(other.order, [c * s for c in other.coords])
        a, b = self._common(other)
        n = len(a.coords)
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a.coords):
            if x:
                for j, y in enumerate(b.coords):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(a.order, _reduce(prod, a.order))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inversion of zero")
        if self.is_rational():
            return Cyclotomic(self.order, [1 / self.coords[0]])
        f = Poly([fraction_to_sympy(c) for c in reversed(self.coords)], _X, domain=QQ)
        g = Poly(list(reversed(_cyclotomic_coeffs(self.order))), _X, domain=QQ)
        inv = f.invert(g)
        return Cyclotomic(self.order, [fraction_from_sympy(c) for c in reversed(inv.all_coeffs())])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = Cyclotomic(self.order, [1])
        e = abs(exponent)
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def galois(self, k: int) -> "Cyclotomic":
        """Image under zeta -> zeta**k, for k coprime to the order."""
        if gcd(k, self.order) != 1:
            raise ValueError(f"{k} is not coprime to {self.order}")
        coeffs = [Fraction(0)] * self.order
        for i, c in enumerate(self.coords):
            coeffs[(i * k) % self.order] += c
        return Cyclotomic(self.order, coeffs)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1 % self.order) if self.order > 2 else self

    # -- comparison / display -----------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._common(other)
        return a.coords == b.coords

    def __hash__(self):
        return hash(self.normalized_trace())

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"Cyclotomic({self.order}, {[str(c) for c in self.coords]})"

    def __str__(self):
        if self.is_rational():
            return str(self.coords[0])
        parts = []
        for i, c in enumerate(self.coords):
            if not c:
                continue
            if i == 0:
                term = str(c)
            else:
                power = f"zeta{self.order}" + (f"^{i}" if i > 1 else "")
                if c == 1:
                    term = power
                elif c == -1:
                    term = f"-{power}"
                else:
                    term = f"{c}*{power}"
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> Dict:
        return {'order': self.order, 'coords': [str(c) for c in self.coords]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Cyclotomic":
        return cls(int(data['order']), [Fraction(c) for c in data['coords']])


Scalar = Union[Fraction, Cyclotomic]


def as_cyclotomic(value, order: int = 1) -> Cyclotomic:
    if isinstance(value, Cyclotomic):
        return value
    return Cyclotomic(order, [to_fraction(value)])


def parse_point(text: str) -> Scalar:
    """Parse an evaluation point: 'zeta4', 'zeta12^5', '2', '-1/2'."""
    text = text.strip().replace(' ', '')
    match = re.fullmatch(r'(-)?zeta(\d+)(?:\^(-?\d+))?', text)
    if match:
        value = Cyclotomic.root_of_unity(int(match.group(2)), int(match.group(3) or 1))
        return -value if match.group(1) else value
    try:
        return Fraction(text)
    except ValueError:
        raise ValueError(f"Could not parse evaluation point: {text!r}. Expected e.g. 'zeta4' or '1/2'")


# ---------------------------------------------------------------------------
# Laurent polynomials in v = q^(1/2)
# ---------------------------------------------------------------------------

_TERM = re.compile(
    r'([+-]?)'
    r'(\d+(?:/\d+)?|\(\d+(?:/\d+)?\))?'
    r'\*?'
    r'(q(?:\^(\{-?\d+(?:/\d+)?\}|\(-?\d+(?:/\d+)?\)|-?\d+(?:/\d+)?))?)?'
)


def _half_exponent(text: str) -> int:
    """'3/2' -> 3, '-1' -> -2 (exponent of q in units of 1/2)."""
    value = Fraction(text.strip('{}()'))
    doubled = 2 * value
    if doubled.denominator != 1:
        raise ValueError(f"Exponent {text} is not a multiple of 1/2")
    return int(doubled)


def _exponent_text(k: int) -> str:
    """Exponent of q for a doubled exponent k."""
    return str(k // 2) if k % 2 == 0 else f"{k}/2"


class HalfLaurent:
    """Laurent polynomial in v = q^(1/2) with rational coefficients."""

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Mapping[int, object]] = None):
        cleaned = {}
        for k, c in (terms or {}).items():
            c = to_fraction(c)
            if c:
                cleaned[int(k)] = c
        self._terms = cleaned

    @classmethod
    def constant(cls, c) -> "HalfLaurent":
        return cls({0: c})

    @classmethod
    def q(cls, power: Union[int, Fraction] = 1) -> "HalfLaurent":
        return cls({_half_exponent(str(power)): 1})

    @classmethod
    def v(cls, power: int = 1) -> "HalfLaurent":
        return cls({power: 1})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[int, Fraction]]:
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_integral(self) -> bool:
        """All exponents of q are integers."""
        return all(k % 2 == 0 for k in self._terms)

    @staticmethod
    def _coerce(other) -> Optional["HalfLaurent"]:
        if isinstance(other, HalfLaurent):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return HalfLaurent({0: other})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return HalfLaurent(terms)

    __radd__ = __add__

    def __neg__(self):
        return HalfLaurent({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: Dict[int, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                terms[k1 + k2] = terms.get(k1 + k2, Fraction(0)) + c1 * c2
        return HalfLaurent(terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            if len(self._terms) != 1:
                raise ValueError("Only monomials can be raised to negative powers")
            (k, c), = self._terms.items()
            return HalfLaurent({k * exponent: c ** exponent})
        result = HalfLaurent({0: 1})
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"HalfLaurent({self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    def evaluate(self, v0) -> Scalar:
        """Value at v = v0 (v0 a nonzero rational or cyclotomic number)."""
        if not isinstance(v0, Cyclotomic):
            v0 = to_fraction(v0)
        if v0 == 0:
            raise ValueError("zero evaluation point")
        if not self._terms:
            return Fraction(0) if not isinstance(v0, Cyclotomic) else Cyclotomic(v0.order)
        inverse = 1 / v0 if not isinstance(v0, Cyclotomic) else v0.inverse()
        total = None
        for k, c in self._terms.items():
            term = (v0 ** k if k >= 0 else inverse ** (-k)) * c
            total = term if total is None else total + term
        return total

    # -- sympy bridge ---------------------------------------------------------

    def to_poly(self) -> Tuple[int, Poly]:
        """(shift, P) with self = v**shift * P(v) and P(0) != 0."""
        if not self._terms:
            raise ValueError("zero polynomial has no normalized form")
        low = min(self._terms)
        high = max(self._terms)
        coeffs = [fraction_to_sympy(self._terms.get(k, Fraction(0))) for k in range(high, low - 1, -1)]
        return low, Poly(coeffs, _V, domain=QQ)

    @classmethod
    def from_poly(cls, poly: Poly, shift: int = 0) -> "HalfLaurent":
        coeffs = list(reversed(poly.all_coeffs()))
        return cls({i + shift: fraction_from_sympy(c) for i, c in enumerate(coeffs)})

    def exact_div(self, other: "HalfLaurent") -> "HalfLaurent":
        """Quotient self / other, which must be exact in the Laurent ring."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return HalfLaurent()
        s1, p1 = self.to_poly()
        s2, p2 = other.to_poly()
        quotient, remainder = p1.div(p2)
        if not remainder.is_zero:
            raise ArithmeticError(f"{other} does not divide {self}")
        return HalfLaurent.from_poly(quotient, s1 - s2)

    # -- text / json ----------------------------------------------------------

    def to_text(self) -> str:
        """Canonical form: terms sorted by exponent, e.g. 'q^-1/2 + q^1/2'."""
        if not self._terms:
            return "0"
        parts = []
        for k, c in self.items():
            if k == 0:
                body = str(abs(c))
            else:
                power = "q" if k == 2 else f"q^{_exponent_text(k)}"
                if abs(c) == 1:
                    body = power
                elif c.denominator == 1:
                    body = f"{abs(c)}{power}"
                else:
                    body = f"({abs(c)}){power}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    @classmethod
    def parse(cls, text: str) -> "HalfLaurent":
        """Parse the text grammar: integer or (p/q) coefficients, q^a/b exponents, +/- separators."""
        compact = re.sub(r'\s+', '', text or '')
        if not compact:
            raise ValueError("Could not parse polynomial: empty input")
        terms: Dict[int, Fraction] = {}
        pos = 0
        while pos < len(compact):
            match = _TERM.match(compact, pos)
            if match is None or match.end() == pos or not (match.group(2) or match.group(3)):
                raise ValueError(f"Could not parse polynomial {text!r} at position {pos}")
            if pos > 0 and not match.group(1):
                raise ValueError(f"Could not parse polynomial {text!r}: missing separator at position {pos}")
            sign = -1 if match.group(1) == '-' else 1
            coeff = Fraction(match.group(2).strip('()')) if match.group(2) else Fraction(1)
            if match.group(3):
                exponent = _half_exponent(match.group(4)) if match.group(4) else 2
            else:
                exponent = 0
            terms[exponent] = terms.get(exponent, Fraction(0)) + sign * coeff
            pos = match.end()
        return cls(terms)

    def to_json(self) -> List[list]:
        """[[exponent numerator, exponent denominator, coefficient], ...] sorted by exponent."""
        rows = []
        for k, c in self.items():
            e = Fraction(k, 2)
            coeff = int(c) if c.denominator == 1 else str(c)
            rows.append([e.numerator, e.denominator, coeff])
        return rows

    @classmethod
    def from_json(cls, rows: Sequence[Sequence]) -> "HalfLaurent":
        terms: Dict[int, Fraction] = {}
        for num, den, coeff in rows:
            k = _half_exponent(f"{num}/{den}")
            terms[k] = terms.get(k, Fraction(0)) + to_fraction(coeff)
        return cls(terms)

    def factored_text(self) -> str:
        """
        Render as c * (balanced factor)^m ..., e.g. '(q^{1/2}+q^{-1/2})^2'.

        Falls back to the canonical text when the factors cannot all be
        centred on exponent 0 with half-integer q-exponents.
        """
        if self.is_zero() or len(self._terms) == 1:
            return self.to_text()
        shift, poly = self.to_poly()
        content, factors = factor_list(poly.as_expr(), _V)
        balance = 0
        rendered = []
        for factor, multiplicity in factors:
            fpoly = Poly(factor, _V, domain=QQ)
            degree = fpoly.degree()
            if degree % 2:
                return self.to_text()
            balance -= multiplicity * degree // 2
            centred = HalfLaurent.from_poly(fpoly, -degree // 2)
            body = _brace_text(centred)
            rendered.append(f"({body})" + (f"^{multiplicity}" if multiplicity > 1 else ""))
        if balance != shift:
            return self.to_text()
        c = fraction_from_sympy(content)
        prefix = "" if c == 1 else ("-" if c == -1 else f"{c}*")
        return prefix + "*".join(rendered)


def _brace_text(p: HalfLaurent) -> str:
    """Descending terms with braced exponents: 'q^{1/2}+q^{-1/2}'."""
    text = ""
    for k, c in sorted(p.terms.items(), reverse=True):
        if k == 0:
            body = str(abs(c))
        else:
            power = "q" if k == 2 else f"q^{{{_exponent_text(k)}}}"
            body = power if abs(c) == 1 else f"{abs(c)}{power}"
        sign = "-" if c < 0 else "+"
        text += (sign if text or sign == "-" else "") + body
    return text


def laurent_eval(p: HalfLaurent, v0) -> Scalar:
    """Exact value of p at v = v0."""
    return p.evaluate(v0)


def poly_divides_power(den: HalfLaurent, base: HalfLaurent, bound: Optional[int] = None) -> Optional[int]:
    """
    Smallest k >= 0 with den | base**k in the Laurent ring Q[v, 1/v].

    Monomials are units and are ignored. Returns None when no k up to the
    configured bound works.
    """
    if den.is_zero() or base.is_zero():
        raise ValueError("poly_divides_power requires nonzero inputs")
    if bound is None:
        bound = get_settings().divides_power_bound
    _, remaining = den.to_poly()
    _, base_poly = base.to_poly()
    k = 0
    while remaining.degree() > 0:
        common = remaining.gcd(base_poly)
        if common.degree() == 0:
            logger.debug(f"{den} shares no factor with {base}")
            return None
        remaining = remaining.quo(common)
        k += 1
        if k > bound:
            return None
    return k


# ---------------------------------------------------------------------------
# Torus characters
# ---------------------------------------------------------------------------

def _format_exponent(doubled: int) -> str:
    return str(doubled // 2) if doubled % 2 == 0 else f"{doubled}/2"


class TorusChar:
    """Laurent polynomial in z_1..z_rank; exponents stored doubled, integer coefficients."""

    __slots__ = ('rank', '_terms')

    def __init__(self, rank: int, terms: Optional[Mapping[Tuple[int, ...], int]] = None):
        if rank < 0:
            raise ValueError(f"Invalid torus rank: {rank}")
        cleaned: Dict[Tuple[int, ...], int] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != rank:
                raise ValueError(f"Exponent vector {exps} does not have length {rank}")
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"Torus characters have integer coefficients, got {c}")
                c = int(c)
            if c:
                cleaned[exps] = cleaned.get(exps, 0) + c
                if not cleaned[exps]:
                    del cleaned[exps]
        self.rank = rank
        self._terms = cleaned

    @classmethod
    def one(cls, rank: int) -> "TorusChar":
        return cls(rank, {(0,) * rank: 1})

    @classmethod
    def zero(cls, rank: int) -> "TorusChar":
        return cls(rank, {})

    @classmethod
    def monomial(cls, weight: Sequence, coeff: int = 1) -> "TorusChar":
        """z^weight with weight given in (half-)integers, e.g. (Fraction(1, 2), Fraction(-1, 2))."""
        doubled = []
        for w in weight:
            d = 2 * to_fraction(w)
            if d.denominator != 1:
                raise ValueError(f"Weight {w} is not a multiple of 1/2")
            doubled.append(int(d))
        return cls(len(doubled), {tuple(doubled): coeff})

    @classmethod
    def from_weights(cls, rank: int, weights: Iterable[Sequence]) -> "TorusChar":
        """Sum of monomials, one per weight (with repetition)."""
        total = cls.zero(rank)
        for w in weights:
            total = total + cls.monomial(w)
        return total

    @property
    def terms(self) -> Dict[Tuple[int, ...], int]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Tuple[int, ...], int]]:
        return sorted(self._terms.items(), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def is_integral(self) -> bool:
        return all(e % 2 == 0 for exps in self._terms for e in exps)

    def dimension(self) -> int:
        """Value at z = (1, ..., 1)."""
        return sum(self._terms.values())

    def _check_rank(self, other: "TorusChar"):
        if self.rank != other.rank:
            raise ValueError(f"Rank mismatch: {self.rank} vs {other.rank}")

    @staticmethod
    def _lift_scalar(other, rank: int) -> Optional["TorusChar"]:
        if isinstance(other, TorusChar):
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return TorusChar(rank, {(0,) * rank: other})
        return None

    def __add__(self, other):
        other = self._lift_scalar(other, self.rank)
        if other is None:
            return NotImplemented
        self._check_rank(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, 0) + c
        return TorusChar(self.rank, terms)

    __radd__ = __add__

    def __neg__(self):
        return TorusChar(self.rank, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift_scalar(other, self.rank)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift_scalar(other, self.rank)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift_scalar(other, self.rank)
        if other is None:
            return NotImplemented
        self._check_rank(other)
        terms: Dict[Tuple[int, ...], int] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                terms[k] = terms.get(k, 0) + c1 * c2
        return TorusChar(self.rank, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = TorusChar.one(self.rank)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other):
        other = self._lift_scalar(other, self.rank)
        if other is None:
            return NotImplemented
        return self.rank == other.rank and self._terms == other._terms

    def __hash__(self):
        return hash((self.rank, frozenset(self._terms.items())))

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"TorusChar({self.rank}, {self.to_text()!r})"

    def __str__(self):
        return self.to_text()

    def exact_div(self, divisor: int) -> "TorusChar":
        """Divide every coefficient by an integer that must divide it."""
        terms = {}
        for k, c in self._terms.items():
            if c % divisor:
                raise ArithmeticError(f"Coefficient {c} is not divisible by {divisor}")
            terms[k] = c // divisor
        return TorusChar(self.rank, terms)

    # -- Weyl group substitutions ------------------------------------------------

    def permute(self, perm: Sequence[int]) -> "TorusChar":
        """Substitute z_i -> z_perm[i]."""
        terms = {}
        for k, c in self._terms.items():
            new = [0] * self.rank
            for i, e in enumerate(k):
                new[perm[i]] = e
            terms[tuple(new)] = c
        return TorusChar(self.rank, terms)

    def invert(self, indices: Iterable[int]) -> "TorusChar":
        """Substitute z_i -> z_i^-1 for the given coordinates."""
        flip = set(indices)
        return TorusChar(self.rank, {
            tuple(-e if i in flip else e for i, e in enumerate(k)): c for k, c in self._terms.items()
        })

    def negate(self, index: int) -> "TorusChar":
        """Substitute z_index -> -z_index (integer exponents in that coordinate only)."""
        terms = {}
        for k, c in self._terms.items():
            if k[index] % 2:
                raise ValueError("z -> -z is undefined on half-integer exponents")
            terms[k] = c * (-1) ** (abs(k[index]) // 2)
        return TorusChar(self.rank, terms)

    # -- evaluation --------------------------------------------------------------

    def evaluate(self, point: Sequence) -> Scalar:
        """Value at z = point; requires integer exponents."""
        if not self.is_integral():
            raise ValueError("Half-integer exponents need evaluate_sqrt")
        return self.evaluate_sqrt(point, halves=False)

    def evaluate_sqrt(self, point: Sequence, halves: bool = True) -> Scalar:
        """Value when point[i] is a chosen square root of z_i (halves=True)."""
        if len(point) != self.rank:
            raise ValueError(f"Point has {len(point)} coordinates, expected {self.rank}")
        point = [p if isinstance(p, Cyclotomic) else to_fraction(p) for p in point]
        if any(p == 0 for p in point):
            raise ValueError("zero evaluation point")
        inverses = [(1 / p) if not isinstance(p, Cyclotomic) else p.inverse() for p in point]
        total = Fraction(0)
        for k, c in self._terms.items():
            term = c
            for e, p, pinv in zip(k, point, inverses):
                e = e if halves else e // 2
                if e:
                    term = term * (p ** e if e > 0 else pinv ** (-e))
            total = total + term
        return total

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        names = ["z"] if self.rank == 1 else [f"z{i + 1}" for i in range(self.rank)]
        parts = []
        for k, c in self.items():
            factors = []
            for name, e in zip(names, k):
                if e == 0:
                    continue
                factors.append(name if e == 2 else f"{name}^{_format_exponent(e)}")
            monomial = " ".join(factors)
            if not monomial:
                body = str(abs(c))
            elif abs(c) == 1:
                body = monomial
            else:
                body = f"{abs(c)} {monomial}"
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def to_json(self) -> List[list]:
        return [[[str(Fraction(e, 2)) for e in k], c] for k, c in self.items()]
