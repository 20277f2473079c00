"""
Exact scalars over Q, Q(i) and GF(p).

Arithmetic is delegated to sympy's polys domains (QQ, QQ_I, GF) so numbers
are arbitrary precision and always canonical. A fourth, internal field of
rational functions Q(g1..gm) carries symbolic right-hand sides through the
same elimination code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterator, Optional, Union

import sympy
from sympy import QQ, QQ_I, FiniteField, isprime
from sympy.polys.polyerrors import CoercionFailed
from sympy.ntheory import sqrt_mod

from src.errors import DivisionByZero, FieldMismatch, InfiniteField, NotPrime, ParseError


# ---------- Field specification ----------------------------------------------

class FieldKind(Enum):
    RATIONALS = "Q"
    GAUSSIAN = "Q(i)"
    PRIME = "GF"
    FUNCTIONS = "Q(g)"


@dataclass(frozen=True)
class FieldSpec:
    kind: FieldKind
    modulus: int = 0
    gens: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.kind is FieldKind.PRIME:
            if not isinstance(self.modulus, int) or self.modulus < 2 or not isprime(self.modulus):
                raise NotPrime(f"GF modulus must be a prime, got {self.modulus!r}")
        elif self.modulus:
            raise ValueError(f"{self.kind.value} takes no modulus")
        if self.kind is FieldKind.FUNCTIONS and not self.gens:
            raise ValueError("rational function field needs at least one generator")

    # ---- constructors ----
    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(FieldKind.RATIONALS)

    @classmethod
    def gaussian(cls) -> "FieldSpec":
        return cls(FieldKind.GAUSSIAN)

    @classmethod
    def prime(cls, modulus: int) -> "FieldSpec":
        return cls(FieldKind.PRIME, int(modulus))

    @classmethod
    def functions(cls, gens) -> "FieldSpec":
        return cls(FieldKind.FUNCTIONS, 0, tuple(str(g) for g in gens))

    # ---- properties ----
    @cached_property
    def domain(self):
        if self.kind is FieldKind.RATIONALS:
            return QQ
        if self.kind is FieldKind.GAUSSIAN:
            return QQ_I
        if self.kind is FieldKind.PRIME:
            return FiniteField(self.modulus, symmetric=False)
        return QQ.frac_field(*sympy.symbols(self.gens))

    @property
    def is_finite(self) -> bool:
        return self.kind is FieldKind.PRIME

    @property
    def size(self) -> Optional[int]:
        return self.modulus if self.is_finite else None

    @cached_property
    def zero(self) -> "Scalar":
        return Scalar(self, self.domain.zero)

    @cached_property
    def one(self) -> "Scalar":
        return Scalar(self, self.domain.one)

    def __str__(self) -> str:
        if self.kind is FieldKind.PRIME:
            return f"GF({self.modulus})"
        if self.kind is FieldKind.FUNCTIONS:
            return f"Q({','.join(self.gens)})"
        return self.kind.value

    # ---- conversion ----
    def __call__(self, value) -> "Scalar":
        """Coerce an int, a ratio ``(num, den)``, a Scalar or a domain element."""
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatch(f"{value.field} scalar used where {self} was expected")
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return Scalar(self, self.domain.convert(value))
        if isinstance(value, tuple) and len(value) == 2:
            return self.ratio(*value)
        if isinstance(value, float):
            raise TypeError("floating point values are not exact scalars")
        if hasattr(value, "numerator") and hasattr(value, "denominator") and not self.is_finite:
            return self.ratio(int(value.numerator), int(value.denominator))
        return Scalar(self, self.domain.convert(value))

    def ratio(self, num: int, den: int) -> "Scalar":
        if den == 0:
            raise DivisionByZero(f"{num}/0")
        return self(int(num)) / self(int(den))

    def gaussian_pair(self, re, im) -> "Scalar":
        if self.kind is not FieldKind.GAUSSIAN:
            raise FieldMismatch(f"{self} has no imaginary unit")
        return Scalar(self, QQ_I(_to_qq(re), _to_qq(im)))

    def gen(self, index: int) -> "Scalar":
        if self.kind is not FieldKind.FUNCTIONS:
            raise FieldMismatch(f"{self} has no generators")
        return Scalar(self, self.domain.gens[index])

    def from_expr(self, expr) -> "Scalar":
        return Scalar(self, self.domain.from_sympy(sympy.sympify(expr)))


def _to_qq(value):
    if isinstance(value, tuple):
        return QQ(int(value[0]), int(value[1]))
    if isinstance(value, Scalar):
        return value.value
    return QQ(int(value)) if isinstance(value, int) else QQ.convert(value)


# ---------- Scalars ----------------------------------------------------------

ScalarLike = Union["Scalar", int]


class Scalar:
    """Immutable exact field element. Mixing fields raises FieldMismatch."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"cannot combine {self.field} with {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.domain.convert(other)
        return None

    # ---- arithmetic ----
    def __add__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Scalar(self.field, self.value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Scalar(self.field, self.value - v)

    def __rsub__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Scalar(self.field, v - self.value)

    def __mul__(self, other):
        v = self._other(other)
        return NotImplemented if v is None else Scalar(self.field, self.value * v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        if not v:
            raise DivisionByZero(f"{self} / 0 in {self.field}")
        return Scalar(self.field, self.value / v)

    def __rtruediv__(self, other):
        v = self._other(other)
        if v is None:
            return NotImplemented
        if not self.value:
            raise DivisionByZero(f"{other} / 0 in {self.field}")
        return Scalar(self.field, v / self.value)

    def __neg__(self):
        return Scalar(self.field, -self.value)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return (self.field.one / self) ** (-exponent)
        out = self.field.one
        for _ in range(exponent):
            out = out * self
        return out

    def inverse(self) -> "Scalar":
        return self.field.one / self

    # ---- comparison ----
    def __eq__(self, other):
        # equal only to Scalars of the same field
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return bool(self.value)

    @property
    def is_zero(self) -> bool:
        return not self.value

    def sort_key(self) -> tuple:
        kind = self.field.kind
        if kind is FieldKind.RATIONALS:
            return (self.value,)
        if kind is FieldKind.GAUSSIAN:
            return (self.value.x, self.value.y)
        if kind is FieldKind.PRIME:
            return (int(self.value),)
        return (str(self.as_expr()),)

    # ---- views ----
    @property
    def residue(self) -> int:
        if not self.field.is_finite:
            raise FieldMismatch(f"{self.field} scalars have no residue")
        return int(self.value)

    @property
    def real(self) -> "Scalar":
        if self.field.kind is not FieldKind.GAUSSIAN:
            return self
        return Scalar(FieldSpec.rationals(), self.value.x)

    @property
    def imag(self) -> "Scalar":
        if self.field.kind is not FieldKind.GAUSSIAN:
            return FieldSpec.rationals().zero
        return Scalar(FieldSpec.rationals(), self.value.y)

    def as_expr(self):
        return self.field.domain.to_sympy(self.value)

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r}, {self.field})"


# ---------- Operations -------------------------------------------------------

_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}; expected one of {sorted(_OPS)}") from None
    if a.field != b.field:
        raise FieldMismatch(f"cannot combine {a.field} with {b.field}")
    return fn(a, b)


def _qq_sqrt(value):
    return QQ.exsqrt(value)


def sqrt(a: Scalar) -> Optional[Scalar]:
    """A square root of ``a`` in its own field, or None.

    Q gives the nonnegative root, Q(i) the root with positive real part (or
    positive imaginary part on the imaginary axis), GF(p) the smaller residue.
    """
    kind = a.field.kind
    if kind is FieldKind.RATIONALS:
        root = _qq_sqrt(a.value)
        return None if root is None else Scalar(a.field, root)

    if kind is FieldKind.PRIME:
        if a.is_zero:
            return a
        roots = sqrt_mod(int(a.value), a.field.modulus, all_roots=True)
        if not roots:
            return None
        return a.field(min(int(r) for r in roots))

    if kind is FieldKind.GAUSSIAN:
        x, y = a.value.x, a.value.y
        if not x and not y:
            return a
        norm = _qq_sqrt(x * x + y * y)
        if norm is None:
            return None
        re = _qq_sqrt((norm + x) / 2)
        if re is None:
            return None
        if re:
            im = y / (2 * re)
        else:
            # purely imaginary root, a = -im**2 with y == 0
            im = _qq_sqrt(-x)
            if im is None:
                return None
        return Scalar(a.field, QQ_I(re, im))

    return None


def enumerate_field(f: FieldSpec) -> Iterator[Scalar]:
    if not f.is_finite:
        raise InfiniteField(f"{f} cannot be enumerated")
    for k in range(f.modulus):
        yield f(k)


# ---------- Text encoding ----------------------------------------------------

_INT = r"[+-]?\d+"
_RATIONAL = re.compile(rf"^({_INT})(?:/(\d+))?$")
_INTEGER = re.compile(rf"^({_INT})$")
_FIELD = re.compile(r"^\s*(?:(Q|QQ)|(Q\(i\)|QQ_I)|GF\(\s*(\d+)\s*\))\s*$", re.IGNORECASE)


def parse_field(text: str) -> FieldSpec:
    match = _FIELD.match(text)
    if not match:
        raise ParseError(f"unknown field {text.strip()!r}; expected Q, Q(i) or GF(p)")
    if match.group(1):
        return FieldSpec.rationals()
    if match.group(2):
        return FieldSpec.gaussian()
    try:
        return FieldSpec.prime(int(match.group(3)))
    except NotPrime as exc:
        raise ParseError(str(exc)) from None


def _parse_rational(text: str):
    match = _RATIONAL.match(text)
    if not match:
        raise ParseError(f"not an exact rational: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return QQ(num, den)


def parse_scalar(f: FieldSpec, text: str) -> Scalar:
    text = text.strip()
    if not text:
        raise ParseError("empty scalar")
    if f.kind is FieldKind.PRIME:
        if not _INTEGER.match(text):
            raise ParseError(f"GF({f.modulus}) scalars are integers, got {text!r}")
        return f(int(text))
    if f.kind is FieldKind.RATIONALS:
        return Scalar(f, _parse_rational(text))
    if f.kind is FieldKind.GAUSSIAN:
        if not text.endswith("i"):
            return Scalar(f, QQ_I(_parse_rational(text), QQ(0)))
        body = text[:-1]
        split = max(body.rfind("+"), body.rfind("-"))
        if split > 0:
            re_text, im_text = body[:split], body[split:]
        else:
            re_text, im_text = "", body
        re_part = _parse_rational(re_text) if re_text else QQ(0)
        if im_text in ("", "+"):
            im_part = QQ(1)
        elif im_text == "-":
            im_part = QQ(-1)
        else:
            im_part = _parse_rational(im_text)
        return Scalar(f, QQ_I(re_part, im_part))
    try:
        return f.from_expr(text)
    except (sympy.SympifyError, CoercionFailed, TypeError, ValueError) as exc:
        raise ParseError(f"cannot read {text!r} in {f}: {exc}") from None


def _format_rational(value) -> str:
    num, den = int(value.numerator), int(value.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def format_scalar(a: Scalar) -> str:
    kind = a.field.kind
    if kind is FieldKind.PRIME:
        return str(int(a.value))
    if kind is FieldKind.RATIONALS:
        return _format_rational(a.value)
    if kind is FieldKind.GAUSSIAN:
        x, y = a.value.x, a.value.y
        if not y:
            return _format_rational(x)
        mag = _format_rational(abs(y))
        im = "i" if mag == "1" else f"{mag}i"
        if not x:
            return im if y > 0 else f"-{im}"
        return f"{_format_rational(x)}{'+' if y > 0 else '-'}{im}"
    return str(a.as_expr())
