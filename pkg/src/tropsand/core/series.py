"""Rational scalars, points and the unit-square tropical series type."""

from __future__ import annotations

import json
import re
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from gmpy2 import mpq

from ..errors import InputError, InvalidSeriesError

Rational = type(mpq(0))
Exponent = tuple[int, int]

SERIES_SCHEMA = "tropical-series/1"

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def Q(value, den=None) -> Rational:
    """Coerce ints, Fractions, mpqs or "num/den" strings to an exact rational.

    Floats and decimal strings are rejected; they would silently lose
    exactness.
    """
    if den is not None:
        return mpq(value, den)
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, str):
        return parse_rational(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return mpq(int(value.numerator), int(value.denominator))
    raise InputError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Rational:
    m = _RATIONAL_RE.match(text)
    if not m:
        raise InputError(f"expected an exact rational 'num/den', got {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise InputError(f"zero denominator in {text!r}")
    return mpq(int(num), int(den) if den is not None else 1)


def format_rational(c) -> str:
    c = Q(c)
    return f"{c.numerator}/{c.denominator}"


class RPoint(NamedTuple):
    x: Rational
    y: Rational

    @classmethod
    def of(cls, x, y) -> "RPoint":
        return cls(Q(x), Q(y))

    @property
    def is_interior(self) -> bool:
        return 0 < self.x < 1 and 0 < self.y < 1

    def __str__(self) -> str:
        return f"({format_rational(self.x)}, {format_rational(self.y)})"


def parse_point(text: str) -> RPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"expected 'x,y' with rational coordinates, got {text!r}")
    return RPoint(parse_rational(parts[0]), parse_rational(parts[1]))


class Monomial(NamedTuple):
    i: int
    j: int
    c: Rational

    def value(self, x, y):
        return self.c + self.i * x + self.j * y


class TropicalSeries:
    """f(x, y) = min over stored (i, j) of c_ij + i*x + j*y on the unit square.

    Instances are immutable; the face arrangement is computed lazily and
    cached.  Equality compares monomial mappings exactly.
    """

    omega = "unit-square"

    def __init__(self, monomials: Mapping | Iterable = ()):
        items = monomials.items() if isinstance(monomials, Mapping) else monomials
        data: dict[Exponent, Rational] = {}
        for entry in items:
            if len(entry) == 3:
                i, j, c = entry
                key = (i, j)
            else:
                key, c = entry
            i, j = key
            if isinstance(i, bool) or isinstance(j, bool) or int(i) != i or int(j) != j:
                raise InvalidSeriesError(f"exponents must be integers, got {key!r}")
            key = (int(i), int(j))
            if key in data:
                raise InvalidSeriesError(f"duplicate exponent {key}")
            data[key] = Q(c)
        self._monomials = MappingProxyType(dict(sorted(data.items())))

    @classmethod
    def zero(cls) -> "TropicalSeries":
        return cls({(0, 0): 0})

    @property
    def monomials(self) -> Mapping[Exponent, Rational]:
        return self._monomials

    def terms(self) -> list[Monomial]:
        return [Monomial(i, j, c) for (i, j), c in self._monomials.items()]

    def __len__(self) -> int:
        return len(self._monomials)

    def __contains__(self, key) -> bool:
        return key in self._monomials

    def __getitem__(self, key) -> Rational:
        return self._monomials[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TropicalSeries):
            return NotImplemented
        return dict(self._monomials) == dict(other._monomials)

    def __hash__(self) -> int:
        return hash(tuple(self._monomials.items()))

    def __repr__(self) -> str:
        body = ", ".join(f"({i},{j})->{format_rational(c)}" for (i, j), c in self._monomials.items())
        return f"TropicalSeries({{{body}}})"

    def __call__(self, x, y) -> Rational:
        return evaluate(self, (Q(x), Q(y)))

    @cached_property
    def arrangement(self):
        from .arrangement import build_arrangement
        return build_arrangement(self)

    def to_dict(self) -> dict:
        return {
            "schema": SERIES_SCHEMA,
            "omega": self.omega,
            "monomials": [
                {"i": i, "j": j, "c": format_rational(c)}
                for (i, j), c in self._monomials.items()
            ],
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "TropicalSeries":
        if data.get("omega", "unit-square") != "unit-square":
            raise InvalidSeriesError(f"unsupported omega {data.get('omega')!r}")
        schema = data.get("schema", SERIES_SCHEMA)
        if schema != SERIES_SCHEMA:
            raise InvalidSeriesError(f"unsupported schema {schema!r}")
        try:
            entries = [(m["i"], m["j"], parse_rational(str(m["c"]))) for m in data["monomials"]]
        except (KeyError, TypeError, InputError) as exc:
            raise InvalidSeriesError(f"malformed series JSON: {exc}") from exc
        return cls(entries)

    @classmethod
    def from_json(cls, text: str) -> "TropicalSeries":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSeriesError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def _check_nonempty(f: TropicalSeries):
    if not len(f):
        raise InvalidSeriesError("series has no monomials")


def evaluate(f: TropicalSeries, p) -> Rational:
    _check_nonempty(f)
    x, y = p
    return min(c + i * x + j * y for (i, j), c in f.monomials.items())


def min_monomials(f: TropicalSeries, p) -> set[Exponent]:
    """All exponents attaining the minimum at p (exact tie detection)."""
    _check_nonempty(f)
    x, y = p
    vals = {k: c + k[0] * x + k[1] * y for k, c in f.monomials.items()}
    best = min(vals.values())
    return {k for k, v in vals.items() if v == best}


def is_on_curve(f: TropicalSeries, p) -> bool:
    return len(min_monomials(f, p)) >= 2


def degree(f: TropicalSeries) -> int:
    return max((abs(i) + abs(j) for i, j in f.monomials), default=0)


def boundary_zero_check(f: TropicalSeries) -> bool:
    """True iff f restricted to every side of the unit square is identically 0.

    On a side, each monomial restricts to an affine function of one variable.
    The restriction of f is the lower envelope of those lines; it is 0 on the
    whole side iff every line is >= 0 at both corners of the side and one of
    the lines is the constant 0 (a line with non-zero slope that is >= 0 on
    the side vanishes at most at one corner).  Non-negativity inside the
    square then follows from concavity of f.
    """
    if not len(f):
        return False
    corners = ((0, 0), (1, 0), (1, 1), (0, 1))
    terms = f.monomials.items()
    for (i, j), c in terms:
        for x, y in corners:
            if c + i * x + j * y < 0:
                return False
    bottom = any(i == 0 and c == 0 for (i, j), c in terms)
    top = any(i == 0 and c + j == 0 for (i, j), c in terms)
    left = any(j == 0 and c == 0 for (i, j), c in terms)
    right = any(j == 0 and c + i == 0 for (i, j), c in terms)
    return bottom and top and left and right
