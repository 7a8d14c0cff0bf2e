"""Truncated p-adic integers and the p-adic ultrametric.

A :class:`PAdicApprox` is a p-adic integer known modulo ``p**precision``,
stored as its base-p digits, least significant first.  Only the additive
group and the metric are provided.

Distances are never floats: they are :class:`UltraDist` values carrying the
exponent ``k`` of ``p**-k``.
"""

from __future__ import annotations

import enum
import functools
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class BaseError(ValueError):
    """Raised for an unusable alphabet size / p-adic base."""


class PrecisionMismatch(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def check_base(p: int, allow_composite: bool = False) -> int:
    """Validate ``p`` as a base and return it.

    Composite bases are rejected unless ``allow_composite`` is set; none of
    the arithmetic here needs primality, but it is the default contract.
    """
    if isinstance(p, bool) or not isinstance(p, int):
        raise BaseError(f"base must be an integer, got {p!r}")
    if p < 2:
        raise BaseError(f"base must be >= 2, got {p}")
    if not allow_composite and not is_prime(p):
        raise BaseError(
            f"base {p} is composite; use allow_composite (CLI: --allow-composite) to accept it"
        )
    return p


class Order(enum.Enum):
    BEYOND_PRECISION = "beyond precision"

    def __repr__(self) -> str:
        return f"Order.{self.name}"


BEYOND_PRECISION = Order.BEYOND_PRECISION


# -- distances ---------------------------------------------------------------


@functools.total_ordering
class UltraDist:
    """An exact ultrametric distance.

    Three shapes exist: :class:`Exact` (``p**-k``), :class:`Zero`, and
    :class:`BelowResolution` (``<= p**-n`` but not resolved further).
    Ordering compares upper bounds; on a tie ``BelowResolution(n)`` sorts
    below ``Exact(n)``.
    """

    __slots__ = ()

    def _key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, UltraDist):
            return NotImplemented
        return self._key() < other._key()

    def bound_exponent(self) -> float:
        """Exponent ``e`` such that the distance is at most ``p**-e``."""
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class Exact(UltraDist):
    k: int

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("distance exponent must be >= 0")

    def _key(self) -> tuple:
        return (-self.k, 1)

    def bound_exponent(self) -> float:
        return self.k

    def value(self, p: int) -> Fraction:
        return Fraction(1, p**self.k)

    def __str__(self) -> str:
        return f"1/p^{self.k}"


@dataclass(frozen=True, eq=True)
class BelowResolution(UltraDist):
    n: int

    def _key(self) -> tuple:
        return (-self.n, 0)

    def bound_exponent(self) -> float:
        return self.n

    def __str__(self) -> str:
        return f"<= 1/p^{self.n}"


@dataclass(frozen=True, eq=True)
class Zero(UltraDist):
    def _key(self) -> tuple:
        return (-math.inf, 0)

    def bound_exponent(self) -> float:
        return math.inf

    def value(self, p: int) -> Fraction:
        return Fraction(0)

    def __str__(self) -> str:
        return "0"


ZERO = Zero()


def dist_to_json(d: UltraDist) -> dict:
    if isinstance(d, Exact):
        return {"kind": "exact", "k": d.k}
    if isinstance(d, BelowResolution):
        return {"kind": "below_resolution", "n": d.n}
    return {"kind": "zero"}


# -- the number type ---------------------------------------------------------


@dataclass(frozen=True)
class PAdicApprox:
    """A p-adic integer modulo ``p**precision``; digits are LSD-first."""

    p: int
    precision: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.p < 2:
            raise BaseError(f"base must be >= 2, got {self.p}")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if len(self.digits) != self.precision:
            raise ValueError(
                f"expected {self.precision} digits, got {len(self.digits)}"
            )
        for d in self.digits:
            if not 0 <= d < self.p:
                raise ValueError(f"digit {d} out of range for base {self.p}")

    @classmethod
    def from_digits(
        cls, digits: Sequence[int], p: int, allow_composite: bool = False
    ) -> PAdicApprox:
        check_base(p, allow_composite)
        digits = tuple(int(d) for d in digits)
        return cls(p, len(digits), digits)

    @classmethod
    def zero(cls, p: int, precision: int) -> PAdicApprox:
        return cls(p, precision, (0,) * precision)

    def to_int(self) -> int:
        """The representative in ``[0, p**precision)``."""
        n = 0
        for d in reversed(self.digits):
            n = n * self.p + d
        return n

    def truncate(self, precision: int) -> PAdicApprox:
        if not 1 <= precision <= self.precision:
            raise PrecisionMismatch(
                f"cannot truncate precision {self.precision} to {precision}"
            )
        return PAdicApprox(self.p, precision, self.digits[:precision])

    def __add__(self, other: PAdicApprox) -> PAdicApprox:
        return padic_add(self, other)

    def __sub__(self, other: PAdicApprox) -> PAdicApprox:
        return padic_sub(self, other)

    def __neg__(self) -> PAdicApprox:
        return padic_neg(self)

    def __str__(self) -> str:
        return format_digits(self)


def padic_from_int(
    n: int, p: int, precision: int, allow_composite: bool = False
) -> PAdicApprox:
    """Digits of ``n mod p**precision``; negative ``n`` wraps around."""
    check_base(p, allow_composite)
    if precision < 1:
        raise ValueError("precision must be >= 1")
    r = n % p**precision
    digits = []
    for _ in range(precision):
        r, d = divmod(r, p)
        digits.append(d)
    return PAdicApprox(p, precision, tuple(digits))


def _align(a: PAdicApprox, b: PAdicApprox) -> tuple[int, int]:
    if a.p != b.p:
        raise BaseError(f"base mismatch: {a.p} vs {b.p}")
    return a.p, min(a.precision, b.precision)


def padic_add(a: PAdicApprox, b: PAdicApprox) -> PAdicApprox:
    """Digit-wise addition with carry; precision is the smaller of the two."""
    p, n = _align(a, b)
    out = []
    carry = 0
    for i in range(n):
        carry, d = divmod(a.digits[i] + b.digits[i] + carry, p)
        out.append(d)
    return PAdicApprox(p, n, tuple(out))


def padic_neg(a: PAdicApprox) -> PAdicApprox:
    # -a = (complement of a) + 1, where complement digit is p-1-d
    p = a.p
    out = []
    carry = 1
    for d in a.digits:
        carry, r = divmod(p - 1 - d + carry, p)
        out.append(r)
    return PAdicApprox(p, a.precision, tuple(out))


def padic_sub(a: PAdicApprox, b: PAdicApprox) -> PAdicApprox:
    _align(a, b)
    return padic_add(a, padic_neg(b))


def padic_order(a: PAdicApprox) -> int | Order:
    """Index of the first nonzero digit, or ``BEYOND_PRECISION``."""
    for i, d in enumerate(a.digits):
        if d:
            return i
    return BEYOND_PRECISION


def padic_distance(a: PAdicApprox, b: PAdicApprox) -> UltraDist:
    if a.p != b.p:
        raise BaseError(f"base mismatch: {a.p} vs {b.p}")
    if a.precision != b.precision:
        raise PrecisionMismatch(
            f"precision mismatch: {a.precision} vs {b.precision}"
        )
    k = padic_order(padic_sub(a, b))
    if k is BEYOND_PRECISION:
        return BelowResolution(a.precision)
    return Exact(k)


# -- text and JSON formats ---------------------------------------------------

_DIGITS_RE = re.compile(r"^\s*([0-9]+(?:\s*,\s*[0-9]+)*)\s*(?:\(\s*base\s+([0-9]+)\s*\))?\s*$")


def format_digits(a: PAdicApprox) -> str:
    return ",".join(map(str, a.digits)) + f" (base {a.p})"


def parse_padic(
    text: str,
    p: int,
    precision: int | None = None,
    allow_composite: bool = False,
) -> PAdicApprox:
    """Parse ``int:<n>`` (needs ``precision``) or ``d0,d1,... [(base p)]``.

    A digit list is taken at its own length; when ``precision`` is given and
    shorter, the value is truncated, and when longer it is an error.
    """
    text = text.strip()
    if text.startswith("int:"):
        if precision is None:
            raise ValueError("int: operands need a precision")
        try:
            n = int(text[4:])
        except ValueError:
            raise ValueError(f"bad integer operand {text!r}") from None
        return padic_from_int(n, p, precision, allow_composite)
    m = _DIGITS_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse p-adic operand {text!r}")
    if m.group(2) is not None and int(m.group(2)) != p:
        raise BaseError(f"operand is base {m.group(2)} but base {p} was requested")
    a = PAdicApprox.from_digits(
        [int(d) for d in m.group(1).split(",")], p, allow_composite
    )
    if precision is not None and precision != a.precision:
        if precision > a.precision:
            raise PrecisionMismatch(
                f"operand has {a.precision} digits, precision {precision} requested"
            )
        a = a.truncate(precision)
    return a


def padic_to_json(a: PAdicApprox) -> dict:
    return {"p": a.p, "precision": a.precision, "digits": list(a.digits)}


def padic_from_json(obj: dict | str, allow_composite: bool = False) -> PAdicApprox:
    if isinstance(obj, str):
        obj = json.loads(obj)
    a = PAdicApprox.from_digits(obj["digits"], obj["p"], allow_composite)
    if a.precision != obj.get("precision", a.precision):
        raise ValueError("precision field disagrees with digit count")
    return a
