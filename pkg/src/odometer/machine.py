"""The adding machine ``a = (1, ..., 1, a) sigma`` and the embedding of Z_p.

Two independent engines compute the action of ``a**n``:

* :func:`adding_apply` adds ``n`` to the word as a base-p number (carry
  arithmetic, no tree object);
* :func:`a_power_portrait` builds the portrait from the wreath recursion
  ``a**n = (a**q_0, ..., a**q_{p-1}) sigma**n`` with ``q_x = (x + n) // p``,
  which follows from ``a = (1, ..., 1, a) sigma`` and the product rule.

The closure of ``<a>`` is identified with Z_p through :func:`phi`; at depth
``N`` the image of ``alpha`` is ``a**(alpha mod p**N)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .padic import (
    BaseError,
    Exact,
    PAdicApprox,
    PrecisionMismatch,
    UltraDist,
    ZERO,
    check_base,
    padic_add,
    padic_from_int,
    padic_neg,
)
from .portrait import (
    Perm,
    Portrait,
    from_automaton,
    portrait_apply,
    portrait_compose,
    portrait_from_wreath,
)
from .tree import Word, word_to_int


class Membership(enum.Enum):
    NOT_IN_CLOSURE = "not in closure"

    def __repr__(self) -> str:
        return f"Membership.{self.name}"


NOT_IN_CLOSURE = Membership.NOT_IN_CLOSURE


def valuation(n: int, p: int) -> int:
    """Exponent of the largest power of ``p`` dividing ``n != 0``."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _exponent_digits(n: int | PAdicApprox, p: int, k: int) -> tuple[int, ...]:
    if isinstance(n, PAdicApprox):
        if n.p != p:
            raise BaseError(f"base mismatch: {n.p} vs {p}")
        if n.precision < k:
            raise PrecisionMismatch(
                f"exponent known to {n.precision} digits, word has length {k}"
            )
        return n.digits[:k]
    if k == 0:
        return ()
    return padic_from_int(n, p, k, allow_composite=True).digits


def adding_apply(n: int | PAdicApprox, w: Word) -> Word:
    """``a**n`` applied to ``w``: add ``n`` to ``w`` read as a base-p number."""
    p = w.p
    digits = _exponent_digits(n, p, len(w))
    out = []
    carry = 0
    for x, d in zip(w.letters, digits):
        carry, y = divmod(x + d + carry, p)
        out.append(y)
    return Word(p, tuple(out))


def adding_apply_letters(n: int | PAdicApprox, letters: np.ndarray, p: int) -> np.ndarray:
    """Row-wise :func:`adding_apply` on a letter matrix."""
    digits = _exponent_digits(n, p, letters.shape[1])
    out = np.empty_like(letters)
    carry = np.zeros(len(letters), dtype=letters.dtype)
    for j, d in enumerate(digits):
        carry, out[:, j] = np.divmod(letters[:, j] + d + carry, p)
    return out


def a_portrait(p: int, depth: int, allow_composite: bool = False) -> Portrait:
    """The adding machine, unfolded from ``a = (e, ..., e, a) sigma``."""
    check_base(p, allow_composite)
    states = {
        "a": (("e",) * (p - 1) + ("a",), Perm.rotation(p)),
        "e": (("e",) * p, None),
    }
    return portrait_from_wreath(p, depth, states, "a", allow_composite=True)


def a_power_portrait(
    n: int, p: int, depth: int, allow_composite: bool = False
) -> Portrait:
    """Portrait of ``a**n`` to depth ``depth`` (``n`` may be negative).

    Each level has at most two distinct sections (``a**q`` and ``a**(q+1)``),
    so this is cheap at any depth.
    """
    check_base(p, allow_composite)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    rotate = np.arange(p, dtype=np.int64)
    exps = [n % p**depth] if depth else []
    perms, children = [], []
    for j in range(depth):
        modulus = p ** (depth - j - 1)
        perms.append(np.array([(rotate + e) % p for e in exps], dtype=np.int64))
        targets = [[((e + x) // p) % modulus for x in range(p)] for e in exps]
        nxt = sorted({t for row in targets for t in row})
        index = {e: i for i, e in enumerate(nxt)}
        children.append(np.array([[index[t] for t in row] for row in targets], dtype=np.int64))
        exps = nxt
    return from_automaton(p, depth, perms, children)


def distance_formula(n: int, m: int, p: int) -> UltraDist:
    """Closed form for ``d(a**n, a**m)``: ``p**-v`` with ``v = v_p(n - m)``."""
    if n == m:
        return ZERO
    return Exact(valuation(n - m, p))


# -- the closure and phi --------------------------------------------------------


@dataclass(frozen=True)
class MachineElement:
    """An element of the closure of ``<a>``, known to ``exponent.precision`` levels."""

    exponent: PAdicApprox

    @property
    def p(self) -> int:
        return self.exponent.p

    @property
    def depth(self) -> int:
        return self.exponent.precision

    @cached_property
    def portrait(self) -> Portrait:
        return a_power_portrait(self.exponent.to_int(), self.p, self.depth, allow_composite=True)

    def __mul__(self, other: MachineElement) -> MachineElement:
        return MachineElement(padic_add(self.exponent, other.exponent))

    def inverse(self) -> MachineElement:
        return MachineElement(padic_neg(self.exponent))

    def apply(self, w: Word) -> Word:
        return adding_apply(self.exponent, w)


def phi(alpha: PAdicApprox) -> MachineElement:
    """Image of ``alpha`` in the closure, truncated to depth ``alpha.precision``.

    The action on level ``k`` only depends on ``alpha mod p**k``, so the
    truncation is exact; :func:`partial_sums` gives the approximating
    sequence itself.
    """
    return MachineElement(alpha)


def partial_sums(alpha: PAdicApprox) -> list[int]:
    """``s_k = alpha_0 + alpha_1 p + ... + alpha_k p**k`` for ``k < precision``."""
    out = []
    s = 0
    for i, d in enumerate(alpha.digits):
        s += d * alpha.p**i
        out.append(s)
    return out


def recognize(g: Portrait, base_point: Word | None = None) -> PAdicApprox | Membership:
    """Inverse of :func:`phi` at finite depth.

    The candidate exponent is read off the orbit of ``base_point`` (the
    all-zeros word by default) and certified by rebuilding ``a**n``.
    """
    if g.depth < 1:
        raise ValueError("recognition needs depth >= 1")
    if base_point is None:
        base_point = Word(g.p, (0,) * g.depth)
    elif len(base_point) != g.depth or base_point.p != g.p:
        raise ValueError("base point must be a leaf of the portrait")
    n = (word_to_int(portrait_apply(g, base_point)) - word_to_int(base_point)) % g.p**g.depth
    if a_power_portrait(n, g.p, g.depth, allow_composite=True) != g:
        return NOT_IN_CLOSURE
    return padic_from_int(n, g.p, g.depth, allow_composite=True)


def phi_add_check(alpha: PAdicApprox, beta: PAdicApprox) -> bool:
    """Whether ``phi(alpha) * phi(beta) == phi(alpha + beta)`` as portraits."""
    if alpha.p != beta.p or alpha.precision != beta.precision:
        raise ValueError("operands must share base and precision")
    product = portrait_compose(phi(alpha).portrait, phi(beta).portrait)
    return product == phi(padic_add(alpha, beta)).portrait

