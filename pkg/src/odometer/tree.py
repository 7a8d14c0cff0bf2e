"""Words over X = {0, ..., p-1}, i.e. vertices of the p-ary rooted tree.

Words are read least-significant-letter first: letter ``i`` is the symbol
chosen at level ``i + 1`` and also the ``i``-th base-p digit, so the word
``"110"`` over {0, 1} is the integer 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

LEVEL_LIMIT = 2**32


class LevelTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    p: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.p < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.p}")
        for x in self.letters:
            if not 0 <= x < self.p:
                raise ValueError(f"letter {x} out of range for alphabet of size {self.p}")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Word(self.p, self.letters[index])
        return self.letters[index]

    def __add__(self, other: Word) -> Word:
        if other.p != self.p:
            raise ValueError("cannot concatenate words over different alphabets")
        return Word(self.p, self.letters + other.letters)

    def __str__(self) -> str:
        return format_word(self)

    @property
    def level(self) -> int:
        return len(self.letters)


def word(letters: Sequence[int], p: int) -> Word:
    return Word(p, tuple(int(x) for x in letters))


def format_word(w: Word) -> str:
    if w.p > 10:
        return ".".join(map(str, w.letters))
    return "".join(map(str, w.letters))


def parse_word(text: str, p: int) -> Word:
    """Inverse of :func:`format_word`.

    Letters are single characters unless the text contains dots (or the
    alphabet has more than 10 letters), in which case they are dot-separated.
    """
    text = text.strip()
    if not text:
        return Word(p)
    try:
        if "." in text or p > 10:
            letters = tuple(int(x) for x in text.split("."))
        else:
            letters = tuple(int(c) for c in text)
    except ValueError:
        raise ValueError(f"cannot parse word {text!r}") from None
    return Word(p, letters)


def word_to_int(w: Word) -> int:
    n = 0
    for x in reversed(w.letters):
        n = n * w.p + x
    return n


def int_to_word(n: int, p: int, k: int) -> Word:
    """The length-``k`` word of ``n mod p**k``."""
    if k < 0:
        raise ValueError("word length must be >= 0")
    n %= p**k
    letters = []
    for _ in range(k):
        n, x = divmod(n, p)
        letters.append(x)
    return Word(p, tuple(letters))


def _guard(p: int, k: int, limit: int) -> None:
    if k < 0:
        raise ValueError("level must be >= 0")
    if p**k > limit:
        raise LevelTooLarge(f"level {k} of the {p}-ary tree has {p**k} > {limit} vertices")


def enumerate_level(p: int, k: int) -> list[Word]:
    """All words of length ``k``; position ``i`` holds ``int_to_word(i, p, k)``."""
    _guard(p, k, LEVEL_LIMIT)
    return [int_to_word(i, p, k) for i in range(p**k)]


def level_letters(p: int, k: int, limit: int = 2**24) -> np.ndarray:
    """Letter matrix of level ``k``: row ``i`` is ``int_to_word(i, p, k)``."""
    _guard(p, k, limit)
    idx = np.arange(p**k, dtype=np.int64)
    out = np.empty((p**k, k), dtype=np.int64)
    for j in range(k):
        idx, out[:, j] = np.divmod(idx, p)
    return out


def letters_to_ints(letters: np.ndarray, p: int) -> np.ndarray:
    """Row-wise :func:`word_to_int` for a letter matrix."""
    weights = p ** np.arange(letters.shape[1], dtype=np.int64)
    return letters @ weights
