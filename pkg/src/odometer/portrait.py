"""Finite-depth automorphisms of the p-ary rooted tree.

A depth-``N`` automorphism is determined by its *portrait*: a permutation of
the alphabet at every vertex of depth ``< N``.  Portraits are stored here as
leveled automata.  Level ``j`` holds the distinct sections ``g|_v`` with
``|v| = j``.  Each state has a permutation row and a child row (``child[s, x]``
is the state of ``g|_{vx}``).  Every portrait is kept in a canonical minimal
form: unreachable states are pruned and equal sections merged, with states
sorted by content.  Structural equality of the arrays is therefore equality
of automorphisms, and self-similar elements such as powers of the adding
machine need only a couple of states per level however deep they go.

Product convention: ``compose(g, h)`` applies ``g`` first, then ``h``,
matching the right-action wreath rule
``(g_1, ..., g_d) a * (h_1, ..., h_d) b = (g_1 h_a(1), ..., g_d h_a(d)) ab``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .padic import BelowResolution, Exact, UltraDist, check_base
from .tree import Word, format_word, level_letters, letters_to_ints, parse_word

DENSE_LIMIT = 2**22
ROOT_LABEL = "\u2205"


class StabilizerDepth(enum.Enum):
    FULL_DEPTH = "full depth"

    def __repr__(self) -> str:
        return f"StabilizerDepth.{self.name}"


FULL_DEPTH = StabilizerDepth.FULL_DEPTH


class WreathError(ValueError):
    pass


# -- permutations of the alphabet --------------------------------------------


@dataclass(frozen=True)
class Perm:
    """A permutation of ``{0, ..., p-1}`` given by its image list."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"{list(self.images)} is not a permutation")

    @classmethod
    def identity(cls, p: int) -> Perm:
        return cls(tuple(range(p)))

    @classmethod
    def rotation(cls, p: int, r: int = 1) -> Perm:
        """``sigma**r`` for the cycle ``sigma = (0 1 ... p-1)``."""
        return cls(tuple((x + r) % p for x in range(p)))

    @property
    def p(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def then(self, other: Perm) -> Perm:
        """Apply ``self`` first, then ``other``."""
        return Perm(tuple(other.images[y] for y in self.images))

    def inverse(self) -> Perm:
        inv = [0] * self.p
        for x, y in enumerate(self.images):
            inv[y] = x
        return Perm(tuple(inv))

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(self.p):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                cycle.append(x)
                seen.add(x)
                x = self.images[x]
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def cycle_notation(self) -> str:
        """E.g. ``(012)``; letters are space separated when ``p > 10``.

        The identity renders as ``1``.
        """
        cycles = self.cycles()
        if not cycles:
            return "1"
        sep = " " if self.p > 10 else ""
        return "".join("(" + sep.join(map(str, c)) + ")" for c in cycles)

    def __str__(self) -> str:
        return self.cycle_notation()


# -- the portrait type ---------------------------------------------------------


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Portrait:
    """A canonical leveled automaton for a depth-``depth`` tree automorphism.

    Build these with the module's constructors. The raw constructor assumes
    its arrays are already canonical.
    """

    p: int
    depth: int
    perms: tuple[np.ndarray, ...]
    children: tuple[np.ndarray, ...]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Portrait):
            return NotImplemented
        return (
            self.p == other.p
            and self.depth == other.depth
            and all(np.array_equal(a, b) for a, b in zip(self.perms, other.perms))
            and all(np.array_equal(a, b) for a, b in zip(self.children, other.children))
        )

    def __hash__(self) -> int:
        return hash(
            (self.p, self.depth)
            + tuple(a.tobytes() for a in self.perms)
            + tuple(a.tobytes() for a in self.children)
        )

    def __repr__(self) -> str:
        return f"Portrait(p={self.p}, depth={self.depth}, states={self.state_counts()})"

    def __mul__(self, other: Portrait) -> Portrait:
        return portrait_compose(self, other)

    def state_counts(self) -> list[int]:
        return [len(a) for a in self.perms]

    @property
    def root_perm(self) -> Perm:
        return Perm(tuple(int(x) for x in self.perms[0][0]))


def _canonical(
    p: int,
    depth: int,
    perms: Sequence[np.ndarray],
    children: Sequence[np.ndarray],
    root: int = 0,
) -> Portrait:
    """Prune unreachable states from ``root`` and merge equal sections."""
    perms = [np.asarray(a, dtype=np.int64) for a in perms[:depth]]
    children = [np.asarray(a, dtype=np.int64) for a in children[:depth]]

    keep = np.array([root], dtype=np.int64)
    for j in range(depth):
        perms[j] = perms[j][keep]
        c = children[j][keep]
        if j + 1 < depth:
            keep = np.unique(c)
            children[j] = np.searchsorted(keep, c)
        else:
            children[j] = np.zeros_like(c)

    remap = None
    for j in reversed(range(depth)):
        c = children[j] if remap is None else remap[children[j]]
        rows = np.concatenate([perms[j], c], axis=1)
        uniq, remap = _unique_rows(rows, max(p, int(c.max()) + 1))
        perms[j] = uniq[:, :p]
        children[j] = uniq[:, p:]

    return Portrait(
        p, depth, tuple(map(_readonly, perms)), tuple(map(_readonly, children))
    )


def from_automaton(
    p: int,
    depth: int,
    perms: Sequence[np.ndarray],
    children: Sequence[np.ndarray],
    root: int = 0,
) -> Portrait:
    """Portrait of the leveled automaton started at state ``root`` of level 0.

    ``perms[j]`` and ``children[j]`` are ``(n_j, p)`` arrays; ``children[j]``
    indexes the states of level ``j + 1`` (ignored on the last level).
    """
    if len(perms) < depth or len(children) < depth:
        raise ValueError(f"automaton has fewer than {depth} levels")
    for j in range(depth):
        table = np.asarray(perms[j])
        if not np.array_equal(np.sort(table, axis=1), np.broadcast_to(np.arange(p), table.shape)):
            raise ValueError(f"level {j} contains a row that is not a permutation")
    return _canonical(p, depth, perms, children, root)


def _unique_rows(rows: np.ndarray, bound: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted distinct rows and the inverse index, entries in ``[0, bound)``."""
    width = rows.shape[1]
    if width * np.log2(bound) < 62:
        # positional key: numeric order of keys is lexicographic order of rows
        weights = bound ** np.arange(width - 1, -1, -1, dtype=np.int64)
        keys, first, inv = np.unique(rows @ weights, return_index=True, return_inverse=True)
        return rows[first], np.asarray(inv).reshape(-1)
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    return uniq, np.asarray(inv).reshape(-1)


def _dense_children(p: int, j: int) -> np.ndarray:
    # vertex u at level j has child u + x * p**j under letter x
    u = np.arange(p**j, dtype=np.int64)[:, None]
    return u + np.arange(p, dtype=np.int64)[None, :] * p**j


def portrait_from_levels(
    p: int, levels: Sequence[np.ndarray], allow_composite: bool = False
) -> Portrait:
    """Build from dense per-level perm tables.

    ``levels[j]`` has shape ``(p**j, p)`` and row ``u`` is the permutation at
    the vertex ``int_to_word(u, p, j)``.
    """
    check_base(p, allow_composite)
    depth = len(levels)
    if depth and p ** (depth - 1) > DENSE_LIMIT:
        raise ValueError(f"dense portrait of depth {depth} is too large")
    perms, children = [], []
    for j, table in enumerate(levels):
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (p**j, p):
            raise ValueError(f"level {j} table has shape {table.shape}, expected {(p**j, p)}")
        if not np.array_equal(np.sort(table, axis=1), np.broadcast_to(np.arange(p), table.shape)):
            raise ValueError(f"level {j} contains a row that is not a permutation")
        perms.append(table)
        children.append(_dense_children(p, j))
    return _canonical(p, depth, perms, children)


def portrait_identity(p: int, depth: int, allow_composite: bool = False) -> Portrait:
    check_base(p, allow_composite)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    ident = np.arange(p, dtype=np.int64)[None, :]
    return _canonical(
        p, depth, [ident] * depth, [np.zeros((1, p), dtype=np.int64)] * depth
    )


def portrait_from_wreath(
    p: int,
    depth: int,
    states: Mapping[str, tuple[Sequence[str], Perm | Sequence[int] | None]],
    initial: str,
    allow_composite: bool = False,
) -> Portrait:
    """Unfold a finite wreath recursion to depth ``depth``.

    ``states`` maps a state name to ``(sections, perm)``: ``sections[x]`` is
    the name of the section at letter ``x`` and ``perm`` the permutation at
    the root (``None`` for the identity).  So ``a = (e, a) sigma`` over two
    letters reads ``{"a": (("e", "a"), [1, 0]), "e": (("e", "e"), None)}``.
    """
    check_base(p, allow_composite)
    names = list(states)
    index = {name: i for i, name in enumerate(names)}
    if initial not in index:
        raise WreathError(f"initial state {initial!r} is not declared")
    P = np.empty((len(names), p), dtype=np.int64)
    C = np.empty((len(names), p), dtype=np.int64)
    for name, (sections, perm) in states.items():
        if len(sections) != p:
            raise WreathError(f"state {name!r} has {len(sections)} sections, expected {p}")
        for x, target in enumerate(sections):
            if target not in index:
                raise WreathError(f"state {name!r} refers to undeclared state {target!r}")
            C[index[name], x] = index[target]
        if perm is None:
            perm = Perm.identity(p)
        elif not isinstance(perm, Perm):
            try:
                perm = Perm(tuple(perm))
            except ValueError as exc:
                raise WreathError(f"state {name!r}: {exc}") from None
        if perm.p != p:
            raise WreathError(f"state {name!r} permutes {perm.p} letters, expected {p}")
        P[index[name]] = perm.images
    return _canonical(p, depth, [P] * depth, [C] * depth, root=index[initial])


def random_portrait(
    p: int,
    depth: int,
    rng: np.random.Generator,
    width: int | None = None,
    allow_composite: bool = False,
) -> Portrait:
    """A random depth-``depth`` portrait.

    With ``width=None`` every vertex perm is drawn independently (dense, so
    keep ``p**depth`` small).  Otherwise each level has at most ``width``
    random sections wired together at random.
    """
    check_base(p, allow_composite)
    if width is None:
        levels = [
            rng.permuted(np.tile(np.arange(p), (p**j, 1)), axis=1) for j in range(depth)
        ]
        return portrait_from_levels(p, levels, allow_composite=True)
    sizes = [min(p**j, width) for j in range(depth + 1)]
    perms = [rng.permuted(np.tile(np.arange(p), (sizes[j], 1)), axis=1) for j in range(depth)]
    children = [rng.integers(0, sizes[j + 1], size=(sizes[j], p)) for j in range(depth)]
    return _canonical(p, depth, perms, children)


# -- acting on words -----------------------------------------------------------


def _check_word(g: Portrait, w: Word) -> None:
    if w.p != g.p:
        raise ValueError(f"word over {w.p} letters, portrait over {g.p}")
    if len(w) > g.depth:
        raise ValueError(f"word of length {len(w)} exceeds portrait depth {g.depth}")


def perm_at(g: Portrait, w: Word) -> Perm:
    """The permutation carried by vertex ``w`` (``|w| < depth``)."""
    _check_word(g, w)
    if len(w) == g.depth:
        raise ValueError("leaves carry no permutation")
    s = 0
    for j, x in enumerate(w):
        s = g.children[j][s, x]
    return Perm(tuple(int(y) for y in g.perms[len(w)][s]))


def portrait_apply(g: Portrait, w: Word) -> Word:
    _check_word(g, w)
    s = 0
    out = []
    for j, x in enumerate(w):
        out.append(int(g.perms[j][s, x]))
        s = g.children[j][s, x]
    return Word(g.p, tuple(out))


def apply_letters(g: Portrait, letters: np.ndarray) -> np.ndarray:
    """Apply ``g`` to every row of a letter matrix at once."""
    m, k = letters.shape
    if k > g.depth:
        raise ValueError(f"words of length {k} exceed portrait depth {g.depth}")
    out = np.empty_like(letters)
    s = np.zeros(m, dtype=np.int64)
    for j in range(k):
        x = letters[:, j]
        out[:, j] = g.perms[j][s, x]
        s = g.children[j][s, x]
    return out


def level_action(g: Portrait, k: int) -> np.ndarray:
    """Images of all level-``k`` vertices, as word integers in index order."""
    return letters_to_ints(apply_letters(g, level_letters(g.p, k)), g.p)


def level_states(g: Portrait, j: int) -> np.ndarray:
    """State id of every level-``j`` vertex, in ``word_to_int`` order."""
    s = np.zeros(1, dtype=np.int64)
    for i in range(j):
        s = g.children[i][s].T.reshape(-1)
    return s


def vertex_perms(g: Portrait) -> Iterator[tuple[Word, Perm]]:
    """Every internal vertex with its permutation, level by level."""
    for j in range(g.depth):
        states = level_states(g, j)
        rows = [Perm(tuple(int(y) for y in r)) for r in g.perms[j]]
        for u, s in enumerate(states):
            letters = []
            for _ in range(j):
                u, x = divmod(u, g.p)
                letters.append(x)
            yield Word(g.p, tuple(letters)), rows[s]


# -- group operations ----------------------------------------------------------


def portrait_compose(g: Portrait, h: Portrait) -> Portrait:
    """The product ``g * h``: apply ``g`` first, then ``h``.

    Built as a product automaton over pairs of sections: the pair
    ``(g|_v, h|_{g(v)})`` carries ``perm_g(v)`` followed by ``perm_h(g(v))``.
    """
    if g.p != h.p:
        raise ValueError(f"base mismatch: {g.p} vs {h.p}")
    p = g.p
    depth = min(g.depth, h.depth)
    S = np.zeros(1, dtype=np.int64)
    T = np.zeros(1, dtype=np.int64)
    perms, children = [], []
    for j in range(depth):
        gp = g.perms[j][S]
        perms.append(h.perms[j][T[:, None], gp])
        if j + 1 < depth:
            gc = g.children[j][S]
            hc = h.children[j][T[:, None], gp]
            width = len(h.perms[j + 1])
            pairs, inv = np.unique(gc * width + hc, return_inverse=True)
            children.append(np.asarray(inv).reshape(len(S), p))
            S, T = np.divmod(pairs, width)
        else:
            children.append(np.zeros((len(S), p), dtype=np.int64))
    return _canonical(p, depth, perms, children)


def portrait_inverse(g: Portrait) -> Portrait:
    # section of g^-1 at y is (g|_x)^-1 with x = perm^-1(y): same states, inverted rows
    inv = [np.argsort(a, axis=1) for a in g.perms]
    children = [np.take_along_axis(c, i, axis=1) for c, i in zip(g.children, inv)]
    return _canonical(g.p, g.depth, inv, children)


def portrait_power(g: Portrait, n: int) -> Portrait:
    """``g**n`` by repeated squaring through :func:`portrait_compose`."""
    if n < 0:
        g, n = portrait_inverse(g), -n
    result = portrait_identity(g.p, g.depth, allow_composite=True)
    while n:
        if n & 1:
            result = portrait_compose(result, g)
        g = portrait_compose(g, g)
        n >>= 1
    return result


def truncate(g: Portrait, depth: int) -> Portrait:
    if not 0 <= depth <= g.depth:
        raise ValueError(f"cannot truncate depth {g.depth} to {depth}")
    return _canonical(g.p, depth, g.perms, g.children)


def section(g: Portrait, x: int) -> Portrait:
    """The depth-``depth - 1`` automorphism ``g|_x`` induced below letter ``x``."""
    if g.depth == 0:
        raise ValueError("a depth-0 portrait has no sections")
    return _canonical(
        g.p, g.depth - 1, g.perms[1:], g.children[1:], root=int(g.children[0][0, x])
    )


def with_perm(g: Portrait, w: Word, perm: Perm) -> Portrait:
    """Copy of ``g`` whose vertex ``w`` carries ``perm`` instead."""
    _check_word(g, w)
    if len(w) == g.depth:
        raise ValueError("leaves carry no permutation")
    if perm.p != g.p:
        raise ValueError("permutation size does not match the alphabet")
    perms = [a.copy() for a in g.perms]
    children = [a.copy() for a in g.children]
    # clone the states along the path so shared sections elsewhere are untouched
    s = 0
    for j, x in enumerate(w):
        nxt = int(children[j][s, x])
        perms[j + 1] = np.vstack([perms[j + 1], perms[j + 1][nxt]])
        children[j + 1] = np.vstack([children[j + 1], children[j + 1][nxt]])
        clone = len(perms[j + 1]) - 1
        children[j][s, x] = clone
        s = clone
    perms[len(w)][s] = perm.images
    return _canonical(g.p, g.depth, perms, children)


# -- metric --------------------------------------------------------------------


def metric_distance(g1: Portrait, g2: Portrait) -> UltraDist:
    """Level-agreement distance ``p**-k``.

    ``k + 1`` is the first level on which ``g1`` and ``g2`` move some vertex
    differently.  Both maps agree on levels ``<= k`` exactly when they carry
    the same permutation at every vertex of depth ``< k``, so the two
    automata are walked in lockstep over common input words.
    """
    if g1.p != g2.p:
        raise ValueError(f"base mismatch: {g1.p} vs {g2.p}")
    depth = min(g1.depth, g2.depth)
    S = np.zeros(1, dtype=np.int64)
    T = np.zeros(1, dtype=np.int64)
    for j in range(depth):
        if not np.array_equal(g1.perms[j][S], g2.perms[j][T]):
            return Exact(j)
        if j + 1 < depth:
            width = len(g2.perms[j + 1])
            pairs = np.unique(g1.children[j][S] * width + g2.children[j][T])
            S, T = np.divmod(pairs, width)
    return BelowResolution(depth)


def stabilizer_depth(g: Portrait) -> int | StabilizerDepth:
    """Largest level ``k`` fixed pointwise, or ``FULL_DEPTH``."""
    ident = np.arange(g.p)
    for j, table in enumerate(g.perms):
        if not np.array_equal(table, np.broadcast_to(ident, table.shape)):
            return j
    return FULL_DEPTH


def fixes_level(g: Portrait, k: int) -> bool:
    s = stabilizer_depth(g)
    return s is FULL_DEPTH or k <= s


# -- formats -------------------------------------------------------------------


def portrait_to_json(g: Portrait) -> dict:
    if g.p ** max(g.depth - 1, 0) > DENSE_LIMIT:
        raise ValueError("portrait too deep for the per-vertex JSON format")
    return {
        "p": g.p,
        "depth": g.depth,
        "perms": {format_word(w): list(perm.images) for w, perm in vertex_perms(g)},
    }


def portrait_from_json(obj: dict | str, allow_composite: bool = False) -> Portrait:
    """Parse the per-vertex JSON format; every internal vertex must be present."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        p = obj["p"]
        depth = obj["depth"]
        entries = obj["perms"]
    except (KeyError, TypeError):
        raise ValueError("portrait JSON needs fields p, depth and perms") from None
    if not isinstance(p, int) or not isinstance(depth, int) or depth < 0:
        raise ValueError("p and depth must be integers, depth >= 0")
    check_base(p, allow_composite)
    if not isinstance(entries, dict):
        raise ValueError("perms must be an object keyed by vertex word")
    expected = (p**depth - 1) // (p - 1)
    if len(entries) != expected:
        raise ValueError(f"expected {expected} vertex perms, got {len(entries)}")
    levels = [np.full((p**j, p), -1, dtype=np.int64) for j in range(depth)]
    for key, images in entries.items():
        w = parse_word(key, p)
        if len(w) >= depth:
            raise ValueError(f"vertex {key!r} is not an internal vertex at depth {depth}")
        u = 0
        for x in reversed(w.letters):
            u = u * p + x
        if levels[len(w)][u, 0] != -1:
            raise ValueError(f"vertex {key!r} listed twice")
        try:
            perm = Perm(tuple(int(y) for y in images))
        except (ValueError, TypeError):
            raise ValueError(f"vertex {key!r}: {images!r} is not a permutation") from None
        if perm.p != p:
            raise ValueError(f"vertex {key!r}: permutation of {perm.p} letters, expected {p}")
        levels[len(w)][u] = perm.images
    return portrait_from_levels(p, levels, allow_composite=True)


def _dot_id(w: Word) -> str:
    return '"v' + format_word(w) + '"'


def portrait_to_dot(g: Portrait, name: str = "portrait") -> str:
    """Graphviz DOT: one node per vertex labeled by its permutation."""
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    for w, perm in vertex_perms(g):
        lines.append(f'  {_dot_id(w)} [label="{perm.cycle_notation()}"];')
        for x in range(g.p):
            child = Word(g.p, w.letters + (x,))
            if len(child) == g.depth:
                lines.append(f'  {_dot_id(child)} [shape=point, label=""];')
            lines.append(f'  {_dot_id(w)} -> {_dot_id(child)} [label="{x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def portrait_to_text(g: Portrait) -> str:
    lines = [f"portrait p={g.p} depth={g.depth}"]
    for w, perm in vertex_perms(g):
        vertex = format_word(w) if len(w) else ROOT_LABEL
        lines.append(f"{vertex}\t{perm.cycle_notation()}")
    return "\n".join(lines) + "\n"
