"""Seeded property suites over portraits, the adding machine and phi.

Every suite takes ``(p, depth, cases, rng)`` and returns a
:class:`SuiteResult`.  Suites draw from their own generator, seeded from
the run seed and the suite name, so results do not depend on which other
suites ran.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .machine import (
    NOT_IN_CLOSURE,
    a_portrait,
    a_power_portrait,
    adding_apply,
    adding_apply_letters,
    distance_formula,
    partial_sums,
    phi,
    phi_add_check,
    recognize,
)
from .padic import (
    BelowResolution,
    Exact,
    PAdicApprox,
    UltraDist,
    padic_add,
    padic_distance,
    padic_neg,
)
from .portrait import (
    FULL_DEPTH,
    Perm,
    Portrait,
    apply_letters,
    from_automaton,
    metric_distance,
    portrait_apply,
    portrait_compose,
    portrait_identity,
    portrait_inverse,
    portrait_power,
    random_portrait,
    section,
    stabilizer_depth,
    truncate,
    with_perm,
)
from .tree import Word, level_letters, letters_to_ints, word_to_int

EXHAUSTIVE_LEAVES = 2**16
RANDOM_WIDTH = 32
MAX_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def check(self, condition: bool, detail: str | Callable[[], str]) -> None:
        self.checked += 1
        if not condition:
            self.failed += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(detail() if callable(detail) else detail)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "passed": self.checked - self.failed,
            "failed": self.failed,
            "failures": list(self.failures),
        }


def within(d: UltraDist, n: int) -> bool:
    """``d <= p**-n``."""
    return d.bound_exponent() >= n


# -- generators ------------------------------------------------------------------


def random_padic(p: int, n: int, rng: np.random.Generator) -> PAdicApprox:
    return PAdicApprox(p, n, tuple(int(d) for d in rng.integers(0, p, size=n)))


def random_near(alpha: PAdicApprox, rng: np.random.Generator) -> PAdicApprox:
    """``alpha + p**k * gamma`` for random ``k`` in ``[0, precision]``."""
    k = int(rng.integers(0, alpha.precision + 1))
    tail = tuple(int(d) for d in rng.integers(0, alpha.p, size=alpha.precision - k))
    return padic_add(alpha, PAdicApprox(alpha.p, alpha.precision, (0,) * k + tail))


def random_element(p: int, depth: int, rng: np.random.Generator) -> Portrait:
    return random_portrait(p, depth, rng, width=RANDOM_WIDTH, allow_composite=True)


def perturb(g: Portrait, k: int, rng: np.random.Generator) -> Portrait:
    """A random portrait carrying ``g``'s permutations on levels ``< k``."""
    if k >= g.depth:
        return g
    r = random_element(g.p, g.depth, rng)
    perms = list(g.perms[:k]) + list(r.perms[k:])
    children = list(g.children[:k]) + list(r.children[k:])
    if k > 0:
        children[k - 1] = rng.integers(0, len(r.perms[k]), size=g.children[k - 1].shape)
    return from_automaton(g.p, g.depth, perms, children)


def random_word(p: int, k: int, rng: np.random.Generator) -> Word:
    return Word(p, tuple(int(x) for x in rng.integers(0, p, size=k)))


# -- independent oracles -----------------------------------------------------------


def action_distance(g1: Portrait, g2: Portrait) -> UltraDist:
    """Distance by comparing images of every vertex, level by level."""
    depth = min(g1.depth, g2.depth)
    for level in range(1, depth + 1):
        letters = level_letters(g1.p, level)
        if not np.array_equal(apply_letters(g1, letters), apply_letters(g2, letters)):
            return Exact(level - 1)
    return BelowResolution(depth)


def trial_valuation(n: int, p: int) -> int:
    v = 0
    while n % p ** (v + 1) == 0:
        v += 1
    return v


def acts_as_addition(g: Portrait, rng: np.random.Generator, probes: int = 64) -> bool:
    """Whether ``g`` acts on leaves as ``w -> w + c`` for one constant ``c``.

    Exhaustive over all leaves when there are few of them, otherwise probed
    on random leaves.  ``False`` always comes with a concrete counterexample.
    """
    p, depth = g.p, g.depth
    modulus = p**depth
    c = word_to_int(portrait_apply(g, Word(p, (0,) * depth)))
    if modulus <= EXHAUSTIVE_LEAVES:
        letters = level_letters(p, depth)
        images = letters_to_ints(apply_letters(g, letters), p)
        return bool(np.array_equal(images, (np.arange(modulus) + c) % modulus))
    for _ in range(probes):
        w = random_word(p, depth, rng)
        if word_to_int(portrait_apply(g, w)) != (word_to_int(w) + c) % modulus:
            return False
    return True


# -- suites ------------------------------------------------------------------------


def suite_oracle(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """Carry arithmetic and the wreath recursion agree on every word."""
    res = SuiteResult("oracle")
    levels = [k for k in range(depth + 1) if p**k <= EXHAUSTIVE_LEAVES]
    tables = {k: level_letters(p, k) for k in levels}
    for n in rng.integers(-(10**6), 10**6 + 1, size=cases):
        n = int(n)
        g = a_power_portrait(n, p, depth, allow_composite=True)
        ok = all(
            np.array_equal(adding_apply_letters(n, tables[k], p), apply_letters(g, tables[k]))
            for k in levels
        )
        if levels[-1] < depth:
            for _ in range(16):
                w = random_word(p, depth, rng)
                ok = ok and adding_apply(n, w) == portrait_apply(g, w)
        res.check(ok, f"n={n}: engines disagree")
    return res


def suite_wreath(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """``a**p = (a, ..., a)``, and powers built three ways coincide."""
    res = SuiteResult("wreath")
    a = a_portrait(p, depth, allow_composite=True)
    res.check(a == a_power_portrait(1, p, depth, allow_composite=True), "a from wreath != a**1")
    ap = a_power_portrait(p, p, depth, allow_composite=True)
    res.check(ap.root_perm.is_identity(), "a**p moves level 1")
    if depth >= 1:
        a_below = a_portrait(p, depth - 1, allow_composite=True)
        for x in range(p):
            res.check(section(ap, x) == a_below, f"section {x} of a**p is not a")
    small = min(depth, 6)
    a_small = a_portrait(p, small, allow_composite=True)
    for n in rng.integers(-(p**small), p**small + 1, size=min(cases, 50)):
        n = int(n)
        res.check(
            portrait_power(a_small, n) == a_power_portrait(n, p, small, allow_composite=True),
            f"a**{n}: repeated products differ from the power recursion",
        )
    return res


def suite_distance(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """Closed-form ``d(a**n, a**m)`` against the portrait metric."""
    res = SuiteResult("distance")
    for _ in range(cases):
        n, m = (int(x) for x in rng.integers(-(10**6), 10**6 + 1, size=2))
        if rng.random() < 0.5:
            m = n + int(rng.integers(-50, 51)) * p ** int(rng.integers(0, 8))
        d = metric_distance(
            a_power_portrait(n, p, depth, allow_composite=True),
            a_power_portrait(m, p, depth, allow_composite=True),
        )
        if n == m or trial_valuation(n - m, p) >= depth:
            expected = BelowResolution(depth)
        else:
            expected = Exact(trial_valuation(n - m, p))
        res.check(d == expected, f"d(a^{n}, a^{m}) = {d}, expected {expected}")
        if n != m and trial_valuation(n - m, p) < depth:
            res.check(distance_formula(n, m, p) == d, f"formula disagrees for ({n}, {m})")
    return res


def suite_stabilizer(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """``a**n`` fixes level ``k`` iff ``p**k`` divides ``n`` (exhaustive)."""
    res = SuiteResult("stabilizer")
    top = min(depth, 6)
    for n in range(p**top + 1):
        g = a_power_portrait(n, p, top, allow_composite=True)
        s = stabilizer_depth(g)
        for k in range(top + 1):
            fixed = s is FULL_DEPTH or k <= s
            res.check(fixed == (n % p**k == 0), f"a^{n} at level {k}")
    return res


def suite_isometry(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("isometry")
    for _ in range(cases):
        alpha = random_padic(p, depth, rng)
        beta = random_near(alpha, rng)
        d_tree = metric_distance(phi(alpha).portrait, phi(beta).portrait)
        d_padic = padic_distance(alpha, beta)
        res.check(d_tree == d_padic, f"{alpha} vs {beta}: {d_tree} != {d_padic}")
    return res


def suite_homomorphism(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    res = SuiteResult("homomorphism")
    for _ in range(cases):
        alpha = random_padic(p, depth, rng)
        beta = random_padic(p, depth, rng)
        res.check(phi_add_check(alpha, beta), f"phi({alpha} + {beta}) != phi(.)phi(.)")
        product = portrait_compose(phi(alpha).portrait, phi(beta).portrait)
        res.check(recognize(product) == padic_add(alpha, beta), f"recognize product {alpha}, {beta}")
        inv = portrait_inverse(phi(alpha).portrait)
        res.check(recognize(inv) == padic_neg(alpha), f"recognize inverse of {alpha}")
    return res


def suite_ultrametric(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """Strong triangle inequality, symmetry, invariance, and the stabilizer form."""
    res = SuiteResult("ultrametric")
    brute = p**depth <= EXHAUSTIVE_LEAVES
    for _ in range(cases):
        g1 = random_element(p, depth, rng)
        g2 = perturb(g1, int(rng.integers(0, depth + 1)), rng)
        g3 = perturb(g2, int(rng.integers(0, depth + 1)), rng)
        d12, d23, d13 = metric_distance(g1, g2), metric_distance(g2, g3), metric_distance(g1, g3)
        res.check(d13 <= max(d12, d23), lambda: f"triangle: {d13} > max({d12}, {d23})")
        res.check(d12 == metric_distance(g2, g1), "symmetry")
        res.check((d12 == BelowResolution(depth)) == (g1 == g2), "zero distance iff equal")
        f = random_element(p, depth, rng)
        res.check(
            metric_distance(portrait_compose(f, g1), portrait_compose(f, g2)) == d12,
            "left invariance",
        )
        s = stabilizer_depth(portrait_compose(portrait_inverse(g1), g2))
        via_stabilizer = BelowResolution(depth) if s is FULL_DEPTH else Exact(s)
        res.check(via_stabilizer == d12, f"stabilizer form {via_stabilizer} != {d12}")
        if brute:
            res.check(action_distance(g1, g2) == d12, "vertex-action oracle")
    return res


def suite_continuity(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """Products and inverses of nearby elements stay nearby."""
    res = SuiteResult("continuity")
    for _ in range(cases):
        n = int(rng.integers(0, depth + 1))
        g0 = random_element(p, depth, rng)
        h0 = random_element(p, depth, rng)
        g, h = perturb(g0, n, rng), perturb(h0, n, rng)
        if not (within(metric_distance(g, g0), n) and within(metric_distance(h, h0), n)):
            res.check(False, f"generator produced pair outside the {n}-ball")
            continue
        d_prod = metric_distance(portrait_compose(g, h), portrait_compose(g0, h0))
        res.check(within(d_prod, n), f"product: {d_prod} > 1/p^{n}")
        d_inv = metric_distance(portrait_inverse(g), portrait_inverse(g0))
        res.check(within(d_inv, n), f"inverse: {d_inv} > 1/p^{n}")
    return res


def suite_cauchy(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """Partial-sum powers settle level by level and converge to phi."""
    res = SuiteResult("cauchy")
    for _ in range(cases):
        alpha = random_padic(p, depth, rng)
        sums = partial_sums(alpha)
        powers = [a_power_portrait(s, p, depth, allow_composite=True) for s in sums]
        for l in range(depth):
            head = truncate(powers[l], l + 1)
            for k in range(l + 1, depth):
                d = metric_distance(powers[k], powers[l])
                res.check(within(d, l + 1), f"{alpha}: d(s_{k}, s_{l}) = {d}")
                res.check(truncate(powers[k], l + 1) == head, f"{alpha}: level {l + 1} moved at {k}")
        res.check(powers[-1] == phi(alpha).portrait, f"{alpha}: limit is not phi")
    return res


def suite_recognition(p: int, depth: int, cases: int, rng: np.random.Generator) -> SuiteResult:
    """Closure elements round-trip; single-vertex corruptions are rejected."""
    res = SuiteResult("recognition")
    # at p = 2, depth 1 both root perms are rotations: nothing to corrupt
    can_corrupt = depth > 1 or p > 2
    for _ in range(cases):
        alpha = random_padic(p, depth, rng)
        g = phi(alpha).portrait
        res.check(recognize(g) == alpha, f"round trip of {alpha}")
        res.check(recognize(g, random_word(p, depth, rng)) == alpha, f"base point for {alpha}")
        res.check(phi(recognize(g)).portrait == g, f"phi(recognize(g)) for {alpha}")
        if can_corrupt:
            bad = corrupt(g, rng)
            res.check(recognize(bad) is NOT_IN_CLOSURE, f"corrupted {alpha} accepted")
    res.check(
        recognize(portrait_identity(p, depth, allow_composite=True)) == PAdicApprox.zero(p, depth),
        "identity",
    )
    return res


def corrupt(g: Portrait, rng: np.random.Generator, attempts: int = 1000) -> Portrait:
    """Change one vertex permutation so that ``g`` stops acting as ``+c``."""
    p, depth = g.p, g.depth
    for _ in range(attempts):
        w = random_word(p, int(rng.integers(0, depth)), rng)
        perm = Perm(tuple(int(x) for x in rng.permutation(p)))
        bad = with_perm(g, w, perm)
        if bad != g and not acts_as_addition(bad, rng):
            return bad
    raise RuntimeError("could not corrupt portrait")


SUITES: dict[str, Callable[[int, int, int, np.random.Generator], SuiteResult]] = {
    "oracle": suite_oracle,
    "wreath": suite_wreath,
    "distance": suite_distance,
    "stabilizer": suite_stabilizer,
    "isometry": suite_isometry,
    "homomorphism": suite_homomorphism,
    "ultrametric": suite_ultrametric,
    "continuity": suite_continuity,
    "cauchy": suite_cauchy,
    "recognition": suite_recognition,
}


def suite_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def run_suites(names: list[str], p: int, depth: int, cases: int, seed: int) -> list[SuiteResult]:
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[name](p, depth, cases, suite_rng(seed, name)) for name in names]


def report_json(results: list[SuiteResult], p: int, depth: int, cases: int, seed: int) -> dict:
    return {
        "config": {"p": p, "depth": depth, "cases": cases, "seed": seed},
        "ok": all(r.ok for r in results),
        "suites": [r.to_json() for r in results],
    }


def report_text(results: list[SuiteResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{r.name:<13} {status}  {r.checked - r.failed}/{r.checked} passed")
        lines.extend(f"    {f}" for f in r.failures)
    overall = "PASS" if all(r.ok for r in results) else "FAIL"
    lines.append(f"overall       {overall}")
    return "\n".join(lines) + "\n"
