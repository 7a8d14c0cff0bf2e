"""Truncated p-adic integers and the adding machine on the p-ary rooted tree."""

from .machine import (
    NOT_IN_CLOSURE,
    MachineElement,
    a_portrait,
    a_power_portrait,
    adding_apply,
    distance_formula,
    partial_sums,
    phi,
    phi_add_check,
    recognize,
)
from .padic import (
    BEYOND_PRECISION,
    ZERO,
    BelowResolution,
    Exact,
    PAdicApprox,
    UltraDist,
    padic_add,
    padic_distance,
    padic_from_int,
    padic_neg,
    padic_order,
    padic_sub,
)
from .portrait import (
    FULL_DEPTH,
    Perm,
    Portrait,
    metric_distance,
    portrait_apply,
    portrait_compose,
    portrait_from_wreath,
    portrait_identity,
    portrait_inverse,
    stabilizer_depth,
)
from .tree import Word, enumerate_level, int_to_word, parse_word, word_to_int

__version__ = "0.1.0"
