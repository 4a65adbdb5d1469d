"""Working-precision helpers.

All multiprecision numbers are :class:`mpmath.mpf` values of the global
``mpmath.mp`` context.  A computation fixes its precision once with
:func:`working_precision` and every polynomial records the precision it
was built at, so mixing objects from different contexts is caught early.
"""

import math
from contextlib import contextmanager

import mpmath
from mpmath import mp

DEFAULT_DIGITS = 90


def bits_for_digits(digits):
    """Binary precision needed for ``digits`` decimal digits."""
    return math.ceil(digits * math.log2(10))


def digits_for_bits(bits):
    return int(bits * math.log10(2))


def current_bits():
    return mp.prec


def current_digits():
    return digits_for_bits(mp.prec)


@contextmanager
def working_precision(digits=None, bits=None):
    """Run a block at a fixed precision (``digits`` decimal or ``bits`` binary)."""
    if bits is None:
        bits = bits_for_digits(DEFAULT_DIGITS if digits is None else digits)
    with mpmath.workprec(bits):
        yield bits


def to_mpf(x):
    """Convert ``x`` to an mpf at the current precision.

    Floats go through their shortest repr so that ``15.91`` means the
    decimal number 15.91 rather than the nearest binary double.
    """
    if isinstance(x, float):
        return mp.mpf(repr(x))
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, int):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def rel_threshold(digits_margin=10):
    """Relative magnitude below which a coefficient counts as zero."""
    return mp.mpf(2) ** (-(mp.prec - int(digits_margin * math.log2(10))))
