"""Axis scale helper functions."""

import math

from esdlab.exceptions import ValidationError

TICK_SEQUENCE = (1, 2, 2.5, 5, 10)


def any_step(step):
    """Step helper that accepts any step."""
    return step

def sequence_step(step, step_sequence):
    """Sequence step helper, this rounds step up to a 'sensible' value."""
    factor = math.floor(math.log10(step))
    norm = step / (10**factor)

    for s in step_sequence:
        if norm <= s + 1e-12:
            return s * 10**factor

    return step_sequence[0] * 10**(factor + 1)

def default_step(step):
    """Default step helper, rounds to 1, 2, 2.5 or 5 times a power of ten."""
    return sequence_step(step, TICK_SEQUENCE)

def axis_range(values, floor=None, ceiling=None):
    """
    Closed data range of values, widened when it collapses to a point and
    clamped to the optional floor and ceiling.
    """
    finite = [float(v) for v in values if v is not None and math.isfinite(v)]
    if not finite:
        return (0.0 if floor is None else floor, 1.0 if ceiling is None else ceiling)
    lo, hi = min(finite), max(finite)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    if floor is not None:
        lo = max(lo, floor)
    if ceiling is not None:
        hi = min(hi, ceiling)
    return (lo, hi)

def ticks(lo, hi, max_ticks=6, step_function=default_step):
    """Tick positions covering [lo, hi] with at most max_ticks + 1 marks."""
    if not hi > lo:
        raise ValidationError("axis range must be increasing, got [%r, %r]" % (lo, hi))
    if max_ticks < 1:
        raise ValidationError("an axis needs at least one tick interval")
    step = step_function((hi - lo) / max_ticks)
    first = math.ceil(lo / step - 1e-9)
    marks = []
    k = first
    while k * step <= hi + 1e-9 * step:
        marks.append(round(k * step, 12) + 0.0)
        k += 1
    return marks

def tick_label(value, step):
    """Label with as many decimals as the step needs."""
    decimals = 0
    while decimals < 6 and abs(step * 10**decimals - round(step * 10**decimals)) > 1e-9:
        decimals += 1
    return "%.*f" % (decimals, value)
