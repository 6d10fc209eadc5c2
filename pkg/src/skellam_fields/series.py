"""Series summation core: stopping rule and compensated accumulation.

Every analytic series in the package (Bessel, Mittag-Leffler, Wright and the
pmf outer sums built on them) is truncated by the same rule: stop once
``consecutive_small`` successive terms fall below ``rel_tol`` times the
running partial sum, fail if ``max_terms`` is reached first.  Terms are
accumulated in Neumaier-compensated form so alternating series do not lose
accuracy to cancellation in the accumulator itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import SeriesNonConvergenceError, ValidationError

__all__ = ["SeriesControl", "DEFAULT_CONTROL", "sum_series", "sum_series_tracked"]

_EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for series evaluation.

    rel_tol: relative magnitude at which a term counts as negligible.
    max_terms: hard cap on the number of summed terms.
    consecutive_small: how many negligible terms in a row end the sum.
    """

    rel_tol: float = 1e-15
    max_terms: int = 500
    consecutive_small: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValidationError("rel_tol: must be > 0")
        if self.max_terms < 1:
            raise ValidationError("max_terms: must be >= 1")
        if self.consecutive_small < 1:
            raise ValidationError("consecutive_small: must be >= 1")


DEFAULT_CONTROL = SeriesControl()


def sum_series(terms: Iterable[float], ctrl: SeriesControl = DEFAULT_CONTROL,
               label: str = "series") -> float:
    """Sum ``terms`` under the stopping rule with compensated accumulation.

    ``terms`` may be an infinite generator; it is consumed until the rule
    fires.  A generator that ends on its own is treated as a finite sum.
    Raises SeriesNonConvergenceError if ``ctrl.max_terms`` terms were consumed
    without the rule firing.
    """
    total = 0.0
    comp = 0.0  # Neumaier compensation
    small = 0
    count = 0
    for term in terms:
        count += 1
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        # A zero term (underflow) is negligible even when the sum is still 0.
        if term == 0.0 or abs(term) < ctrl.rel_tol * abs(total + comp):
            small += 1
            if small >= ctrl.consecutive_small:
                return total + comp
        else:
            small = 0
        if count >= ctrl.max_terms:
            raise SeriesNonConvergenceError(
                f"{label}: no convergence within {ctrl.max_terms} terms"
            )
    return total + comp


def sum_series_tracked(terms: Iterable[tuple], ctrl: SeriesControl = DEFAULT_CONTROL,
                       label: str = "series", noise_cap: float | None = None) -> tuple:
    """Like :func:`sum_series` for (term, term_noise) pairs, returning
    (value, noise).

    The returned noise bounds the cancellation error of the sum: machine
    epsilon times the largest term magnitude seen, plus the propagated
    per-term noises.  Alternating series whose intermediate terms dwarf the
    result are thereby detected instead of silently returning rounding
    garbage; if ``noise_cap`` is given the sum aborts as soon as the running
    noise exceeds it.
    """
    total = 0.0
    comp = 0.0
    noise = 0.0
    max_abs = 0.0
    small = 0
    count = 0
    for term, term_noise in terms:
        count += 1
        max_abs = max(max_abs, abs(term))
        noise += term_noise
        if noise_cap is not None and noise + _EPS * max_abs > noise_cap:
            raise SeriesNonConvergenceError(
                f"{label}: cancellation noise exceeds {noise_cap:g}; "
                "arguments are outside the double-precision-stable envelope"
            )
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        if term == 0.0 or abs(term) < ctrl.rel_tol * abs(total + comp):
            small += 1
            if small >= ctrl.consecutive_small:
                return total + comp, noise + _EPS * max_abs
        else:
            small = 0
        if count >= ctrl.max_terms:
            raise SeriesNonConvergenceError(
                f"{label}: no convergence within {ctrl.max_terms} terms"
            )
    return total + comp, noise + _EPS * max_abs
