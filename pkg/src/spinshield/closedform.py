"""Analytical entanglement measures on the two-level device subspace.

With only the d=3 and d=4 device levels populated, the internal concurrence
and the one-tangle of either qubit reduce to ratios of six branch sums over
the apparatus indices.  The Cauchy-Schwarz inequality between those sums is
exactly what makes concurrence**2 <= one_tangle hold, so the two measures
coincide at first order in the perturbations and the gap between them decays
quadratically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    CoefficientSet,
    DeviceModeError,
    EntanglementReport,
    _abs2,
    _asum,
)

__all__ = [
    "BranchSums",
    "branch_sums",
    "concurrence_closed",
    "one_tangle_closed",
    "monogamy_slack",
    "first_order_expansion",
    "evaluate",
]

_UNIT_CLAMP = 1e-12


@dataclass(frozen=True)
class BranchSums:
    """The inner sums over apparatus indices shared by both closed forms.

    X3 = sum |1 + x3|^2, X34 = sum (1 + x3) * conj(1 + x4), and likewise for
    X4 and the y side.  |X34|^2 <= X3 * X4 by Cauchy-Schwarz, with equality
    iff the two rows are proportional.
    """

    X3: float
    X4: float
    Y3: float
    Y4: float
    X34: complex
    Y34: complex

    def __post_init__(self):
        for pair, prod in (("X", self.X34), ("Y", self.Y34)):
            a = getattr(self, pair + "3")
            b = getattr(self, pair + "4")
            if (prod.real**2 + prod.imag**2) > a * b * (1.0 + 1e-12) + 1e-300:
                raise ValueError(f"|{pair}34|^2 exceeds {pair}3*{pair}4; sums are inconsistent")


def _require_two_level(cs: CoefficientSet) -> None:
    if not cs.is_two_level:
        raise DeviceModeError("operation requires the two-level device mode (c1 = c2 = 0)")


def branch_sums(cs: CoefficientSet) -> BranchSums:
    """Accumulate the six apparatus sums of a two-level coefficient set."""
    _require_two_level(cs)
    x3, x4 = 1.0 + cs.x[2], 1.0 + cs.x[3]
    y3, y4 = 1.0 + cs.y[2], 1.0 + cs.y[3]
    return BranchSums(
        X3=float(_asum(_abs2(x3))),
        X4=float(_asum(_abs2(x4))),
        Y3=float(_asum(_abs2(y3))),
        Y4=float(_asum(_abs2(y4))),
        X34=complex(_asum(x3 * np.conj(x4))),
        Y34=complex(_asum(y3 * np.conj(y4))),
    )


def _norm_sq_two_level(cs: CoefficientSet, bs: BranchSums) -> float:
    return abs(cs.c[2]) ** 2 * bs.X3 * bs.Y3 + abs(cs.c[3]) ** 2 * bs.X4 * bs.Y4


def _clamp_unit(v: float) -> float:
    # Rounding can overshoot the unit interval by a few ulp; values further
    # out than the clamp window are genuine errors and are left alone.
    if 1.0 < v <= 1.0 + _UNIT_CLAMP:
        return 1.0
    if -_UNIT_CLAMP <= v < 0.0:
        return 0.0
    return v


def _concurrence(cs: CoefficientSet, bs: BranchSums, n_sq: float) -> float:
    val = 2.0 * abs(cs.c[2] * cs.c[3]) * abs(bs.X34 * bs.Y34) / n_sq
    return _clamp_unit(max(0.0, val))


def _one_tangle(cs: CoefficientSet, bs: BranchSums, n_sq: float) -> float:
    # grouping (X3*X4)*(Y3*Y4) keeps the value exactly invariant under the
    # 3 <-> 4 row swap
    val = 4.0 * abs(cs.c[2] * cs.c[3]) ** 2 * ((bs.X3 * bs.X4) * (bs.Y3 * bs.Y4)) / (n_sq * n_sq)
    return _clamp_unit(val)


def concurrence_closed(cs: CoefficientSet) -> float:
    """Internal concurrence of the qubit pair, max{0, 2|c3 c4| |X34 Y34| / N^2}."""
    bs = branch_sums(cs)
    return _concurrence(cs, bs, _norm_sq_two_level(cs, bs))


def one_tangle_closed(cs: CoefficientSet) -> float:
    """One-tangle of either qubit, 4|c3 c4|^2 X3 X4 Y3 Y4 / N^4.

    The same value describes both qubits; the configuration is symmetric
    under swapping them.
    """
    bs = branch_sums(cs)
    return _one_tangle(cs, bs, _norm_sq_two_level(cs, bs))


def monogamy_slack(cs: CoefficientSet) -> float:
    """one_tangle - concurrence**2; nonnegative by Cauchy-Schwarz on the branch sums."""
    bs = branch_sums(cs)
    n_sq = _norm_sq_two_level(cs, bs)
    c = _concurrence(cs, bs, n_sq)
    return _one_tangle(cs, bs, n_sq) - c * c


def evaluate(cs: CoefficientSet) -> EntanglementReport:
    """Both measures of one draw, computed from a single pass over the sums."""
    bs = branch_sums(cs)
    n_sq = _norm_sq_two_level(cs, bs)
    return EntanglementReport.from_measures(
        _concurrence(cs, bs, n_sq), _one_tangle(cs, bs, n_sq)
    )


def first_order_expansion(cs: CoefficientSet) -> tuple[float, float]:
    """Expansions of concurrence**2 and one-tangle to first order in the perturbations.

    Writing xbar_d for the mean real part of row d (ybar_d likewise), both
    measures truncate to the same value

        T1 = (2 |c3 c4| m_a m_b (1 + xbar3 + xbar4 + ybar3 + ybar4) / N1^2)^2,

    with N1^2 the first-order expansion of the squared normalization.  The
    returned pair is identical by construction; the residual against the
    exact values is quadratic in the perturbation scale.
    """
    _require_two_level(cs)
    xbar3 = float(np.mean(cs.x[2].real))
    xbar4 = float(np.mean(cs.x[3].real))
    ybar3 = float(np.mean(cs.y[2].real))
    ybar4 = float(np.mean(cs.y[3].real))
    w3, w4 = abs(cs.c[2]) ** 2, abs(cs.c[3]) ** 2
    # the m_a * m_b factors of the numerator and of N1^2 cancel exactly
    n1_ratio = w3 * (1.0 + 2.0 * (xbar3 + ybar3)) + w4 * (1.0 + 2.0 * (xbar4 + ybar4))
    t1 = float(
        (2.0 * abs(cs.c[2] * cs.c[3]) * (1.0 + xbar3 + xbar4 + ybar3 + ybar4) / n1_ratio) ** 2
    )
    return t1, t1
