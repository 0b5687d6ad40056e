"""Achievable rate region membership and bound evaluation.

The inner bound is parametrized by a channel p(u,u1,u2|x,y) whose
composition with the source satisfies the double Markov chain
X - (U,U1) - (U,U2) - Y.  Six lower bounds on linear combinations of
(R, R1, R2) follow; a rate triple is in the region for that channel when
all six hold.  The special case X = Y almost surely has an exact region
with just two inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import conditional_mutual_information, mutual_information
from .pmf import AuxChannel, FullJoint, JointPmf, PmfError, compose

#: Markov-defect tolerance for composed channels, in bits
MARKOV_QUAD_TOL = 1e-6
#: slack applied to the non-strict membership inequalities
MEMBERSHIP_SLACK = 1e-12


@dataclass(frozen=True)
class RateTriple:
    """Common message rate and the two shared-randomness rates, bits/symbol."""

    r: float
    r1: float
    r2: float

    def __post_init__(self):
        for name, value in (("r", self.r), ("r1", self.r1), ("r2", self.r2)):
            if not np.isfinite(value) or value < 0:
                raise PmfError(f"RateTriple: {name} must be finite and nonnegative, got {value!r}")


@dataclass(frozen=True)
class RegionBounds:
    """Right-hand sides of the six region inequalities, in bits.

    The left-hand sides are, in order: R+R1, R+R2, R, R+R1+R2, 2R+R1+R2, 2R.
    """

    b_r_r1: float
    b_r_r2: float
    b_r: float
    b_r_r1_r2: float
    b_2r_r1_r2: float
    b_2r: float
    markov_defect: float


def check_markov_quadruple(full, tol=MARKOV_QUAD_TOL):
    """Does X - (U,U1) - (U,U2) - Y hold for this joint?

    The defect I(X; Y,U2 | U,U1) + I(Y; X,U1 | U,U2) is zero exactly when
    both factorization links hold; returns (defect <= tol, defect).
    """
    if not isinstance(full, FullJoint):
        raise PmfError("check_markov_quadruple: expected a FullJoint")
    defect = conditional_mutual_information(full, ("x",), ("y", "u2"), ("u", "u1")) + \
        conditional_mutual_information(full, ("y",), ("x", "u1"), ("u", "u2"))
    defect = max(defect, 0.0)
    return defect <= tol, defect


def achievable_bounds(q, aux):
    """Evaluate the six region bounds for a source and a certifying channel.

    Raises when the composed joint violates the double Markov chain beyond
    1e-6 bits, since the bound formulas presume it.
    """
    if not isinstance(q, JointPmf) or not isinstance(aux, AuxChannel):
        raise PmfError("achievable_bounds: expected (JointPmf, AuxChannel)")
    full = compose(q, aux)
    ok, defect = check_markov_quadruple(full)
    if not ok:
        raise PmfError(
            f"achievable_bounds: channel violates X-(U,U1)-(U,U2)-Y, defect {defect:.3e} bits"
        )
    i_cond_sides = conditional_mutual_information(full, ("u1",), ("u2",), ("u",))
    i_u = mutual_information(full, ("x", "y"), ("u",))
    i_u_u1 = mutual_information(full, ("x", "y"), ("u", "u1"))
    i_u_u2 = mutual_information(full, ("x", "y"), ("u", "u2"))
    i_all = mutual_information(full, ("x", "y"), ("u", "u1", "u2"))
    return RegionBounds(
        b_r_r1=i_u_u1,
        b_r_r2=i_u_u2,
        b_r=i_cond_sides,
        b_r_r1_r2=i_cond_sides + i_all,
        b_2r_r1_r2=i_cond_sides + i_u + i_all,
        b_2r=i_cond_sides + i_u,
        markov_defect=defect,
    )


def in_achievable_region(q, aux, rates):
    """All six inequalities, non-strict with 1e-12 slack."""
    b = achievable_bounds(q, aux)
    s = MEMBERSHIP_SLACK
    return (
        rates.r + rates.r1 >= b.b_r_r1 - s
        and rates.r + rates.r2 >= b.b_r_r2 - s
        and rates.r >= b.b_r - s
        and rates.r + rates.r1 + rates.r2 >= b.b_r_r1_r2 - s
        and 2.0 * rates.r + rates.r1 + rates.r2 >= b.b_2r_r1_r2 - s
        and 2.0 * rates.r >= b.b_2r - s
    )


def xy_equal_region(hx, rates):
    """Exact region for X = Y almost surely: R + min{R1, R2} >= H(X), R >= H(X)/2."""
    if hx < 0:
        raise PmfError(f"xy_equal_region: entropy must be nonnegative, got {hx!r}")
    s = MEMBERSHIP_SLACK
    return (
        rates.r + min(rates.r1, rates.r2) >= hx - s
        and rates.r >= 0.5 * hx - s
    )
