"""Wyner common information C(X;Y) by penalized min over p(u|x,y).

C(X;Y) is the minimum of I(X,Y;U) over auxiliary channels making X and Y
conditionally independent given U; it also equals the optimal broadcast
rate when the processors share no randomness.  The conditional
independence constraint is equivalent to I(X;Y|U) = 0, so the solver
minimizes I(X,Y;U) + lambda * I(X;Y|U) with lambda swept over an
increasing penalty schedule, warm-starting each stage, and requires the
final residual I(X;Y|U) <= 1e-6 bits for a restart to count as feasible.

The problem is not convex; the returned value is the best feasible point
over independently seeded restarts and certifies an upper bound only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _simplexopt as so
from .measures import conditional_mutual_information, mutual_information
from .pmf import AuxChannel, JointPmf, PmfError, compose

#: feasibility threshold on the residual I(X;Y|U), in bits
MARKOV_TOL = 1e-6
#: base step size for the exponentiated-gradient updates
STEP0 = 2.0


class SolverInfeasibleError(RuntimeError):
    """No restart reached the conditional-independence tolerance."""


@dataclass(frozen=True)
class SolverOptions:
    restarts: int = 50
    max_iters: int = 5000
    tol_objective: float = 1e-9
    penalty_schedule: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0)
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise PmfError(f"SolverOptions: restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise PmfError(f"SolverOptions: max_iters must be >= 1, got {self.max_iters}")
        if not self.tol_objective > 0:
            raise PmfError(f"SolverOptions: tol_objective must be > 0, got {self.tol_objective}")
        schedule = tuple(float(v) for v in self.penalty_schedule)
        if any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise PmfError(f"SolverOptions: penalty schedule must be strictly increasing, got {schedule}")
        object.__setattr__(self, "penalty_schedule", schedule)


@dataclass(frozen=True)
class WynerResult:
    value: float
    channel: AuxChannel
    markov_defect: float
    diagnostics: dict = field(default_factory=dict, compare=False)


def dsbs_wyner_channel(a):
    """Closed-form minimizing channel for the doubly symmetric binary source.

    With b = (1 - sqrt(1 - 2a)) / 2 the rows are p(0|0,1) = p(1|1,0) = 0.5
    and p(1|0,0) = p(0|1,1) = b^2 / (1 - a), complements accordingly.
    """
    if not 0.0 < a < 0.5:
        raise PmfError(f"dsbs_wyner_channel: crossover must lie strictly inside (0, 0.5), got {a!r}")
    b = 0.5 * (1.0 - math.sqrt(1.0 - 2.0 * a))
    r = b * b / (1.0 - a)
    rows = np.array(
        [
            [[1.0 - r, r], [0.5, 0.5]],
            [[0.5, 0.5], [r, 1.0 - r]],
        ]
    )
    return AuxChannel.from_array(rows)


def _channel_from_batch(row_block, card_u):
    return AuxChannel.from_array(row_block[:, :, :, None, None], card_u=card_u)


def _evaluate(q, channel):
    full = compose(q, channel)
    value = mutual_information(full, ("x", "y"), ("u",))
    defect = conditional_mutual_information(full, ("x",), ("y",), ("u",))
    return value, defect


def _select_best(q, batch, feasible):
    """Deterministic, order-independent pick: value, then defect, then bytes."""
    stats = so.ChannelStats(q.probs, batch)
    order = sorted(
        np.flatnonzero(feasible),
        key=lambda r: (stats.i_joint[r], stats.i_cond[r], batch[r].tobytes()),
    )
    return int(order[0])


def wyner_ci(q, card_u=None, opts=None):
    """Best upper bound on C(X;Y) found over multi-start penalized descent.

    ``card_u`` defaults to |X||Y|, which suffices for the minimization.
    Raises SolverInfeasibleError when no restart ends with
    I(X;Y|U) <= 1e-6 bits.  Deterministic for fixed (q, card_u, opts).
    """
    if not isinstance(q, JointPmf):
        raise PmfError("wyner_ci: expected a JointPmf")
    opts = opts or SolverOptions()
    nx, ny = q.shape
    card_u = int(card_u) if card_u is not None else nx * ny
    if card_u < 1:
        raise PmfError(f"wyner_ci: card_u must be >= 1, got {card_u}")

    batch = so.random_channels(nx, ny, card_u, opts.restarts, opts.seed)
    qarr = q.probs
    for stage, lam in enumerate(opts.penalty_schedule):

        def objective_and_grad(stats, lam=lam):
            values = stats.i_joint + lam * stats.i_cond
            grads = stats.grad_joint() + lam * stats.grad_cond()
            return values, grads

        batch = so.jitter_channels(batch, opts.seed, stage)
        batch, _, stats = so.eg_minimize(
            qarr, batch, objective_and_grad, opts.max_iters, opts.tol_objective, STEP0
        )

    feasible = stats.i_cond <= MARKOV_TOL
    if not feasible.any():
        raise SolverInfeasibleError(
            f"wyner_ci: no restart reached I(X;Y|U) <= {MARKOV_TOL} bits under the penalty "
            f"schedule {opts.penalty_schedule}; best residual {stats.i_cond.min():.3e} bits"
        )
    best = _select_best(q, batch, feasible)
    channel = _channel_from_batch(batch[best], card_u)
    value, defect = _evaluate(q, channel)
    return WynerResult(
        value=value,
        channel=channel,
        markov_defect=defect,
        diagnostics={
            "restarts": opts.restarts,
            "feasible_restarts": int(feasible.sum()),
            "card_u": card_u,
            "values": np.sort(stats.i_joint[feasible])[: min(5, int(feasible.sum()))].tolist(),
        },
    )


def no_sr_rate(q, opts=None):
    """Optimal broadcast rate with zero shared randomness: C(X;Y) with |U| = |X||Y| + 2."""
    if not isinstance(q, JointPmf):
        raise PmfError("no_sr_rate: expected a JointPmf")
    nx, ny = q.shape
    return wyner_ci(q, card_u=nx * ny + 2, opts=opts)
