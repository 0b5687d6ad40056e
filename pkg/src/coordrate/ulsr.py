"""Optimal broadcast rate under unlimited shared randomness.

The rate is the minimum over channels p(u|x,y), |U| <= |X||Y| + 2, of
either of two equivalent objectives:

    MAX_PAIR: max{ I(X;Y|U), I(X,Y;U) }
    MAX_AVG:  max{ I(X;Y|U), (I(X,Y;U) + I(X;Y|U)) / 2 }

The max makes the objective kinked exactly where the two terms meet,
which is where the minimizer tends to sit.  The solver anneals a
log-sum-exp softmax of the two terms over increasing temperatures and
finishes with subgradient steps on the exact max, keeping the best exact
iterate.  Multi-start with structured initial channels: the degenerate
auxiliary, a Wyner-minimizing channel, the interpolated family for
symmetric binary sources, uniform rows, plus random rows.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _simplexopt as so
from .measures import conditional_mutual_information, mutual_information
from .pmf import AuxChannel, JointPmf, PmfError, compose
from .wyner import STEP0, SolverInfeasibleError, SolverOptions, wyner_ci

#: softmax temperatures (1/bits) for annealing the kinked max
TEMPERATURES = (10.0, 100.0, 1000.0)
#: mass left on each unused auxiliary symbol when padding structured starts
PAD_EPS = 1e-3


class UlsrForm(enum.Enum):
    MAX_PAIR = "maxpair"
    MAX_AVG = "maxavg"


@dataclass(frozen=True)
class UlsrResult:
    value: float
    channel: AuxChannel
    term_cond: float
    term_joint: float
    form: UlsrForm
    diagnostics: dict = field(default_factory=dict, compare=False)


def _form_value(i_cond, i_joint, form):
    if form is UlsrForm.MAX_PAIR:
        return np.maximum(i_cond, i_joint)
    return np.maximum(i_cond, 0.5 * (i_joint + i_cond))


def ulsr_objective(q, ch, form=UlsrForm.MAX_AVG):
    """Evaluate the chosen objective for one channel, no optimization."""
    if not isinstance(q, JointPmf):
        raise PmfError("ulsr_objective: expected a JointPmf")
    if not isinstance(form, UlsrForm):
        form = UlsrForm(form)
    if ch.card_u1 != 1 or ch.card_u2 != 1:
        raise PmfError("ulsr_objective: channel must be a single-auxiliary p(u|x,y)")
    full = compose(q, ch)
    i_joint = mutual_information(full, ("x", "y"), ("u",))
    i_cond = conditional_mutual_information(full, ("x",), ("y",), ("u",))
    return UlsrResult(
        value=float(_form_value(i_cond, i_joint, form)),
        channel=ch,
        term_cond=i_cond,
        term_joint=i_joint,
        form=form,
    )


def _pad_rows(rows, card_u):
    """Embed an (nx, ny, k) channel into card_u symbols, eps mass on the rest."""
    nx, ny, k = rows.shape
    out = np.full((nx, ny, card_u), PAD_EPS / max(card_u - k, 1))
    if k == card_u:
        return rows.copy()
    out[:, :, :k] = rows * (1.0 - PAD_EPS)
    return out / out.sum(axis=-1, keepdims=True)


def _symmetric_binary_crossover(q):
    """Crossover parameter when q is a symmetric binary source, else None."""
    if q.shape != (2, 2):
        return None
    p = q.probs
    if abs(p[0, 0] - p[1, 1]) > 1e-12 or abs(p[0, 1] - p[1, 0]) > 1e-12:
        return None
    return float(p[0, 1] + p[1, 0])


def _structured_starts(q, card_u, opts):
    nx, ny = q.shape
    starts = []
    # degenerate auxiliary: nearly all mass on the first symbol
    deg = np.zeros((nx, ny, card_u))
    deg[:, :, 0] = 1.0
    starts.append(_pad_rows(deg[:, :, :1], card_u) if card_u > 1 else deg)
    # uniform rows
    starts.append(np.full((nx, ny, card_u), 1.0 / card_u))
    # a Wyner-minimizing channel plus, for symmetric binary sources, points
    # on the interpolated family between it and the uninformative channel;
    # other sources get a reduced-budget solver run instead
    a = _symmetric_binary_crossover(q)
    if a is not None and 0.0 < a < 0.5:
        from .dsbs import interpolated_channel

        for t in (0.0, 0.25, 0.5, 0.75):
            ch = interpolated_channel(a, t)
            rows = np.stack([[ch.row(x, y)[:, 0, 0] for y in range(2)] for x in range(2)])
            starts.append(_pad_rows(rows, card_u))
    else:
        try:
            lite = SolverOptions(
                restarts=min(8, opts.restarts),
                max_iters=opts.max_iters,
                tol_objective=opts.tol_objective,
                penalty_schedule=opts.penalty_schedule,
                seed=opts.seed,
            )
            wres = wyner_ci(q, card_u=min(card_u, nx * ny), opts=lite)
            rows = np.stack(
                [[wres.channel.row(x, y)[:, 0, 0] for y in range(ny)] for x in range(nx)]
            )
            starts.append(_pad_rows(rows, card_u))
        except SolverInfeasibleError:
            pass
    return starts


def ulsr_rate(q, form=UlsrForm.MAX_AVG, opts=None):
    """Minimize the chosen max-form objective over p(u|x,y), |U| = |X||Y| + 2.

    Always returns the best channel found; convergence information is in
    ``diagnostics``.  Deterministic for fixed (q, form, opts).
    """
    if not isinstance(q, JointPmf):
        raise PmfError("ulsr_rate: expected a JointPmf")
    if not isinstance(form, UlsrForm):
        form = UlsrForm(form)
    opts = opts or SolverOptions()
    nx, ny = q.shape
    card_u = nx * ny + 2
    qarr = q.probs

    structured = _structured_starts(q, card_u, opts)
    n_random = max(opts.restarts - len(structured), 1)
    batch = np.concatenate(
        [np.stack(structured), so.random_channels(nx, ny, card_u, n_random, opts.seed)]
    )
    batch = so.normalize_rows(batch)

    def exact_values(stats):
        return _form_value(stats.i_cond, stats.i_joint, form)

    def smoothed(stats, temp):
        a = stats.i_cond
        b = stats.i_joint if form is UlsrForm.MAX_PAIR else 0.5 * (stats.i_joint + stats.i_cond)
        # softmax weight of the a-term, numerically stable
        z = np.clip(so.LN2 * temp * (b - a), -60.0, 60.0)
        wa = 1.0 / (1.0 + np.exp(z))
        values = np.maximum(a, b) + np.log2(
            np.exp(np.clip(so.LN2 * temp * (np.minimum(a, b) - np.maximum(a, b)), -60.0, 0.0)) + 1.0
        ) / temp
        ga = stats.grad_cond()
        gb = stats.grad_joint() if form is UlsrForm.MAX_PAIR else 0.5 * (stats.grad_joint() + stats.grad_cond())
        grads = wa[:, None, None, None] * ga + (1.0 - wa)[:, None, None, None] * gb
        return values, grads

    def exact_subgradient(stats):
        a = stats.i_cond
        b = stats.i_joint if form is UlsrForm.MAX_PAIR else 0.5 * (stats.i_joint + stats.i_cond)
        values = np.maximum(a, b)
        ga = stats.grad_cond()
        gb = stats.grad_joint() if form is UlsrForm.MAX_PAIR else 0.5 * (stats.grad_joint() + stats.grad_cond())
        wa = np.where(a > b + 1e-12, 1.0, np.where(b > a + 1e-12, 0.0, 0.5))
        grads = wa[:, None, None, None] * ga + (1.0 - wa)[:, None, None, None] * gb
        return values, grads

    best_batch = batch.copy()
    best_values = exact_values(so.ChannelStats(qarr, batch))
    for stage, temp in enumerate(TEMPERATURES):
        batch = so.jitter_channels(batch, opts.seed, stage)
        batch, _, stats = so.eg_minimize(
            qarr,
            batch,
            lambda stats, temp=temp: smoothed(stats, temp),
            opts.max_iters,
            opts.tol_objective,
            STEP0,
        )
        stage_values = exact_values(stats)
        improved = stage_values < best_values
        best_batch[improved] = batch[improved]
        best_values = np.where(improved, stage_values, best_values)
    # polish on the exact kinked objective, keeping the best iterate seen
    polish_batch, polish_values, _ = so.eg_minimize(
        qarr, batch, exact_subgradient, opts.max_iters, opts.tol_objective, STEP0,
        track=exact_values,
    )
    improved = polish_values < best_values
    best_batch[improved] = polish_batch[improved]
    best_values = np.where(improved, polish_values, best_values)

    stats = so.ChannelStats(qarr, best_batch)
    order = sorted(
        range(best_batch.shape[0]),
        key=lambda r: (best_values[r], stats.i_cond[r], best_batch[r].tobytes()),
    )
    winner = int(order[0])
    channel = AuxChannel.from_array(best_batch[winner][:, :, :, None, None], card_u=card_u)
    result = ulsr_objective(q, channel, form)
    return UlsrResult(
        value=result.value,
        channel=channel,
        term_cond=result.term_cond,
        term_joint=result.term_joint,
        form=form,
        diagnostics={
            "restarts": best_batch.shape[0],
            "structured_starts": len(structured),
            "card_u": card_u,
            "best_values": np.sort(best_values)[:5].tolist(),
        },
    )
