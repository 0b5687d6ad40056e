"""Batched exponentiated-gradient descent over conditional-pmf simplices.

The optimization variable is a batch of channels p(u|x,y), one per
restart, stored as an array of shape (restarts, nx, ny, nu).  Updates are
multiplicative, so iterates stay inside the (floored) simplex without
projections.  Gradients are preconditioned by 1/q(x,y), which makes the
update scale-free across source cells.
"""

from __future__ import annotations

import numpy as np

#: smallest admissible conditional probability; keeps logs finite
FLOOR = 1e-13
#: cap on the per-step exponent, limits a single multiplicative jump to e^CAP
EXP_CAP = 3.0
#: step growth after an accepted move / shrink after a rejected one
GROW = 1.3
SHRINK = 0.5
#: consecutive sub-tolerance improvements required to declare convergence
STREAK = 25
LN2 = float(np.log(2.0))


def normalize_rows(batch):
    out = np.maximum(batch, FLOOR)
    out /= out.sum(axis=-1, keepdims=True)
    return out


def random_channels(nx, ny, nu, restarts, seed):
    """Independent random starts, one derived RNG stream per restart index."""
    batch = np.empty((restarts, nx, ny, nu))
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        batch[r] = rng.random((nx, ny, nu))
    return normalize_rows(batch)


def jitter_channels(batch, seed, stage, sigma=1e-3):
    """Multiplicative seeded noise, keyed per restart index.

    Fully symmetric channels (all rows equal) are exact fixed points of the
    centered exponentiated-gradient update even when they are saddle points
    of the objective; a small deterministic perturbation at each stage start
    seeds the escape without disturbing warm starts.
    """
    out = np.empty_like(batch)
    for r in range(batch.shape[0]):
        rng = np.random.default_rng([seed, r, stage, 811])
        out[r] = batch[r] * np.exp(sigma * rng.standard_normal(batch.shape[1:]))
    return normalize_rows(out)


class ChannelStats:
    """Marginals and the two information terms of a channel batch (bits)."""

    def __init__(self, q, batch):
        self.q = q
        self.batch = batch
        w = q[None, :, :, None] * batch
        self.w = w
        self.pu = w.sum(axis=(1, 2))
        self.pxu = w.sum(axis=2)
        self.pyu = w.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_p = np.log2(batch)
            log_pu = np.log2(np.maximum(self.pu, 1e-300))
            log_pxu = np.log2(np.maximum(self.pxu, 1e-300))
            log_pyu = np.log2(np.maximum(self.pyu, 1e-300))
            joint_terms = w * (log_p - log_pu[:, None, None, :])
            cond_terms = w * (
                np.log2(np.maximum(w, 1e-300))
                + log_pu[:, None, None, :]
                - log_pxu[:, :, None, :]
                - log_pyu[:, None, :, :]
            )
        mask = w > 0
        self.i_joint = np.where(mask, joint_terms, 0.0).sum(axis=(1, 2, 3))
        self.i_cond = np.where(mask, cond_terms, 0.0).sum(axis=(1, 2, 3))

    def grad_joint(self):
        """Preconditioned gradient of I(X,Y;U) w.r.t. p(u|x,y), in nats."""
        g = np.log(np.maximum(self.batch, 1e-300)) - np.log(np.maximum(self.pu, 1e-300))[:, None, None, :]
        return np.where(self.q[None, :, :, None] > 0, g, 0.0)

    def grad_cond(self):
        """Preconditioned gradient of I(X;Y|U) w.r.t. p(u|x,y), in nats."""
        g = (
            np.log(np.maximum(self.w, 1e-300))
            + np.log(np.maximum(self.pu, 1e-300))[:, None, None, :]
            - np.log(np.maximum(self.pxu, 1e-300))[:, :, None, :]
            - np.log(np.maximum(self.pyu, 1e-300))[:, None, :, :]
        )
        return np.where(self.q[None, :, :, None] > 0, g, 0.0)


def eg_minimize(q, batch, objective_and_grad, max_iters, tol, step0, track=None):
    """Minimize per-restart objectives by exponentiated-gradient descent.

    objective_and_grad(stats) must return (values, grads) with shapes
    (restarts,) and batch.shape.  Each restart stops once the objective
    change per iteration drops below ``tol`` (or at ``max_iters``) and is
    then frozen; restarts never interact, so the result is identical to
    running them one at a time.

    When ``track`` is given (a function stats -> (restarts,) of exact
    objective values) the best tracked iterate per restart is kept and
    returned alongside the final state; subgradient steps on a kinked
    objective are not monotone, so the best-seen point is the answer.
    """
    stats = ChannelStats(q, batch)
    values, grads = objective_and_grad(stats)
    restarts = batch.shape[0]
    active = np.ones(restarts, dtype=bool)
    steps = np.full(restarts, step0)
    small_streak = np.zeros(restarts, dtype=int)
    best_batch = best_values = None
    if track is not None:
        best_values = track(stats)
        best_batch = batch.copy()
    for _ in range(max_iters):
        g = grads - grads.mean(axis=-1, keepdims=True)
        # rescale instead of clipping so a steep penalty cannot flip the
        # update direction; a single step never multiplies by more than e^CAP
        gmax = np.abs(g).max(axis=(1, 2, 3))
        scale = np.minimum(steps, EXP_CAP / np.maximum(gmax, 1e-300))
        update = -scale[:, None, None, None] * g
        proposed = normalize_rows(batch * np.exp(update))
        new_batch = np.where(active[:, None, None, None], proposed, batch)
        new_stats = ChannelStats(q, new_batch)
        new_values, new_grads = objective_and_grad(new_stats)
        if track is not None:
            tracked = track(new_stats)
            improved = tracked < best_values
            best_batch[improved] = new_batch[improved]
            best_values = np.where(improved, tracked, best_values)
        # adaptive step: accept and grow on descent, shrink and stay otherwise
        accepted = active & (new_values <= values)
        rejected = active & ~accepted
        steps[accepted] = np.minimum(steps[accepted] * GROW, step0 * 8.0)
        steps[rejected] *= SHRINK
        # a run of sub-tol improvements is required before declaring
        # convergence; single tiny steps also occur while creeping past
        # saddle points and must not stop the descent
        small = accepted & (values - new_values < tol)
        small_streak = np.where(small, small_streak + 1, np.where(accepted, 0, small_streak))
        converged = (small_streak >= STREAK) | (steps < 1e-14)
        keep = accepted[:, None, None, None]
        batch = np.where(keep, new_batch, batch)
        values = np.where(accepted, new_values, values)
        grads = np.where(keep, new_grads, grads)
        stats = new_stats
        active &= ~converged
        if not active.any():
            break
    if track is not None:
        return best_batch, best_values, stats
    # final stats must describe the returned batch, not the last proposal
    return batch, values, ChannelStats(q, batch)
