"""Seeded Monte Carlo implementation of the coordination coding scheme.

One trial mirrors the operational scheme: shared randomness gives each
processor half of a common bin index m0 = (m01, m02) plus a private
codeword index b_i.  Codebooks are drawn per the generation order
u ~ p(u), then x | u and y | u conditionally independently.  The
coordinator searches the bin for the first candidate index m* whose
codeword triple is typical for the composed target joint, broadcasts
(m01 XOR m02, m*), and each processor reconstructs m0 from its own half
and emits its codeword.  Rates follow the accounting
R = R0/2 + R*, R_i = Rt_i + R0/2.

A run holds the codebooks fixed and varies only the shared-randomness
draws across trials: the induced distribution being estimated is that of
one concrete code, which is what makes insufficient rates measurable
(too few codewords get reused and their sampling noise never averages
out).  Codewords are never materialized as full tables: each codebook
slice is a deterministic function of (seed, code stream, indices) through
a seeded generator, which keeps memory flat while preserving the i.i.d.
codebook statistics and exact reproducibility.

The report pools the per-position (x, y) pairs over all trials into an
empirical per-letter joint.  Its distance to the target lower-bounds the
block-level criterion, so a large value certifies failure while a small
value is necessary for success.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .measures import conditional_mutual_information
from .pmf import AuxChannel, JointPmf, Pmf, compose, tv_distance

#: hard cap on each index-set size (desk-scale memory guard)
INDEX_CAP = 2**20
#: default tolerance on I(X;Y|U) of the composed channel, in bits
MARKOV_DEFECT_TOL = 1e-6

_W_STREAM, _U_STREAM, _X_STREAM, _Y_STREAM = 0, 1, 2, 3


class SimulationError(ValueError):
    """Invalid simulator configuration or index out of range."""


def _index_size(n, rate):
    return max(1, math.ceil(2.0 ** (n * rate) - 1e-9))


@dataclass(frozen=True)
class SimRates:
    """Scheme rates in bits/symbol: bin rate r0, index rate r_star, codeword rates rt1, rt2."""

    r0: float
    r_star: float
    rt1: float
    rt2: float

    def __post_init__(self):
        for name in ("r0", "r_star", "rt1", "rt2"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise SimulationError(f"SimRates: {name} must be finite and nonnegative, got {value!r}")

    @property
    def r(self):
        """Common message rate R = R0/2 + R*."""
        return 0.5 * self.r0 + self.r_star

    @property
    def r1(self):
        """Shared randomness rate of processor 1: Rt1 + R0/2."""
        return self.rt1 + 0.5 * self.r0

    @property
    def r2(self):
        return self.rt2 + 0.5 * self.r0


@dataclass(frozen=True)
class SimConfig:
    q: JointPmf
    channel: AuxChannel
    n: int
    rates: SimRates
    eps_typ: float = 0.1
    trials: int = 1
    seed: int = 0
    max_markov_defect: float = MARKOV_DEFECT_TOL

    def __post_init__(self):
        if self.n < 1:
            raise SimulationError(f"SimConfig: block length must be >= 1, got {self.n}")
        if self.trials < 1:
            raise SimulationError(f"SimConfig: trials must be >= 1, got {self.trials}")
        if not self.eps_typ > 0:
            raise SimulationError(f"SimConfig: eps_typ must be > 0, got {self.eps_typ}")
        if self.channel.card_u1 != 1 or self.channel.card_u2 != 1:
            raise SimulationError("SimConfig: scheme uses a single auxiliary, need card_u1 = card_u2 = 1")

    def index_sizes(self):
        """Sizes (n01, nstar, nb1, nb2); m0 ranges over n01 * n01 pairs."""
        n = self.n
        return (
            _index_size(n, 0.5 * self.rates.r0),
            _index_size(n, self.rates.r_star),
            _index_size(n, self.rates.rt1),
            _index_size(n, self.rates.rt2),
        )


@dataclass(frozen=True)
class SimReport:
    empirical_joint: JointPmf
    tv_per_letter: float
    mstar_failure_rate: float
    trials_run: int
    config_echo: dict = field(default_factory=dict, compare=False)

    def to_dict(self):
        return {
            "empirical_joint": self.empirical_joint.probs.tolist(),
            "tv_per_letter": self.tv_per_letter,
            "mstar_failure_rate": self.mstar_failure_rate,
            "trials_run": self.trials_run,
            "config_echo": self.config_echo,
        }

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def derive_components(channel, q, max_defect=MARKOV_DEFECT_TOL):
    """Per-letter generation components of the composed joint.

    Returns (p_u, p_x_given_u, p_y_given_u) where the conditionals are
    (card_u, |X|) and (card_u, |Y|) arrays.  The scheme draws x and y
    conditionally independently given u, so the composed joint must be
    close to a chain X - U - Y; the residual I(X;Y|U) may not exceed
    ``max_defect`` bits.
    """
    full = compose(q, channel)
    defect = conditional_mutual_information(full, ("x",), ("y",), ("u",))
    if defect > max_defect:
        raise SimulationError(
            f"derive_components: composed channel has I(X;Y|U) = {defect:.3e} bits "
            f"> {max_defect}; the scheme presumes X - U - Y"
        )
    joint_uxy = full.probs[:, :, :, 0, 0].transpose(2, 0, 1)
    p_u = joint_uxy.sum(axis=(1, 2))
    # conditionals on zero-mass auxiliary symbols are never sampled; keep uniform
    safe = np.maximum(p_u, 1e-300)
    p_x_given_u = joint_uxy.sum(axis=2) / safe[:, None]
    p_y_given_u = joint_uxy.sum(axis=1) / safe[:, None]
    zero = p_u <= 0
    p_x_given_u[zero] = 1.0 / joint_uxy.shape[1]
    p_y_given_u[zero] = 1.0 / joint_uxy.shape[2]
    return Pmf(p_u), p_x_given_u, p_y_given_u


def _sample(cum, uniforms):
    """Inverse-CDF sampling: cum rows must end at exactly 1."""
    return (uniforms[..., None] < cum).argmax(axis=-1)


class Codebooks:
    """Lazy keyed access to the codeword tables of one trial.

    A slice for given indices is regenerated identically on every call, so
    coordinator and processors read the same codewords without sharing
    state.  Slices for distinct indices come from distinct seeded streams
    and are therefore independent, matching a single i.i.d. codebook draw.
    """

    def __init__(self, cfg, trial_seed, components=None):
        self.cfg = cfg
        self.trial_seed = int(trial_seed)
        self.n01, self.nstar, self.nb1, self.nb2 = cfg.index_sizes()
        for name, size in (("m0 half", self.n01), ("m*", self.nstar), ("b1", self.nb1), ("b2", self.nb2)):
            if size > INDEX_CAP:
                raise SimulationError(
                    f"Codebooks: {name} index set would need {size} entries, cap is {INDEX_CAP}"
                )
        p_u, p_x_given_u, p_y_given_u = components if components is not None else derive_components(
            cfg.channel, cfg.q, cfg.max_markov_defect
        )
        self.p_u = p_u
        self.p_x_given_u = p_x_given_u
        self.p_y_given_u = p_y_given_u
        full = compose(cfg.q, cfg.channel)
        self.target_uxy = full.probs[:, :, :, 0, 0].transpose(2, 0, 1)
        self._cum_u = np.cumsum(p_u.probs)
        self._cum_u[-1] = 1.0
        self._cum_x = np.cumsum(p_x_given_u, axis=1)
        self._cum_x[:, -1] = 1.0
        self._cum_y = np.cumsum(p_y_given_u, axis=1)
        self._cum_y[:, -1] = 1.0
        # bounded memo of bin slices; regeneration is identical, so eviction
        # never changes results
        self._u_cache = {}
        self._u_cache_cap = 64

    def _rng(self, stream, *idx):
        return np.random.default_rng([self.cfg.seed, self.trial_seed, stream, *map(int, idx)])

    def _check(self, name, value, size):
        if not 0 <= value < size:
            raise SimulationError(f"Codebooks: {name} index {value} outside [0, {size})")

    def u_block(self, m01, m02):
        """All m* candidates' u-codewords for bin m0 = (m01, m02): (nstar, n) ints."""
        self._check("m01", m01, self.n01)
        self._check("m02", m02, self.n01)
        key = (int(m01), int(m02))
        if key not in self._u_cache:
            if len(self._u_cache) >= self._u_cache_cap:
                self._u_cache.clear()
            uniforms = self._rng(_U_STREAM, m01, m02).random((self.nstar, self.cfg.n))
            self._u_cache[key] = _sample(self._cum_u, uniforms)
        return self._u_cache[key]

    def x_block(self, m01, m02, b1):
        """x-codewords for every m* at fixed (m0, b1), drawn per-symbol from p(x|u)."""
        self._check("b1", b1, self.nb1)
        u = self.u_block(m01, m02)
        uniforms = self._rng(_X_STREAM, m01, m02, b1).random(u.shape)
        return _sample(self._cum_x[u], uniforms)

    def y_block(self, m01, m02, b2):
        self._check("b2", b2, self.nb2)
        u = self.u_block(m01, m02)
        uniforms = self._rng(_Y_STREAM, m01, m02, b2).random(u.shape)
        return _sample(self._cum_y[u], uniforms)

    def u_codeword(self, m01, m02, m_star):
        self._check("m*", m_star, self.nstar)
        return self.u_block(m01, m02)[m_star]

    def x_codeword(self, m01, m02, m_star, b1):
        self._check("m*", m_star, self.nstar)
        return self.x_block(m01, m02, b1)[m_star]

    def y_codeword(self, m01, m02, m_star, b2):
        self._check("m*", m_star, self.nstar)
        return self.y_block(m01, m02, b2)[m_star]


def build_codebooks(cfg, trial_seed, components=None):
    """One codebook draw; identical (cfg, trial_seed) give identical codewords."""
    return Codebooks(cfg, trial_seed, components=components)


@dataclass(frozen=True)
class Message:
    """Common broadcast: XOR of the two m0 halves plus the selected index."""

    m0_xor: int
    m_star: int


def typicality_test(u, x, y, p, eps_typ):
    """Is the empirical type of (u,x,y) within eps of p in every cell?

    Also rejects any occurrence of a zero-probability cell.  ``p`` is the
    composed per-letter joint indexed [u, x, y].
    """
    u, x, y = (np.asarray(s, dtype=np.int64) for s in (u, x, y))
    if not (u.shape == x.shape == y.shape and u.ndim == 1):
        raise SimulationError("typicality_test: sequences must share one length")
    p = np.asarray(p, dtype=np.float64)
    cu, nx, ny = p.shape
    idx = (u * nx + x) * ny + y
    counts = np.bincount(idx, minlength=cu * nx * ny).reshape(cu, nx, ny)
    etype = counts / u.shape[0]
    if np.any(np.abs(etype - p) > eps_typ):
        return False
    if np.any((counts > 0) & (p <= 0.0)):
        return False
    return True


def _typical_mask(ub, xb, yb, p, eps_typ):
    """Vectorized typicality of each candidate row triple."""
    nstar, n = ub.shape
    cu, nx, ny = p.shape
    cells = cu * nx * ny
    flat = ((ub * nx + xb) * ny + yb) + (np.arange(nstar)[:, None] * cells)
    counts = np.bincount(flat.ravel(), minlength=nstar * cells).reshape(nstar, cu, nx, ny)
    etype = counts / n
    ok = np.all(np.abs(etype - p[None]) <= eps_typ, axis=(1, 2, 3))
    ok &= ~np.any((counts > 0) & (p[None] <= 0.0), axis=(1, 2, 3))
    return ok


def coordinator_select(w1, w2, books, eps_typ):
    """Pick the first m* in the bin whose codeword triple is typical.

    Returns (Message, failed).  When no candidate passes, m* falls back to
    the first index and the trial is flagged instead of raising.
    """
    m01, b1 = (int(v) for v in w1)
    m02, b2 = (int(v) for v in w2)
    ub = books.u_block(m01, m02)
    xb = books.x_block(m01, m02, b1)
    yb = books.y_block(m01, m02, b2)
    mask = _typical_mask(ub, xb, yb, books.target_uxy, eps_typ)
    if mask.any():
        return Message(m0_xor=m01 ^ m02, m_star=int(mask.argmax())), False
    return Message(m0_xor=m01 ^ m02, m_star=0), True


def processor_output(which, message, w_i, books):
    """Reconstruct m0 from the XOR and this processor's half, emit the codeword.

    Processor 1 sees w1 = (m01, b1) and never touches w2; symmetrically for
    processor 2.
    """
    half, b = (int(v) for v in w_i)
    other = message.m0_xor ^ half
    if not 0 <= other < books.n01:
        raise SimulationError(f"processor_output: recovered m0 half {other} outside [0, {books.n01})")
    if which == 1:
        return books.x_codeword(half, other, message.m_star, b)
    if which == 2:
        return books.y_codeword(other, half, message.m_star, b)
    raise SimulationError(f"processor_output: processor must be 1 or 2, got {which!r}")


def run_trials(cfg):
    """Run all trials against one fixed code, pooling per-letter (x, y) pairs.

    The codebooks are drawn once per run; each trial draws fresh shared
    randomness (w1, w2) from its own substream.  This estimates the induced
    per-letter distribution of a single code, the quantity the coordination
    criterion constrains.
    """
    if not isinstance(cfg, SimConfig):
        raise SimulationError("run_trials: expected a SimConfig")
    components = derive_components(cfg.channel, cfg.q, cfg.max_markov_defect)
    books = build_codebooks(cfg, 0, components=components)
    nx, ny = cfg.q.shape
    counts = np.zeros(nx * ny, dtype=np.int64)
    failures = 0
    n01, nstar, nb1, nb2 = cfg.index_sizes()
    for k in range(cfg.trials):
        rng_w = np.random.default_rng([cfg.seed, k, _W_STREAM])
        m01 = int(rng_w.integers(n01))
        m02 = int(rng_w.integers(n01))
        b1 = int(rng_w.integers(nb1))
        b2 = int(rng_w.integers(nb2))
        message, failed = coordinator_select((m01, b1), (m02, b2), books, cfg.eps_typ)
        x = processor_output(1, message, (m01, b1), books)
        y = processor_output(2, message, (m02, b2), books)
        counts += np.bincount(x * ny + y, minlength=nx * ny)
        failures += failed
    total = cfg.trials * cfg.n
    empirical = JointPmf(
        (counts / total).reshape(nx, ny), labels_x=cfg.q.labels_x, labels_y=cfg.q.labels_y
    )
    return SimReport(
        empirical_joint=empirical,
        tv_per_letter=tv_distance(empirical, cfg.q),
        mstar_failure_rate=failures / cfg.trials,
        trials_run=cfg.trials,
        config_echo={
            "n": cfg.n,
            "trials": cfg.trials,
            "seed": cfg.seed,
            "eps_typ": cfg.eps_typ,
            "rates": {
                "r0": cfg.rates.r0,
                "r_star": cfg.rates.r_star,
                "rt1": cfg.rates.rt1,
                "rt2": cfg.rates.rt2,
                "r": cfg.rates.r,
                "r1": cfg.rates.r1,
                "r2": cfg.rates.r2,
            },
            "index_sizes": {"m0_half": n01, "m_star": nstar, "b1": nb1, "b2": nb2},
        },
    )
