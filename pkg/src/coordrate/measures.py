"""Shannon information quantities over finite joints, in bits.

All logarithms are base 2 and 0 * log 0 = 0 throughout.  The group-wise
mutual informations operate on the five named axes of a FullJoint, which
is how every rate expression downstream is evaluated.
"""

from __future__ import annotations

import numpy as np

from .pmf import AXES, FullJoint, Pmf, PmfError, _check_simplex

#: max iterations for the binary-entropy inversion bisection; the interval
#: tolerance sits at float resolution so steep regions still invert exactly
_INV_H_ITERS = 200
_INV_H_TOL = 1e-15


def table_entropy(arr):
    """Shannon entropy in bits of any nonnegative array summing to ~1."""
    arr = np.asarray(arr, dtype=np.float64)
    pos = arr[arr > 0]
    return float(-(pos * np.log2(pos)).sum())


def entropy(p):
    """Entropy H(p) of a Pmf in bits."""
    if not isinstance(p, Pmf):
        p = Pmf(np.asarray(p, dtype=np.float64))
    return table_entropy(p.probs)


def binary_entropy(a):
    """h(a) = -a log2 a - (1-a) log2(1-a) for a in [0, 1]."""
    if not 0.0 <= a <= 1.0:
        raise PmfError(f"binary_entropy: argument must lie in [0, 1], got {a!r}")
    if a == 0.0 or a == 1.0:
        return 0.0
    return float(-a * np.log2(a) - (1.0 - a) * np.log2(1.0 - a))


def inverse_binary_entropy(y):
    """The unique x in [0, 0.5] with h(x) = y, by bisection."""
    if not 0.0 <= y <= 1.0:
        raise PmfError(f"inverse_binary_entropy: argument must lie in [0, 1], got {y!r}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(_INV_H_ITERS):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
        if hi - lo < _INV_H_TOL:
            break
    x = 0.5 * (lo + hi)
    return x


def entropy_vec4(p1, p2, p3, p4):
    """Entropy of a 4-point distribution, in bits."""
    vec = _check_simplex([p1, p2, p3, p4], "entropy_vec4")
    return table_entropy(vec)


def _group_axes(full, group):
    if isinstance(group, str):
        group = (group,)
    group = tuple(group)
    idx = []
    for name in group:
        if name not in AXES:
            raise PmfError(f"unknown axis {name!r}; valid axes are {AXES}")
        idx.append(AXES.index(name))
    return idx


def _joint_entropy(full, axis_idx):
    """H of the marginal of a FullJoint on the given axis indices (bits)."""
    if not axis_idx:
        return 0.0
    drop = tuple(i for i in range(5) if i not in axis_idx)
    table = full.probs.sum(axis=drop) if drop else full.probs
    return table_entropy(table)


def mutual_information(full, group_a, group_b):
    """I(A; B) for two disjoint groups of named axes of a FullJoint."""
    if not isinstance(full, FullJoint):
        raise PmfError("mutual_information: expected a FullJoint")
    a = _group_axes(full, group_a)
    b = _group_axes(full, group_b)
    if not a or not b:
        raise PmfError("mutual_information: groups must be nonempty")
    if set(a) & set(b):
        raise PmfError(f"mutual_information: overlapping groups {group_a} and {group_b}")
    return _joint_entropy(full, a) + _joint_entropy(full, b) - _joint_entropy(full, a + b)


def conditional_mutual_information(full, group_a, group_b, group_c):
    """I(A; B | C) for pairwise disjoint groups of named axes (C may be empty)."""
    if not isinstance(full, FullJoint):
        raise PmfError("conditional_mutual_information: expected a FullJoint")
    a = _group_axes(full, group_a)
    b = _group_axes(full, group_b)
    c = _group_axes(full, group_c)
    if not a or not b:
        raise PmfError("conditional_mutual_information: A and B must be nonempty")
    for left, right in ((a, b), (a, c), (b, c)):
        if set(left) & set(right):
            raise PmfError("conditional_mutual_information: groups overlap")
    return (
        _joint_entropy(full, a + c)
        + _joint_entropy(full, b + c)
        - _joint_entropy(full, a + b + c)
        - _joint_entropy(full, c)
    )
