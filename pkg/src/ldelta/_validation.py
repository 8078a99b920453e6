"""Input coercion shared by the estimator and the CLI."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .distribution import JointDistribution
from .exceptions import ValidationError


def check_joint(X) -> JointDistribution:
    """Accept a :class:`JointDistribution` or a ``(|Q|, |S|)`` probability table."""
    if isinstance(X, JointDistribution):
        return X
    try:
        table = check_array(X, dtype=np.float64, ensure_min_samples=1, ensure_min_features=1)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    return JointDistribution(table)


def check_records(X, q_size: int, s_size: int) -> np.ndarray:
    """``(n, 2)`` integer array of ``(qid, sens)`` rows within the alphabets."""
    try:
        rows = check_array(X, dtype=None, ensure_min_samples=0, ensure_all_finite=True)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if rows.shape[1] != 2:
        raise ValidationError(f"records need 2 columns (qid, sens), got {rows.shape[1]}")
    if rows.size and not np.all(np.equal(np.mod(rows, 1), 0)):
        raise ValidationError("record indices must be integers")
    rows = rows.astype(np.int64)
    if rows.size:
        if rows[:, 0].min() < 0 or rows[:, 0].max() >= q_size:
            raise ValidationError(f"qid outside [0, {q_size})")
        if rows[:, 1].min() < 0 or rows[:, 1].max() >= s_size:
            raise ValidationError(f"sensitive value outside [0, {s_size})")
    return rows


def check_qids(X, q_size: int) -> np.ndarray:
    q = np.asarray(X)
    if q.ndim == 2:
        q = q[:, 0]
    q = q.astype(np.int64).reshape(-1)
    if q.size and (q.min() < 0 or q.max() >= q_size):
        raise ValidationError(f"qid outside [0, {q_size})")
    return q
