"""scikit-learn style front end.

``fit`` plays the central anonymizer: it takes the joint probability table
(rows are quasi-identifiers, columns sensitive values) and produces the
broadcast plan. ``transform`` generalizes raw ``(qid, sens)`` records to
``(class, sens)``; ``anonymize`` tallies them into class counts.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import core
from ._validation import check_joint, check_qids, check_records
from .distribution import sample_dataset
from .mechanism import plan as make_plan


class LDeltaDiversityAnonymizer(TransformerMixin, BaseEstimator):
    """Plan and apply (ell, delta)-diverse generalization.

    Parameters
    ----------
    ell : int
        Required number of distinct sensitive values per class.
    delta : float
        Allowed failure probability over the sampling of a release.
    p : float, optional
        Per-class mass threshold in ``(0, p_ell]``. Exactly one of ``p`` and
        ``beta`` must be set.
    beta : float, optional
        Sets ``p = beta * p_ell``.
    strategy : {"greedy", "ind", "trivial"}
        How equivalence classes are built.

    Attributes
    ----------
    plan_ : MechanismPlan
    partition_ : Partition
    class_of_ : ndarray of shape (n_qids,)
        Class index of every quasi-identifier.
    n_classes_, sample_size_, m_bound_, p_ : plan fields, for convenience.
    """

    def __init__(self, ell=2, delta=0.05, p=None, beta=None, strategy="greedy"):
        self.ell = ell
        self.delta = delta
        self.p = p
        self.beta = beta
        self.strategy = strategy

    def fit(self, X, y=None):
        dist = check_joint(X)
        p, beta = self.p, self.beta
        if p is None and beta is None:
            beta = 1.0
        self.distribution_ = dist
        self.plan_ = make_plan(dist, self.ell, self.delta, p=p, beta=beta, strategy=self.strategy)
        self.partition_ = self.plan_.partition
        self.class_of_ = self.partition_.class_index(dist.q_size)
        self.n_classes_ = self.plan_.n_classes
        self.sample_size_ = self.plan_.sample_size
        self.m_bound_ = self.plan_.m_bound
        self.p_ = self.plan_.p
        self.n_features_in_ = dist.s_size
        return self

    def transform(self, X):
        """Replace each record's qid by its class index."""
        check_is_fitted(self, "plan_")
        d = self.distribution_
        rows = check_records(X, d.q_size, d.s_size)
        return np.column_stack([self.class_of_[rows[:, 0]], rows[:, 1]])

    def predict(self, X):
        """Class index of each qid (first column if ``X`` is 2-d)."""
        check_is_fitted(self, "plan_")
        return self.class_of_[check_qids(X, self.distribution_.q_size)]

    def anonymize(self, X) -> core.AnonymizedDataset:
        check_is_fitted(self, "plan_")
        d = self.distribution_
        rows = check_records(X, d.q_size, d.s_size)
        ds = core.Dataset(rows[:, 0], rows[:, 1], d.q_size, d.s_size)
        return core.anonymize(ds, self.partition_)

    def diversity(self, X) -> int:
        return core.diversity(self.anonymize(X))

    def sample(self, seed, n=None) -> np.ndarray:
        """Draw the planned number of records (or ``n``) from the fitted distribution."""
        check_is_fitted(self, "plan_")
        n = self.sample_size_ if n is None else n
        return sample_dataset(self.distribution_, n, seed).records
