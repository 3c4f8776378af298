"""Weighted least squares on the square-root-weighted design.

The weighted design has rows sqrt(w_(i)) * X_(i); solving least squares on it
is the Kaplan-Meier-weighted regression (the Stute estimator when the target
is the weighted outcome itself).  The p x p Gram matrix is factorized directly
since p is small and fixed while n dominates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .data import SortedSample, _frozen
from .km import KMWeightSet

# Relative eigenvalue cutoff below which the Gram matrix is treated as singular.
GRAM_RTOL = 1e-12


class SingularGramError(Exception):
    """Gram matrix of the weighted design is numerically singular.

    Signals collinear covariates after weighting, or (for the screened refit)
    too many rows removed.
    """


@dataclass(frozen=True)
class WeightedDesign:
    """Design scaled by square-root Kaplan-Meier weights.

    ``xw`` has rows sqrt(w_(i)) X_(i), ``yw`` entries sqrt(w_(i)) Y_(i), and
    ``gram`` is xw.T @ xw.  Rows with zero weight are exactly zero.
    """

    xw: np.ndarray
    yw: np.ndarray
    gram: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xw", _frozen(self.xw))
        object.__setattr__(self, "yw", _frozen(self.yw))
        object.__setattr__(self, "gram", _frozen(self.gram))


@dataclass(frozen=True)
class WlsFit:
    """Solution of a weighted least-squares problem.

    ``residuals_w`` is target_w - xw @ beta, and ``gram_condition`` the
    eigenvalue ratio of the Gram matrix.
    """

    beta: np.ndarray
    residuals_w: np.ndarray
    gram_condition: float


def build_weighted_design(sorted_sample: SortedSample, kw: KMWeightSet) -> WeightedDesign:
    """Scale rows of the sorted design and outcome by sqrt(w) and accumulate the Gram matrix."""
    base = sorted_sample.base
    if kw.w.shape[0] != base.n:
        raise ValueError("weight vector length does not match the sample")
    xw = base.x * kw.sqrt_w[:, None]
    yw = base.y * kw.sqrt_w
    return WeightedDesign(xw=xw, yw=yw, gram=xw.T @ xw)


def _solve_gram(gram: np.ndarray, rhs: np.ndarray, context: str = "") -> tuple[np.ndarray, float]:
    """Solve gram @ beta = rhs by Cholesky, guarding against singularity."""
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= GRAM_RTOL * max(eigs[-1], 0.0):
        detail = f" ({context})" if context else ""
        raise SingularGramError(
            f"weighted Gram matrix is singular{detail}: smallest eigenvalue "
            f"{eigs[0]:.3e} <= {GRAM_RTOL:g} * largest {eigs[-1]:.3e}; "
            "covariates are collinear after weighting"
        )
    c, low = scipy.linalg.cho_factor(gram)
    return scipy.linalg.cho_solve((c, low), rhs), float(eigs[-1] / eigs[0])


def wls_solve(design: WeightedDesign, target_w: np.ndarray) -> WlsFit:
    """Minimize ||target_w - xw @ b||_2^2 over b.

    Raises SingularGramError when the Gram matrix has a relative eigenvalue
    below GRAM_RTOL.
    """
    beta, cond = _solve_gram(design.gram, design.xw.T @ target_w)
    return WlsFit(beta=beta, residuals_w=target_w - design.xw @ beta, gram_condition=cond)


def stute_fit(sorted_sample: SortedSample, kw: KMWeightSet) -> WlsFit:
    """Kaplan-Meier-weighted least squares of Y on X (the non-robust baseline)."""
    design = build_weighted_design(sorted_sample, kw)
    return wls_solve(design, design.yw)
