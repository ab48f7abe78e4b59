"""Optimality criteria: the phi_p family, the target-dose variance psi, and
design efficiencies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .designs import Design, InducedDesign, drug_info_matrix, info_matrix, pseudo_inverse, estimable
from .exceptions import DesignError, EstimabilityError, UnsupportedCaseError
from .models import ControlModel, DrugModel, target_dose_grad

NEG_INF_SURROGATE = -50.0  # finite stand-in where a p -> -inf limit has no closed form


@dataclass(frozen=True)
class KMatrix:
    """Contrast matrix K of full column rank, optionally block-diagonal.

    A block K separates drug and control parameters; Theorem-style
    composition of optimal designs is only available for block K (any p)
    or for stacked K at p = -1.
    """

    matrix: np.ndarray
    k11: Optional[np.ndarray] = None
    k22: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.atleast_2d(np.asarray(self.matrix, float)))
        m = self.matrix
        if np.linalg.matrix_rank(m) < m.shape[1]:
            raise DesignError("contrast matrix must have full column rank")

    @classmethod
    def identity(cls, s: int) -> "KMatrix":
        return cls(np.eye(s))

    @classmethod
    def block(cls, k11: np.ndarray, k22: np.ndarray) -> "KMatrix":
        k11 = np.atleast_2d(np.asarray(k11, float))
        k22 = np.atleast_2d(np.asarray(k22, float))
        s1, t1 = k11.shape
        s2, t2 = k22.shape
        full = np.zeros((s1 + s2, t1 + t2))
        full[:s1, :t1] = k11
        full[s1:, t1:] = k22
        return cls(full, k11, k22)

    @classmethod
    def block_identity(cls, s1: int, s2: int) -> "KMatrix":
        """Full-parameter contrast, kept in block form so composition applies."""
        return cls.block(np.eye(s1), np.eye(s2))

    @classmethod
    def stacked(cls, k11: np.ndarray, k22: np.ndarray) -> "KMatrix":
        """K^T = (K11^T, K22^T): shared columns across both parameter groups."""
        k11 = np.atleast_2d(np.asarray(k11, float))
        k22 = np.atleast_2d(np.asarray(k22, float))
        if k11.shape[1] != k22.shape[1]:
            raise DesignError("stacked blocks must share the column count")
        return cls(np.vstack([k11, k22]), k11, k22)

    @classmethod
    def vector(cls, c: np.ndarray) -> "KMatrix":
        return cls(np.asarray(c, float).reshape(-1, 1))

    @property
    def is_block(self) -> bool:
        if self.k11 is None or self.k22 is None:
            return False
        return self.t == self.k11.shape[1] + self.k22.shape[1]

    @property
    def t(self) -> int:
        return self.matrix.shape[1]

    @property
    def t1(self) -> int:
        if self.k11 is None:
            raise UnsupportedCaseError("contrast has no drug block")
        return self.k11.shape[1]

    @property
    def t2(self) -> int:
        if self.k22 is None:
            raise UnsupportedCaseError("contrast has no control block")
        return self.k22.shape[1]


@dataclass(frozen=True)
class CriterionSpec:
    """What to optimize: a phi_p criterion for K^T theta, or the AC criterion."""

    kind: str  # "phi_p" or "ac"
    p: float = 0.0
    K: Optional[KMatrix] = None

    def __post_init__(self):
        if self.kind not in ("phi_p", "ac"):
            raise DesignError(f"unknown criterion kind {self.kind!r}")
        if self.kind == "phi_p" and not self.p < 1:
            raise DesignError("phi_p needs p < 1")


# ---------------------------------------------------------------------------
# phi_p evaluation
# ---------------------------------------------------------------------------

def _contrast_information_eigs(M: np.ndarray, K: np.ndarray) -> np.ndarray:
    """Eigenvalues of B = K^T M^- K after an estimability check."""
    if not estimable(K, M):
        raise EstimabilityError("K^T theta is not estimable under this design")
    B = K.T @ pseudo_inverse(M) @ K
    B = 0.5 * (B + B.T)
    lam = np.linalg.eigvalsh(B)
    if lam[0] <= 0:
        raise EstimabilityError("contrast information is singular")
    return lam


def phi_p_from_info(M: np.ndarray, K: np.ndarray, p: float) -> float:
    """Kiefer information functional of K^T M^- K; larger is better.

    p = 0 is the determinant (D) criterion, p = -1 the average-variance
    criterion, p = -inf the smallest eigenvalue of (K^T M^- K)^{-1}.
    Powers are taken in log space so strongly negative p cannot overflow.
    """
    lam = _contrast_information_eigs(M, K)
    t = K.shape[1] if K.ndim == 2 else 1
    if p == 0.0:
        return float(np.exp(-np.mean(np.log(lam))))
    if math.isinf(p) and p < 0:
        return float(1.0 / lam[-1])
    from scipy.special import logsumexp

    log_mean = logsumexp(-p * np.log(lam)) - math.log(t)
    return float(np.exp(log_mean / p))


def phi_p(design: Design, drug: DrugModel, control: ControlModel, K: KMatrix, p: float) -> float:
    """phi_p value of a joint design."""
    M = info_matrix(design, drug, control).matrix
    return phi_p_from_info(M, K.matrix, p)


def phi_p_reduced(induced: InducedDesign, drug: DrugModel, k11: np.ndarray, p: float) -> float:
    """Drug-only criterion on the induced design (the placebo-style problem)."""
    M1 = drug_info_matrix(induced, drug).matrix
    return phi_p_from_info(M1, np.atleast_2d(np.asarray(k11, float)), p)


def rho_p(
    induced_opt: InducedDesign,
    drug: DrugModel,
    control: ControlModel,
    K: KMatrix,
    p: float,
) -> float:
    """Drug-to-control allocation odds for composing the joint optimal design.

    The p = 0 value is the dimension ratio t1/t2; p = -inf is evaluated at
    the finite surrogate p = -50 because the limit has no closed form.
    """
    if K.k11 is None or K.k22 is None:
        raise UnsupportedCaseError("rho_p needs a contrast split into drug/control parts")
    if p == 0.0:
        return K.t1 / K.t2
    if math.isinf(p) and p < 0:
        p = NEG_INF_SURROGATE
    M1 = drug_info_matrix(induced_opt, drug).matrix
    if not estimable(K.k11, M1):
        raise EstimabilityError("drug block of the contrast is not estimable")
    B1 = K.k11.T @ pseudo_inverse(M1) @ K.k11
    B2 = K.k22.T @ pseudo_inverse(control.fisher()) @ K.k22
    lam1 = np.linalg.eigvalsh(0.5 * (B1 + B1.T))
    lam2 = np.linalg.eigvalsh(0.5 * (B2 + B2.T))
    if lam1[0] <= 0 or lam2[0] <= 0:
        raise EstimabilityError("contrast information is singular")
    from scipy.special import logsumexp

    log_num = logsumexp(-p * np.log(lam2)) / (p - 1.0)
    log_den = logsumexp(-p * np.log(lam1)) / (p - 1.0)
    return float(np.exp(log_num - log_den))


# ---------------------------------------------------------------------------
# the AC criterion
# ---------------------------------------------------------------------------

def ac_contrast(drug: DrugModel, control: ControlModel) -> KMatrix:
    """Stacked target-dose gradient; the AC criterion is phi_{-1} for it."""
    g1, g2 = target_dose_grad(drug, control)
    return KMatrix.stacked(g1.reshape(-1, 1), g2.reshape(-1, 1))


def psi_ac(design: Design, drug: DrugModel, control: ControlModel) -> float:
    """Scaled asymptotic variance of the plug-in target-dose estimate.

    Infinite variance (an inestimable gradient) raises EstimabilityError
    naming the failing arm; solvers treat that as an infeasible design.
    """
    g1, g2 = target_dose_grad(drug, control)
    wc = design.control_weight
    if wc <= 0 or wc >= 1:
        raise DesignError("AC criterion needs weight on both arms")
    M1 = drug_info_matrix(design.induced(), drug)
    if not estimable(g1.reshape(-1, 1), M1):
        raise EstimabilityError("target-dose gradient not estimable on the drug arm")
    I2 = control.fisher()
    if not estimable(g2.reshape(-1, 1), I2):
        raise EstimabilityError("target-dose gradient not estimable on the control arm")
    drug_term = float(g1 @ pseudo_inverse(M1) @ g1) / (1.0 - wc)
    ctrl_term = float(g2 @ pseudo_inverse(I2) @ g2) / wc
    return drug_term + ctrl_term


def psi_ac_scalar_form(design: Design, drug: DrugModel, control: ControlModel) -> float:
    """Alternative representation of psi for a scalar control parameter.

    Written in terms of the mean-curve gradient at the target dose rather
    than the implicit target-dose gradients; agreement with psi_ac checks
    the implicit-function differentiation.
    """
    from .models import (
        response_dose_derivative,
        response_gradient,
        target_dose,
    )

    if control.n_params != 1:
        raise UnsupportedCaseError("scalar-form psi needs a one-parameter control")
    dstar = target_dose(drug, control)
    etap = response_dose_derivative(drug, dstar)
    kprime = control.response_derivative()
    ddstar_dtheta2 = kprime / etap
    ctil = response_gradient(drug, dstar)
    c_full = np.zeros(drug.n_params)
    c_full[: drug.n_mean_params] = ctil
    wc = design.control_weight
    M1 = drug_info_matrix(design.induced(), drug)
    if not estimable(c_full.reshape(-1, 1), M1):
        raise EstimabilityError("target-dose gradient not estimable on the drug arm")
    quad = float(c_full @ pseudo_inverse(M1) @ c_full)
    i2_inv = float(pseudo_inverse(control.fisher())[0, 0])
    return (ddstar_dtheta2**2 / kprime**2) * (
        quad / (1.0 - wc) + kprime**2 * i2_inv / wc
    )


# ---------------------------------------------------------------------------
# efficiencies
# ---------------------------------------------------------------------------

def _clamp_efficiency(value: float) -> float:
    if value > 1.0 + 1e-8:
        raise DesignError(
            f"efficiency {value:.9g} exceeds 1; the reference design is not optimal"
        )
    return min(max(value, 0.0), 1.0)


def d_efficiency(
    design: Design,
    optimum: Design,
    drug: DrugModel,
    control: ControlModel,
    K: Optional[KMatrix] = None,
) -> float:
    """phi_0 ratio of a candidate design to the D-optimal design."""
    if K is None:
        K = KMatrix.block_identity(drug.n_params, control.n_params)
    val = phi_p(design, drug, control, K, 0.0)
    ref = phi_p(optimum, drug, control, K, 0.0)
    return _clamp_efficiency(val / ref)


def ac_efficiency(
    design: Design, optimum: Design, drug: DrugModel, control: ControlModel
) -> float:
    """psi ratio of the AC-optimal design to a candidate design."""
    val = psi_ac(design, drug, control)
    ref = psi_ac(optimum, drug, control)
    return _clamp_efficiency(ref / val)
