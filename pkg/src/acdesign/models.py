"""Dose-response models, Fisher information and target-dose machinery.

Two treatment arms are modelled: a new compound whose mean response follows
a Michaelis-Menten or Emax curve over a dose range, and an active control
administered at a fixed dose.  Four response families are supported (normal
with unknown variance, negative binomial with known shape, binomial,
Poisson).  Every operation here is a pure function of frozen dataclasses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import (
    DegenerateGradientError,
    DoseRangeError,
    ModelError,
    NoTargetDoseError,
    SingularInformationError,
    UnsupportedCaseError,
)

_VALIDATION_GRID = 1000


# ---------------------------------------------------------------------------
# mean curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MichaelisMenten:
    """Saturating curve emax*d/(ed50+d) through the origin."""

    emax: float
    ed50: float

    n_params = 2

    def __post_init__(self):
        if not self.ed50 > 0:
            raise ModelError("ed50 must be positive")
        if not self.emax > 0:
            raise ModelError("emax must be positive (increasing mean curve)")

    def value(self, d: float) -> float:
        return self.emax * d / (self.ed50 + d)

    def gradient(self, d: float) -> np.ndarray:
        s = self.ed50 + d
        return np.array([d / s, -self.emax * d / s**2])

    def derivative(self, d: float) -> float:
        return self.emax * self.ed50 / (self.ed50 + d) ** 2

    def inverse(self, y: float) -> float:
        if not 0 <= y < self.emax:
            raise NoTargetDoseError(f"value {y} outside curve range [0, {self.emax})")
        return self.ed50 * y / (self.emax - y)


@dataclass(frozen=True)
class Emax:
    """Shifted saturating curve e0 + emax*d/(ed50+d)."""

    e0: float
    emax: float
    ed50: float

    n_params = 3

    def __post_init__(self):
        if not self.ed50 > 0:
            raise ModelError("ed50 must be positive")
        if not self.emax > 0:
            raise ModelError("emax must be positive (increasing mean curve)")

    def value(self, d: float) -> float:
        return self.e0 + self.emax * d / (self.ed50 + d)

    def gradient(self, d: float) -> np.ndarray:
        s = self.ed50 + d
        return np.array([1.0, d / s, -self.emax * d / s**2])

    def derivative(self, d: float) -> float:
        return self.emax * self.ed50 / (self.ed50 + d) ** 2

    def inverse(self, y: float) -> float:
        if not self.e0 <= y < self.e0 + self.emax:
            raise NoTargetDoseError(
                f"value {y} outside curve range [{self.e0}, {self.e0 + self.emax})"
            )
        return self.ed50 * (y - self.e0) / (self.emax - (y - self.e0))


MeanFunction = Union[MichaelisMenten, Emax]


# ---------------------------------------------------------------------------
# response families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Normal:
    """Normal responses; the variance is a nuisance parameter to estimate."""

    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ModelError("sigma2 must be positive")


@dataclass(frozen=True)
class NegativeBinomial:
    """Failure counts before the r-th success; r known, success probability modelled."""

    r: int

    def __post_init__(self):
        if not (isinstance(self.r, int) and self.r >= 1):
            raise ModelError("r must be a positive integer")


@dataclass(frozen=True)
class Binomial:
    pass


@dataclass(frozen=True)
class Poisson:
    pass


Family = Union[Normal, NegativeBinomial, Binomial, Poisson]


def _family_name(family: Family) -> str:
    return {
        Normal: "normal",
        NegativeBinomial: "negative_binomial",
        Binomial: "binomial",
        Poisson: "poisson",
    }[type(family)]


# ---------------------------------------------------------------------------
# drug model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DrugModel:
    """New-compound arm: response family + mean curve + dose range [L, R]."""

    family: Family
    mean: MeanFunction
    dose_range: tuple[float, float]

    def __post_init__(self):
        L, R = self.dose_range
        if not (0 <= L < R):
            raise ModelError(f"dose range must satisfy 0 <= L < R, got [{L}, {R}]")
        self._validate_mean_values()

    def _validate_mean_values(self):
        # Monotone curves make endpoint checks sufficient; the grid guards
        # future non-monotone mean functions.
        L, R = self.dose_range
        doses = np.linspace(L, R, _VALIDATION_GRID)
        doses = np.append(doses, [L, R])
        vals = np.array([self.mean.value(d) for d in doses])
        fam = self.family
        if isinstance(fam, (NegativeBinomial, Binomial)):
            if vals.max() >= 1.0:
                raise ModelError(
                    "success probability must stay below 1 on the dose range "
                    f"(max {vals.max():.6g}); require emax*R/(ed50+R) < 1"
                )
            if vals.min() < 0.0:
                raise ModelError("success probability negative on the dose range")
            interior = vals[(doses > L) & (doses < R)]
            if interior.size and interior.min() <= 0.0:
                raise ModelError("success probability vanishes at an interior dose")
        elif isinstance(fam, Poisson):
            if vals.min() < 0.0:
                raise ModelError("Poisson rate negative on the dose range")
            # rate zero is only integrable for the Michaelis-Menten origin
            if self.mean.value(L) == 0.0 and not isinstance(self.mean, MichaelisMenten):
                raise ModelError(
                    "Poisson with an Emax curve needs a positive rate at L (e0 > 0)"
                )

    # -- dimensions ---------------------------------------------------------

    @property
    def n_mean_params(self) -> int:
        return self.mean.n_params

    @property
    def n_params(self) -> int:
        """Length of theta_1 (mean parameters plus sigma2 for normal)."""
        return self.n_mean_params + (1 if isinstance(self.family, Normal) else 0)

    # -- mean and gradient ---------------------------------------------------

    def _check_dose(self, d: float):
        L, R = self.dose_range
        if not (L - 1e-12 <= d <= R + 1e-12):
            raise DoseRangeError(f"dose {d} outside range [{L}, {R}]")

    def mean_value(self, d: float) -> float:
        """eta(d, theta_1): probability for binomial/negative binomial, rate for Poisson."""
        self._check_dose(d)
        return self.mean.value(d)

    def mean_grad(self, d: float) -> np.ndarray:
        """Gradient of the mean curve in the mean parameters (length 2 or 3)."""
        self._check_dose(d)
        return self.mean.gradient(d)

    # -- Fisher information ---------------------------------------------------

    def fisher(self, d: float) -> np.ndarray:
        """Per-observation information for theta_1 at dose d, shape (s1, s1)."""
        self._check_dose(d)
        fam = self.family
        g = self.mean.gradient(d)
        if isinstance(fam, Normal):
            s = self.n_params
            out = np.zeros((s, s))
            out[:-1, :-1] = np.outer(g, g) / fam.sigma2
            out[-1, -1] = 1.0 / (2.0 * fam.sigma2**2)
            return out
        if isinstance(fam, NegativeBinomial):
            p = self.mean.value(d)
            if p == 0.0:
                return self._negbin_origin_limit(fam.r)
            if p >= 1.0:
                raise SingularInformationError(f"success probability {p} at dose {d}")
            return fam.r * np.outer(g, g) / (p**2 * (1.0 - p))
        if isinstance(fam, Binomial):
            p = self.mean.value(d)
            if p == 0.0:
                # Michaelis-Menten at d=0: grad^2/p ~ d -> 0
                return np.zeros((self.n_params, self.n_params))
            if p >= 1.0:
                raise SingularInformationError(f"success probability {p} at dose {d}")
            return np.outer(g, g) / (p * (1.0 - p))
        if isinstance(fam, Poisson):
            lam = self.mean.value(d)
            if lam == 0.0:
                # continuous extension of grad^2/lambda at the origin
                return np.zeros((self.n_params, self.n_params))
            return np.outer(g, g) / lam
        raise UnsupportedCaseError(f"unknown family {fam!r}")

    def _negbin_origin_limit(self, r: int) -> np.ndarray:
        # limit of grad grad^T / (p^2 (1-p)) as d -> 0 for the MM curve:
        # grad ~ (d/ed50) * (1, -emax/ed50), p ~ emax*d/ed50.
        if not isinstance(self.mean, MichaelisMenten):
            raise SingularInformationError(
                "negative binomial needs a positive success probability"
            )
        v = np.array([1.0 / self.mean.emax, -1.0 / self.mean.ed50])
        return r * np.outer(v, v)

    def regression_vector(self, d: float) -> np.ndarray:
        """Vector f with f f^T equal to the mean-parameter block of fisher(d)."""
        self._check_dose(d)
        fam = self.family
        g = self.mean.gradient(d)
        if isinstance(fam, Normal):
            return g / np.sqrt(fam.sigma2)
        if isinstance(fam, NegativeBinomial):
            p = self.mean.value(d)
            if p == 0.0:
                v = np.array([1.0 / self.mean.emax, -1.0 / self.mean.ed50])
                return np.sqrt(fam.r) * v
            return np.sqrt(fam.r / (p**2 * (1.0 - p))) * g
        if isinstance(fam, Binomial):
            p = self.mean.value(d)
            if p == 0.0:
                return np.zeros(self.n_mean_params)
            return g / np.sqrt(p * (1.0 - p))
        lam = self.mean.value(d)
        if lam == 0.0:
            return np.zeros(self.n_mean_params)
        return g / np.sqrt(lam)


# ---------------------------------------------------------------------------
# control model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ControlModel:
    """Active-control arm: same family kinds, constant parameter mu."""

    family: Family
    mu: float

    def __post_init__(self):
        fam = self.family
        if isinstance(fam, (NegativeBinomial, Binomial)):
            if not 0.0 < self.mu < 1.0:
                raise ModelError("mu must lie in (0, 1)")
        elif isinstance(fam, Poisson):
            if not self.mu > 0:
                raise ModelError("Poisson control mean must be positive")
        # Normal: any real mu; sigma2 validated by the family dataclass

    @property
    def n_params(self) -> int:
        return 2 if isinstance(self.family, Normal) else 1

    def fisher(self) -> np.ndarray:
        """Per-observation information for theta_2, shape (s2, s2)."""
        fam = self.family
        if isinstance(fam, Normal):
            return np.diag([1.0 / fam.sigma2, 1.0 / (2.0 * fam.sigma2**2)])
        if isinstance(fam, NegativeBinomial):
            return np.array([[fam.r / (self.mu**2 * (1.0 - self.mu))]])
        if isinstance(fam, Binomial):
            return np.array([[1.0 / (self.mu * (1.0 - self.mu))]])
        return np.array([[1.0 / self.mu]])

    def expected_response(self, scale: str = "natural") -> float:
        """Expected control response on the comparison scale.

        For the negative binomial the natural scale is the count mean
        r(1-mu)/mu; pass scale="probability" to compare on the success
        probability itself.
        """
        if isinstance(self.family, NegativeBinomial):
            if scale == "probability":
                return self.mu
            return self.family.r * (1.0 - self.mu) / self.mu
        return self.mu

    def response_derivative(self, scale: str = "natural") -> float:
        """d expected_response / d mu, used by the implicit target-dose gradient."""
        if isinstance(self.family, NegativeBinomial) and scale != "probability":
            return -self.family.r / self.mu**2
        return 1.0


def matched_families(drug: DrugModel, control: ControlModel) -> bool:
    return type(drug.family) is type(control.family)


# ---------------------------------------------------------------------------
# target dose
# ---------------------------------------------------------------------------

def drug_response(drug: DrugModel, d: float, scale: str = "natural") -> float:
    """Drug-arm expected response at dose d on the comparison scale."""
    val = drug.mean_value(d)
    if isinstance(drug.family, NegativeBinomial) and scale != "probability":
        if val <= 0.0:
            raise SingularInformationError("count mean undefined at success probability 0")
        return drug.family.r * (1.0 - val) / val
    return val


def _matched_mean_level(drug: DrugModel, control: ControlModel, scale: str) -> float:
    """Level of the drug mean curve matching the control response."""
    if isinstance(drug.family, NegativeBinomial) and scale != "probability":
        if not isinstance(control.family, NegativeBinomial):
            raise UnsupportedCaseError(
                "count-mean comparison needs a negative binomial control"
            )
        # r1 (1-p)/p = r2 (1-mu)/mu  solved for p
        r1, r2, mu = drug.family.r, control.family.r, control.mu
        ratio = r2 * (1.0 - mu) / mu
        return r1 / (r1 + ratio)
    return control.expected_response(scale)


def target_dose(drug: DrugModel, control: ControlModel, scale: str = "natural") -> float:
    """Smallest dose whose expected response matches the active control.

    Closed-form rational inversion of the mean curve; a bisection fallback
    guards against floating-point corner cases near the range endpoints.
    """
    L, R = drug.dose_range
    level = _matched_mean_level(drug, control, scale)
    lo, hi = drug.mean_value(L), drug.mean_value(R)
    if not (min(lo, hi) - 1e-12 <= level <= max(lo, hi) + 1e-12):
        raise NoTargetDoseError(
            f"control response {level:.6g} outside attained range [{lo:.6g}, {hi:.6g}]"
        )
    try:
        d = drug.mean.inverse(level)
    except NoTargetDoseError:
        d = _bisect_mean(drug, level)
    if d < L - 1e-9 * (R - L) or d > R + 1e-9 * (R - L):
        raise NoTargetDoseError(f"target dose {d:.6g} outside [{L}, {R}]")
    return min(max(d, L), R)


def _bisect_mean(drug: DrugModel, level: float) -> float:
    L, R = drug.dose_range
    tol = 1e-10 * (R - L)
    lo, hi = L, R
    flo = drug.mean_value(lo) - level
    fhi = drug.mean_value(hi) - level
    if flo * fhi > 0:
        raise NoTargetDoseError("level not bracketed by the dose range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (drug.mean_value(mid) - level) * flo <= 0:
            hi = mid
        else:
            lo = mid
            flo = drug.mean_value(lo) - level
    return 0.5 * (lo + hi)


def response_gradient(drug: DrugModel, d: float, scale: str = "natural") -> np.ndarray:
    """Gradient of the comparison-scale response in the mean parameters."""
    g = drug.mean_grad(d)
    if isinstance(drug.family, NegativeBinomial) and scale != "probability":
        p = drug.mean_value(d)
        return -(drug.family.r / p**2) * g
    return g


def response_dose_derivative(drug: DrugModel, d: float, scale: str = "natural") -> float:
    """d/dd of the comparison-scale response."""
    der = drug.mean.derivative(d)
    if isinstance(drug.family, NegativeBinomial) and scale != "probability":
        p = drug.mean_value(d)
        return -(drug.family.r / p**2) * der
    return der


def target_dose_grad(
    drug: DrugModel, control: ControlModel, scale: str = "natural"
) -> tuple[np.ndarray, np.ndarray]:
    """Implicit-function gradients (d d*/d theta_1, d d*/d theta_2).

    Nuisance variance components carry an exact zero so the vectors keep the
    full parameter dimensions s1 and s2.
    """
    dstar = target_dose(drug, control, scale)
    etap = response_dose_derivative(drug, dstar, scale)
    if abs(etap) < 1e-14:
        raise DegenerateGradientError("mean curve is flat at the target dose")
    g_mean = -(1.0 / etap) * response_gradient(drug, dstar, scale)
    g1 = np.zeros(drug.n_params)
    g1[: drug.n_mean_params] = g_mean
    g2 = np.zeros(control.n_params)
    g2[0] = control.response_derivative(scale) / etap
    return g1, g2
