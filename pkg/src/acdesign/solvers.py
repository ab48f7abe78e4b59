"""Construction of locally optimal designs.

Closed forms cover the D-optimal designs for both mean curves under all four
families and the Elfving-geometry c-optimal designs for the Michaelis-Menten
curve.  A grid linear program solves general c-optimal problems, and a
sensitivity-driven exchange algorithm handles arbitrary contrasts and p.
Joint designs are assembled from drug-only solutions by the allocation rule
w_control = 1/(1+rho_p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .criteria import (
    CriterionSpec,
    KMatrix,
    ac_contrast,
    phi_p_from_info,
    rho_p,
)
from .designs import (
    ARM_CONTROL,
    ARM_DRUG,
    Design,
    InducedDesign,
    drug_info_matrix,
    estimable,
    info_matrix,
    pseudo_inverse,
)
from .equivalence import SensitivityReport, verify
from .exceptions import (
    EstimabilityError,
    InfeasibleGeometryError,
    UnsupportedCaseError,
)
from .models import (
    Binomial,
    ControlModel,
    DrugModel,
    Emax,
    MichaelisMenten,
    NegativeBinomial,
    Normal,
    Poisson,
    matched_families,
    response_gradient,
    target_dose,
    target_dose_grad,
)
from .scalar_opt import bracketed_root, golden_max

MERGE_FRACTION = 1e-6  # support doses closer than this fraction of R-L merge


@dataclass(frozen=True)
class SolveOptions:
    grid_size: int = 257
    max_iterations: int = 400
    weight_tolerance: float = 1e-4
    multistart_count: int = 4
    seed: int = 0

    def __post_init__(self):
        if min(self.grid_size, self.max_iterations, self.multistart_count) <= 0:
            raise UnsupportedCaseError("solver options must be positive")
        if not self.weight_tolerance > 0:
            raise UnsupportedCaseError("weight tolerance must be positive")


@dataclass(frozen=True)
class ElfvingSolution:
    """Boundary representation gamma*c = sum eps_i w_i f(d_i) of a c-optimal design."""

    doses: tuple[float, ...]
    weights: tuple[float, ...]
    gamma: float
    signs: tuple[int, ...]
    case_tag: str
    delta: float  # c^T M1^- c at the optimal induced design

    def induced(self) -> InducedDesign:
        return InducedDesign(self.doses, self.weights)


@dataclass
class SolveResult:
    design: Design
    criterion_value: float
    max_violation: float
    converged: bool
    iterations: int
    method: str
    report: Optional[SensitivityReport] = None


# ---------------------------------------------------------------------------
# closed-form D-optimal designs
# ---------------------------------------------------------------------------

def _require_matched(drug: DrugModel, control: ControlModel):
    if not matched_families(drug, control):
        raise UnsupportedCaseError(
            "closed-form designs need the same response family on both arms"
        )


def _compose_fixed(doses, induced_weights, t1: int, t2: int) -> Design:
    """Corollary-style joint design with control weight t2/(t1+t2)."""
    wc = t2 / (t1 + t2)
    pts = [(float(d), ARM_DRUG) for d in doses]
    wts = [(1.0 - wc) * w for w in induced_weights]
    pts.append((0.0, ARM_CONTROL))
    wts.append(wc)
    return Design(tuple(pts), tuple(wts))


def d_opt_mm(drug: DrugModel, control: ControlModel) -> Design:
    """Locally D-optimal design for a Michaelis-Menten mean curve.

    Two drug doses: a family-specific interior dose (clipped at L) and the
    right endpoint.  The control share follows the parameter dimensions.
    """
    _require_matched(drug, control)
    if not isinstance(drug.mean, MichaelisMenten):
        raise UnsupportedCaseError("d_opt_mm needs a Michaelis-Menten mean")
    L, R = drug.dose_range
    ed50 = drug.mean.ed50
    emax = drug.mean.emax
    fam = drug.family
    if isinstance(fam, Normal):
        inner = ed50 * R / (2.0 * ed50 + R)
    elif isinstance(fam, NegativeBinomial):
        inner = L
    elif isinstance(fam, Binomial):
        disc = (
            9.0 * R**2
            - 8.0 * R**2 * emax
            + 18.0 * R * ed50
            - 8.0 * R * emax * ed50
            + 9.0 * ed50**2
        )
        num = ed50 * R + 3.0 * ed50**2 - ed50 * math.sqrt(disc)
        den = 4.0 * emax * ed50 - 4.0 * R + 4.0 * R * emax - 6.0 * ed50
        inner = num / den
    elif isinstance(fam, Poisson):
        inner = ed50 * R / (3.0 * ed50 + 2.0 * R)
    else:
        raise UnsupportedCaseError(f"unknown family {fam!r}")
    lo = max(L, inner)
    if lo >= R:
        raise InfeasibleGeometryError("interior dose collapses onto the right endpoint")
    return _compose_fixed([lo, R], [0.5, 0.5], drug.n_params, control.n_params)


def d_opt_emax(drug: DrugModel, control: ControlModel) -> Design:
    """Locally D-optimal design for an Emax mean curve.

    Three drug doses {L, d, R}; the interior dose is a closed form for the
    normal and Poisson families and the root of a rational stationarity
    equation for the binomial and negative binomial ones.
    """
    _require_matched(drug, control)
    if not isinstance(drug.mean, Emax):
        raise UnsupportedCaseError("d_opt_emax needs an Emax mean")
    L, R = drug.dose_range
    e0, em, ed50 = drug.mean.e0, drug.mean.emax, drug.mean.ed50
    fam = drug.family
    if isinstance(fam, Normal):
        inner = (R * (L + ed50) + L * (R + ed50)) / ((L + ed50) + (R + ed50))
    elif isinstance(fam, (NegativeBinomial, Binomial)):
        a = e0 + em - 1.0

        def stationarity(d: float) -> float:
            common = (
                2.0 / (d - L)
                + 2.0 / (d - R)
                - a / (d * a + (e0 - 1.0) * ed50)
            )
            if isinstance(fam, NegativeBinomial):
                return common - 2.0 * (e0 + em) / (e0 * (ed50 + d) + em * d) - 1.0 / (ed50 + d)
            return common - (e0 + em) / (e0 * (ed50 + d) + em * d) - 2.0 / (ed50 + d)

        eps = 1e-9 * (R - L)
        inner = bracketed_root(stationarity, L + eps, R - eps, scan=64, tol=1e-13 * (R - L))
    elif isinstance(fam, Poisson):
        m = lambda d: e0 * ed50 + em * d + e0 * d
        kappa = ((ed50 + L) * m(R) + (ed50 + R) * m(L)) ** 2 + 12.0 * (ed50 + L) * (
            ed50 + R
        ) * m(R) * m(L)
        root = math.sqrt(kappa)
        num = ed50 * (4.0 * m(L) * m(R) - em * (L * m(R) + R * m(L)) - e0 * root)
        den = -4.0 * m(L) * m(R) - em * ed50 * (m(R) + m(L)) + (em + e0) * root
        inner = num / den
    else:
        raise UnsupportedCaseError(f"unknown family {fam!r}")
    if not (L < inner < R):
        raise InfeasibleGeometryError(
            f"interior dose {inner:.6g} falls outside ({L}, {R})"
        )
    third = 1.0 / 3.0
    return _compose_fixed([L, inner, R], [third, third, third], drug.n_params, control.n_params)


def solve_d_optimal(drug: DrugModel, control: ControlModel) -> Design:
    """Closed-form D-optimal design, dispatching on the mean curve."""
    if isinstance(drug.mean, MichaelisMenten):
        return d_opt_mm(drug, control)
    return d_opt_emax(drug, control)


# ---------------------------------------------------------------------------
# composition: drug-only optimum -> joint optimum
# ---------------------------------------------------------------------------

def compose_active_control(
    induced_opt: InducedDesign,
    drug: DrugModel,
    control: ControlModel,
    K: KMatrix,
    p: float,
) -> Design:
    """Attach the active control to an optimal induced design.

    Valid for block contrasts at any p and for shared-column (stacked)
    contrasts at p = -1; other combinations must be solved jointly, which
    numeric_solve does.
    """
    if K.k11 is None or K.k22 is None:
        raise UnsupportedCaseError("composition needs drug/control contrast blocks")
    if not K.is_block and p != -1.0:
        raise UnsupportedCaseError(
            "composition requires a block contrast unless p = -1"
        )
    rho = rho_p(induced_opt, drug, control, K, p)
    wc = 1.0 / (1.0 + rho)
    pts = [(float(d), ARM_DRUG) for d in induced_opt.doses]
    wts = [(1.0 - wc) * w for w in induced_opt.weights]
    pts.append((0.0, ARM_CONTROL))
    wts.append(wc)
    L, R = drug.dose_range
    return Design.from_points(pts, wts, merge_tol=MERGE_FRACTION * (R - L))


# ---------------------------------------------------------------------------
# c-optimal designs: Michaelis-Menten geometry
# ---------------------------------------------------------------------------

def _mm_weight_factor(drug: DrugModel, d: float) -> float:
    """v(d) with f(d) = v(d) * grad(d); infinite at d = 0 for some families."""
    fam = drug.family
    p = drug.mean_value(d)
    if isinstance(fam, Normal):
        return 1.0 / math.sqrt(fam.sigma2)
    if isinstance(fam, NegativeBinomial):
        return math.sqrt(fam.r / (p**2 * (1.0 - p)))
    if isinstance(fam, Binomial):
        return 1.0 / math.sqrt(p * (1.0 - p))
    return 1.0 / math.sqrt(p)


def _mm_weight_factor_times_dose(drug: DrugModel, d: float) -> float:
    """v(d)*d with the finite negative-binomial limit at d = 0."""
    if d == 0.0 and isinstance(drug.family, NegativeBinomial):
        mm = drug.mean
        return math.sqrt(drug.family.r) * mm.ed50 / mm.emax
    if d == 0.0:
        return 0.0
    return _mm_weight_factor(drug, d) * d


def _two_point_weight(drug: DrugModel, x: float, dstar: float, upper_gap: float) -> float:
    """Shared form of the two-point weight at the inner dose x (pair {x, R}).

    upper_gap is |x - dstar| with the sign convention of the active case;
    both published variants reduce to this expression.
    """
    _, R = drug.dose_range
    ed50 = drug.mean.ed50
    n1 = _mm_weight_factor(drug, R) * R * (R - dstar) * (ed50 + x) ** 2
    n2 = _mm_weight_factor_times_dose(drug, x) * upper_gap * (ed50 + R) ** 2
    return n1 / (n1 + n2)


def _mm_dose_from_ray(drug: DrugModel, c: np.ndarray) -> float:
    """Recover the dose whose gradient ray carries c (MM curve only)."""
    mm = drug.mean
    if abs(c[1]) < 1e-300:
        raise UnsupportedCaseError("contrast has no ed50 component; not a gradient ray")
    d = -mm.emax * c[0] / c[1] - mm.ed50
    if d <= 0:
        raise InfeasibleGeometryError(f"implied target dose {d:.6g} is not positive")
    g = mm.gradient(d)
    scale = c[0] / g[0]
    if np.max(np.abs(c - scale * g)) > 1e-8 * (1.0 + np.max(np.abs(c))):
        raise UnsupportedCaseError("contrast is not a scalar multiple of a gradient")
    return d


def c_opt_elfving_2d(drug: DrugModel, c_vector: np.ndarray) -> ElfvingSolution:
    """c-optimal induced design for a Michaelis-Menten curve.

    The contrast must lie on the gradient ray of some dose d*, which covers
    every target-dose problem.  The support pattern follows the family's
    Elfving-set geometry: a one-point design at d* when the ray meets the
    set's curved boundary, otherwise two support points involving a
    tangency threshold or the range endpoints.
    """
    if not isinstance(drug.mean, MichaelisMenten):
        raise UnsupportedCaseError("Elfving closed forms cover the MM curve only")
    c = np.asarray(c_vector, float).reshape(-1)
    if c.size != 2:
        raise UnsupportedCaseError("MM c-optimal problems are two-dimensional")
    L, R = drug.dose_range
    ed50, emax = drug.mean.ed50, drug.mean.emax
    dstar = _mm_dose_from_ray(drug, c)
    if not (L - 1e-9 * (R - L) <= dstar <= R + 1e-9 * (R - L)):
        raise InfeasibleGeometryError(f"implied target dose {dstar:.6g} outside [{L}, {R}]")
    dstar = min(max(dstar, L), R)
    fam = drug.family

    if isinstance(fam, Normal):
        raw = (math.sqrt(2.0) * R**2 * ed50 + (math.sqrt(2.0) - 1.0) * R * ed50**2) / (
            2.0 * R**2 + 4.0 * R * ed50 + ed50**2
        )
        xstar = max(L, raw)
        if xstar <= dstar:
            doses, weights, tag = [dstar], [1.0], "one-point"
        else:
            w1 = _two_point_weight(drug, xstar, dstar, xstar - dstar)
            doses, weights, tag = [xstar, R], [w1, 1.0 - w1], "left-threshold"
    elif isinstance(fam, NegativeBinomial):
        w1 = _two_point_weight(drug, L, dstar, dstar - L)
        doses, weights, tag = [L, R], [w1, 1.0 - w1], "two-endpoint"
    elif isinstance(fam, Binomial):
        s = math.sqrt(1.0 - drug.mean_value(R))
        x1 = max(L, ed50 * (1.0 - s) / (2.0 * emax - 1.0 + s))
        den2 = 2.0 * emax - 1.0 - s
        x2 = R if den2 <= 0 else min(R, ed50 * (1.0 + s) / den2)
        if x1 >= R:
            raise InfeasibleGeometryError("lower tangency threshold beyond the dose range")
        if dstar < x1:
            w1 = _two_point_weight(drug, x1, dstar, x1 - dstar)
            doses, weights, tag = [x1, R], [w1, 1.0 - w1], "left-threshold"
        elif dstar > x2:
            w1 = _two_point_weight(drug, x2, dstar, dstar - x2)
            doses, weights, tag = [x2, R], [w1, 1.0 - w1], "right-threshold"
        else:
            doses, weights, tag = [dstar], [1.0], "one-point"
    elif isinstance(fam, Poisson):
        xstar = max(L, R * ed50 / (3.0 * R + 4.0 * ed50))
        if xstar <= dstar:
            doses, weights, tag = [dstar], [1.0], "one-point"
        else:
            w1 = _two_point_weight(drug, xstar, dstar, xstar - dstar)
            doses, weights, tag = [xstar, R], [w1, 1.0 - w1], "left-threshold"
    else:
        raise UnsupportedCaseError(f"unknown family {fam!r}")

    # drop degenerate zero weights (d* at a support point)
    keep = [i for i, w in enumerate(weights) if w > 1e-14]
    doses = [doses[i] for i in keep]
    weights = [weights[i] for i in keep]
    total = sum(weights)
    weights = [w / total for w in weights]
    return _finish_elfving(drug, c, doses, weights, tag)


def _finish_elfving(
    drug: DrugModel,
    c: np.ndarray,
    doses: list[float],
    weights: list[float],
    tag: str,
) -> ElfvingSolution:
    """Attach gamma, signs and delta, enforcing the boundary representation."""
    F = np.array([_regression_full(drug, d) for d in doses]).T  # (m, k)
    target = np.zeros(F.shape[0])
    target[: c.size] = c
    gamma, signs = _representation(F, target, weights)
    M1 = sum(w * np.outer(f, f) for f, w in zip(F.T, weights))
    delta = float(target @ pseudo_inverse(M1) @ target)
    if abs(delta * gamma**2 - 1.0) > 1e-6:
        raise InfeasibleGeometryError(
            "Elfving representation inconsistent with the variance bound"
        )
    return ElfvingSolution(
        tuple(float(d) for d in doses),
        tuple(float(w) for w in weights),
        gamma,
        signs,
        tag,
        delta,
    )


def _regression_full(drug: DrugModel, d: float) -> np.ndarray:
    """Mean-parameter regression vector (the dose-dependent information factor)."""
    return drug.regression_vector(d)


def _representation(F: np.ndarray, c: np.ndarray, weights: list[float]) -> tuple[float, tuple[int, ...]]:
    """Solve gamma * c = sum eps_i w_i f_i for gamma > 0 and signs."""
    k = F.shape[1]
    best = None
    for mask in range(1 << k):
        signs = [1 if (mask >> i) & 1 == 0 else -1 for i in range(k)]
        combo = sum(s * w * F[:, i] for i, (s, w) in enumerate(zip(signs, weights)))
        denom = float(c @ c)
        gamma = float(combo @ c) / denom
        if gamma <= 0:
            continue
        resid = float(np.max(np.abs(gamma * c - combo)))
        if resid <= 1e-8 * (1.0 + float(np.max(np.abs(combo)))):
            cand = (gamma, tuple(signs))
            if best is None or resid < best[2]:
                best = (gamma, tuple(signs), resid)
    if best is None:
        raise InfeasibleGeometryError("no sign pattern satisfies the Elfving identity")
    return best[0], best[1]


# ---------------------------------------------------------------------------
# c-optimal designs: grid linear program (any mean curve)
# ---------------------------------------------------------------------------

def _copt_lp(F: np.ndarray, c: np.ndarray) -> tuple[float, np.ndarray]:
    """Maximize gamma with gamma*c in the convex hull of +-f rows of F."""
    n, s = F.shape
    A_eq = np.zeros((s + 1, 2 * n + 1))
    A_eq[:s, :n] = F.T
    A_eq[:s, n : 2 * n] = -F.T
    A_eq[:s, 2 * n] = -c
    A_eq[s, : 2 * n] = 1.0
    b_eq = np.zeros(s + 1)
    b_eq[s] = 1.0
    cost = np.zeros(2 * n + 1)
    cost[2 * n] = -1.0
    res = linprog(cost, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (2 * n + 1), method="highs")
    if res.status != 0:
        raise EstimabilityError(f"c-optimal linear program failed: {res.message}")
    return float(res.x[2 * n]), res.x[:n] - res.x[n : 2 * n]


def c_opt_numeric(
    drug: DrugModel, c_vector: np.ndarray, grid_size: int = 4001, rounds: int = 6
) -> ElfvingSolution:
    """c-optimal induced design by an Elfving grid LP with local refinement.

    A one-point design at the dose whose gradient ray carries the contrast
    is preferred whenever it attains the LP bound; the LP can otherwise
    return an equivalent spread representation of a flat boundary face.
    """
    c = np.asarray(c_vector, float).reshape(-1)
    if c.size != drug.n_mean_params:
        raise UnsupportedCaseError("contrast length must match the mean parameters")
    L, R = drug.dose_range
    backbone = np.linspace(L, R, 201)
    doses = np.linspace(L, R, grid_size)
    gamma, z, sd, sz = 0.0, None, None, None
    for it in range(rounds):
        F = np.array([drug.regression_vector(d) for d in doses])
        gamma, z = _copt_lp(F, c)
        supp = np.abs(z) > 1e-10 * np.max(np.abs(z))
        sd, sz = doses[supp], z[supp]
        if it < rounds - 1:
            span = max((doses[1] - doses[0]) * 12.0, 1e-9 * (R - L))
            local = [
                np.linspace(max(L, d - span), min(R, d + span), 401) for d in sd
            ]
            doses = np.unique(np.concatenate(local + [backbone, np.array([L, R])]))
    order = np.argsort(sd)
    sd, sz = sd[order], sz[order]
    merged: list[list[float]] = []
    for d, zv in zip(sd, sz):
        if merged and d - merged[-1][0] <= MERGE_FRACTION * (R - L) * 10:
            d0, z0 = merged[-1]
            w0, w1 = abs(z0), abs(zv)
            merged[-1] = [(d0 * w0 + d * w1) / (w0 + w1), z0 + zv]
        else:
            merged.append([d, zv])
    sd = [m[0] for m in merged]
    sd, weights, delta_lp = _polish_support(drug, c, sd)

    # the LP value carries solver noise, so the shortcut comparison is slack
    one_point = _one_point_candidate(drug, c)
    if one_point is not None:
        d1, delta1 = one_point
        if delta1 <= delta_lp * (1.0 + 1e-6):
            return _finish_elfving(drug, c, [d1], [1.0], "one-point")
    return _finish_elfving(drug, c, list(sd), list(weights), "numeric")


def _support_delta(drug: DrugModel, c: np.ndarray, doses) -> tuple[float, np.ndarray]:
    """Optimal delta over designs on a fixed support (tiny Elfving LP).

    Infeasible supports (c leaves the span of the regression vectors, which
    happens when fewer support points than parameters are perturbed) count
    as infinitely bad.
    """
    F = np.array([drug.regression_vector(d) for d in doses])
    try:
        gamma, z = _copt_lp(F, c)
    except EstimabilityError:
        return np.inf, np.zeros(len(doses))
    if gamma <= 0:
        return np.inf, np.zeros(len(doses))
    return 1.0 / gamma**2, np.abs(z) / np.abs(z).sum()


def _polish_support(drug: DrugModel, c: np.ndarray, doses):
    """Refine interior support doses by golden-section on the variance bound."""
    L, R = drug.dose_range
    doses = sorted(float(d) for d in doses)
    delta, weights = _support_delta(drug, c, doses)
    # only full supports keep the representation feasible while a dose moves
    if len(doses) >= c.size and np.isfinite(delta):
        span = 0.02 * (R - L)
        for _ in range(3):
            for i, d in enumerate(doses):
                if d <= L + 1e-12 * (R - L) or d >= R - 1e-12 * (R - L):
                    continue

                def merit(x: float) -> float:
                    trial = doses.copy()
                    trial[i] = x
                    dval, _ = _support_delta(drug, c, trial)
                    return -dval if np.isfinite(dval) else -1e300

                x_new, m_new = golden_max(
                    merit, max(L, d - span), min(R, d + span), 1e-10 * (R - L)
                )
                if np.isfinite(m_new) and -m_new < delta:
                    doses[i] = x_new
                    delta = -m_new
            span *= 0.1
        delta, weights = _support_delta(drug, c, doses)
    snap = 1e-9 * (R - L)
    doses = [L if d - L <= snap else (R if R - d <= snap else d) for d in doses]
    keep = weights > 1e-12
    doses = [d for d, k in zip(doses, keep) if k]
    weights = weights[keep] / weights[keep].sum()
    return doses, weights, delta


def _one_point_candidate(drug: DrugModel, c: np.ndarray) -> Optional[tuple[float, float]]:
    """Dose whose regression vector is collinear with c, if one exists.

    The mean-curve gradient rays are inverted analytically (the gradient
    direction pins the dose through the saturation ratio); maximizing the
    alignment angle instead would locate the dose only to sqrt(eps).
    """
    L, R = drug.dose_range
    mean = drug.mean
    if isinstance(mean, MichaelisMenten):
        u, w = c[0], c[1]
        if u == 0.0:
            return None
        d = -mean.emax * u / w - mean.ed50 if w != 0.0 else None
    else:
        if c[0] == 0.0:
            return None
        ratio = c[1] / c[0]  # equals d/(ed50+d) on a gradient ray
        if not 0.0 < ratio < 1.0:
            return None
        d = mean.ed50 * ratio / (1.0 - ratio)
    if d is None or not (L <= d <= R):
        return None
    g = mean.gradient(d)
    scale = float(c @ g) / float(g @ g)
    if float(np.max(np.abs(c - scale * g))) > 1e-9 * (1.0 + float(np.max(np.abs(c)))):
        return None
    f = drug.regression_vector(d)
    # c parallel to f, so c^T (f f^T)^+ c reduces to |c|^2 / |f|^2
    delta = float(c @ c) / float(f @ f)
    return d, delta


# ---------------------------------------------------------------------------
# AC-optimal designs
# ---------------------------------------------------------------------------

def _family_drug_share(
    drug: DrugModel, control: ControlModel, delta: float
) -> float:
    """Published allocation fractions, written per family in terms of delta."""
    fam = control.family
    if isinstance(fam, Normal):
        return math.sqrt(delta) / (math.sqrt(delta) + math.sqrt(fam.sigma2))
    if isinstance(fam, NegativeBinomial):
        mu, r2 = control.mu, fam.r
        a = mu * math.sqrt(delta)
        return a / (a + math.sqrt((1.0 - mu) * r2))
    if isinstance(fam, Binomial):
        mu = control.mu
        return math.sqrt(delta) / (math.sqrt(delta) + math.sqrt(mu * (1.0 - mu)))
    mu = control.mu
    return math.sqrt(delta) / (math.sqrt(delta) + math.sqrt(mu))


def ac_optimal(drug: DrugModel, control: ControlModel) -> Design:
    """Locally AC-optimal design: best design for estimating the target dose.

    Solves the induced c-optimal problem for the mean-curve gradient at the
    target dose (closed Elfving geometry for MM, grid LP otherwise), then
    splits mass between arms.  The control share is computed both from the
    general rho_{-1} ratio and from the published family-specific formula;
    the two must agree.
    """
    _require_matched(drug, control)
    dstar = target_dose(drug, control)
    ctil = response_gradient(drug, dstar)
    if isinstance(drug.mean, MichaelisMenten):
        sol = c_opt_elfving_2d(drug, ctil)
    else:
        sol = c_opt_numeric(drug, ctil)
    induced = sol.induced()

    g1, g2 = target_dose_grad(drug, control)
    M1 = drug_info_matrix(induced, drug)
    if not estimable(g1.reshape(-1, 1), M1):
        raise EstimabilityError("c-optimal solution lost estimability; please report")
    num = float(g1 @ pseudo_inverse(M1) @ g1)
    den = float(g2 @ pseudo_inverse(control.fisher()) @ g2)
    rho = math.sqrt(num / den)
    share_general = rho / (1.0 + rho)
    share_family = _family_drug_share(drug, control, sol.delta)
    if abs(share_general - share_family) > 1e-8:
        raise InfeasibleGeometryError(
            f"allocation mismatch: rho route {share_general:.12g} vs "
            f"family formula {share_family:.12g}"
        )
    wc = 1.0 - share_general
    pts = [(float(d), ARM_DRUG) for d in induced.doses]
    wts = [share_general * w for w in induced.weights]
    pts.append((0.0, ARM_CONTROL))
    wts.append(wc)
    L, R = drug.dose_range
    return Design.from_points(pts, wts, merge_tol=MERGE_FRACTION * (R - L))


# ---------------------------------------------------------------------------
# general numeric solver
# ---------------------------------------------------------------------------

class _JointProblem:
    """Criterion and sensitivity plumbing over the joint design space.

    A state is a list of drug doses, their weights and the control weight.
    Everything flows through one symmetric eigendecomposition of the
    information matrix per evaluation.
    """

    def __init__(self, drug: DrugModel, control: ControlModel, K: KMatrix, p: float):
        self.drug = drug
        self.control = control
        self.K = K.matrix
        self.t = self.K.shape[1]
        self.p = p
        self.s1 = drug.n_params
        self.s2 = control.n_params
        self.m = drug.n_mean_params
        self.dim = self.s1 + self.s2
        self._ctrl_info = control.fisher()
        self._is_normal = isinstance(drug.family, Normal)
        self._var_entry = (
            1.0 / (2.0 * drug.family.sigma2**2) if self._is_normal else 0.0
        )
        self._k_absmax = float(np.max(np.abs(self.K)))

    def p_eff(self) -> float:
        # the minimum-eigenvalue criterion is optimized through a smooth
        # surrogate; verification happens at the true p
        if math.isinf(self.p) and self.p < 0:
            return -50.0
        return self.p

    def reg_rows(self, doses) -> np.ndarray:
        return np.array([self.drug.regression_vector(d) for d in doses])

    def info(self, doses, wd, wc, F=None) -> np.ndarray:
        M = np.zeros((self.dim, self.dim))
        if F is None:
            F = self.reg_rows(doses)
        if len(doses):
            M[: self.m, : self.m] = (F * np.asarray(wd)[:, None]).T @ F
        if self._is_normal:
            M[self.m, self.m] = self._var_entry * float(np.sum(wd))
        if wc > 0:
            M[self.s1 :, self.s1 :] = wc * self._ctrl_info
        return M

    def analyze(self, M: np.ndarray):
        """(criterion value, W, threshold) or None when K is inestimable."""
        lam, V = np.linalg.eigh(0.5 * (M + M.T))
        tol = self.dim * np.finfo(float).eps * max(float(lam[-1]), 1e-300)
        pos = lam > tol
        if not pos.all():
            null = V[:, ~pos]
            if float(np.max(np.abs(null.T @ self.K))) > 1e-8 * (1.0 + self._k_absmax):
                return None
        Vp = V[:, pos]
        GK = (Vp / lam[pos]) @ (Vp.T @ self.K)
        B = self.K.T @ GK
        lamB, VB = np.linalg.eigh(0.5 * (B + B.T))
        if lamB[0] <= 0:
            return None
        p = self.p_eff()
        if p == 0.0:
            value = float(np.exp(-np.mean(np.log(lamB))))
        else:
            log_mean = float(np.log(np.mean(np.exp(-p * np.log(lamB) + p * np.log(lamB[-1])))))
            value = float(np.exp((log_mean - p * np.log(lamB[-1])) / p))
        # powers of the scaled spectrum keep W and the threshold finite for
        # strongly negative p; their common factor cancels in every ratio
        ratio = lamB / lamB[-1]
        inner = (VB * ratio ** (-p - 1.0)) @ VB.T
        W = GK @ inner @ GK.T
        threshold = float(lamB[-1] * np.sum(ratio ** (-p)))
        return value, W, threshold

    def value(self, doses, wd, wc, F=None) -> float:
        res = self.analyze(self.info(doses, wd, wc, F))
        return res[0] if res is not None else -np.inf

    def drug_sensitivity(self, W: np.ndarray, F: np.ndarray) -> np.ndarray:
        vals = np.einsum("ij,jk,ik->i", F, W[: self.m, : self.m], F)
        if self._is_normal:
            vals = vals + self._var_entry * W[self.m, self.m]
        return vals

    def dose_sensitivity(self, W: np.ndarray, d: float) -> float:
        f = self.drug.regression_vector(d)
        val = float(f @ W[: self.m, : self.m] @ f)
        if self._is_normal:
            val += self._var_entry * W[self.m, self.m]
        return val

    def control_sensitivity(self, W: np.ndarray) -> float:
        return float(np.trace(self._ctrl_info @ W[self.s1 :, self.s1 :]))


def _initial_supports(drug: DrugModel, opts: SolveOptions) -> list[list[float]]:
    L, R = drug.dose_range
    starts = [list(np.linspace(L, R, 5))]
    rng = np.random.default_rng(opts.seed)
    for _ in range(opts.multistart_count - 1):
        pts = np.sort(rng.uniform(L, R, size=5))
        starts.append(list(pts))
    return starts


def _solve_rank_one(
    drug: DrugModel, control: ControlModel, K: KMatrix, spec: CriterionSpec
) -> Optional[SolveResult]:
    """Route a one-column contrast through the c-optimal machinery."""
    c = K.matrix[:, 0]
    s1 = drug.n_params
    m = drug.n_mean_params
    c1, c2 = c[:s1], c[s1:]
    scale = 1.0 + float(np.max(np.abs(c)))
    if np.any(np.abs(c1[m:]) > 1e-12 * scale):
        return None  # contrast touches the drug variance; no reduction applies
    try:
        sol = c_opt_numeric(drug, c1[:m])
    except (EstimabilityError, InfeasibleGeometryError, UnsupportedCaseError):
        return None
    induced = sol.induced()
    den = float(c2 @ pseudo_inverse(control.fisher()) @ c2) if c2.size else 0.0
    if den <= 0.0:
        wc = 0.0
    else:
        M1 = drug_info_matrix(induced, drug)
        num = float(c1 @ pseudo_inverse(M1) @ c1)
        wc = 1.0 / (1.0 + math.sqrt(num / den))
    L, R = drug.dose_range
    pts = [(float(d), ARM_DRUG) for d in induced.doses]
    wts = [(1.0 - wc) * w for w in induced.weights]
    if wc > 0:
        pts.append((0.0, ARM_CONTROL))
        wts.append(wc)
    design = Design.from_points(pts, wts, merge_tol=MERGE_FRACTION * (R - L))
    report = verify(design, drug, control, spec, grid_size=512, tol=1e-5)
    M = info_matrix(design, drug, control).matrix
    value = phi_p_from_info(M, K.matrix, spec.p if spec.kind == "phi_p" else -1.0)
    return SolveResult(
        design=design,
        criterion_value=value,
        max_violation=report.max_violation,
        converged=report.max_violation <= 1e-5,
        iterations=0,
        method="numeric/c-optimal-lp",
        report=report,
    )



def numeric_solve(
    drug: DrugModel,
    control: ControlModel,
    spec: CriterionSpec,
    opts: SolveOptions = SolveOptions(),
    include_control: bool = True,
) -> SolveResult:
    """Sensitivity-driven exchange solver for arbitrary contrasts and p.

    Each start alternates monotone multiplicative weight updates, support
    purging, golden-section refinement of the support doses, and addition
    of the dose with the largest sensitivity violation.  Starts differ in
    their initial five-point support; the best criterion value wins and the
    winning design is certified with the equivalence theorem.
    """
    if spec.kind == "ac":
        K, p = ac_contrast(drug, control), -1.0
    else:
        K = spec.K if spec.K is not None else KMatrix.block_identity(
            drug.n_params, control.n_params
        )
        p = spec.p
    if K.t == 1:
        # for a one-column contrast every phi_p is the same c-criterion, and
        # the Elfving linear program handles its singular optima far better
        # than vertex exchange does
        delegated = _solve_rank_one(drug, control, K, spec)
        if delegated is not None:
            return delegated
    problem = _JointProblem(drug, control, K, p)
    best = None
    for idx, support in enumerate(_initial_supports(drug, opts)):
        outcome = _solve_single_start(problem, support, opts, include_control)
        if outcome is None:
            continue
        value, doses, wd, wc, iters = outcome
        if best is None or value > best[0] + 1e-15:
            best = (value, idx, doses, wd, wc, iters)
    if best is None:
        raise EstimabilityError("no start produced an estimable design")
    value, _, doses, wd, wc, iters = best
    L, R = drug.dose_range
    pts = [(float(d), ARM_DRUG) for d in doses]
    wts = [float(w) for w in wd]
    if wc > 0:
        pts.append((0.0, ARM_CONTROL))
        wts.append(float(wc))
    design = Design.from_points(pts, wts, merge_tol=MERGE_FRACTION * (R - L))
    report = verify(design, drug, control, spec, grid_size=512, tol=1e-5)
    converged = report.max_violation <= 1e-5
    return SolveResult(
        design=design,
        criterion_value=value,
        max_violation=report.max_violation,
        converged=converged,
        iterations=iters,
        method="numeric/vertex-exchange",
        report=report,
    )


def _weight_sweeps(problem: _JointProblem, doses, wd, wc, F, max_sweeps=200):
    """Multiplicative reweighting to the fixed point on a fixed support.

    Each weight is multiplied by its sensitivity ratio raised to 1/(1-p),
    the classical damping that keeps the update stable for strongly
    negative p.  The best state seen is kept, which makes the sweep safe
    even where the update is not provably monotone.
    """
    exponent = 1.0 / (1.0 - problem.p_eff())
    if exponent > 0.4:
        sweeps = max_sweeps
    else:
        sweeps = int(max_sweeps / exponent / 2)
    best = None
    for _ in range(sweeps):
        res = problem.analyze(problem.info(doses, wd, wc, F))
        if res is None:
            return None
        value, W, threshold = res
        if best is None or value > best[0]:
            best = (value, wd.copy(), wc)
        rd = problem.drug_sensitivity(W, F) / threshold
        rc = problem.control_sensitivity(W) / threshold if wc > 0 else 0.0
        dev = float(np.max(np.abs(rd - 1.0))) if rd.size else 0.0
        if wc > 0:
            dev = max(dev, abs(rc - 1.0))
        if dev <= 1e-10:
            break
        wd = wd * np.maximum(rd, 0.0) ** exponent
        wc = wc * max(rc, 0.0) ** exponent
        total = wd.sum() + wc
        if total <= 0:
            break
        wd, wc = wd / total, wc / total
    res = problem.analyze(problem.info(doses, wd, wc, F))
    if res is not None and res[0] >= best[0]:
        return wd, wc, res[0]
    return best[1], best[2], best[0]


def _solve_single_start(
    problem: _JointProblem, support, opts: SolveOptions, include_control: bool
):
    drug = problem.drug
    L, R = drug.dose_range
    doses = sorted(dict.fromkeys(float(d) for d in support))
    n0 = len(doses) + (1 if include_control else 0)
    wd = np.full(len(doses), 1.0 / n0)
    wc = 1.0 / n0 if include_control else 0.0
    grid = np.linspace(L, R, opts.grid_size)
    Fgrid = problem.reg_rows(grid)
    spacing = grid[1] - grid[0]
    # tighter than the nominal 1e-6 so criterion values settle to ~1e-9
    stop_tol = 1e-9
    merge_tol = MERGE_FRACTION * (R - L)

    F = problem.reg_rows(doses)
    if problem.analyze(problem.info(doses, wd, wc, F)) is None:
        return None
    value = -np.inf
    iters_done = 0
    refine_tol = 1e-7 * (R - L)
    for it in range(opts.max_iterations):
        iters_done = it + 1
        # ---- weights to their fixed point on the current support ----
        sweep = _weight_sweeps(problem, doses, wd, wc, F)
        if sweep is None:
            return None
        wd, wc, value = sweep
        # ---- purge and merge support ----
        keep = wd >= opts.weight_tolerance
        if not keep.all() and keep.any():
            trial = [d for d, k in zip(doses, keep) if k]
            tw = wd[keep]
            scale = tw.sum() + wc
            if np.isfinite(problem.value(trial, tw / scale, wc / scale)):
                doses, wd, wc = trial, tw / scale, wc / scale
                F = problem.reg_rows(doses)
        doses, wd, F = _merge_support(problem, doses, wd, merge_tol)
        # ---- refine support doses ----
        doses, wd, F, value = _refine_doses(problem, doses, wd, wc, spacing, refine_tol)
        # ---- violation of the equivalence inequality ----
        res = problem.analyze(problem.info(doses, wd, wc, F))
        if res is None:
            return None
        value, W, threshold = res
        grid_vals = problem.drug_sensitivity(W, Fgrid)
        i = int(np.argmax(grid_vals))
        d_best, v_best = golden_max(
            lambda d: problem.dose_sensitivity(W, d),
            max(L, grid[i] - spacing),
            min(R, grid[i] + spacing),
            1e-9 * (R - L),
        )
        if grid_vals[i] > v_best:
            d_best, v_best = float(grid[i]), float(grid_vals[i])
        candidates = [(v_best, d_best)]
        if include_control:
            candidates.append((problem.control_sensitivity(W), None))
        v_top, d_top = max(candidates, key=lambda tup: tup[0])
        violation = (v_top - threshold) / abs(threshold)
        if violation <= stop_tol:
            break
        if violation <= 1e-3:
            refine_tol = 1e-11 * (R - L)
        # ---- add the violator; the next weight pass sizes it properly ----
        if d_top is None:
            def mixed(alpha: float) -> float:
                return problem.value(doses, (1 - alpha) * wd, (1 - alpha) * wc + alpha, F)

            alpha, mval = golden_max(mixed, 0.0, 0.5, 1e-5)
            if mval > value:
                wc = (1 - alpha) * wc + alpha
                wd = (1 - alpha) * wd
                value = mval
        elif all(abs(d_top - d) > merge_tol for d in doses):
            def mixed(alpha: float) -> float:
                trial = doses + [d_top]
                tw = np.append((1 - alpha) * wd, alpha)
                return problem.value(trial, tw, (1 - alpha) * wc)

            alpha, mval = golden_max(mixed, 0.0, 0.5, 1e-5)
            alpha = max(alpha, 10.0 * opts.weight_tolerance)
            doses = doses + [d_top]
            wd = np.append((1 - alpha) * wd, alpha)
            wc = (1 - alpha) * wc
            F = problem.reg_rows(doses)
        total = wd.sum() + wc
        wd, wc = wd / total, wc / total
    doses, wd, wc, value = _consolidate_support(problem, doses, wd, wc, value)
    order = np.argsort(doses)
    doses = [doses[i] for i in order]
    wd = np.asarray(wd)[order]
    return value, doses, wd, wc, iters_done


def _consolidate_support(problem, doses, wd, wc, value):
    """Drop support points whose removal costs nothing.

    Flat optima let low-weight near-duplicates of a support point survive
    the weight iteration; removing them and reoptimizing the weights keeps
    the criterion within rounding of the incumbent.
    """
    res = problem.analyze(problem.info(doses, np.asarray(wd), wc))
    if res is not None:
        value = res[0]  # re-anchor so removals compare like with like
    improved = True
    while improved and len(doses) > 1:
        improved = False
        order = np.argsort(wd)
        for i in order:
            if wd[i] > 0.3:
                continue
            trial = [d for j, d in enumerate(doses) if j != i]
            tw = np.delete(np.asarray(wd), i)
            scale = tw.sum() + wc
            sweep = _weight_sweeps(
                problem, trial, tw / scale, wc / scale, problem.reg_rows(trial)
            )
            if sweep is None:
                continue
            twd, twc, tval = sweep
            if tval >= value * (1.0 - 1e-9):
                doses, wd, wc, value = trial, twd, twc, tval
                improved = True
                break
    # a kept duplicate may sit slightly off the true support dose
    L, R = problem.drug.dose_range
    spacing = 1e-3 * (R - L)
    doses, wd, _, value = _refine_doses(problem, doses, wd, wc, spacing, 1e-11 * (R - L))
    sweep = _weight_sweeps(problem, doses, np.asarray(wd), wc, problem.reg_rows(doses))
    if sweep is not None:
        wd, wc, value = sweep
    return doses, np.asarray(wd), wc, value


def _merge_support(problem, doses, wd, merge_tol):
    if len(doses) <= 1:
        return list(doses), np.asarray(wd, float), problem.reg_rows(doses)
    order = np.argsort(doses)
    merged_d: list[float] = []
    merged_w: list[float] = []
    for i in order:
        d, w = float(doses[i]), float(wd[i])
        if merged_d and d - merged_d[-1] <= merge_tol:
            tot = merged_w[-1] + w
            merged_d[-1] = (merged_d[-1] * merged_w[-1] + d * w) / tot
            merged_w[-1] = tot
        else:
            merged_d.append(d)
            merged_w.append(w)
    return merged_d, np.asarray(merged_w), problem.reg_rows(merged_d)


def _refine_doses(problem, doses, wd, wc, spacing, tol):
    L, R = problem.drug.dose_range
    doses = list(doses)
    F = problem.reg_rows(doses)
    value = problem.value(doses, wd, wc, F)
    span = spacing * 4.0
    for i, d0 in enumerate(doses):
        def moved(d: float) -> float:
            trial = doses.copy()
            trial[i] = float(d)
            return problem.value(trial, wd, wc)

        d_new, v_new = golden_max(moved, max(L, d0 - span), min(R, d0 + span), tol)
        if v_new > value:
            doses[i] = float(d_new)
            value = v_new
    F = problem.reg_rows(doses)
    return doses, np.asarray(wd), F, value
