"""Quantum and classical Fisher information for absorbance estimation.

The symmetric logarithmic derivative is built in the eigenbasis of the
state; eigenvalue pairs whose sum falls below a cutoff are excluded from the
operator but their squared matrix elements are accumulated into
``dropped_weight``.  For squeezed input the information grows without bound
as the cutoff shrinks, which is exactly the divergence mechanism this module
is meant to expose; the cutoff makes it quantifiable instead of fatal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .dynamics import LossGenerator, generator_apply, photon_flux, propagate, _as_epsilon
from .exceptions import (
    InsufficientPoints,
    InvalidSpec,
    NegativeState,
    NonHermitianInput,
    ZeroSignal,
)
from .fock import (
    DensityMatrix,
    FockBasisConfig,
    QuantumOperator,
    StateSpec,
    default_dim,
    make_state,
)
from .phase_space import MarginalDistribution, QuadratureGrid, default_grid, quadrature_pdf

__all__ = [
    "SldResult",
    "FisherRecord",
    "compute_sld",
    "qfi_tpa",
    "cfi_tpa",
    "cfi_dim",
    "cfi_photon_number",
    "cfi_quadrature",
    "cfi_from_marginal",
    "sensitivity_mean_photon",
    "scaling_exponent",
    "exponent_via_step",
    "fit_loglog_slope",
    "DEFAULT_CUTOFF",
    "DEFAULT_FLOOR",
    "ZERO_EPSILON",
]

DEFAULT_CUTOFF = 1e-10
# probability floor, relative to the distribution peak
DEFAULT_FLOOR = 1e-14
# Evaluation point used when the absorbance is exactly zero.  A strictly pure
# state makes the SLD linear system degenerate (all information sits in the
# null space), so the zero-absorbance limit is probed at this small reference
# value instead.  For states with a finite limiting information the shift is
# far below every quoted tolerance; for squeezed vacuum it exposes the
# cutoff-dependent divergence, with the dominant near-null eigenvalue pair
# landing between the 1e-6 and 1e-4 rank cutoffs.
ZERO_EPSILON = 4e-7


@dataclass(frozen=True)
class SldResult:
    sld: QuantumOperator
    qfi: float
    rank_cutoff: float
    dropped_weight: float


@dataclass(frozen=True)
class FisherRecord:
    """One evaluated grid cell of a sensitivity analysis."""

    spec: StateSpec
    epsilon: float
    measurement: str
    value: float
    dim: int
    diagnostics: dict = field(default_factory=dict)
    status: str = "ok"

    @property
    def mean_photon(self) -> float:
        return self.spec.mean_photon()


def compute_sld(
    rho: DensityMatrix,
    drho: np.ndarray,
    cutoff: float = DEFAULT_CUTOFF,
) -> SldResult:
    """Solve d(rho)/d(eps) = (L rho + rho L)/2 for Hermitian L.

    Works in the eigenbasis of rho; pairs with eigenvalue sum <= cutoff are
    excluded and their squared matrix elements reported as dropped_weight.
    The returned qfi is Tr[L^2 rho] restricted to the retained pairs.
    """
    drho = np.asarray(drho)
    scale = max(float(np.max(np.abs(drho))), 1.0)
    if np.max(np.abs(drho - drho.conj().T)) > 1e-10 * scale:
        raise NonHermitianInput("drho must be Hermitian")
    if abs(np.trace(drho)) > 1e-10 * scale:
        raise NonHermitianInput("drho must be trace-free")
    lam, vecs = np.linalg.eigh(rho.elements)
    if lam.min() < -1e-8:
        raise NegativeState(f"state eigenvalue {lam.min():.3e} below -1e-8")
    d_eig = vecs.conj().T @ drho @ vecs
    lsum = lam[:, None] + lam[None, :]
    keep = lsum > cutoff
    abs2 = np.abs(d_eig) ** 2
    qfi = float(np.sum(2.0 * abs2[keep] / lsum[keep]))
    dropped = float(np.sum(abs2[~keep]))
    l_eig = np.zeros_like(d_eig)
    l_eig[keep] = 2.0 * d_eig[keep] / lsum[keep]
    sld = vecs @ l_eig @ vecs.conj().T
    sld = 0.5 * (sld + sld.conj().T)
    return SldResult(
        sld=QuantumOperator(rho.basis, sld),
        qfi=qfi,
        rank_cutoff=cutoff,
        dropped_weight=dropped,
    )


def _state_at(
    spec: StateSpec,
    eps: float,
    dim: int | None,
    tail_tol: float,
    kind: str = "tpa",
):
    if dim is None:
        dim = default_dim(spec, tail_tol)
    basis = FockBasisConfig(dim, tail_tol)
    gen = LossGenerator(kind, basis)
    rho0 = make_state(spec, basis)
    rho_eps = propagate(gen, rho0, eps)
    return gen, rho_eps


def qfi_tpa(
    spec: StateSpec,
    epsilon,
    cutoff: float = DEFAULT_CUTOFF,
    dim: int | None = None,
    tail_tol: float | None = None,
) -> FisherRecord:
    """Quantum Fisher information about the absorbance for a given input state."""
    eps = _as_epsilon(epsilon)
    eps_eval = eps if eps > 0.0 else ZERO_EPSILON
    tail_tol = tail_tol if tail_tol is not None else FockBasisConfig(32).tail_tol
    gen, rho_eps = _state_at(spec, eps_eval, dim, tail_tol)
    drho = generator_apply(gen, rho_eps)
    res = compute_sld(rho_eps, drho, cutoff)
    return FisherRecord(
        spec=spec,
        epsilon=eps,
        measurement="qfi",
        value=res.qfi,
        dim=gen.basis.dim,
        diagnostics={
            "dropped_weight": res.dropped_weight,
            "rank_cutoff": cutoff,
            "epsilon_evaluated": eps_eval,
        },
    )


def cfi_dim(spec: StateSpec, tail_tol: float = 1e-6) -> int:
    """Basis dimension for classical-Fisher evaluations.

    Distribution derivatives divide by small probabilities, so truncation
    noise in the far tail is amplified quadratically.  Sizing the basis to
    the squared tail tolerance keeps the integrated information stable under
    further basis growth.
    """
    return default_dim(spec, tail_tol * tail_tol)


def cfi_tpa(
    spec: StateSpec,
    epsilon,
    measurement: str = "photon_number",
    theta: float = 0.0,
    dim: int | None = None,
    tail_tol: float | None = None,
    floor: float = DEFAULT_FLOOR,
) -> FisherRecord:
    """Classical Fisher information about the absorbance for a chosen detector.

    ``measurement`` is "photon_number" or "quadrature" (homodyne at angle
    ``theta``).  When ``dim`` is not given the basis follows ``cfi_dim``.
    """
    eps = _as_epsilon(epsilon)
    tail_tol = tail_tol if tail_tol is not None else FockBasisConfig(32).tail_tol
    if dim is None:
        dim = cfi_dim(spec, tail_tol)
    gen, rho_eps = _state_at(spec, eps, dim, tail_tol)
    if measurement == "photon_number":
        value = cfi_photon_number(rho_eps, gen, floor)
        diagnostics = {"floor": floor}
    elif measurement == "quadrature":
        value = cfi_quadrature(rho_eps, gen, theta, floor=floor)
        diagnostics = {"floor": floor, "theta": theta}
    else:
        raise InvalidSpec(f"unknown measurement {measurement!r}")
    return FisherRecord(
        spec=spec,
        epsilon=eps,
        measurement=measurement,
        value=value,
        dim=gen.basis.dim,
        diagnostics=diagnostics,
    )


def cfi_photon_number(
    rho: DensityMatrix,
    gen: LossGenerator,
    floor: float = DEFAULT_FLOOR,
) -> float:
    """Fisher information of the photon-number distribution about the absorbance.

    For two-photon loss the derivative follows the closed recurrence
    dP_n = [(n+2)(n+1) P_{n+2} - n(n-1) P_n] / 2; terms with probability
    below ``floor`` times the distribution peak are skipped.
    """
    p = rho.elements.diagonal().real
    d = gen.basis.dim
    if gen.kind == "tpa":
        n = np.arange(d, dtype=float)
        dp = -0.5 * n * (n - 1) * p
        dp[: d - 2] += 0.5 * (n[: d - 2] + 2) * (n[: d - 2] + 1) * p[2:]
    else:
        dp = generator_apply(gen, rho).diagonal().real
    mask = p > floor * p.max()
    return float(np.sum(dp[mask] ** 2 / p[mask]))


def cfi_from_marginal(marg: MarginalDistribution, floor: float = DEFAULT_FLOOR) -> float:
    """Integrate (dP/d eps)^2 / P over the grid with a relative probability floor."""
    p = marg.density
    integrand = np.zeros_like(p)
    mask = p > floor * p.max()
    integrand[mask] = marg.derivative[mask] ** 2 / p[mask]
    return float(simpson(integrand, x=marg.grid.values))


def cfi_quadrature(
    rho: DensityMatrix,
    gen: LossGenerator,
    theta: float = 0.0,
    grid: QuadratureGrid | None = None,
    floor: float = DEFAULT_FLOOR,
) -> float:
    """Fisher information of a homodyne measurement at quadrature angle theta."""
    if grid is None:
        # size the grid from the measured quadrature's own moments so that
        # anti-squeezed (wide) marginals clear the boundary-decay gate;
        # <a> and <a^2> come from the two relevant off-diagonals in O(dim)
        el = rho.elements
        n = np.arange(rho.dim - 1, dtype=float)
        a1 = complex(np.sum(np.sqrt(n + 1.0) * el.diagonal(-1)))
        n2 = np.arange(rho.dim - 2, dtype=float)
        a2 = complex(np.sum(np.sqrt((n2 + 1.0) * (n2 + 2.0)) * el.diagonal(-2)))
        m1 = math.sqrt(2.0) * (a1 * np.exp(-1j * theta)).real
        m2 = (a2 * np.exp(-2j * theta)).real + rho.mean_photon() + 0.5
        sigma = math.sqrt(max(m2 - m1**2, 0.5))
        half = abs(m1) + 4.0 + 8.0 * sigma
        grid = QuadratureGrid(-half, half, 2001)
    marg = quadrature_pdf(rho, theta, grid, gen=gen)
    return cfi_from_marginal(marg, floor)


def sensitivity_mean_photon(
    spec: StateSpec,
    epsilon,
    dim: int | None = None,
    tail_tol: float | None = None,
) -> float:
    """Error-propagation sensitivity (Delta eps)^2 of the mean photon number."""
    eps = _as_epsilon(epsilon)
    tail_tol = tail_tol if tail_tol is not None else FockBasisConfig(32).tail_tol
    gen, rho_eps = _state_at(spec, eps, dim, tail_tol)
    var = rho_eps.photon_variance()
    slope = photon_flux(gen, rho_eps)
    if abs(slope) < 1e-14:
        raise ZeroSignal(
            "mean photon number carries no first-order absorbance signal for this state"
        )
    return var / slope**2


def scaling_exponent(curve, at: float) -> float:
    """Local log-log slope of a Fisher-information curve at photon number ``at``.

    ``curve`` is a sequence of (mean_photon, fisher_value) pairs with strictly
    increasing photon numbers bracketing the target.
    """
    pts = sorted((float(n), float(f)) for n, f in curve)
    if len(pts) < 3:
        raise InsufficientPoints("need at least 3 points to extract an exponent")
    ns = np.array([p[0] for p in pts])
    fs = np.array([p[1] for p in pts])
    if np.any(np.diff(ns) <= 0):
        raise InsufficientPoints("photon numbers must be strictly increasing")
    if np.any(fs <= 0):
        raise InsufficientPoints("Fisher values must be positive for a log-log slope")
    if not (ns[0] <= at <= ns[-1]):
        raise InsufficientPoints(f"target {at} not bracketed by the curve")
    ln, lf = np.log(ns), np.log(fs)
    exact = np.nonzero(np.isclose(ns, at, rtol=1e-12))[0]
    if exact.size and 0 < exact[0] < len(ns) - 1:
        i = exact[0]
        return float((lf[i + 1] - lf[i - 1]) / (ln[i + 1] - ln[i - 1]))
    hi = int(np.searchsorted(ns, at, side="right"))
    hi = min(max(hi, 1), len(ns) - 1)
    return float((lf[hi] - lf[hi - 1]) / (ln[hi] - ln[hi - 1]))


def exponent_via_step(fi_of_n, at: float, dex: float = 0.05) -> float:
    """Central log-log derivative of ``fi_of_n`` using a multiplicative step."""
    lo = fi_of_n(at * 10.0 ** (-dex))
    hi = fi_of_n(at * 10.0**dex)
    if lo <= 0 or hi <= 0:
        raise ZeroSignal("Fisher information must be positive to define an exponent")
    return float((math.log(hi) - math.log(lo)) / (2.0 * dex * math.log(10.0)))


def fit_loglog_slope(ns, fs) -> float:
    """Least-squares log-log slope over a whole curve."""
    ns = np.asarray(ns, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if ns.size < 2:
        raise InsufficientPoints("need at least 2 points for a slope fit")
    return float(np.polyfit(np.log(ns), np.log(fs), 1)[0])
