"""Quantum and classical Fisher information checks."""

import math

import numpy as np
import pytest

from tpa_metrology import (
    DensityMatrix,
    FockBasisConfig,
    InsufficientPoints,
    LossGenerator,
    NonHermitianInput,
    QuadratureGrid,
    StateSpec,
    ZeroSignal,
    cfi_dim,
    cfi_photon_number,
    cfi_quad_coherent,
    cfi_quad_squeezed,
    cfi_quadrature,
    cfi_tpa,
    compute_sld,
    default_dim,
    exponent_via_step,
    fit_loglog_slope,
    generator_apply,
    make_state,
    propagate,
    qfi_coherent_exact,
    qfi_tpa,
    scaling_exponent,
    sensitivity_mean_photon,
)
from tpa_metrology.fisher import cfi_from_marginal
from tpa_metrology.phase_space import MarginalDistribution, quadrature_pdf


def test_qfi_coherent_matches_closed_form():
    for n_alpha in (1.0, 4.0):
        rec = qfi_tpa(StateSpec.coherent(math.sqrt(n_alpha)), 0.0)
        assert rec.value == pytest.approx(qfi_coherent_exact(n_alpha), rel=5e-3)
        assert rec.measurement == "qfi"
        assert rec.mean_photon == pytest.approx(n_alpha, rel=1e-9)


def test_sld_rejects_bad_derivatives():
    basis = FockBasisConfig(8)
    rho = make_state(StateSpec.fock(0), basis)
    bad = np.zeros((8, 8), dtype=complex)
    bad[0, 1] = 1.0  # not Hermitian
    with pytest.raises(NonHermitianInput):
        compute_sld(rho, bad)
    with pytest.raises(NonHermitianInput):
        compute_sld(rho, np.eye(8, dtype=complex))  # not trace-free


def test_sld_defining_equation():
    spec = StateSpec.squeezed(0.8)
    basis = FockBasisConfig(default_dim(spec))
    gen = LossGenerator("tpa", basis)
    rho = propagate(gen, make_state(spec, basis), 0.05)
    drho = generator_apply(gen, rho)
    res = compute_sld(rho, drho, cutoff=1e-10)
    sld = res.sld.elements
    assert np.max(np.abs(sld - sld.conj().T)) < 1e-10 * np.max(np.abs(sld))
    # Tr[L drho] equals Tr[L^2 rho] on the retained subspace
    assert np.trace(sld @ drho).real == pytest.approx(res.qfi, rel=1e-8)
    assert res.qfi > 0


def test_squeezed_qfi_cutoff_divergence():
    vals = {}
    for cutoff in (1e-4, 1e-6, 1e-8):
        rec = qfi_tpa(StateSpec.squeezed(1.0), 0.0, cutoff=cutoff)
        vals[cutoff] = rec.value
        assert rec.diagnostics["dropped_weight"] > 0
    assert vals[1e-8] > vals[1e-6] > vals[1e-4]
    assert vals[1e-8] > 2 * vals[1e-4]


def test_cfi_photon_number_coherent():
    rec = cfi_tpa(StateSpec.coherent(math.sqrt(2.0)), 0.0, "photon_number")
    assert rec.value == pytest.approx(10.0, rel=5e-3)


def test_cfi_photon_recurrence_vs_finite_difference():
    h = 1e-6
    for spec in (StateSpec.coherent(2.0), StateSpec.squeezed(1.0)):
        dim = cfi_dim(spec)
        basis = FockBasisConfig(dim)
        gen = LossGenerator("tpa", basis)
        rho = make_state(spec, basis)
        p_plus = propagate(gen, rho, h).populations()
        dp_fd = (p_plus - rho.populations()) / h
        n = np.arange(dim, dtype=float)
        p = rho.populations()
        dp = -0.5 * n * (n - 1) * p
        dp[:-2] += 0.5 * (n[:-2] + 2) * (n[:-2] + 1) * p[2:]
        # one-sided differences pick up O(h * rate) curvature error on deep
        # tail elements, so compare against the derivative's overall scale
        scale = np.max(np.abs(dp))
        assert np.max(np.abs(dp - dp_fd)) / scale < 1e-4


def test_cfi_quadrature_squeezed_closed_forms():
    r = 1.0
    rec_q = cfi_tpa(StateSpec.squeezed(r), 1e-8, "quadrature", theta=0.0)
    rec_p = cfi_tpa(StateSpec.squeezed(r), 1e-8, "quadrature", theta=math.pi / 2)
    assert rec_q.value == pytest.approx(cfi_quad_squeezed(r, "squeezed_q"), rel=1e-2)
    assert rec_p.value == pytest.approx(cfi_quad_squeezed(r, "antisqueezed_p"), rel=1e-2)


def test_cfi_quadrature_coherent_closed_forms():
    n_alpha = 4.0
    spec = StateSpec.coherent(math.sqrt(n_alpha))
    aligned = cfi_tpa(spec, 1e-8, "quadrature", theta=0.0)
    orthogonal = cfi_tpa(spec, 1e-8, "quadrature", theta=math.pi / 2)
    assert aligned.value == pytest.approx(cfi_quad_coherent(n_alpha, "aligned"), rel=1e-2)
    assert orthogonal.value == pytest.approx(cfi_quad_coherent(n_alpha, "orthogonal"), rel=1e-2)


def test_cfi_bounded_by_qfi():
    spec = StateSpec.squeezed(1.0)
    eps = 0.01
    qfi = qfi_tpa(spec, eps).value
    for measurement, theta in (("photon_number", 0.0), ("quadrature", 0.0), ("quadrature", 1.2)):
        cfi = cfi_tpa(spec, eps, measurement, theta=theta).value
        assert cfi <= qfi * (1 + 1e-6)


def test_cfi_reparameterization_invariance():
    # rescaling the outcome axis must not change the Fisher information
    spec = StateSpec.squeezed(1.0)
    dim = cfi_dim(spec)
    basis = FockBasisConfig(dim)
    gen = LossGenerator("tpa", basis)
    rho = propagate(gen, make_state(spec, basis), 1e-4)
    grid = QuadratureGrid(-12.0, 12.0, 1501)
    marg = quadrature_pdf(rho, 0.0, grid, gen=gen)
    c = 2.5
    scaled = MarginalDistribution(
        grid=grid.scaled(c), density=marg.density / c, derivative=marg.derivative / c
    )
    assert cfi_from_marginal(scaled) == pytest.approx(cfi_from_marginal(marg), rel=1e-10)


def test_sensitivity_closed_forms():
    assert sensitivity_mean_photon(StateSpec.squeezed(math.asinh(1.0)), 0.0) == pytest.approx(
        0.25, rel=5e-3
    )
    assert sensitivity_mean_photon(StateSpec.coherent(math.sqrt(3.0)), 0.0) == pytest.approx(
        1.0 / 27.0, rel=5e-3
    )


def test_sensitivity_zero_signal():
    with pytest.raises(ZeroSignal):
        sensitivity_mean_photon(StateSpec.fock(1), 0.0)


def test_cfi_dim_exceeds_default():
    spec = StateSpec.squeezed(1.5)
    assert cfi_dim(spec) > default_dim(spec)


def test_exponent_extraction():
    curve = [(n, 3.0 * n**4) for n in (1.0, 2.0, 4.0, 8.0)]
    assert scaling_exponent(curve, 2.0) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(InsufficientPoints):
        scaling_exponent(curve[:2], 1.5)
    assert exponent_via_step(lambda n: 5.0 * n**3, 10.0) == pytest.approx(3.0, abs=1e-10)
    assert fit_loglog_slope([1, 2, 4], [2.0, 8.0, 32.0]) == pytest.approx(2.0, abs=1e-12)


def test_cfi_floor_guard():
    # a distribution with an empty region must not divide by zero
    grid = QuadratureGrid(-8.0, 8.0, 401)
    x = grid.values
    density = np.exp(-(x**2)) / math.sqrt(math.pi)
    density[np.abs(x) > 6] = 0.0
    deriv = -2 * x * density
    val = cfi_from_marginal(MarginalDistribution(grid, density, deriv))
    assert np.isfinite(val) and val > 0
