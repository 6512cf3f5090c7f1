"""Quadrature distributions, Wigner functions and negativity."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson
from scipy.linalg import expm

from tpa_metrology import (
    FockBasisConfig,
    GridTooNarrow,
    InvalidSpec,
    QuadratureGrid,
    StateSpec,
    annihilation_op,
    default_dim,
    default_grid,
    make_state,
    negativity_volume,
    quadrature_pdf,
    wigner,
)
from tpa_metrology.phase_space import (
    field_from_binary,
    field_to_binary,
    field_to_csv,
    hermite_functions,
    marginal_from_wigner,
)


def test_hermite_functions_orthonormal():
    grid = QuadratureGrid(-12.0, 12.0, 2001)
    psi = hermite_functions(12, grid.values)
    gram = simpson(psi[:, :, None] * psi[:, None, :], x=grid.values, axis=0)
    assert np.max(np.abs(gram - np.eye(12))) < 1e-8


def test_vacuum_marginal_and_wigner():
    basis = FockBasisConfig(16)
    rho = make_state(StateSpec.fock(0), basis)
    grid = QuadratureGrid(-6.0, 6.0, 801)
    marg = quadrature_pdf(rho, 0.0, grid)
    expected = np.exp(-grid.values**2) / math.sqrt(math.pi)
    assert np.max(np.abs(marg.density - expected)) < 1e-12
    field = wigner(rho, grid, grid)
    q, p = np.meshgrid(grid.values, grid.values, indexing="ij")
    w_exact = np.exp(-(q**2) - p**2) / math.pi
    assert np.max(np.abs(field.values - w_exact)) < 1e-12
    assert field.values.max() == pytest.approx(1.0 / math.pi, rel=1e-12)


def test_wigner_matches_displaced_parity_reference():
    # independent Wigner oracle: W(q,p) = Tr[rho D Pi D^dagger] / pi with the
    # displacement built by matrix exponentiation at small dimension
    basis = FockBasisConfig(24)
    rho = make_state(StateSpec.coherent(0.8 + 0.3j), basis)
    a = annihilation_op(basis).elements
    parity = np.diag((-1.0) ** np.arange(basis.dim))
    grid = QuadratureGrid(-8.0, 8.0, 401)
    field = wigner(rho, grid, grid)
    for iq, ip in ((200, 200), (228, 190), (183, 222)):
        q0, p0 = grid.values[iq], grid.values[ip]
        alpha = (q0 + 1j * p0) / math.sqrt(2.0)
        disp = expm(alpha * a.conj().T - np.conj(alpha) * a)
        ref = np.trace(rho.elements @ disp @ parity @ disp.conj().T).real / math.pi
        assert field.values[iq, ip] == pytest.approx(ref, abs=1e-10)


def test_fock_one_negativity():
    basis = FockBasisConfig(16)
    rho = make_state(StateSpec.fock(1), basis)
    grid = QuadratureGrid(-6.0, 6.0, 601)
    field = wigner(rho, grid, grid)
    # exact negative volume of the n=1 Wigner function: 2 e^{-1/2} - 1
    assert negativity_volume(field) == pytest.approx(2 * math.exp(-0.5) - 1, abs=2e-4)


def test_vacuum_negativity_zero():
    basis = FockBasisConfig(16)
    rho = make_state(StateSpec.coherent(1.0), basis)
    grid = QuadratureGrid(-8.0, 8.0, 401)
    # strictly positive Wigner function; only float-rounding ripple survives
    assert negativity_volume(wigner(rho, grid, grid)) < 1e-8


def test_marginal_from_wigner_consistency():
    spec = StateSpec.squeezed(0.7)
    basis = FockBasisConfig(default_dim(spec))
    rho = make_state(spec, basis)
    grid = QuadratureGrid(-9.0, 9.0, 901)
    field = wigner(rho, grid, grid)
    marg_w = marginal_from_wigner(field)
    marg_d = quadrature_pdf(rho, 0.0, grid)
    assert np.max(np.abs(marg_w - marg_d.density)) < 1e-6


def test_rotated_marginal_centers():
    alpha = math.sqrt(2.0)
    basis = FockBasisConfig(32)
    rho = make_state(StateSpec.coherent(alpha), basis)
    grid = QuadratureGrid(-8.0, 8.0, 1601)
    for theta, center in ((0.0, math.sqrt(2.0) * alpha), (math.pi / 2, 0.0)):
        marg = quadrature_pdf(rho, theta, grid)
        mean = simpson(grid.values * marg.density, x=grid.values)
        assert mean == pytest.approx(center, abs=1e-8)


def test_grid_too_narrow():
    basis = FockBasisConfig(64)
    rho = make_state(StateSpec.coherent(3.0), basis)
    with pytest.raises(GridTooNarrow):
        quadrature_pdf(rho, 0.0, QuadratureGrid(-4.0, 4.0, 401))


def test_grid_validation():
    with pytest.raises(InvalidSpec):
        QuadratureGrid(1.0, -1.0, 401)
    with pytest.raises(InvalidSpec):
        QuadratureGrid(-1.0, 1.0, 400)  # even point count
    with pytest.raises(InvalidSpec):
        QuadratureGrid(-1.0, 1.0, 51)  # too few points
    g = default_grid(4.0)
    assert g.points == 2001 and g.lo == -g.hi


def test_field_csv_and_binary_round_trip(tmp_path):
    basis = FockBasisConfig(12)
    rho = make_state(StateSpec.fock(1), basis)
    grid = QuadratureGrid(-7.0, 7.0, 101)
    field = wigner(rho, grid, grid)

    csv_path = tmp_path / "field.csv"
    field_to_csv(field, csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "q,p,W"
    assert len(lines) == 1 + 101 * 101
    q0, p0, w0 = lines[1].split(",")
    assert float(q0) == grid.lo and float(p0) == grid.lo
    assert float(w0) == field.values[0, 0]

    bin_path = tmp_path / "field.bin"
    field_to_binary(field, bin_path)
    back = field_from_binary(bin_path)
    assert np.array_equal(back.values, field.values)
    assert back.q_grid.values == pytest.approx(field.q_grid.values, abs=0)

    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"NOTMAGIC" + bin_path.read_bytes()[8:])
    with pytest.raises(InvalidSpec):
        field_from_binary(bad)
