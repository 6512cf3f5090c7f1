"""Truncated Fock-space states and operators.

All states live on a finite basis |0>..|D-1>.  The truncation dimension is
always paired with a tail tolerance: a state is only accepted if the total
population of its top two Fock levels stays below ``tail_tol``, which keeps
every downstream expectation value honest.

Quadrature convention: q = (a + a^dag)/sqrt(2), so the vacuum has
Var(q) = 1/2.  A squeezed vacuum with phase phi = 0 is squeezed in q,
Var(q) = exp(-2r)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


from .exceptions import DimensionMismatch, InvalidSpec, TruncationError

__all__ = [
    "FockBasisConfig",
    "QuantumOperator",
    "DensityMatrix",
    "StateSpec",
    "annihilation_op",
    "creation_op",
    "number_op",
    "quadrature_op",
    "make_state",
    "expectation",
    "default_dim",
    "DEFAULT_TAIL_TOL",
]

DEFAULT_TAIL_TOL = 1e-6

# validation tolerances for constructed density matrices
_HERM_TOL = 1e-12
_EIG_TOL = 1e-10


@dataclass(frozen=True)
class FockBasisConfig:
    """Truncated Fock basis |0>..|dim-1| with a tail-population gate."""

    dim: int
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.dim < 4:
            raise InvalidSpec(f"basis dimension must be >= 4, got {self.dim}")
        if not (0.0 < self.tail_tol < 1.0):
            raise InvalidSpec(f"tail_tol must lie in (0, 1), got {self.tail_tol}")


@dataclass(frozen=True)
class QuantumOperator:
    basis: FockBasisConfig
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.elements.shape != (self.basis.dim, self.basis.dim):
            raise DimensionMismatch(
                f"operator shape {self.elements.shape} does not match dim {self.basis.dim}"
            )

    def dagger(self) -> "QuantumOperator":
        return QuantumOperator(self.basis, self.elements.conj().T)


@dataclass(frozen=True)
class DensityMatrix:
    basis: FockBasisConfig
    elements: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.elements.shape != (self.basis.dim, self.basis.dim):
            raise DimensionMismatch(
                f"density matrix shape {self.elements.shape} does not match dim {self.basis.dim}"
            )

    @property
    def dim(self) -> int:
        return self.basis.dim

    def trace(self) -> float:
        return float(np.trace(self.elements).real)

    def populations(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()

    def tail_population(self) -> float:
        """Total population of the top two Fock levels."""
        pops = self.elements.diagonal().real
        return float(pops[-1] + pops[-2])

    def mean_photon(self) -> float:
        pops = self.elements.diagonal().real
        return float(np.arange(self.dim) @ pops)

    def photon_variance(self) -> float:
        n = np.arange(self.dim)
        pops = self.elements.diagonal().real
        mean = n @ pops
        return float((n * n) @ pops - mean**2)

    def purity(self) -> float:
        return float(np.vdot(self.elements, self.elements).real)

    def validate(self) -> "DensityMatrix":
        """Check hermiticity, trace window and positivity; return self."""
        m = self.elements
        if np.max(np.abs(m - m.conj().T)) > _HERM_TOL * max(1.0, np.max(np.abs(m))):
            raise InvalidSpec("density matrix is not Hermitian")
        tr = self.trace()
        if not (1.0 - 10.0 * self.basis.tail_tol <= tr <= 1.0 + _HERM_TOL):
            raise InvalidSpec(f"trace {tr} outside allowed window")
        if np.linalg.eigvalsh(m).min() < -_EIG_TOL:
            raise InvalidSpec("density matrix has a significantly negative eigenvalue")
        return self


@dataclass(frozen=True)
class StateSpec:
    """Declarative description of an input state.

    Exactly the parameters of the chosen family may be nonzero; everything
    else must stay at its default.
    """

    family: str
    alpha: complex = 0j
    r: float = 0.0
    phi: float = 0.0
    n: int = 0

    def __post_init__(self):
        if self.family not in ("coherent", "squeezed_vacuum", "fock"):
            raise InvalidSpec(f"unknown state family {self.family!r}")
        if self.family == "coherent" and (self.r != 0.0 or self.phi != 0.0 or self.n != 0):
            raise InvalidSpec("coherent state only takes an amplitude")
        if self.family == "squeezed_vacuum":
            if self.alpha != 0j or self.n != 0:
                raise InvalidSpec("squeezed vacuum only takes (r, phi)")
            if self.r < 0.0:
                raise InvalidSpec("squeezing magnitude r must be >= 0")
        if self.family == "fock":
            if self.alpha != 0j or self.r != 0.0 or self.phi != 0.0:
                raise InvalidSpec("fock state only takes a photon count")
            if self.n < 0:
                raise InvalidSpec("photon count must be >= 0")

    # -- convenience constructors ------------------------------------------
    @classmethod
    def coherent(cls, alpha: complex) -> "StateSpec":
        return cls("coherent", alpha=complex(alpha))

    @classmethod
    def squeezed(cls, r: float, phi: float = 0.0) -> "StateSpec":
        return cls("squeezed_vacuum", r=float(r), phi=float(phi))

    @classmethod
    def fock(cls, n: int) -> "StateSpec":
        return cls("fock", n=int(n))

    # -- analytic moments ---------------------------------------------------
    def mean_photon(self) -> float:
        if self.family == "coherent":
            return abs(self.alpha) ** 2
        if self.family == "squeezed_vacuum":
            return math.sinh(self.r) ** 2
        return float(self.n)

    def photon_variance(self) -> float:
        if self.family == "coherent":
            return abs(self.alpha) ** 2
        if self.family == "squeezed_vacuum":
            # sinh^2(r) [1 + cosh(2r)] = 2 n_r (1 + n_r)
            nr = math.sinh(self.r) ** 2
            return 2.0 * nr * (1.0 + nr)
        return 0.0

    @property
    def param(self) -> float:
        """The single swept scalar of the family (|alpha|, r or n)."""
        if self.family == "coherent":
            return abs(self.alpha)
        if self.family == "squeezed_vacuum":
            return self.r
        return float(self.n)

    # -- serialization ------------------------------------------------------
    def to_record(self, dim: int | None = None, tail_tol: float | None = None) -> dict:
        rec = {
            "family": self.family,
            "alpha_re": self.alpha.real,
            "alpha_im": self.alpha.imag,
            "r": self.r,
            "phi": self.phi,
            "n": self.n,
        }
        if dim is not None:
            rec["dim"] = int(dim)
        if tail_tol is not None:
            rec["tail_tol"] = float(tail_tol)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "StateSpec":
        try:
            family = rec["family"]
        except KeyError as exc:
            raise InvalidSpec("state record is missing the 'family' key") from exc
        return cls(
            family,
            alpha=complex(rec.get("alpha_re", 0.0), rec.get("alpha_im", 0.0)),
            r=float(rec.get("r", 0.0)),
            phi=float(rec.get("phi", 0.0)),
            n=int(rec.get("n", 0)),
        )


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def annihilation_op(basis: FockBasisConfig) -> QuantumOperator:
    """Ladder operator a with <n-1|a|n> = sqrt(n)."""
    d = basis.dim
    a = np.zeros((d, d), dtype=complex)
    ns = np.arange(1, d)
    a[ns - 1, ns] = np.sqrt(ns)
    return QuantumOperator(basis, a)


def creation_op(basis: FockBasisConfig) -> QuantumOperator:
    return annihilation_op(basis).dagger()


def number_op(basis: FockBasisConfig) -> QuantumOperator:
    d = basis.dim
    return QuantumOperator(basis, np.diag(np.arange(d, dtype=float)).astype(complex))


def quadrature_op(basis: FockBasisConfig, angle: float = 0.0) -> QuantumOperator:
    """Rotated quadrature (a e^{-i angle} + a^dag e^{i angle})/sqrt(2)."""
    a = annihilation_op(basis).elements
    q = (a * np.exp(-1j * angle) + a.conj().T * np.exp(1j * angle)) / math.sqrt(2.0)
    return QuantumOperator(basis, q)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def _pure_state_vector(spec: StateSpec, basis: FockBasisConfig) -> np.ndarray:
    d = basis.dim
    if spec.family == "fock":
        if spec.n >= d:
            raise TruncationError(f"Fock level {spec.n} does not fit in dim {d}")
        psi = np.zeros(d, dtype=complex)
        psi[spec.n] = 1.0
        return psi
    psi = np.zeros(d, dtype=complex)
    if spec.family == "coherent":
        # D(alpha)|0>: c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!)
        c = complex(math.exp(-0.5 * abs(spec.alpha) ** 2))
        for n in range(d):
            psi[n] = c
            c *= spec.alpha / math.sqrt(n + 1)
        return psi
    # squeeze operator S = exp((z* a^2 - z a^dag^2)/2); with phi = 0 this
    # squeezes q: S^dag a S = cosh(r) a - e^{i phi} sinh(r) a^dag, and
    # S|0> = cosh(r)^{-1/2} sum_m (-e^{i phi} tanh r)^m sqrt((2m)!)/(2^m m!) |2m>
    step = -np.exp(1j * spec.phi) * math.tanh(spec.r)
    c = complex(1.0 / math.sqrt(math.cosh(spec.r)))
    for m in range(0, d, 2):
        psi[m] = c
        if m + 2 < d:
            c *= step * math.sqrt((m + 1) / (m + 2))
    return psi


def make_state(spec: StateSpec, basis: FockBasisConfig) -> DensityMatrix:
    """Build the pure density matrix for ``spec`` on ``basis``.

    Raises TruncationError if the top two Fock levels carry more population
    than the basis tail tolerance.
    """
    psi = _pure_state_vector(spec, basis)
    rho = np.outer(psi, psi.conj())
    state = DensityMatrix(basis, rho)
    tail = state.tail_population()
    if tail > basis.tail_tol:
        raise TruncationError(
            f"top-two Fock population {tail:.3e} exceeds tail_tol {basis.tail_tol:.1e} "
            f"(family={spec.family}, dim={basis.dim})"
        )
    return state


def expectation(rho: DensityMatrix, op: QuantumOperator) -> complex:
    """Tr[O rho]; real to ~1e-12 for Hermitian O."""
    if rho.basis.dim != op.basis.dim:
        raise DimensionMismatch(
            f"state dim {rho.basis.dim} != operator dim {op.basis.dim}"
        )
    return complex(np.trace(op.elements @ rho.elements))


# ---------------------------------------------------------------------------
# truncation policy
# ---------------------------------------------------------------------------

def _analytic_tail(spec: StateSpec, dim: int) -> float:
    """Analytic population of Fock levels dim-2 and dim-1 for pure families."""
    if spec.family == "fock":
        return 1.0 if spec.n >= dim - 2 else 0.0
    if spec.family == "coherent":
        lam = abs(spec.alpha) ** 2
        if lam == 0.0:
            return 0.0
        # Poisson tail, accumulated iteratively to avoid overflow
        p = math.exp(-lam)
        total = 0.0
        for k in range(1, dim):
            p *= lam / k
            if k >= dim - 2:
                total += p
        return total
    # squeezed vacuum: P_{2m} = C(2m, m) tanh^{2m}(r) / (4^m cosh r)
    if spec.r == 0.0:
        return 0.0
    t2 = math.tanh(spec.r) ** 2
    p = 1.0 / math.cosh(spec.r)
    total = 0.0
    for m in range(1, (dim + 1) // 2):
        p *= (2 * m - 1) / (2 * m) * t2
        if 2 * m >= dim - 2:
            total += p
    return total


def default_dim(spec: StateSpec, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Truncation dimension for ``spec``.

    Starts from max(32, ceil(nbar + 8 sigma_n)) and grows in steps of 16
    until the analytic top-two-level population clears the tail gate.
    Squeezed states have heavy Fock tails, hence the iterative bump.
    """
    nbar = spec.mean_photon()
    sigma = math.sqrt(max(spec.photon_variance(), 0.0))
    dim = max(32, math.ceil(nbar + 8.0 * sigma))
    if spec.family == "fock":
        return max(dim, spec.n + 3)
    while _analytic_tail(spec, dim) > 0.5 * tail_tol:
        dim += 16
        if dim > 20000:
            raise TruncationError(
                f"cannot satisfy tail_tol {tail_tol:.1e} for {spec} below dim 20000"
            )
    return dim
