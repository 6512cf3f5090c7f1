"""Exact analytic reference values for two-photon-absorption metrology.

Every function here is a closed-form expression in the input parameters;
the numerical engine (dynamics + Fisher-information modules) is validated
against these in the small-absorbance limit.  All formulas refer to the
mean photon number of the probe: n_alpha = |alpha|^2 for a coherent state,
n_r = sinh(r)^2 for squeezed vacuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import NonPositiveInput, UnsupportedFamily, ZeroPhotons
from .fock import StateSpec

__all__ = [
    "CrossSectionInputs",
    "qfi_coherent_exact",
    "dvar_photon_squeezed",
    "dvar_photon_coherent",
    "cfi_quad_squeezed",
    "cfi_quad_coherent",
    "shg_qfi",
    "cross_section",
    "mean_photon_first_order",
]


@dataclass(frozen=True)
class CrossSectionInputs:
    """Absorbance plus medium parameters for a cross-section conversion.

    ``density`` is the number of absorbers per unit volume and ``length``
    the optical path length; units are the caller's responsibility (the
    result carries units of area in the same system).
    """

    epsilon: float
    density: float
    length: float

    def __post_init__(self):
        if self.density <= 0:
            raise NonPositiveInput(f"density must be positive, got {self.density}")
        if self.length <= 0:
            raise NonPositiveInput(f"length must be positive, got {self.length}")
        if self.epsilon < 0:
            raise NonPositiveInput(f"absorbance must be nonnegative, got {self.epsilon}")


def qfi_coherent_exact(n_alpha: float) -> float:
    """Limiting quantum Fisher information of a coherent probe: n^3 + n^2/2."""
    if n_alpha < 0:
        raise NonPositiveInput(f"mean photon number must be nonnegative, got {n_alpha}")
    return n_alpha**3 + 0.5 * n_alpha**2


def dvar_photon_squeezed(n_r: float) -> float:
    """Mean-photon-number sensitivity (Delta eps)^2 for squeezed vacuum.

    Equals (2/n_r)(1 + n_r)/(1 + 3 n_r)^2; diverges as the photon number
    vanishes and falls off as 2/(9 n_r^2) for bright squeezing.
    """
    if n_r <= 0:
        raise ZeroPhotons("squeezed-vacuum sensitivity requires n_r > 0")
    return (2.0 / n_r) * (1.0 + n_r) / (1.0 + 3.0 * n_r) ** 2


def dvar_photon_coherent(n_alpha: float) -> float:
    """Mean-photon-number sensitivity (Delta eps)^2 for a coherent probe: 1/n^3."""
    if n_alpha <= 0:
        raise ZeroPhotons("coherent-state sensitivity requires n_alpha > 0")
    return 1.0 / n_alpha**3


def cfi_quad_squeezed(r: float, which: str = "squeezed_q") -> float:
    """Homodyne Fisher information of squeezed vacuum in the small-loss limit.

    ``which`` selects the squeezed quadrature ("squeezed_q"/"q", scaling as
    32 n_r^4 for large r) or the anti-squeezed one ("antisqueezed_p"/"p",
    scaling as 21 n_r^2 / 2).
    """
    if r < 0:
        raise NonPositiveInput(f"squeezing parameter must be nonnegative, got {r}")
    s2 = math.sinh(r) ** 2
    e2 = math.exp(2.0 * r)
    if which in ("squeezed_q", "q"):
        poly = 4.0 * e2**4 - 12.0 * e2**3 + 33.0 * e2**2 - 42.0 * e2 + 21.0
        return math.exp(-2.0 * r) * s2 / 8.0 * poly
    if which in ("antisqueezed_p", "p"):
        poly = 21.0 * e2**4 - 42.0 * e2**3 + 33.0 * e2**2 - 12.0 * e2 + 4.0
        return math.exp(-6.0 * r) * s2 / 8.0 * poly
    raise UnsupportedFamily(f"unknown quadrature branch {which!r}")


def cfi_quad_coherent(n_alpha: float, which: str = "aligned") -> float:
    """Homodyne Fisher information of a coherent probe in the small-loss limit.

    The quadrature containing the displacement ("aligned") carries
    n^3 + n^2/2 — the full quantum Fisher information — while the
    orthogonal one carries only n^2/2.
    """
    if n_alpha < 0:
        raise NonPositiveInput(f"mean photon number must be nonnegative, got {n_alpha}")
    if which == "aligned":
        return n_alpha**3 + 0.5 * n_alpha**2
    if which == "orthogonal":
        return 0.5 * n_alpha**2
    raise UnsupportedFamily(f"unknown quadrature axis {which!r}")


def shg_qfi(spec: StateSpec, g: float = 1.0) -> float:
    """Fisher information of unitary second-harmonic generation: 4 g^2 <a+^2 a^2>.

    The benchmark Hamiltonian converts photon pairs coherently; the
    generator variance over the vacuum-seeded harmonic mode reduces to the
    pump's second factorial moment, giving 4 g^2 n^2 for coherent light and
    4 g^2 n (1 + 3 n) for squeezed vacuum — quadratic scaling either way.
    """
    if spec.family == "coherent":
        n = spec.mean_photon()
        moment = n**2
    elif spec.family == "squeezed_vacuum":
        n = spec.mean_photon()
        moment = n * (1.0 + 3.0 * n)
    else:
        raise UnsupportedFamily(
            f"SHG benchmark defined for coherent and squeezed_vacuum, got {spec.family!r}"
        )
    return 4.0 * g**2 * moment


def cross_section(inputs: CrossSectionInputs) -> float:
    """Convert a measured absorbance into a cross section: sigma = eps/(n l)."""
    return inputs.epsilon / (inputs.density * inputs.length)


def mean_photon_first_order(spec: StateSpec, epsilon: float) -> float:
    """Mean photon number after weak two-photon loss, to first order in absorbance."""
    n = spec.mean_photon()
    if spec.family == "squeezed_vacuum":
        return n - epsilon * n * (1.0 + 3.0 * n)
    if spec.family == "coherent":
        return n - epsilon * n**2
    raise UnsupportedFamily(
        f"first-order expansion available for coherent and squeezed_vacuum, got {spec.family!r}"
    )
