"""Exception hierarchy for the TPA metrology engine.

Everything raised deliberately by the engine derives from EngineError, so the
CLI can map numerical failures to a single exit code.
"""


class EngineError(Exception):
    """Base class for all engine failures."""


class InvalidSpec(EngineError):
    """State or basis specification is inconsistent."""


class DimensionMismatch(EngineError):
    """Operands live on Fock bases of different dimension."""


class TruncationError(EngineError):
    """Population in the top Fock levels exceeds the configured tolerance."""


class NonHermitianInput(EngineError):
    """A matrix required to be Hermitian is not."""


class NegativeState(EngineError):
    """Density matrix has an eigenvalue below the allowed negativity slack."""


class GridTooNarrow(EngineError):
    """Quadrature or phase-space grid does not contain the state."""


class ZeroSignal(EngineError):
    """Observable carries no first-order information about the absorbance."""


class InsufficientPoints(EngineError):
    """Not enough samples to extract a local scaling exponent."""


class ZeroPhotons(EngineError):
    """Closed form undefined at zero mean photon number."""


class UnsupportedFamily(EngineError):
    """State family outside the domain of a closed-form expression."""


class NonPositiveInput(EngineError):
    """Physical parameter that must be strictly positive is not."""


class ConfigError(EngineError):
    """Sweep configuration is malformed or empty."""
