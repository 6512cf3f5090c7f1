"""Declarative parameter sweeps over states, absorbances and measurements.

A sweep evaluates a grid of (input state, absorbance, measurement) cells and
collects one FisherRecord per cell.  Presets reproduce the standard figure
grids: information vs. photon number at weak loss, information vs. absorbance
with Wigner negativity, and exponent/value heatmaps over the full plane.
Results export to CSV (fixed column schema) and JSON (byte-exact round trip).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dynamics import LossGenerator, propagate
from .exceptions import ConfigError, EngineError, TruncationError
from .fisher import (
    DEFAULT_CUTOFF,
    FisherRecord,
    cfi_dim,
    cfi_photon_number,
    cfi_quadrature,
    qfi_tpa,
)
from .fock import DensityMatrix, FockBasisConfig, StateSpec, default_dim, make_state
from .phase_space import default_grid, negativity_volume, wigner

__all__ = [
    "SweepConfig",
    "SweepResult",
    "run_sweep",
    "export_csv",
    "export_json",
    "import_json",
    "CSV_HEADER",
    "PRESETS",
]

CSV_HEADER = "family,param,mean_photon,epsilon,measurement,value,dim,status"

# half-width of the exponent finite-difference step in log10 photon number
EXPONENT_DEX = 0.05
# grid points per axis for Wigner-negativity cells
NEGATIVITY_POINTS = 201


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition: states x absorbances x measurements.

    ``measurements`` entries are "qfi", "photon_number", "quadrature:<theta>",
    "negativity", or "exponent:<measurement>" for the local log-log scaling
    exponent of the named classical measurement.  ``dim_policy`` is "auto"
    (basis sized per state and measurement) or a fixed integer dimension.
    """

    families: tuple = ()
    epsilons: tuple = ()
    measurements: tuple = ()
    dim_policy: object = "auto"
    tail_tol: float = 1e-6
    cutoff: float = DEFAULT_CUTOFF
    preset: str | None = None

    def __post_init__(self):
        if not self.families or not self.epsilons or not self.measurements:
            raise ConfigError("sweep grid must have states, absorbances and measurements")
        for spec in self.families:
            if not isinstance(spec, StateSpec):
                raise ConfigError(f"family entries must be StateSpec, got {type(spec).__name__}")
        for eps in self.epsilons:
            if eps < 0:
                raise ConfigError(f"absorbance must be nonnegative, got {eps}")
        for m in self.measurements:
            _parse_measurement(m)
        if self.dim_policy != "auto" and not isinstance(self.dim_policy, int):
            raise ConfigError("dim_policy must be 'auto' or an integer dimension")

    def canonical(self) -> dict:
        return {
            "families": [spec.to_record() for spec in self.families],
            "epsilons": [float(e) for e in self.epsilons],
            "measurements": list(self.measurements),
            "dim_policy": self.dim_policy,
            "tail_tol": self.tail_tol,
            "cutoff": self.cutoff,
            "preset": self.preset,
        }

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class SweepResult:
    records: list
    provenance: dict = field(default_factory=dict)


def log_grid(lo: float, hi: float, points: int) -> tuple:
    """Log-spaced grid; endpoints must be positive."""
    if lo <= 0 or hi <= 0:
        raise ConfigError(f"log grid endpoints must be positive, got [{lo}, {hi}]")
    if points < 2:
        raise ConfigError("log grid needs at least 2 points")
    return tuple(np.geomspace(lo, hi, points))


def _spec_at_mean_photon(template: StateSpec, nbar: float) -> StateSpec:
    if template.family == "coherent":
        return StateSpec.coherent(math.sqrt(nbar))
    if template.family == "squeezed_vacuum":
        return StateSpec.squeezed(math.asinh(math.sqrt(nbar)), template.phi)
    raise ConfigError(f"cannot sweep mean photon number for family {template.family!r}")


def _family_row(template: StateSpec, nbar_grid) -> tuple:
    return tuple(_spec_at_mean_photon(template, n) for n in nbar_grid)


def _parse_measurement(name: str):
    """Return (kind, payload); raise ConfigError for unknown names."""
    if name in ("qfi", "photon_number", "negativity"):
        return name, None
    if name.startswith("quadrature:"):
        try:
            return "quadrature", float(name.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad quadrature angle in measurement {name!r}")
    if name.startswith("exponent:"):
        inner = name.split(":", 1)[1]
        kind, payload = _parse_measurement(inner)
        if kind not in ("photon_number", "quadrature"):
            raise ConfigError(f"exponent measurement must wrap a classical one, got {name!r}")
        return "exponent", (kind, payload)
    raise ConfigError(f"unknown measurement {name!r}")


def preset_config(
    name: str,
    n_points: int = 13,
    eps_points: int = 17,
    heatmap_points: int = 25,
    nbar_max: float = 50.0,
) -> SweepConfig:
    """Build one of the named figure grids.

    Point counts and the top of the photon-number range are overridable so
    tests and quick looks can run coarse versions of the same grid.
    """
    r1 = 1.0
    nbar_r1 = math.sinh(r1) ** 2
    if name == "fig2":
        nbar = log_grid(0.5, nbar_max, n_points)
        return SweepConfig(
            families=_family_row(StateSpec.coherent(1.0), nbar)
            + _family_row(StateSpec.squeezed(1.0), nbar),
            epsilons=(1e-6,),
            measurements=("photon_number", "quadrature:0"),
            preset=name,
        )
    if name == "fig3":
        return SweepConfig(
            families=(StateSpec.squeezed(1.0), StateSpec.squeezed(1.5)),
            epsilons=log_grid(1e-4, 10.0, eps_points),
            measurements=("quadrature:0", f"quadrature:{math.pi / 2}", "negativity"),
            preset=name,
        )
    if name == "fig4":
        nbar = log_grid(0.5, nbar_max, heatmap_points)
        return SweepConfig(
            families=_family_row(StateSpec.squeezed(1.0), nbar)
            + _family_row(StateSpec.coherent(1.0), nbar),
            epsilons=log_grid(1e-6, 1.0, heatmap_points),
            measurements=("exponent:quadrature:0",),
            preset=name,
        )
    if name == "fig5":
        return SweepConfig(
            families=(StateSpec.squeezed(r1), StateSpec.coherent(math.sqrt(nbar_r1))),
            epsilons=log_grid(1e-4, 10.0, eps_points),
            measurements=("qfi", "photon_number"),
            preset=name,
        )
    if name == "appendix_qfi":
        nbar = log_grid(0.5, nbar_max, heatmap_points)
        return SweepConfig(
            families=_family_row(StateSpec.squeezed(1.0), nbar)
            + _family_row(StateSpec.coherent(1.0), nbar),
            epsilons=log_grid(1e-6, 1.0, heatmap_points),
            measurements=("quadrature:0",),
            preset=name,
        )
    raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")


PRESETS = ("fig2", "fig3", "fig4", "fig5", "appendix_qfi")


def _cell_dim(config: SweepConfig, spec: StateSpec, kind: str) -> int:
    if isinstance(config.dim_policy, int):
        return config.dim_policy
    if kind in ("photon_number", "quadrature", "exponent"):
        return cfi_dim(spec, config.tail_tol)
    return default_dim(spec, config.tail_tol)


def _classical_value(rho, gen, kind, payload) -> float:
    if kind == "photon_number":
        return cfi_photon_number(rho, gen)
    return cfi_quadrature(rho, gen, payload)


# per-level amplitude below which evolved Fock levels are dropped mid-series
CROP_FLOOR = 1e-16


def _crop(rho, gen):
    """Shrink the basis to the levels the evolved state still occupies.

    Two-photon loss empties high Fock levels irreversibly, so large-absorbance
    steps can run on a much smaller basis without measurable error.
    """
    mass = np.abs(rho.elements).max(axis=1)
    live = np.nonzero(mass > CROP_FLOOR * mass.max())[0]
    top = int(live[-1]) + 3 if len(live) else 8
    d_new = min(rho.basis.dim, max(16, ((top + 15) // 16) * 16))
    if d_new >= rho.basis.dim:
        return rho, gen
    basis = FockBasisConfig(d_new, rho.basis.tail_tol)
    cropped = DensityMatrix(basis, np.ascontiguousarray(rho.elements[:d_new, :d_new]))
    return cropped, LossGenerator(gen.kind, basis)


def _step_to(rho, gen, delta):
    """Advance the absorbance by ``delta`` with Krylov substeps.

    Each substep keeps the exponentiated norm moderate; cropping afterwards
    shrinks the live basis, so the substep size grows geometrically and the
    whole walk stays cheap even for deep absorbances on large bases.
    """
    remaining = float(delta)
    while remaining > 0:
        limit = max(200.0, gen.basis.dim / 2.0) / max(gen.max_rate, 1.0)
        step = min(remaining, limit)
        rho = propagate(gen, rho, step)
        remaining -= step
        rho, gen = _crop(rho, gen)
    return rho, gen


def _evolve_series(spec, epsilons, dim, tail_tol, evaluate):
    """Walk the sorted absorbance list with semigroup stepping.

    ``evaluate(rho, gen, eps)`` -> (value, diagnostics).  Once a step fails
    its truncation gate, the remaining cells inherit the failure tag.
    """
    basis = FockBasisConfig(dim, tail_tol)
    gen = LossGenerator("tpa", basis)
    order = sorted(range(len(epsilons)), key=lambda i: epsilons[i])
    out = [None] * len(epsilons)
    reached = 0.0
    failed = None
    try:
        rho = make_state(spec, basis)
    except TruncationError:
        failed = "truncation_error"
        rho = None
    for i in order:
        eps = float(epsilons[i])
        if failed is None:
            try:
                rho, gen = _step_to(rho, gen, eps - reached)
                reached = eps
                value, diag = evaluate(rho, gen, eps)
                out[i] = FisherRecord(spec, eps, "", value, gen.basis.dim, diag)
                continue
            except TruncationError:
                failed = "truncation_error"
            except EngineError as exc:
                failed = f"error:{type(exc).__name__}"
        out[i] = FisherRecord(spec, eps, "", 0.0, dim, {}, status=failed)
    return out


def _run_task(config: SweepConfig, spec: StateSpec, measurement: str):
    kind, payload = _parse_measurement(measurement)
    dim = _cell_dim(config, spec, kind)

    if kind == "qfi":
        records = []
        for eps in config.epsilons:
            try:
                rec = qfi_tpa(spec, eps, cutoff=config.cutoff, dim=dim, tail_tol=config.tail_tol)
                records.append(rec)
            except TruncationError:
                records.append(
                    FisherRecord(spec, float(eps), "qfi", 0.0, dim, {}, status="truncation_error")
                )
        return [FisherRecord(r.spec, r.epsilon, measurement, r.value, r.dim, r.diagnostics, r.status) for r in records]

    if kind in ("photon_number", "quadrature"):

        def evaluate(rho, gen, eps):
            return _classical_value(rho, gen, kind, payload), {}

        records = _evolve_series(spec, config.epsilons, dim, config.tail_tol, evaluate)

    elif kind == "negativity":

        def evaluate(rho, gen, eps):
            grid = default_grid(spec.mean_photon(), points=NEGATIVITY_POINTS)
            return negativity_volume(wigner(rho, grid, grid)), {}

        records = _evolve_series(spec, config.epsilons, dim, config.tail_tol, evaluate)

    elif kind == "exponent":
        inner_kind, inner_payload = payload
        nbar = spec.mean_photon()
        lo = _spec_at_mean_photon(spec, nbar * 10.0**-EXPONENT_DEX)
        hi = _spec_at_mean_photon(spec, nbar * 10.0**EXPONENT_DEX)
        dim_pair = max(_cell_dim(config, hi, inner_kind), dim)

        def make_eval():
            def evaluate(rho, gen, eps):
                return _classical_value(rho, gen, inner_kind, inner_payload), {}

            return evaluate

        lo_recs = _evolve_series(lo, config.epsilons, dim_pair, config.tail_tol, make_eval())
        hi_recs = _evolve_series(hi, config.epsilons, dim_pair, config.tail_tol, make_eval())
        records = []
        dln = (math.log(hi.mean_photon()) - math.log(lo.mean_photon()))
        for a, b, eps in zip(lo_recs, hi_recs, config.epsilons):
            if a.status != "ok" or b.status != "ok" or a.value <= 0 or b.value <= 0:
                status = a.status if a.status != "ok" else (b.status if b.status != "ok" else "error:ZeroSignal")
                records.append(FisherRecord(spec, float(eps), "", 0.0, dim_pair, {}, status=status))
            else:
                gamma = (math.log(b.value) - math.log(a.value)) / dln
                records.append(FisherRecord(spec, float(eps), "", gamma, dim_pair, {}))
    else:  # pragma: no cover - _parse_measurement already rejects these
        raise ConfigError(f"unknown measurement kind {kind!r}")

    return [
        FisherRecord(r.spec, r.epsilon, measurement, r.value, r.dim, r.diagnostics, r.status)
        for r in records
    ]


def _max_workers() -> int:
    env = os.environ.get("TPA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"TPA_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def run_sweep(config: SweepConfig) -> SweepResult:
    """Evaluate every grid cell; failures are tagged in-band, never dropped."""
    tasks = [(spec, m) for spec in config.families for m in config.measurements]
    workers = min(_max_workers(), len(tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda t: _run_task(config, *t), tasks))
    else:
        chunks = [_run_task(config, *t) for t in tasks]
    fam_index = {id(spec): i for i, spec in enumerate(config.families)}
    meas_index = {m: i for i, m in enumerate(config.measurements)}
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(
        key=lambda r: (fam_index.get(id(r.spec), 0), r.spec.param, r.epsilon, meas_index[r.measurement])
    )
    provenance = {
        "config_hash": config.digest(),
        "engine_version": __version__,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    return SweepResult(records=records, provenance=provenance)


def _record_row(rec: FisherRecord) -> dict:
    return {
        "family": rec.spec.family,
        "param": rec.spec.param,
        "mean_photon": rec.mean_photon,
        "epsilon": rec.epsilon,
        "measurement": rec.measurement,
        "value": rec.value,
        "dim": rec.dim,
        "status": rec.status,
    }


def export_csv(result: SweepResult, path: str) -> None:
    """Write records under the fixed header; floats keep full precision."""
    if not result.records:
        raise ConfigError("refusing to export an empty sweep result")
    cols = CSV_HEADER.split(",")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for rec in result.records:
            row = _record_row(rec)
            writer.writerow(
                [row[c] if c in ("family", "measurement", "status", "dim") else repr(float(row[c])) for c in cols]
            )


def export_json(result: SweepResult, path: str) -> None:
    if not result.records:
        raise ConfigError("refusing to export an empty sweep result")
    payload = {
        "provenance": result.provenance,
        "records": [
            dict(_record_row(rec), diagnostics=rec.diagnostics) for rec in result.records
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def import_json(path: str) -> SweepResult:
    """Rebuild a SweepResult from a JSON export; re-export is byte-identical."""
    with open(path) as fh:
        payload = json.load(fh)
    records = []
    for row in payload["records"]:
        spec = _spec_from_row(row)
        records.append(
            FisherRecord(
                spec=spec,
                epsilon=row["epsilon"],
                measurement=row["measurement"],
                value=row["value"],
                dim=row["dim"],
                diagnostics=row.get("diagnostics", {}),
                status=row["status"],
            )
        )
    return SweepResult(records=records, provenance=payload.get("provenance", {}))


def _spec_from_row(row: dict) -> StateSpec:
    family, param = row["family"], row["param"]
    if family == "coherent":
        return StateSpec.coherent(param)
    if family == "squeezed_vacuum":
        return StateSpec.squeezed(param)
    if family == "fock":
        return StateSpec.fock(int(param))
    raise ConfigError(f"unknown family {family!r} in record")
