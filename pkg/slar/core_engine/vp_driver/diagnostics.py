"""Time-step selection and conserved-quantity diagnostics"""

import logging
from typing import List, Optional

import numpy as np

from ...config.settings import settings
from ..field_solve.poisson import FieldSet
from ..ht_core.ht_tensor import HTTensor, ht_entries
from ..ht_core.indexing import delinearize
from ..ht_core.operations import ht_contract_all
from ..ht_core.truncation import ht_norm
from ..sl_advect.grid import VlasovLayout
from .state import DiagnosticsRecord

logger = logging.getLogger(__name__)


def mean_field_magnitude(component: HTTensor) -> float:
    """Frobenius mean ||E|| / sqrt(#points), the surrogate for max |E|"""
    return ht_norm(component) / float(np.sqrt(np.prod(component.shape, dtype=np.float64)))


def compute_dt(fields: FieldSet, layout: VlasovLayout, cfl: Optional[float] = None,
               dt_floor: Optional[float] = None) -> float:
    """dt = CFL / (sum v_max / dx + sum E_mean / dv)"""
    config = settings.get_time_integration_config()
    cfl = float(cfl if cfl is not None else config.get("cfl", 5.0))
    dt_floor = float(dt_floor if dt_floor is not None else config.get("dt_floor", 1e-6))

    dx, dv, v_max = layout.spatial_spacing, layout.velocity_spacing, layout.v_max
    denominator = float(np.sum(v_max / dx))
    for j, component in enumerate(fields.E):
        denominator += mean_field_magnitude(component) / dv[j]
    dt = cfl / denominator
    if dt < dt_floor:
        logger.warning(f"Time step {dt:.3e} below floor, using {dt_floor:.3e}")
        dt = dt_floor
    return dt


def _moment_weights(f: HTTensor, layout: VlasovLayout) -> List[np.ndarray]:
    grid = layout.grid
    return [np.full(f.shape[mode], grid.spacing[mode]) for mode in range(f.d)]


def electric_energy(fields: FieldSet, layout: VlasovLayout) -> float:
    cell = float(np.prod(layout.spatial_spacing))
    return 0.5 * sum(ht_norm(e) ** 2 for e in fields.E) * cell


def sample_min_entry(f: HTTensor, samples: Optional[int] = None, seed: Optional[int] = None,
                     step: int = 0) -> float:
    """Smallest real entry over a seeded random sample, or over all entries of small tensors"""
    samples = int(samples if samples is not None else settings.get("diagnostics.min_entry_samples", 4096))
    seed = int(seed if seed is not None else settings.get("diagnostics.min_entry_seed", 7))
    total = int(np.prod(f.shape, dtype=np.float64))
    if total <= samples:
        linear = np.arange(total)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(step,)))
        linear = rng.choice(total, size=samples, replace=False)
    return float(np.min(ht_entries(f, delinearize(f.shape, linear)).real))


def compute_diagnostics(f: HTTensor, fields: FieldSet, layout: VlasovLayout, step: int = 0,
                        time: float = 0.0, dt: float = 0.0, accessor_evals: int = 0,
                        clamped_feet: int = 0) -> DiagnosticsRecord:
    """Midpoint moments of f plus field energy and storage statistics"""
    weights = _moment_weights(f, layout)
    mass = ht_contract_all(f, weights).real

    momentum, kinetic = [], 0.0
    for mode in layout.velocity_modes:
        v = layout.grid.centers(mode)
        w = list(weights)
        w[mode] = weights[mode] * v
        momentum.append(ht_contract_all(f, w).real)
        w[mode] = weights[mode] * 0.5 * v ** 2
        kinetic += ht_contract_all(f, w).real

    return DiagnosticsRecord(
        step=step,
        time=time,
        dt=dt,
        electric_energy=electric_energy(fields, layout),
        mass=float(mass),
        momentum=tuple(float(p) for p in momentum),
        kinetic_energy=float(kinetic),
        compression_ratio=f.compression_ratio(),
        ranks=f.ranks(),
        max_rank=f.max_rank(),
        max_interior_rank=f.max_interior_rank(),
        accessor_evals=int(accessor_evals),
        min_entry=sample_min_entry(f, step=step),
        clamped_feet=int(clamped_feet),
    )
