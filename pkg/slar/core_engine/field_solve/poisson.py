"""Spectral Poisson solver in HT format: density, potential and electric field"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ...config.settings import settings
from ..cross_approx.accessor import FunctionAccessor
from ..cross_approx.htaca import HTACAStats, htaca
from ..cross_approx.params import AcaParams
from ..errors import NonFiniteValueError
from ..ht_core.ht_tensor import HTTensor, ht_constant, ht_entries, ht_entry, ht_rank_one
from ..ht_core.operations import contract_mode, ht_add, ht_contract_all, ht_scale, ht_sub, map_leaf, squeeze
from ..ht_core.truncation import ht_norm, ht_truncate
from ..sl_advect.grid import VlasovLayout
from .spectral import DftDirection, SpectralGrid, dft_leaves, spectral_derivative

logger = logging.getLogger(__name__)

DENSITY_TRUNCATION = 1e-14


@dataclass
class FieldSet:
    """Potential spectrum, electric field components and the source density"""
    phi_hat: HTTensor
    E: List[HTTensor]
    rho: HTTensor
    rho0: complex = 0.0
    stats: HTACAStats = field(default_factory=HTACAStats)

    @property
    def d_x(self) -> int:
        return len(self.E)


def velocity_integral(f: HTTensor, layout: VlasovLayout) -> HTTensor:
    """Midpoint rule over every velocity mode; result lives on the spatial modes"""
    dv = layout.velocity_spacing
    g = f
    for j, mode in enumerate(layout.velocity_modes):
        g = contract_mode(g, mode, np.full(f.shape[mode], dv[j]))
    return squeeze(g, layout.velocity_modes)


def compute_density(f: HTTensor, layout: VlasovLayout) -> HTTensor:
    """rho = rho0 - int f dv with rho0 the spatial mean of int f dv"""
    rho, _ = density_and_background(f, layout)
    return rho


def density_and_background(f: HTTensor, layout: VlasovLayout) -> Tuple[HTTensor, complex]:
    g = velocity_integral(f, layout)
    rho0 = ht_contract_all(g, [np.full(n, 1.0 / n) for n in g.shape])
    rho = ht_add(ht_constant(g.tree, g.shape, rho0), ht_scale(g, -1.0))
    rho = ht_truncate(rho, DENSITY_TRUNCATION * ht_norm(g))
    return rho, rho0


class PoissonSolver:
    """-Laplace(phi) = rho on a periodic box, E = -grad(phi), all spectrally.

    The frequency-domain potential is compressed by HTACA directly from entry
    access to rho_hat / |k|^2 (no Hadamard product is formed).
    """

    def __init__(self, spectral: SpectralGrid, params: AcaParams, workers: Optional[int] = None,
                 tol_factor: Optional[float] = None, hint_radius: Optional[int] = None):
        self.spectral = spectral
        self.params = params
        self.workers = workers
        config = settings.get("field_solve", {})
        self.tol_factor = float(tol_factor if tol_factor is not None else config.get("poisson_tol_factor", 0.1))
        self.hint_radius = int(hint_radius if hint_radius is not None else config.get("hint_radius", 2))
        self.stats = HTACAStats()

    @property
    def tolerance(self) -> float:
        return self.tol_factor * self.params.eps_base

    def potential_accessor(self, rho_hat: HTTensor) -> FunctionAccessor:
        """Entries of phi_hat; exactly zero at the zero frequency"""
        spectral = self.spectral

        def entries(indices: np.ndarray) -> np.ndarray:
            k2 = spectral.k_squared(indices)
            values = ht_entries(rho_hat, indices)
            out = np.zeros(indices.shape[0], dtype=np.complex128)
            nonzero = k2 > 0
            out[nonzero] = values[nonzero] / k2[nonzero]
            return out

        hints = spectral.low_frequency_indices(self.hint_radius) if self.hint_radius > 0 else None
        return FunctionAccessor(rho_hat.shape, entries, hints)

    def potential_spectrum(self, rho_hat: HTTensor, stream: Sequence[int] = ()) -> HTTensor:
        if rho_hat.d == 1:
            k2 = self.spectral.k_squared(np.arange(rho_hat.shape[0])[:, None])
            inverse = np.zeros_like(k2)
            inverse[k2 > 0] = 1.0 / k2[k2 > 0]
            return map_leaf(rho_hat, 0, lambda frame: inverse[:, None] * frame)

        acc = self.potential_accessor(rho_hat)
        phi_hat = htaca(acc, rho_hat.tree, self.params.with_tolerance(self.tolerance), stream, self.stats)
        zero = np.zeros(rho_hat.d, dtype=np.int64)
        residue = ht_entry(phi_hat, zero)
        if residue != 0:
            units = [np.eye(n, 1)[:, 0] for n in rho_hat.shape]
            phi_hat = ht_sub(phi_hat, ht_rank_one(rho_hat.tree, units, residue))
        return phi_hat

    def field_from_potential(self, phi_hat: HTTensor) -> List[HTTensor]:
        """E_mu = inverse DFT of -i k_mu phi_hat"""
        components = []
        for mu in range(phi_hat.d):
            k = self.spectral.wavenumbers(mu)
            e_hat = map_leaf(phi_hat, mu, lambda frame, k=k: -1j * k[:, None] * frame)
            components.append(dft_leaves(e_hat, DftDirection.inverse, self.workers))
        return components

    def solve(self, rho: HTTensor, stream: Sequence[int] = (), rho0: complex = 0.0) -> FieldSet:
        rho_hat = dft_leaves(rho, DftDirection.forward, self.workers)
        phi_hat = self.potential_spectrum(rho_hat, stream)
        E = self.field_from_potential(phi_hat)
        for mu, component in enumerate(E):
            norm = ht_norm(component)
            if not np.isfinite(norm):
                raise NonFiniteValueError(f"Electric field component {mu} is not finite")
        logger.debug(f"Poisson solve: phi_hat ranks {phi_hat.ranks()}, |E| = "
                     f"{[round(ht_norm(e), 6) for e in E]}")
        return FieldSet(phi_hat=phi_hat, E=E, rho=rho, rho0=rho0)

    def solve_for(self, f: HTTensor, layout: VlasovLayout, stream: Sequence[int] = ()) -> FieldSet:
        """Density from f, then the field"""
        rho, rho0 = density_and_background(f, layout)
        return self.solve(rho, stream, rho0)


def solve_poisson(rho: HTTensor, spectral: SpectralGrid, tol: float, params: AcaParams,
                  stream: Sequence[int] = ()) -> FieldSet:
    """One-shot solve with the potential compressed to relative tolerance tol"""
    solver = PoissonSolver(spectral, params.with_tolerance(tol), tol_factor=1.0)
    return solver.solve(rho, stream)


def gauss_residual(fields: FieldSet, spectral: SpectralGrid) -> float:
    """Relative Frobenius residual of div E - rho"""
    divergence = None
    for mu, component in enumerate(fields.E):
        k = spectral.wavenumbers(mu)
        term = map_leaf(component, mu, lambda frame, k=k: spectral_derivative(frame, k))
        divergence = term if divergence is None else ht_add(divergence, term)
    scale = max(ht_norm(fields.rho), 1e-300)
    return ht_norm(ht_sub(divergence, fields.rho)) / scale
