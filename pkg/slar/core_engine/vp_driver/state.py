"""Simulation state and diagnostics snapshots"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..field_solve.poisson import FieldSet
from ..ht_core.ht_tensor import HTTensor


@dataclass(frozen=True)
class DiagnosticsRecord:
    step: int
    time: float
    dt: float
    electric_energy: float
    mass: float
    momentum: Tuple[float, ...]
    kinetic_energy: float
    compression_ratio: float
    ranks: Dict[int, int]
    max_rank: int
    max_interior_rank: int
    accessor_evals: int
    min_entry: float
    clamped_feet: int = 0

    @property
    def total_energy(self) -> float:
        return self.kinetic_energy + self.electric_energy

    def relative_deviation(self, initial: "DiagnosticsRecord") -> Dict[str, float]:
        """Relative mass/energy drift and absolute momentum drift against an initial record"""

        def rel(now: float, then: float) -> float:
            return abs(now - then) / abs(then) if then != 0 else abs(now - then)

        return {
            'mass': rel(self.mass, initial.mass),
            'total_energy': rel(self.total_energy, initial.total_energy),
            'momentum': max((abs(a - b) for a, b in zip(self.momentum, initial.momentum)), default=0.0),
        }

    def to_row(self) -> Dict[str, Any]:
        """CSV row in the fixed column order"""
        row: Dict[str, Any] = {
            'step': self.step,
            'time': self.time,
            'dt': self.dt,
            'electric_energy': self.electric_energy,
            'mass': self.mass,
        }
        for j, value in enumerate(self.momentum):
            row[f'momentum_{j + 1}'] = value
        row.update({
            'total_energy': self.total_energy,
            'compression_ratio': self.compression_ratio,
            'max_rank': self.max_rank,
            'accessor_evals': self.accessor_evals,
            'min_entry': self.min_entry,
        })
        return row


def csv_columns(d_v: int) -> List[str]:
    return (['step', 'time', 'dt', 'electric_energy', 'mass']
            + [f'momentum_{j + 1}' for j in range(d_v)]
            + ['total_energy', 'compression_ratio', 'max_rank', 'accessor_evals', 'min_entry'])


@dataclass
class SimState:
    """Distribution, field and bookkeeping at time t; owned by a single driver"""
    f: HTTensor
    t: float
    fields: FieldSet
    step_index: int = 0
    history: List[DiagnosticsRecord] = field(default_factory=list)
    last_dt: Optional[float] = None

    @property
    def initial(self) -> Optional[DiagnosticsRecord]:
        return self.history[0] if self.history else None

    @property
    def latest(self) -> Optional[DiagnosticsRecord]:
        return self.history[-1] if self.history else None
