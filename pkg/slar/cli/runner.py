"""Benchmark runner - time loop with CSV diagnostics and HT checkpoints"""

import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, Optional

import psutil

from ..config.settings import settings
from ..core_engine.data_management.checkpoint_manager import CheckpointManager
from ..core_engine.errors import StepFailure
from ..core_engine.export.diagnostics_exporter import DiagnosticsExporter
from ..core_engine.vp_driver.solver import VlasovPoissonSolver
from ..core_engine.vp_driver.state import SimState
from .models import RunConfig

logger = logging.getLogger(__name__)


def memory_mb() -> float:
    return psutil.Process().memory_info().rss / (1024 * 1024)


class BenchmarkRunner:
    """Runs one configured benchmark to t_final"""

    def __init__(self, config: RunConfig, output_dir: Optional[str] = None):
        self.config = config
        root = output_dir or config.output_dir or str(settings.output_dir() / config.name)
        self.dirs = settings.ensure_directories(Path(root))
        self.layout = config.build_layout()
        self.tree = config.build_tree()
        self.solver = VlasovPoissonSolver(self.layout, config.aca_params(), cfl=config.cfl, threads=config.threads)
        self.exporter = DiagnosticsExporter(str(self.dirs['output']), config.d_v)
        self.checkpoints = CheckpointManager(self.dirs['checkpoints'],
                                             keep=settings.get("benchmark.keep_checkpoints", 3))

    def _checkpoint_metadata(self, state: SimState) -> Dict[str, Any]:
        latest = state.latest
        return {
            'accessor_evals': latest.accessor_evals if latest else 0,
            'clamped_feet': self.solver.clamped_feet,
            'config': self.config.model_dump(mode='json'),
        }

    def _start(self, resume: Optional[str]) -> SimState:
        if resume is None:
            f0 = self.config.initial_condition(self.layout, self.tree)
            state = self.solver.initialize(f0)
            self.exporter.start_diagnostics()
            self.exporter.append_record(state.history[0])
            return state

        f, metadata = self.checkpoints.load(resume)
        state = self.solver.initialize(f, metadata['time'], metadata['step'])
        # counters continue from the checkpoint; the field solve above was already counted there
        self.solver.evaluation_offset = int(metadata.get('accessor_evals', 0)) - self.solver.accessor_evaluations
        self.solver.clamped_feet = int(metadata.get('clamped_feet', 0))
        self.exporter.start_diagnostics(resume_step=int(metadata['step']))
        logger.info(f"Resuming at step {state.step_index}, t={state.t}")
        return state

    def run(self, resume: Optional[str] = None) -> Dict[str, Any]:
        """Time loop; returns a result dict with an exit code instead of raising"""
        cfg = self.config
        started = time.perf_counter()
        logger.info(f"Run {cfg.name}: {cfg.problem.value} {cfg.d_x}D{cfg.d_v}V, shape {self.layout.grid.counts}, "
                    f"memory {memory_mb():.1f} MB")
        try:
            state = self._start(resume)
        except Exception as e:
            logger.error(f"Could not start run {cfg.name}: {e}")
            return {'success': False, 'exit_code': 2, 'error': str(e)}

        eps = 1e-12 * max(1.0, cfg.t_final)
        try:
            while state.t < cfg.t_final - eps:
                dt = min(self.solver.next_dt(state), cfg.t_final - state.t)
                try:
                    self.solver.step(state, dt)
                except Exception as e:
                    raise StepFailure(state.step_index + 1, str(e), e) from e
                record = state.latest
                self.exporter.append_record(record)
                if cfg.checkpoint_interval and record.step % cfg.checkpoint_interval == 0:
                    self.checkpoints.save(state.f, record.step, record.time, self._checkpoint_metadata(state))
        except StepFailure as e:
            logger.error(f"{e}")
            path = self.checkpoints.save(state.f, state.step_index, state.t, self._checkpoint_metadata(state),
                                         reason="failure")
            return {
                'success': False,
                'exit_code': 1,
                'failed_step': e.step_index,
                'error': str(e),
                'checkpoint': str(path) if path else None,
            }

        result = self._summary(state, time.perf_counter() - started)
        logger.info(f"Run {cfg.name} finished: {result['steps']} steps in {result['seconds']:.1f} s, "
                    f"memory {memory_mb():.1f} MB")
        return result

    def _summary(self, state: SimState, seconds: float) -> Dict[str, Any]:
        deviation = state.latest.relative_deviation(state.initial) if state.history else {}
        summary = {
            'success': True,
            'exit_code': 0,
            'name': self.config.name,
            'steps': state.step_index,
            'final_time': state.t,
            'seconds': seconds,
            'diagnostics_path': str(self.exporter.diagnostics_path()),
            'deviation': deviation,
            'htaca': self.solver.stats.to_dict(),
            'checkpoints': self.checkpoints.get_stats(),
        }
        try:
            with open(self.dirs['output'] / "run_summary.json", 'w', encoding='utf-8') as f:
                json.dump(summary, f, indent=2)
        except Exception as e:
            logger.warning(f"Could not write run summary: {e}")
        return summary
