"""Checkpoint Manager - HT checkpoints of running simulations plus a JSON index"""

import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from ..ht_core.ht_tensor import HTTensor
from ..ht_core.serialization import load_ht, save_ht

logger = logging.getLogger(__name__)


class CheckpointManager:
    """Stores step checkpoints as .ht containers and keeps an index of them"""

    def __init__(self, checkpoint_dir: Union[str, Path], keep: Optional[int] = None):
        self.checkpoint_dir = Path(checkpoint_dir)
        self.checkpoint_dir.mkdir(parents=True, exist_ok=True)
        self.keep = keep

        self.index_file = self.checkpoint_dir / "checkpoint_index.json"
        self.index = self.load_index()

    def load_index(self) -> Dict[str, Any]:
        """Load the checkpoint index"""
        if self.index_file.exists():
            try:
                with open(self.index_file, 'r', encoding='utf-8') as f:
                    return json.load(f)
            except Exception as e:
                logger.warning(f"Could not read checkpoint index: {e}")

        return {
            'created': time.time(),
            'latest': None,
            'checkpoints': {}
        }

    def save_index(self):
        try:
            with open(self.index_file, 'w', encoding='utf-8') as f:
                json.dump(self.index, f, indent=2)
        except Exception as e:
            logger.error(f"Could not write checkpoint index: {e}")

    def checkpoint_path(self, step: int) -> Path:
        return self.checkpoint_dir / f"step_{step:06d}.ht"

    def save(self, f: HTTensor, step: int, time_value: float, metadata: Optional[Dict[str, Any]] = None,
             reason: str = "interval") -> Optional[Path]:
        """Write a checkpoint for step; returns its path or None on failure"""
        payload = dict(metadata or {})
        payload.update({'step': int(step), 'time': float(time_value), 'reason': reason})
        try:
            path = save_ht(f, self.checkpoint_path(step), payload)
            name = path.name
            self.index['checkpoints'][name] = {
                'path': str(path),
                'step': int(step),
                'time': float(time_value),
                'reason': reason,
                'saved_at': time.time(),
                'size_bytes': path.stat().st_size,
            }
            self.index['latest'] = name
            self.save_index()
            logger.info(f"Checkpoint written at step {step} ({reason}): {path}")
            if self.keep:
                self.prune(self.keep)
            return path
        except Exception as e:
            logger.error(f"Failed to write checkpoint for step {step}: {e}")
            return None

    def load(self, path: Union[str, Path]) -> Tuple[HTTensor, Dict[str, Any]]:
        """Load a checkpoint; path may be a file or a checkpoint directory (latest entry)"""
        path = Path(path)
        if path.is_dir():
            manager = self if path == self.checkpoint_dir else CheckpointManager(path)
            latest = manager.latest()
            if latest is None:
                raise FileNotFoundError(f"No checkpoints in {path}")
            path = latest
        f, metadata = load_ht(path)
        logger.info(f"Loaded checkpoint {path} (step {metadata.get('step')}, t={metadata.get('time')})")
        return f, metadata

    def latest(self) -> Optional[Path]:
        name = self.index.get('latest')
        if name and name in self.index['checkpoints']:
            path = Path(self.index['checkpoints'][name]['path'])
            if path.exists():
                return path
        existing = sorted(self.checkpoint_dir.glob("step_*.ht"))
        return existing[-1] if existing else None

    def list_checkpoints(self) -> List[Dict[str, Any]]:
        return sorted(self.index['checkpoints'].values(), key=lambda entry: entry['step'])

    def prune(self, keep: int) -> int:
        """Delete all but the newest keep interval checkpoints; failure checkpoints are kept"""
        removable = [e for e in self.list_checkpoints() if e.get('reason') == 'interval']
        removed = 0
        for entry in removable[:-keep] if keep > 0 else removable:
            try:
                Path(entry['path']).unlink(missing_ok=True)
                del self.index['checkpoints'][Path(entry['path']).name]
                removed += 1
            except Exception as e:
                logger.warning(f"Could not remove checkpoint {entry['path']}: {e}")
        if removed:
            self.save_index()
            logger.debug(f"Pruned {removed} checkpoints")
        return removed

    def get_stats(self) -> Dict[str, Any]:
        entries = self.list_checkpoints()
        return {
            'checkpoint_dir': str(self.checkpoint_dir),
            'total_checkpoints': len(entries),
            'total_size_mb': round(sum(e.get('size_bytes', 0) for e in entries) / (1024 * 1024), 3),
            'latest': self.index.get('latest'),
        }
