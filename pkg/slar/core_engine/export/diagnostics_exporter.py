"""Diagnostics Exporter - CSV/JSON output of run diagnostics, slices and convergence tables"""

import csv
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from ..bench.convergence import ConvergenceTable
from ..bench.slicing import SliceResult
from ..vp_driver.state import DiagnosticsRecord, csv_columns

logger = logging.getLogger(__name__)


class DiagnosticsExporter:
    """Writes tidy CSV files for external plotting"""

    def __init__(self, output_dir: str = "runs", d_v: int = 1):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.d_v = d_v
        self.columns = csv_columns(d_v)

    def diagnostics_path(self, filename: str = "diagnostics.csv") -> Path:
        return self.output_dir / filename

    def start_diagnostics(self, filename: str = "diagnostics.csv", resume_step: Optional[int] = None) -> Path:
        """Create the diagnostics CSV with its header, or keep rows up to resume_step"""
        path = self.diagnostics_path(filename)
        kept: List[List[str]] = []
        if resume_step is not None and path.exists():
            with open(path, 'r', newline='', encoding='utf-8') as f:
                reader = csv.reader(f)
                header = next(reader, None)
                if header == self.columns:
                    kept = [row for row in reader if row and int(row[0]) <= resume_step]
                else:
                    logger.warning(f"Diagnostics header mismatch in {path}; starting a new file")

        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f)
            writer.writerow(self.columns)
            writer.writerows(kept)
        return path

    def append_record(self, record: DiagnosticsRecord, filename: str = "diagnostics.csv") -> bool:
        path = self.diagnostics_path(filename)
        try:
            row = record.to_row()
            with open(path, 'a', newline='', encoding='utf-8') as f:
                csv.writer(f).writerow([row[column] for column in self.columns])
            return True
        except Exception as e:
            logger.error(f"Could not append diagnostics for step {record.step}: {e}")
            return False

    def write_records(self, records: Iterable[DiagnosticsRecord], filename: str = "diagnostics.csv") -> Dict[str, Any]:
        """Write a full diagnostics table in one go"""
        records = list(records)
        try:
            path = self.start_diagnostics(filename)
            for record in records:
                if not self.append_record(record, filename):
                    return {'success': False, 'error': f'Failed at step {record.step}'}
            return {
                'success': True,
                'output_path': str(path),
                'row_count': len(records),
            }
        except Exception as e:
            logger.error(f"Diagnostics export failed: {e}")
            return {'success': False, 'error': str(e)}

    def export_slice(self, result: SliceResult, output_filename: Optional[str] = None) -> Dict[str, Any]:
        """Tidy CSV with columns <name_mu>,<name_nu>,f"""
        if not output_filename:
            output_filename = f"slice_{result.names[0]}_{result.names[1]}.csv"
        output_path = self.output_dir / output_filename
        try:
            with open(output_path, 'w', newline='', encoding='utf-8') as f:
                writer = csv.writer(f)
                writer.writerow([result.names[0], result.names[1], 'f'])
                writer.writerows(result.rows())
            logger.info(f"Slice exported: {output_path}")
            return {
                'success': True,
                'output_path': str(output_path),
                'shape': list(result.values.shape),
                'fixed_indices': {str(k): v for k, v in result.fixed_indices.items()},
            }
        except Exception as e:
            logger.error(f"Slice export failed: {e}")
            return {'success': False, 'error': str(e)}

    def export_convergence(self, table: ConvergenceTable, output_filename: Optional[str] = None,
                           metadata: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Convergence table as CSV plus a JSON summary with the fitted order"""
        if not output_filename:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            output_filename = f"convergence_{table.kind}_{timestamp}"
        csv_path = self.output_dir / f"{output_filename}.csv"
        json_path = self.output_dir / f"{output_filename}.json"
        try:
            summary = table.to_dict()
            with open(csv_path, 'w', newline='', encoding='utf-8') as f:
                writer = csv.writer(f)
                writer.writerow(['label', 'scale', 'error', 'order', 'seconds'])
                for level in summary['levels']:
                    order = '' if level['order'] is None else level['order']
                    writer.writerow([level['label'], level['scale'], level['error'], order, level['seconds']])
            with open(json_path, 'w', encoding='utf-8') as f:
                json.dump({'created_at': datetime.now().isoformat(), 'metadata': metadata or {},
                           **summary}, f, indent=2)
            return {
                'success': True,
                'output_path': str(csv_path),
                'summary_path': str(json_path),
                'fitted_order': summary['fitted_order'],
            }
        except Exception as e:
            logger.error(f"Convergence export failed: {e}")
            return {'success': False, 'error': str(e)}
