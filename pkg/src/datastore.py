#!/usr/bin/env python3
"""
CSV datastore for aggregated experiment results and per-realization records
"""
import logging
from dataclasses import asdict

import pandas as pd

from src.errors import InvalidParameterError

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    'scheme', 'sweep_name', 'sweep_value',
    'mean_rate_bps_hz', 'mean_iul_dbm', 'max_iul_dbm',
    'n_realizations', 'stderr',
]
# Every float column in scientific notation with 13 significant digits
FLOAT_FORMAT = '%.12e'


class ExperimentDatastore:
    def __init__(self, csv_file="experiment_results.csv"):
        self.csv_file = csv_file
        self.headers = list(CSV_COLUMNS)

    def save_rows(self, rows):
        """Write header plus one line per (scheme, sweep point), replacing the file"""
        if not rows:
            raise InvalidParameterError("No result rows to write")
        df = pd.DataFrame([asdict(row) for row in rows], columns=self.headers)
        df.to_csv(self.csv_file, index=False, float_format=FLOAT_FORMAT, na_rep='nan')
        logger.info("Wrote %d rows to %s", len(df), self.csv_file)
        return self.csv_file

    def load_rows(self):
        df = pd.read_csv(self.csv_file, float_precision='round_trip')
        missing = [c for c in self.headers if c not in df.columns]
        if missing:
            raise InvalidParameterError(f"{self.csv_file} is missing columns {missing}")
        return df

    def save_records(self, records):
        """Per-realization records as produced by the experiment runner"""
        records.to_csv(self.csv_file, index=False, float_format=FLOAT_FORMAT, na_rep='nan')
        logger.info("Wrote %d realization records to %s", len(records), self.csv_file)
        return self.csv_file


def emit_csv(rows, path):
    return ExperimentDatastore(path).save_rows(rows)


def load_rows(path):
    return ExperimentDatastore(path).load_rows()
