import csv
import json
from pathlib import Path
from typing import Iterable

import numpy as np
from loguru import logger
from more_itertools import chunked

from erdlab.utils.record import Record, encode_cell


class ReportWriter:
    """Writes record streams, dense matrices and JSON blobs under one output directory."""

    bulk_size = 10000

    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_records(
        self,
        record_class: type[Record],
        records: Iterable[Record],
        name: str | None = None,
    ) -> Path:
        path = self.path(name or f"{record_class.type}.csv")
        count = 0
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(record_class.columns)
            for batch in chunked(records, self.bulk_size):
                for record in batch:
                    if not isinstance(record, record_class):
                        raise ValueError(
                            f"Expected {record_class.__name__} rows in {path.name}, got {type(record).__name__}"
                        )
                writer.writerows(record.as_row() for record in batch)
                count += len(batch)
                logger.debug(f"Batch written to {path.name} ({count} rows)")

        logger.info(f"Wrote {count} rows to {path}")
        return self._register(path)

    def write_matrix(self, name: str, matrix: np.ndarray) -> Path:
        path = self.path(name)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            for row in np.asarray(matrix, dtype=np.float64):
                writer.writerow(encode_cell(value) for value in row)

        logger.info(f"Wrote {matrix.shape[0]}x{matrix.shape[1]} matrix to {path}")
        return self._register(path)

    def write_json(self, name: str, payload: dict) -> Path:
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")

        logger.info(f"Wrote {path}")
        return self._register(path)

    def register(self, path: str | Path) -> Path:
        return self._register(Path(path))

    def _register(self, path: Path) -> Path:
        if path not in self.written:
            self.written.append(path)
        return path


def read_records(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))
