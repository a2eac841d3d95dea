import hashlib
import json
import time
from contextlib import contextmanager
from pathlib import Path

from loguru import logger

from erdlab import __version__


def file_checksum(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


class RunManifest:
    """`manifest.json`: config snapshot, seed, artifact checksums, tool version and timings."""

    filename = "manifest.json"

    def __init__(self, out_dir: str | Path, config: dict, seed: int):
        self.out_dir = Path(out_dir)
        self.path = self.out_dir / self.filename
        self.payload = {
            "tool": "erdlab",
            "version": __version__,
            "seed": seed,
            "config": config,
            "artifacts": {},
            "timings": {},
            "status": "running",
        }

        # Merge with an earlier manifest so separate subcommands share one record
        if self.path.exists():
            with open(self.path, encoding="utf-8") as handle:
                previous = json.load(handle)
            self.payload["artifacts"] = previous.get("artifacts", {})
            self.payload["timings"] = previous.get("timings", {})

    @contextmanager
    def timed(self, stage: str):
        started = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - started
            self.payload["timings"][stage] = round(elapsed, 3)
            logger.info(f"Stage {stage} took {elapsed:.1f}s")

    def add_artifacts(self, paths):
        for path in paths:
            path = Path(path)
            relative = path.relative_to(self.out_dir).as_posix()
            self.payload["artifacts"][relative] = file_checksum(path)

    def save(self, status: str = "complete"):
        self.payload["status"] = status
        self.out_dir.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as handle:
            json.dump(self.payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
        logger.info(f"Manifest saved to {self.path} ({status})")

    def verify(self) -> list[str]:
        """Relative paths whose current checksum differs from the recorded one."""
        mismatched = []
        for relative, checksum in self.payload["artifacts"].items():
            path = self.out_dir / relative
            if not path.exists() or file_checksum(path) != checksum:
                mismatched.append(relative)
        return mismatched
