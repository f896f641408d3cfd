import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np

from spiralwave import __version__
from spiralwave.core import settings
from spiralwave.utils.serialization import atomic_write, render_csv, render_json, sha256

from .config import RunConfig

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


@dataclass(frozen=True)
class Artifact:
    name: str
    payload: bytes

    @classmethod
    def csv(cls, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> "Artifact":
        return cls(name, render_csv(header, rows))

    @classmethod
    def json(cls, name: str, data: Any) -> "Artifact":
        return cls(name, render_json(data))

    @classmethod
    def columns(cls, name: str, header: Sequence[str], *columns: np.ndarray) -> "Artifact":
        return cls.csv(name, header, zip(*[np.asarray(column).tolist() for column in columns]))


def write_outputs(results: List[Artifact], directory: Union[str, Path], config: RunConfig) -> Dict[str, Any]:
    """
    Write artifacts in name order and finish with manifest.json.

    The manifest lists every file with its sha256 and embeds the run config
    and its hash. The deployment environment is recorded next to the config
    but left out of the hash. There are no timestamps, so identical runs
    produce byte-identical directories.

    Raises:
        OutputError: if a file cannot be written, with its path in the details
        ValueError: on duplicate or reserved artifact names
    """
    names = [artifact.name for artifact in results]
    if len(set(names)) != len(names) or MANIFEST in names:
        raise ValueError("Artifact names must be unique and must not shadow the manifest")

    directory = Path(directory)
    files = []
    for artifact in sorted(results, key=lambda item: item.name):
        atomic_write(directory / artifact.name, artifact.payload)
        files.append({"name": artifact.name, "sha256": sha256(artifact.payload), "bytes": len(artifact.payload)})

    manifest = {
        "command": config.command,
        "config": config.canonical(),
        "config_hash": config.digest(),
        "environment": settings.ENVIRONMENT,
        "files": files,
        "version": __version__,
    }
    atomic_write(directory / MANIFEST, render_json(manifest))
    logger.info(f"Wrote {len(files)} artifacts and {MANIFEST} to {directory}")
    return manifest
