"""
Artifact writers: CSV and JSON files headed by the resolved run configuration.
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

import numpy as np

from inverse_square_oscillator.utils.logger import logger


def format_value(value: Any) -> str:
    """Shortest round-trip text for numbers; str() for everything else."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays into JSON-native values."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def write_csv(path: Path, config: Dict[str, Any], columns: Sequence[str], rows: Iterable[Sequence[Any]],
              blocks: bool = False) -> Path:
    """
    Write a CSV artifact.

    Args:
        path (Path): Target file
        config (dict): Resolved configuration written as '# config: <json>'
        columns (Sequence[str]): Column names
        rows: Row sequences; with blocks=True, an iterable of (label, rows) pairs
            written as '# block: <label>' separated sections
        blocks (bool): Whether rows are grouped into labelled blocks

    Returns:
        Path: The written file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(f"# config: {json.dumps(_plain(config), sort_keys=True)}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        groups = rows if blocks else [(None, rows)]
        for label, group in groups:
            if label is not None:
                f.write(f"# block: {label}\n")
            for row in group:
                writer.writerow([format_value(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def write_json(path: Path, config: Dict[str, Any], payload: Dict[str, Any]) -> Path:
    """Write a JSON artifact with a 'config' member next to the payload."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"config": _plain(config)}
    document.update(_plain(payload))
    with open(path, "w") as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Wrote {path}")
    return path
