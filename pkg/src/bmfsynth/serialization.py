from __future__ import annotations

import json
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from .partition import Partition
from .qor import QorReport


def _normalize(obj: Any) -> Any:
    if is_dataclass(obj) and not isinstance(obj, type):
        return {key: _normalize(value) for key, value in asdict(obj).items()}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (list, tuple)):
        return [_normalize(item) for item in obj]
    if isinstance(obj, dict):
        return {str(key): _normalize(value) for key, value in obj.items()}
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and obj != obj:
        return None
    return obj


def partition_report(partition: Partition) -> List[Dict[str, Any]]:
    return [
        {
            "id": sub.id,
            "node_count": len(sub.nodes),
            "inputs": sub.num_inputs,
            "outputs": sub.num_outputs,
            "input_nets": list(sub.boundary_inputs),
            "output_nets": list(sub.boundary_outputs),
        }
        for sub in partition.subcircuits
    ]


def qor_report_to_dict(report: QorReport) -> Dict[str, Any]:
    return _normalize(report.to_dict())


def dump_json(data: Any, output_path: Path) -> None:
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(json.dumps(_normalize(data), indent=2), encoding="utf-8")


def load_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))
