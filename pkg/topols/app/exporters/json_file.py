import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from ..pipe import PipeDiagram
from .base import DiagramExporter, PathLike

logger = logging.getLogger(__name__)


class JsonDiagramExporter(DiagramExporter):
    """Pipe diagram as JSON: cubes, pipes, port lists and volume metadata."""

    suffix = ".json"

    def __init__(self, indent: Optional[int] = 2, extra: Optional[Dict[str, Any]] = None):
        self.indent = indent
        self.extra = extra or {}

    def export(self, diagram: PipeDiagram, path: PathLike) -> Path:
        path = Path(path)
        data = diagram.to_dict()
        if self.extra:
            data["meta"].update(self.extra)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(data, f, indent=self.indent, sort_keys=False)
            f.write("\n")
        logger.info(f"Wrote {diagram!r} to {path}")
        return path


def load_diagram(path: PathLike) -> PipeDiagram:
    with open(path) as f:
        data = json.load(f)
    try:
        return PipeDiagram.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path} is not a pipe diagram: missing or malformed {exc}") from exc
