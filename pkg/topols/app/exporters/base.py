from abc import ABC, abstractmethod
from pathlib import Path
from typing import Union

from ..pipe import PipeDiagram

PathLike = Union[str, Path]


class DiagramExporter(ABC):
    #: file suffix written by default
    suffix = ""

    @abstractmethod
    def export(self, diagram: PipeDiagram, path: PathLike) -> Path:
        """Write the diagram to path and return the path written."""
        pass

    def default_path(self, stem: PathLike) -> Path:
        return Path(stem).with_suffix(self.suffix)
