from .base import DiagramExporter
from .json_file import JsonDiagramExporter, load_diagram
from .mesh import ObjMeshExporter

__all__ = ["DiagramExporter", "JsonDiagramExporter", "ObjMeshExporter", "load_diagram"]
