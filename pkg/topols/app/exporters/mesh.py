"""Wavefront OBJ export: a unit box per cube and a thin prism per pipe."""
import logging
from pathlib import Path
from typing import Dict, List, Tuple

from ..pipe import Color, CubeKind, PipeDiagram
from .base import DiagramExporter, PathLike

logger = logging.getLogger(__name__)

CUBE_SIZE = 0.6
PIPE_WIDTH = 0.3

# Kd colours per material
MATERIALS: Dict[str, Tuple[float, float, float]] = {
    "standard_blue": (0.20, 0.40, 0.90),
    "standard_red": (0.90, 0.25, 0.20),
    "hadamard": (0.95, 0.85, 0.20),
    "ycap": (0.30, 0.80, 0.40),
    "injection": (0.70, 0.30, 0.80),
    "boundary": (0.60, 0.60, 0.60),
    "pipe": (0.80, 0.80, 0.80),
}

# unit box faces over corners numbered by (dx, dy, dz) bits
_FACES = ((1, 3, 4, 2), (5, 6, 8, 7), (1, 2, 6, 5), (3, 7, 8, 4), (1, 5, 7, 3), (2, 4, 8, 6))

Vec = Tuple[float, float, float]


def material_for(kind: CubeKind, color) -> str:
    if kind == CubeKind.STANDARD:
        return "standard_blue" if color == Color.BLUE else "standard_red"
    return {
        CubeKind.HADAMARD: "hadamard",
        CubeKind.YCAP: "ycap",
        CubeKind.INJECTION: "injection",
        CubeKind.BOUNDARY: "boundary",
    }[kind]


def box_corners(low: Vec, high: Vec) -> List[Vec]:
    return [
        (high[0] if dx else low[0], high[1] if dy else low[1], high[2] if dz else low[2])
        for dx in (0, 1) for dy in (0, 1) for dz in (0, 1)
    ]


class ObjMeshExporter(DiagramExporter):
    suffix = ".obj"

    def __init__(self, cube_size: float = CUBE_SIZE, pipe_width: float = PIPE_WIDTH):
        if not 0 < pipe_width <= cube_size <= 1:
            raise ValueError(f"Need 0 < pipe_width <= cube_size <= 1, got {pipe_width} and {cube_size}")
        self.cube_size = cube_size
        self.pipe_width = pipe_width

    def _boxes(self, diagram: PipeDiagram) -> List[Tuple[str, Vec, Vec]]:
        half = self.cube_size / 2
        boxes = []
        for cube_id in sorted(diagram.cubes):
            cube = diagram.cubes[cube_id]
            x, y, z = cube.position
            boxes.append((
                material_for(cube.kind, cube.color),
                (x - half, y - half, z - half),
                (x + half, y + half, z + half),
            ))
        thin = self.pipe_width / 2
        for pipe in diagram.pipes:
            a = diagram.cubes[pipe.a].position
            b = diagram.cubes[pipe.b].position
            low, high = [], []
            for axis in range(3):
                lo, hi = min(a[axis], b[axis]), max(a[axis], b[axis])
                if lo == hi:
                    low.append(lo - thin)
                    high.append(hi + thin)
                else:
                    low.append(lo + half)
                    high.append(hi - half)
            boxes.append(("pipe", tuple(low), tuple(high)))
        return boxes

    def export(self, diagram: PipeDiagram, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        mtl_path = path.with_suffix(".mtl")
        with open(mtl_path, "w") as f:
            for name, (r, g, b) in MATERIALS.items():
                f.write(f"newmtl {name}\nKd {r:.3f} {g:.3f} {b:.3f}\n\n")

        with open(path, "w") as f:
            f.write(f"mtllib {mtl_path.name}\n")
            offset = 0
            for index, (material, low, high) in enumerate(self._boxes(diagram)):
                f.write(f"o box{index}\nusemtl {material}\n")
                for corner in box_corners(low, high):
                    f.write("v {:.4f} {:.4f} {:.4f}\n".format(*corner))
                for face in _FACES:
                    f.write("f " + " ".join(str(offset + i) for i in face) + "\n")
                offset += 8
        logger.info(f"Wrote mesh of {diagram!r} to {path}")
        return path
