import json
import os
import tempfile
import unittest

from topols.app.exporters import JsonDiagramExporter, ObjMeshExporter, load_diagram
from topols.app.exporters.mesh import box_corners, material_for
from topols.app.pipe import Color, CubeKind, canonical_cnot


class TestJsonExporter(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.pipe = canonical_cnot()

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_export_and_load(self):
        path = os.path.join(self.temp_dir.name, "nested", "cnot.json")
        written = JsonDiagramExporter().export(self.pipe, path)

        self.assertTrue(written.exists())
        self.assertEqual(load_diagram(written), self.pipe)

    def test_extra_metadata(self):
        path = os.path.join(self.temp_dir.name, "cnot.json")
        JsonDiagramExporter(extra={"circuit": "cnot"}).export(self.pipe, path)

        with open(path) as f:
            data = json.load(f)
        self.assertEqual(data["meta"], {"volume": 8, "time_steps": 2, "circuit": "cnot"})

    def test_load_rejects_other_json(self):
        path = os.path.join(self.temp_dir.name, "other.json")
        with open(path, "w") as f:
            json.dump({"cubes": []}, f)
        with self.assertRaises(ValueError):
            load_diagram(path)

    def test_default_path(self):
        self.assertEqual(JsonDiagramExporter().default_path("out/ghz").name, "ghz.json")


class TestObjExporter(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_mesh_contents(self):
        pipe = canonical_cnot()
        path = ObjMeshExporter().export(pipe, os.path.join(self.temp_dir.name, "cnot.obj"))

        with open(path) as f:
            lines = f.read().splitlines()
        boxes = len(pipe.cubes) + len(pipe.pipes)
        self.assertEqual(lines[0], "mtllib cnot.mtl")
        self.assertEqual(sum(1 for line in lines if line.startswith("o ")), boxes)
        self.assertEqual(sum(1 for line in lines if line.startswith("v ")), 8 * boxes)
        self.assertEqual(sum(1 for line in lines if line.startswith("f ")), 6 * boxes)

        with open(path.with_suffix(".mtl")) as f:
            self.assertIn("newmtl standard_red", f.read())

    def test_materials(self):
        self.assertEqual(material_for(CubeKind.STANDARD, Color.BLUE), "standard_blue")
        self.assertEqual(material_for(CubeKind.STANDARD, Color.RED), "standard_red")
        self.assertEqual(material_for(CubeKind.INJECTION, None), "injection")

    def test_box_corners(self):
        corners = box_corners((0, 0, 0), (1, 2, 3))
        self.assertEqual(len(corners), 8)
        self.assertEqual(corners[0], (0, 0, 0))
        self.assertEqual(corners[-1], (1, 2, 3))

    def test_invalid_sizes(self):
        with self.assertRaises(ValueError):
            ObjMeshExporter(cube_size=0.5, pipe_width=0.6)


if __name__ == "__main__":
    unittest.main()
