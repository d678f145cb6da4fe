import math
import unittest

from topols.app.embed.routing import (
    Region,
    apply_route,
    attach_leaf,
    endpoint_blues,
    free_sides,
    leaf_kind_for,
    plan_route,
    turn,
)
from topols.app.pipe import Color, CubeKind, PipeDiagram, validate_pipe_diagram
from topols.app.zx import NodeKind


def single_cube(position=(0, 0, 1), orientation="x", color=Color.BLUE):
    p = PipeDiagram()
    cube = p.add_cube(position, CubeKind.STANDARD, orientation, color)
    return p, cube.id


class TestTurns(unittest.TestCase):
    def test_straight(self):
        self.assertEqual(turn("z", "z", "x"), ("x", Color.BLUE, "x"))

    def test_corner_keeps_blue_orientation(self):
        self.assertEqual(turn("z", "x", "y"), ("y", Color.BLUE, "y"))

    def test_corner_swaps_to_red(self):
        self.assertEqual(turn("z", "x", "x"), ("y", Color.RED, "z"))

    def test_endpoint_blues(self):
        p, blue = single_cube()
        red = p.add_cube((2, 0, 1), CubeKind.STANDARD, "x", Color.RED).id

        self.assertEqual(endpoint_blues(p, blue, "z"), ["x"])
        self.assertEqual(endpoint_blues(p, blue, "x"), [])
        self.assertEqual(endpoint_blues(p, red, "y"), ["z"])


class TestPlanRoute(unittest.TestCase):
    def test_straight_route(self):
        p, source = single_cube()
        region = Region(3, 3, 1, 5)

        route = plan_route(p, source, (0, 0, 4), None, region)
        self.assertIsNotNone(route)
        self.assertEqual(route.length, 3)
        self.assertEqual(route.cells, ((0, 0, 2), (0, 0, 3)))

        target = apply_route(p, route)
        self.assertEqual(p.cubes[target].position, (0, 0, 4))
        self.assertEqual(validate_pipe_diagram(p, partial=True), [])

    def test_colour_change_through_corners(self):
        p, source = single_cube()
        region = Region(3, 3, 1, 6)

        # The target only accepts a y-blue pipe from below; straight up carries x
        route = plan_route(p, source, (0, 0, 4), lambda axis: ["y"] if axis == "z" else [], region)
        self.assertIsNotNone(route)
        self.assertGreater(route.length, 3)
        self.assertEqual(route.blues[-1], "y")

        target = apply_route(p, route)
        self.assertEqual(p.cubes[target].orientation, "y")
        self.assertEqual(validate_pipe_diagram(p, partial=True), [])

    def test_unreachable_target(self):
        p, source = single_cube()
        self.assertIsNone(plan_route(p, source, (0, 0, 4), None, Region(3, 3, 1, 2)))

    def test_reserved_cells_avoided(self):
        p, source = single_cube()
        region = Region(3, 3, 1, 4, frozenset({(0, 0, 2)}))

        route = plan_route(p, source, (0, 0, 3), None, region)
        self.assertIsNotNone(route)
        self.assertNotIn((0, 0, 2), route.cells)

    def test_existing_target(self):
        p, source = single_cube()
        target = p.add_cube((0, 0, 2), CubeKind.STANDARD, "x", Color.BLUE).id

        route = plan_route(p, source, (0, 0, 2), lambda axis: endpoint_blues(p, target, axis),
                           Region(3, 3, 1, 3), target_id=target)
        self.assertEqual(route.length, 1)
        apply_route(p, route)
        self.assertTrue(p.has_pipe(source, target))

    def test_boundary_target(self):
        p, source = single_cube()
        route = plan_route(p, source, (0, 0, 2), None, Region(3, 3, 1, 2))

        target = apply_route(p, route, CubeKind.BOUNDARY)
        self.assertEqual(p.cubes[target].kind, CubeKind.BOUNDARY)


class TestLeaves(unittest.TestCase):
    def test_leaf_kind(self):
        self.assertEqual(leaf_kind_for(math.pi / 2), CubeKind.YCAP)
        self.assertEqual(leaf_kind_for(-3 * math.pi / 2), CubeKind.YCAP)
        self.assertEqual(leaf_kind_for(math.pi / 4), CubeKind.INJECTION)

    def test_z_leaf(self):
        p, junction = single_cube((1, 1, 1), "z")
        self.assertTrue(attach_leaf(p, junction, NodeKind.Z, math.pi / 4, Region(3, 3, 1, 2)))

        port = p.cube_at((2, 1, 1))
        self.assertEqual(port.kind, CubeKind.INJECTION)
        self.assertAlmostEqual(port.angle, math.pi / 4)
        self.assertEqual(validate_pipe_diagram(p, partial=True), [])

    def test_x_leaf_goes_through_hadamard(self):
        p, junction = single_cube((1, 1, 1), "z")
        self.assertTrue(attach_leaf(p, junction, NodeKind.X, math.pi / 2, Region(3, 3, 1, 2)))

        self.assertEqual(p.cube_at((2, 1, 1)).kind, CubeKind.HADAMARD)
        self.assertEqual(p.cube_at((3, 1, 1)).kind, CubeKind.YCAP)
        self.assertEqual(validate_pipe_diagram(p, partial=True), [])

    def test_no_room(self):
        p, junction = single_cube((0, 0, 1), "z")

        self.assertFalse(attach_leaf(p, junction, NodeKind.Z, math.pi / 4, Region(0, 0, 1, 1)))
        self.assertEqual(len(p.cubes), 1)

    def test_free_sides(self):
        p, junction = single_cube((1, 1, 1), "z")
        region = Region(3, 3, 1, 2)

        self.assertEqual(free_sides(p, junction, region), 4)
        p.add_cube((0, 1, 1), CubeKind.STANDARD, "z", Color.BLUE)
        self.assertEqual(free_sides(p, junction, region), 3)


if __name__ == "__main__":
    unittest.main()
