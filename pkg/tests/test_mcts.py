import math
import unittest

from topols.app.circuit import Circuit, ghz
from topols.app.config import CompileConfig, PartitionConfig
from topols.app.embed.baseline import place_input_ports
from topols.app.embed.mcts import (
    LayerSearch,
    MctsNode,
    embed_layer_mcts,
    layer_order,
    search_layer,
    uct_score,
)
from topols.app.embed.placement import buried, candidate_cells, expand_spider, rollout
from topols.app.embed.state import EmbeddingState
from topols.app.pipe import Color, CubeKind, PipeDiagram, validate_pipe_diagram
from topols.app.schedule import partition_program


def block_state(circuit, config, reserved=frozenset()):
    """First block of a circuit with its input ports placed, nothing embedded yet."""
    block = partition_program(circuit, PartitionConfig(mode="none")).parts[0]
    pipe = PipeDiagram()
    anchors = place_input_ports(pipe, circuit.num_qubits, config)
    placed = {node: anchors[q] for q, node in enumerate(block.diagram.inputs)}
    state = EmbeddingState(block.diagram, pipe, config.grid, config.spacing, 0, placed, reserved)
    return block, state


class TestUct(unittest.TestCase):
    def test_score(self):
        parent = MctsNode(None)
        parent.visits = 4
        child = MctsNode(None, parent, 1)
        child.visits = 2
        child.reward_sum = -10.0

        self.assertAlmostEqual(uct_score(child, math.sqrt(2)), -3.8226, places=3)
        self.assertEqual(uct_score(child, 0.0), -5.0)

    def test_unvisited_first(self):
        parent = MctsNode(None)
        parent.visits = 3
        self.assertEqual(uct_score(MctsNode(None, parent, 1), 1.0), math.inf)

    def test_backpropagate(self):
        root = MctsNode(None)
        child = MctsNode(None, root, 1)
        child.backpropagate(-7.0)
        child.backpropagate(-3.0)

        self.assertEqual((root.visits, root.reward_sum), (2, -10.0))
        self.assertEqual((child.visits, child.reward_sum), (2, -10.0))


class TestExpansion(unittest.TestCase):
    def setUp(self):
        self.config = CompileConfig(grid=(2, 2), iterations=20, timeout_ms=60000, seeds_per_layer=2)

    def test_hadamard_above_its_port(self):
        block, state = block_state(Circuit(1).add("H", 0), self.config)
        (spider,) = block.layer(1)

        children = expand_spider(state, spider, self.config)
        self.assertEqual(len(children), 1)
        cube = children[0].pipe.cube_at((0, 0, 1))
        self.assertEqual(cube.kind, CubeKind.HADAMARD)
        self.assertEqual(children[0].placed[spider], cube.id)
        self.assertEqual(children[0].phi[cube.id], spider)
        # The parent state is untouched
        self.assertNotIn(spider, state.placed)

    def test_placement_opt_widens_candidates(self):
        block, state = block_state(ghz(2), self.config)
        layer_one = block.layer(1)
        _, state = rollout(state, layer_one, self.config)
        (spider,) = block.layer(2)

        above = candidate_cells(state, spider, placement_opt=False)
        around = candidate_cells(state, spider, placement_opt=True)
        self.assertLess(len(above), len(around))
        self.assertEqual(around[:len(above)], above)

    def test_rollout_completes_layer(self):
        block, state = block_state(ghz(2), self.config)
        spiders = block.layer(1)

        reward, completed = rollout(state, spiders, self.config)
        self.assertIsNotNone(completed)
        self.assertEqual(reward, -completed.volume())
        self.assertTrue(all(v in completed.placed for v in spiders))
        self.assertEqual(validate_pipe_diagram(completed.pipe, partial=True), [])

    def test_infeasible_spider(self):
        config = self.config.model_copy(update={"placement_opt": False})
        block, state = block_state(Circuit(1).add("H", 0), config, reserved=frozenset({(0, 0, 1)}))
        spiders = block.layer(1)

        self.assertEqual(expand_spider(state, spiders[0], config), [])
        reward, completed = rollout(state, spiders, config)
        self.assertIsNone(completed)
        self.assertEqual(reward, -math.inf)

    def test_buried_spider(self):
        config = self.config.model_copy(update={"placement_opt": False})
        block, state = block_state(Circuit(1).add("H", 0), config)
        (child,) = expand_spider(state, block.layer(1)[0], config)
        self.assertFalse(buried(child))

        # the Hadamard still owes its output wire; fill every side it could leave through
        for cell in ((1, 0, 1), (0, 1, 1), (0, 0, 2)):
            child.pipe.add_cube(cell, CubeKind.STANDARD, "x", Color.BLUE)
        self.assertTrue(buried(child))


class TestLayerSearch(unittest.TestCase):
    def setUp(self):
        self.config = CompileConfig(grid=(2, 2), iterations=30, timeout_ms=60000, seeds_per_layer=2)

    def test_search_beats_or_matches_rollout(self):
        block, state = block_state(ghz(3), self.config)
        spiders = block.layer(1)

        reward, _ = rollout(state, spiders, self.config)
        best = search_layer(state, spiders, self.config)
        self.assertIsNotNone(best)
        self.assertLessEqual(best.volume(), -reward)

    def test_empty_layer(self):
        _, state = block_state(ghz(2), self.config)
        self.assertIs(search_layer(state, [], self.config), state)

    def test_dead_root(self):
        config = self.config.model_copy(update={"placement_opt": False})
        block, state = block_state(Circuit(1).add("H", 0), config, reserved=frozenset({(0, 0, 1)}))

        search = LayerSearch(state, block.layer(1), config)
        self.assertIsNone(search.run(deadline=math.inf))
        self.assertTrue(search.root.dead)
        self.assertEqual(search.iterations, 1)

    def test_rejected_completion_prunes(self):
        block, state = block_state(Circuit(1).add("H", 0), self.config)
        calls = []

        def reject(done):
            calls.append(done)
            return None

        search = LayerSearch(state, block.layer(1), self.config, finish=reject)
        self.assertIsNone(search.run(deadline=math.inf))
        self.assertTrue(search.root.dead)
        self.assertEqual(len(calls), 1)
        self.assertEqual(search.iterations, 2)

    def test_finisher_result_is_recorded(self):
        block, state = block_state(Circuit(1).add("H", 0), self.config)

        def finish(done):
            done = done.copy()
            done.current_layer = 99
            return done

        best = search_layer(state, block.layer(1), self.config, finish=finish)
        self.assertIsNotNone(best)
        self.assertEqual(best.current_layer, 99)

    def test_failed_rollout_is_not_backpropagated(self):
        config = self.config.model_copy(update={"placement_opt": False})
        circuit = Circuit(2).add("H", 0).add("H", 1)
        # qubit 1 has nowhere to go above its port
        block, state = block_state(circuit, config, reserved=frozenset({(2, 0, 1)}))
        search = LayerSearch(state, block.layer(1), config)
        search.run(deadline=math.inf)

        self.assertTrue(search.root.dead)
        self.assertEqual(search.root.visits, 0)
        self.assertEqual(search.root.reward_sum, 0.0)
        self.assertEqual(search.iterations, 2)

    def test_best_history_decreases(self):
        block, state = block_state(ghz(3), self.config)
        search = LayerSearch(state, block.layer(1), self.config)
        search.run(deadline=math.inf)

        history = search.best_history
        self.assertTrue(history)
        self.assertEqual(history, sorted(history, reverse=True))

    def test_layer_order(self):
        spiders = [9, 3, 5, 1, 7]

        self.assertEqual(layer_order(spiders, self.config, 0, 1, 0), [1, 3, 5, 7, 9])
        shuffled = layer_order(spiders, self.config, 0, 1, 1)
        self.assertEqual(sorted(shuffled), [1, 3, 5, 7, 9])
        self.assertEqual(shuffled, layer_order(spiders, self.config, 0, 1, 1))

    def test_embed_layer(self):
        block, state = block_state(ghz(3), self.config)
        spiders = block.layer(1)

        result = embed_layer_mcts(state, spiders, self.config, layer=1)
        self.assertEqual(result.current_layer, 1)
        self.assertTrue(all(v in result.placed for v in spiders))
        # Every layer-1 spider still owes a connection to layer 2 or an output
        self.assertEqual(len(result.frontier_ports), len(spiders))

    def test_embed_layer_is_deterministic(self):
        block, state = block_state(ghz(3), self.config)
        spiders = block.layer(1)

        first = embed_layer_mcts(state, spiders, self.config)
        second = embed_layer_mcts(state, spiders, self.config)
        self.assertEqual(first.pipe, second.pipe)


if __name__ == "__main__":
    unittest.main()
