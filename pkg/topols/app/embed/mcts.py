"""Monte Carlo tree search over the placements of one layer of spiders.

A node at depth d has the first d spiders of the layer ordering embedded; its
children are every feasible placement of the next spider. Rewards are the
negative space-time volume of the completed layer, so the search looks for the
most compact embedding.
"""
import logging
import math
import time
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..config import CompileConfig
from .placement import expand_spider, rollout
from .state import EmbeddingState

logger = logging.getLogger(__name__)

Finisher = Callable[[EmbeddingState], Optional[EmbeddingState]]

# planes a layer may add above the state it starts from
LAYER_HEADROOM = 2


class MctsNode:
    def __init__(self, state: EmbeddingState, parent: Optional["MctsNode"] = None, depth: int = 0):
        self.state = state
        self.parent = parent
        self.depth = depth
        self.children: List["MctsNode"] = []
        self.reward_sum = 0.0
        self.visits = 0
        self.expanded = False
        # no completed layer exists below this node
        self.dead = False
        # cached reward of a fully placed layer
        self.outcome: Optional[float] = None

    def backpropagate(self, reward: float) -> None:
        node = self
        while node is not None:
            node.visits += 1
            node.reward_sum += reward
            node = node.parent

    def __repr__(self) -> str:
        return f"MctsNode(depth={self.depth}, visits={self.visits}, children={len(self.children)})"


def uct_score(node: MctsNode, c: float) -> float:
    """Mean reward plus the exploration bonus; unvisited nodes come first."""
    if node.visits == 0:
        return math.inf
    parent_visits = node.parent.visits if node.parent is not None else node.visits
    return node.reward_sum / node.visits + c * math.sqrt(math.log(parent_visits) / node.visits)


def _select_child(node: MctsNode, c: float) -> Optional[MctsNode]:
    best, best_score = None, -math.inf
    for child in node.children:
        if child.dead:
            continue
        score = uct_score(child, c)
        if best is None or score > best_score:
            best, best_score = child, score
    return best


def _rank(state: EmbeddingState) -> Tuple[int, int]:
    return state.volume(), state.cube_count()


class LayerSearch:
    """Search state for one layer and one spider ordering.

    finish, when given, completes a fully placed layer (the exits of a block's
    last layer); a state it rejects never becomes the best.
    """

    def __init__(self, state: EmbeddingState, order: List[int], config: CompileConfig, finish: Optional[Finisher] = None):
        self.order = list(order)
        self.config = config
        self.finish = finish
        self.root = MctsNode(state)
        self.best: Optional[EmbeddingState] = None
        self.best_history: List[int] = []
        self.iterations = 0

    def _record(self, state: EmbeddingState) -> None:
        if self.best is None or _rank(state) < _rank(self.best):
            self.best = state
            self.best_history.append(state.volume())

    def _complete(self, state: EmbeddingState) -> float:
        """Reward of a fully placed layer; -inf when the finisher rejects it."""
        if self.finish is not None:
            done = self.finish(state)
            if done is None:
                return -math.inf
            state = done
        self._record(state)
        return -float(state.volume())

    def _prune(self, node: MctsNode) -> None:
        """Mark a node dead, then every ancestor whose children are all dead."""
        node.dead = True
        parent = node.parent
        while parent is not None and parent.expanded and all(c.dead for c in parent.children):
            parent.dead = True
            parent = parent.parent

    def _iterate(self) -> None:
        depth_total = len(self.order)
        node = self.root
        while node.expanded and node.depth < depth_total:
            child = _select_child(node, self.config.exploration_c)
            if child is None:
                self._prune(node)
                return
            node = child

        if node.depth == depth_total:
            if node.outcome is None:
                node.outcome = self._complete(node.state)
            if node.outcome == -math.inf:
                self._prune(node)
                return
            node.backpropagate(node.outcome)
            return

        node.expanded = True
        children = expand_spider(node.state, self.order[node.depth], self.config)
        node.children = [MctsNode(s, node, node.depth + 1) for s in children]
        if not node.children:
            self._prune(node)
            return

        first = node.children[0]
        reward, completed = rollout(first.state, self.order[first.depth:], self.config)
        if completed is not None:
            reward = self._complete(completed)
            if first.depth == depth_total:
                first.outcome = reward
        # a failed rollout leaves the child unvisited so it is expanded next
        if reward != -math.inf:
            first.backpropagate(reward)

    def run(self, deadline: float) -> Optional[EmbeddingState]:
        while self.iterations < self.config.iterations and not self.root.dead:
            if time.monotonic() >= deadline:
                logger.debug(f"Layer search hit its deadline after {self.iterations} iterations")
                break
            self._iterate()
            self.iterations += 1
        return self.best


def search_layer(
    state: EmbeddingState,
    order: List[int],
    config: CompileConfig,
    deadline: Optional[float] = None,
    finish: Optional[Finisher] = None,
) -> Optional[EmbeddingState]:
    """Best embedding of the spiders in the given order, or None if none was found."""
    if deadline is None:
        deadline = time.monotonic() + config.timeout_ms / 1000.0
    if not order:
        return finish(state) if finish is not None else state
    return LayerSearch(state, order, config, finish).run(deadline)


def layer_order(spiders: List[int], config: CompileConfig, block_index: int, layer: int, seed_index: int) -> List[int]:
    """Deterministic shuffle of a layer, keyed by the run seed and the layer position."""
    ordered = sorted(spiders)
    if seed_index == 0:
        return ordered
    rng = np.random.default_rng(np.random.SeedSequence([config.rng_seed, block_index, layer, seed_index]))
    return [ordered[i] for i in rng.permutation(len(ordered))]


def embed_layer_mcts(
    state: EmbeddingState,
    spiders: List[int],
    config: CompileConfig,
    block_index: int = 0,
    layer: int = 1,
    finish: Optional[Finisher] = None,
) -> Optional[EmbeddingState]:
    """Embed one layer, keeping the best result over several spider orderings.

    The layer may build at most LAYER_HEADROOM planes above the incoming state;
    only when no ordering fits under that cap is the search repeated without it.
    """
    pending = [v for v in spiders if v not in state.placed]
    for z_cap in (state.top_z() + LAYER_HEADROOM, None):
        start = state.copy()
        start.z_cap = z_cap
        best: Optional[Tuple[int, int, int]] = None
        best_state: Optional[EmbeddingState] = None
        for seed_index in range(config.seeds_per_layer):
            order = layer_order(pending, config, block_index, layer, seed_index)
            result = search_layer(start, order, config, finish=finish)
            if result is None:
                logger.debug(f"Block {block_index} layer {layer}: ordering {seed_index} found no embedding")
                continue
            rank = (*_rank(result), seed_index)
            if best is None or rank < best:
                best, best_state = rank, result
        if best_state is not None:
            break
        logger.debug(f"Block {block_index} layer {layer}: nothing fits under plane {z_cap}")
    if best_state is None:
        return None
    best_state.z_cap = None
    best_state.current_layer = layer
    best_state.refresh_frontier(spiders)
    logger.debug(f"Block {block_index} layer {layer} embedded at volume {best[0]}")
    return best_state
