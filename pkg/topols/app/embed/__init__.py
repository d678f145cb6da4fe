from .baseline import BaselineBuilder, compile_baseline
from .compiler import CompileResult, compile_full
from .mcts import MctsNode, embed_layer_mcts, search_layer, uct_score
from .placement import expand_spider, rollout, route_connection
from .state import EmbeddingState, anchor_xy

__all__ = [
    "BaselineBuilder",
    "CompileResult",
    "EmbeddingState",
    "MctsNode",
    "anchor_xy",
    "compile_baseline",
    "compile_full",
    "embed_layer_mcts",
    "expand_spider",
    "rollout",
    "route_connection",
    "search_layer",
    "uct_score",
]
