"""
メソッド単位の制御フローグラフ構築

ノード0が仮想ENTRY、ノード1が仮想EXIT、基本ブロックは2以降。
ブロック属性 "instrs" は (命令ID, 命令) のタプル。If/Loopはブロックに入らず
エッジ構造として表現する。ループの戻り辺には back=True を付ける。
"""
import dataclasses
import logging
from itertools import count
from typing import List, Tuple
import networkx as nx
from .ir import If, Instruction, Loop, MethodIR

logger = logging.getLogger(__name__)

ENTRY = 0
EXIT = 1


def build_cfg(method: MethodIR) -> MethodIR:
    """
    メソッドのCFGを構築してcfgを設定したMethodIRを返す

    Args:
        method: 解析済みメソッド

    Returns:
        cfgを持つMethodIR（元のMethodIRは変更しない）
    """
    graph = nx.DiGraph(method=method.name)
    graph.add_node(ENTRY, instrs=())
    graph.add_node(EXIT, instrs=())
    block_ids = count(2)
    iids = count(0)
    pending: dict = {}

    def new_block() -> int:
        block = next(block_ids)
        graph.add_node(block)
        pending[block] = []
        return block

    def lower(block_body: Tuple[Instruction, ...], current: int) -> int:
        for instruction in block_body:
            iid = next(iids)
            if isinstance(instruction, If):
                then_block = new_block()
                graph.add_edge(current, then_block, kind="then", back=False)
                then_end = lower(instruction.then_block, then_block)
                else_block = new_block()
                graph.add_edge(current, else_block, kind="else", back=False)
                else_end = lower(instruction.else_block, else_block)
                join = new_block()
                graph.add_edge(then_end, join, kind="join", back=False)
                graph.add_edge(else_end, join, kind="join", back=False)
                current = join
            elif isinstance(instruction, Loop):
                body = new_block()
                graph.add_edge(current, body, kind="loop_enter", back=False)
                body_end = lower(instruction.body, body)
                after = new_block()
                graph.add_edge(current, after, kind="loop_skip", back=False)
                graph.add_edge(body_end, after, kind="loop_exit", back=False)
                graph.add_edge(body_end, body, kind="back", back=True)
                current = after
            else:
                pending[current].append((iid, instruction))
        return current

    first = new_block()
    graph.add_edge(ENTRY, first, kind="seq", back=False)
    last = lower(method.body, first)
    graph.add_edge(last, EXIT, kind="seq", back=False)

    for block, instrs in pending.items():
        graph.nodes[block]["instrs"] = tuple(instrs)

    logger.debug(f"CFG構築: {method.name} ({block_count(graph)}ブロック)")
    return dataclasses.replace(method, cfg=graph)


def block_count(cfg: nx.DiGraph) -> int:
    """ENTRY/EXITを除いた基本ブロック数"""
    return cfg.number_of_nodes() - 2


def forward_edges(cfg: nx.DiGraph) -> nx.DiGraph:
    """戻り辺を除いたDAGビュー"""
    return nx.subgraph_view(cfg, filter_edge=lambda u, v: not cfg.edges[u, v]["back"])


def topological_blocks(cfg: nx.DiGraph) -> List[int]:
    """戻り辺を除いたグラフのトポロジカル順（同順位はブロック番号順）"""
    return list(nx.lexicographical_topological_sort(forward_edges(cfg)))


def count_paths(cfg: nx.DiGraph) -> int:
    """ENTRYからEXITまでのパス数（戻り辺は数えない）"""
    paths = {ENTRY: 1}
    dag = forward_edges(cfg)
    for node in topological_blocks(cfg):
        if node == ENTRY:
            continue
        paths[node] = sum(paths.get(pred, 0) for pred in dag.predecessors(node))
    return paths.get(EXIT, 0)


def block_instructions(cfg: nx.DiGraph, block: int) -> Tuple[Tuple[int, Instruction], ...]:
    return cfg.nodes[block].get("instrs", ())
