"""
非巡回文字列オートマトン

辺ラベルはリテラル(Lit)かプレースホルダ(Hole)。Holeの記述子は報告用に保持するが
比較・ハッシュでは区別しない（プレースホルダは一つの値として数える）。
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, NamedTuple, Tuple, Union
import networkx as nx
from ..utils.exceptions import AnalysisError

logger = logging.getLogger(__name__)

HOLE_TEXT = "[ ]"


@dataclass(frozen=True)
class Lit:
    text: str

    def render(self) -> str:
        return self.text


@dataclass(frozen=True)
class Hole:
    descriptor: str = field(default="", compare=False)

    def render(self) -> str:
        return HOLE_TEXT


EdgeLabel = Union[Lit, Hole]
TokenSequence = Tuple[EdgeLabel, ...]


def label_key(label: EdgeLabel) -> Tuple[int, str]:
    """辺ラベルの辞書式順序キー（Litが先）"""
    if isinstance(label, Lit):
        return (0, label.text)
    return (1, label.descriptor)


def fuse(labels: Iterable[EdgeLabel]) -> TokenSequence:
    """隣接するLitを連結し、空のLitを除いたトークン列"""
    tokens: List[EdgeLabel] = []
    for label in labels:
        if isinstance(label, Lit):
            if not label.text:
                continue
            if tokens and isinstance(tokens[-1], Lit):
                tokens[-1] = Lit(tokens[-1].text + label.text)
                continue
        tokens.append(label)
    return tuple(tokens)


def render_tokens(tokens: Iterable[EdgeLabel]) -> str:
    return "".join(token.render() for token in tokens)


class Edge(NamedTuple):
    src: int
    label: EdgeLabel
    dst: int


@dataclass(frozen=True)
class StringAutomaton:
    """
    非巡回ラベル付きオートマトン

    生成時に非巡回性とexitの到達可能性を検査する。
    """
    states: FrozenSet[int]
    entry: int
    exits: FrozenSet[int]
    edges: FrozenSet[Edge]

    def __post_init__(self):
        graph = self.graph()
        if not nx.is_directed_acyclic_graph(graph):
            raise AnalysisError("string automaton must be acyclic")
        if not self.exits:
            raise AnalysisError("string automaton needs at least one exit")
        reachable = nx.descendants(graph, self.entry) | {self.entry}
        if not self.exits <= reachable:
            raise AnalysisError("every exit must be reachable from the entry")

    def graph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.states)
        for edge in self.edges:
            graph.add_edge(edge.src, edge.dst, label=edge.label)
        return graph

    def outgoing(self, state: int) -> List[Edge]:
        """状態からの辺（ラベルの辞書式順）"""
        return sorted((e for e in self.edges if e.src == state), key=lambda e: (label_key(e.label), e.dst))

    def normalized(self) -> "StringAutomaton":
        """
        entryから到達でき、かつexitに到達できる状態だけを残し、
        状態番号をトポロジカル順に0から振り直す
        """
        graph = self.graph()
        forward = nx.descendants(graph, self.entry) | {self.entry}
        backward = set(self.exits)
        for exit_state in self.exits:
            backward |= nx.ancestors(graph, exit_state)
        live = (forward & backward) | {self.entry}
        trimmed = graph.subgraph(live)
        order = list(nx.lexicographical_topological_sort(trimmed))
        renumber = {state: index for index, state in enumerate(order)}
        edges = frozenset(
            Edge(renumber[e.src], e.label, renumber[e.dst])
            for e in self.edges
            if e.src in live and e.dst in live
        )
        return StringAutomaton(
            states=frozenset(renumber.values()),
            entry=renumber[self.entry],
            exits=frozenset(renumber[s] for s in self.exits if s in live),
            edges=edges,
        )

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges, key=lambda e: (e.src, e.dst, label_key(e.label)))


def linear_automaton(labels: Iterable[EdgeLabel]) -> StringAutomaton:
    """ラベル列をそのまま鎖状にしたオートマトン（空Litは省く）"""
    edges = []
    state = 0
    for label in labels:
        if isinstance(label, Lit) and not label.text:
            continue
        edges.append(Edge(state, label, state + 1))
        state += 1
    return StringAutomaton(
        states=frozenset(range(state + 1)),
        entry=0,
        exits=frozenset({state}),
        edges=frozenset(edges),
    )


@dataclass(frozen=True)
class Language:
    """オートマトンの言語の列挙結果"""
    sequences: Tuple[TokenSequence, ...]
    truncated: bool = False


def language_of(automaton: StringAutomaton, cap: int) -> Language:
    """
    entryからexitまでのラベル列を列挙する（隣接Litは連結）

    Args:
        automaton: 非巡回オートマトン
        cap: 列挙する列の上限

    Returns:
        Language（上限を超えた場合は辞書式辺順で先頭cap件とtruncated=True）
    """
    outgoing: Dict[int, List[Edge]] = {state: [] for state in automaton.states}
    for edge in automaton.edges:
        outgoing[edge.src].append(edge)
    for edges in outgoing.values():
        edges.sort(key=lambda e: (label_key(e.label), e.dst))

    seen = set()
    sequences: List[TokenSequence] = []
    truncated = False
    # (状態, ここまでのラベル列, 次に調べる辺の位置)
    stack: List[Tuple[int, Tuple[EdgeLabel, ...], int]] = [(automaton.entry, (), -1)]
    while stack:
        state, labels, index = stack.pop()
        if index < 0:
            if state in automaton.exits:
                sequence = fuse(labels)
                if sequence not in seen:
                    if len(sequences) >= cap:
                        truncated = True
                        break
                    seen.add(sequence)
                    sequences.append(sequence)
            index = 0
        if index < len(outgoing[state]):
            edge = outgoing[state][index]
            stack.append((state, labels, index + 1))
            stack.append((edge.dst, labels + (edge.label,), -1))

    if truncated:
        logger.debug(f"言語列挙を打ち切り: 上限{cap}件")
    return Language(sequences=tuple(sequences), truncated=truncated)


def automaton_to_json(automaton: StringAutomaton) -> Dict[str, Any]:
    """
    正規形のJSON表現に変換

    状態はトポロジカル順に0から番号付けし、辺は (from, to, label) 順に並べる。
    """
    normal = automaton.normalized()
    edges = []
    for edge in normal.sorted_edges():
        item: Dict[str, Any] = {"from": edge.src, "to": edge.dst}
        if isinstance(edge.label, Lit):
            item["lit"] = edge.label.text
        else:
            item["hole"] = edge.label.descriptor
        edges.append(item)
    return {"entry": normal.entry, "exits": sorted(normal.exits), "edges": edges}


def automaton_from_json(data: Dict[str, Any]) -> StringAutomaton:
    """JSON表現からオートマトンを復元"""
    try:
        edges = []
        states = {int(data["entry"])} | {int(s) for s in data["exits"]}
        for item in data["edges"]:
            if "lit" in item:
                label: EdgeLabel = Lit(str(item["lit"]))
            else:
                label = Hole(str(item["hole"]))
            edges.append(Edge(int(item["from"]), label, int(item["to"])))
            states.update((int(item["from"]), int(item["to"])))
        return StringAutomaton(
            states=frozenset(states),
            entry=int(data["entry"]),
            exits=frozenset(int(s) for s in data["exits"]),
            edges=frozenset(edges),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise AnalysisError(f"オートマトンJSONの形式が不正です: {str(e)}") from e
