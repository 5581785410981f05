"""
ビルダーサイトごとの文字列オートマトン構築

戻り辺を無視したCFGをトポロジカル順に一度だけ走査し、サイトごとに
「現在の末端状態集合（フロンティア）」を進めていく。ループ本体は高々1回
（既定では0回または1回）しか辿らないため、結果は常に非巡回になる。
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set
import networkx as nx
from ..sir.cfg import ENTRY, EXIT, block_instructions, forward_edges, topological_blocks
from ..sir.ir import (
    Append, Format, Instruction, Literal, MethodIR, NewBuilder, Opaque, Operand, ToString, nesting_depth,
)
from ..utils.exceptions import AnalysisError, FrontierExplosion, NestingTooDeep
from .aliases import AliasState, analyze_aliases
from .automaton import Edge, Hole, Lit, StringAutomaton, linear_automaton
from .formats import expand_format

logger = logging.getLogger(__name__)

ZERO_OR_ONE = "zero_or_one"
EXACTLY_ONE = "exactly_one"

Frontiers = Dict[int, FrozenSet[int]]


@dataclass(frozen=True)
class AutomataOptions:
    """オートマトン構築の設定"""
    loop_semantics: str = ZERO_OR_ONE
    frontier_cap: int = 100_000
    max_nesting: int = 64

    @classmethod
    def from_config(cls, analysis: Mapping) -> "AutomataOptions":
        return cls(
            loop_semantics=analysis.get("loop_semantics", ZERO_OR_ONE),
            frontier_cap=int(analysis.get("frontier_cap", 100_000)),
            max_nesting=int(analysis.get("max_nesting", 64)),
        )


class _SiteGraph:
    """構築途中の1サイト分のオートマトン（可変）"""

    def __init__(self, site: int, cap: int):
        self.site = site
        self.cap = cap
        self.next_state = 1
        self.entry = 0
        self.states: Set[int] = {0}
        self.edges: Set[Edge] = set()
        self.exits: Set[int] = set()
        self.converted = False
        self._merged: Dict[int, int] = {}

    def new_state(self) -> int:
        state = self.next_state
        self.next_state += 1
        self.states.add(state)
        return state

    def checked(self, frontier: FrozenSet[int]) -> FrozenSet[int]:
        """フロンティアの大きさが上限以内ならそのまま返す"""
        if len(frontier) > self.cap:
            raise FrontierExplosion(len(frontier), self.cap)
        return frontier

    def resolve(self, states: Iterable[int]) -> FrozenSet[int]:
        resolved = set()
        for state in states:
            while state in self._merged:
                state = self._merged[state]
            resolved.add(state)
        return frozenset(resolved)

    def has_outgoing(self, state: int) -> bool:
        return any(edge.src == state for edge in self.edges)

    def graft(self, frontier: FrozenSet[int], fragment: StringAutomaton) -> FrozenSet[int]:
        """
        フロンティアの各状態の後ろにfragmentを連結し、新しいフロンティアを返す

        fragmentのentryには入辺がないため、entryからの辺をフロンティアの各状態から張り直す。
        """
        copies = {state: self.new_state() for state in fragment.states if state != fragment.entry}
        for edge in fragment.edges:
            target = copies[edge.dst]
            if edge.src == fragment.entry:
                for state in frontier:
                    self.edges.add(Edge(state, edge.label, target))
            else:
                self.edges.add(Edge(copies[edge.src], edge.label, target))
        result = {copies[state] for state in fragment.exits if state != fragment.entry}
        if fragment.entry in fragment.exits:
            result |= frontier
        return self.checked(frozenset(result))

    def merge_sinks(self, frontier: FrozenSet[int]) -> FrozenSet[int]:
        """合流点で、出辺のない末端状態（entryと記録済みexitを除く）を1つにまとめる"""
        sinks = sorted(
            state for state in frontier
            if state != self.entry and state not in self.exits and not self.has_outgoing(state)
        )
        if len(sinks) < 2:
            return frontier
        keep, dropped = sinks[0], set(sinks[1:])
        self.edges = {
            Edge(edge.src, edge.label, keep) if edge.dst in dropped else edge
            for edge in self.edges
        }
        for state in dropped:
            self._merged[state] = keep
            self.states.discard(state)
        return (frontier - dropped) | {keep}

    def snapshot(self, exits: FrozenSet[int]) -> StringAutomaton:
        """exitsを終状態とした現在の言語（不変・正規化済み）"""
        return StringAutomaton(
            states=frozenset(self.states),
            entry=self.entry,
            exits=exits,
            edges=frozenset(self.edges),
        ).normalized()


def union_automata(automata: List[StringAutomaton]) -> StringAutomaton:
    """entryを共有させて言語の和を作る"""
    if len(automata) == 1:
        return automata[0]
    edges: Set[Edge] = set()
    exits: Set[int] = set()
    states: Set[int] = {0}
    offset = 1
    for automaton in automata:
        def rename(state: int) -> int:
            return 0 if state == automaton.entry else state + offset
        edges.update(Edge(rename(e.src), e.label, rename(e.dst)) for e in automaton.edges)
        exits.update(rename(state) for state in automaton.exits)
        states.update(rename(state) for state in automaton.states)
        offset += max(automaton.states) + 1
    return StringAutomaton(frozenset(states), 0, frozenset(exits), frozenset(edges)).normalized()


class _Construction:
    """1メソッド分の構築処理"""

    def __init__(self, method: MethodIR, aliases: Mapping[int, AliasState], options: AutomataOptions):
        self.method = method
        self.aliases = aliases
        self.options = options
        self.cfg = method.cfg
        self.dag = forward_edges(self.cfg)
        self.sites: Dict[int, _SiteGraph] = {}
        self.values: Dict[int, StringAutomaton] = {}
        self.format_sites: Dict[int, StringAutomaton] = {}
        self.block_of: Dict[int, int] = {}
        for block in self.cfg.nodes:
            for iid, _ in block_instructions(self.cfg, block):
                self.block_of[iid] = block
        self.dominators = nx.immediate_dominators(self.dag, ENTRY)

    def run(self) -> Dict[int, StringAutomaton]:
        outs: Dict[int, Frontiers] = {}
        for block in topological_blocks(self.cfg):
            frontiers = self._block_input(block, outs)
            for iid, instruction in block_instructions(self.cfg, block):
                frontiers = self._step(frontiers, iid, instruction)
            outs[block] = frontiers
        return self._finish(outs.get(EXIT, {}))

    def _incoming(self, block: int) -> List[int]:
        preds = []
        for pred in self.dag.predecessors(block):
            kind = self.cfg.edges[pred, block]["kind"]
            if kind == "loop_skip" and self.options.loop_semantics == EXACTLY_ONE:
                continue
            preds.append(pred)
        return sorted(preds)

    def _block_input(self, block: int, outs: Mapping[int, Frontiers]) -> Frontiers:
        preds = self._incoming(block)
        merged: Dict[int, Set[int]] = {}
        for pred in preds:
            for site, frontier in outs.get(pred, {}).items():
                merged.setdefault(site, set()).update(self.sites[site].resolve(frontier))
        frontiers = {site: frozenset(states) for site, states in merged.items()}
        if len(preds) > 1:
            frontiers = {site: self.sites[site].merge_sinks(states) for site, states in frontiers.items()}
        return {site: self.sites[site].checked(states) for site, states in frontiers.items()}

    def _step(self, frontiers: Frontiers, iid: int, instruction: Instruction) -> Frontiers:
        if isinstance(instruction, NewBuilder):
            self.sites[iid] = _SiteGraph(iid, self.options.frontier_cap)
            return {**frontiers, iid: frozenset({0})}

        if isinstance(instruction, Append):
            fragment = self._operand_fragment(instruction.operand, iid)
            targets = [s for s in sorted(self.aliases[iid].sites_of(instruction.builder)) if s in frontiers]
            updated = dict(frontiers)
            for site in targets:
                graph = self.sites[site]
                current = graph.resolve(frontiers[site])
                extended = graph.graft(current, fragment)
                # 複数サイトを指す場合は弱い更新（追記しない経路も残す）
                updated[site] = graph.checked(extended | current) if len(targets) > 1 else extended
            return updated

        if isinstance(instruction, ToString):
            targets = [s for s in sorted(self.aliases[iid].sites_of(instruction.builder)) if s in frontiers]
            snapshots = []
            for site in targets:
                graph = self.sites[site]
                current = graph.resolve(frontiers[site])
                graph.exits |= current
                graph.converted = True
                snapshots.append(graph.snapshot(current))
            if snapshots:
                self.values[iid] = union_automata(snapshots)
            return frontiers

        if isinstance(instruction, Format):
            automaton = linear_automaton(expand_format(instruction.template, instruction.args))
            self.format_sites[iid] = automaton
            self.values[iid] = automaton
            return frontiers

        return frontiers

    def _operand_fragment(self, operand: Operand, iid: int) -> StringAutomaton:
        if isinstance(operand, Literal):
            return linear_automaton([Lit(operand.text)])
        if isinstance(operand, Opaque):
            return linear_automaton([Hole(operand.descriptor)])
        value = self._inlinable(operand.name, iid)
        if value is not None:
            return value
        return linear_automaton([Hole(f"reg:{operand.name}")])

    def _inlinable(self, register: str, iid: int) -> Optional[StringAutomaton]:
        defs = self.aliases[iid].defs_of(register)
        if len(defs) != 1:
            return None
        (definition,) = defs
        if definition not in self.values or not self._dominates(definition, iid):
            return None
        return self.values[definition]

    def _dominates(self, definition: int, use: int) -> bool:
        def_block = self.block_of[definition]
        block = self.block_of[use]
        if def_block == block:
            return definition < use
        while block != ENTRY:
            block = self.dominators[block]
            if block == def_block:
                return True
        return False

    def _finish(self, at_exit: Frontiers) -> Dict[int, StringAutomaton]:
        automata: Dict[int, StringAutomaton] = {}
        for site, graph in self.sites.items():
            exits = frozenset(graph.exits)
            if not graph.converted and site in at_exit:
                exits = graph.resolve(at_exit[site])
            if not exits:
                continue
            automata[site] = graph.snapshot(exits)
        automata.update(self.format_sites)
        return dict(sorted(automata.items()))


def build_automata(
    method: MethodIR,
    aliases: Optional[Mapping[int, AliasState]] = None,
    options: Optional[AutomataOptions] = None,
) -> Dict[int, StringAutomaton]:
    """
    メソッド内の各サイト（newbuilder/format）の文字列オートマトンを構築する

    Args:
        method: build_cfg済みのメソッド
        aliases: analyze_aliasesの結果（省略時はここで計算）
        options: ループ意味論・フロンティア上限・ネスト上限

    Returns:
        サイト（命令ID）→ 正規化済みStringAutomaton

    Raises:
        NestingTooDeep: ネストが上限を超える場合
        FrontierExplosion: フロンティアの状態数が上限を超える場合
    """
    options = options or AutomataOptions()
    if method.cfg is None:
        raise AnalysisError(f"CFGが構築されていません: {method.name}")
    depth = nesting_depth(method.body)
    if depth > options.max_nesting:
        raise NestingTooDeep(depth, options.max_nesting)
    if aliases is None:
        aliases = analyze_aliases(method)

    automata = _Construction(method, aliases, options).run()
    logger.debug(f"オートマトン構築: {method.name} ({len(automata)}サイト)")
    return automata
