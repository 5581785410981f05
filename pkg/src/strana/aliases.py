"""
ビルダーのエイリアス解析

レジスタごとに「指しうるビルダー割り当てサイト」の集合を前向きデータフローで求める。
併せて文字列値（tostring/formatの結果）の到達定義も追跡し、自動機構築時の
インライン化判定に使う。ループは不動点まで反復する。
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping, Tuple
from ..sir.cfg import ENTRY, block_instructions
from ..sir.ir import Append, Copy, Format, Instruction, MethodIR, NewBuilder, ToString
from ..utils.exceptions import AnalysisError, UnknownBuilder

logger = logging.getLogger(__name__)

_EMPTY: FrozenSet[int] = frozenset()


@dataclass(frozen=True)
class AliasState:
    """
    プログラム点におけるエイリアス状態

    sites: レジスタ → ビルダーサイト（NewBuilderの命令ID）の集合
    string_defs: レジスタ → 到達しうる文字列定義（ToString/Formatの命令ID）の集合
    """
    sites: Mapping[str, FrozenSet[int]] = field(default_factory=dict)
    string_defs: Mapping[str, FrozenSet[int]] = field(default_factory=dict)

    def sites_of(self, register: str) -> FrozenSet[int]:
        return self.sites.get(register, _EMPTY)

    def defs_of(self, register: str) -> FrozenSet[int]:
        return self.string_defs.get(register, _EMPTY)

    def join(self, other: "AliasState") -> "AliasState":
        """点ごとの和"""
        return AliasState(_union(self.sites, other.sites), _union(self.string_defs, other.string_defs))


def _union(left: Mapping[str, FrozenSet[int]], right: Mapping[str, FrozenSet[int]]) -> Dict[str, FrozenSet[int]]:
    merged = dict(left)
    for register, values in right.items():
        merged[register] = merged.get(register, _EMPTY) | values
    return merged


def transfer(state: AliasState, iid: int, instruction: Instruction) -> AliasState:
    """命令1つ分の状態遷移"""
    if isinstance(instruction, NewBuilder):
        return _assign(state, instruction.dest, frozenset({iid}), _EMPTY)
    if isinstance(instruction, Copy):
        return _assign(state, instruction.dest, state.sites_of(instruction.src), state.defs_of(instruction.src))
    if isinstance(instruction, (ToString, Format)):
        return _assign(state, instruction.dest, _EMPTY, frozenset({iid}))
    return state


def _assign(state: AliasState, register: str, sites: FrozenSet[int], defs: FrozenSet[int]) -> AliasState:
    new_sites = dict(state.sites)
    new_defs = dict(state.string_defs)
    new_sites.pop(register, None)
    new_defs.pop(register, None)
    if sites:
        new_sites[register] = sites
    if defs:
        new_defs[register] = defs
    return AliasState(new_sites, new_defs)


def analyze_aliases(method: MethodIR) -> Dict[int, AliasState]:
    """
    エイリアス解析を不動点まで実行する

    Args:
        method: build_cfg済みのメソッド

    Returns:
        命令ID → 命令直前のAliasState

    Raises:
        AnalysisError: CFGが構築されていない場合
        UnknownBuilder: append/tostringの対象レジスタがどのビルダーも指さない場合
    """
    cfg = method.cfg
    if cfg is None:
        raise AnalysisError(f"CFGが構築されていません: {method.name}")

    out: Dict[int, AliasState] = {node: AliasState() for node in cfg.nodes}
    worklist = list(cfg.nodes)
    queued = set(worklist)
    iterations = 0
    while worklist:
        block = worklist.pop(0)
        queued.discard(block)
        iterations += 1

        state = AliasState()
        for pred in cfg.predecessors(block):
            state = state.join(out[pred])
        for iid, instruction in block_instructions(cfg, block):
            state = transfer(state, iid, instruction)

        if state != out[block]:
            out[block] = state
            for succ in cfg.successors(block):
                if succ not in queued:
                    worklist.append(succ)
                    queued.add(succ)

    logger.debug(f"エイリアス解析: {method.name} ({iterations}回の反復で収束)")

    before: Dict[int, AliasState] = {}
    for block in cfg.nodes:
        if block == ENTRY:
            continue
        state = AliasState()
        for pred in cfg.predecessors(block):
            state = state.join(out[pred])
        for iid, instruction in block_instructions(cfg, block):
            before[iid] = state
            _check_target(method, state, instruction)
            state = transfer(state, iid, instruction)
    return before


def _check_target(method: MethodIR, state: AliasState, instruction: Instruction) -> None:
    if isinstance(instruction, Append):
        target = instruction.builder
    elif isinstance(instruction, ToString):
        target = instruction.builder
    else:
        return
    if not state.sites_of(target):
        raise UnknownBuilder(target, method.name)


def append_targets(aliases: Mapping[int, AliasState], iid: int, register: str) -> Tuple[int, ...]:
    """命令位置でレジスタが指すサイト（昇順）"""
    return tuple(sorted(aliases[iid].sites_of(register)))
