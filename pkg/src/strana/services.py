"""
文字列解析サービス層 - CFG構築からオートマトン構築までの統合管理
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
from ..sir.cfg import build_cfg
from ..sir.ir import MethodIR, ProgramIR
from ..utils.config import ConfigManager
from ..utils.exceptions import AnalysisError, SirError
from .aliases import analyze_aliases
from .automaton import StringAutomaton
from .builder import EXACTLY_ONE, ZERO_OR_ONE, AutomataOptions, build_automata

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MethodAutomata:
    """1メソッド分のサイト別オートマトン"""
    method: str
    automata: Dict[int, StringAutomaton] = field(default_factory=dict)


@dataclass(frozen=True)
class ProgramAutomata:
    """プログラム全体の解析結果。失敗したメソッドは理由付きで記録する"""
    source_name: str
    methods: Tuple[MethodAutomata, ...] = ()
    failures: Tuple[Tuple[str, str], ...] = ()

    def items(self) -> List[Tuple[str, int, StringAutomaton]]:
        """(メソッド名, サイト, オートマトン) の一覧"""
        return [
            (method.method, site, automaton)
            for method in self.methods
            for site, automaton in method.automata.items()
        ]


class StringAnalysisService:
    """文字列解析サービスクラス"""

    def __init__(self, config_manager: ConfigManager, loop_semantics: Optional[str] = None):
        """
        初期化

        Args:
            config_manager: 設定管理インスタンス
            loop_semantics: ループ意味論の上書き（Noneの場合は設定値を使用）
        """
        self.config_manager = config_manager
        self.analysis_config = config_manager.get_analysis_config()["analysis"]
        options = AutomataOptions.from_config(self.analysis_config)
        if loop_semantics is not None:
            if loop_semantics not in (ZERO_OR_ONE, EXACTLY_ONE):
                raise AnalysisError(f"不明なループ意味論: {loop_semantics}")
            options = AutomataOptions(loop_semantics, options.frontier_cap, options.max_nesting)
        self.options = options

        logger.info(f"文字列解析サービスを初期化 (ループ: {options.loop_semantics}, フロンティア上限: {options.frontier_cap})")

    def analyze_method(self, method: MethodIR) -> MethodAutomata:
        """
        メソッド1つを解析

        Args:
            method: 解析対象メソッド（CFG未構築でもよい）

        Returns:
            MethodAutomata

        Raises:
            AnalysisError: 解析エラー時
        """
        if method.cfg is None:
            method = build_cfg(method)
        aliases = analyze_aliases(method)
        automata = build_automata(method, aliases, self.options)
        return MethodAutomata(method.name, automata)

    def analyze_program(self, program: ProgramIR) -> ProgramAutomata:
        """
        プログラムの全メソッドを解析（メソッド単位の失敗は記録して続行）

        Args:
            program: 解析済みプログラム

        Returns:
            ProgramAutomata
        """
        results: List[MethodAutomata] = []
        failures: List[Tuple[str, str]] = []
        for method in program.methods:
            try:
                results.append(self.analyze_method(method))
            except (AnalysisError, SirError) as e:
                logger.error(f"メソッド解析エラー {program.source_name}:{method.name}: {str(e)}")
                failures.append((method.name, str(e)))

        logger.info(
            f"文字列解析完了: {program.source_name} "
            f"({len(results)}メソッド, {sum(len(m.automata) for m in results)}サイト, 失敗{len(failures)}件)"
        )
        return ProgramAutomata(program.source_name, tuple(results), tuple(failures))
