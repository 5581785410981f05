"""
URLモデルサービス層 - パターン抽出・分解・マクロ集計の統合管理
"""
import logging
from typing import Optional, Sequence
from ..sir.ir import ProgramIR
from ..strana.services import ProgramAutomata
from ..utils.config import ConfigManager
from ..utils.exceptions import UrlError
from .components import ComponentSets, decompose
from .extraction import StaticExtraction, constant_extraction, extract_static
from .macro import AppExtraction, MacroReport, macro_statistics

logger = logging.getLogger(__name__)


class UrlModelService:
    """URLモデルサービスクラス"""

    def __init__(self, config_manager: ConfigManager, pattern_cap: Optional[int] = None):
        """
        初期化

        Args:
            config_manager: 設定管理インスタンス
            pattern_cap: オートマトンごとの列挙上限（Noneの場合は設定値を使用）
        """
        self.config_manager = config_manager
        analysis_config = config_manager.get_analysis_config()
        self.pattern_cap = pattern_cap if pattern_cap is not None else int(analysis_config["analysis"]["pattern_cap"])
        if self.pattern_cap < 1:
            raise UrlError(f"pattern_capは1以上が必要です: {self.pattern_cap}")
        self.macro_config = analysis_config["macro"]

        logger.info(f"URLモデルサービスを初期化 (列挙上限: {self.pattern_cap})")

    def extract(self, program: ProgramIR, automata: ProgramAutomata) -> StaticExtraction:
        """
        オートマトンからURLパターンを抽出

        Args:
            program: 解析済みプログラム
            automata: StringAnalysisServiceの結果

        Returns:
            StaticExtraction
        """
        extraction = extract_static(program, automata.items(), self.pattern_cap)
        logger.info(
            f"パターン抽出完了: {program.source_name} "
            f"({len(extraction.records)}パターン, 破棄{extraction.discarded}件"
            f"{', 打ち切りあり' if extraction.truncated else ''})"
        )
        return extraction

    def constants(self, program: ProgramIR) -> StaticExtraction:
        """
        定数抽出ベースライン

        Args:
            program: 解析済みプログラム

        Returns:
            StaticExtraction（automataは空）
        """
        extraction = constant_extraction(program)
        logger.info(f"定数抽出完了: {program.source_name} ({len(extraction.records)}パターン)")
        return extraction

    def components(self, extraction: StaticExtraction) -> ComponentSets:
        return decompose(extraction.patterns)

    def macro(self, apps: Sequence[AppExtraction], top_n: Optional[int] = None) -> MacroReport:
        """
        アプリ横断のマクロ統計

        Args:
            apps: アプリごとの抽出結果
            top_n: 上位ドメイン表の件数（Noneの場合は設定値を使用）

        Returns:
            MacroReport
        """
        if top_n is None:
            top_n = int(self.macro_config.get("top_n", 10))
        report = macro_statistics(
            apps,
            top_n=top_n,
            excluded_domains=self.macro_config.get("excluded_domains", []),
            longest=int(self.macro_config.get("longest_patterns", 5)),
        )
        logger.info(f"マクロ集計完了: {report.app_count}アプリ, {len(report.domain_app_counts)}ドメイン")
        return report
