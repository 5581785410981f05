"""
メインアプリケーション
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple
from ..compare.services import ComparisonService
from ..dynlog.records import assign_app, load_log
from ..dynlog.services import DynLogService
from ..sir.parser import load_program
from ..strana.automaton import automaton_to_json
from ..strana.services import ProgramAutomata, StringAnalysisService
from ..urlmodel.components import LEVEL_COLUMNS, LEVELS, ComponentSets, merge_all
from ..urlmodel.extraction import StaticExtraction
from ..urlmodel.macro import AppExtraction
from ..urlmodel.services import UrlModelService
from ..utils.config import LOOP_SEMANTICS, OUTPUT_FORMATS, ConfigManager
from ..utils.exceptions import LogError, SirError, ValidationError
from ..utils.exports import write_csv, write_json, write_jsonl
from ..utils.parallel import run_parallel
from ..utils.colors import ColorPrinter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """1回の実行に必要な解決済み設定"""
    inputs: Tuple[Path, ...]
    out_dir: Path
    pattern_cap: int = 10000
    loop_semantics: str = "zero_or_one"
    holes_may_be_empty: bool = False
    output_format: str = "both"
    jobs: int = 1
    ads: Optional[Path] = None
    logs: Tuple[Path, ...] = ()
    top_n: Optional[int] = None
    with_constants: bool = False

    def __post_init__(self):
        if not self.inputs and not self.logs:
            raise ValidationError("入力ファイルが1つ以上必要です")
        if self.pattern_cap < 1:
            raise ValidationError(f"--capは1以上が必要です: {self.pattern_cap}")
        if self.jobs < 1:
            raise ValidationError(f"--jobsは1以上が必要です: {self.jobs}")
        if self.loop_semantics not in LOOP_SEMANTICS:
            raise ValidationError(f"不明なループ意味論: {self.loop_semantics}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValidationError(f"不明な出力形式: {self.output_format}")
        if self.top_n is not None and self.top_n < 1:
            raise ValidationError(f"--topは1以上が必要です: {self.top_n}")

    @property
    def writes_json(self) -> bool:
        return self.output_format in ("json", "both")

    @property
    def writes_csv(self) -> bool:
        return self.output_format in ("csv", "both")


def unit_names(paths: Sequence[Path]) -> List[str]:
    """
    入力ファイルごとの単位名（拡張子を除いたファイル名）

    同名が続く場合は "-2", "-3" ... を付けて区別する。
    """
    seen: Counter = Counter()
    names = []
    for path in paths:
        stem = Path(path).stem
        seen[stem] += 1
        names.append(stem if seen[stem] == 1 else f"{stem}-{seen[stem]}")
    return names


@dataclass(frozen=True)
class UnitResult:
    """SIRファイル1つ分の静的解析結果"""
    unit: str
    path: Path
    extraction: StaticExtraction = field(default_factory=StaticExtraction)
    automata: Optional[ProgramAutomata] = None
    failures: Tuple[Tuple[str, str], ...] = ()
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        """いずれかの解析が結果を出せなかったか"""
        return self.error is not None or bool(self.failures)

    @property
    def components(self) -> ComponentSets:
        return self.extraction.components()

    def summary(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "source": str(self.path),
            "patterns": len(self.extraction.records),
            "discarded": self.extraction.discarded,
            "truncated": self.extraction.truncated,
            "components": self.components.counts(),
        }
        if self.error is not None:
            data["error"] = self.error
        if self.failures:
            data["failures"] = [{"method": m, "reason": r} for m, r in self.failures]
        return data


def improvement_table(constants: ComponentSets, automata: ComponentSets, decimals: int = 1) -> Dict[str, Dict[str, Any]]:
    """定数抽出に対するオートマトン抽出の階層ごとの増加率（%）"""
    table = {}
    for level in LEVELS:
        base = len(constants.level(level))
        ours = len(automata.level(level))
        table[level] = {
            "constants": base,
            "automata": ours,
            "improvement": round(100.0 * (ours - base) / base, decimals) if base else None,
        }
    return table


class UrlWeaverApp:
    """メインアプリケーションクラス"""

    def __init__(self, config_manager: ConfigManager, run_config: RunConfig, enable_color: bool = True):
        """
        初期化

        Args:
            config_manager: 設定管理インスタンス
            run_config: 実行設定
            enable_color: カラー出力を有効にするか
        """
        self.config_manager = config_manager
        self.run_config = run_config
        self.enable_color = enable_color
        self.color_printer = ColorPrinter(enable_color)
        self.max_nesting = int(config_manager.get_analysis_config()["analysis"].get("max_nesting", 64))
        self.share_decimals = int(config_manager.get_dynlog_config()["report"].get("share_decimals", 1))

        # 各サービスを初期化
        self.string_service = StringAnalysisService(config_manager, loop_semantics=run_config.loop_semantics)
        self.url_service = UrlModelService(config_manager, pattern_cap=run_config.pattern_cap)
        self.dynlog_service = DynLogService(config_manager)
        self.comparison_service = ComparisonService(config_manager, holes_may_be_empty=run_config.holes_may_be_empty)

        logger.info("urlweaverアプリケーションを初期化")

    # --- 静的解析 ---

    def analyze_unit(self, unit: str, path: Path, constants_only: bool = False) -> UnitResult:
        """
        SIRファイル1つを解析（失敗は結果に記録して返す）

        Args:
            unit: 単位名
            path: SIRファイル
            constants_only: 定数抽出のみ行うか

        Returns:
            UnitResult
        """
        try:
            program = load_program(path, unit, self.max_nesting)
        except SirError as e:
            logger.error(f"SIR読み込みエラー {path}: {str(e)}")
            return UnitResult(unit, Path(path), error=str(e))

        if constants_only:
            return UnitResult(unit, Path(path), self.url_service.constants(program))

        automata = self.string_service.analyze_program(program)
        extraction = self.url_service.extract(program, automata)
        return UnitResult(unit, Path(path), extraction, automata, automata.failures)

    def run_static(self, paths: Sequence[Path], constants_only: bool = False) -> List[UnitResult]:
        """SIRファイル群をファイル単位で並列に解析（結果は入力順）"""
        names = unit_names(paths)
        return run_parallel(
            lambda item: self.analyze_unit(item[0], item[1], constants_only),
            list(zip(names, paths)),
            jobs=self.run_config.jobs,
            desc="定数抽出中" if constants_only else "解析中",
            show_progress=len(paths) > 1,
            color=self.enable_color,
        )

    def _export_components(self, base: Path, sets: ComponentSets) -> None:
        if self.run_config.writes_json:
            write_json(base / "components.json", sets.to_dict())
        if self.run_config.writes_csv:
            for level in LEVELS:
                write_csv(base / f"{level}.csv", LEVEL_COLUMNS[level], sets.rows(level))

    def _export_unit(self, base: Path, result: UnitResult, include_automata: bool) -> None:
        if self.run_config.writes_json:
            records = sorted(
                (record.to_dict() for record in result.extraction.records),
                key=lambda item: (item["method"], item["site"], item["pattern"]),
            )
            write_jsonl(base / "patterns.jsonl", records)
            if include_automata:
                automata = [
                    {"method": method, "site": site, "automaton": automaton_to_json(automaton)}
                    for method, site, automaton in sorted(result.extraction.automata, key=lambda item: (item[0], item[1]))
                ]
                write_json(base / "automata.json", automata)
        self._export_components(base, result.components)

    def _static_command(self, command: str, constants_only: bool) -> Dict[str, Any]:
        results = self.run_static(self.run_config.inputs, constants_only)
        base = self.run_config.out_dir / command

        for result in results:
            if result.error is None:
                self._export_unit(base / result.unit, result, include_automata=not constants_only)
            else:
                self.color_printer.print_warning(f"{result.unit}: {result.error}")

        aggregate = merge_all(result.components for result in results if result.error is None)
        self._export_components(base / "aggregate", aggregate)

        summary: Dict[str, Any] = {
            "units": {result.unit: result.summary() for result in results},
            "aggregate": aggregate.counts(),
            "failed": sorted(result.unit for result in results if result.failed),
        }
        if command == "analyze" and self.run_config.with_constants:
            baseline = merge_all(
                result.components for result in self.run_static(self.run_config.inputs, constants_only=True)
                if result.error is None
            )
            summary["improvement"] = improvement_table(baseline, aggregate, self.share_decimals)

        if self.run_config.writes_json:
            write_json(base / "summary.json", summary)
        logger.info(f"{command}完了: {len(results)}単位, 失敗{len(summary['failed'])}件")
        return summary

    def cmd_analyze(self) -> Dict[str, Any]:
        """オートマトン抽出でパターンとコンポーネント集合を出力"""
        return self._static_command("analyze", constants_only=False)

    def cmd_constants(self) -> Dict[str, Any]:
        """定数抽出ベースラインで同じ形式の出力を作る"""
        return self._static_command("constants", constants_only=True)

    # --- 動的ログ ---

    def cmd_dynstats(self) -> Dict[str, Any]:
        """
        リクエストログを集計して出力

        Raises:
            LogError: ログ・広告リストを読めない場合
        """
        ad_hosts = self.dynlog_service.load_ads(self.run_config.ads)
        result = self.dynlog_service.analyze(
            list(self.run_config.logs),
            ad_hosts,
            jobs=self.run_config.jobs,
            show_progress=len(self.run_config.logs) > 1,
            units=unit_names(self.run_config.logs),
        )
        summary = result.summary
        report = self.dynlog_service.report(summary)
        report["ingest_errors"] = len(result.errors)
        base = self.run_config.out_dir / "dynstats"

        if self.run_config.writes_json:
            write_json(base / "summary.json", report)
        if self.run_config.writes_csv:
            write_csv(base / "timeline.csv", ("second", "count"), summary.timeline_rows())
            write_csv(base / "timeline_by_app.csv", ("app", "second", "count"), summary.app_timeline_rows())
            write_csv(
                base / "content_types.csv",
                ("category", "count", "share", "ad_count", "ad_share"),
                summary.content_rows(self.share_decimals),
                sort_rows=False,
            )
            write_csv(base / "apps.csv", ("app", "requests", "unique_urls", "bytes"), summary.app_rows())
            write_csv(base / "ingest_errors.csv", ("file", "line", "reason"), result.errors)
        return report

    # --- 比較 ---

    def load_dynamic_urls(self) -> Tuple[Dict[str, List[str]], List[str]]:
        """
        ログからアプリごとの観測URLを集める

        アプリ名がないレコードはログファイルの単位名に割り当てる。

        Returns:
            (アプリ名 → URL, 読み込みに失敗したログの単位名)
        """
        names = unit_names(self.run_config.logs)

        def work(item):
            name, path = item
            try:
                return name, load_log(path), None
            except LogError as e:
                return name, None, str(e)

        urls: Dict[str, List[str]] = {}
        failed: List[str] = []
        for name, loaded, reason in run_parallel(work, list(zip(names, self.run_config.logs)), jobs=self.run_config.jobs):
            if loaded is None:
                self.color_printer.print_warning(f"{name}: {reason}")
                failed.append(name)
                continue
            for record in assign_app(loaded, name).records:
                urls.setdefault(record.app, []).append(record.url)
        return urls, failed

    def cmd_compare(self) -> Dict[str, Any]:
        """静的抽出(S)と動的観測(D)をアプリ単位で比較して出力"""
        results = self.run_static(self.run_config.inputs)
        static = {
            result.unit: (result.components, result.extraction.patterns)
            for result in results if result.error is None
        }
        dynamic, dynamic_failed = self.load_dynamic_urls()
        failed = [result.unit for result in results if result.failed] + dynamic_failed

        comparison = self.comparison_service.compare(static, dynamic, failed)
        base = self.run_config.out_dir / "compare"
        data = comparison.to_dict()
        if self.run_config.writes_json:
            write_json(base / "comparison.json", data)
        if self.run_config.writes_csv:
            write_csv(base / "comparison.csv", comparison.csv_header(), comparison.csv_rows(), sort_rows=False)
        return data

    # --- マクロ統計 ---

    def cmd_macro(self) -> Dict[str, Any]:
        """アプリ横断のヒストグラム・上位ドメイン・スキャン結果を出力"""
        results = self.run_static(self.run_config.inputs)
        apps = [
            AppExtraction(result.unit, result.components, result.extraction.patterns)
            for result in results if result.error is None
        ]
        report = self.url_service.macro(apps, top_n=self.run_config.top_n)
        data = report.to_dict(self.share_decimals)
        data["failed"] = sorted(result.unit for result in results if result.failed)

        base = self.run_config.out_dir / "macro"
        if self.run_config.writes_json:
            write_json(base / "macro.json", data)
        if self.run_config.writes_csv:
            write_csv(base / "domains_per_app.csv", ("unique_domains", "apps"), report.domains_per_app)
            write_csv(base / "apps_per_domain.csv", ("apps", "domains"), report.apps_per_domain)
            write_csv(base / "top_domains.csv", ("domain", "apps"), report.top_domains, sort_rows=False)
            write_csv(base / "secrets.csv", ("app", "domain", "path", "key", "value"), report.secrets)
        return data
