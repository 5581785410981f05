"""
比較サービス層 - 動的・静的結果の比較とURL単位の対応付け
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
from ..urlmodel.components import LEVELS, ComponentSets
from ..urlmodel.pattern import UrlPattern
from ..utils.config import ConfigManager
from .comparison import ComparisonReport, compare_components, components_from_urls, matched_urls, sum_counts

logger = logging.getLogger(__name__)

COUNT_COLUMNS = ("d_only", "both", "s_only")


@dataclass(frozen=True)
class AppComparison:
    """1アプリ分の比較結果"""
    app: str
    report: ComparisonReport
    dynamic_urls: int = 0
    matched_urls: int = 0
    skipped_urls: int = 0


@dataclass(frozen=True)
class ComparisonResult:
    rows: Tuple[AppComparison, ...] = ()
    excluded: Tuple[str, ...] = ()

    def total(self) -> Dict[str, Dict[str, int]]:
        return sum_counts(row.report for row in self.rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "apps": {
                row.app: {
                    **row.report.to_dict(),
                    "urls": {
                        "dynamic": row.dynamic_urls,
                        "matched": row.matched_urls,
                        "unparseable": row.skipped_urls,
                    },
                }
                for row in self.rows
            },
            "total": {
                "counts": self.total(),
                "urls": {
                    "dynamic": sum(row.dynamic_urls for row in self.rows),
                    "matched": sum(row.matched_urls for row in self.rows),
                    "unparseable": sum(row.skipped_urls for row in self.rows),
                },
            },
            "excluded": list(self.excluded),
        }

    def csv_rows(self) -> List[List[Any]]:
        """アプリごとの行とTotal行（列は階層×d_only/both/s_only、URL数）"""
        rows = []
        for row in self.rows:
            counts = row.report.counts()
            rows.append(
                [row.app]
                + [counts[level][column] for level in LEVELS for column in COUNT_COLUMNS]
                + [row.dynamic_urls, row.matched_urls]
            )
        total = self.total()
        rows.append(
            ["Total"]
            + [total[level][column] for level in LEVELS for column in COUNT_COLUMNS]
            + [sum(r.dynamic_urls for r in self.rows), sum(r.matched_urls for r in self.rows)]
        )
        return rows

    @staticmethod
    def csv_header() -> List[str]:
        return (
            ["app"]
            + [f"{level}_{column}" for level in LEVELS for column in COUNT_COLUMNS]
            + ["dynamic_urls", "matched_urls"]
        )


class ComparisonService:
    """比較サービスクラス"""

    def __init__(self, config_manager: ConfigManager, holes_may_be_empty: Optional[bool] = None):
        """
        初期化

        Args:
            config_manager: 設定管理インスタンス
            holes_may_be_empty: Holeが空文字列に一致してよいか（Noneの場合は設定値を使用）
        """
        self.config_manager = config_manager
        analysis = config_manager.get_analysis_config()["analysis"]
        if holes_may_be_empty is None:
            holes_may_be_empty = bool(analysis.get("holes_may_be_empty", False))
        self.holes_may_be_empty = holes_may_be_empty

        logger.info(f"比較サービスを初期化 (空のHole: {'許可' if holes_may_be_empty else '不許可'})")

    def compare_app(
        self,
        app: str,
        static: ComponentSets,
        patterns: Sequence[UrlPattern],
        urls: Iterable[str],
    ) -> AppComparison:
        """
        1アプリ分の比較

        Args:
            app: アプリ名
            static: 静的抽出の集合(S)
            patterns: 静的抽出のパターン（URL単位の対応付けに使う）
            urls: 観測URL

        Returns:
            AppComparison
        """
        unique = sorted(set(urls))
        dynamic, skipped = components_from_urls(unique)
        report = compare_components(dynamic, static)
        matched = matched_urls(unique, patterns, self.holes_may_be_empty)
        return AppComparison(app, report, len(unique), len(matched), skipped)

    def compare(
        self,
        static: Mapping[str, Tuple[ComponentSets, Sequence[UrlPattern]]],
        dynamic: Mapping[str, Sequence[str]],
        failed: Iterable[str] = (),
    ) -> ComparisonResult:
        """
        アプリ単位で比較する

        どちらか一方でも失敗した単位は両方から除外する。

        Args:
            static: アプリ名 → (S集合, パターン)
            dynamic: アプリ名 → 観測URL
            failed: 静的・動的いずれかで失敗した単位名

        Returns:
            ComparisonResult（行はアプリ名順）
        """
        failed_set = set(failed)
        names = sorted((set(static) | set(dynamic)) - failed_set)
        excluded = sorted(failed_set)

        rows = []
        for app in names:
            sets, patterns = static.get(app, (ComponentSets(), ()))
            rows.append(self.compare_app(app, sets, patterns, dynamic.get(app, ())))
            logger.debug(f"比較完了: {app}")

        logger.info(f"比較完了: {len(rows)}アプリ (除外{len(excluded)}件)")
        return ComparisonResult(tuple(rows), tuple(excluded))
