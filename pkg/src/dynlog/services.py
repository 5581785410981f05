"""
ログ解析サービス層 - ログ読み込み・広告判定・集計の統合管理
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union
from ..utils.config import ConfigManager
from ..utils.exceptions import LogError
from ..utils.parallel import run_parallel
from .adlist import load_ad_list
from .records import LogLoadResult, assign_app, load_log
from .summary import LogSummary, merge_summaries, summarize

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class DynStatsResult:
    """複数ログファイルの集計結果"""
    summary: LogSummary
    errors: Tuple[Tuple[str, int, str], ...] = ()


class DynLogService:
    """ログ解析サービスクラス"""

    def __init__(self, config_manager: ConfigManager):
        """
        初期化

        Args:
            config_manager: 設定管理インスタンス
        """
        self.config_manager = config_manager
        self.dynlog_config = config_manager.get_dynlog_config()
        self.bucket_seconds = int(self.dynlog_config["timeline"].get("bucket_seconds", 1))
        if self.bucket_seconds < 1:
            raise LogError(f"bucket_secondsは1以上が必要です: {self.bucket_seconds}")
        self.share_decimals = int(self.dynlog_config["report"].get("share_decimals", 1))
        self.concentration_share = float(self.dynlog_config["report"].get("concentration_share", 50.0))

        logger.info(f"ログ解析サービスを初期化 (区間幅: {self.bucket_seconds}秒)")

    def load_ads(self, path: Optional[PathLike] = None) -> FrozenSet[str]:
        """
        広告リストを読み込む（指定がなければ設定の既定リスト、それもなければ空）

        Raises:
            LogError: ファイルを読めない場合
        """
        path = path or self.dynlog_config["ads"].get("default_list")
        if not path:
            return frozenset()
        return load_ad_list(path)

    def analyze(
        self,
        paths: Sequence[PathLike],
        ad_hosts: FrozenSet[str] = frozenset(),
        jobs: int = 1,
        show_progress: bool = False,
        units: Optional[Sequence[str]] = None,
    ) -> DynStatsResult:
        """
        ログファイル群を読み込んで集計する（ファイル単位で並列、結合は可換）

        Args:
            paths: ログファイル
            ad_hosts: 広告ドメイン集合
            jobs: ワーカー数
            show_progress: 進捗バーを表示するか
            units: ファイルごとの単位名（appのないレコードの割り当て先、省略時は拡張子を除いたファイル名）

        Returns:
            DynStatsResult（読めないファイルはerrorsに行番号0で入る）
        """
        names = list(units) if units is not None else [Path(path).stem for path in paths]

        def work(item: Tuple[PathLike, str]):
            path, unit = item
            try:
                loaded = assign_app(load_log(path), unit)
            except LogError as e:
                # 読めないファイルは行番号0の取り込みエラーとして記録して続行
                logger.error(str(e))
                loaded = LogLoadResult((), ((0, str(e)),))
            return path, loaded, summarize(loaded.records, ad_hosts, self.bucket_seconds)

        results = run_parallel(work, list(zip(paths, names)), jobs=jobs, desc="ログ集計中", show_progress=show_progress)

        errors: List[Tuple[str, int, str]] = []
        for path, loaded, _ in results:
            errors.extend((str(path), line_no, reason) for line_no, reason in loaded.errors)
        summary = merge_summaries(partial for _, _, partial in results)

        logger.info(f"ログ集計完了: {len(paths)}ファイル, {summary.total}件, 取り込みエラー{len(errors)}件")
        return DynStatsResult(summary, tuple(errors))

    def report(self, summary: LogSummary) -> dict:
        return summary.to_dict(self.share_decimals, self.concentration_share)
