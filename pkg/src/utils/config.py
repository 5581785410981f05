"""
設定管理ユーティリティ
"""
import json
import logging
from pathlib import Path
from typing import Dict, Any, Optional
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

LOOP_SEMANTICS = ("zero_or_one", "exactly_one")
OUTPUT_FORMATS = ("json", "csv", "both")

_CONFIG_FILES = {
    "analysis": "analysis_config.json",
    "dynlog": "dynlog_config.json",
    "logging": "logging_config.json",
}


class ConfigManager:
    """設定ファイル管理クラス"""

    def __init__(self, config_dir: Optional[str] = None):
        """
        初期化

        Args:
            config_dir: 設定ファイルディレクトリのパス
        """
        if config_dir:
            self.config_dir = Path(config_dir)
        else:
            # プロジェクトルートのconfigディレクトリを使用
            project_root = Path(__file__).parent.parent.parent
            self.config_dir = project_root / "config"

        self._configs: Dict[str, Dict[str, Any]] = {}

        logger.info(f"設定管理を初期化: {self.config_dir}")

    def get_analysis_config(self) -> Dict[str, Any]:
        """
        静的解析・出力・マクロ集計の設定を取得

        Returns:
            解析設定辞書

        Raises:
            ConfigError: 設定ファイル読み込みエラー時
        """
        return self._get("analysis")

    def get_dynlog_config(self) -> Dict[str, Any]:
        """
        リクエストログ集計の設定を取得

        Returns:
            ログ集計設定辞書

        Raises:
            ConfigError: 設定ファイル読み込みエラー時
        """
        return self._get("dynlog")

    def get_logging_config(self) -> Dict[str, Any]:
        """
        ログ設定を取得（dictConfig形式）

        Returns:
            ログ設定辞書

        Raises:
            ConfigError: 設定ファイル読み込みエラー時
        """
        return self._get("logging")

    def _get(self, config_type: str) -> Dict[str, Any]:
        if config_type not in self._configs:
            self._configs[config_type] = self._load_config(_CONFIG_FILES[config_type])
        return self._configs[config_type]

    def _load_config(self, filename: str) -> Dict[str, Any]:
        """
        設定ファイルを読み込み

        Args:
            filename: 設定ファイル名

        Returns:
            設定辞書

        Raises:
            ConfigError: ファイル読み込みエラー時
        """
        config_path = self.config_dir / filename

        if not config_path.exists():
            raise ConfigError(f"設定ファイルが見つかりません: {config_path}")

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config = json.load(f)

            logger.debug(f"設定ファイル読み込み成功: {filename}")
            return config

        except json.JSONDecodeError as e:
            raise ConfigError(f"JSON解析エラー in {filename}: {str(e)}")
        except Exception as e:
            raise ConfigError(f"設定ファイル読み込みエラー {filename}: {str(e)}")

    def update_config(self, config_type: str, updates: Dict[str, Any]) -> None:
        """
        設定を更新して保存

        Args:
            config_type: 設定タイプ ("analysis", "dynlog", "logging")
            updates: 更新する設定項目

        Raises:
            ConfigError: 設定更新エラー時
        """
        if config_type not in _CONFIG_FILES:
            raise ConfigError(f"不明な設定タイプ: {config_type}")

        config = self._get(config_type)
        config.update(updates)
        self._save_config(_CONFIG_FILES[config_type], config)

    def _save_config(self, filename: str, config: Dict[str, Any]) -> None:
        """
        設定ファイルを保存

        Args:
            filename: 設定ファイル名
            config: 設定辞書

        Raises:
            ConfigError: ファイル保存エラー時
        """
        config_path = self.config_dir / filename

        try:
            with open(config_path, 'w', encoding='utf-8') as f:
                json.dump(config, f, ensure_ascii=False, indent=2)

            logger.info(f"設定ファイル保存成功: {filename}")

        except Exception as e:
            raise ConfigError(f"設定ファイル保存エラー {filename}: {str(e)}")

    def validate_config(self) -> bool:
        """
        全設定ファイルの妥当性をチェック

        Returns:
            全設定が有効な場合True
        """
        try:
            analysis_config = self.get_analysis_config()
            dynlog_config = self.get_dynlog_config()
            self.get_logging_config()

            # 必須設定項目のチェック
            for section in ("analysis", "output", "macro"):
                if section not in analysis_config:
                    logger.error(f"解析設定が不完全です: {section}")
                    return False

            analysis = analysis_config["analysis"]
            if int(analysis.get("pattern_cap", 0)) < 1:
                logger.error(f"pattern_capは1以上が必要です: {analysis.get('pattern_cap')}")
                return False
            if int(analysis.get("frontier_cap", 0)) < 1:
                logger.error(f"frontier_capは1以上が必要です: {analysis.get('frontier_cap')}")
                return False
            if analysis.get("loop_semantics") not in LOOP_SEMANTICS:
                logger.error(f"不明なループ意味論: {analysis.get('loop_semantics')}")
                return False
            if analysis_config["output"].get("format") not in OUTPUT_FORMATS:
                logger.error(f"不明な出力形式: {analysis_config['output'].get('format')}")
                return False

            for section in ("timeline", "ads", "report"):
                if section not in dynlog_config:
                    logger.error(f"ログ集計設定が不完全です: {section}")
                    return False

            logger.info("全設定ファイルの妥当性チェック完了")
            return True

        except Exception as e:
            logger.error(f"設定妥当性チェックエラー: {str(e)}")
            return False
