"""
CLIエントリーポイント
"""
import logging
import sys
from .cli import cli

logger = logging.getLogger(__name__)


def main():
    """
    urlweaverのエントリーポイント（python -m src / python -m src.cli）
    """
    try:
        cli(obj={}, prog_name="urlweaver")
    except KeyboardInterrupt:
        print("\n処理が中断されました。", file=sys.stderr)
        sys.exit(130)  # SIGINT
    except Exception as e:
        logger.exception(f"予期しないエラー: {str(e)}")
        print(f"エラーが発生しました: {str(e)}", file=sys.stderr)
        sys.exit(1)


if __name__ == '__main__':
    main()
