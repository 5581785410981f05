"""
カラー出力ユーティリティ
"""
import os
import sys
from typing import Iterable, Optional, Sequence, TextIO
from colorama import Fore, Style, init

# coloramaの初期化（Windows対応）
init()


class Colors:
    """カラー出力クラス"""

    RED = Fore.RED
    GREEN = Fore.GREEN
    YELLOW = Fore.YELLOW
    BLUE = Fore.BLUE
    MAGENTA = Fore.MAGENTA
    CYAN = Fore.CYAN
    WHITE = Fore.WHITE

    BRIGHT = Style.BRIGHT
    DIM = Style.DIM
    RESET = Style.RESET_ALL

    @staticmethod
    def is_color_supported(stream: Optional[TextIO] = None) -> bool:
        """
        カラー出力がサポートされているかチェック

        Args:
            stream: 出力先（Noneの場合は標準出力）

        Returns:
            カラー出力可能な場合True
        """
        if "NO_COLOR" in os.environ:
            return False
        stream = stream or sys.stdout
        return (
            hasattr(stream, "isatty") and stream.isatty() and sys.platform != "win32"
            or "ANSICON" in os.environ
            or "WT_SESSION" in os.environ  # Windows Terminal
        )


def colorize(text: str, color: str = "", style: str = "") -> str:
    """
    テキストをカラー化

    Args:
        text: カラー化するテキスト
        color: 文字色（Colors.REDなど）
        style: スタイル（Colors.BRIGHTなど）

    Returns:
        カラー化されたテキスト
    """
    return f"{style}{color}{text}{Colors.RESET}"


def success(text: str) -> str:
    """成功メッセージ（緑色）"""
    return colorize(f"✅ {text}", Colors.GREEN, Colors.BRIGHT)


def error(text: str) -> str:
    """エラーメッセージ（赤色）"""
    return colorize(f"❌ {text}", Colors.RED, Colors.BRIGHT)


def warning(text: str) -> str:
    """警告メッセージ（黄色）"""
    return colorize(f"⚠️ {text}", Colors.YELLOW, Colors.BRIGHT)


def info(text: str) -> str:
    """情報メッセージ（青色）"""
    return colorize(f"ℹ️ {text}", Colors.BLUE, Colors.BRIGHT)


def highlight(text: str) -> str:
    """ハイライト（マゼンタ色）"""
    return colorize(text, Colors.MAGENTA, Colors.BRIGHT)


class ColorPrinter:
    """カラー対応のプリンタークラス"""

    def __init__(self, enable_color: Optional[bool] = None, stream: Optional[TextIO] = None):
        """
        初期化

        Args:
            enable_color: カラー出力を強制的に有効/無効化（Noneで自動判定）
            stream: 出力先（Noneの場合は呼び出し時点の標準出力）
        """
        self.stream = stream
        if enable_color is None:
            self.color_enabled = Colors.is_color_supported(stream)
        else:
            self.color_enabled = enable_color

    def _write(self, text: str, to_stderr: bool = False) -> None:
        stream = self.stream or (sys.stderr if to_stderr else sys.stdout)
        print(text, file=stream)

    def _emit(self, colored, plain: str, to_stderr: bool = False) -> None:
        self._write(colored(plain) if self.color_enabled else _plain_prefix(colored, plain), to_stderr)

    def print_success(self, message: str) -> None:
        """成功メッセージを出力"""
        self._emit(success, message)

    def print_error(self, message: str) -> None:
        """エラーメッセージを標準エラーに出力"""
        self._emit(error, message, to_stderr=True)

    def print_warning(self, message: str) -> None:
        """警告メッセージを標準エラーに出力"""
        self._emit(warning, message, to_stderr=True)

    def print_info(self, message: str) -> None:
        self._emit(info, message)

    def print_header(self, message: str) -> None:
        """見出しを出力"""
        if self.color_enabled:
            self._write(highlight(f"=== {message} ==="))
        else:
            self._write(f"=== {message} ===")

    def print_result(self, title: str, content: object) -> None:
        """「項目: 値」の形式で出力"""
        if self.color_enabled:
            self._write(f"{highlight(title)}: {content}")
        else:
            self._write(f"{title}: {content}")

    def print_table(self, headers: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
        """列幅をそろえた簡易表を出力"""
        rows = [[str(cell) for cell in row] for row in rows]
        widths = [len(h) for h in headers]
        for row in rows:
            widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
        line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
        self._write(highlight(line) if self.color_enabled else line)
        for row in rows:
            self._write("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


_PREFIXES = {success: "✅", error: "❌", warning: "⚠️", info: "ℹ️"}


def _plain_prefix(colored, message: str) -> str:
    return f"{_PREFIXES[colored]} {message}"
