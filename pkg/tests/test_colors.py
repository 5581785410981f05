"""
カラー出力ユーティリティのテスト
"""
import io
import pytest
from src.utils.colors import (
    Colors, colorize, success, error, warning, info,
    highlight, ColorPrinter
)


class TestColors:
    """カラー出力テストクラス"""

    def test_colors_constants(self):
        """カラー定数のテスト"""
        assert Colors.RED is not None
        assert Colors.GREEN is not None
        assert Colors.YELLOW is not None
        assert Colors.BLUE is not None
        assert Colors.RESET is not None

    def test_colorize_basic(self):
        """基本的なカラー化テスト"""
        text = "テストテキスト"
        colored = colorize(text, Colors.RED)

        # カラーコードが含まれているかチェック
        assert text in colored
        assert colored.endswith(Colors.RESET)

    def test_success_message(self):
        """成功メッセージテスト"""
        result = success("テスト成功")
        assert "テスト成功" in result
        assert "✅" in result

    def test_error_message(self):
        """エラーメッセージテスト"""
        result = error("テストエラー")
        assert "テストエラー" in result
        assert "❌" in result

    def test_warning_message(self):
        """警告メッセージテスト"""
        result = warning("テスト警告")
        assert "テスト警告" in result
        assert "⚠️" in result

    def test_info_message(self):
        """情報メッセージテスト"""
        result = info("テスト情報")
        assert "テスト情報" in result
        assert "ℹ️" in result

    def test_no_color_env(self, monkeypatch):
        """NO_COLORが設定されていればカラー無効"""
        monkeypatch.setenv("NO_COLOR", "1")
        assert Colors.is_color_supported() is False


class TestColorPrinter:
    """ColorPrinterテストクラス"""

    def test_color_printer_initialization(self):
        """ColorPrinter初期化テスト"""
        assert ColorPrinter(True).color_enabled is True
        assert ColorPrinter(False).color_enabled is False
        # ttyでないストリームは自動判定で無効
        assert ColorPrinter(None, stream=io.StringIO()).color_enabled in (False, True)

    def test_plain_messages(self, capsys):
        """カラー無効時は絵文字の接頭辞だけを付ける"""
        printer = ColorPrinter(False)
        printer.print_success("完了")
        printer.print_info("情報")
        printer.print_error("失敗")
        printer.print_warning("注意")

        captured = capsys.readouterr()
        assert captured.out == "✅ 完了\nℹ️ 情報\n"
        assert captured.err == "❌ 失敗\n⚠️ 注意\n"

    def test_header_and_result(self, capsys):
        printer = ColorPrinter(False)
        printer.print_header("集計")
        printer.print_result("件数", 3)
        assert capsys.readouterr().out == "=== 集計 ===\n件数: 3\n"

    def test_print_table(self, capsys):
        """列幅をそろえて出力する"""
        printer = ColorPrinter(False)
        printer.print_table(("level", "count"), [("domains", 1), ("path_pairs", 12)])
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "level       count"
        assert lines[1] == "domains     1    "
        assert lines[2] == "path_pairs  12   "

    def test_explicit_stream(self):
        stream = io.StringIO()
        ColorPrinter(False, stream=stream).print_error("失敗")
        assert stream.getvalue() == "❌ 失敗\n"

    def test_color_enabled(self, capsys):
        """カラー有効時はカラーコード付き"""
        ColorPrinter(True).print_success("カラーテスト")
        out = capsys.readouterr().out
        assert "カラーテスト" in out
        assert Colors.GREEN in out


class TestColorUtilities:
    """カラーユーティリティ関数テスト"""

    def test_highlight_function(self):
        """ハイライト機能テスト"""
        result = highlight("ハイライトテスト")
        assert "ハイライトテスト" in result
        assert Colors.MAGENTA in result

    def test_colorize_with_style(self):
        text = "複合テスト"
        result = colorize(text, Colors.RED, Colors.BRIGHT)
        assert result.startswith(Colors.BRIGHT + Colors.RED)

    def test_colorize_empty_text(self):
        """空文字列のカラー化テスト"""
        result = colorize("", Colors.RED)
        assert isinstance(result, str)

    def test_color_support_detection(self):
        """カラーサポート検出テスト"""
        try:
            is_supported = Colors.is_color_supported()
            assert isinstance(is_supported, bool)
        except Exception as e:
            pytest.fail(f"カラーサポート検出でエラー: {e}")
