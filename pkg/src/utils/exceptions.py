"""
カスタム例外クラス定義
"""
from typing import Optional


class UrlWeaverError(Exception):
    """urlweaverプロジェクトの基底例外クラス"""
    pass


class ConfigError(UrlWeaverError):
    """設定関連のエラー"""
    pass


class ValidationError(UrlWeaverError):
    """実行設定の検証エラー"""
    pass


class SirError(UrlWeaverError):
    """SIRプログラムの構文・構造エラー"""
    pass


class SirSyntaxError(SirError):
    """SIRテキストの構文エラー（行・列と期待トークンを保持）"""

    def __init__(self, message: str, line: int, column: int, expected: Optional[str] = None):
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"{line}:{column}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class UndefinedRegister(SirError):
    """定義前に参照されたレジスタ"""

    def __init__(self, register: str, method: str):
        self.register = register
        self.method = method
        super().__init__(f"register '{register}' is not defined on every path in method '{method}'")


class DuplicateMethod(SirError):
    """同名メソッドの重複定義"""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate method '{name}'")


class NestingTooDeep(SirError):
    """if/loopのネストが上限を超えた"""

    def __init__(self, depth: int, limit: int):
        self.depth = depth
        self.limit = limit
        super().__init__(f"nesting depth {depth} exceeds limit {limit}")


class AnalysisError(UrlWeaverError):
    """文字列解析処理関連のエラー"""
    pass


class UnknownBuilder(AnalysisError):
    """ビルダーを指していないレジスタへのappend/tostring"""

    def __init__(self, register: str, method: str):
        self.register = register
        self.method = method
        super().__init__(f"register '{register}' does not point to any builder in method '{method}'")


class FrontierExplosion(AnalysisError):
    """オートマトン構築中のフロンティアの状態数が上限を超えた"""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"automaton frontier grew to {count} states (cap {cap})")


class ArityMismatch(AnalysisError):
    """format指定子の数と引数の数が一致しない"""

    def __init__(self, expected: int, given: int):
        self.expected = expected
        self.given = given
        super().__init__(f"format template expects {expected} argument(s), got {given}")


class UnknownSpecifier(AnalysisError):
    """未対応のformat指定子"""

    def __init__(self, specifier: str, position: int):
        self.specifier = specifier
        self.position = position
        super().__init__(f"unknown format specifier '{specifier}' at offset {position}")


class UrlError(UrlWeaverError):
    """URL・URLパターン関連のエラー"""
    pass


class Unparseable(UrlError):
    """URLパターンとして解釈できない文字列"""

    def __init__(self, position: int, reason: str):
        self.position = position
        self.reason = reason
        super().__init__(f"unparseable at {position}: {reason}")


class LogError(UrlWeaverError):
    """リクエストログ・広告リストの読み込みエラー"""
    pass
