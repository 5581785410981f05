"""
URLパターンと具体的なURLの照合

Holeはそれが現れるコンポーネントに応じた文字クラスのワイルドカードになる。
"""
import re
from typing import List, Optional, Pattern, Sequence, Tuple
from ..strana.automaton import Hole, TokenSequence, render_tokens
from ..urlmodel.pattern import UrlPattern

DOMAIN_HOLE = "[^/?#]"
SEGMENT_HOLE = "[^/?]"
WHOLE_PATH_HOLE = "[^?]"
KEY_HOLE = "[^&=]"
VALUE_HOLE = "[^&]"


def _compile(tokens: TokenSequence, hole_class: str, quantifier: str) -> Pattern:
    parts = []
    for token in tokens:
        if isinstance(token, Hole):
            parts.append(hole_class + quantifier)
        else:
            parts.append(re.escape(token.text))
    return re.compile("".join(parts))


def _is_whole_path_hole(path: Tuple[TokenSequence, ...]) -> bool:
    return len(path) == 1 and len(path[0]) == 1 and isinstance(path[0][0], Hole)


class PatternMatcher:
    """1つのURLパターンをコンパイルした照合器"""

    def __init__(self, pattern: UrlPattern, holes_may_be_empty: bool = False):
        """
        初期化

        Args:
            pattern: 照合に使うパターン
            holes_may_be_empty: Holeが空文字列に一致してよいか
        """
        self.pattern = pattern
        quantifier = "*" if holes_may_be_empty else "+"
        self.domain = _compile(pattern.domain, DOMAIN_HOLE, quantifier)
        self.whole_path: Optional[Pattern] = None
        self.segments: List[Pattern] = []
        if _is_whole_path_hole(pattern.path):
            self.whole_path = re.compile("/" + WHOLE_PATH_HOLE + quantifier)
        else:
            self.segments = [_compile(segment, SEGMENT_HOLE, quantifier) for segment in pattern.path]
        self.pairs: List[Tuple[Pattern, Optional[Pattern]]] = [
            (
                _compile(key, KEY_HOLE, quantifier),
                _compile(value, VALUE_HOLE, quantifier) if value is not None else None,
            )
            for key, value in pattern.query
        ]

    def matches(self, url: UrlPattern) -> bool:
        """具体的なURL（Holeなし）がパターンに一致するか"""
        if url.protocol != self.pattern.protocol:
            return False
        if not self.domain.fullmatch(url.domain_key):
            return False
        if not self._path_matches(url):
            return False
        url_pairs = [
            (render_tokens(key), render_tokens(value) if value is not None else "")
            for key, value in url.query
        ]
        return all(self._pair_present(key, value, url_pairs) for key, value in self.pairs)

    def _path_matches(self, url: UrlPattern) -> bool:
        if self.whole_path is not None:
            return bool(self.whole_path.fullmatch(url.path_key))
        if len(url.path) != len(self.segments):
            return False
        return all(
            regex.fullmatch(render_tokens(segment))
            for regex, segment in zip(self.segments, url.path)
        )

    @staticmethod
    def _pair_present(key: Pattern, value: Optional[Pattern], url_pairs: Sequence[Tuple[str, str]]) -> bool:
        for url_key, url_value in url_pairs:
            if not key.fullmatch(url_key):
                continue
            if value is None:
                if url_value == "":
                    return True
            elif value.fullmatch(url_value):
                return True
        return False


def match_url(url: UrlPattern, pattern: UrlPattern, holes_may_be_empty: bool = False) -> bool:
    """
    具体的なURLがパターンに一致するか

    URL側の余分なクエリペアは許すが、パターン側のペアはすべてURLに必要。
    """
    return PatternMatcher(pattern, holes_may_be_empty).matches(url)
