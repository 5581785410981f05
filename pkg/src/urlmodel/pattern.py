"""
URLパターンのモデルとパーサー

URLパターンはプロトコル・ドメイン・パス・クエリに分解され、各部分は
リテラルとプレースホルダ(Hole)のトークン列で表す。Holeは "[ ]" と描画する。
"""
import logging
import re
import string
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union
from ..strana.automaton import HOLE_TEXT, EdgeLabel, Hole, Lit, TokenSequence, fuse, render_tokens
from ..utils.exceptions import Unparseable

logger = logging.getLogger(__name__)

PROTOCOLS = ("http", "https")

_UNRESERVED = set(string.ascii_letters + string.digits + "-._~")
_SUB_DELIMS = set("!$&'()*+,;=")
DOMAIN_CHARS = set(string.ascii_letters + string.digits + ".-:")
PATH_CHARS = _UNRESERVED | _SUB_DELIMS | set(":@")
QUERY_CHARS = _UNRESERVED | _SUB_DELIMS | set(":@/?")

_PORT_PATTERN = re.compile(r"^[^:]*(:(\d|\[ \])+)?$")

QueryPair = Tuple[TokenSequence, Optional[TokenSequence]]


@dataclass(frozen=True)
class UrlPattern:
    """
    構造化されたURLパターン

    path はセグメントのタプル（"" と "/" は区別する）、query は (キー, 値) のタプル。
    値が None のペアは "=" を持たないキーのみのペア。
    """
    protocol: str
    domain: TokenSequence
    path: Tuple[TokenSequence, ...] = ()
    query: Tuple[QueryPair, ...] = ()

    @property
    def raw(self) -> str:
        """正規形の文字列表現"""
        text = f"{self.protocol}://{self.domain_key}{self.path_key}"
        if self.query:
            text += "?" + "&".join(_render_pair(pair) for pair in self.query)
        return text

    @property
    def domain_key(self) -> str:
        return render_tokens(self.domain)

    @property
    def path_key(self) -> str:
        return "".join("/" + render_tokens(segment) for segment in self.path)

    @property
    def holes(self) -> List[str]:
        """出現順のHole記述子"""
        tokens: List[EdgeLabel] = list(self.domain)
        for segment in self.path:
            tokens.extend(segment)
        for key, value in self.query:
            tokens.extend(key)
            tokens.extend(value or ())
        return [token.descriptor for token in tokens if isinstance(token, Hole)]

    @property
    def has_holes(self) -> bool:
        return bool(self.holes)

    def __str__(self) -> str:
        return self.raw


def _render_pair(pair: QueryPair) -> str:
    key, value = pair
    if value is None:
        return render_tokens(key)
    return f"{render_tokens(key)}={render_tokens(value)}"


def tokens_from_text(text: str) -> TokenSequence:
    """描画済みパターン文字列を "[ ]" で分割してトークン列に戻す"""
    labels: List[EdgeLabel] = []
    for index, part in enumerate(text.split(HOLE_TEXT)):
        if index:
            labels.append(Hole(""))
        labels.append(Lit(part))
    return fuse(labels)


class _Accumulator:
    """1コンポーネント分のトークンを貯める"""

    def __init__(self):
        self.tokens: List[EdgeLabel] = []

    def add_char(self, char: str) -> None:
        if self.tokens and isinstance(self.tokens[-1], Lit):
            self.tokens[-1] = Lit(self.tokens[-1].text + char)
        else:
            self.tokens.append(Lit(char))

    def add_hole(self, hole: Hole) -> None:
        self.tokens.append(hole)

    def freeze(self) -> TokenSequence:
        return tuple(self.tokens)


def parse_pattern(tokens: Sequence[EdgeLabel]) -> UrlPattern:
    """
    トークン列をURLパターンに分解する

    Args:
        tokens: Lit/Holeの列（先頭は http:// か https:// で始まるLit）

    Returns:
        UrlPattern

    Raises:
        Unparseable: URLとして解釈できない場合（位置と理由付き）
    """
    tokens = fuse(tokens)
    if not tokens or not isinstance(tokens[0], Lit):
        raise Unparseable(0, "pattern must start with a literal protocol")

    head = tokens[0].text
    scheme, separator, _ = head.partition("://")
    if not separator or scheme.lower() not in PROTOCOLS:
        raise Unparseable(0, "protocol must be http or https")
    protocol = scheme.lower()

    stream: List[Union[str, Hole]] = list(head[len(scheme) + 3:])
    for token in tokens[1:]:
        if isinstance(token, Lit):
            stream.extend(token.text)
        else:
            stream.append(token)

    position = len(scheme) + 3
    domain = _Accumulator()
    segments: List[_Accumulator] = []
    pairs: List[Tuple[_Accumulator, Optional[_Accumulator]]] = []
    state = "domain"

    for item in stream:
        if state == "fragment":
            break
        if isinstance(item, Hole):
            if state == "domain":
                domain.add_hole(item)
            elif state == "path":
                segments[-1].add_hole(item)
            else:
                key, value = pairs[-1]
                (value or key).add_hole(item)
            position += len(HOLE_TEXT)
            continue

        char = item
        if char == "#":
            state = "fragment"
        elif state == "domain":
            if char == "/":
                state = "path"
                segments.append(_Accumulator())
            elif char == "?":
                state = "query"
                pairs.append((_Accumulator(), None))
            elif char == "@":
                raise Unparseable(position, "userinfo in authority is not supported")
            elif char in DOMAIN_CHARS:
                domain.add_char(char.lower())
            else:
                raise Unparseable(position, f"invalid character {char!r} in domain")
        elif state == "path":
            if char == "/":
                segments.append(_Accumulator())
            elif char == "?":
                state = "query"
                pairs.append((_Accumulator(), None))
            elif char in PATH_CHARS:
                segments[-1].add_char(char)
            else:
                raise Unparseable(position, f"invalid character {char!r} in path")
        else:
            key, value = pairs[-1]
            if char == "&":
                pairs.append((_Accumulator(), None))
            elif char == "=" and value is None:
                pairs[-1] = (key, _Accumulator())
            elif char in QUERY_CHARS:
                (value or key).add_char(char)
            else:
                raise Unparseable(position, f"invalid character {char!r} in query")
        position += 1

    domain_tokens = domain.freeze()
    if not domain_tokens:
        raise Unparseable(len(scheme) + 3, "empty domain")
    if not _PORT_PATTERN.match(render_tokens(domain_tokens)):
        raise Unparseable(len(scheme) + 3, "port must be digits after a single ':'")

    query = tuple(
        (key.freeze(), value.freeze() if value is not None else None)
        for key, value in pairs
        if key.tokens or value is not None
    )
    return UrlPattern(
        protocol=protocol,
        domain=domain_tokens,
        path=tuple(segment.freeze() for segment in segments),
        query=query,
    )


def parse_url(text: str) -> UrlPattern:
    """具体的なURL文字列、または描画済みパターン文字列を解析"""
    return parse_pattern(tokens_from_text(text))


def is_url_prefixed(text: str) -> bool:
    """大文字小文字を区別せず http:// か https:// で始まるか"""
    lowered = text.lower()
    return lowered.startswith("http://") or lowered.startswith("https://")


def parse_concrete(text: str) -> UrlPattern:
    """具体的なURL文字列を解析（"[ ]" もリテラルとして扱うため不正になる）"""
    return parse_pattern((Lit(text),))
