"""
オートマトンと定数からのURLパターン抽出
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple
from ..sir.ir import Append, Format, Literal, ProgramIR
from ..strana.automaton import Hole, Lit, StringAutomaton, language_of, linear_automaton
from ..strana.formats import format_literals
from ..utils.exceptions import Unparseable
from .components import ComponentSets, decompose
from .pattern import UrlPattern, is_url_prefixed, parse_pattern

logger = logging.getLogger(__name__)

_PREFIXES = ("http://", "https://")


@dataclass(frozen=True)
class PatternSet:
    """パターン列挙の結果。patternsは構造で重複除去済み（初出順）"""
    patterns: Tuple[UrlPattern, ...] = ()
    discarded: int = 0
    truncated: bool = False


@dataclass(frozen=True)
class PatternRecord:
    """出力用のパターン1件（由来のメソッドとサイト付き）"""
    method: str
    site: int
    pattern: UrlPattern
    origin: str = "automaton"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "site": self.site,
            "pattern": self.pattern.raw,
            "holes": self.pattern.holes,
            "origin": self.origin,
        }


@dataclass(frozen=True)
class StaticExtraction:
    """1プログラム分の静的抽出結果"""
    records: Tuple[PatternRecord, ...] = ()
    automata: Tuple[Tuple[str, int, StringAutomaton], ...] = ()
    discarded: int = 0
    truncated: bool = False

    @property
    def patterns(self) -> Tuple[UrlPattern, ...]:
        return tuple(record.pattern for record in self.records)

    def components(self) -> ComponentSets:
        return decompose(self.patterns)


def _could_become_url(prefix: str) -> bool:
    lowered = prefix.lower()
    return any(candidate.startswith(lowered) for candidate in _PREFIXES)


def is_url_automaton(automaton: StringAutomaton) -> bool:
    """
    entryからのLit接頭辞がURLになりうるか

    entry辺がHoleなら除外できないので残す。
    """
    stack: List[Tuple[int, str]] = [(automaton.entry, "")]
    while stack:
        state, prefix = stack.pop()
        for edge in automaton.outgoing(state):
            if isinstance(edge.label, Hole):
                if state == automaton.entry:
                    return True
                continue
            extended = prefix + edge.label.text
            if is_url_prefixed(extended):
                return True
            if _could_become_url(extended):
                stack.append((edge.dst, extended))
    return False


def filter_url_automata(automata: Iterable[StringAutomaton]) -> List[StringAutomaton]:
    """明らかにURLでないオートマトンを除く"""
    return [automaton for automaton in automata if is_url_automaton(automaton)]


def _dedupe(patterns: Iterable[UrlPattern]) -> Tuple[UrlPattern, ...]:
    seen = set()
    unique = []
    for pattern in patterns:
        if pattern not in seen:
            seen.add(pattern)
            unique.append(pattern)
    return tuple(unique)


def patterns_of(automaton: StringAutomaton, cap: int) -> PatternSet:
    """
    オートマトンの言語をURLパターンとして解釈する

    Args:
        automaton: filter_url_automataを通過したオートマトン
        cap: 列挙の上限

    Returns:
        PatternSet（解析できない列はdiscardedに数える）
    """
    language = language_of(automaton, cap)
    patterns = []
    discarded = 0
    for sequence in language.sequences:
        try:
            patterns.append(parse_pattern(sequence))
        except Unparseable as e:
            discarded += 1
            logger.debug(f"URLとして解釈できない列を破棄: {str(e)}")
    return PatternSet(_dedupe(patterns), discarded, language.truncated)


def constant_literals(program: ProgramIR) -> List[Tuple[str, int, str]]:
    """
    プログラム中の全リテラル (メソッド名, 命令ID, 文字列)

    appendのリテラル、formatのリテラル引数とテンプレートのリテラル区間を集める。
    """
    literals = []
    for method in program.methods:
        for iid, instruction in method.instructions():
            if isinstance(instruction, Append) and isinstance(instruction.operand, Literal):
                literals.append((method.name, iid, instruction.operand.text))
            elif isinstance(instruction, Format):
                for segment in format_literals(instruction.template):
                    literals.append((method.name, iid, segment))
                for arg in instruction.args:
                    if isinstance(arg, Literal):
                        literals.append((method.name, iid, arg.text))
    return literals


def _constant_records(program: ProgramIR) -> Tuple[List[PatternRecord], int]:
    records = []
    discarded = 0
    for method_name, iid, text in constant_literals(program):
        if not is_url_prefixed(text):
            continue
        try:
            pattern = parse_pattern((Lit(text),))
        except Unparseable as e:
            discarded += 1
            logger.debug(f"URL定数を破棄: {text!r} ({str(e)})")
            continue
        records.append(PatternRecord(method_name, iid, pattern, origin="constant"))
    return records, discarded


def extract_constants(program: ProgramIR) -> PatternSet:
    """
    定数抽出（連結を考慮しないベースライン）

    Args:
        program: 解析済みプログラム

    Returns:
        http:// または https:// で始まるリテラルから得たPatternSet
    """
    records, discarded = _constant_records(program)
    return PatternSet(_dedupe(record.pattern for record in records), discarded, False)


def constant_extraction(program: ProgramIR) -> StaticExtraction:
    """extract_constantsと同じ結果を出力用レコード付きで返す"""
    records, discarded = _constant_records(program)
    return StaticExtraction(records=tuple(_dedupe_records(records)), discarded=discarded)


def _dedupe_records(records: Iterable[PatternRecord]) -> List[PatternRecord]:
    seen = set()
    unique = []
    for record in records:
        if record.pattern not in seen:
            seen.add(record.pattern)
            unique.append(record)
    return unique


def extract_static(
    program: ProgramIR,
    site_automata: Sequence[Tuple[str, int, StringAutomaton]],
    cap: int,
) -> StaticExtraction:
    """
    サイトごとのオートマトンからURLパターンを抽出し、URL定数で補う

    定数は1辺のオートマトンとして扱い、そのコンポーネントが既存のパターンで
    覆われていない場合にだけ追加する。

    Args:
        program: 解析済みプログラム
        site_automata: (メソッド名, サイト, オートマトン) の列
        cap: オートマトンごとの列挙上限

    Returns:
        StaticExtraction
    """
    records: List[PatternRecord] = []
    kept: List[Tuple[str, int, StringAutomaton]] = []
    discarded = 0
    truncated = False
    for method_name, site, automaton in site_automata:
        if not is_url_automaton(automaton):
            continue
        kept.append((method_name, site, automaton))
        result = patterns_of(automaton, cap)
        discarded += result.discarded
        truncated = truncated or result.truncated
        records.extend(PatternRecord(method_name, site, pattern) for pattern in result.patterns)

    records = _dedupe_records(records)
    covered = decompose(record.pattern for record in records)
    constants, constant_discards = _constant_records(program)
    for record in _dedupe_records(constants):
        components = decompose([record.pattern])
        if components.issubset(covered):
            continue
        records.append(record)
        kept.append((record.method, record.site, linear_automaton([Lit(record.pattern.raw)])))
        covered = covered.union(components)

    logger.debug(
        f"静的抽出: {program.source_name} ({len(records)}パターン, 破棄{discarded + constant_discards}件)"
    )
    return StaticExtraction(
        records=tuple(_dedupe_records(records)),
        automata=tuple(kept),
        discarded=discarded + constant_discards,
        truncated=truncated,
    )
