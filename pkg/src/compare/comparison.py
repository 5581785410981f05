"""
動的(D)・静的(S)コンポーネント集合の比較

各階層で D∪S を「Dのみ」「両方」「Sのみ」に分割する。
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple
from ..urlmodel.components import LEVELS, ComponentSets, decompose
from ..urlmodel.pattern import UrlPattern, parse_concrete
from ..utils.exceptions import Unparseable
from .matcher import PatternMatcher

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelPartition:
    d_only: FrozenSet[tuple] = frozenset()
    both: FrozenSet[tuple] = frozenset()
    s_only: FrozenSet[tuple] = frozenset()

    def counts(self) -> Tuple[int, int, int]:
        return len(self.d_only), len(self.both), len(self.s_only)


@dataclass(frozen=True)
class ComparisonReport:
    """階層ごとの分割結果"""
    levels: Mapping[str, LevelPartition] = field(default_factory=dict)

    def level(self, name: str) -> LevelPartition:
        return self.levels.get(name, LevelPartition())

    def counts(self) -> Dict[str, Dict[str, int]]:
        """4×3のカウント表"""
        table = {}
        for name in LEVELS:
            d_only, both, s_only = self.level(name).counts()
            table[name] = {"d_only": d_only, "both": both, "s_only": s_only}
        return table

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"counts": self.counts(), "members": {}}
        for name in LEVELS:
            partition = self.level(name)
            data["members"][name] = {
                "d_only": _sorted_members(name, partition.d_only),
                "both": _sorted_members(name, partition.both),
                "s_only": _sorted_members(name, partition.s_only),
            }
        return data


def _sorted_members(level: str, items: Iterable) -> List:
    if level == "domains":
        return sorted(items)
    return [list(item) for item in sorted(items)]


def compare_components(dynamic: ComponentSets, static: ComponentSets) -> ComparisonReport:
    """
    DとSを階層ごとに分割する

    Args:
        dynamic: 動的に観測したURLから得た集合(D)
        static: 静的に抽出したパターンから得た集合(S)

    Returns:
        ComparisonReport
    """
    levels = {}
    for name in LEVELS:
        d = dynamic.level(name)
        s = static.level(name)
        levels[name] = LevelPartition(d_only=d - s, both=d & s, s_only=s - d)
    return ComparisonReport(levels)


def sum_counts(reports: Iterable[ComparisonReport]) -> Dict[str, Dict[str, int]]:
    """アプリごとのカウントを合計した表（Total行）"""
    total = {name: {"d_only": 0, "both": 0, "s_only": 0} for name in LEVELS}
    for report in reports:
        for name, row in report.counts().items():
            for column, value in row.items():
                total[name][column] += value
    return total


def parse_urls(urls: Iterable[str]) -> Tuple[List[Tuple[str, UrlPattern]], int]:
    """具体的なURL文字列を解析する（解析できないものは数えて除く）"""
    parsed = []
    skipped = 0
    for url in urls:
        try:
            parsed.append((url, parse_concrete(url)))
        except Unparseable as e:
            skipped += 1
            logger.debug(f"解析できないURLを除外: {url!r} ({str(e)})")
    return parsed, skipped


def components_from_urls(urls: Iterable[str]) -> Tuple[ComponentSets, int]:
    """
    観測URLからD集合を作る

    Returns:
        (ComponentSets, 解析できずに除いたURL数)
    """
    parsed, skipped = parse_urls(urls)
    return decompose(pattern for _, pattern in parsed), skipped


def matched_urls(
    urls: Iterable[str],
    patterns: Sequence[UrlPattern],
    holes_may_be_empty: bool = False,
) -> FrozenSet[str]:
    """少なくとも1つのパターンに一致するユニークURL"""
    matchers = [PatternMatcher(pattern, holes_may_be_empty) for pattern in patterns]
    parsed, _ = parse_urls(set(urls))
    return frozenset(
        url for url, concrete in parsed
        if any(matcher.matches(concrete) for matcher in matchers)
    )
