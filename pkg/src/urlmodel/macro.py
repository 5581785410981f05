"""
アプリ横断のマクロ統計

アプリごとのユニークドメイン数・ドメインごとの利用アプリ数のヒストグラム、
上位ドメイン表、IPアドレスのドメイン、秘密鍵らしきキー、最長パターンを集計する。
"""
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence, Set, Tuple
from ..strana.automaton import HOLE_TEXT
from .components import ComponentSets
from .pattern import UrlPattern
from .scans import is_ip_domain, scan_secrets


@dataclass(frozen=True)
class AppExtraction:
    """マクロ集計の入力となる1アプリ分の結果"""
    app: str
    components: ComponentSets
    patterns: Tuple[UrlPattern, ...] = ()


@dataclass(frozen=True)
class MacroReport:
    domains_per_app: Tuple[Tuple[int, int], ...] = ()
    apps_per_domain: Tuple[Tuple[int, int], ...] = ()
    domain_app_counts: Dict[str, int] = field(default_factory=dict)
    top_domains: Tuple[Tuple[str, int], ...] = ()
    ip_domains: Tuple[str, ...] = ()
    single_app_ip_domains: int = 0
    secrets: Tuple[Tuple[str, str, str, str, str], ...] = ()
    longest_patterns: Tuple[Tuple[str, int, str], ...] = ()
    app_count: int = 0
    mean_domains_per_app: float = 0.0
    median_domains_per_app: float = 0.0
    single_app_domains: int = 0
    single_app_share: float = 0.0

    def to_dict(self, decimals: int = 1) -> Dict[str, Any]:
        return {
            "apps": self.app_count,
            "domains": len(self.domain_app_counts),
            "domains_per_app": [list(row) for row in self.domains_per_app],
            "apps_per_domain": [list(row) for row in self.apps_per_domain],
            "top_domains": [{"domain": d, "apps": n} for d, n in self.top_domains],
            "ip_domains": {
                "total": len(self.ip_domains),
                "single_app": self.single_app_ip_domains,
                "domains": list(self.ip_domains),
            },
            "secrets": [
                {"app": app, "domain": d, "path": p, "key": k, "value": v}
                for app, d, p, k, v in self.secrets
            ],
            "longest_patterns": [
                {"app": app, "length": length, "pattern": raw} for app, length, raw in self.longest_patterns
            ],
            "mean_domains_per_app": round(self.mean_domains_per_app, decimals),
            "median_domains_per_app": round(self.median_domains_per_app, decimals),
            "single_app_domains": self.single_app_domains,
            "single_app_share": round(self.single_app_share, decimals),
        }


def is_hole_domain(domain: str) -> bool:
    return HOLE_TEXT in domain


def _histogram(values: Iterable[int]) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(Counter(values).items()))


def macro_statistics(
    apps: Sequence[AppExtraction],
    top_n: int = 10,
    excluded_domains: Iterable[str] = (),
    longest: int = 5,
) -> MacroReport:
    """
    アプリ横断の統計を集計する

    Holeを含むドメインは具体的なドメインではないため集計から除く。

    Args:
        apps: アプリごとの抽出結果（同じアプリ名は統合する）
        top_n: 上位ドメイン表の件数
        excluded_domains: 上位表から除くドメイン（リクエストにならないもの）
        longest: 最長パターンの件数

    Returns:
        MacroReport
    """
    merged: Dict[str, ComponentSets] = {}
    patterns: Dict[str, List[UrlPattern]] = {}
    for item in apps:
        merged[item.app] = merged.get(item.app, ComponentSets()).union(item.components)
        patterns.setdefault(item.app, []).extend(item.patterns)

    domains_of: Dict[str, Set[str]] = {
        app: {d for d in sets.domains if not is_hole_domain(d)} for app, sets in merged.items()
    }
    users: Counter = Counter()
    for domains in domains_of.values():
        users.update(domains)

    excluded = set(excluded_domains)
    ranked = sorted(users.items(), key=lambda item: (-item[1], item[0]))
    top = tuple((d, n) for d, n in ranked if d not in excluded)[:top_n]

    ip_domains = tuple(sorted(d for d in users if is_ip_domain(d)))
    single_app = [d for d, n in users.items() if n == 1]

    secrets = tuple(sorted(
        (app, *item) for app, sets in merged.items() for item in scan_secrets(sets)
    ))

    lengths = sorted(
        {(app, len(p.raw), p.raw) for app, items in patterns.items() for p in items},
        key=lambda item: (-item[1], item[2], item[0]),
    )

    per_app = [len(domains) for domains in domains_of.values()]
    return MacroReport(
        domains_per_app=_histogram(per_app),
        apps_per_domain=_histogram(users.values()),
        domain_app_counts=dict(sorted(users.items())),
        top_domains=top,
        ip_domains=ip_domains,
        single_app_ip_domains=sum(1 for d in ip_domains if users[d] == 1),
        secrets=secrets,
        longest_patterns=tuple(lengths[:longest]),
        app_count=len(merged),
        mean_domains_per_app=statistics.mean(per_app) if per_app else 0.0,
        median_domains_per_app=float(statistics.median(per_app)) if per_app else 0.0,
        single_app_domains=len(single_app),
        single_app_share=100.0 * len(single_app) / len(users) if users else 0.0,
    )
