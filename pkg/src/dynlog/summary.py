"""
リクエストログの集計

集計結果はカウンタと集合だけで構成し、分割して集計したものを
merge_summariesで結合しても同じ結果になる。
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Tuple, TypeVar
from .adlist import is_ad
from .classify import CATEGORY_NAMES, CONTENT_GROUPS, SUCCESS, SUCCESS_KINDS, categorize_content, classify_success
from .records import RequestRecord

K = TypeVar("K", bound=Hashable)


def share(part: float, whole: float, decimals: int = 1) -> float:
    """百分率（分母0なら0.0）"""
    if not whole:
        return 0.0
    return round(100.0 * part / whole, decimals)


def rounded_shares(counts: Mapping[K, int], total: int, decimals: int = 1) -> Dict[K, float]:
    """
    内訳ごとの百分率を最大剰余法で丸める

    countsの合計がtotalなら丸めた値の合計はちょうど100になる。
    剰余が同じ場合はcountsの並び順で先のものに配る。
    """
    if not total:
        return {key: 0.0 for key in counts}
    scale = 10 ** decimals
    units = {key: 100 * scale * count // total for key, count in counts.items()}
    target = (100 * scale * sum(counts.values()) + total // 2) // total
    order = sorted(
        enumerate(counts.items()),
        key=lambda item: (-(100 * scale * item[1][1] % total), item[0]),
    )
    for _, (key, _) in order[:max(target - sum(units.values()), 0)]:
        units[key] += 1
    return {key: round(value / scale, decimals) for key, value in units.items()}


@dataclass(frozen=True)
class LogSummary:
    """ログ集計結果"""
    total: int = 0
    methods: Counter = field(default_factory=Counter)
    success: Counter = field(default_factory=Counter)
    urls: FrozenSet[str] = frozenset()
    content: Counter = field(default_factory=Counter)
    content_ads: Counter = field(default_factory=Counter)
    timeline: Counter = field(default_factory=Counter)
    app_timelines: Mapping[str, Counter] = field(default_factory=dict)
    domains: Counter = field(default_factory=Counter)
    apps: Counter = field(default_factory=Counter)
    app_urls: Mapping[str, FrozenSet[str]] = field(default_factory=dict)
    app_bytes: Counter = field(default_factory=Counter)
    ad_requests: int = 0
    ad_successful: int = 0
    response_bytes: int = 0

    @property
    def unique_urls(self) -> int:
        return len(self.urls)

    @property
    def successful(self) -> int:
        return self.success.get(SUCCESS, 0)

    def method_shares(self, decimals: int = 1) -> Dict[str, float]:
        return rounded_shares(dict(sorted(self.methods.items())), self.total, decimals)

    def success_shares(self, decimals: int = 1) -> Dict[str, float]:
        return rounded_shares({kind: self.success.get(kind, 0) for kind in SUCCESS_KINDS}, self.total, decimals)

    def domain_concentration(self, threshold: float = 50.0) -> Tuple[int, int]:
        """
        リクエストの threshold% 以上を占める上位ドメインの最小数と、それらのリクエスト数

        同数のドメインは名前順に並べる。
        """
        if not self.total:
            return 0, 0
        needed = math.ceil(self.total * threshold / 100.0)
        covered = 0
        ranked = sorted(self.domains.items(), key=lambda item: (-item[1], item[0]))
        for index, (_, count) in enumerate(ranked, start=1):
            covered += count
            if covered >= needed:
                return index, covered
        return len(ranked), covered

    def group_shares(self, decimals: int = 1) -> Dict[str, Dict[str, float]]:
        """メディア・ソースコード・データの割合（全体と広告）"""
        ad_total = sum(self.content_ads.values())
        return {
            group: {
                "overall": share(sum(self.content.get(n, 0) for n in names), self.total, decimals),
                "ads": share(sum(self.content_ads.get(n, 0) for n in names), ad_total, decimals),
            }
            for group, names in CONTENT_GROUPS.items()
        }

    def content_rows(self, decimals: int = 1) -> List[Tuple[str, int, float, int, float]]:
        """(カテゴリ, 件数, 割合, 広告件数, カテゴリ内の広告割合) をカテゴリ表の順で"""
        counts = {name: self.content.get(name, 0) for name in CATEGORY_NAMES}
        shares = rounded_shares(counts, self.total, decimals)
        rows = []
        for name, count in counts.items():
            ads = self.content_ads.get(name, 0)
            rows.append((name, count, shares[name], ads, share(ads, count, decimals)))
        return rows

    def app_rows(self) -> List[Tuple[str, int, int, int]]:
        """(アプリ, リクエスト数, ユニークURL数, 応答バイト数)"""
        return [
            (app, count, len(self.app_urls.get(app, ())), self.app_bytes.get(app, 0))
            for app, count in sorted(self.apps.items())
        ]

    def timeline_rows(self) -> List[Tuple[int, int]]:
        return sorted(self.timeline.items())

    def app_timeline_rows(self) -> List[Tuple[str, int, int]]:
        return [
            (app, second, count)
            for app in sorted(self.app_timelines)
            for second, count in sorted(self.app_timelines[app].items())
        ]

    def to_dict(self, decimals: int = 1, concentration_share: float = 50.0) -> Dict[str, Any]:
        top_count, top_requests = self.domain_concentration(concentration_share)
        method_shares = self.method_shares(decimals)
        success_shares = self.success_shares(decimals)
        return {
            "total": self.total,
            "unique_urls": self.unique_urls,
            "methods": {m: {"count": c, "share": method_shares[m]} for m, c in sorted(self.methods.items())},
            "success": {
                kind: {"count": self.success.get(kind, 0), "share": success_shares[kind]}
                for kind in SUCCESS_KINDS
            },
            "content_types": {
                name: {"count": count, "share": s, "ad_count": ads, "ad_share": ad_s}
                for name, count, s, ads, ad_s in self.content_rows(decimals)
            },
            "content_groups": self.group_shares(decimals),
            "ads": {
                "requests": self.ad_requests,
                "share_of_requests": share(self.ad_requests, self.total, decimals),
                "successful": self.ad_successful,
                "successful_share_of_ads": share(self.ad_successful, self.ad_requests, decimals),
                "share_of_successful": share(self.ad_successful, self.successful, decimals),
            },
            "domains": {
                "distinct": len(self.domains),
                "concentration": {
                    "threshold": concentration_share,
                    "top_domains": top_count,
                    "requests": top_requests,
                },
            },
            "apps": {
                app: {"requests": count, "unique_urls": unique, "bytes": size}
                for app, count, unique, size in self.app_rows()
            },
            "response_bytes": self.response_bytes,
            "duration_seconds": max(self.timeline) + 1 if self.timeline else 0,
        }


def summarize(
    records: Iterable[RequestRecord],
    ad_hosts: FrozenSet[str] = frozenset(),
    bucket_seconds: int = 1,
) -> LogSummary:
    """
    レコード列を集計する

    Args:
        records: リクエストレコード
        ad_hosts: 広告ドメイン集合（空なら広告判定なし）
        bucket_seconds: タイムラインの区間幅（秒）

    Returns:
        LogSummary
    """
    total = 0
    methods: Counter = Counter()
    success: Counter = Counter()
    urls = set()
    content: Counter = Counter()
    content_ads: Counter = Counter()
    timeline: Counter = Counter()
    app_timelines: Dict[str, Counter] = {}
    domains: Counter = Counter()
    apps: Counter = Counter()
    app_urls: Dict[str, set] = {}
    app_bytes: Counter = Counter()
    ad_requests = 0
    ad_successful = 0
    response_bytes = 0

    for record in records:
        total += 1
        methods[record.method] += 1
        kind = classify_success(record)
        success[kind] += 1
        urls.add(record.url)
        category = categorize_content(record.content_type)
        content[category] += 1
        bucket = int(math.floor(record.timestamp / bucket_seconds)) * bucket_seconds
        timeline[bucket] += 1
        app_timelines.setdefault(record.app, Counter())[bucket] += 1
        domains[record.domain] += 1
        apps[record.app] += 1
        app_urls.setdefault(record.app, set()).add(record.url)
        if record.response_bytes is not None:
            response_bytes += record.response_bytes
            app_bytes[record.app] += record.response_bytes
        if is_ad(record.url, ad_hosts):
            ad_requests += 1
            if kind == SUCCESS:
                ad_successful += 1
                content_ads[category] += 1

    return LogSummary(
        total=total,
        methods=methods,
        success=success,
        urls=frozenset(urls),
        content=content,
        content_ads=content_ads,
        timeline=timeline,
        app_timelines=app_timelines,
        domains=domains,
        apps=apps,
        app_urls={app: frozenset(items) for app, items in app_urls.items()},
        app_bytes=app_bytes,
        ad_requests=ad_requests,
        ad_successful=ad_successful,
        response_bytes=response_bytes,
    )


def merge_summaries(summaries: Iterable[LogSummary], initial: Optional[LogSummary] = None) -> LogSummary:
    """部分集計を結合する（可換・結合的）"""
    merged = initial or LogSummary()
    for item in summaries:
        app_timelines = {app: Counter(c) for app, c in merged.app_timelines.items()}
        for app, counter in item.app_timelines.items():
            app_timelines.setdefault(app, Counter()).update(counter)
        app_urls = dict(merged.app_urls)
        for app, items in item.app_urls.items():
            app_urls[app] = app_urls.get(app, frozenset()) | items
        merged = LogSummary(
            total=merged.total + item.total,
            methods=merged.methods + item.methods,
            success=merged.success + item.success,
            urls=merged.urls | item.urls,
            content=merged.content + item.content,
            content_ads=merged.content_ads + item.content_ads,
            timeline=merged.timeline + item.timeline,
            app_timelines=app_timelines,
            domains=merged.domains + item.domains,
            apps=merged.apps + item.apps,
            app_urls=app_urls,
            app_bytes=merged.app_bytes + item.app_bytes,
            ad_requests=merged.ad_requests + item.ad_requests,
            ad_successful=merged.ad_successful + item.ad_successful,
            response_bytes=merged.response_bytes + item.response_bytes,
        )
    return merged
