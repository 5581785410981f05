"""
URLコンポーネントの4階層集合

ドメイン / (ドメイン, パス) / (ドメイン, パス, キー) / (ドメイン, パス, キー, 値)。
Holeはすべて "[ ]" という1つの値として数える。
"""
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Tuple
from ..strana.automaton import render_tokens
from .pattern import UrlPattern

LEVELS = ("domains", "path_pairs", "key_triples", "value_tuples")

LEVEL_COLUMNS = {
    "domains": ("domain",),
    "path_pairs": ("domain", "path"),
    "key_triples": ("domain", "path", "key"),
    "value_tuples": ("domain", "path", "key", "value"),
}


@dataclass(frozen=True)
class ComponentSets:
    """4階層のコンポーネント集合"""
    domains: FrozenSet[str] = field(default_factory=frozenset)
    path_pairs: FrozenSet[Tuple[str, str]] = field(default_factory=frozenset)
    key_triples: FrozenSet[Tuple[str, str, str]] = field(default_factory=frozenset)
    value_tuples: FrozenSet[Tuple[str, str, str, str]] = field(default_factory=frozenset)

    def level(self, name: str) -> FrozenSet[tuple]:
        if name not in LEVELS:
            raise KeyError(name)
        return getattr(self, name)

    def union(self, other: "ComponentSets") -> "ComponentSets":
        return ComponentSets(*(self.level(name) | other.level(name) for name in LEVELS))

    def issubset(self, other: "ComponentSets") -> bool:
        return all(self.level(name) <= other.level(name) for name in LEVELS)

    def counts(self) -> Dict[str, int]:
        return {name: len(self.level(name)) for name in LEVELS}

    def is_consistent(self) -> bool:
        """上位階層への射影がすべて上位集合に含まれるか"""
        return (
            all(pair[0] in self.domains for pair in self.path_pairs)
            and all(triple[:2] in self.path_pairs for triple in self.key_triples)
            and all(item[:3] in self.key_triples for item in self.value_tuples)
        )

    def rows(self, name: str) -> List[Tuple[str, ...]]:
        """CSV出力用のソート済み行"""
        if name == "domains":
            return [(domain,) for domain in sorted(self.domains)]
        return sorted(self.level(name))

    def to_dict(self) -> Dict[str, Any]:
        """JSON出力用の辞書（各階層はソート済みリスト）"""
        data: Dict[str, Any] = {"counts": self.counts()}
        for name in LEVELS:
            data[name] = [list(row) for row in self.rows(name)]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ComponentSets":
        return cls(
            domains=frozenset(row[0] if isinstance(row, list) else row for row in data.get("domains", [])),
            path_pairs=frozenset(tuple(row) for row in data.get("path_pairs", [])),
            key_triples=frozenset(tuple(row) for row in data.get("key_triples", [])),
            value_tuples=frozenset(tuple(row) for row in data.get("value_tuples", [])),
        )


def decompose(patterns: Iterable[UrlPattern]) -> ComponentSets:
    """
    パターン群を4階層の集合に分解する

    クエリの並び順は無視され、値を持たないキーの値は "" として数える。
    """
    domains = set()
    path_pairs = set()
    key_triples = set()
    value_tuples = set()
    for pattern in patterns:
        domain = pattern.domain_key
        path = pattern.path_key
        domains.add(domain)
        path_pairs.add((domain, path))
        for key_tokens, value_tokens in pattern.query:
            key = render_tokens(key_tokens)
            value = render_tokens(value_tokens) if value_tokens is not None else ""
            key_triples.add((domain, path, key))
            value_tuples.add((domain, path, key, value))
    return ComponentSets(frozenset(domains), frozenset(path_pairs), frozenset(key_triples), frozenset(value_tuples))


def merge_all(sets: Iterable[ComponentSets]) -> ComponentSets:
    merged = ComponentSets()
    for item in sets:
        merged = merged.union(item)
    return merged
