"""
コンポーネント集合に対する簡易スキャン（秘密鍵らしきキー、IPアドレスのドメイン）
"""
import ipaddress
from typing import Iterable, List, Set, Tuple
from .components import ComponentSets

SECRET_WORDS = ("secret", "key")


def scan_secrets(sets: ComponentSets) -> List[Tuple[str, str, str, str]]:
    """キーに "secret" か "key" を含む値タプル（大文字小文字は区別しない、ソート済み）"""
    return sorted(
        item for item in sets.value_tuples
        if any(word in item[2].lower() for word in SECRET_WORDS)
    )


def strip_port(domain: str) -> str:
    host, _, port = domain.rpartition(":")
    if host and port.isdigit():
        return host
    return domain


def is_ip_domain(domain: str) -> bool:
    """IPv4アドレスのリテラルか（ポートは無視）"""
    try:
        ipaddress.IPv4Address(strip_port(domain))
    except ValueError:
        return False
    return True


def classify_ip_domains(domains: Iterable[str]) -> Set[str]:
    return {domain for domain in domains if is_ip_domain(domain)}
