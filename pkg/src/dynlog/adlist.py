"""
hostsファイル形式の広告ドメインリスト
"""
import logging
from pathlib import Path
from typing import FrozenSet, Iterable, Union
from urllib.parse import urlsplit
from ..utils.exceptions import LogError

logger = logging.getLogger(__name__)

_LOCAL_NAMES = frozenset({
    "localhost", "localhost.localdomain", "local", "broadcasthost",
    "ip6-localhost", "ip6-loopback", "ip6-localnet", "ip6-mcastprefix",
    "ip6-allnodes", "ip6-allrouters", "ip6-allhosts", "0.0.0.0",
})


def _looks_like_address(field: str) -> bool:
    return ":" in field or field.replace(".", "").isdigit()


def parse_ad_list(lines: Iterable[str]) -> FrozenSet[str]:
    """
    hostsファイルの行から広告ドメイン集合を作る

    先頭のIPアドレス欄は読み飛ばし、名前は小文字化して末尾のドットを除く。
    """
    hosts = set()
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) > 1 and _looks_like_address(fields[0]):
            fields = fields[1:]
        for name in fields:
            name = name.lower().rstrip(".")
            if name and name not in _LOCAL_NAMES:
                hosts.add(name)
    return frozenset(hosts)


def load_ad_list(path: Union[str, Path]) -> FrozenSet[str]:
    """
    広告リストファイルを読み込む

    Raises:
        LogError: ファイルを読めない場合
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            hosts = parse_ad_list(f)
    except (OSError, UnicodeDecodeError) as e:
        raise LogError(f"広告リストを読み込めません {path}: {str(e)}") from e
    logger.info(f"広告リスト読み込み完了: {path} ({len(hosts)}ドメイン)")
    return hosts


def is_ad_host(host: str, ad_hosts: FrozenSet[str]) -> bool:
    """ホストが登録ドメインそのものか、そのサブドメインか（ドット境界で判定）"""
    host = host.lower().rstrip(".")
    while host:
        if host in ad_hosts:
            return True
        _, dot, host = host.partition(".")
        if not dot:
            return False
    return False


def is_ad(url: str, ad_hosts: FrozenSet[str]) -> bool:
    if not ad_hosts:
        return False
    try:
        host = urlsplit(url).hostname or ""
    except ValueError:
        return False
    return is_ad_host(host, ad_hosts)
