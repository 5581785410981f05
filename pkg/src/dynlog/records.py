"""
リクエストログ（JSON Lines）の読み込み
"""
import json
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union
from urllib.parse import urlsplit
from ..utils.exceptions import LogError

logger = logging.getLogger(__name__)

RESPONDED = "responded"
CLIENT_DISCONNECT = "client_disconnect"
SERVER_DISCONNECT = "server_disconnect"
OUTCOMES = (RESPONDED, CLIENT_DISCONNECT, SERVER_DISCONNECT)

DEFAULT_APP = "unknown"


@dataclass(frozen=True)
class RequestRecord:
    """観測されたHTTP(S)リクエスト1件"""
    url: str
    method: str
    status: Optional[int]
    outcome: str
    content_type: Optional[str]
    timestamp: float
    response_bytes: Optional[int] = None
    app: str = DEFAULT_APP

    @property
    def host(self) -> str:
        """URLのホスト名（小文字、ポートなし）"""
        try:
            return (urlsplit(self.url).hostname or "").lower()
        except ValueError:
            return ""

    @property
    def domain(self) -> str:
        """URLのドメイン（小文字、ポートがあれば host:port）"""
        try:
            return urlsplit(self.url).netloc.rpartition("@")[2].lower()
        except ValueError:
            return ""


@dataclass(frozen=True)
class LogLoadResult:
    records: Tuple[RequestRecord, ...] = ()
    errors: Tuple[Tuple[int, str], ...] = ()


def record_from_dict(data: Dict[str, Any]) -> RequestRecord:
    """
    JSONオブジェクト1つをRequestRecordに変換

    Raises:
        LogError: 必須項目の欠落・型の不一致・不変条件違反の場合
    """
    if not isinstance(data, dict):
        raise LogError("record must be a JSON object")
    url = data.get("url")
    if not isinstance(url, str) or not url:
        raise LogError("missing or empty 'url'")
    method = data.get("method")
    if not isinstance(method, str) or not method:
        raise LogError("missing or empty 'method'")

    outcome = data.get("outcome", RESPONDED)
    if outcome not in OUTCOMES:
        raise LogError(f"unknown outcome {outcome!r}")
    status = data.get("status")
    if status is not None and (isinstance(status, bool) or not isinstance(status, int)):
        raise LogError("'status' must be an integer or null")
    if (status is not None) != (outcome == RESPONDED):
        raise LogError("'status' must be present exactly when outcome is 'responded'")

    timestamp = data.get("t")
    if isinstance(timestamp, bool) or not isinstance(timestamp, (int, float)):
        raise LogError("missing or non-numeric 't'")
    if not math.isfinite(timestamp):
        raise LogError("'t' must be finite")
    if timestamp < 0:
        raise LogError("'t' must not be negative")

    content_type = data.get("content_type")
    if content_type is not None and not isinstance(content_type, str):
        raise LogError("'content_type' must be a string or null")
    response_bytes = data.get("bytes")
    if response_bytes is not None and (isinstance(response_bytes, bool) or not isinstance(response_bytes, int)):
        raise LogError("'bytes' must be an integer or null")
    app = data.get("app") or DEFAULT_APP
    if not isinstance(app, str):
        raise LogError("'app' must be a string")

    return RequestRecord(
        url=url,
        method=method.upper(),
        status=status,
        outcome=outcome,
        content_type=content_type,
        timestamp=float(timestamp),
        response_bytes=response_bytes,
        app=app,
    )


def parse_log_lines(lines: Iterable[str]) -> LogLoadResult:
    """行の列からレコードを読み込む（不正な行はエラーとして記録し続行）"""
    records: List[RequestRecord] = []
    errors: List[Tuple[int, str]] = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(record_from_dict(json.loads(line)))
        except json.JSONDecodeError as e:
            errors.append((line_no, f"invalid JSON: {e.msg}"))
        except LogError as e:
            errors.append((line_no, str(e)))
    return LogLoadResult(tuple(records), tuple(errors))


def load_log(path: Union[str, Path]) -> LogLoadResult:
    """
    JSON Lines形式のリクエストログを読み込む

    Args:
        path: ログファイルのパス

    Returns:
        LogLoadResult（レコードはファイル順）

    Raises:
        LogError: ファイルを読めない場合
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            result = parse_log_lines(f)
    except OSError as e:
        raise LogError(f"ログファイルを読み込めません {path}: {str(e)}") from e
    except UnicodeDecodeError as e:
        raise LogError(f"ログファイルの文字コードが不正です {path}: {str(e)}") from e

    if result.errors:
        logger.warning(f"ログ読み込みで{len(result.errors)}行をスキップ: {path}")
    logger.info(f"ログ読み込み完了: {path} ({len(result.records)}件)")
    return result


def assign_app(result: LogLoadResult, app: str) -> LogLoadResult:
    """appのないレコードを指定のアプリ名（通常はログファイルの単位名）に割り当てる"""
    records = tuple(replace(record, app=app) if record.app == DEFAULT_APP else record for record in result.records)
    return LogLoadResult(records, result.errors)
