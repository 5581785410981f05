"""
レポート出力ユーティリティ（JSON / JSONL / CSV）

同じ入力からは同じバイト列が出るように、キーと行は常にソートして書き出す。
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence, Union
from .exceptions import UrlWeaverError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def dumps_json(data: Any) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UrlWeaverError(f"出力先を作成できません {path.parent}: {str(e)}") from e
    return path


def _cell_key(cell: Any):
    # 数値は数値順、それ以外は文字列順
    if isinstance(cell, (int, float)) and not isinstance(cell, bool):
        return (0, cell, "")
    return (1, 0, str(cell))


def write_json(path: PathLike, data: Any) -> Path:
    """
    JSONファイルを書き出す

    Raises:
        UrlWeaverError: 書き込みエラー時
    """
    path = _prepare(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(dumps_json(data))
    except OSError as e:
        raise UrlWeaverError(f"出力エラー {path}: {str(e)}") from e
    logger.debug(f"JSON出力: {path}")
    return path


def write_jsonl(path: PathLike, items: Iterable[Any]) -> Path:
    """1行1オブジェクトで書き出す（順序は呼び出し側が決める）"""
    path = _prepare(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for item in items:
                f.write(json.dumps(item, ensure_ascii=False, sort_keys=True) + "\n")
    except OSError as e:
        raise UrlWeaverError(f"出力エラー {path}: {str(e)}") from e
    logger.debug(f"JSONL出力: {path}")
    return path


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]], sort_rows: bool = True) -> Path:
    """
    ヘッダー付きCSVを書き出す

    Args:
        path: 出力先
        header: ヘッダー行
        rows: データ行
        sort_rows: データ行を文字列としてソートするか（Total行など順序が意味を持つ場合はFalse）

    Raises:
        UrlWeaverError: 書き込みエラー時
    """
    path = _prepare(path)
    rows = [["" if cell is None else cell for cell in row] for row in rows]
    if sort_rows:
        rows.sort(key=lambda row: [_cell_key(cell) for cell in row])
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise UrlWeaverError(f"出力エラー {path}: {str(e)}") from e
    logger.debug(f"CSV出力: {path} ({len(rows)}行)")
    return path
