"""
ファイル単位の並列実行ユーティリティ
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Sequence, TypeVar
from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_parallel(
    func: Callable[[T], R],
    items: Sequence[T],
    jobs: int = 1,
    desc: str = "処理中",
    show_progress: bool = False,
    color: bool = True,
) -> List[R]:
    """
    itemsの各要素にfuncを適用する（結果は入力順）

    Args:
        func: 各要素に適用する関数（例外は呼び出し側で扱う）
        items: 入力の列
        jobs: ワーカー数（1以下なら逐次実行）
        desc: 進捗バーの説明
        show_progress: 進捗バーを表示するか
        color: 進捗バーに色を付けるか

    Returns:
        入力と同じ順序の結果リスト
    """
    progress = None
    if show_progress and items:
        progress = tqdm(
            total=len(items),
            desc=desc,
            unit="file",
            bar_format='{desc}: {percentage:3.0f}%|{bar}| {n_fmt}/{total_fmt}',
            colour='cyan' if color else None,
            leave=False,
        )

    results: List[R] = [None] * len(items)  # type: ignore[list-item]
    try:
        if jobs <= 1 or len(items) <= 1:
            for index, item in enumerate(items):
                results[index] = func(item)
                if progress:
                    progress.update(1)
        else:
            with ThreadPoolExecutor(max_workers=jobs) as executor:
                futures = {executor.submit(func, item): index for index, item in enumerate(items)}
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    if progress:
                        progress.update(1)
    finally:
        if progress:
            progress.close()

    logger.debug(f"{desc}: {len(items)}件を{max(jobs, 1)}ワーカーで処理")
    return results
