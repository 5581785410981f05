"""
リクエストの成否分類とcontent-typeの分類
"""
import re
from typing import Optional, Pattern, Tuple
from .records import CLIENT_DISCONNECT, RESPONDED, RequestRecord

SUCCESS = "success"
HTTP_ERROR = "http_error"
SUCCESS_KINDS = (SUCCESS, HTTP_ERROR, CLIENT_DISCONNECT, "server_disconnect")

NONE_CATEGORY = "None"
UNCATEGORIZED = "Uncategorized"

# 上から順に評価し、最初に一致したものを採用する
CONTENT_CATEGORIES: Tuple[Tuple[str, Pattern], ...] = tuple(
    (name, re.compile(expression, re.IGNORECASE))
    for name, expression in (
        ("Image", r"^image"),
        ("HTML", r"html"),
        ("JavaScript", r"javascript"),
        ("JSON", r"json"),
        ("Stream", r"octet|stream"),
        ("CSS", r"css"),
        ("Cache", r"cache"),
        ("Xml", r"(application|text)/.*xml"),
        ("Video", r"^video"),
        ("Font", r"font|ttf"),
        ("Zip", r"zip"),
        ("Plain", r"plain"),
        ("Audio", r"^audio"),
        ("Thrift", r"thrift"),
    )
)

CATEGORY_NAMES: Tuple[str, ...] = tuple(name for name, _ in CONTENT_CATEGORIES) + (NONE_CATEGORY, UNCATEGORIZED)

CONTENT_GROUPS = {
    "media": ("Image", "Video", "Audio"),
    "source_code": ("HTML", "JavaScript", "CSS"),
    "data": ("JSON", "Xml", "Plain"),
}


def classify_success(record: RequestRecord) -> str:
    """200〜399を成功とし、それ以外の応答はhttp_error、未応答は切断の種類"""
    if record.outcome == RESPONDED:
        if record.status is not None and 200 <= record.status <= 399:
            return SUCCESS
        return HTTP_ERROR
    return record.outcome


def categorize_content(content_type: Optional[str]) -> str:
    """content-typeヘッダ値をカテゴリ名に分類（ヘッダなしは "None"）"""
    if content_type is None:
        return NONE_CATEGORY
    for name, pattern in CONTENT_CATEGORIES:
        if pattern.search(content_type):
            return name
    return UNCATEGORIZED
