"""
pytest共通設定・フィクスチャ
"""
import json
import random
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Callable, Set, Tuple
import pytest

# プロジェクトルートをPythonパスに追加
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from src.compare.services import ComparisonService
from src.dynlog.services import DynLogService
from src.sir.ir import Append, If, Literal, MethodIR, NewBuilder, Opaque, Request, ToString
from src.strana.automaton import Hole, Lit, fuse, render_tokens
from src.strana.services import StringAnalysisService
from src.urlmodel.services import UrlModelService
from src.utils.config import ConfigManager

FIXTURES_DIR = project_root / "fixtures"

URL_PREFIX = "http://gen.example.com/"


def write_test_configs(config_dir: Path) -> None:
    """テスト用設定ファイル一式を書き込む"""
    analysis_config = {
        "analysis": {
            "pattern_cap": 10000,
            "frontier_cap": 100000,
            "max_nesting": 64,
            "loop_semantics": "zero_or_one",
            "holes_may_be_empty": False
        },
        "output": {"directory": "out", "format": "both", "jobs": 1},
        "macro": {
            "top_n": 10,
            "excluded_domains": ["schemas.android.com", "hostname", "details"],
            "longest_patterns": 5
        }
    }

    dynlog_config = {
        "timeline": {"bucket_seconds": 1},
        "ads": {"default_list": None},
        "report": {"share_decimals": 1, "concentration_share": 50.0}
    }

    logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "standard": {
                "format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
            }
        },
        "handlers": {
            "console": {
                "class": "logging.StreamHandler",
                "level": "INFO",
                "formatter": "standard",
                "stream": "ext://sys.stderr"
            }
        },
        "loggers": {
            "src": {
                "level": "INFO",
                "handlers": ["console"],
                "propagate": False
            }
        }
    }

    for filename, config in (
        ("analysis_config.json", analysis_config),
        ("dynlog_config.json", dynlog_config),
        ("logging_config.json", logging_config),
    ):
        with open(config_dir / filename, "w", encoding="utf-8") as f:
            json.dump(config, f, ensure_ascii=False, indent=2)


@pytest.fixture
def temp_config_dir():
    """テスト用の一時設定ディレクトリを作成"""
    temp_dir = tempfile.mkdtemp()
    config_dir = Path(temp_dir) / "config"
    config_dir.mkdir()
    write_test_configs(config_dir)

    yield str(config_dir)

    # クリーンアップ
    shutil.rmtree(temp_dir)


@pytest.fixture
def config_manager(temp_config_dir):
    """テスト用ConfigManagerインスタンス"""
    return ConfigManager(temp_config_dir)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def weather_sir() -> Path:
    return FIXTURES_DIR / "weather.sir"


@pytest.fixture
def sample_log() -> Path:
    return FIXTURES_DIR / "sample_log.jsonl"


@pytest.fixture
def ads_hosts() -> Path:
    return FIXTURES_DIR / "ads.hosts"


@pytest.fixture
def string_service(config_manager):
    """テスト用StringAnalysisServiceインスタンス"""
    return StringAnalysisService(config_manager)


@pytest.fixture
def url_service(config_manager):
    """テスト用UrlModelServiceインスタンス"""
    return UrlModelService(config_manager)


@pytest.fixture
def dynlog_service(config_manager):
    """テスト用DynLogServiceインスタンス"""
    return DynLogService(config_manager)


@pytest.fixture
def comparison_service(config_manager):
    """テスト用ComparisonServiceインスタンス"""
    return ComparisonService(config_manager)


# --- ランダムSIRとオラクル ---

_LITERALS = ("a", "b", "api", "/", "v1/", "?", "k=", "&", "x=", "1")
_OPAQUES = ("this.token", "getUser()", "this.lang", "nextId()")


def generate_method(rng: random.Random, name: str = "generated", max_branches: int = 12, max_appends: int = 30) -> MethodIR:
    """
    ループなし・ビルダー1つのランダムなメソッドを生成

    先頭でURLの接頭辞をappendし、最後にtostringしてrequestする。
    """
    budget = {"branches": rng.randint(0, max_branches), "appends": rng.randint(1, max_appends)}

    def operand():
        if rng.random() < 0.2:
            return Opaque(rng.choice(_OPAQUES))
        return Literal(rng.choice(_LITERALS))

    def block(depth: int) -> Tuple:
        body = []
        for _ in range(rng.randint(0, 4)):
            if budget["branches"] > 0 and depth < 4 and rng.random() < 0.35:
                budget["branches"] -= 1
                body.append(If(block(depth + 1), block(depth + 1)))
            elif budget["appends"] > 0:
                budget["appends"] -= 1
                body.append(Append("b", operand()))
        return tuple(body)

    body = (NewBuilder("b"), Append("b", Literal(URL_PREFIX))) + block(0) + (ToString("u", "b"), Request("u"))
    return MethodIR(name, (), body)


def interpret_method(method: MethodIR) -> Set[str]:
    """
    全分岐の組み合わせでメソッドを実行し、構築される文字列（Holeは "[ ]"）の集合を返す

    If/Append/NewBuilder/ToString/Requestのみを扱う単一ビルダー用の総当たり実行器。
    """
    def run(body, prefixes: Set[Tuple]) -> Set[Tuple]:
        for instruction in body:
            if isinstance(instruction, Append):
                operand = instruction.operand
                label = Lit(operand.text) if isinstance(operand, Literal) else Hole(operand.descriptor)
                prefixes = {prefix + (label,) for prefix in prefixes}
            elif isinstance(instruction, If):
                prefixes = run(instruction.then_block, prefixes) | run(instruction.else_block, prefixes)
        return prefixes

    return {render_tokens(fuse(labels)) for labels in run(method.body, {()})}


def count_branches(method: MethodIR) -> int:
    def walk(body) -> int:
        return sum(1 + walk(i.then_block) + walk(i.else_block) for i in body if isinstance(i, If))
    return walk(method.body)


@pytest.fixture
def method_generator() -> Callable[..., MethodIR]:
    return generate_method


@pytest.fixture
def interpreter() -> Callable[[MethodIR], Set[str]]:
    return interpret_method


def independent_forks_sir(forks: int) -> str:
    """n個の独立した二分岐を持つSIRテキスト"""
    lines = ["method forks() {", "  b = newbuilder", f'  append b "{URL_PREFIX}"']
    for index in range(forks):
        lines.append(f'  if (*) {{ append b "p{index}" }} else {{ append b "q{index}" }}')
    lines += ["  u = tostring b", "  request u", "}"]
    return "\n".join(lines) + "\n"
