"""
CLI インターフェース
"""
import click
import logging
import logging.config
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence
from ..urlmodel.components import LEVELS
from ..utils.config import OUTPUT_FORMATS, ConfigManager
from ..utils.exceptions import ConfigError, UrlWeaverError
from ..utils.colors import ColorPrinter
from .app import RunConfig, UrlWeaverApp

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'

_FILES = click.Path(exists=True, dir_okay=False, path_type=Path)


def setup_logging(config_dir: Optional[str], level: int) -> None:
    """
    ログ設定を適用（logging_config.jsonがなければbasicConfigで代替）

    Args:
        config_dir: 設定ファイルディレクトリ
        level: --debug/--verboseから決まるログレベル
    """
    try:
        logging.config.dictConfig(ConfigManager(config_dir).get_logging_config())
    except (ConfigError, ValueError, TypeError, KeyError) as e:
        logging.basicConfig(level=level, format=LOG_FORMAT)
        logger.debug(f"ログ設定ファイルを使用できません: {str(e)}")
    logging.getLogger().setLevel(level)
    logging.getLogger("src").setLevel(level)


@click.group()
@click.option('--config-dir', type=click.Path(exists=True), help='設定ファイルディレクトリのパス')
@click.option('--verbose', '-v', is_flag=True, help='詳細ログを有効化')
@click.option('--debug', is_flag=True, help='デバッグモードを有効化')
@click.option('--no-color', is_flag=True, help='カラー出力を無効化')
@click.pass_context
def cli(ctx, config_dir: Optional[str], verbose: bool, debug: bool, no_color: bool):
    """
    urlweaver - プログラムからのURLパターン抽出とリクエストログ解析
    """
    # コンテキストオブジェクトを初期化
    ctx.ensure_object(dict)

    # ログレベルを設定
    if debug:
        log_level = logging.DEBUG
    elif verbose:
        log_level = logging.INFO
    else:
        log_level = logging.WARNING
    setup_logging(config_dir, log_level)

    try:
        # 設定管理を初期化
        config_manager = ConfigManager(config_dir)
        if not config_manager.validate_config():
            click.echo("設定ファイルに問題があります。設定を確認してください。", err=True)
            sys.exit(1)

        ctx.obj['config_manager'] = config_manager
        ctx.obj['enable_color'] = not no_color
        ctx.obj['color_printer'] = ColorPrinter(not no_color)

    except ConfigError as e:
        click.echo(f"設定エラー: {str(e)}", err=True)
        sys.exit(1)


def output_options(func):
    """全サブコマンド共通の出力オプション"""
    func = click.option('--jobs', type=click.IntRange(min=1), help='並列ワーカー数')(func)
    func = click.option('--format', 'output_format', type=click.Choice(OUTPUT_FORMATS), help='出力形式')(func)
    func = click.option('--out', type=click.Path(file_okay=False, path_type=Path), envvar='URLWEAVER_OUT',
                        help='出力ディレクトリ（環境変数URLWEAVER_OUTでも指定可）')(func)
    return func


def analysis_options(func):
    """静的解析を行うサブコマンドのオプション"""
    func = click.option('--loop-once-exact', is_flag=True, help='ループ本体をちょうど1回として扱う')(func)
    func = click.option('--cap', type=click.IntRange(min=1), help='オートマトンごとのパターン列挙上限')(func)
    return func


def build_run_config(
    config_manager: ConfigManager,
    inputs: Sequence[Path] = (),
    logs: Sequence[Path] = (),
    out: Optional[Path] = None,
    output_format: Optional[str] = None,
    jobs: Optional[int] = None,
    cap: Optional[int] = None,
    loop_once_exact: bool = False,
    holes_may_be_empty: bool = False,
    **extra: Any,
) -> RunConfig:
    """
    フラグ > 環境変数 > 設定ファイルの優先順位でRunConfigを組み立てる

    Raises:
        ValidationError: 実行設定が不正な場合
    """
    analysis_config = config_manager.get_analysis_config()
    analysis = analysis_config["analysis"]
    output = analysis_config["output"]
    return RunConfig(
        inputs=tuple(inputs),
        logs=tuple(logs),
        out_dir=Path(out or output.get("directory", "out")),
        output_format=output_format or output.get("format", "both"),
        jobs=jobs or int(output.get("jobs", 1)),
        pattern_cap=cap if cap is not None else int(analysis.get("pattern_cap", 10000)),
        loop_semantics="exactly_one" if loop_once_exact else analysis.get("loop_semantics", "zero_or_one"),
        holes_may_be_empty=holes_may_be_empty or bool(analysis.get("holes_may_be_empty", False)),
        **extra,
    )


def _run(ctx, command: str, **options) -> Dict[str, Any]:
    color_printer: ColorPrinter = ctx.obj['color_printer']
    try:
        run_config = build_run_config(ctx.obj['config_manager'], **options)
        app = UrlWeaverApp(ctx.obj['config_manager'], run_config, enable_color=ctx.obj['enable_color'])
        result = getattr(app, f"cmd_{command}")()
    except UrlWeaverError as e:
        color_printer.print_error(f"{command}エラー: {str(e)}")
        sys.exit(1)
    color_printer.print_success(f"{command}完了: {run_config.out_dir / command}")
    return result


def _print_static_summary(color_printer: ColorPrinter, summary: Dict[str, Any]) -> None:
    color_printer.print_header("単位ごとの結果")
    color_printer.print_table(
        ("unit", "patterns", "discarded", "domains"),
        [
            (unit, data["patterns"], data["discarded"], data["components"]["domains"])
            for unit, data in sorted(summary["units"].items())
        ],
    )
    color_printer.print_header("集約コンポーネント")
    color_printer.print_table(("level", "count"), [(level, summary["aggregate"][level]) for level in LEVELS])
    if "improvement" in summary:
        color_printer.print_header("定数抽出との比較")
        color_printer.print_table(
            ("level", "constants", "automata", "improvement(%)"),
            [
                (level, row["constants"], row["automata"], "-" if row["improvement"] is None else row["improvement"])
                for level, row in summary["improvement"].items()
            ],
        )
    for unit, data in sorted(summary["units"].items()):
        if data["truncated"]:
            color_printer.print_info(f"列挙を上限で打ち切った単位: {unit} (--capで変更可)")
    for unit in summary["failed"]:
        color_printer.print_warning(f"解析に失敗した単位: {unit}")


@cli.command()
@click.argument('sir_files', nargs=-1, required=True, type=_FILES)
@analysis_options
@output_options
@click.option('--with-constants', is_flag=True, help='定数抽出との階層ごとの比較を追加')
@click.pass_context
def analyze(ctx, sir_files, with_constants: bool, **options):
    """
    SIRファイルからURLパターンとコンポーネント集合を抽出

    SIR_FILES: 解析するSIRファイル（1ファイル=1単位）
    """
    summary = _run(ctx, "analyze", inputs=sir_files, with_constants=with_constants, **options)
    _print_static_summary(ctx.obj['color_printer'], summary)


@cli.command()
@click.argument('sir_files', nargs=-1, required=True, type=_FILES)
@output_options
@click.pass_context
def constants(ctx, sir_files, **options):
    """
    URL定数だけを集めるベースライン抽出

    SIR_FILES: 解析するSIRファイル
    """
    summary = _run(ctx, "constants", inputs=sir_files, **options)
    _print_static_summary(ctx.obj['color_printer'], summary)


@cli.command()
@click.argument('log_files', nargs=-1, required=True, type=_FILES)
@click.option('--ads', type=_FILES, help='広告ドメインリスト（hosts形式）')
@output_options
@click.pass_context
def dynstats(ctx, log_files, ads: Optional[Path], **options):
    """
    リクエストログ（JSON Lines）の統計

    LOG_FILES: 集計するログファイル
    """
    report = _run(ctx, "dynstats", logs=log_files, ads=ads, **options)
    color_printer: ColorPrinter = ctx.obj['color_printer']
    color_printer.print_header("リクエスト統計")
    color_printer.print_result("リクエスト数", report["total"])
    color_printer.print_result("ユニークURL数", report["unique_urls"])
    color_printer.print_table(
        ("method", "count", "share(%)"),
        [(method, row["count"], row["share"]) for method, row in report["methods"].items()],
    )
    color_printer.print_table(
        ("result", "count", "share(%)"),
        [(kind, row["count"], row["share"]) for kind, row in report["success"].items()],
    )
    color_printer.print_result("広告リクエスト", report["ads"]["requests"])
    if report["ingest_errors"]:
        color_printer.print_warning(f"取り込みエラー: {report['ingest_errors']}件")


@cli.command()
@click.argument('sir_files', nargs=-1, required=True, type=_FILES)
@click.option('--log', 'log_files', multiple=True, required=True, type=_FILES, help='動的に観測したリクエストログ（複数指定可）')
@click.option('--holes-may-be-empty', is_flag=True, help='Holeが空文字列に一致することを許す')
@analysis_options
@output_options
@click.pass_context
def compare(ctx, sir_files, log_files, **options):
    """
    静的抽出と動的観測のコンポーネントをアプリ単位で比較

    SIR_FILES: 静的解析するSIRファイル（ファイル名がアプリ名）
    """
    data = _run(ctx, "compare", inputs=sir_files, logs=log_files, **options)
    color_printer: ColorPrinter = ctx.obj['color_printer']
    color_printer.print_header("比較結果（合計）")
    counts = data["total"]["counts"]
    color_printer.print_table(
        ("level", "d_only", "both", "s_only"),
        [(level, counts[level]["d_only"], counts[level]["both"], counts[level]["s_only"]) for level in LEVELS],
    )
    urls = data["total"]["urls"]
    color_printer.print_result("パターンに一致した観測URL", f"{urls['matched']}/{urls['dynamic']}")
    for unit in data["excluded"]:
        color_printer.print_warning(f"比較から除外: {unit}")


@cli.command()
@click.argument('sir_files', nargs=-1, required=True, type=_FILES)
@click.option('--top', 'top_n', type=click.IntRange(min=1), help='上位ドメイン表の件数')
@analysis_options
@output_options
@click.pass_context
def macro(ctx, sir_files, top_n: Optional[int], **options):
    """
    アプリ横断のドメイン統計（ヒストグラム・上位ドメイン・スキャン）

    SIR_FILES: 1アプリ=1ファイルのSIRファイル
    """
    data = _run(ctx, "macro", inputs=sir_files, top_n=top_n, **options)
    color_printer: ColorPrinter = ctx.obj['color_printer']
    color_printer.print_header("上位ドメイン")
    color_printer.print_table(("domain", "apps"), [(row["domain"], row["apps"]) for row in data["top_domains"]])
    color_printer.print_result("アプリ数", data["apps"])
    color_printer.print_result("ドメイン数", data["domains"])
    color_printer.print_result("IPアドレスのドメイン", data["ip_domains"]["total"])
    if data["secrets"]:
        color_printer.print_warning(f"秘密鍵らしきクエリキー: {len(data['secrets'])}件")


@cli.command()
@click.pass_context
def config(ctx):
    """
    設定情報を表示
    """
    try:
        config_manager = ctx.obj['config_manager']

        click.echo("=== 解析設定 ===")
        analysis = config_manager.get_analysis_config()["analysis"]
        click.echo(f"列挙上限: {analysis['pattern_cap']}")
        click.echo(f"フロンティア上限: {analysis['frontier_cap']}")
        click.echo(f"ループ意味論: {analysis['loop_semantics']}")
        click.echo(f"空のHole: {'許可' if analysis.get('holes_may_be_empty') else '不許可'}")

        click.echo("\n=== 出力設定 ===")
        output = config_manager.get_analysis_config()["output"]
        click.echo(f"出力先: {output['directory']}")
        click.echo(f"形式: {output['format']}")

        click.echo("\n=== ログ集計設定 ===")
        dynlog = config_manager.get_dynlog_config()
        click.echo(f"区間幅: {dynlog['timeline']['bucket_seconds']}秒")
        click.echo(f"広告リスト: {dynlog['ads'].get('default_list') or 'なし'}")

    except (ConfigError, KeyError) as e:
        click.echo(f"設定表示エラー: {str(e)}", err=True)
        sys.exit(1)


if __name__ == '__main__':
    cli()
