"""
SIRパーサーとCFG構築のテスト
"""
import random
import networkx as nx
import pytest
from src.sir.cfg import ENTRY, EXIT, block_count, build_cfg, count_paths, forward_edges
from src.sir.ir import (
    Append, Copy, Format, If, Literal, Loop, NewBuilder, Opaque, ProgramIR, Register, Request, ToString,
    iter_instructions,
)
from src.sir.parser import format_program, load_program, parse_program, tokenize
from src.utils.exceptions import (
    DuplicateMethod, NestingTooDeep, SirError, SirSyntaxError, UndefinedRegister,
)
from tests.conftest import generate_method, independent_forks_sir


def _count(body, kind) -> int:
    return sum(1 for _, instruction in iter_instructions(body) if isinstance(instruction, kind))


class TestParseProgram:
    """parse_programのテスト"""

    def test_weather_fixture(self, weather_sir):
        """参照プログラムの命令構成"""
        program = load_program(weather_sir)
        assert program.source_name == "weather"
        assert len(program.methods) == 1

        method = program.methods[0]
        assert method.name == "getWeatherData"
        assert method.params == ("tod",)
        assert _count(method.body, NewBuilder) == 1
        assert _count(method.body, Append) == 7
        assert _count(method.body, If) == 1
        assert _count(method.body, ToString) == 1

        branch = method.body[4]
        assert branch.then_block == (Append("b", Literal("today")),)
        assert branch.else_block == (Append("b", Opaque("this.time")),)
        assert method.body[7] == Append("b", Opaque("getCity()"))

    def test_empty_source(self):
        """空のテキストはメソッド0個"""
        program = parse_program("")
        assert program.methods == ()

    def test_comments_and_blank_lines(self):
        source = '# header\n\nmethod m() {  # trailing\n  b = newbuilder\n\n  append b "x"  # note\n}\n'
        program = parse_program(source)
        assert program.methods[0].body == (NewBuilder("b"), Append("b", Literal("x")))

    def test_duplicate_method(self):
        """同名メソッドはDuplicateMethod"""
        source = 'method m() { b = newbuilder \n append b "x" }\nmethod m() { b = newbuilder \n append b "x" }\n'
        with pytest.raises(DuplicateMethod) as excinfo:
            parse_program(source)
        assert excinfo.value.name == "m"

    def test_all_statement_kinds(self):
        source = (
            'method m(p) {\n'
            '  b = newbuilder\n'
            '  c = copy b\n'
            '  append c p\n'
            '  f = format "https://ex.com/u/%s?n=%d" @user.id "5"\n'
            '  loop {\n'
            '    append b "y"\n'
            '  }\n'
            '  s = tostring b\n'
            '  request s\n'
            '  request f\n'
            '}\n'
        )
        body = parse_program(source).methods[0].body
        assert body[1] == Copy("c", "b")
        assert body[2] == Append("c", Register("p"))
        assert body[3] == Format("f", "https://ex.com/u/%s?n=%d", (Opaque("user.id"), Literal("5")))
        assert body[4] == Loop((Append("b", Literal("y")),))
        assert body[6] == Request("s")

    def test_string_escapes(self):
        source = 'method m() {\n  b = newbuilder\n  append b "a\\"b\\\\c\\nd"\n}\n'
        append = parse_program(source).methods[0].body[1]
        assert append.operand == Literal('a"b\\c\nd')

    def test_else_on_next_line(self):
        source = 'method m() {\n  b = newbuilder\n  if (*) {\n    append b "a"\n  }\n  else {\n    append b "b"\n  }\n}\n'
        branch = parse_program(source).methods[0].body[1]
        assert branch.else_block == (Append("b", Literal("b")),)

    def test_if_without_else(self):
        source = 'method m() {\n  b = newbuilder\n  if (*) { append b "a" }\n  append b "c"\n}\n'
        body = parse_program(source).methods[0].body
        assert body[1] == If((Append("b", Literal("a")),), ())
        assert body[2] == Append("b", Literal("c"))

    def test_instruction_ids_preorder(self):
        """命令IDは前順序で、thenの命令がelseより先、ネストした本体はその場で振られる"""
        body = (
            NewBuilder("b"),
            If((Append("b", Literal("t")), Loop((Append("b", Literal("l")),))), (Append("b", Literal("e")),)),
            Append("b", Literal("z")),
        )
        labels = [
            instruction.operand.text if isinstance(instruction, Append) else type(instruction).__name__
            for _, instruction in iter_instructions(body)
        ]
        assert labels == ["NewBuilder", "If", "t", "Loop", "l", "e", "z"]
        assert [iid for iid, _ in iter_instructions(body, start=10)] == list(range(10, 17))

    def test_syntax_error_position(self):
        """構文エラーは行・列と期待トークンを持つ"""
        source = 'method m() {\n  b = newbuilder\n  append b\n}\n'
        with pytest.raises(SirSyntaxError) as excinfo:
            parse_program(source)
        assert excinfo.value.line == 3
        assert excinfo.value.expected == "operand"

    def test_unterminated_block(self):
        with pytest.raises(SirSyntaxError):
            parse_program('method m() {\n  b = newbuilder\n')

    def test_keyword_is_not_identifier(self):
        with pytest.raises(SirSyntaxError):
            parse_program('method m() {\n  loop = newbuilder\n}\n')

    def test_empty_format_template(self):
        with pytest.raises(SirSyntaxError):
            parse_program('method m() {\n  f = format ""\n}\n')

    def test_undefined_register(self):
        """定義前の参照はUndefinedRegister"""
        with pytest.raises(UndefinedRegister) as excinfo:
            parse_program('method m() {\n  append b "x"\n}\n')
        assert excinfo.value.register == "b"
        assert excinfo.value.method == "m"

    def test_register_defined_on_one_branch_only(self):
        source = 'method m() {\n  if (*) { b = newbuilder } else { }\n  append b "x"\n}\n'
        with pytest.raises(UndefinedRegister):
            parse_program(source)

    def test_register_defined_only_in_loop(self):
        source = 'method m() {\n  loop {\n    b = newbuilder\n  }\n  append b "x"\n}\n'
        with pytest.raises(UndefinedRegister):
            parse_program(source)

    def test_nesting_limit(self):
        """ネスト上限を超えるとNestingTooDeep"""
        depth = 5
        source = "method m() {\n" + "loop {\n" * depth + "}\n" * depth + "}\n"
        parse_program(source, max_nesting=depth)
        with pytest.raises(NestingTooDeep):
            parse_program(source, max_nesting=depth - 1)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(SirError):
            load_program(tmp_path / "missing.sir")


class TestRoundTrip:
    """整形出力と再解析の往復"""

    def test_weather_round_trip(self, weather_sir):
        program = load_program(weather_sir)
        assert parse_program(format_program(program), program.source_name) == program

    def test_generated_round_trip(self):
        rng = random.Random(7)
        for index in range(50):
            original = ProgramIR((generate_method(rng, name=f"m{index}"),), "generated")
            assert parse_program(format_program(original), "generated") == original

    def test_mutated_tokens_never_crash(self, weather_sir):
        """トークンを削った入力は別の正しいプログラムかSirErrorのどちらか"""
        source = weather_sir.read_text(encoding="utf-8")
        lines = source.splitlines()
        rng = random.Random(3)
        for _ in range(200):
            mutated = list(lines)
            index = rng.randrange(len(mutated))
            words = mutated[index].split(" ")
            del words[rng.randrange(len(words))]
            mutated[index] = " ".join(words)
            try:
                parse_program("\n".join(mutated))
            except SirError:
                pass


class TestBuildCfg:
    """build_cfgのテスト"""

    def test_straight_line(self):
        """分岐なしは1ブロック"""
        method = parse_program('method m() {\n  b = newbuilder\n  append b "a"\n  append b "b"\n  append b "c"\n}\n').methods[0]
        cfg = build_cfg(method).cfg
        assert block_count(cfg) == 1
        assert count_paths(cfg) == 1

    def test_weather_diamond(self, weather_sir):
        """Ifひとつで4ブロックのダイヤモンド"""
        method = build_cfg(load_program(weather_sir).methods[0])
        cfg = method.cfg
        assert block_count(cfg) == 4
        assert count_paths(cfg) == 2
        kinds = sorted(data["kind"] for _, _, data in cfg.edges(data=True))
        assert kinds == ["else", "join", "join", "seq", "seq", "then"]

    def test_two_sequential_ifs(self):
        source = (
            'method m() {\n  b = newbuilder\n'
            '  if (*) { append b "a" } else { append b "b" }\n'
            '  if (*) { append b "c" } else { append b "d" }\n}\n'
        )
        cfg = build_cfg(parse_program(source).methods[0]).cfg
        assert block_count(cfg) == 7
        assert count_paths(cfg) == 4

    def test_loop_back_edge(self):
        source = 'method m() {\n  b = newbuilder\n  loop {\n    append b "y"\n  }\n}\n'
        cfg = build_cfg(parse_program(source).methods[0]).cfg
        back = [(u, v) for u, v, data in cfg.edges(data=True) if data["back"]]
        assert len(back) == 1
        assert back[0][0] == back[0][1]  # 本体1ブロックの自己ループ
        assert count_paths(cfg) == 2

    def test_single_entry_and_exit(self):
        rng = random.Random(11)
        for index in range(20):
            cfg = build_cfg(generate_method(rng, name=f"m{index}")).cfg
            dag = forward_edges(cfg)
            assert dag.in_degree(ENTRY) == 0
            assert dag.out_degree(EXIT) == 0
            assert all(node == ENTRY or ENTRY in nx.ancestors(dag, node) for node in dag.nodes)

    def test_independent_forks(self):
        """独立したn個の分岐のパス数は2のn乗"""
        for forks in (0, 1, 5, 12):
            cfg = build_cfg(parse_program(independent_forks_sir(forks)).methods[0]).cfg
            assert count_paths(cfg) == 2 ** forks

    def test_path_count_matches_enumeration(self):
        """ループなしのCFGのパス数はDFSの列挙とブロック木からの計算に一致する"""
        rng = random.Random(5)
        for index in range(30):
            method = generate_method(rng, name=f"m{index}")
            cfg = build_cfg(method).cfg
            assert count_paths(cfg) == count_dfs_paths(cfg)
            assert count_paths(cfg) == tree_paths(method.body)

    def test_original_method_unchanged(self, weather_sir):
        method = load_program(weather_sir).methods[0]
        built = build_cfg(method)
        assert method.cfg is None
        assert built.cfg is not None
        assert built == method


def tree_paths(body) -> int:
    """ブロック木から求めたパス数（分岐ごとに両腕のパス数の和を掛ける）"""
    total = 1
    for instruction in body:
        if isinstance(instruction, If):
            total *= tree_paths(instruction.then_block) + tree_paths(instruction.else_block)
    return total


def count_dfs_paths(cfg) -> int:
    dag = forward_edges(cfg)
    stack = [ENTRY]
    total = 0
    while stack:
        node = stack.pop()
        if node == EXIT:
            total += 1
            continue
        stack.extend(dag.successors(node))
    return total


class TestTokenize:
    def test_token_kinds(self):
        kinds = [token.kind for token in tokenize('append b "x" # c\n')]
        assert kinds[:4] == ["NAME", "NAME", "STRING", "NEWLINE"]
        assert kinds[-1] == "EOF"
