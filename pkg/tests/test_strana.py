"""
文字列解析（エイリアス・オートマトン構築・format展開）のテスト
"""
import random
import time
import pytest
from src.sir.cfg import build_cfg
from src.sir.ir import Literal, Opaque, Register, iter_instructions
from src.sir.parser import load_program, parse_program
from src.strana.aliases import analyze_aliases, append_targets
from src.strana.automaton import (
    Hole, Lit, automaton_from_json, automaton_to_json, fuse, language_of, linear_automaton, render_tokens,
)
from src.strana.builder import EXACTLY_ONE, AutomataOptions, build_automata
from src.strana.formats import expand_format, format_literals
from src.strana.services import StringAnalysisService
from src.utils.exceptions import (
    AnalysisError, ArityMismatch, FrontierExplosion, UnknownBuilder, UnknownSpecifier,
)
from tests.conftest import generate_method, independent_forks_sir, interpret_method

WEATHER_TODAY = "https://weather.example.com?time=today&city=[ ]"
WEATHER_HOLE = "https://weather.example.com?time=[ ]&city=[ ]"


def _method(source: str):
    return build_cfg(parse_program(source).methods[0])


def _rendered(automaton, cap: int = 10000):
    return [render_tokens(sequence) for sequence in language_of(automaton, cap).sequences]


class TestAutomataConstruction:
    """build_automataのテスト"""

    def test_weather_automaton(self, weather_sir):
        """参照プログラムは8状態8辺、パターン2件"""
        automata = build_automata(build_cfg(load_program(weather_sir).methods[0]))
        assert list(automata) == [0]
        automaton = automata[0]
        assert len(automaton.states) == 8
        assert len(automaton.edges) == 8
        assert _rendered(automaton) == [WEATHER_TODAY, WEATHER_HOLE]

    def test_weather_hole_descriptors_kept(self, weather_sir):
        automaton = build_automata(build_cfg(load_program(weather_sir).methods[0]))[0]
        descriptors = sorted(edge.label.descriptor for edge in automaton.edges if isinstance(edge.label, Hole))
        assert descriptors == ["getCity()", "this.time"]

    def test_single_append(self):
        automata = build_automata(_method('method m() {\n  b = newbuilder\n  append b "a"\n}\n'))
        assert len(automata[0].states) == 2
        assert _rendered(automata[0]) == ["a"]

    def test_builder_without_appends(self):
        """appendのないビルダーは空文字列1つ"""
        automata = build_automata(_method('method m() {\n  b = newbuilder\n  s = tostring b\n  request s\n}\n'))
        assert language_of(automata[0], 10).sequences == ((),)

    def test_empty_literal_is_noop(self):
        automata = build_automata(_method('method m() {\n  b = newbuilder\n  append b ""\n  append b "a"\n}\n'))
        assert len(automata[0].edges) == 1

    def test_path_insensitive_branches(self, fixtures_dir):
        """独立した2つの分岐は4パターン"""
        automaton = build_automata(build_cfg(load_program(fixtures_dir / "paths_twice.sir").methods[0]))[0]
        assert sorted(_rendered(automaton)) == [
            "http://example.com/ac", "http://example.com/ad", "http://example.com/bc", "http://example.com/bd",
        ]

    def test_loop_zero_or_one(self, fixtures_dir):
        """既定ではループ本体は0回か1回"""
        method = build_cfg(load_program(fixtures_dir / "loop_once.sir").methods[0])
        automaton = build_automata(method)[0]
        assert sorted(_rendered(automaton)) == ["http://example.com/items", "http://example.com/items/next"]

    def test_loop_exactly_one(self, fixtures_dir):
        method = build_cfg(load_program(fixtures_dir / "loop_once.sir").methods[0])
        automaton = build_automata(method, options=AutomataOptions(loop_semantics=EXACTLY_ONE))[0]
        assert _rendered(automaton) == ["http://example.com/items/next"]

    def test_loop_language(self):
        source = 'method m() {\n  b = newbuilder\n  append b "x"\n  loop {\n    append b "y"\n  }\n  s = tostring b\n}\n'
        assert sorted(_rendered(build_automata(_method(source))[0])) == ["x", "xy"]

    def test_format_site(self):
        """formatも1つのサイトになる"""
        source = 'method m() {\n  f = format "https://ex.com/u/%s?n=%d" @user.id "5"\n  request f\n}\n'
        automata = build_automata(_method(source))
        assert _rendered(automata[0]) == ["https://ex.com/u/[ ]?n=5"]

    def test_string_register_inlined(self):
        """支配する唯一の定義を持つ文字列レジスタはその言語で置き換える"""
        source = (
            'method m() {\n'
            '  f = format "http://a.com/%s" @id\n'
            '  b = newbuilder\n'
            '  append b f\n'
            '  append b "/x"\n'
            '  s = tostring b\n'
            '}\n'
        )
        automata = build_automata(_method(source))
        assert list(automata) == [0, 1]
        assert _rendered(automata[1]) == ["http://a.com/[ ]/x"]

    def test_parameter_becomes_hole(self):
        source = 'method m(p) {\n  b = newbuilder\n  append b "a"\n  append b p\n}\n'
        automaton = build_automata(_method(source))[0]
        holes = [edge.label for edge in automaton.edges if isinstance(edge.label, Hole)]
        assert [hole.descriptor for hole in holes] == ["reg:p"]

    def test_string_defined_on_one_branch_is_hole(self):
        """支配しない定義は展開しない"""
        source = (
            'method m() {\n'
            '  s = format "a"\n'
            '  if (*) { s = format "b" } else { }\n'
            '  b = newbuilder\n'
            '  append b s\n'
            '}\n'
        )
        automata = build_automata(_method(source))
        site = max(automata)
        assert _rendered(automata[site]) == ["[ ]"]

    def test_tostring_twice_keeps_both_exits(self):
        source = (
            'method m() {\n  b = newbuilder\n  append b "a"\n  s = tostring b\n'
            '  append b "b"\n  t = tostring b\n}\n'
        )
        assert sorted(_rendered(build_automata(_method(source))[0])) == ["a", "ab"]

    def test_frontier_cap_ignores_total_states(self):
        """直線的なappendはフロンティアが1状態のままなので上限1でも構築できる"""
        appends = "".join(f'  append b "s{i}"\n' for i in range(50))
        method = _method(f"method m() {{\n  b = newbuilder\n{appends}  s = tostring b\n}}\n")
        automaton = build_automata(method, options=AutomataOptions(frontier_cap=1))[0]
        assert len(automaton.states) == 51
        assert _rendered(automaton) == ["".join(f"s{i}" for i in range(50))]

    def test_frontier_cap_after_join(self, weather_sir):
        """分岐の合流後も末端がまとめられ、フロンティアは1状態"""
        method = build_cfg(load_program(weather_sir).methods[0])
        automaton = build_automata(method, options=AutomataOptions(frontier_cap=1))[0]
        assert _rendered(automaton) == [WEATHER_TODAY, WEATHER_HOLE]

    def test_frontier_cap_exceeded(self):
        """弱い更新でフロンティアが2状態になると上限1を超える"""
        method = _method(
            'method m() {\n  if (*) { b = newbuilder } else { b = newbuilder }\n'
            '  append b "x"\n  s = tostring b\n}\n'
        )
        with pytest.raises(FrontierExplosion) as excinfo:
            build_automata(method, options=AutomataOptions(frontier_cap=1))
        assert excinfo.value.cap == 1
        assert excinfo.value.count == 2
        assert build_automata(method, options=AutomataOptions(frontier_cap=2))

    def test_requires_cfg(self, weather_sir):
        with pytest.raises(AnalysisError):
            build_automata(load_program(weather_sir).methods[0])

    def test_independent_forks_language(self):
        """12個の独立分岐は4096パターンを打ち切りなしで列挙する"""
        automaton = build_automata(_method(independent_forks_sir(12)))[0]
        language = language_of(automaton, 10000)
        assert len(language.sequences) == 4096
        assert not language.truncated
        assert len(automaton.states) < 100

    def test_language_truncation(self):
        automaton = build_automata(_method(independent_forks_sir(12)))[0]
        language = language_of(automaton, 100)
        assert len(language.sequences) == 100
        assert language.truncated
        assert language.sequences == language_of(automaton, 10000).sequences[:100]


class TestAliases:
    """analyze_aliasesのテスト"""

    def test_copy_aliases_builder(self):
        """copyしたレジスタへのappendは元のサイトに効く"""
        source = 'method m() {\n  b = newbuilder\n  c = copy b\n  append c "x"\n  s = tostring b\n}\n'
        method = _method(source)
        aliases = analyze_aliases(method)
        assert append_targets(aliases, 2, "c") == (0,)
        assert _rendered(build_automata(method, aliases)[0]) == ["x"]

    def test_weak_update_on_two_sites(self):
        """2サイトを指すレジスタへのappendは追記しない経路も残す"""
        source = (
            'method m() {\n'
            '  if (*) { b = newbuilder } else { b = newbuilder }\n'
            '  append b "x"\n'
            '  s = tostring b\n'
            '}\n'
        )
        method = _method(source)
        aliases = analyze_aliases(method)
        assert append_targets(aliases, 3, "b") == (1, 2)
        automata = build_automata(method, aliases)
        for site in (1, 2):
            assert sorted(_rendered(automata[site])) == ["", "x"]

    def test_weak_update_is_monotone(self):
        """弱い更新の言語は強い更新の言語を含む"""
        strong = build_automata(_method('method m() {\n  b = newbuilder\n  append b "x"\n  s = tostring b\n}\n'))[0]
        weak = build_automata(_method(
            'method m() {\n  if (*) { b = newbuilder } else { b = newbuilder }\n'
            '  append b "x"\n  s = tostring b\n}\n'
        ))[1]
        assert set(_rendered(strong)) <= set(_rendered(weak))

    def test_loop_reaches_fixpoint(self):
        source = 'method m() {\n  b = newbuilder\n  loop {\n    c = copy b\n    append c "y"\n  }\n}\n'
        method = _method(source)
        aliases = analyze_aliases(method)
        assert append_targets(aliases, 3, "c") == (0,)

    def test_unknown_builder(self):
        """ビルダーを指さないレジスタへのappend"""
        with pytest.raises(UnknownBuilder) as excinfo:
            analyze_aliases(_method('method m(p) {\n  append p "x"\n}\n'))
        assert excinfo.value.register == "p"
        assert excinfo.value.method == "m"

    def test_append_to_string_register(self):
        with pytest.raises(UnknownBuilder):
            analyze_aliases(_method('method m() {\n  f = format "a"\n  append f "x"\n}\n'))


class TestExpandFormat:
    """format展開のテスト"""

    def test_mixed_specifiers(self):
        labels = expand_format("https://ex.com/u/%s?n=%d", (Opaque("user.id"), Literal("5")))
        assert labels == [Lit("https://ex.com/u/"), Hole(), Lit("?n=5")]
        assert labels[1].descriptor == "user.id"

    def test_percent_escape(self):
        assert expand_format("100%%/%f", (Literal("2.5"),)) == [Lit("100%/2.5")]

    def test_register_argument(self):
        labels = expand_format("%s", (Register("r"),))
        assert labels[0].descriptor == "reg:r"

    def test_no_specifiers(self):
        assert expand_format("http://a.com/", ()) == [Lit("http://a.com/")]

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch) as excinfo:
            expand_format("%s/%s", (Literal("a"),))
        assert excinfo.value.expected == 2
        assert excinfo.value.given == 1

    def test_too_many_arguments(self):
        with pytest.raises(ArityMismatch):
            expand_format("a", (Literal("b"),))

    def test_unknown_specifier(self):
        with pytest.raises(UnknownSpecifier) as excinfo:
            expand_format("a%xb", ())
        assert excinfo.value.specifier == "%x"
        assert excinfo.value.position == 1

    def test_helpers(self):
        assert format_literals("http://a/%s?x=%%%d") == ["http://a/", "?x=%"]


class TestAutomatonModel:
    """StringAutomatonと補助関数のテスト"""

    def test_fuse(self):
        assert fuse([Lit("a"), Lit(""), Lit("b"), Hole("h"), Lit("c")]) == (Lit("ab"), Hole(), Lit("c"))

    def test_hole_ignores_descriptor(self):
        assert Hole("x") == Hole("y")
        assert Hole("x").render() == "[ ]"

    def test_json_normal_form(self, weather_sir):
        """JSONは状態をトポロジカル順に番号付けし、辺を(from, to, label)順に並べる"""
        automaton = build_automata(build_cfg(load_program(weather_sir).methods[0]))[0]
        assert automaton_to_json(automaton) == {
            "entry": 0,
            "exits": [7],
            "edges": [
                {"from": 0, "to": 1, "lit": "https://weather.example.com"},
                {"from": 1, "to": 2, "lit": "?"},
                {"from": 2, "to": 3, "lit": "time="},
                {"from": 3, "to": 4, "lit": "today"},
                {"from": 3, "to": 4, "hole": "this.time"},
                {"from": 4, "to": 5, "lit": "&"},
                {"from": 5, "to": 6, "lit": "city="},
                {"from": 6, "to": 7, "hole": "getCity()"},
            ],
        }
        restored = automaton_from_json(automaton_to_json(automaton))
        assert automaton_to_json(restored) == automaton_to_json(automaton)

    def test_from_json_rejects_cycle(self):
        data = {"entry": 0, "exits": [1], "edges": [
            {"from": 0, "to": 1, "lit": "a"}, {"from": 1, "to": 0, "lit": "b"},
        ]}
        with pytest.raises(AnalysisError):
            automaton_from_json(data)

    def test_from_json_rejects_malformed(self):
        with pytest.raises(AnalysisError):
            automaton_from_json({"entry": 0})

    def test_linear_automaton(self):
        automaton = linear_automaton([Lit("a"), Lit(""), Hole("h")])
        assert len(automaton.edges) == 2
        assert automaton.exits == frozenset({2})


class TestStringAnalysisService:
    """StringAnalysisServiceのテスト"""

    def test_analyze_program(self, string_service, weather_sir):
        result = string_service.analyze_program(load_program(weather_sir))
        assert result.source_name == "weather"
        assert result.failures == ()
        assert [(method, site) for method, site, _ in result.items()] == [("getWeatherData", 0)]

    def test_failure_is_recorded(self, string_service):
        """失敗したメソッドは記録して残りを続行する"""
        source = 'method bad(p) {\n  append p "x"\n}\nmethod good() {\n  b = newbuilder\n  append b "a"\n}\n'
        result = string_service.analyze_program(parse_program(source, "mixed"))
        assert [name for name, _ in result.failures] == ["bad"]
        assert [method.method for method in result.methods] == ["good"]

    def test_loop_semantics_override(self, config_manager, fixtures_dir):
        service = StringAnalysisService(config_manager, loop_semantics=EXACTLY_ONE)
        automaton = service.analyze_method(load_program(fixtures_dir / "loop_once.sir").methods[0]).automata[0]
        assert _rendered(automaton) == ["http://example.com/items/next"]

    def test_unknown_loop_semantics(self, config_manager):
        with pytest.raises(AnalysisError):
            StringAnalysisService(config_manager, loop_semantics="forever")


class TestAgainstInterpreter:
    """ランダム生成したメソッドを総当たり実行と突き合わせる"""

    def test_language_equals_executions(self, string_service):
        rng = random.Random(2024)
        for index in range(500):
            method = generate_method(rng, name=f"m{index}")
            automaton = string_service.analyze_method(method).automata[0]
            language = language_of(automaton, 10000)
            assert not language.truncated
            assert {render_tokens(sequence) for sequence in language.sequences} == interpret_method(method), method

    def test_patterns_are_distinct(self, string_service):
        rng = random.Random(99)
        for index in range(100):
            method = generate_method(rng, name=f"m{index}")
            sequences = language_of(string_service.analyze_method(method).automata[0], 10000).sequences
            assert len(sequences) == len(set(sequences))

    @pytest.mark.slow
    def test_throughput(self, string_service):
        """1000メソッド・5万命令以上を10秒以内に解析する"""
        source = "".join(independent_forks_sir(16).replace("method forks()", f"method forks{i}()") for i in range(1000))
        program = parse_program(source, "bulk")
        instructions = sum(1 for method in program.methods for _ in iter_instructions(method.body))
        assert instructions >= 50000

        started = time.perf_counter()
        result = string_service.analyze_program(program)
        elapsed = time.perf_counter() - started
        assert result.failures == ()
        assert elapsed < 10.0
