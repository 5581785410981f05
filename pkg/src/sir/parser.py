"""
SIRテキストのパーサーと整形出力

文法（行指向、# 以降はコメント）:
    program   := method*
    method    := "method" IDENT "(" [IDENT ("," IDENT)*] ")" "{" stmt* "}"
    stmt      := IDENT "=" "newbuilder" | "append" IDENT operand
               | IDENT "=" "format" STRING operand* | IDENT "=" "copy" IDENT
               | IDENT "=" "tostring" IDENT | "request" IDENT
               | "if" "(*)" "{" stmt* "}" ["else" "{" stmt* "}"]
               | "loop" "{" stmt* "}"
    operand   := STRING | "@" DOTTED_IDENT | "call" IDENT "(" ")" | IDENT
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, List, Optional, Tuple, Union
from .ir import (
    Append, Copy, Format, If, Instruction, Literal, Loop, MethodIR, NewBuilder,
    Opaque, Operand, ProgramIR, Register, Request, ToString, operand_registers,
)
from ..utils.exceptions import DuplicateMethod, NestingTooDeep, SirError, SirSyntaxError, UndefinedRegister

logger = logging.getLogger(__name__)

DEFAULT_MAX_NESTING = 64

KEYWORDS = frozenset({
    "method", "newbuilder", "append", "format", "copy", "tostring",
    "request", "if", "else", "loop", "call",
})

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*")
_SYMBOLS = "=(){},*@"
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


@dataclass(frozen=True)
class Token:
    kind: str  # NAME / STRING / SYM / NEWLINE / EOF
    value: str
    line: int
    column: int


def tokenize(source: str) -> List[Token]:
    """
    ソーステキストをトークン列に分割

    Args:
        source: SIRテキスト

    Returns:
        トークンのリスト（末尾はEOF）

    Raises:
        SirSyntaxError: 不正な文字や未終端の文字列
    """
    tokens: List[Token] = []
    for line_no, line in enumerate(source.splitlines(), start=1):
        pos = 0
        while pos < len(line):
            char = line[pos]
            column = pos + 1
            if char in " \t\r\f\v":
                pos += 1
            elif char == "#":
                break
            elif char == '"':
                text, pos = _read_string(line, pos, line_no)
                tokens.append(Token("STRING", text, line_no, column))
            elif char in _SYMBOLS:
                tokens.append(Token("SYM", char, line_no, column))
                pos += 1
            else:
                match = _NAME_RE.match(line, pos)
                if not match:
                    raise SirSyntaxError(f"unexpected character {char!r}", line_no, column)
                tokens.append(Token("NAME", match.group(0), line_no, column))
                pos = match.end()
        tokens.append(Token("NEWLINE", "\n", line_no, len(line) + 1))
    last_line = len(source.splitlines())
    tokens.append(Token("EOF", "", last_line + 1, 1))
    return tokens


def _read_string(line: str, start: int, line_no: int) -> Tuple[str, int]:
    chars = []
    pos = start + 1
    while pos < len(line):
        char = line[pos]
        if char == '"':
            return "".join(chars), pos + 1
        if char == "\\":
            if pos + 1 >= len(line) or line[pos + 1] not in _ESCAPES:
                raise SirSyntaxError("invalid escape sequence", line_no, pos + 1, '\\" \\\\ or \\n')
            chars.append(_ESCAPES[line[pos + 1]])
            pos += 2
            continue
        chars.append(char)
        pos += 1
    raise SirSyntaxError("unterminated string literal", line_no, start + 1, '"')


class _Parser:
    """再帰下降パーサー"""

    def __init__(self, tokens: List[Token], max_nesting: int):
        self.tokens = tokens
        self.pos = 0
        self.max_nesting = max_nesting

    # --- トークン操作 ---

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def skip_newlines(self) -> None:
        while self.peek().kind == "NEWLINE":
            self.pos += 1

    def error(self, message: str, expected: Optional[str] = None) -> SirSyntaxError:
        token = self.peek()
        found = "end of input" if token.kind == "EOF" else ("end of line" if token.kind == "NEWLINE" else repr(token.value))
        return SirSyntaxError(f"{message}, found {found}", token.line, token.column, expected)

    def expect_sym(self, symbol: str) -> Token:
        token = self.peek()
        if token.kind != "SYM" or token.value != symbol:
            raise self.error("unexpected token", f"'{symbol}'")
        return self.advance()

    def expect_keyword(self, keyword: str) -> Token:
        token = self.peek()
        if token.kind != "NAME" or token.value != keyword:
            raise self.error("unexpected token", f"'{keyword}'")
        return self.advance()

    def expect_ident(self, what: str = "identifier", dotted: bool = False) -> str:
        token = self.peek()
        if token.kind != "NAME" or token.value in KEYWORDS or (not dotted and "." in token.value):
            raise self.error("unexpected token", what)
        return self.advance().value

    def at_sym(self, symbol: str) -> bool:
        token = self.peek()
        return token.kind == "SYM" and token.value == symbol

    def at_keyword(self, keyword: str) -> bool:
        token = self.peek()
        return token.kind == "NAME" and token.value == keyword

    # --- 文法規則 ---

    def parse_program(self, source_name: str) -> ProgramIR:
        methods: List[MethodIR] = []
        seen = set()
        self.skip_newlines()
        while self.peek().kind != "EOF":
            method = self.parse_method()
            if method.name in seen:
                raise DuplicateMethod(method.name)
            seen.add(method.name)
            methods.append(method)
            self.skip_newlines()
        return ProgramIR(methods=tuple(methods), source_name=source_name)

    def parse_method(self) -> MethodIR:
        self.expect_keyword("method")
        name = self.expect_ident("method name")
        self.expect_sym("(")
        params: List[str] = []
        if not self.at_sym(")"):
            params.append(self.expect_ident("parameter name"))
            while self.at_sym(","):
                self.advance()
                params.append(self.expect_ident("parameter name"))
        self.expect_sym(")")
        self.skip_newlines()
        body = self.parse_block(depth=0)
        _check_definitions(name, tuple(params), body)
        return MethodIR(name=name, params=tuple(params), body=body)

    def parse_block(self, depth: int) -> Tuple[Instruction, ...]:
        if depth > self.max_nesting:
            raise NestingTooDeep(depth, self.max_nesting)
        self.expect_sym("{")
        statements: List[Instruction] = []
        self.skip_newlines()
        while not self.at_sym("}"):
            if self.peek().kind == "EOF":
                raise self.error("unterminated block", "'}'")
            statements.append(self.parse_statement(depth))
            self.end_statement()
            self.skip_newlines()
        self.expect_sym("}")
        return tuple(statements)

    def end_statement(self) -> None:
        # 文は改行または閉じ括弧の直前で終わる
        if self.peek().kind == "NEWLINE" or self.at_sym("}"):
            return
        raise self.error("unexpected token after statement", "end of line or '}'")

    def parse_statement(self, depth: int) -> Instruction:
        token = self.peek()
        if token.kind != "NAME":
            raise self.error("unexpected token", "statement")
        if token.value == "append":
            self.advance()
            builder = self.expect_ident("builder register")
            return Append(builder, self.parse_operand())
        if token.value == "request":
            self.advance()
            return Request(self.expect_ident("register"))
        if token.value == "if":
            self.advance()
            self.expect_sym("(")
            self.expect_sym("*")
            self.expect_sym(")")
            then_block = self.parse_block(depth + 1)
            else_block: Tuple[Instruction, ...] = ()
            mark = self.pos
            self.skip_newlines()
            if self.at_keyword("else"):
                self.advance()
                self.skip_newlines()
                else_block = self.parse_block(depth + 1)
            else:
                self.pos = mark
            return If(then_block, else_block)
        if token.value == "loop":
            self.advance()
            return Loop(self.parse_block(depth + 1))

        dest = self.expect_ident("statement")
        self.expect_sym("=")
        op = self.peek()
        if op.kind == "NAME" and op.value == "newbuilder":
            self.advance()
            return NewBuilder(dest)
        if op.kind == "NAME" and op.value == "copy":
            self.advance()
            return Copy(dest, self.expect_ident("register"))
        if op.kind == "NAME" and op.value == "tostring":
            self.advance()
            return ToString(dest, self.expect_ident("builder register"))
        if op.kind == "NAME" and op.value == "format":
            self.advance()
            template = self.peek()
            if template.kind != "STRING":
                raise self.error("unexpected token", "format template string")
            self.advance()
            if not template.value:
                raise SirSyntaxError("format template must not be empty", template.line, template.column, "non-empty string")
            args: List[Operand] = []
            while self.peek().kind != "NEWLINE" and not self.at_sym("}"):
                args.append(self.parse_operand())
            return Format(dest, template.value, tuple(args))
        raise self.error("unexpected token", "'newbuilder', 'format', 'copy' or 'tostring'")

    def parse_operand(self) -> Operand:
        token = self.peek()
        if token.kind == "STRING":
            self.advance()
            return Literal(token.value)
        if self.at_sym("@"):
            self.advance()
            return Opaque(self.expect_ident("dotted identifier", dotted=True))
        if self.at_keyword("call"):
            self.advance()
            name = self.expect_ident("method name")
            self.expect_sym("(")
            self.expect_sym(")")
            return Opaque(f"{name}()")
        if token.kind == "NAME":
            return Register(self.expect_ident("operand"))
        raise self.error("unexpected token", "operand")


def _check_definitions(method: str, params: Tuple[str, ...], body: Tuple[Instruction, ...]) -> None:
    """全パスで参照前に定義されていることを構造的に検査"""

    def walk(block: Tuple[Instruction, ...], defined: FrozenSet[str]) -> FrozenSet[str]:
        for instruction in block:
            if isinstance(instruction, If):
                after_then = walk(instruction.then_block, defined)
                after_else = walk(instruction.else_block, defined)
                defined = after_then & after_else
            elif isinstance(instruction, Loop):
                # 0回実行のパスがあるため、ループ内の定義は後続に持ち越さない
                walk(instruction.body, defined)
            else:
                for name in operand_registers(instruction):
                    if name not in defined:
                        raise UndefinedRegister(name, method)
                dest = getattr(instruction, "dest", None)
                if dest is not None:
                    defined = defined | {dest}
        return defined

    walk(body, frozenset(params))


def parse_program(source: str, source_name: str = "<string>", max_nesting: int = DEFAULT_MAX_NESTING) -> ProgramIR:
    """
    SIRテキストを解析してProgramIRを生成

    Args:
        source: SIRテキスト
        source_name: 入力単位のラベル（ファイル名など）
        max_nesting: if/loopの最大ネスト深さ

    Returns:
        ProgramIR

    Raises:
        SirSyntaxError: 構文エラー時
        UndefinedRegister: 未定義レジスタの参照時
        DuplicateMethod: メソッド名の重複時
        NestingTooDeep: ネスト上限超過時
    """
    program = _Parser(tokenize(source), max_nesting).parse_program(source_name)
    logger.debug(f"SIR解析完了: {source_name} ({len(program.methods)}メソッド)")
    return program


def load_program(path: Union[str, Path], source_name: Optional[str] = None, max_nesting: int = DEFAULT_MAX_NESTING) -> ProgramIR:
    """
    SIRファイルを読み込んで解析

    Raises:
        SirError: ファイルを読めない場合、または解析エラー時
    """
    path = Path(path)
    try:
        source = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SirError(f"SIRファイル読み込みエラー {path}: {str(e)}") from e
    return parse_program(source, source_name or path.stem, max_nesting)


# --- 整形出力 ---

def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def format_operand(operand: Operand) -> str:
    if isinstance(operand, Literal):
        return _quote(operand.text)
    if isinstance(operand, Opaque):
        if operand.is_call:
            return f"call {operand.descriptor}"
        return f"@{operand.descriptor}"
    return operand.name


def _format_block(block: Tuple[Instruction, ...], indent: int) -> List[str]:
    pad = "  " * indent
    lines: List[str] = []
    for instruction in block:
        if isinstance(instruction, NewBuilder):
            lines.append(f"{pad}{instruction.dest} = newbuilder")
        elif isinstance(instruction, Append):
            lines.append(f"{pad}append {instruction.builder} {format_operand(instruction.operand)}")
        elif isinstance(instruction, Format):
            args = "".join(f" {format_operand(arg)}" for arg in instruction.args)
            lines.append(f"{pad}{instruction.dest} = format {_quote(instruction.template)}{args}")
        elif isinstance(instruction, Copy):
            lines.append(f"{pad}{instruction.dest} = copy {instruction.src}")
        elif isinstance(instruction, ToString):
            lines.append(f"{pad}{instruction.dest} = tostring {instruction.builder}")
        elif isinstance(instruction, Request):
            lines.append(f"{pad}request {instruction.register}")
        elif isinstance(instruction, If):
            lines.append(f"{pad}if (*) {{")
            lines.extend(_format_block(instruction.then_block, indent + 1))
            if instruction.else_block:
                lines.append(f"{pad}}} else {{")
                lines.extend(_format_block(instruction.else_block, indent + 1))
            lines.append(f"{pad}}}")
        elif isinstance(instruction, Loop):
            lines.append(f"{pad}loop {{")
            lines.extend(_format_block(instruction.body, indent + 1))
            lines.append(f"{pad}}}")
    return lines


def format_method(method: MethodIR) -> str:
    lines = [f"method {method.name}({', '.join(method.params)}) {{"]
    lines.extend(_format_block(method.body, 1))
    lines.append("}")
    return "\n".join(lines)


def format_program(program: ProgramIR) -> str:
    """ProgramIRをSIRテキストに整形（再解析で構造的に等しいProgramIRに戻る）"""
    return "\n\n".join(format_method(method) for method in program.methods) + ("\n" if program.methods else "")
