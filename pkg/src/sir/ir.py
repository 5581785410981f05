"""
SIR（文字列構築中間表現）のデータ型定義

プログラムは不変のdataclassで表現する。命令IDはブロック木の前順序位置
（If/Loop自身が先、続いてthen/elseまたはbody）。
"""
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Tuple, Union


@dataclass(frozen=True)
class Literal:
    """文字列リテラルオペランド"""
    text: str


@dataclass(frozen=True)
class Opaque:
    """フィールド読み出し・メソッド呼び出し結果など、値が不明なオペランド"""
    descriptor: str

    @property
    def is_call(self) -> bool:
        return self.descriptor.endswith("()")


@dataclass(frozen=True)
class Register:
    """レジスタ参照オペランド"""
    name: str


Operand = Union[Literal, Opaque, Register]


@dataclass(frozen=True)
class NewBuilder:
    dest: str


@dataclass(frozen=True)
class Append:
    builder: str
    operand: Operand


@dataclass(frozen=True)
class Format:
    dest: str
    template: str
    args: Tuple[Operand, ...] = ()


@dataclass(frozen=True)
class Copy:
    dest: str
    src: str


@dataclass(frozen=True)
class ToString:
    dest: str
    builder: str


@dataclass(frozen=True)
class If:
    """条件は保持しない（パス非依存解析のため常に非決定的分岐）"""
    then_block: Tuple["Instruction", ...] = ()
    else_block: Tuple["Instruction", ...] = ()


@dataclass(frozen=True)
class Loop:
    body: Tuple["Instruction", ...] = ()


@dataclass(frozen=True)
class Request:
    register: str


Instruction = Union[NewBuilder, Append, Format, Copy, ToString, If, Loop, Request]


@dataclass(frozen=True)
class MethodIR:
    """メソッド1つ分のSIR。cfgはbuild_cfgで設定される派生データ"""
    name: str
    params: Tuple[str, ...]
    body: Tuple[Instruction, ...]
    cfg: Optional[Any] = field(default=None, compare=False, repr=False)

    def instructions(self) -> Iterator[Tuple[int, Instruction]]:
        """(命令ID, 命令) を前順序で列挙"""
        return iter_instructions(self.body)


@dataclass(frozen=True)
class ProgramIR:
    methods: Tuple[MethodIR, ...] = ()
    source_name: str = "<string>"

    def method(self, name: str) -> MethodIR:
        for method in self.methods:
            if method.name == name:
                return method
        raise KeyError(name)


def iter_instructions(body: Tuple[Instruction, ...], start: int = 0) -> Iterator[Tuple[int, Instruction]]:
    """ブロック木を前順序で走査し、命令IDを振りながら列挙する"""
    stack = [iter(body)]
    next_id = start
    while stack:
        try:
            instruction = next(stack[-1])
        except StopIteration:
            stack.pop()
            continue
        yield next_id, instruction
        next_id += 1
        if isinstance(instruction, If):
            # thenとelseを連結した1本のイテレータを積む（thenが先）
            stack.append(iter(instruction.then_block + instruction.else_block))
        elif isinstance(instruction, Loop):
            stack.append(iter(instruction.body))


def nesting_depth(body: Tuple[Instruction, ...]) -> int:
    """if/loopの最大ネスト深さ"""
    depth = 0
    stack = [(body, 0)]
    while stack:
        block, level = stack.pop()
        for instruction in block:
            if isinstance(instruction, If):
                depth = max(depth, level + 1)
                stack.append((instruction.then_block, level + 1))
                stack.append((instruction.else_block, level + 1))
            elif isinstance(instruction, Loop):
                depth = max(depth, level + 1)
                stack.append((instruction.body, level + 1))
    return depth


def operand_registers(instruction: Instruction) -> Tuple[str, ...]:
    """命令が読み出すレジスタ名（構造命令は空）"""
    if isinstance(instruction, Append):
        names = [instruction.builder]
        if isinstance(instruction.operand, Register):
            names.append(instruction.operand.name)
        return tuple(names)
    if isinstance(instruction, Format):
        return tuple(arg.name for arg in instruction.args if isinstance(arg, Register))
    if isinstance(instruction, Copy):
        return (instruction.src,)
    if isinstance(instruction, ToString):
        return (instruction.builder,)
    if isinstance(instruction, Request):
        return (instruction.register,)
    return ()
