"""
format命令のテンプレート展開
"""
import re
from typing import List, Sequence
from ..sir.ir import Literal, Opaque, Operand
from ..utils.exceptions import ArityMismatch, UnknownSpecifier
from .automaton import EdgeLabel, Hole, Lit, fuse

SPECIFIER_PATTERN = re.compile(r"%(.?)")
VALUE_SPECIFIERS = ("s", "d", "f")


def operand_label(operand: Operand) -> EdgeLabel:
    """オペランド1つを辺ラベルに変換（リテラル以外はHole）"""
    if isinstance(operand, Literal):
        return Lit(operand.text)
    if isinstance(operand, Opaque):
        return Hole(operand.descriptor)
    return Hole(f"reg:{operand.name}")


def expand_format(template: str, args: Sequence[Operand]) -> List[EdgeLabel]:
    """
    テンプレートを %s %d %f %% で分割して辺ラベル列に展開する

    Args:
        template: formatテンプレート
        args: 指定子が順に消費するオペランド

    Returns:
        隣接Litを連結した辺ラベル列

    Raises:
        ArityMismatch: 指定子の数と引数の数が一致しない場合
        UnknownSpecifier: 未対応の指定子がある場合
    """
    labels: List[EdgeLabel] = []
    consumed = 0
    position = 0
    for match in SPECIFIER_PATTERN.finditer(template):
        labels.append(Lit(template[position:match.start()]))
        specifier = match.group(1)
        if specifier == "%":
            labels.append(Lit("%"))
        elif specifier in VALUE_SPECIFIERS:
            if consumed < len(args):
                labels.append(operand_label(args[consumed]))
            consumed += 1
        else:
            raise UnknownSpecifier(f"%{specifier}", match.start())
        position = match.end()
    labels.append(Lit(template[position:]))

    if consumed != len(args):
        raise ArityMismatch(consumed, len(args))
    return list(fuse(labels))


def format_literals(template: str) -> List[str]:
    """テンプレート中のリテラル区間（%%は%として連結）"""
    segments: List[str] = []
    current = ""
    position = 0
    for match in SPECIFIER_PATTERN.finditer(template):
        current += template[position:match.start()]
        if match.group(1) == "%":
            current += "%"
        else:
            segments.append(current)
            current = ""
        position = match.end()
    current += template[position:]
    segments.append(current)
    return [segment for segment in segments if segment]
