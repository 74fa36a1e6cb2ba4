"""WAT (WebAssembly text) parsing into per-function ASTs.

The parser accepts the textual output of tools like ``wasm2wat`` in both of
its shapes: folded s-expressions (``(i32.add (local.get 0) (local.get 1))``)
and the default flat form where structured instructions are written as
``block``/``loop``/``if`` ... ``end`` sequences.  Flat structured bodies are
normalized into the same construct subtrees the folded form produces, so the
rest of the pipeline never has to distinguish the two.

Nodes are classified into three kinds:

* ``CONSTRUCT`` -- structural keywords (``func``, ``block``, ``if``,
  ``param`` ...).  Only ``block``/``if``/``loop`` create nesting for path
  extraction; ``then``/``else`` are kept in the tree but are transparent.
* ``INSTRUCTION`` -- a Wasm mnemonic.  Unknown atoms at instruction position
  are classified as instructions so that mnemonics from future proposals flow
  through instead of crashing the parse.
* ``LITERAL`` -- immediates, identifiers, value types and quoted strings.
  Literals never have children and never enter paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from .errors import MalformedTokenError, UnbalancedParensError


class NodeKind(Enum):
    CONSTRUCT = "construct"
    INSTRUCTION = "instruction"
    LITERAL = "literal"


@dataclass
class AstNode:
    label: str
    kind: NodeKind
    children: list["AstNode"] = field(default_factory=list)

    def walk(self) -> Iterator["AstNode"]:
        """Yield this node and all descendants in depth-first pre-order."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass
class FunctionNode:
    ordinal: int
    name: Optional[str]
    body: AstNode

    def __post_init__(self) -> None:
        if self.body.label != "func":
            raise ValueError("FunctionNode body must be rooted at a 'func' construct")


@dataclass
class ModuleAst:
    source_id: str
    functions: list[FunctionNode] = field(default_factory=list)


# The three nonterminals that create nesting, plus the structural keywords the
# grammar subset knows about.  Heads outside this set parse as instructions.
NESTING_CONSTRUCTS = frozenset({"block", "if", "loop"})

CONSTRUCT_KEYWORDS = frozenset(
    {
        "module", "func", "block", "loop", "if", "then", "else",
        "param", "result", "local", "type", "export",
        # module-level fields tolerated so whole wasm2wat files parse cleanly
        "import", "memory", "table", "global", "data", "elem", "start",
        "offset", "item", "mut", "shared", "field", "ref", "rec", "sub",
        "final", "tag",
    }
)

_VALTYPES = frozenset(
    {
        "i32", "i64", "f32", "f64", "v128",
        "funcref", "externref", "exnref", "anyref", "eqref", "i31ref",
        "structref", "arrayref", "noneref", "nullref", "nullfuncref",
        "nullexternref",
    }
)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------


@dataclass
class _Tok:
    text: str
    pos: int
    is_string: bool = False


_LPAREN = object()
_RPAREN = object()


def _tokenize(text: str) -> Iterator[tuple[object, int]]:
    """Yield (token, position) pairs; token is _LPAREN, _RPAREN or a _Tok.

    Line comments (``;;``), nested block comments (``(; ... ;)``) and
    whitespace are skipped here so the parser never sees them.
    """
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c == ";":
            if i + 1 < n and text[i + 1] == ";":
                end = text.find("\n", i)
                i = n if end == -1 else end + 1
                continue
            raise MalformedTokenError("stray ';'", i)
        if c == "(" and i + 1 < n and text[i + 1] == ";":
            depth = 1
            start = i
            i += 2
            while i < n and depth:
                if text.startswith("(;", i):
                    depth += 1
                    i += 2
                elif text.startswith(";)", i):
                    depth -= 1
                    i += 2
                else:
                    i += 1
            if depth:
                raise MalformedTokenError("unterminated block comment", start)
            continue
        if c == "(":
            yield _LPAREN, i
            i += 1
            continue
        if c == ")":
            yield _RPAREN, i
            i += 1
            continue
        if c == '"':
            start = i
            i += 1
            out = []
            while i < n and text[i] != '"':
                if text[i] == "\\":
                    if i + 1 >= n:
                        break
                    out.append(text[i : i + 2])
                    i += 2
                else:
                    out.append(text[i])
                    i += 1
            if i >= n:
                raise MalformedTokenError("unterminated string literal", start)
            i += 1  # closing quote
            yield _Tok(_unescape("".join(out)), start, is_string=True), start
            continue
        start = i
        while i < n and text[i] not in ' \t\r\n();"':
            i += 1
        yield _Tok(text[start:i], start), start


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "'": "'", "\\": "\\"}


def _unescape(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        c = raw[i]
        if c != "\\":
            out.append(c)
            i += 1
            continue
        nxt = raw[i + 1]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt == "u" and i + 2 < len(raw) and raw[i + 2] == "{":
            close = raw.find("}", i + 3)
            if close == -1:
                out.append(raw[i:])
                break
            out.append(chr(int(raw[i + 3 : close], 16)))
            i = close + 1
        else:
            # two-digit hex byte escape; keep verbatim if it is not one
            try:
                out.append(chr(int(raw[i + 1 : i + 3], 16)))
                i += 3
            except ValueError:
                out.append(nxt)
                i += 2
    return "".join(out)


_SExpr = list  # list of _Tok | _SExpr


def _read_sexprs(text: str) -> list[Union[_Tok, _SExpr]]:
    """Read all top-level forms (lists and atoms) from ``text``."""
    stack: list[list] = [[]]
    opens: list[int] = []
    for token, pos in _tokenize(text):
        if token is _LPAREN:
            stack.append([])
            opens.append(pos)
        elif token is _RPAREN:
            if len(stack) == 1:
                raise UnbalancedParensError("unmatched ')'", pos)
            done = stack.pop()
            opens.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(token)
    if len(stack) != 1:
        raise UnbalancedParensError("unclosed '('", opens[-1])
    return stack[0]


# ---------------------------------------------------------------------------
# AST construction
# ---------------------------------------------------------------------------


def _is_immediate(tok: _Tok) -> bool:
    if tok.is_string:
        return True
    t = tok.text
    c0 = t[0]
    if c0.isdigit() or c0 in "+-$":
        return True
    if "=" in t:  # offset= / align= keyword immediates
        return True
    if t == "inf" or t.startswith(("nan", "inf:")):
        return True
    return False


class _BodyBuilder:
    """Turns a mixed stream of atoms and sub-lists into AST nodes.

    The same builder serves folded bodies (everything parenthesized) and flat
    wasm2wat output, where ``block``/``loop``/``if`` open implicit constructs
    closed by ``end``.
    """

    def __init__(self, items: list):
        self.items = items
        self.i = 0

    def build(self, stop: tuple[str, ...] = ()) -> tuple[list[AstNode], Optional[str]]:
        nodes: list[AstNode] = []
        while self.i < len(self.items):
            item = self.items[self.i]
            if isinstance(item, _Tok) and not item.is_string and item.text in stop:
                self.i += 1
                return nodes, item.text
            nodes.append(self._step())
        return nodes, None

    def _step(self) -> AstNode:
        item = self.items[self.i]
        if isinstance(item, list):
            self.i += 1
            return _build_form(item)
        text = item.text
        if not item.is_string and text in NESTING_CONSTRUCTS:
            return self._flat_construct()
        if not item.is_string and text in ("end", "else"):
            raise MalformedTokenError(f"unmatched '{text}'", item.pos)
        if _is_immediate(item) or text in _VALTYPES:
            # identifiers, labels and stray immediates become literals
            self.i += 1
            return AstNode(text, NodeKind.LITERAL)
        return self._instruction()

    def _instruction(self) -> AstNode:
        item = self.items[self.i]
        node = AstNode(item.text, NodeKind.INSTRUCTION)
        self.i += 1
        while self.i < len(self.items):
            nxt = self.items[self.i]
            if isinstance(nxt, list):
                # call_indirect (type N) / select (result T) annotations
                if nxt and isinstance(nxt[0], _Tok) and nxt[0].text in ("type", "param", "result"):
                    node.children.append(_build_form(nxt))
                    self.i += 1
                    continue
                break
            if _is_immediate(nxt):
                node.children.append(AstNode(nxt.text, NodeKind.LITERAL))
                self.i += 1
                continue
            break
        return node

    def _flat_construct(self) -> AstNode:
        opener = self.items[self.i]
        node = AstNode(opener.text, NodeKind.CONSTRUCT)
        self.i += 1
        self._consume_header(node)
        if opener.text == "if":
            then_node = AstNode("then", NodeKind.CONSTRUCT)
            arm, terminator = self.build(stop=("else", "end"))
            then_node.children = arm
            node.children.append(then_node)
            if terminator == "else":
                else_node = AstNode("else", NodeKind.CONSTRUCT)
                arm, terminator = self.build(stop=("end",))
                else_node.children = arm
                node.children.append(else_node)
            if terminator != "end":
                raise MalformedTokenError("missing 'end' for 'if'", opener.pos)
        else:
            body, terminator = self.build(stop=("end",))
            if terminator != "end":
                raise MalformedTokenError(f"missing 'end' for '{opener.text}'", opener.pos)
            node.children.extend(body)
        return node

    def _consume_header(self, node: AstNode) -> None:
        # label identifier, bare result types, or (type|param|result ...) lists
        while self.i < len(self.items):
            item = self.items[self.i]
            if isinstance(item, list):
                if item and isinstance(item[0], _Tok) and item[0].text in ("type", "param", "result"):
                    node.children.append(_build_form(item))
                    self.i += 1
                    continue
                break
            if not item.is_string and (item.text.startswith("$") or item.text in _VALTYPES):
                node.children.append(AstNode(item.text, NodeKind.LITERAL))
                self.i += 1
                continue
            break


def _build_form(form: list) -> AstNode:
    if not form:
        raise MalformedTokenError("empty form '()'", 0)
    head = form[0]
    if not isinstance(head, _Tok):
        raise MalformedTokenError("form must start with an atom", 0)
    rest = form[1:]
    if not head.is_string and head.text in CONSTRUCT_KEYWORDS:
        node = AstNode(head.text, NodeKind.CONSTRUCT)
        builder = _BodyBuilder(rest)
        children, terminator = builder.build()
        if terminator is not None:  # unreachable: build() without stop never stops early
            raise MalformedTokenError(f"unexpected '{terminator}'", head.pos)
        node.children = children
        return node
    node = AstNode(head.text, NodeKind.INSTRUCTION)
    for item in rest:
        if isinstance(item, list):
            node.children.append(_build_form(item))
        else:
            node.children.append(AstNode(item.text, NodeKind.LITERAL))
    return node


def _collect_functions(forms: list) -> Iterator[AstNode]:
    """Yield 'func' construct nodes that define functions.

    Only direct children of a module (or top-level forms) count; ``(func $f)``
    references inside exports/imports are not definitions.
    """
    for form in forms:
        if form.label == "module":
            for child in form.children:
                if child.kind is NodeKind.CONSTRUCT and child.label == "func":
                    yield child
        elif form.kind is NodeKind.CONSTRUCT and form.label == "func":
            yield form


def _function_name(body: AstNode) -> Optional[str]:
    for child in body.children:
        if child.kind is NodeKind.LITERAL and child.label.startswith("$"):
            return child.label[1:]
    for child in body.children:
        if child.kind is NodeKind.CONSTRUCT and child.label == "export" and child.children:
            first = child.children[0]
            if first.kind is NodeKind.LITERAL:
                return first.label
    return None


def parse_module(text: str, source_id: str = "<string>") -> ModuleAst:
    """Parse WAT module text into a :class:`ModuleAst`.

    Every ``(func ...)`` definition becomes one :class:`FunctionNode`; a
    module with no functions parses to an empty function list.  Raises
    :class:`UnbalancedParensError` or :class:`MalformedTokenError` on broken
    input.
    """
    sexprs = _read_sexprs(text)
    forms = []
    for sexpr in sexprs:
        if isinstance(sexpr, list):
            forms.append(_build_form(sexpr))
        else:
            raise MalformedTokenError(f"unexpected top-level atom '{sexpr.text}'", sexpr.pos)
    functions = [
        FunctionNode(ordinal=i, name=_function_name(body), body=body)
        for i, body in enumerate(_collect_functions(forms))
    ]
    return ModuleAst(source_id=source_id, functions=functions)


def linearize(func: FunctionNode) -> list[str]:
    """Return the function's instruction mnemonics in execution/textual order.

    Folded operand subtrees precede their parent instruction (post-order);
    constructs contribute their inner instructions in source order; construct
    and literal labels are excluded.
    """
    return [mnemonic for mnemonic, _ in linearize_with_immediates(func)]


def linearize_with_immediates(func: FunctionNode) -> list[tuple[str, tuple[str, ...]]]:
    """Like :func:`linearize` but pairs each mnemonic with its literal immediates."""
    out: list[tuple[str, tuple[str, ...]]] = []

    def visit(node: AstNode) -> None:
        if node.kind is NodeKind.INSTRUCTION:
            for child in node.children:
                visit(child)
            immediates = tuple(
                c.label for c in node.children if c.kind is NodeKind.LITERAL
            )
            out.append((node.label, immediates))
        elif node.kind is NodeKind.CONSTRUCT:
            for child in node.children:
                visit(child)

    for child in func.body.children:
        visit(child)
    return out
