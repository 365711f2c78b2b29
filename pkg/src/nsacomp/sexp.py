"""Minimal S-expression reader/printer shared by the term and formula syntaxes."""
from dataclasses import dataclass


class SExpSyntaxError(SyntaxError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


@dataclass(frozen=True)
class Atom:
    text: str
    position: int = 0

    def __str__(self):
        return self.text


class SList(list):
    """A parenthesised list; remembers where it opened."""

    def __init__(self, items=(), position=0):
        super().__init__(items)
        self.position = position


def tokenize(text):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, i
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield text[i:j], i
            i = j


def read_all(text):
    """Read every top-level S-expression in ``text``."""
    stack = [SList()]
    for tok, pos in tokenize(text):
        if tok == "(":
            stack.append(SList(position=pos))
        elif tok == ")":
            if len(stack) == 1:
                raise SExpSyntaxError("unbalanced ')'", pos)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(Atom(tok, pos))
    if len(stack) != 1:
        raise SExpSyntaxError("unexpected end of input, unclosed '('", stack[-1].position)
    return list(stack[0])


def read(text):
    items = read_all(text)
    if len(items) != 1:
        raise SExpSyntaxError(f"expected exactly one expression, found {len(items)}", 0)
    return items[0]


def is_atom(x, text=None):
    return isinstance(x, Atom) and (text is None or x.text == text)


def dumps(x):
    if isinstance(x, list):
        return "(" + " ".join(dumps(y) for y in x) + ")"
    return str(x)
