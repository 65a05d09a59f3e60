"""Tokenizer shared by the model and property parsers."""

from dataclasses import dataclass

from .errors import ParseError

KEYWORDS = frozenset({
    "dtmc", "const", "int", "double", "bool", "module", "endmodule",
    "init", "label", "true", "false",
})

# longest first so that "<=" wins over "<"
SYMBOLS = (
    "->", "..", "<=", ">=", "!=",
    "[", "]", "(", ")", "{", "}", ":", ";", ",", "+", "-", "*", "/",
    "=", "<", ">", "&", "|", "!", "'", "?",
)

ALIASES = {"≤": "<=", "≥": ">=", "≠": "!="}


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "string", "kw", "sym" or "eof"
    text: str
    line: int
    col: int

    def is_(self, kind, text=None):
        return self.kind == kind and (text is None or self.text == text)

    def describe(self):
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


def tokenize(text, line_offset=0):
    """Split ``text`` into tokens, dropping whitespace and ``//`` comments.

    The returned list always ends with an ``eof`` token.
    """
    tokens = []
    i, n = 0, len(text)
    line, line_start = 1 + line_offset, 0
    while i < n:
        c = text[i]
        col = i - line_start + 1
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif c.isspace():
            i += 1
        elif text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            tokens.append(Token("num", text[i:j], line, col))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, line, col))
            i = j
        elif c == '"':
            j = text.find('"', i + 1)
            if j < 0 or "\n" in text[i:j]:
                raise ParseError("unterminated string", line, col)
            tokens.append(Token("string", text[i + 1:j], line, col))
            i = j + 1
        elif c in ALIASES:
            tokens.append(Token("sym", ALIASES[c], line, col))
            i += 1
        else:
            for sym in SYMBOLS:
                if text.startswith(sym, i):
                    tokens.append(Token("sym", sym, line, col))
                    i += len(sym)
                    break
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


class TokenStream:
    """Cursor over a token list with the usual peek/accept/expect helpers."""

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek(self, offset=0):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, kind, text=None, offset=0):
        return self.peek(offset).is_(kind, text)

    def at_sym(self, text, offset=0):
        return self.at("sym", text, offset)

    def advance(self):
        tok = self.current
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def accept(self, kind, text=None):
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind, text=None, what=None):
        if self.at(kind, text):
            return self.advance()
        if what is None:
            what = repr(text) if text else kind
        self.error(f"expected {what}, found {self.current.describe()}")

    def error(self, message, tok=None):
        tok = tok or self.current
        raise ParseError(message, tok.line, tok.col)
