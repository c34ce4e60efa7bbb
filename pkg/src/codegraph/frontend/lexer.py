"""Tokenizer for the Java subset.

Comments and whitespace are dropped.  Each token is flagged ``significant``
when it becomes a leaf of the AST (identifiers, literals, operators, type and
modifier keywords, ``this``).  Punctuation and structural keywords such as
``if`` or ``return`` are implied by the node kind and are not significant.
"""

import re
from dataclasses import dataclass

from codegraph.errors import ParseError

MODIFIERS = frozenset(
    "public private protected static final abstract synchronized native "
    "transient volatile strictfp".split()
)
BASIC_TYPES = frozenset("int long short byte char boolean float double void".split())
STRUCTURAL_KEYWORDS = frozenset("class if else for while return new break continue".split())
LITERAL_KEYWORDS = frozenset({"true", "false", "null"})
# Reserved but outside the subset; the parser rejects them where they appear.
OTHER_KEYWORDS = frozenset(
    "assert case catch const default do enum extends finally goto implements "
    "import instanceof interface package super switch throw throws try".split()
)

OPERATORS = sorted(
    """>>>= <<= >>= >>> == != <= >= && || ++ -- += -= *= /= %= &= |= ^= << >>
    = < > ! ~ + - * / % & | ^""".split(),
    key=len,
    reverse=True,
)
SEPARATORS = frozenset("( ) { } [ ] ; , . ? :".split())

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<open_comment>/\*)
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFdD]?|\d+[eE][+-]?\d+[fFdD]?|\d+[fFdD])
  | (?P<int>0[xX][0-9a-fA-F]+[lL]?|\d+[lL]?)
  | (?P<char>'(?:\\.|[^'\\\n])+')
  | (?P<string>"(?:\\.|[^"\\\n])*")
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<op>"""
    + "|".join(re.escape(o) for o in OPERATORS)
    + r""")
  | (?P<sep>[(){}\[\];,.?:])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, literal, op, sep
    text: str
    line: int
    column: int
    start: int  # byte offsets into the UTF-8 source
    end: int

    @property
    def significant(self):
        if self.kind in ("ident", "literal", "op"):
            return True
        return self.kind == "keyword" and (
            self.text in MODIFIERS or self.text in BASIC_TYPES or self.text == "this"
        )


def tokenize(text):
    """Split ``text`` into a list of tokens, dropping whitespace and comments."""
    tokens = []
    pos = 0
    byte_pos = 0
    line, line_start = 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, "a token", text[pos])
        group = m.lastgroup
        if group == "open_comment":
            raise ParseError(line, pos - line_start + 1, "'*/' closing this comment", "end of input")
        value = m.group()
        nbytes = len(value.encode("utf-8"))
        if group == "block_comment" or group == "ws":
            pass
        elif group != "line_comment":
            if group == "ident":
                if value in LITERAL_KEYWORDS:
                    kind = "literal"
                elif (
                    value in MODIFIERS
                    or value in BASIC_TYPES
                    or value in STRUCTURAL_KEYWORDS
                    or value in OTHER_KEYWORDS
                    or value == "this"
                ):
                    kind = "keyword"
                else:
                    kind = "ident"
            elif group in ("float", "int", "char", "string"):
                kind = "literal"
            else:
                kind = group
            tokens.append(
                Token(kind, value, line, pos - line_start + 1, byte_pos, byte_pos + nbytes)
            )
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
        byte_pos += nbytes
    return tokens


def significant_tokens(text):
    return [t.text for t in tokenize(text) if t.significant]
