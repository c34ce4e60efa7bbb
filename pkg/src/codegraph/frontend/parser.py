"""Recursive-descent parser for the Java subset described in ``grammar``."""

from codegraph.errors import ParseError
from codegraph.frontend.grammar import KIND_BY_NAME
from codegraph.frontend.lexer import BASIC_TYPES, MODIFIERS, tokenize
from codegraph.frontend.tree import Ast, AstNode, SourceUnit

ASSIGN_OPS = frozenset("= += -= *= /= %= &= |= ^= <<= >>= >>>=".split())
# Binary operators by increasing precedence.
BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", ">", "<=", ">="),
    ("<<", ">>", ">>>"),
    ("+", "-"),
    ("*", "/", "%"),
)
PREFIX_OPS = frozenset("+ - ! ~ ++ --".split())
STATEMENT_EXPRESSIONS = frozenset(
    {"Assignment", "MethodInvocation", "ObjectCreation", "PostfixOperation"}
)


class _Raw:
    __slots__ = ("kind", "token", "children", "start", "end")

    def __init__(self, kind, token=None, children=(), start=0, end=0):
        self.kind = kind
        self.token = token
        self.children = list(children)
        self.start = start
        self.end = end


class Parser:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0
        self._eof_line = text.count("\n") + 1
        self._eof_col = len(text) - text.rfind("\n")

    # token helpers ---------------------------------------------------

    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, text, offset=0):
        tok = self.peek(offset)
        return tok is not None and tok.text == text and tok.kind != "literal"

    def error(self, expected):
        tok = self.peek()
        if tok is None:
            raise ParseError(self._eof_line, self._eof_col, expected, "end of input")
        raise ParseError(tok.line, tok.column, expected, tok.text)

    def advance(self):
        tok = self.peek()
        if tok is None:
            self.error("more input")
        self.pos += 1
        return tok

    def expect(self, text):
        if not self.at(text):
            self.error(repr(text))
        return self.advance()

    def leaf(self, kind, tok):
        return _Raw(kind, tok.text, (), tok.start, tok.end)

    def node(self, kind, children, start_tok):
        end = self.tokens[self.pos - 1].end
        return _Raw(kind, None, children, start_tok.start, end)

    def ident(self, kind="Identifier"):
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            self.error("an identifier")
        return self.leaf(kind, self.advance())

    # declarations ----------------------------------------------------

    def compilation_unit(self):
        start = self.peek()
        if start is None:
            self.error("a class or method declaration")
        members = []
        while self.peek() is not None:
            members.append(self.declaration(top_level=True))
        return self.node("CompilationUnit", members, start)

    def modifiers(self):
        mods = []
        while self.peek() is not None and self.peek().text in MODIFIERS and self.peek().kind == "keyword":
            mods.append(self.leaf("Modifier", self.advance()))
        return mods

    def declaration(self, top_level=False):
        start = self.peek()
        mods = self.modifiers()
        if self.at("class"):
            if not top_level:
                self.error("a field or method declaration")
            self.advance()
            name = self.ident()
            self.expect("{")
            members = []
            while not self.at("}"):
                if self.peek() is None:
                    self.error("'}'")
                members.append(self.declaration())
            self.expect("}")
            return self.node("ClassDeclaration", mods + [name] + members, start)
        type_ = self.type_()
        name = self.ident()
        if self.at("("):
            params = self.formal_parameters()
            if not self.at("{"):
                self.error("'{' opening the method body")
            body = self.block()
            return self.node("MethodDeclaration", mods + [type_, name, params, body], start)
        if top_level:
            self.error("'(' of a method declaration")
        declarators = [self.variable_declarator(name)]
        while self.at(","):
            self.advance()
            declarators.append(self.variable_declarator())
        self.expect(";")
        return self.node("FieldDeclaration", mods + [type_] + declarators, start)

    def formal_parameters(self):
        start = self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                pstart = self.peek()
                mods = self.modifiers()
                type_ = self.type_()
                name = self.ident()
                params.append(self.node("FormalParameter", mods + [type_, name], pstart))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        return self.node("FormalParameters", params, start)

    def type_(self):
        start = self.peek()
        if start is None:
            self.error("a type")
        if start.kind == "keyword" and start.text in BASIC_TYPES:
            t = self.leaf("BasicType", self.advance())
        elif start.kind == "ident":
            names = [self.ident("TypeName")]
            while self.at(".") and self.peek(1) is not None and self.peek(1).kind == "ident":
                self.advance()
                names.append(self.ident("TypeName"))
            t = self.node("ReferenceType", names, start)
        else:
            self.error("a type")
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            t = self.node("ArrayType", [t], start)
        return t

    def _looks_like_declaration(self):
        """Lookahead: ``type Identifier`` at the current position."""
        i = 0
        tok = self.peek()
        while tok is not None and tok.kind == "keyword" and tok.text in MODIFIERS:
            i += 1
            tok = self.peek(i)
        if tok is None:
            return False
        if tok.kind == "keyword" and tok.text in BASIC_TYPES:
            i += 1
        elif tok.kind == "ident":
            i += 1
            while self.at(".", i) and self.peek(i + 1) is not None and self.peek(i + 1).kind == "ident":
                i += 2
        else:
            return False
        while self.at("[", i) and self.at("]", i + 1):
            i += 2
        nxt = self.peek(i)
        return nxt is not None and nxt.kind == "ident"

    def variable_declarator(self, name=None):
        if name is None:
            name = self.ident()
        children = [name]
        if self.at("="):
            children.append(self.leaf("Operator", self.advance()))
            children.append(self.array_initializer() if self.at("{") else self.expression())
        return _Raw("VariableDeclarator", None, children, name.start, self.tokens[self.pos - 1].end)

    def array_initializer(self):
        start = self.expect("{")
        items = []
        while not self.at("}"):
            items.append(self.array_initializer() if self.at("{") else self.expression())
            if not self.at(","):
                break
            self.advance()
        self.expect("}")
        return self.node("ArrayInitializer", items, start)

    # statements ------------------------------------------------------

    def block(self):
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.peek() is None:
                self.error("'}'")
            stmts.append(self.statement())
        self.expect("}")
        return self.node("Block", stmts, start)

    def statement(self):
        tok = self.peek()
        if tok is None:
            self.error("a statement")
        if self.at("{"):
            return self.block()
        if self.at(";"):
            self.advance()
            return self.node("EmptyStatement", [], tok)
        if tok.kind == "keyword":
            handler = {
                "if": self.if_statement,
                "while": self.while_statement,
                "for": self.for_statement,
                "return": self.return_statement,
                "break": self.jump_statement,
                "continue": self.jump_statement,
            }.get(tok.text)
            if handler is not None:
                return handler()
        if self._looks_like_declaration():
            decl = self.local_variable_declaration()
            self.expect(";")
            decl.end = self.tokens[self.pos - 1].end
            return decl
        expr = self.expression()
        if expr.kind not in STATEMENT_EXPRESSIONS and not (
            expr.kind == "UnaryOperation" and expr.children[0].token in ("++", "--")
        ):
            raise ParseError(tok.line, tok.column, "a statement expression", tok.text)
        self.expect(";")
        return self.node("StatementExpression", [expr], tok)

    def local_variable_declaration(self):
        start = self.peek()
        mods = self.modifiers()
        type_ = self.type_()
        declarators = [self.variable_declarator()]
        while self.at(","):
            self.advance()
            declarators.append(self.variable_declarator())
        return self.node("LocalVariableDeclaration", mods + [type_] + declarators, start)

    def paren_expression(self):
        self.expect("(")
        expr = self.expression()
        self.expect(")")
        return expr

    def if_statement(self):
        start = self.advance()
        children = [self.paren_expression(), self.statement()]
        if self.at("else"):
            self.advance()
            children.append(self.statement())
        return self.node("IfStatement", children, start)

    def while_statement(self):
        start = self.advance()
        cond = self.paren_expression()
        return self.node("WhileStatement", [cond, self.statement()], start)

    def for_statement(self):
        start = self.advance()
        self.expect("(")
        ctl_start = self.peek()
        if self._looks_like_declaration():
            save = self.pos
            mods = self.modifiers()
            type_ = self.type_()
            name = self.ident()
            if self.at(":"):
                self.advance()
                decl = _Raw("VariableDeclarator", None, [name], name.start, name.end)
                iterable = self.expression()
                control = self.node("EnhancedForControl", mods + [type_, decl, iterable], ctl_start)
                self.expect(")")
                return self.node("ForStatement", [control, self.statement()], start)
            self.pos = save
            init_start = self.peek()
            init = self.node("ForInit", [self.local_variable_declaration()], init_start)
        else:
            init_start = self.peek()
            exprs = self.expression_list(";")
            init = _Raw("ForInit", None, exprs, init_start.start, init_start.start)
            if exprs:
                init.end = exprs[-1].end
        self.expect(";")
        parts = [init]
        if not self.at(";"):
            parts.append(self.expression())
        self.expect(";")
        upd_start = self.peek()
        exprs = self.expression_list(")")
        update = _Raw("ForUpdate", None, exprs, upd_start.start, upd_start.start)
        if exprs:
            update.end = exprs[-1].end
        parts.append(update)
        control = self.node("ForControl", parts, ctl_start)
        self.expect(")")
        return self.node("ForStatement", [control, self.statement()], start)

    def expression_list(self, terminator):
        exprs = []
        if self.at(terminator):
            return exprs
        while True:
            exprs.append(self.expression())
            if not self.at(","):
                return exprs
            self.advance()

    def return_statement(self):
        start = self.advance()
        children = [] if self.at(";") else [self.expression()]
        self.expect(";")
        return self.node("ReturnStatement", children, start)

    def jump_statement(self):
        start = self.advance()
        self.expect(";")
        kind = "BreakStatement" if start.text == "break" else "ContinueStatement"
        return self.node(kind, [], start)

    # expressions -----------------------------------------------------

    def expression(self):
        start = self.peek()
        lhs = self.ternary()
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in ASSIGN_OPS:
            if lhs.kind not in ("Name", "FieldAccess", "ArrayAccess"):
                raise ParseError(tok.line, tok.column, "an assignable expression before " + repr(tok.text), tok.text)
            op = self.leaf("Operator", self.advance())
            rhs = self.expression()
            return self.node("Assignment", [lhs, op, rhs], start)
        return lhs

    def ternary(self):
        start = self.peek()
        cond = self.binary(0)
        if self.at("?"):
            self.advance()
            a = self.expression()
            self.expect(":")
            b = self.ternary()
            return self.node("TernaryExpression", [cond, a, b], start)
        return cond

    def binary(self, level):
        if level == len(BINARY_LEVELS):
            return self.unary()
        start = self.peek()
        lhs = self.binary(level + 1)
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in BINARY_LEVELS[level]:
                return lhs
            op = self.leaf("Operator", self.advance())
            rhs = self.binary(level + 1)
            lhs = self.node("BinaryOperation", [lhs, op, rhs], start)

    def unary(self):
        tok = self.peek()
        if tok is None:
            self.error("an expression")
        if tok.kind == "op" and tok.text in PREFIX_OPS:
            op = self.leaf("Operator", self.advance())
            operand = self.unary()
            return self.node("UnaryOperation", [op, operand], tok)
        if self.at("(") and self._is_cast():
            self.advance()
            type_ = self.type_()
            self.expect(")")
            return self.node("Cast", [type_, self.unary()], tok)
        expr = self.postfix(self.primary())
        while True:
            nxt = self.peek()
            if nxt is None or nxt.kind != "op" or nxt.text not in ("++", "--"):
                return expr
            expr = self.node("PostfixOperation", [expr, self.leaf("Operator", self.advance())], tok)

    def _is_cast(self):
        first = self.peek(1)
        if first is None:
            return False
        i = 1
        if first.kind == "keyword" and first.text in BASIC_TYPES:
            i += 1
            primitive = True
        elif first.kind == "ident":
            primitive = False
            i += 1
            while self.at(".", i) and self.peek(i + 1) is not None and self.peek(i + 1).kind == "ident":
                i += 2
        else:
            return False
        dims = 0
        while self.at("[", i) and self.at("]", i + 1):
            i += 2
            dims += 1
        if not self.at(")", i):
            return False
        if primitive:
            return True
        after = self.peek(i + 1)
        if after is None:
            return False
        if after.kind in ("ident", "literal"):
            return True
        if after.kind == "keyword" and after.text in ("this", "new"):
            return True
        return after.text in ("(", "!", "~")

    def primary(self):
        tok = self.peek()
        if tok is None:
            self.error("an expression")
        if tok.kind == "literal":
            return self.leaf("Literal", self.advance())
        if tok.kind == "ident":
            if self.at("(", 1):
                name = self.ident()
                args = self.arguments()
                return self.node("MethodInvocation", [name, args], tok)
            return self.ident("Name")
        if tok.kind == "keyword" and tok.text == "this":
            return self.leaf("This", self.advance())
        if tok.kind == "keyword" and tok.text == "new":
            return self.creator()
        if self.at("("):
            self.advance()
            expr = self.expression()
            self.expect(")")
            return expr
        self.error("an expression")

    def postfix(self, expr):
        start_byte = expr.start
        while True:
            if self.at("."):
                self.advance()
                member = self.ident()
                if self.at("("):
                    args = self.arguments()
                    expr = _Raw("MethodInvocation", None, [expr, member, args], start_byte, args.end)
                else:
                    expr = _Raw("FieldAccess", None, [expr, member], start_byte, member.end)
            elif self.at("["):
                self.advance()
                index = self.expression()
                end = self.expect("]").end
                expr = _Raw("ArrayAccess", None, [expr, index], start_byte, end)
            else:
                return expr

    def arguments(self):
        start = self.expect("(")
        args = self.expression_list(")")
        self.expect(")")
        return self.node("Arguments", args, start)

    def creator(self):
        start = self.advance()
        tok = self.peek()
        if tok is not None and tok.kind == "keyword" and tok.text in BASIC_TYPES:
            base = self.leaf("BasicType", self.advance())
        elif tok is not None and tok.kind == "ident":
            names = [self.ident("TypeName")]
            while self.at("."):
                self.advance()
                names.append(self.ident("TypeName"))
            base = self.node("ReferenceType", names, tok)
        else:
            self.error("a type after 'new'")
        if self.at("(") and base.kind == "ReferenceType":
            args = self.arguments()
            return self.node("ObjectCreation", [base, args], start)
        if not self.at("["):
            self.error("'(' or '[' after the created type")
        if self.at("]", 1):
            type_ = base
            while self.at("[") and self.at("]", 1):
                self.advance()
                self.advance()
                type_ = self.node("ArrayType", [type_], tok)
            if not self.at("{"):
                self.error("an array initializer")
            return self.node("ArrayCreation", [type_, self.array_initializer()], start)
        dims = []
        while self.at("[") and not self.at("]", 1):
            self.advance()
            dims.append(self.expression())
            self.expect("]")
        type_ = base
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            type_ = self.node("ArrayType", [type_], tok)
        return self.node("ArrayCreation", [type_] + dims, start)


def _flatten(raw, unit):
    nodes = []

    def visit(r):
        nid = len(nodes)
        nodes.append(None)
        child_ids = [visit(c) for c in r.children]
        nodes[nid] = AstNode(nid, KIND_BY_NAME[r.kind], r.token, tuple(child_ids), (r.start, r.end))
        return nid

    visit(raw)
    return Ast(0, tuple(nodes), unit)


def parse(unit):
    """Parse ``unit`` into an Ast, raising ParseError outside the subset."""
    if isinstance(unit, str):
        unit = SourceUnit.from_text(unit)
    if not unit.text.strip():
        raise ParseError(1, 1, "non-empty source", "end of input")
    parser = Parser(unit.text)
    raw = parser.compilation_unit()
    return _flatten(raw, unit)
