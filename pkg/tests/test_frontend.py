import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codegraph.errors import EmptyBody, ParseError
from codegraph.frontend import (
    Ast,
    SourceUnit,
    parse,
    preorder_tokens,
    split_methods,
    statement_subtrees,
)
from codegraph.frontend.grammar import KIND_BY_NAME, LEAF_KINDS, NON_LEAF_KINDS
from codegraph.frontend.lexer import significant_tokens, tokenize

GET_LARGER = """
class Demo {
  public static int getLarger(int a, int b) {
    // pick the larger one
    int m = Math.abs(a);
    if (a > b) { m = a; } else { m = b; }
    return m;
  }
}
"""

RICH = """
class Rich {
  private int count;
  double mean(double[] xs, int n) {
    double total = 0.0;
    for (int i = 0; i < n; i++) { total += xs[i]; }
    for (double x : xs) { total = total + x * 2; }
    while (n > 0 && !(total < 0)) { n--; if (n == 3) break; else continue; }
    String s = "a" + 'b';
    int[] arr = new int[n + 1];
    int[] lit = {1, 2, 3};
    Object o = new Object();
    this.count = (int) total;
    int t = n > 1 ? n : -n;
    System.out.println(s);
    return total / n;
  }
}
"""


def leaf_texts(ast):
    return [ast.nodes[n].token for n in ast.leaves()]


class TestLexer:
    def test_comments_and_whitespace_dropped(self):
        toks = tokenize("int /* c */ x // tail\n = 1;")
        assert [t.text for t in toks] == ["int", "x", "=", "1", ";"]

    def test_positions_are_one_based(self):
        toks = tokenize("int x;\n  y = 2;")
        y = toks[3]
        assert (y.text, y.line, y.column) == ("y", 2, 3)

    def test_unterminated_comment_is_a_parse_error(self):
        with pytest.raises(ParseError):
            tokenize("int x; /* never closed")

    def test_longest_operator_wins(self):
        assert [t.text for t in tokenize("a >>>= b")] == ["a", ">>>=", "b"]

    def test_punctuation_is_not_significant(self):
        texts = significant_tokens("if (a) { return b; }")
        assert texts == ["a", "b"]


class TestGrammar:
    def test_kind_ids_are_dense_and_unique(self):
        kinds = list(NON_LEAF_KINDS) + list(LEAF_KINDS)
        assert sorted(k.id for k in kinds) == list(range(len(kinds)))

    def test_leaf_flag_partitions_kinds(self):
        assert all(not k.is_leaf_kind for k in NON_LEAF_KINDS)
        assert all(k.is_leaf_kind for k in LEAF_KINDS)
        assert KIND_BY_NAME["IfStatement"] in NON_LEAF_KINDS


class TestParser:
    def test_preorder_ids(self):
        ast = parse(GET_LARGER)
        assert list(ast.walk()) == list(range(len(ast)))
        for node in ast.nodes:
            assert all(c > node.id for c in node.children)

    def test_statement_subtrees(self):
        ast = parse(GET_LARGER)
        kinds = [ast.nodes[s].kind.name for s in statement_subtrees(ast)]
        assert kinds == ["LocalVariableDeclaration", "IfStatement", "ReturnStatement"]

    @pytest.mark.parametrize("src", [GET_LARGER, RICH])
    def test_round_trip_matches_significant_tokens(self, src):
        ast = parse(src)
        assert leaf_texts(ast) == significant_tokens(src)

    def test_all_produced_kinds_are_known(self):
        ast = parse(RICH)
        assert {n.kind.name for n in ast.nodes} <= set(KIND_BY_NAME)

    def test_leaf_kinds_hold_tokens(self):
        ast = parse(RICH)
        for n in ast.nodes:
            assert n.is_leaf == n.kind.is_leaf_kind
            if n.is_leaf:
                assert not n.children
        empty = {n.kind.name for n in ast.nodes if not n.is_leaf and not n.children}
        assert empty <= {"BreakStatement", "ContinueStatement", "EmptyStatement", "Arguments", "FormalParameters", "ReturnStatement", "ForUpdate", "ForInit"}

    def test_method_invocation_shape(self):
        ast = parse("class A { void f() { Math.abs(x); } }")
        (inv,) = ast.find("MethodInvocation")
        kinds = [ast.nodes[c].kind.name for c in ast.nodes[inv].children]
        assert kinds == ["Name", "Identifier", "Arguments"]

    def test_spans_cover_tokens(self):
        ast = parse(GET_LARGER)
        for nid in ast.leaves():
            start, end = ast.nodes[nid].span
            assert GET_LARGER[start:end] == ast.nodes[nid].token

    @pytest.mark.parametrize(
        "src, line, column",
        [
            ("class A { void f() { int x = ; } }", 1, 30),
            ("class A { void f() {\n  return 1 }", 2, 12),
            ("class A { void f() { try { } } }", 1, 22),
        ],
    )
    def test_parse_errors_carry_position(self, src, line, column):
        with pytest.raises(ParseError) as info:
            parse(src)
        assert (info.value.line, info.value.column) == (line, column)
        assert info.value.to_dict()["error"] == "ParseError"

    def test_bare_method_parses(self):
        ast = parse("int f(int a) { return a; }")
        assert len(ast.methods()) == 1

    def test_source_unit_from_file(self, tmp_path):
        p = tmp_path / "A.java"
        p.write_text(GET_LARGER)
        ast = parse(SourceUnit.from_file(p))
        assert ast.unit.path == str(p)


class TestTreeHelpers:
    def test_empty_body(self):
        ast = parse("class A { void f() { } }")
        with pytest.raises(EmptyBody):
            statement_subtrees(ast)

    def test_no_method(self):
        ast = parse("class A { int x; }")
        with pytest.raises(EmptyBody):
            ast.method_body()

    def test_split_methods_renumbers(self):
        ast = parse("class A { void f() { a(); } int g(int x) { return x; } }")
        f, g = split_methods(ast)
        assert f.nodes[0].kind.name == g.nodes[0].kind.name == "MethodDeclaration"
        assert list(g.walk()) == list(range(len(g)))
        assert preorder_tokens(g)[:3] == ["MethodDeclaration", "int", "g"]

    def test_dict_round_trip(self):
        ast = parse(RICH)
        back = Ast.from_dict(ast.to_dict())
        assert back.nodes == ast.nodes

    def test_preorder_tokens(self):
        ast = parse("class A { int f(int a) { return a; } }")
        assert preorder_tokens(ast) == [
            "CompilationUnit", "ClassDeclaration", "A", "MethodDeclaration", "int", "f",
            "FormalParameters", "FormalParameter", "int", "a", "Block", "ReturnStatement", "a",
        ]


_names = st.sampled_from(["a", "b", "count", "maxValue", "x_1"])
_ints = st.integers(0, 999).map(str)


@st.composite
def expressions(draw, depth=0):
    if depth > 2 or draw(st.booleans()):
        return draw(st.one_of(_names, _ints))
    op = draw(st.sampled_from(["+", "-", "*", "<", "==", "&&"]))
    left = draw(expressions(depth + 1))
    right = draw(expressions(depth + 1))
    if draw(st.booleans()):
        return f"({left} {op} {right})"
    return f"{left} {op} {right}"


@st.composite
def statements(draw):
    kind = draw(st.sampled_from(["decl", "assign", "if", "while", "return", "call"]))
    e = draw(expressions())
    if kind == "decl":
        return f"int {draw(_names)} = {e};"
    if kind == "assign":
        return f"{draw(_names)} = {e};"
    if kind == "if":
        return f"if ({e}) {{ {draw(_names)}++; }}"
    if kind == "while":
        return f"while ({e}) {{ break; }}"
    if kind == "call":
        return f"foo.bar({e});"
    return f"return {e};"


class TestRoundTripProperty:
    @settings(max_examples=60, deadline=None)
    @given(st.lists(statements(), min_size=1, max_size=6))
    def test_leaves_reproduce_significant_tokens(self, body):
        src = "class P { int m(int a) { " + " ".join(body) + " } }"
        ast = parse(src)
        assert leaf_texts(ast) == significant_tokens(src)
