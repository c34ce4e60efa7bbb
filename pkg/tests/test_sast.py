from collections import defaultdict

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codegraph.errors import FormatError, VocabularyMiss
from codegraph.frontend import parse
from codegraph.frontend.grammar import NON_LEAF_KINDS
from codegraph.sast import (
    EdgeKind,
    MergeTable,
    SAst,
    build_sast,
    build_vocabulary,
    default_merges,
    default_vocabulary,
    subtokenize,
)
from codegraph.sast.bpe import bytes_to_unicode, decode_units, default_merges_path, default_vocab_path
from codegraph.sast.graph import variable_occurrences
from codegraph.sast.vocab import load_subwords

SRC = """
class Demo {
  int getLarger(int a, int b) {
    int maxValue = a;
    if (b > maxValue) { maxValue = b; }
    for (int i = 0; i < b; i++) { a = a + i; }
    return maxValue + a;
  }
}
"""


@pytest.fixture(scope="module")
def hf_tokenizer():
    tokenizers = pytest.importorskip("tokenizers")
    vocab = load_subwords(default_vocab_path())
    merges = []
    with open(default_merges_path(), encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#version"):
                continue
            left, right = line.rstrip("\n").split(" ")
            merges.append((left, right))
    tok = tokenizers.Tokenizer(tokenizers.models.BPE(vocab=vocab, merges=merges))
    tok.pre_tokenizer = tokenizers.pre_tokenizers.ByteLevel(add_prefix_space=False)
    return tok


class TestBpe:
    def test_byte_map_is_a_bijection(self):
        table = bytes_to_unicode()
        assert len(table) == 256
        assert len(set(table.values())) == 256

    def test_decode_inverts_encode(self):
        for word in ["getLarger", "héllo", "x_1"]:
            assert decode_units(subtokenize(word, default_merges())).decode("utf-8") == word

    @pytest.mark.parametrize(
        "token, pieces",
        [
            ("getLarger", ["get", "L", "arger"]),
            ("maxValue", ["max", "Value"]),
            ("max_value", ["max", "_", "value"]),
            ("a", ["a"]),
        ],
    )
    def test_known_segmentations(self, token, pieces):
        assert subtokenize(token, default_merges()) == pieces

    @pytest.mark.parametrize(
        "token", ["getLarger", "toString", "HashMap", "parseInt", "x_1", "MAX_SIZE", "42", "3.14", "++", ">>>="]
    )
    def test_matches_reference_tokenizer(self, hf_tokenizer, token):
        assert subtokenize(token, default_merges()) == hf_tokenizer.encode(token).tokens

    @settings(max_examples=200, deadline=None)
    @given(st.from_regex(r"[A-Za-z_$][A-Za-z0-9_$]{0,20}", fullmatch=True))
    def test_identifiers_match_reference_tokenizer(self, hf_tokenizer, ident):
        assert subtokenize(ident, default_merges()) == hf_tokenizer.encode(ident).tokens

    def test_merge_file_header_and_size(self):
        merges = default_merges()
        assert len(merges) == 50_000
        assert merges.ranks[("Ġ", "t")] == 0

    def test_small_table_applies_ranks_in_order(self):
        table = MergeTable([("a", "b"), ("b", "c"), ("ab", "c")])
        assert table.segment("abc") == ("abc",)
        table = MergeTable([("b", "c"), ("a", "b"), ("a", "bc")])
        assert table.segment("abc") == ("abc",)
        assert MergeTable([("b", "c")]).segment("abc") == ("a", "bc")

    def test_malformed_merge_file(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("#version: 0.2\na b c\n")
        with pytest.raises(FormatError):
            MergeTable.load(p)


class TestVocabulary:
    def test_default_sizes(self):
        vocab = default_vocabulary()
        assert vocab.base_size == 50_265
        assert vocab.kind_size == len(NON_LEAF_KINDS)
        assert vocab.size == 50_265 + len(NON_LEAF_KINDS)

    def test_special_ids(self):
        vocab = default_vocabulary()
        assert vocab.subwords["<s>"] == 0
        assert vocab.subwords["<pad>"] == 1
        assert vocab.subwords["<unk>"] == 3
        assert vocab.subwords["<mask>"] == 50_264

    def test_kinds_follow_subwords(self):
        vocab = build_vocabulary(kinds=["A", "B"], subwords={"x": 0, "y": 1, "<unk>": 2})
        assert vocab.kinds == {"A": 3, "B": 4}
        assert vocab.size == 5
        assert vocab.entries["@A"] == 3
        assert vocab.token_of(4) == "B"

    def test_unknown_subword_falls_back_to_unk(self):
        vocab = build_vocabulary(kinds=[], subwords={"<unk>": 0, "x": 1})
        assert vocab.subword_id("zzz") == 0

    def test_missing_unk_raises(self):
        vocab = build_vocabulary(kinds=["A"], subwords={"x": 0})
        with pytest.raises(VocabularyMiss):
            vocab.subword_id("zzz")
        with pytest.raises(VocabularyMiss):
            vocab.kind_id("Nope")

    @pytest.mark.parametrize("content", ["a\t0\nb\t0\n", "a\t0\nb\t2\n", "a 0\n", "a\tx\n"])
    def test_malformed_vocab_files(self, tmp_path, content):
        p = tmp_path / "v.txt"
        p.write_text(content)
        with pytest.raises(FormatError):
            load_subwords(p)

    @settings(max_examples=50)
    @given(st.integers(0, 40), st.integers(0, 40))
    def test_additivity(self, n_sub, n_kind):
        vocab = build_vocabulary(
            kinds=[f"K{i}" for i in range(n_kind)], subwords={f"s{i}": i for i in range(n_sub)}
        )
        assert vocab.size == vocab.base_size + vocab.kind_size == n_sub + n_kind
        assert sorted(vocab.entries.values()) == list(range(n_sub + n_kind))


def occurrence_scan(ast):
    """Brute-force oracle: per method, declared names and the Name leaves spelled the same."""
    chains = defaultdict(list)
    methods = ast.methods()
    for nid in ast.leaves():
        owner = max((m for m in methods if m <= nid), default=None)
        if owner is None:
            continue
        declared = set()
        for m_nid in ast.walk(owner):
            node = ast.nodes[m_nid]
            if node.kind.name == "VariableDeclarator":
                declared.add(ast.nodes[node.children[0]].token)
            if node.kind.name == "FormalParameter":
                declared.add(ast.nodes[node.children[-1]].token)
        node = ast.nodes[nid]
        parent_kind = ast.nodes[ast.parents()[nid]].kind.name
        is_decl = (parent_kind == "VariableDeclarator" and ast.nodes[ast.parents()[nid]].children[0] == nid) or (
            parent_kind == "FormalParameter" and ast.nodes[ast.parents()[nid]].children[-1] == nid
        )
        if is_decl or (node.kind.name == "Name" and node.token in declared):
            chains[(owner, node.token)].append(nid)
    return {(a, b) for occ in chains.values() for a, b in zip(occ, occ[1:])}


@pytest.fixture(scope="module")
def pair():
    ast = parse(SRC)
    return ast, build_sast(ast)


class TestBuildSast:
    def test_subtoken_example(self, pair):
        _, sast = pair
        (get,) = [n for n in sast.nodes if n.label == "get"]
        kids = [sast.nodes[d].label for s, d, k in sast.edges if s == get.id and k == EdgeKind.Subtoken]
        assert kids == ["L", "arger"]
        assert all(sast.nodes[d].is_subtoken_child for s, d, k in sast.edges if k == EdgeKind.Subtoken)

    def test_node_count(self, pair):
        ast, sast = pair
        extra = sum(len(subtokenize(ast.nodes[n].token, default_merges())) - 1 for n in ast.leaves())
        assert len(sast) == len(ast) + extra

    def test_ast_ids_preserved(self, pair):
        ast, sast = pair
        for node in ast.nodes:
            assert sast.nodes[node.id].kind == node.kind.name

    def test_next_leaf_chain(self, pair):
        ast, sast = pair
        leaves = ast.leaves()
        assert sast.edges_of(EdgeKind.NextLeaf) == [(a, b, EdgeKind.NextLeaf) for a, b in zip(leaves, leaves[1:])]

    def test_data_flow_matches_occurrence_scan(self, pair):
        ast, sast = pair
        got = {(s, d) for s, d, _ in sast.edges_of(EdgeKind.DataFlow)}
        assert got == occurrence_scan(ast)

    def test_data_flow_connects_each_variable(self, pair):
        ast, sast = pair
        occ = variable_occurrences(ast)
        g = nx.Graph()
        g.add_edges_from((s, d) for s, d, _ in sast.edges_of(EdgeKind.DataFlow))
        for name in set(occ.values()):
            ids = [n for n, v in occ.items() if v == name]
            if len(ids) > 1:
                assert nx.is_connected(g.subgraph(ids))
        for s, d, _ in sast.edges_of(EdgeKind.DataFlow):
            assert occ[s] == occ[d] and s < d

    def test_tree_edges_form_a_tree(self, pair):
        _, sast = pair
        g = nx.DiGraph()
        g.add_nodes_from(range(len(sast)))
        g.add_edges_from((s, d) for s, d, k in sast.edges if k in (EdgeKind.AstChild, EdgeKind.Subtoken))
        assert nx.is_arborescence(g)

    def test_extra_edges_shorten_paths(self, pair):
        # Non-tree edges never lengthen shortest paths and shorten some.
        _, sast = pair
        tree = nx.Graph()
        tree.add_edges_from((s, d) for s, d, k in sast.edges if k in (EdgeKind.AstChild, EdgeKind.Subtoken))
        full = nx.Graph()
        full.add_edges_from((s, d) for s, d, _ in sast.edges)
        dt = dict(nx.all_pairs_shortest_path_length(tree))
        df = dict(nx.all_pairs_shortest_path_length(full))
        total_t = sum(sum(v.values()) for v in dt.values())
        total_f = sum(sum(v.values()) for v in df.values())
        assert all(df[a][b] <= dt[a][b] for a in dt for b in dt[a])
        assert total_f < total_t

    def test_vocab_ids(self, pair):
        _, sast = pair
        vocab = default_vocabulary()
        ids = sast.vocab_ids
        assert ids.dtype == np.int64
        assert ids.min() >= 0 and ids.max() < vocab.size
        for n in sast.nodes:
            if not (n.is_original_leaf or n.is_subtoken_child):
                assert n.vocab_id == vocab.kind_id(n.kind)

    def test_statements(self, pair):
        _, sast = pair
        assert [sast.nodes[s].kind for s in sast.statements()] == [
            "LocalVariableDeclaration", "IfStatement", "ForStatement", "ReturnStatement",
        ]

    def test_dict_round_trip(self, pair):
        _, sast = pair
        assert SAst.from_dict(sast.to_dict()) == sast

    def test_dot_has_every_edge(self, pair):
        _, sast = pair
        dot = sast.to_dot()
        assert dot.startswith("digraph sast {")
        assert dot.count("->") == len(sast.edges)
        assert 'label="DataFlow"' in dot

    def test_scopes_do_not_leak_across_methods(self):
        ast = parse("class A { int f(int a) { return a; } int g(int a) { return a; } }")
        sast = build_sast(ast)
        flows = sast.edges_of(EdgeKind.DataFlow)
        f, g = ast.methods()
        assert len(flows) == 2
        for s, d, _ in flows:
            assert (s < g) == (d < g)
