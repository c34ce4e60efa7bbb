"""Independent reference implementations used by the tests.

Each oracle is written from the algorithm description, in a deliberately
different style from the package code (explicit loops, no shared helpers).
"""

import math

import numpy as np

from codegraph.sast.graph import EdgeKind, SAst, SAstNode

VARIABLE_POOL = ("a", "b", "c", "i", "n", "sum")


# synthetic S-ASTs ------------------------------------------------------


def random_statement_sast(rng, n_statements, max_size=30, var_rate=0.4):
    """Method -> body -> statements, each statement a random tree of 1..max_size nodes.

    Leaves carry a variable name with probability ``var_rate``.  NextLeaf
    chains consecutive leaves and DataFlow chains consecutive occurrences of
    each variable, both in pre-order.
    """
    nodes = [("MethodDeclaration", None), ("Block", None)]
    edges = [(0, 1, EdgeKind.AstChild)]
    children = {0: [1], 1: []}

    def grow(parent, size):
        nid = len(nodes)
        nodes.append(("Stmt", None))
        children[nid] = []
        edges.append((parent, nid, EdgeKind.AstChild))
        rest = size - 1
        while rest > 0:
            take = int(rng.integers(1, rest + 1))
            grow(nid, take)
            rest -= take
        return nid

    for _ in range(n_statements):
        children[1].append(grow(1, int(rng.integers(1, max_size + 1))))

    # Re-label: leaves are the nodes without children.
    has_child = {s for s, _, _ in edges}
    leaves = [i for i in range(len(nodes)) if i not in has_child and i > 1]
    var = {}
    for leaf in leaves:
        if rng.random() < var_rate:
            var[leaf] = VARIABLE_POOL[int(rng.integers(len(VARIABLE_POOL)))]
    edges += [(a, b, EdgeKind.NextLeaf) for a, b in zip(leaves, leaves[1:])]
    for name in VARIABLE_POOL:
        occ = sorted(n for n, v in var.items() if v == name)
        edges += [(a, b, EdgeKind.DataFlow) for a, b in zip(occ, occ[1:])]
    sast_nodes = tuple(
        SAstNode(
            i,
            vocab_id=i % 17,
            label=var.get(i, "Stmt"),
            kind="Identifier" if i in var else "Stmt",
            is_original_leaf=i in leaves,
            variable_name=var.get(i),
        )
        for i in range(len(nodes))
    )
    return SAst(sast_nodes, tuple(edges), root=0, body=1)


# partitioning, hand-stepped --------------------------------------------------


def partition_oracle(sast, lam):
    """Step the statement-partitioning procedure one pseudo-code line at a time.

    Returns a list of dicts with keys ``statements``, ``native``,
    ``carried`` and ``edges`` (a set of triples).
    """
    # line 1: tree without data-flow and next-leaf edges
    tree = {}
    for s, d, k in sast.edges:
        if k == EdgeKind.AstChild or k == EdgeKind.Subtoken:
            tree.setdefault(s, []).append(d)
    # line 4: subtrees hanging off the body, left to right
    subtrees = [d for s, d, k in sast.edges if s == sast.body and k == EdgeKind.AstChild]

    def count(root):
        seen = [root]
        todo = [root]
        while todo:
            x = todo.pop()
            for c in tree.get(x, []):
                seen.append(c)
                todo.append(c)
        return seen

    variable = {n.id: n.variable_name for n in sast.nodes if n.variable_name}

    # line 2-3
    nodes_sum = 0
    nodes_set = set()
    stmts = []
    L = []  # list of (statements, native, carried)
    for idx, S in enumerate(subtrees):  # line 5
        members = count(S)
        n = len(members)  # line 6
        nodes_sum = nodes_sum + n  # line 7
        nodes_set |= set(members)  # line 8
        stmts.append(S)
        if nodes_sum >= lam or idx == len(subtrees) - 1:  # line 9
            carried = set()
            if L:  # line 10-11
                wanted = {variable[x] for x in nodes_set if x in variable}
                for name in wanted:
                    best = None
                    for _, nat, car in L:
                        for x in nat | car:
                            if variable.get(x) == name and (best is None or x > best):
                                best = x
                    if best is not None:
                        carried.add(best)
            L.append((stmts, nodes_set, carried))  # line 13-14
            nodes_sum, nodes_set, stmts = 0, set(), []  # line 15
    # line 19-21
    if len(L) > 1 and len(L[-1][1]) + len(L[-1][2]) < lam / 2:
        s2, n2, c2 = L.pop()
        s1, n1, c1 = L.pop()
        native = n1 | n2
        L.append((s1 + s2, native, (c1 | c2) - native))

    out = []
    for stmts, native, carried in L:
        everything = native | carried
        edges = set()
        for s, d, k in sast.edges:
            if k == EdgeKind.DataFlow:
                if s in everything and d in everything:
                    edges.add((s, d, k))
            elif s in native and d in native:
                edges.add((s, d, k))
        out.append({"statements": stmts, "native": native, "carried": carried, "edges": edges})
    return out


def partition_as_oracle_form(result):
    return [
        {
            "statements": list(g.statements),
            "native": set(g.native_nodes),
            "carried": set(g.carried_nodes),
            "edges": {(s, d, EdgeKind(k)) for s, d, k in g.edges},
        }
        for g in result.subgraphs
    ]


# straight-line network ---------------------------------------------------


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


def ggnn_loop(vocab_ids, edges, params):
    """Per-node, per-edge loop version of the GGNN, returning the mean readout."""
    cfg = params.cfg
    d = cfg.d
    h = [params["node_embed"][v].copy() for v in vocab_ids]
    directed = []
    for s, t, k in edges:
        directed.append((s, t, 2 * int(k)))
        directed.append((t, s, 2 * int(k) + 1))
    for l in range(cfg.layers):
        P = lambda name: params[f"ggnn.{l}.{name}"]  # noqa: E731
        m = [np.zeros(d) for _ in h]
        for s, t, f in directed:
            onehot = np.zeros(cfg.e_dim)
            onehot[f] = 1.0
            x = np.concatenate([h[s], onehot])
            hidden = np.tanh(x @ P("msg.w1") + P("msg.b1"))
            m[t] = m[t] + hidden @ P("msg.w2") + P("msg.b2")
        new = []
        for v in range(len(h)):
            gi = m[v] @ P("gru.w_ih") + P("gru.b_ih")
            gh = h[v] @ P("gru.w_hh") + P("gru.b_hh")
            out = np.zeros(d)
            for j in range(d):
                r = sigmoid(gi[j] + gh[j])
                z = sigmoid(gi[d + j] + gh[d + j])
                n = math.tanh(gi[2 * d + j] + r * gh[2 * d + j])
                out[j] = (1 - z) * n + z * h[v][j]
            new.append(out)
        h = new
    return sum(h) / len(h)


def lstm_loop(seq, params):
    cfg = params.cfg
    d = cfg.d
    xs = [np.asarray(x, float) for x in seq]
    for k in range(cfg.lstm_layers):
        W, U, b = params[f"lstm.{k}.w_ih"], params[f"lstm.{k}.w_hh"], params[f"lstm.{k}.b"]
        h, c = np.zeros(d), np.zeros(d)
        outs = []
        for x in xs:
            a = x @ W + h @ U + b
            c_new = np.zeros(d)
            h_new = np.zeros(d)
            for j in range(d):
                i = sigmoid(a[j])
                f = sigmoid(a[d + j])
                g = math.tanh(a[2 * d + j])
                o = sigmoid(a[3 * d + j])
                c_new[j] = f * c[j] + i * g
                h_new[j] = o * math.tanh(c_new[j])
            h, c = h_new, c_new
            outs.append(h)
        xs = outs
    return xs


def pgnn_loop(sast, parts, params):
    subs = []
    for g in parts.subgraphs:
        local = {nid: i for i, nid in enumerate(g.node_ids)}
        subs.append(ggnn_loop(g.vocab_ids, [(local[s], local[t], k) for s, t, k in g.edges], params))
    out = lstm_loop(subs, params)[-1]
    whole = ggnn_loop(list(sast.vocab_ids), list(sast.edges), params)
    joined = list(whole) + list(out)
    w, b = params["fc_p.w"], params["fc_p.b"]
    return np.array([sum(joined[i] * w[i, j] for i in range(len(joined))) + b[j] for j in range(len(b))])


# corpora -------------------------------------------------------------------

METHOD_TEMPLATES = (
    "int f{k}(int x) {{ int y = x + {k}; return y; }}",
    "int f{k}(int a, int b) {{ if (a > b) {{ return a; }} return b + {k}; }}",
    "void f{k}(int[] xs) {{ for (int i = 0; i < xs.length; i++) {{ xs[i] = {k}; }} }}",
    "int f{k}(int n) {{ int s = 0; while (n > 0) {{ s = s + n; n--; }} return s; }}",
)


def synthetic_corpus(root, n_functionalities=43, per_functionality=(2, 5), seed=0):
    """Write a small corpus of Java files plus an index CSV; return the CSV path."""
    rng = np.random.default_rng(seed)
    root.mkdir(parents=True, exist_ok=True)
    rows = ["fragment_id,path,functionality_id"]
    count = 0
    for func in range(n_functionalities):
        n = int(rng.integers(per_functionality[0], per_functionality[1] + 1))
        for j in range(n):
            src = "class C { " + METHOD_TEMPLATES[(func + j) % len(METHOD_TEMPLATES)].format(k=count) + " }\n"
            name = f"frag{count:04d}.java"
            (root / name).write_text(src, encoding="utf-8")
            rows.append(f"fr{count:04d},{name},{func}")
            count += 1
    index = root / "index.csv"
    index.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return index
