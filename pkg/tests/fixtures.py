"""Shared graphs, CoNLL-U text and random graph generators for the tests."""

import random

from app.graph import Attribute, Edge, SemanticGraph, parse_penman

WALK_GOLD = (
    "(s / walk-01 :Arg0 (p / person :refer-person 3rd :refer-number Plural) "
    ":Arg1 (c / street :refer-number Singular) :aspect Activity :modstr FullAff)"
)

ARCHITECT_GOLD = """\
(s34a / and
 :op1 (s34s / sorry-01
        :mod (s34o / oops
              :mode expressive))
 :op2 (s34m / mean-01
        :ARG0 (s34i / i)
        :ARG2 (s34b / behind-02
                :ARG3 (s34c / cartesian-framework-91
                       :FR (s34r / relative-to-builder)))))"""

ARCHITECT_FINETUNED = """\
(z0 / and
 :op1 (z1 / sorry-01
        :mod (z2 / oops
              :mode expressive))
 :op2 (z3 / mean-01
        :ARG0 (z4 / i)
        :ARG2 (z5 / behind-02
                :ARG3 (z6 / cartesian-framework-91
                       :FR (z7 / relative-to-builder))))
 :op3 (z8 / emoticon
        :value ":)"))"""

ARCHITECT_UD = """\
(s2a / and
 :op1 (s2s / sorry-01
       :ARG1 (s2o / oops))
 :op2 (s2m / mean-01
       :ARG0 (s2i / i)
       :ARG2 (s2b / behind-02
              :ARG2 s2i)))"""

ARCHITECT_SENTENCE = "<Architect> oops sorry, I meant behind :)"

# handwritten graphs covering re-entrancy, inverse roles, constants and repeated concepts
EXTRA_GRAPHS = (
    "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))",
    '(s / say-01 :ARG0 (p / person :name (n / name :op1 "Mary")) :ARG1 (h / hungry :domain p))',
    "(b / boy :ARG0-of (w / want-01 :ARG1 (c / cake)))",
    "(g / go-02 :polarity - :ARG0 (y / you) :mode imperative)",
    "(a / and :op1 (r / run-02 :ARG0 (d / dog)) :op2 (b / bark-01 :ARG0 d))",
    "(s / see-01 :ARG0 (p / person) :ARG1 (p2 / person))",
    "(h / have-03 :ARG0 (i / i) :ARG1 (b / block :quant 3 :mod (r / red)))",
    "(x / thing)",
    "(p / place-01 :ARG0 (b / builder) :ARG1 (b2 / block :mod (b3 / blue)) :ARG2 (t / top :part-of (t2 / tower)))",
    '(s / street :name (n / name :op1 "Main Street"))',
    "(r / relative-position :op1 (b / builder) :FR (t / thing :ARG1-of (m / move-01)))",
    "(o / or :op1 (l / left) :op2 (r / right))",
    "(b / belong-01 :ARG0 (c / cat :poss (w / we)) :ARG1 (h / house))",
    "(i / identity-91 :ARG1 (t / this) :ARG2 (b / brick :mod (g / green)))",
    "(b / build-01 :ARG0 (p / person :refer-person 1st :refer-number Singular) :ARG1 (w / wall) "
    ":aspect Performance :modstr FullAff)",
    "(c / cause-01 :ARG0 (r / rain-01) :ARG1 (s / stay-01 :ARG1 (w / we) :location (h / home)))",
    "(p / person :ARG0-of (l / like-01 :ARG1 p))",
)

REFERENCE_GRAPHS = (WALK_GOLD, ARCHITECT_GOLD, ARCHITECT_FINETUNED, ARCHITECT_UD)
ALL_GRAPHS = REFERENCE_GRAPHS + EXTRA_GRAPHS

WALK_CONLLU = (
    "# sent_id = walk1\n"
    "# text = They walked on the street\n"
    "1\tThey\tthey\tPRON\tPRP\tCase=Nom|Number=Plur|Person=3|PronType=Prs\t2\tnsubj\t_\t_\n"
    "2\twalked\twalk\tVERB\tVBD\tMood=Ind|Tense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
    "3\ton\ton\tADP\tIN\t_\t5\tcase\t_\t_\n"
    "4\tthe\tthe\tDET\tDT\tDefinite=Def|PronType=Art\t5\tdet\t_\t_\n"
    "5\tstreet\tstreet\tNOUN\tNN\tNumber=Sing\t2\tobl\t_\t_\n"
    "\n"
)

ARCHITECT_CONLLU = (
    "# sent_id = tag1\n"
    "# text = < Architect > sorry\n"
    "1\t<\t<\tPUNCT\t-LRB-\t_\t2\tpunct\t_\t_\n"
    "2\tArchitect\tArchitect\tPROPN\tNNP\tNumber=Sing\t4\tvocative\t_\t_\n"
    "3\t>\t>\tPUNCT\t-RRB-\t_\t2\tpunct\t_\t_\n"
    "4\tsorry\tsorry\tADJ\tJJ\tDegree=Pos\t0\troot\t_\t_\n"
    "\n"
)

CONCEPTS = ("person", "thing", "walk-01", "and", "street", "say-01", "block", "place-01")
ROLES = (":ARG0", ":ARG1", ":ARG2", ":mod", ":op1", ":op2", ":FR", ":poss")
ATTRIBUTES = (
    (":refer-number", "Singular", False),
    (":refer-person", "3rd", False),
    (":aspect", "Activity", False),
    (":quant", "5", False),
    (":polarity", "-", False),
    (":mode", "expressive", False),
    (":op1", "New York", True),
    (":value", ":)", True),
)


def parse_all(texts=ALL_GRAPHS) -> list[SemanticGraph]:
    return [parse_penman(text) for text in texts]


def random_graph(rng: random.Random, n_nodes: int, concepts=CONCEPTS, prefix: str = "v",
                 reentrancy: float = 0.3, attribute_rate: float = 0.5) -> SemanticGraph:
    """A connected graph: random spanning tree, extra re-entrant edges, random constants."""
    variables = [f"{prefix}{i}" for i in range(1, n_nodes + 1)]
    nodes = {var: rng.choice(concepts) for var in variables}
    seen = set()
    edges = []
    for i, var in enumerate(variables[1:], start=1):
        edge = Edge(rng.choice(variables[:i]), rng.choice(ROLES), var)
        seen.add((edge.source, edge.role, edge.target))
        edges.append(edge)
    for _ in range(int(n_nodes * reentrancy) if n_nodes > 1 else 0):
        source, target = rng.sample(variables, 2)
        key = (source, rng.choice(ROLES), target)
        if key not in seen:
            seen.add(key)
            edges.append(Edge(*key))
    attributes = []
    attr_seen = set()
    for var in variables:
        if rng.random() < attribute_rate:
            role, value, quoted = rng.choice(ATTRIBUTES)
            if (var, role, value) not in attr_seen:
                attr_seen.add((var, role, value))
                attributes.append(Attribute(var, role, value, quoted))
    return SemanticGraph(top=variables[0], nodes=nodes, edges=tuple(edges), attributes=tuple(attributes))


def perturb(rng: random.Random, graph: SemanticGraph, prefix: str = "p") -> SemanticGraph:
    """Renamed copy with some concepts swapped, some edges dropped and some added."""
    rename = {var: f"{prefix}{i}" for i, var in enumerate(graph.nodes, start=1)}
    nodes = {
        rename[var]: (rng.choice(CONCEPTS) if rng.random() < 0.2 else concept)
        for var, concept in graph.nodes.items()
    }
    edges = [Edge(rename[e.source], e.role, rename[e.target]) for e in graph.edges if rng.random() > 0.2]
    seen = {(e.source, e.role, e.target) for e in edges}
    names = list(nodes)
    if len(names) > 1:
        for _ in range(rng.randint(0, 2)):
            source, target = rng.sample(names, 2)
            key = (source, rng.choice(ROLES), target)
            if key not in seen:
                seen.add(key)
                edges.append(Edge(*key))
    attributes = [replace_source(a, rename[a.source]) for a in graph.attributes if rng.random() > 0.2]
    return SemanticGraph(top=rename[graph.top], nodes=nodes, edges=tuple(edges), attributes=tuple(attributes))


def replace_source(attribute: Attribute, source: str) -> Attribute:
    return Attribute(source, attribute.role, attribute.value, attribute.quoted)


def random_pair(rng: random.Random, max_vars: int = 8) -> tuple[SemanticGraph, SemanticGraph]:
    """(pred, gold) with at most ``max_vars`` variables each."""
    gold = random_graph(rng, rng.randint(1, max_vars), prefix="g")
    if rng.random() < 0.3:
        pred = random_graph(rng, rng.randint(1, max_vars), prefix="p")
    else:
        pred = perturb(rng, gold)
    return pred, gold


def rename(rng: random.Random, graph: SemanticGraph, prefix: str = "r") -> SemanticGraph:
    """Isomorphic copy under a random variable renaming, with shuffled edge and attribute order."""
    names = [f"{prefix}{i}" for i in range(1, len(graph.nodes) + 1)]
    rng.shuffle(names)
    mapping = dict(zip(graph.nodes, names))
    nodes = {mapping[var]: graph.nodes[var] for var in sorted(graph.nodes, key=mapping.get)}
    edges = [Edge(mapping[e.source], e.role, mapping[e.target]) for e in graph.edges]
    attributes = [replace_source(a, mapping[a.source]) for a in graph.attributes]
    rng.shuffle(edges)
    rng.shuffle(attributes)
    return SemanticGraph(top=mapping[graph.top], nodes=nodes, edges=tuple(edges), attributes=tuple(attributes))
