"""Causal effect identification on acyclic directed mixed graphs.

Given a graph of directed (causal) and bidirected (confounding) edges and a
query ``P_x(y)`` or ``P_x(y|z)``, this package either produces a do-free
symbolic probability expression or a hedge witness proving the effect is not
identifiable, and can verify identified expressions exactly against fully
specified discrete structural causal models.
"""

from .admg import (
    Admg,
    graphs_equal,
    is_subgraph,
    parse_graph,
    parse_graph_text,
    previous_in_order,
    to_dot,
)
from .errors import (
    CausalError,
    CyclicGraph,
    EmptyVar,
    InvalidPath,
    InvalidQuery,
    NameCollision,
    OverlappingSets,
    ParseError,
    SelfLoop,
    UnboundVariable,
    UnknownVertex,
    ZeroDenominator,
)
from .expr import (
    Atom,
    Expression,
    Marginal,
    Product,
    Quotient,
    atom,
    conditional,
    expressions_equal,
    free_variables,
    from_dict,
    marginalize,
    simplify,
    to_dict,
    to_latex,
)
from .identify import (
    HedgeWitness,
    NotIdentifiable,
    Query,
    TraceStep,
    hedge_search_witness,
    id_uncond,
    idc,
    identify,
    thin_to_forests,
)
from .oracle import (
    DiscreteScm,
    JointTable,
    conditional_from_table,
    dump_model,
    evaluate,
    interventional,
    joint,
    load_model,
    random_scm,
    scm_graph,
)
from .separation import d_separated, d_separated_naive, path_blocked

__version__ = "0.1.0"

create_graph = parse_graph
