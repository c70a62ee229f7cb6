"""K_s-free pseudorandom graphs, random blowups and multicolor Ramsey witnesses."""

__version__ = "0.1.0"

from .constructions import (  # noqa: E402
    BlowupMap,
    balanced_blowup,
    cycle,
    even_blowup,
    paley,
    random_blowup,
    random_regular_ks_free,
    turan,
)
from .graph_core import (  # noqa: E402
    Graph,
    TupleCountReport,
    VertexSet,
    complement,
    count_independent_tuples,
    degree_profile,
    enumerate_independent_sets,
    induced_subgraph,
    is_clique_free,
)
from .ramsey import (  # noqa: E402
    ColoredGraph,
    RamseyInstance,
    RamseyWitness,
    audit_upper,
    certify,
    expected_it_blowup,
    lemma5_bound,
    overlay_coloring,
    union_bound_report,
    verify_witness,
)
from .spectral import (  # noqa: E402
    ARTraceReport,
    FamilySpec,
    SpectralCertificate,
    adjacency_spectrum,
    ar_bound,
    ar_trace,
    expander_mixing_check,
    ndl_certify,
)
