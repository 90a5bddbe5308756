"""Graph isomorphism testing with phase-modified discrete-time quantum walks."""

from qwgi.graph import (
    EdgePartition,
    Graph,
    Graph6Error,
    GraphError,
    Permutation,
    SrgParams,
    VertexPartition,
    apply_permutation,
    attach_gadget,
    detect_srg,
    edge_partition,
    parse_edge_list,
    parse_graph6,
    vertex_partition,
    write_edge_list,
    write_graph6,
)
from qwgi.walk import (
    CoinSpec,
    DiEdgeIndex,
    PhaseMask,
    apply_coin,
    apply_phase,
    apply_shift,
    build_index,
    initial_state,
    node_amplitude,
    step,
)
from qwgi.algorithm import (
    AmplitudeTrace,
    ComparisonReport,
    Outcome,
    PhaseScheme,
    TableSummary,
    TraceTable,
    Verdict,
    amplitude_trace,
    build_phase_mask,
    certificate,
    compare_graphs,
    compare_traces,
    comparison_table,
    naive_compare,
    trace_table,
)
from qwgi.isofinder import FinderOutcome, Mapping, candidate_relation, find_isomorphism, verify_mapping

__version__ = "0.1.0"
