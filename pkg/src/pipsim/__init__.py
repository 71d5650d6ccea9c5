"""Information flow from a dephasing qubit into an N-level random band."""

from pipsim.model import (
    CouplingMatrix,
    HamiltonianBlocks,
    SystemParams,
    build_blocks,
    build_coupling_matrix,
    dephasing_rate,
    make_rng,
    validity_criteria,
)
from pipsim.evolver import (
    JointState,
    SpectralDecomposition,
    Propagator,
    diagonalize,
    evolve,
    initial_state,
    trajectory,
)
from pipsim.reduction import (
    DegenerateFragmentError,
    Fragment,
    PositivityError,
    fragment_projection,
    purity,
    reduce_fragment,
    reduce_system,
)
from pipsim.infotheory import (
    EnumerationCapError,
    PipConfig,
    PipCurve,
    PipPoint,
    entropy,
    enumerate_fragments,
    mutual_information,
    pip_curve,
    pip_point,
    sample_fragments,
)
from pipsim.dephasing import (
    MasterPrediction,
    fit_decay_rate,
    master_coherence,
    master_entropy,
    master_prediction,
)

__version__ = "0.1.0"
