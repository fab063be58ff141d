"""Bell-CHSH tests of particle-separable states under particle-number superselection."""
from .bell import (
    ChshResult,
    ChshSettings,
    DichotomicObservable,
    chsh_value,
    horodecki_two_qubit,
    maximize_chsh,
    optimal_response,
)
from .entanglement import is_ppt, negativity, partial_transpose, schmidt_decompose
from .fock import (
    DensityMatrix,
    FockSpace,
    Mode,
    Operator,
    Region,
    SectorLabel,
    build_fock_space,
    embed_local,
    partial_trace,
    sector_of,
)
from .ssr import (
    appendix_effective_state,
    bosonic_effective_state,
    is_ssr_allowed,
    phase_twirl_sample,
    project_block_diagonal,
    ssr_dephase,
)
from .states import (
    SeparableSpec,
    SplitAmplitude,
    ensemble_state,
    ep_spin_pair,
    pair_vacuum_superposition,
    schmidt_pure_state,
    single_particle_split,
    spin_coherent_state,
    yurke_state,
)

__version__ = "0.1.0"
