"""Low-cost mutual information of coherent-state ensembles under restricted measurements."""

from .constellation import (
    CoherentEnsemble,
    OnePhotonVector,
    WordEnsemble,
    make_hadamard_words,
    make_ook,
    make_psk,
    mean_photon_number,
    one_photon_vector,
    papr,
)
from .errors import BracketError, DomainError, NumericalError, SLDUndefinedError
from .lowcost import (
    ExpansionReport,
    Povm,
    StateExpansion,
    classify,
    coherent_state_expansion,
    expansion_report,
    f_curve,
    sld,
    three_symbol_bound,
    word_sector_bound,
    word_state_expansion,
)
from .optimize import (
    hadamard_strategy_pie,
    maximize_scalar,
    optimal_pie_three_symbol,
    optimal_pie_two_symbol,
    superadditivity_threshold,
)
from .oracle import JointDistribution, born_probabilities, convergence_check, mutual_information
from .receivers import (
    HybridChannel,
    LinearCircuit,
    helstrom_mi,
    homodyne_bpsk_mi,
    shannon_hartley,
    thermal_pie_bound,
    three_symbol_mi,
    two_symbol_mi,
)

__version__ = "0.1.0"
