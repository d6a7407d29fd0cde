"""Split spin-squeezed states: heralded preparation, sensitivity, negativity."""

from .dicke import (
    DickeState,
    RotationSpec,
    SpinDensity,
    collective_spin_ops,
    dump_state,
    load_state,
    log_binomial,
    rotated_dicke_bra,
    wigner_d_matrix,
)
from .oat import (
    MeasurementFrame,
    OATParameters,
    SplitState,
    oat_state,
    split_state,
    splitting_distribution,
    theta_star,
)
from .conditioning import (
    ConditionalOutcome,
    OutcomeTable,
    condition,
    outcome_table,
    sz_conditional_closed_form,
)
from .metrology import (
    BlockMixture,
    QfiResult,
    covariance_matrix,
    cramer_rao,
    gamma_q,
    qfi_block_mixture,
    qfi_mixed,
    qfi_pure,
)
from .noise import (
    DetectionNoise,
    HeraldRule,
    avg_qfi_detection,
    avg_qfi_full,
    avg_qfi_joint_block,
    avg_qfi_number_fluct,
    detection_weights,
    noisy_conditional_state,
    resolve_axis,
)
from .wigner import (
    SphereGrid,
    WignerField,
    clebsch_gordan,
    coupling_table,
    rho_lm,
    wigner_function,
    wigner_negativity,
)

__version__ = "0.1.0"
