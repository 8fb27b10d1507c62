"""Phase retrieval from discrete Gabor intensity measurements."""

from .estimator import GaborPhaseRetrieval
from .generators import (
    CATALOG,
    GeneratorSpec,
    alltop_generator,
    characteristic_vector,
    fourier_window_generator,
    quadratic_difference_set,
    quartic_difference_set,
    random_gaussian_generator,
    spatial_window_generator,
    validate_difference_set,
)
from .harness import (
    ExperimentConfig,
    MaskSpec,
    SignalModel,
    audit_report,
    build_mask,
    random_sparse_signal,
    run_experiment,
    write_results,
)
from .injectivity import (
    check_fourier_sparse_condition,
    check_full_condition,
    check_nonvanishing_condition,
    check_sparse_condition,
    frame_bounds,
    negative_witness,
    sparsity_profile,
    theta,
    verify_kernel_witness,
)
from .io import read_measurements, read_signal, write_measurements, write_signal
from .recovery import (
    MaskPair,
    RecoveryState,
    SolverOptions,
    bp_partial_fourier,
    phase_aligned_error,
    sgpr,
    sgpr_fourier_sparse,
)
from .tfcore import (
    AmbiguityTable,
    MeasurementSet,
    ambiguity_table,
    dft,
    idft,
    measure_intensities,
    tf_shift,
)

__version__ = "0.1.0"
