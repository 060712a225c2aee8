"""Opinion dynamics on signed networks with communication delays.

Submodules: ``graph`` (signed digraph structure), ``netgen`` (random
constructions), ``spectral`` (eigenvalues and random-matrix predictions),
``discrete`` and ``continuous`` (delayed simulators), ``delay`` (delay
margins, Lambert W, rates) and ``cli``.
"""

from .continuous import ContinuousSystem, ContinuousTrajectory, integrate, measure_rate
from .delay import (
    DelayReport,
    LambertValue,
    accel_condition,
    boundary_curve,
    delay_gain,
    lambert_w0,
    rate_continuous,
    rate_sweep,
    tau_star,
    tau_star_complex,
    tau_star_random,
    tau_tilde,
    teardrop_tau,
)
from .discrete import (
    DiscreteSystem,
    Trajectory,
    build_augmented,
    check_cscc_selfloop_condition,
    check_layer_lemmas,
    discrete_rate,
    root_identity_check,
    simulate,
)
from .errors import *  # noqa: F401,F403
from .graph import (
    Partition,
    compress,
    graph_period,
    is_aperiodic,
    is_structurally_balanced,
    scc_decompose,
)
from .netgen import (
    MixtureSpec,
    MixtureStats,
    build_laplacian,
    generate,
    generate_complex_mixture,
    generate_random_mixture,
    mixture_stats,
    normalize_rows,
)
from .spectral import (
    EllipsePrediction,
    SpectralSummary,
    containment_check,
    eigenvalues,
    predict_circular,
    predict_ellipse,
)

__version__ = "0.1.0"
