"""Variational and joint variational mode decomposition.

Quick start::

    from jvmd import tone_mixture, vmd_decompose, jvmd_decompose
    frame = tone_mixture(1500, 1500.0)
    vmd_decompose(frame, num_modes=3, alpha=2000).frequencies_hz
"""
from .errors import *  # noqa: F401,F403
from .joint import (
    FrameBatch,
    JvmdConfig,
    JvmdResult,
    JvmdSolver,
    convergence_kappa,
    jvmd_decompose,
    lambda_update_jvmd,
    mode_update_jvmd,
    noise_update,
    principal_cbrt,
)
from .frameio import (
    LabeledFrameSet,
    batch_by_label,
    read_csv_frames,
    read_frames,
    write_csv_frames,
    write_frames,
)
from .kernels import BACKEND
from .sei import (
    ClassificationReport,
    Dictionary,
    build_dictionary,
    evaluate,
    extract_features,
    omp,
    src_classify,
)
from .signals import (
    EmitterProfile,
    add_awgn,
    center_freq_error,
    emitter_profiles,
    preamble_message,
    synth_emitter_frames,
    tone_mixture,
)
from .spectral import (
    AnalyticSpectrum,
    RealFrame,
    analytic_spectrum,
    as_frame,
    mirror_extend,
    synthesize_time,
)
from .vmd import (
    VmdConfig,
    VmdResult,
    VmdSolver,
    lambda_update_vmd,
    mode_update_vmd,
    omega_update,
    vmd_decompose,
)

__version__ = "0.1.0"
