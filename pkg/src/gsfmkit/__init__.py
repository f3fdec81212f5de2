"""Sonar waveform design toolkit: the GSFM family and its competitors,
broadband/narrowband ambiguity analysis, Q-functions, mainlobe ellipses,
mismatched filters, and continuous-active-sonar pulse-train processing."""

from .sigcore import (
    TaperSpec,
    Waveform,
    apply_taper,
    default_sample_rate,
    doppler_scale,
    normalize_energy,
    papr,
    percent_bandwidth,
    spectral_containment,
    spectrum,
)
from .wavegen import (
    CodedParams,
    GsfmParams,
    SfmParams,
    gen_classic,
    gen_costas,
    gen_gsfm,
    gen_psk,
    gen_sfm,
    gsfm_fourier_coeffs,
    gsfm_reflections,
)
from .ambiguity import (
    AmbiguitySurface,
    composite_af,
    gsfm_analytic,
    qfunction,
    sfm_af_analytic,
    velocity_to_eta,
    velocity_to_phi,
    xaf,
)
from .mainlobe import (
    EoaParams,
    eoa_contour,
    eoa_gsfm_closed,
    eoa_numeric,
    estimation_variances,
    woodward_ratios,
)
from .metrics import (
    PslReport,
    carson_bandwidth,
    mainlobe_width,
    notch_depth,
    psl,
    psl_sweep,
)
from .mmf import MmfReport, design_mmf, mmf_grid_search, mmf_report
from .cas import (
    CasScenario,
    DirectBlast,
    MfBankOutput,
    PulseTrainSpec,
    Target,
    acceleration_tolerance,
    build_pulse_train,
    concat_train,
    design_gsfm_family,
    mf_bank_process,
    synth_scenario_echo,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
