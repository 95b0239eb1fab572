"""weylaudit: counting functions, Riesz means, band-limited mollifiers and
completeness audits for Laplace spectra, with exact flat-torus and
round-sphere ground truth."""

from .audit import (
    Anomaly,
    AuditConfig,
    AuditReport,
    completeness_certificate,
    detect_defects,
    residual_series,
)
from .counting import (
    PrefixPowerSums,
    counting_function,
    repeated_antiderivative_check,
    riesz,
    riesz_direct,
    riesz_mean,
    riesz_via_integral,
)
from .errors import (
    CompletenessError,
    KernelBuildError,
    OrderError,
    ParseError,
    ResourceBudgetError,
    ValidationError,
    WeylAuditError,
)
from .estimators import CompletenessAuditor, RieszMeanTransformer
from .models import (
    FlatTorus,
    RoundSphere,
    sphere_spectrum,
    torus_geodesic_lengths,
    torus_spectrum,
)
from .mollify import (
    ConvolveResult,
    Kernel,
    ScaledKernel,
    build_nonneg_kernel,
    build_plateau_kernel,
    convolve_counting,
    convolve_density,
    plateau_fourier,
    plateau_moments_highprec,
    tauberian_gap_check,
    tauberian_kernel,
)
from .spectrum import (
    Spectrum,
    from_frequencies,
    from_laplace_eigenvalues,
    load,
    perturb,
    save,
    truncate,
)
from .wavetrace import (
    GaussianWindow,
    KernelWindow,
    TraceSeries,
    detect_length_peaks,
    spectral_wave_trace,
)
from .weyl import (
    RieszPrediction,
    WeylCoefficients,
    fit_unknown_coefficients,
    leading_coefficient,
    load_coefficients,
    predict_counting,
    predict_riesz,
    riesz_factor,
    riesz_transform_coeffs,
    save_coefficients,
    sphere_coefficients,
    torus_coefficients,
    unit_ball_volume,
)

__version__ = "0.1.0"
