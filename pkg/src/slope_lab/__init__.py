"""Exact slope calculus for filtered spaces, graded series and toric adelic divisors."""

from .adelic import (
    AdelicCurveSpec,
    DiagonalAdelicBundle,
    flag_degree_check,
    hn_sorted,
    pushforward_toric,
    total_degree,
    twist,
)
from .errors import ContractError, DomainError, InputError, SlopeLabError
from .filtration import (
    FilteredSpace,
    SlopeProfile,
    direct_sum,
    dual,
    hn_filtration,
    lambda_value,
    quotient,
    restrict,
    slope_profile,
    tensor,
)
from .series import (
    MonomialSeries,
    OkounkovEstimate,
    SlopeCertificate,
    SuperadditivityReport,
    asymptotic_invariants,
    bundle_sum_series,
    check_superadditivity,
    chi_volume_sequence,
    concave_transform,
    fekete_lambda,
    okounkov_body,
    series_space,
    slope_certificate,
)
from .toric import (
    ChiVolumeReport,
    ConcavePLFunction,
    LatticePolytope,
    ToricAdelicDivisor,
    chi_volume_oracle,
    cone_scan,
    evaluate_green,
    hilbert_samuel_check,
    integrate_pl,
    lattice_points,
    scale_divisor,
    sup_convolve,
    to_series,
    twist_divisor,
    vol_I_extension,
)

__all__ = [name for name in dir() if not name.startswith("_")]
