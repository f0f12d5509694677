"""Discrete Ricci curvature and transport inequalities for reversible chains."""

__version__ = "0.1.0"

from .chains import (
    DistanceMatrix,
    MarkovChain,
    Tolerances,
    build_chain,
    graph_distance,
    laziness,
    read_chain_csv,
    read_chain_json,
    standard_chain,
    write_chain_csv,
    write_chain_json,
    write_distance_csv,
)
from .curvature import (
    CurvatureReport,
    cd_curvature,
    cde_curvature_upper,
    cde_verify,
    coarse_ricci,
    coarse_ricci_secant,
    contraction_check,
)
from .functionals import (
    FunctionalValue,
    entropy,
    fisher,
    fisher_bar,
    fisher_modified,
    gamma_estimates_check,
)
from .operators import (
    LocalForms,
    gamma,
    gamma2,
    gamma2_tilde,
    generator_apply,
    local_forms,
)
from .records import AuditRecord, make_record, violations, worst_slack
from .semigroup import (
    HeatOptions,
    check_gamma_commutation,
    check_sqrt_commutation,
    heat_adjoint,
    heat_apply,
    probe_classical_sqrt_commutation,
)
from .transport import (
    TransportPlan,
    d_gamma,
    gamma_distance_pair,
    hj_check,
    inf_convolution,
    tilde_gradient,
    wasserstein_p,
    weak_transport,
    weak_transport_dual,
    weak_transport_symmetric,
)

from .audit import (  # noqa: E402  (audit imports __version__ from here)
    AuditConfig,
    AuditReport,
    audit_cd_suite,
    audit_cde_suite,
    audit_coarse_suite,
    diameter_bound,
    run_full_audit,
    t2_blowup_demo,
    ti_implies_th_check,
    weak_ti_th_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
