"""Heat semigroup P_t = exp(t(K - I)) via uniformization.

The Poisson-weighted power series e^{-t} sum_k (t^k/k!) K^k f keeps every
partial sum a nonnegative combination of kernel powers, so truncation has an
exact Poisson-tail bound and no oscillation.  Truncated weights are
renormalized to sum to one, which makes the computed operator an exact
averaging: componentwise bounds and the pi-integral are preserved to
round-off rather than to the tail bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .chains import MarkovChain
from .errors import NonPositiveField, TruncationFailure
from .records import AuditRecord, make_record


@dataclass(frozen=True)
class HeatOptions:
    truncation_tol: float = 1e-12
    max_terms: int = 100_000

    def __post_init__(self):
        if not (0.0 < self.truncation_tol <= 1e-6):
            raise ValueError("truncation_tol must lie in (0, 1e-6]")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


DEFAULT_HEAT = HeatOptions()


def _poisson_weights(t: float, opts: HeatOptions) -> np.ndarray:
    """Renormalized Poisson(t) weights covering all but truncation_tol mass."""
    kmax = int(poisson.isf(opts.truncation_tol, t)) + 1
    if kmax + 1 > opts.max_terms:
        raise TruncationFailure(
            f"needs {kmax + 1} terms at t={t}, cap is {opts.max_terms}"
        )
    k = np.arange(kmax + 1)
    logw = k * np.log(t) - t - gammaln(k + 1)
    w = np.exp(logw - logw.max())
    return w / w.sum()


def _apply_series(op: np.ndarray, v: np.ndarray, t: float, opts: HeatOptions) -> np.ndarray:
    if t < 0:
        raise ValueError("time must be nonnegative")
    v = np.asarray(v, dtype=float)
    if t == 0.0:
        return v.copy()
    w = _poisson_weights(t, opts)
    acc = w[0] * v
    cur = v
    for wk in w[1:]:
        cur = op @ cur
        acc = acc + wk * cur
    return acc


def heat_apply(chain: MarkovChain, f: np.ndarray, t: float,
               opts: HeatOptions = DEFAULT_HEAT) -> np.ndarray:
    """P_t f; an average of kernel powers, so min f <= P_t f <= max f."""
    return _apply_series(chain.kernel, f, t, opts)


def heat_adjoint(chain: MarkovChain, mu: np.ndarray, t: float,
                 opts: HeatOptions = DEFAULT_HEAT) -> np.ndarray:
    """P_t^* mu acting on measures; mass preserving, fixes pi."""
    return _apply_series(chain.kernel.T, mu, t, opts)


def check_gamma_commutation(chain: MarkovChain, kappa: float, fields, t_grid,
                            opts: HeatOptions = DEFAULT_HEAT,
                            tol: float = 1e-9) -> list[AuditRecord]:
    """Pointwise check of Gamma(P_t f) <= e^{-2 kappa t} P_t Gamma(f).

    Emits one record per (field, time, state) in that order, with the slack,
    so audits can detect near-tight instances as well as violations.
    """
    from .operators import gamma

    records = []
    for fi, f in enumerate(fields):
        gf = gamma(chain, f)
        for ti, t in enumerate(t_grid):
            lhs = gamma(chain, heat_apply(chain, f, t, opts))
            rhs = np.exp(-2.0 * kappa * t) * heat_apply(chain, gf, t, opts)
            for x in range(chain.n):
                records.append(make_record(
                    "gamma_commutation",
                    f"field {fi}, t={t}, state {chain.states[x]}",
                    float(lhs[x]), float(rhs[x]), tol=tol,
                ))
    return records


def check_sqrt_commutation(chain: MarkovChain, kappa_e: float, fields, t_grid,
                           opts: HeatOptions = DEFAULT_HEAT,
                           tol: float = 1e-9) -> list[AuditRecord]:
    """Pointwise checks of the two square-root commutation bounds.

    (i)  Gamma(sqrt(P_t f)) <= e^{-2 kappa_e t} P_t Gamma(sqrt f)
    (ii) Gamma(P_t f)/P_t f <= e^{-2 kappa_e t} P_t (Gamma(f)/f)

    Fields must be strictly positive.
    """
    from .operators import POSITIVITY_FLOOR, gamma

    records = []
    for fi, f in enumerate(fields):
        f = np.asarray(f, dtype=float)
        if (f < POSITIVITY_FLOOR).any():
            raise NonPositiveField("sqrt commutation needs strictly positive fields")
        g_sqrt = gamma(chain, np.sqrt(f))
        g_ratio = gamma(chain, f) / f
        for ti, t in enumerate(t_grid):
            ptf = heat_apply(chain, f, t, opts)
            decay = np.exp(-2.0 * kappa_e * t)
            lhs1 = gamma(chain, np.sqrt(ptf))
            rhs1 = decay * heat_apply(chain, g_sqrt, t, opts)
            lhs2 = gamma(chain, ptf) / ptf
            rhs2 = decay * heat_apply(chain, g_ratio, t, opts)
            for x in range(chain.n):
                where = f"field {fi}, t={t}, state {chain.states[x]}"
                records.append(make_record("sqrt_commutation_i", where,
                                           float(lhs1[x]), float(rhs1[x]), tol=tol))
                records.append(make_record("sqrt_commutation_ii", where,
                                           float(lhs2[x]), float(rhs2[x]), tol=tol))
    return records


def probe_classical_sqrt_commutation(chain: MarkovChain, kappa: float, fields, t_grid,
                                     opts: HeatOptions = DEFAULT_HEAT) -> list[AuditRecord]:
    """Empirical probe of sqrt(Gamma(P_t f)) <= e^{-kappa t} P_t sqrt(Gamma(f)).

    This classical commutation is not guaranteed by any curvature condition
    tested here, so the records are informational (passed is None) and report
    the observed worst slack per (field, time).
    """
    from .operators import gamma

    records = []
    for fi, f in enumerate(fields):
        sg = np.sqrt(np.maximum(gamma(chain, f), 0.0))
        for t in t_grid:
            lhs = np.sqrt(np.maximum(gamma(chain, heat_apply(chain, f, t, opts)), 0.0))
            rhs = np.exp(-kappa * t) * heat_apply(chain, sg, t, opts)
            x = int(np.argmin(rhs - lhs))
            records.append(make_record(
                "classical_sqrt_commutation_probe",
                f"field {fi}, t={t}, worst state {chain.states[x]}",
                float(lhs[x]), float(rhs[x]), informational=True,
            ))
    return records
