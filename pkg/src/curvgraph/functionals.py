"""Relative entropy and the three discrete Fisher informations."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import DistanceMatrix, MarkovChain
from .errors import DimensionMismatch, NegativeDensity, NonPositiveField
from .operators import POSITIVITY_FLOOR, gamma
from .records import AuditRecord, make_record


@dataclass(frozen=True)
class FunctionalValue:
    kind: str  # entropy | fisher | fisher_modified | fisher_bar
    value: float
    density: np.ndarray


def _as_density(f, chain: MarkovChain, strict: bool = False) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (chain.n,):
        raise DimensionMismatch(f"field has shape {f.shape}, expected ({chain.n},)")
    if strict:
        if (f < POSITIVITY_FLOOR).any():
            raise NonPositiveField("functional needs a strictly positive field")
    elif (f < 0).any():
        raise NegativeDensity("field has negative entries")
    return f


def entropy(f, chain: MarkovChain) -> FunctionalValue:
    """Ent(f) = sum f log f pi - (sum f pi) log(sum f pi), with 0 log 0 = 0."""
    f = _as_density(f, chain)
    flogf = np.where(f > 0, f * np.log(np.where(f > 0, f, 1.0)), 0.0)
    total = float(f @ chain.pi)
    norm = total * math.log(total) if total > 0 else 0.0
    return FunctionalValue("entropy", float(flogf @ chain.pi) - norm, f)


def fisher(f, chain: MarkovChain) -> FunctionalValue:
    """I(f) = 4 integral of Gamma(sqrt f) against pi.

    For a probability density the value can never exceed 4J; exceeding it
    means a broken kernel or density, so it is treated as an internal error.
    """
    f = _as_density(f, chain)
    value = 4.0 * float(gamma(chain, np.sqrt(f)) @ chain.pi)
    if abs(float(f @ chain.pi) - 1.0) <= 1e-8 and value > 4.0 * chain.laziness + 1e-10:
        raise AssertionError(f"Fisher information {value} exceeds 4J = {4 * chain.laziness}")
    return FunctionalValue("fisher", value, f)


def fisher_modified(f, chain: MarkovChain) -> FunctionalValue:
    """Entropy-production form: integral of Gamma(f, log f) against pi."""
    f = _as_density(f, chain, strict=True)
    value = float(gamma(chain, f, np.log(f)) @ chain.pi)
    return FunctionalValue("fisher_modified", value, f)


def fisher_bar(f, chain: MarkovChain) -> FunctionalValue:
    """Integral of Gamma(f)/f against pi; infinite when f vanishes somewhere.

    A zero of f with any moving neighbour makes Gamma(f)/f blow up there, so
    the value is the +inf sentinel rather than an error.
    """
    f = _as_density(f, chain)
    g = gamma(chain, f)
    zero = f <= 0
    if zero.any():
        if (g[zero] > 0).any():
            return FunctionalValue("fisher_bar", math.inf, f)
        ratio = np.where(zero, 0.0, g / np.where(zero, 1.0, f))
    else:
        ratio = g / f
    return FunctionalValue("fisher_bar", float(ratio @ chain.pi), f)


def tilde_norm_squared_log(f, d: DistanceMatrix) -> np.ndarray:
    """|grad~ log f|^2 f pointwise, with the conventions 0 * inf = 0 at zeros of f.

    At states where f > 0 but some other state has smaller (possibly zero) f,
    the slope of log f is finite or infinite accordingly.
    """
    from .transport import tilde_gradient

    f = np.asarray(f, dtype=float)
    out = np.zeros_like(f)
    pos = f > 0
    if pos.all():
        s = tilde_gradient(np.log(f), d)
        return s * s * f
    # descending slope of log f from a positive state towards a zero is infinite
    logf = np.where(pos, np.log(np.where(pos, f, 1.0)), -math.inf)
    n = len(f)
    for x in range(n):
        if not pos[x]:
            continue
        worst = 0.0
        for y in range(n):
            if y == x:
                continue
            drop = logf[x] - logf[y]
            if drop > 0:
                worst = max(worst, math.inf if math.isinf(drop) else (drop / d.d[x, y]) ** 2)
        out[x] = worst * f[x]
    return out


def gamma_estimates_check(f, g, chain: MarkovChain, d: DistanceMatrix,
                          tol: float = 1e-9) -> list[AuditRecord]:
    """The four integrated bounds tying the one-sided gradient to Gamma.

    (i)   int Gamma(f,g) dpi <= sqrt(2) J int |grad~ g| |grad~ f| dpi
    (ii)  |int Gamma(f,g) dpi| <= sqrt(2J) int |grad~ g| sqrt(Gamma(f)) dpi
    (iii) f >= 0: int Gamma(f,g) dpi <= 2 sqrt(2J) int |grad~ g| sqrt(f Gamma(sqrt f)) dpi
    (iv)  f >= 0: int Gamma(sqrt f) dpi <= (J/4) int |grad~ log f|^2 f dpi

    For (iv), zeros of f adjacent to positive mass push the right side to the
    +inf sentinel and the record passes with that annotation.
    """
    from .transport import tilde_gradient

    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    pi = chain.pi
    j_global = chain.laziness
    tg = tilde_gradient(g, d)
    tf = tilde_gradient(f, d)
    cross = float(gamma(chain, f, g) @ pi)
    recs = [
        make_record("gamma_gradient_i", "i",
                    cross, math.sqrt(2.0) * j_global * float((tg * tf) @ pi), tol=tol),
        make_record("gamma_gradient_ii", "ii",
                    abs(cross),
                    math.sqrt(2.0 * j_global) * float((tg * np.sqrt(np.maximum(gamma(chain, f), 0.0))) @ pi),
                    tol=tol),
    ]
    if (f < 0).any():
        return recs
    recs.append(make_record(
        "gamma_gradient_iii", "iii",
        cross,
        2.0 * math.sqrt(2.0 * j_global)
        * float((tg * np.sqrt(np.maximum(f * gamma(chain, np.sqrt(f)), 0.0))) @ pi),
        tol=tol,
    ))
    rhs_iv_terms = tilde_norm_squared_log(f, d)
    rhs_iv = math.inf if np.isinf(rhs_iv_terms).any() else (j_global / 4.0) * float(rhs_iv_terms @ pi)
    recs.append(make_record(
        "gamma_gradient_iv", "iv",
        float(gamma(chain, np.sqrt(f)) @ pi), rhs_iv, tol=tol,
    ))
    return recs
