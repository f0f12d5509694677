"""Curvature solvers: Bakry-Emery, exponential, and coarse Ricci.

Bakry-Emery CD(kappa, inf) is exact: at each state the best constant is the
smallest generalized eigenvalue of the (Gamma_2, Gamma) form pencil on the
2-ball, after quotienting out the null space of the Gamma form.  The Gamma
form is always singular (constants at least), and the Gamma_2 form need not
be definite there, so the pencil is reduced by a Schur complement over the
null block before whitening.

The exponential condition CDE'(kappa_e, inf) quantifies over positive fields
and its per-state ratio is nonconvex, so the solver ships honest upper
bounds: multi-start descent in log coordinates plus randomized falsification
at a candidate constant.

Coarse Ricci lower bounds come from the small-time derivative of the
Wasserstein contraction, evaluated exactly as a linear program over
1-Lipschitz potentials; the small-t secant is kept as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize as sopt

from .chains import DistanceMatrix, MarkovChain
from .errors import DegenerateForm, LPInfeasible, NonFiniteDistance, NonPositiveField
from .operators import POSITIVITY_FLOOR, gamma, gamma2_tilde, generator_apply, local_forms
from .records import AuditRecord, make_record

RANK_THRESHOLD = 1e-10


@dataclass(frozen=True)
class CurvatureReport:
    notion: str  # "CD" | "CDE_prime" | "coarse"
    global_value: float
    per_locus: dict
    witness: np.ndarray | None
    method_meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "notion": self.notion,
            "global": self.global_value,
            "per_locus": [[k, v] for k, v in self.per_locus.items()],
            "witness": None if self.witness is None else list(self.witness),
            "meta": self.method_meta,
        }


# ---------------------------------------------------------------------------
# Bakry-Emery CD(kappa, inf)
# ---------------------------------------------------------------------------


def _cd_at_state(chain: MarkovChain, x: int) -> tuple[float, np.ndarray | None]:
    """Smallest Gamma_2/Gamma ratio at x and a witness field (full length)."""
    forms = local_forms(chain, x)
    a, b = forms.gamma_form, forms.gamma2_form
    m = a.shape[0]
    evals, evecs = np.linalg.eigh(a)
    scale_a = max(evals.max(), 0.0)
    if scale_a <= 0:
        raise DegenerateForm(f"Gamma form vanishes at state {chain.states[x]}")
    keep = evals > RANK_THRESHOLD * scale_a
    r, nul = evecs[:, keep], evecs[:, ~keep]
    d_r = evals[keep]

    b_rr = r.T @ b @ r
    scale_b = max(float(np.abs(b).max()), 1e-300)
    if nul.shape[1]:
        b_nn = nul.T @ b @ nul
        b_rn = r.T @ b @ nul
        sn, vn = np.linalg.eigh(b_nn)
        if sn.min() < -1e-9 * scale_b:
            # Gamma_2 dips negative where Gamma vanishes: the ratio is unbounded below
            return -math.inf, None
        # pseudo-inverse thresholded against the overall form scale, not
        # against b_nn's own largest eigenvalue (which may be pure noise)
        pos = sn > RANK_THRESHOLD * scale_b
        pinv = (vn[:, pos] / sn[pos]) @ vn[:, pos].T if pos.any() else np.zeros_like(b_nn)
        resid = b_rn @ (np.eye(nul.shape[1]) - pinv @ b_nn)
        if np.abs(resid).max() > 1e-7 * scale_b:
            return -math.inf, None
        schur = b_rr - b_rn @ pinv @ b_rn.T
        backsolve = -pinv @ b_rn.T
    else:
        schur = b_rr
        backsolve = None

    inv_sqrt = 1.0 / np.sqrt(d_r)
    white = schur * inv_sqrt[:, None] * inv_sqrt[None, :]
    white = 0.5 * (white + white.T)
    ev, evec = np.linalg.eigh(white)
    coeff_r = inv_sqrt * evec[:, 0]
    local = r @ coeff_r
    if backsolve is not None:
        local = local + nul @ (backsolve @ coeff_r)
    witness = np.zeros(chain.n)
    witness[forms.support] = local
    return float(ev[0]), witness


def cd_curvature(chain: MarkovChain, threads: int | None = None) -> CurvatureReport:
    """Optimal constant for Gamma_2 >= kappa Gamma, state by state.

    The returned witness attains the global minimum ratio at the minimizing
    state, up to eigensolver round-off.
    """
    from .parallel import pmap

    results = pmap(lambda x: _cd_at_state(chain, x), range(chain.n), threads)
    per_locus = {chain.states[x]: results[x][0] for x in range(chain.n)}
    ix = int(np.argmin([v for v, _ in results]))
    value = results[ix][0]
    return CurvatureReport(
        notion="CD",
        global_value=value,
        per_locus=per_locus,
        witness=results[ix][1],
        method_meta={"minimizing_state": chain.states[ix], "solver": "pencil_eigh"},
    )


# ---------------------------------------------------------------------------
# exponential curvature CDE'(kappa_e, inf): upper bounds + falsification
# ---------------------------------------------------------------------------


def _cde_ratio_grad(ks: np.ndarray, xi: int, f: np.ndarray):
    """Ratio Gamma~_2(f)(x) / Gamma(f)(x) on the 2-ball, with gradient.

    `ks` is the kernel restricted to the 2-ball; rows are complete for the
    centre and its neighbours, which are the only rows used.  Returns +inf
    outside the domain (Gamma = 0 at the centre).
    """
    m = len(f)
    if not np.isfinite(f).all() or (f <= 0).any():
        return math.inf, np.zeros(m)
    kx = ks[xi]
    df = f - f[xi]
    g_x = 0.5 * float(kx @ df**2)
    if g_x <= 1e-300:
        # constant on the 1-ball: outside the feasible ratio domain
        return math.inf, np.zeros(m)
    dg_x = kx * df
    dg_x[xi] -= float(kx @ df)

    diffs = f[None, :] - f[:, None]
    g_all = 0.5 * np.einsum("yz,yz,yz->y", ks, diffs, diffs)
    lf = ks @ f - f

    lgamma = float(kx @ (g_all - g_all[xi]))
    cross = 0.5 * float(kx @ (df * (lf - lf[xi])))
    h = g_all / f
    corr = 0.5 * float(kx @ (df * (h - h[xi])))
    top = 0.5 * lgamma - cross - corr
    rho = top / g_x

    dg_all = ks * diffs
    dg_all[np.arange(m), np.arange(m)] = -np.sum(ks * diffs, axis=1)
    d_lgamma = kx @ dg_all - dg_all[xi]  # rows of ks sum to 1 at the centre

    d_lf = ks - np.eye(m)
    d_cross = 0.5 * kx * (lf - lf[xi])
    d_cross[xi] -= 0.5 * float(kx @ (lf - lf[xi]))
    d_cross += 0.5 * (kx * df) @ d_lf - 0.5 * float(kx @ df) * d_lf[xi]

    dh = dg_all / f[:, None]
    dh[np.arange(m), np.arange(m)] -= g_all / f**2
    d_corr = 0.5 * kx * (h - h[xi])
    d_corr[xi] -= 0.5 * float(kx @ (h - h[xi]))
    d_corr += 0.5 * (kx * df) @ dh - 0.5 * float(kx @ df) * dh[xi]

    d_top = 0.5 * d_lgamma - d_cross - d_corr
    return rho, (d_top - rho * dg_x) / g_x


def _cde_upper_at_state(chain: MarkovChain, x: int, starts: int, seed: int,
                        cd_witness: np.ndarray | None):
    """Best found ratio at x over positive fields; an upper bound on the
    true per-state constant."""
    forms = local_forms(chain, x)
    support = forms.support
    ks = forms.local_kernel
    xi = int(np.where(support == x)[0][0])
    m = len(support)

    def objective(u):
        # scale freedom: the ratio is 0-homogeneous, so pin the max at 0 and
        # floor the spread so intermediate ratios stay inside double range
        u = np.maximum(u - u.max(), -150.0)
        f = np.exp(u)
        rho, grad = _cde_ratio_grad(ks, xi, f)
        if not math.isfinite(rho):
            return 1e30, np.zeros_like(f)
        return rho, grad * f

    inits = []
    if cd_witness is not None:
        w = cd_witness[support]
        span = np.abs(w).max()
        if span > 0:
            inits.append(w / span)  # start at exp(CD witness)
    inits.extend(np.log(np.eye(m)[i] + 0.1) for i in range(m))
    rng = np.random.default_rng([seed, x])
    inits.extend(rng.uniform(-2.0, 2.0, size=m) for _ in range(starts))

    nbr_mask = ks[xi] > 0
    nbr_mask[xi] = True

    best, best_f = math.inf, None
    failed = 0
    for u0 in inits:
        if np.ptp(u0[nbr_mask]) < 1e-9:
            # constant on the 1-ball gives Gamma = 0; nudge into the domain
            u0 = u0 + 1e-2 * rng.standard_normal(m)
        res = sopt.minimize(objective, u0, jac=True, method="L-BFGS-B",
                            options={"maxiter": 500, "ftol": 1e-15, "gtol": 1e-12})
        if not np.isfinite(res.fun):
            failed += 1
            continue
        if res.fun < best:
            best = float(res.fun)
            best_f = np.exp(res.x - res.x.max())
    witness = None
    if best_f is not None:
        witness = np.full(chain.n, np.min(best_f))
        witness[support] = best_f
    return best, witness, failed, len(inits)


def cde_curvature_upper(chain: MarkovChain, starts: int = 64, seed: int = 0,
                        threads: int | None = None) -> CurvatureReport:
    """Upper bound on the exponential curvature constant.

    Multi-start projected descent over positive fields on each 2-ball, in
    log coordinates so positivity and scale invariance are built in.
    Deterministic starts (the exponentiated CD witness and shifted coordinate
    indicators) are always included before the seeded random ones.  The true
    constant can only be lower than the reported value; certification of a
    lower bound must come from `cde_verify`.
    """
    from .parallel import pmap

    cd = cd_curvature(chain, threads)

    def work(x):
        return _cde_upper_at_state(chain, x, starts, seed, cd.witness)

    results = pmap(work, range(chain.n), threads)
    per_locus = {chain.states[x]: results[x][0] for x in range(chain.n)}
    ix = int(np.argmin([r[0] for r in results]))
    return CurvatureReport(
        notion="CDE_prime",
        global_value=results[ix][0],
        per_locus=per_locus,
        witness=results[ix][1],
        method_meta={
            "minimizing_state": chain.states[ix],
            "bound_side": "upper",
            "starts_per_state": results[ix][3],
            "nonconvergent_starts": int(sum(r[2] for r in results)),
            "seed": seed,
        },
    )


def cde_verify(chain: MarkovChain, kappa_e: float, trials: int, seed: int,
               restricted: bool = False, tol: float = 1e-9) -> list[AuditRecord]:
    """Randomized falsification of Gamma~_2(f) >= kappa_e Gamma(f).

    Draws strictly positive fields with log-uniform entries and reports one
    record per trial at the worst state.  With `restricted` the condition is
    only demanded at states where Lf < 0 (the weaker textbook variant).
    """
    if kappa_e <= 0:
        raise ValueError("kappa_e must be positive")
    rng = np.random.default_rng([seed, 7])
    records = []
    for trial in range(trials):
        f = np.exp(rng.uniform(-4.6, 4.6, size=chain.n))
        g2t = gamma2_tilde(chain, f)
        kg = kappa_e * gamma(chain, f)
        mask = np.ones(chain.n, dtype=bool)
        if restricted:
            mask = generator_apply(chain, f) < 0
            if not mask.any():
                continue
        slack = g2t[mask] - kg[mask]
        worst = int(np.argmin(slack))
        x = int(np.arange(chain.n)[mask][worst])
        records.append(make_record(
            "cde_pointwise",
            f"trial {trial}, state {chain.states[x]}",
            float(kg[x]), float(g2t[x]),
            witness={"field": f.tolist()} if slack[worst] < -tol else {},
            tol=tol,
        ))
    return records


# ---------------------------------------------------------------------------
# coarse Ricci curvature
# ---------------------------------------------------------------------------


def _lipschitz_rows(d: np.ndarray):
    n = d.shape[0]
    rows, rhs = [], []
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            r = np.zeros(n)
            r[u], r[v] = 1.0, -1.0
            rows.append(r)
            rhs.append(d[u, v])
    return np.array(rows), np.array(rhs)


def _coarse_pair(chain: MarkovChain, d: np.ndarray, lip, x: int, y: int):
    """kappa_c(x, y) = min (Lf(y) - Lf(x))/d(x,y) over 1-Lipschitz f with
    f(x) - f(y) = d(x,y); the optimal potential certifies the value."""
    n = chain.n
    gen = chain.kernel - np.eye(n)
    a_eq = np.zeros((2, n))
    a_eq[0, x], a_eq[0, y] = 1.0, -1.0
    a_eq[1, y] = 1.0  # gauge
    res = sopt.linprog(
        gen[y] - gen[x],
        A_ub=lip[0], b_ub=lip[1],
        A_eq=a_eq, b_eq=[d[x, y], 0.0],
        bounds=(None, None), method="highs",
    )
    if res.status != 0:
        raise LPInfeasible(f"coarse Ricci LP failed on pair ({x}, {y}): {res.message}")
    return float(res.fun) / float(d[x, y]), res.x


def coarse_ricci_secant(chain: MarkovChain, d: DistanceMatrix | np.ndarray,
                        x: int, y: int, t: float = 1e-2) -> float:
    """(1/t)(1 - W1(mu_x^t, mu_y^t)/d(x,y)) for the one-jump Euler mixtures.

    Exact (not an approximation) once t is below the parametric-LP
    breakpoint of the pair; used to cross-check the derivative LP.
    """
    from .transport import transport_lp

    dm = d.d if isinstance(d, DistanceMatrix) else np.asarray(d, dtype=float)
    n = chain.n
    mx = (1 - t) * np.eye(n)[x] + t * chain.kernel[x]
    my = (1 - t) * np.eye(n)[y] + t * chain.kernel[y]
    _, w1, _ = transport_lp(dm, mx, my)
    return (1.0 - w1 / dm[x, y]) / t


def coarse_ricci(chain: MarkovChain, d: DistanceMatrix, pairs="all",
                 threads: int | None = None) -> CurvatureReport:
    """Per-pair coarse Ricci curvature via the derivative linear program.

    `pairs` is "all" (default), "edges" for support edges only (results are
    then labelled edge-restricted since the contraction definition quantifies
    over every pair), or an explicit list of index pairs.
    """
    from .parallel import pmap

    dm = d.d if isinstance(d, DistanceMatrix) else np.asarray(d, dtype=float)
    if not np.isfinite(dm).all():
        raise NonFiniteDistance("coarse Ricci needs finite distances")
    n = chain.n
    if pairs == "all":
        pair_list = [(x, y) for x in range(n) for y in range(x + 1, n)]
        label = "all"
    elif pairs == "edges":
        pair_list = [(x, y) for x in range(n) for y in range(x + 1, n)
                     if chain.kernel[x, y] > 0]
        label = "edge-restricted"
    else:
        pair_list = [(int(x), int(y)) for x, y in pairs]
        label = "explicit"
    if not pair_list:
        raise ValueError("no pairs to evaluate")
    lip = _lipschitz_rows(dm)
    results = pmap(lambda p: _coarse_pair(chain, dm, lip, *p), pair_list, threads)
    per_locus = {
        f"{chain.states[x]}|{chain.states[y]}": results[i][0]
        for i, (x, y) in enumerate(pair_list)
    }
    ix = int(np.argmin([v for v, _ in results]))
    return CurvatureReport(
        notion="coarse",
        global_value=results[ix][0],
        per_locus=per_locus,
        witness=results[ix][1],
        method_meta={
            "minimizing_pair": list(pair_list[ix]),
            "pair_set": label,
            "distance_kind": d.kind if isinstance(d, DistanceMatrix) else "custom",
        },
    )


def contraction_check(chain: MarkovChain, d: DistanceMatrix, kappa_c: float,
                      t_grid, trials: int, seed: int,
                      tol: float = 1e-8) -> list[AuditRecord]:
    """W1(P_t* mu, P_t* nu) <= exp(-kappa_c t) W1(mu, nu) on random pairs."""
    from .semigroup import heat_adjoint
    from .transport import transport_lp

    dm = d.d if isinstance(d, DistanceMatrix) else np.asarray(d, dtype=float)
    n = chain.n
    records = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        mu = rng.dirichlet(np.ones(n))
        nu = rng.dirichlet(np.ones(n))
        _, w0, _ = transport_lp(dm, mu, nu)
        for t in t_grid:
            _, wt, _ = transport_lp(dm, heat_adjoint(chain, mu, t), heat_adjoint(chain, nu, t))
            records.append(make_record(
                "w1_contraction", f"trial {trial}, t={t}",
                float(wt), float(math.exp(-kappa_c * t) * w0), tol=tol,
            ))
    return records
