"""Inequality certification engine.

Every suite takes a chain and a curvature constant, generates trial
densities or potentials, computes both sides of each inequality with the
exact transport and functional solvers, and reports slack per instance.
Violations are returned with witnesses, never raised: a failed audit is a
result, not an error.

Trial densities mix deterministic adversarial instances (the normalized
Dirac at each state, a two-block bump) with random fields exp(G) where G is
a Gaussian of standard deviation swept over {0.5, 1, 2}, normalized against
pi.  Each trial has its own counter-seeded generator so suites are
reproducible regardless of evaluation order or thread count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .chains import DistanceMatrix, MarkovChain, graph_distance
from .curvature import cd_curvature, cde_curvature_upper, coarse_ricci
from .errors import BadPartition
from .functionals import entropy, fisher, fisher_bar
from .operators import gamma
from .records import AuditRecord, make_record, violations, worst_slack
from .transport import (
    GammaBallProgram,
    d_gamma,
    inf_convolution,
    w1_gamma_dual,
    wasserstein_p,
    weak_transport,
)

POSITIVE_CURVATURE_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# trial instance generators
# ---------------------------------------------------------------------------


def adversarial_densities(chain: MarkovChain) -> list[tuple[str, np.ndarray]]:
    """Dirac densities at each state plus a small two-block perturbation."""
    out = []
    for x in range(chain.n):
        f = np.zeros(chain.n)
        f[x] = 1.0 / chain.pi[x]
        out.append((f"dirac_{chain.states[x]}", f))
    if chain.n >= 2:
        h = 0.25 * min(chain.pi[0], 1.0 - chain.pi[0])
        f = np.full(chain.n, 1.0 - h / (1.0 - chain.pi[0]))
        f[0] = 1.0 + h / chain.pi[0]
        out.append(("two_block", f))
    return out


def sample_densities(chain: MarkovChain, trials: int, seed: int,
                     include_adversarial: bool = True) -> list[tuple[str, np.ndarray]]:
    """Deterministic trial list: adversarial instances then random fields."""
    out = adversarial_densities(chain) if include_adversarial else []
    sigmas = (0.5, 1.0, 2.0)
    for trial in range(max(0, trials - len(out))):
        rng = np.random.default_rng([seed, trial])
        g = sigmas[trial % len(sigmas)] * rng.standard_normal(chain.n)
        f = np.exp(g - g.max())
        f = f / float(f @ chain.pi)
        out.append((f"random_{trial}", f))
    return out


def sample_lipschitz(chain: MarkovChain, d: np.ndarray, trials: int,
                     seed: int) -> list[tuple[str, np.ndarray]]:
    """Random 1-Lipschitz mean-zero potentials via the McShane envelope."""
    diam = float(d.max())
    out = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, 1000 + trial])
        h = rng.normal(0.0, max(diam, 1.0), size=chain.n)
        f = (h[None, :] + d).min(axis=1)
        f = f - float(f @ chain.pi)
        out.append((f"lipschitz_{trial}", f))
    return out


def _dist(chain: MarkovChain, d: DistanceMatrix | None, maker) -> DistanceMatrix:
    return d if d is not None else maker(chain)


# ---------------------------------------------------------------------------
# theorem suites
# ---------------------------------------------------------------------------


def audit_cd_suite(chain: MarkovChain, kappa: float, trials: int, seed: int,
                   dg: DistanceMatrix | None = None,
                   dgam: DistanceMatrix | None = None) -> list[AuditRecord]:
    """Transport-information consequences of a positive Bakry-Emery bound.

    Per density f with nu = f pi, four records:
      W1G(nu, pi)^2      <= (2/kappa^2)     I(f)
      W1_dg(nu, pi)^2    <= (J/kappa^2)     I(f)
      W1G(nu, pi)        <= (1/kappa)       int sqrt(Gamma(f)) dpi
      W2~_dg(pi | nu)^2  <= (sqrt(2) J/k^2) int Gamma(f) dpi
    where W1G is the Gamma-ball transport functional
    sup {int g dnu - int g dpi : Gamma(g) <= 1}, the quantity the curvature
    bound controls (the metric Wasserstein distance over d_Gamma can exceed
    it, since d_Gamma-Lipschitz does not imply Gamma <= 1 in general).
    """
    if kappa <= 0:
        raise ValueError("cd suite needs a positive constant")
    dg = _dist(chain, dg, graph_distance)
    j_global = chain.laziness
    ball = GammaBallProgram(chain)
    records = []
    for name, f in sample_densities(chain, trials, seed):
        nu = f * chain.pi
        fisher_val = fisher(f, chain).value
        w1_gamma, _ = w1_gamma_dual(chain, nu, chain.pi, program=ball)
        w1_graph, _ = wasserstein_p(nu, chain.pi, dg, 1.0)
        weak_rev, _ = weak_transport(chain.pi, nu, dg)
        dirichlet = float(gamma(chain, f) @ chain.pi)
        cheeger_rhs = float(np.sqrt(np.maximum(gamma(chain, f), 0.0)) @ chain.pi) / kappa
        wit = {"density": f.tolist()}
        records.extend([
            make_record("t1i_gamma_distance", name, w1_gamma**2,
                        (2.0 / kappa**2) * fisher_val, witness=wit),
            make_record("t1i_graph_distance", name, w1_graph**2,
                        (j_global / kappa**2) * fisher_val, witness=wit),
            make_record("cheeger_gamma_distance", name, w1_gamma, cheeger_rhs,
                        witness=wit),
            make_record("weak_t2_dirichlet", name, weak_rev,
                        (math.sqrt(2.0) * j_global / kappa**2) * dirichlet,
                        witness=wit),
        ])
    return records


def audit_cde_suite(chain: MarkovChain, kappa_e: float, trials: int, seed: int,
                    dg: DistanceMatrix | None = None) -> list[AuditRecord]:
    """Weak transport-information consequences of exponential curvature.

    Per density f with nu = f pi:
      W2~(nu | pi)^2 <= (2J/kappa_e^2) I(f)
      W2~(nu | pi)^2 <= (2J/kappa_e^2) Ibar(f)
      W2~(pi | nu)^2 <= (2J/kappa_e^2) Ibar(f)
    Instances with Ibar = inf pass with that annotation rather than being
    resampled, keeping the density distribution unbiased.
    """
    if kappa_e <= 0:
        raise ValueError("cde suite needs a positive constant")
    dg = _dist(chain, dg, graph_distance)
    coef = 2.0 * chain.laziness / kappa_e**2
    records = []
    for name, f in sample_densities(chain, trials, seed):
        nu = f * chain.pi
        fisher_val = fisher(f, chain).value
        bar_val = fisher_bar(f, chain).value
        weak_fwd, _ = weak_transport(nu, chain.pi, dg)
        weak_rev, _ = weak_transport(chain.pi, nu, dg)
        wit = {"density": f.tolist()}
        records.extend([
            make_record("weak_t2i_fisher", name, weak_fwd, coef * fisher_val,
                        witness=wit),
            make_record("weak_t2i_fisher_bar", name, weak_fwd, coef * bar_val,
                        witness=wit),
            make_record("weak_t2i_reverse_fisher_bar", name, weak_rev,
                        coef * bar_val, witness=wit),
        ])
    return records


def audit_coarse_suite(chain: MarkovChain, kappa_c: float, trials: int, seed: int,
                       dg: DistanceMatrix | None = None) -> list[AuditRecord]:
    """W1 transport-information bounds under positive coarse Ricci curvature.

    Per density f with nu = f pi:
      W1(nu, pi)^2 <= (1/kappa_c^2) I(f) (J - I(f)/8)
      W1(nu, pi)   <= (1/kappa_c) sum_{x!=y} |f(x)-f(y)| K(x,y) pi(x)
    plus the consistency record I(f)/8 <= J that keeps the first right-hand
    side nonnegative.
    """
    if kappa_c <= 0:
        raise ValueError("coarse suite needs a positive constant")
    dg = _dist(chain, dg, graph_distance)
    j_global = chain.laziness
    records = []
    for name, f in sample_densities(chain, trials, seed):
        nu = f * chain.pi
        fisher_val = fisher(f, chain).value
        w1, _ = wasserstein_p(nu, chain.pi, dg, 1.0)
        jump_l1 = float(np.sum(np.abs(f[None, :] - f[:, None]) * chain.kernel
                               * chain.pi[:, None]))
        wit = {"density": f.tolist()}
        records.extend([
            make_record("w1i_coarse", name, w1**2,
                        (fisher_val * (j_global - fisher_val / 8.0)) / kappa_c**2,
                        witness=wit),
            make_record("w1_total_jump", name, w1, jump_l1 / kappa_c, witness=wit),
            make_record("fisher_laziness_consistency", name, fisher_val / 8.0,
                        j_global, witness=wit),
        ])
    return records


def sample_gamma_ball(chain: MarkovChain, trials: int, seed: int) -> list[tuple[str, np.ndarray]]:
    """Random mean-zero potentials rescaled into {Gamma(f) <= 1}."""
    out = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, 1000 + trial])
        f = rng.standard_normal(chain.n)
        top = float(gamma(chain, f).max())
        if top > 0:
            f = f / math.sqrt(top)
        f = f - float(f @ chain.pi)
        out.append((f"gamma_ball_{trial}", f))
    return out


def ti_implies_th_check(chain: MarkovChain, c_const: float, d: DistanceMatrix,
                        lambda_grid, trials: int, seed: int,
                        route: str = "", gamma_ball: bool = False) -> list[AuditRecord]:
    """Gaussian moment bound and entropy bound implied by W1^2 <= I/C^2.

    For unit-slope mean-zero f: int exp(lambda f) dpi <= exp(lambda^2/(2C));
    for densities: W1(f pi, pi)^2 <= (2/C) Ent(f).  With `gamma_ball` the
    observables are sampled from {Gamma(f) <= 1} and the entropy record uses
    the Gamma-ball transport functional, matching what the curvature route
    actually certifies; otherwise metric 1-Lipschitz sampling and the plain
    W1 over `d` are used.
    """
    if c_const <= 0:
        raise ValueError("needs a positive constant")
    dm = d.d
    prefix = f"{route}, " if route else ""
    ball = GammaBallProgram(chain) if gamma_ball else None
    if gamma_ball:
        potentials = sample_gamma_ball(chain, trials, seed)
    else:
        potentials = sample_lipschitz(chain, dm, trials, seed)
    records = []
    for name, f in potentials:
        for lam in lambda_grid:
            lhs = float(np.exp(lam * f) @ chain.pi)
            rhs = math.exp(lam**2 / (2.0 * c_const))
            records.append(make_record(
                "mgf_lipschitz", f"{prefix}{name}, lambda={lam}", lhs, rhs,
                witness={"potential": f.tolist()} if lhs > rhs else {},
            ))
    for name, f in sample_densities(chain, trials, seed):
        if gamma_ball:
            w1, _ = w1_gamma_dual(chain, f * chain.pi, chain.pi, program=ball)
        else:
            w1, _ = wasserstein_p(f * chain.pi, chain.pi, d, 1.0)
        records.append(make_record(
            "t1_entropy", f"{prefix}{name}", w1**2,
            (2.0 / c_const) * entropy(f, chain).value,
            witness={"density": f.tolist()},
        ))
    return records


def weak_ti_th_check(chain: MarkovChain, c_const: float, trials: int, seed: int,
                     dg: DistanceMatrix | None = None) -> list[AuditRecord]:
    """Weak transport-entropy bounds implied by a weak W2~ information bound.

    Exponential form on random bounded potentials f:
      int exp((C/2) Q_1 f) dpi <= exp((C/2) int f dpi)
    which is the exact convex dual of W2~(pi | f pi)^2 <= (2/C) Ent(f);
    plus that direct bound and its forward counterpart on random densities.
    """
    if c_const <= 0:
        raise ValueError("needs a positive constant")
    dg = _dist(chain, dg, graph_distance)
    records = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, 2000 + trial])
        f = rng.uniform(-1.0, 1.0, size=chain.n)
        q1 = inf_convolution(f, dg, 1.0)
        lhs = float(np.exp(0.5 * c_const * q1) @ chain.pi)
        rhs = math.exp(0.5 * c_const * float(f @ chain.pi))
        records.append(make_record(
            "weak_exp_form", f"bounded_{trial}", lhs, rhs,
            witness={"potential": f.tolist()} if lhs > rhs else {},
        ))
    for name, f in sample_densities(chain, trials, seed):
        nu = f * chain.pi
        ent = entropy(f, chain).value
        weak_fwd, _ = weak_transport(nu, chain.pi, dg)
        weak_rev, _ = weak_transport(chain.pi, nu, dg)
        wit = {"density": f.tolist()}
        records.extend([
            make_record("weak_t2h_plus", name, weak_fwd, (2.0 / c_const) * ent,
                        witness=wit),
            make_record("weak_t2h_minus", name, weak_rev, (2.0 / c_const) * ent,
                        witness=wit),
        ])
    return records


def diameter_bound(chain: MarkovChain, c_const: float, d: DistanceMatrix,
                   kappa: float | None = None,
                   dg: DistanceMatrix | None = None) -> list[AuditRecord]:
    """Diameter bounds implied by a transport-information inequality.

    Per pair: d(x, y) <= (2/C)(sqrt J(x) + sqrt J(y)).  The route goes
    through the Dirac densities, whose Fisher information is at most 4 J(x);
    those internal bounds are recorded too.  With a Bakry-Emery constant the
    sharper graph-distance corollary
    d_g(x, y) kappa <= 2 min(sqrt J) (sqrt J(x) + sqrt J(y)) is also audited.
    """
    if c_const <= 0:
        raise ValueError("needs a positive constant")
    rates = chain.jump_rates
    records = []
    for x in range(chain.n):
        f = np.zeros(chain.n)
        f[x] = 1.0 / chain.pi[x]
        records.append(make_record(
            "dirac_fisher", f"state {chain.states[x]}",
            fisher(f, chain).value, 4.0 * rates[x],
        ))
    for x in range(chain.n):
        for y in range(x + 1, chain.n):
            pair = f"{chain.states[x]}|{chain.states[y]}"
            sx, sy = math.sqrt(rates[x]), math.sqrt(rates[y])
            records.append(make_record(
                "diameter_t1i", f"{d.kind}, {pair}",
                float(d.d[x, y]), (2.0 / c_const) * (sx + sy),
            ))
            if kappa is not None and kappa > 0:
                dgm = _dist(chain, dg, graph_distance)
                records.append(make_record(
                    "diameter_cd", pair,
                    float(dgm.d[x, y]) * kappa, 2.0 * min(sx, sy) * (sx + sy),
                ))
    return records


def t2_blowup_demo(chain: MarkovChain, partition, h_grid,
                   dg: DistanceMatrix | None = None) -> list[AuditRecord]:
    """Quadratic transport-entropy failure on two separated blocks.

    Shifts mass h from one block to the other: the squared W2 cost is of
    order h while the entropy is of order h^2, so the ratio R(h) diverges
    like 1/h and no T2-type inequality can hold.  Each record checks that
    R(h) * h stays above a conservative fraction of its small-h limit.
    """
    dg = _dist(chain, dg, graph_distance)
    c1 = sorted({int(i) for i in partition[0]})
    c2 = sorted({int(i) for i in partition[1]})
    if not c1 or not c2 or set(c1) & set(c2) or len(c1) + len(c2) != chain.n:
        raise BadPartition("blocks must be disjoint, nonempty, and cover the states")
    mass1 = float(chain.pi[c1].sum())
    mass2 = float(chain.pi[c2].sum())
    if min(mass1, mass2) <= 0:
        raise BadPartition("both blocks need positive mass")
    h_grid = sorted(float(h) for h in h_grid)
    if h_grid[0] <= 0 or h_grid[-1] >= min(mass1, mass2):
        raise BadPartition("h grid must lie in (0, min block mass)")
    sep = float(dg.d[np.ix_(c1, c2)].min())
    if sep <= 0:
        raise BadPartition("blocks are not separated")
    # small-h limit of R(h) h from the entropy expansion
    limit = sep**2 / (0.5 / mass1 + 0.5 / mass2)
    records = []
    for h in reversed(h_grid):
        f = np.zeros(chain.n)
        f[c1] = 1.0 + h / mass1
        f[c2] = 1.0 - h / mass2
        w2, _ = wasserstein_p(chain.pi, f * chain.pi, dg, 2.0)
        ent = entropy(f, chain).value
        ratio = w2**2 / ent
        records.append(make_record(
            "t2_blowup", f"h={h}", 0.25 * limit, ratio * h,
            witness={"ratio": ratio, "h": h, "entropy": ent, "w2_squared": w2**2},
        ))
    return records


# ---------------------------------------------------------------------------
# aggregated audit
# ---------------------------------------------------------------------------

ALL_SUITES = ("cd", "cde", "coarse", "commutation", "hj", "ti_th",
              "weak_ti_th", "diameter", "t2_blowup")


@dataclass(frozen=True)
class AuditConfig:
    suites: tuple = ALL_SUITES
    trials: int = 200
    seed: int = 42
    lambda_grid: tuple = (0.5, 1.0, 2.0, 5.0)
    commutation_t_grid: tuple = (0.1, 1.0, 10.0)
    commutation_fields: int = 50
    hj_t_points: int = 20
    hj_t_span: tuple = (0.05, 5.0)
    hj_fields: int = 20
    blowup_h_grid: tuple = tuple(2.0**-k for k in range(3, 11))
    cde_starts: int = 64
    kappa: float | None = None
    kappa_e: float | None = None
    kappa_c: float | None = None
    threads: int | None = None

    def to_dict(self) -> dict:
        return {
            "suites": list(self.suites),
            "trials": self.trials,
            "seed": self.seed,
            "lambda_grid": list(self.lambda_grid),
            "commutation_t_grid": list(self.commutation_t_grid),
            "commutation_fields": self.commutation_fields,
            "hj_t_points": self.hj_t_points,
            "hj_t_span": list(self.hj_t_span),
            "hj_fields": self.hj_fields,
            "blowup_h_grid": list(self.blowup_h_grid),
            "cde_starts": self.cde_starts,
            "kappa": self.kappa,
            "kappa_e": self.kappa_e,
            "kappa_c": self.kappa_c,
        }


@dataclass(frozen=True)
class AuditReport:
    chain_info: dict
    constants: dict
    suite_summaries: list
    notes: list
    config: dict
    records: list = field(default_factory=list, repr=False)

    @property
    def total_violations(self) -> int:
        return sum(s["violations"] for s in self.suite_summaries)

    @property
    def passed(self) -> bool:
        return self.total_violations == 0

    def to_dict(self) -> dict:
        return {
            "chain": self.chain_info,
            "constants": self.constants,
            "suites": self.suite_summaries,
            "notes": self.notes,
            "config": self.config,
            "version": __version__,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _summarize(records: list[AuditRecord]) -> list[dict]:
    by_tag: dict[str, list[AuditRecord]] = {}
    for r in records:
        by_tag.setdefault(r.theorem_tag, []).append(r)
    out = []
    for tag in sorted(by_tag):
        recs = by_tag[tag]
        bad = violations(recs)
        finite = [r for r in recs if not math.isinf(r.slack)]
        tight = min(finite, key=lambda r: r.slack) if finite else None
        out.append({
            "theorem_tag": tag,
            "trials": len(recs),
            "violations": len(bad),
            "worst_slack": worst_slack(recs),
            "tightest": tight.to_dict() if tight else None,
            "violating": [r.to_dict() for r in bad[:5]],
        })
    return out


def run_full_audit(chain: MarkovChain, config: AuditConfig = AuditConfig()) -> AuditReport:
    """Run the selected suites at the computed (or overridden) constants.

    Suites whose curvature constant is not positive are skipped and noted.
    The report is deterministic for a fixed seed: trial generators are
    counter-seeded and reductions are order-preserving.
    """
    from .semigroup import check_gamma_commutation, check_sqrt_commutation
    from .transport import hj_check

    suites = set(config.suites)
    notes = [
        "transport-information constants follow the displayed inequalities; "
        "the 1/C^2 convention differs from the named constants by sqrt(2)-type factors",
        "weak exponential form uses the exact convex dual coefficient C/2",
    ]
    dg = graph_distance(chain)
    need_dgamma = bool({"cd", "ti_th", "diameter"} & suites)
    dgam = d_gamma(chain, threads=config.threads) if need_dgamma else None

    constants: dict[str, float | None] = {}
    kappa = config.kappa
    if kappa is None and {"cd", "commutation", "ti_th", "diameter"} & suites:
        kappa = cd_curvature(chain, config.threads).global_value
    kappa_e = config.kappa_e
    if kappa_e is None and {"cde", "commutation", "weak_ti_th"} & suites:
        kappa_e = cde_curvature_upper(chain, starts=config.cde_starts,
                                      seed=config.seed, threads=config.threads).global_value
    kappa_c = config.kappa_c
    if kappa_c is None and {"coarse", "ti_th", "diameter"} & suites:
        kappa_c = coarse_ricci(chain, dg, threads=config.threads).global_value
    constants["kappa"] = kappa
    constants["kappa_e"] = kappa_e
    constants["kappa_c"] = kappa_c

    def positive(v) -> bool:
        return v is not None and v > POSITIVE_CURVATURE_FLOOR

    records: list[AuditRecord] = []
    skipped: list[str] = []

    if "cd" in suites:
        if positive(kappa):
            records += audit_cd_suite(chain, kappa, config.trials, config.seed,
                                      dg=dg, dgam=dgam)
        else:
            skipped.append("cd")
    if "cde" in suites:
        if positive(kappa_e):
            records += audit_cde_suite(chain, kappa_e, config.trials, config.seed, dg=dg)
        else:
            skipped.append("cde")
    if "coarse" in suites:
        if positive(kappa_c):
            records += audit_coarse_suite(chain, kappa_c, config.trials, config.seed, dg=dg)
        else:
            skipped.append("coarse")
    if "commutation" in suites:
        fields = [np.random.default_rng([config.seed, 3000 + i]).standard_normal(chain.n)
                  for i in range(config.commutation_fields)]
        pos_fields = [np.exp(f) for f in fields]
        if positive(kappa):
            records += check_gamma_commutation(chain, kappa, fields,
                                               config.commutation_t_grid)
        if positive(kappa_e):
            records += check_sqrt_commutation(chain, kappa_e, pos_fields,
                                              config.commutation_t_grid)
        if not positive(kappa) and not positive(kappa_e):
            skipped.append("commutation")
    if "hj" in suites:
        t_grid = np.linspace(config.hj_t_span[0], config.hj_t_span[1],
                             config.hj_t_points)
        for i in range(config.hj_fields):
            g = np.random.default_rng([config.seed, 4000 + i]).normal(
                0.0, 1.0, size=chain.n)
            records += hj_check(g, dg, t_grid)
    if "ti_th" in suites:
        ran = False
        if positive(kappa):
            records += ti_implies_th_check(
                chain, kappa / math.sqrt(2.0), dgam, config.lambda_grid,
                config.trials, config.seed, route="cd_gamma_ball",
                gamma_ball=True)
            ran = True
        if positive(kappa_c):
            records += ti_implies_th_check(
                chain, kappa_c, dg, config.lambda_grid,
                config.trials, config.seed, route="coarse_graph_distance")
            ran = True
        if not ran:
            skipped.append("ti_th")
    if "weak_ti_th" in suites:
        if positive(kappa_e):
            c_weak = kappa_e / math.sqrt(2.0 * chain.laziness)
            records += weak_ti_th_check(chain, c_weak, config.trials,
                                        config.seed, dg=dg)
        else:
            skipped.append("weak_ti_th")
    if "diameter" in suites:
        ran = False
        if positive(kappa):
            records += diameter_bound(chain, kappa / math.sqrt(2.0), dgam,
                                      kappa=kappa, dg=dg)
            ran = True
        if positive(kappa_c):
            records += diameter_bound(chain, kappa_c, dg)
            ran = True
        if not ran:
            skipped.append("diameter")
    if "t2_blowup" in suites and chain.n >= 2:
        # scale the grid so it sits below the smaller block mass; on the
        # two-point chain the scale factor is exactly one
        blocks = ([0], list(range(1, chain.n)))
        scale = 2.0 * min(float(chain.pi[0]), float(chain.pi[1:].sum()))
        records += t2_blowup_demo(chain, blocks,
                                  [h * scale for h in config.blowup_h_grid], dg=dg)

    for name in skipped:
        notes.append(f"suite {name} skipped: curvature constant not positive")

    return AuditReport(
        chain_info={"states": list(chain.states), "n": chain.n,
                    "laziness": chain.laziness},
        constants=constants,
        suite_summaries=_summarize(records),
        notes=notes,
        config=config.to_dict(),
        records=records,
    )
