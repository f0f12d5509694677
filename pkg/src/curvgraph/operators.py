"""Generator, carre du champ and iterated forms.

All operators act on fields given as one value per state, aligned with the
chain's state order.  Everything here is pure and cheap: dense O(n^2) per
evaluation, which is the natural cost on a dense kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import MarkovChain
from .errors import DegenerateForm, NonPositiveField

POSITIVITY_FLOOR = 1e-12


def generator_apply(chain: MarkovChain, f: np.ndarray) -> np.ndarray:
    """L f (x) = sum_y (f(y) - f(x)) K(x, y); annihilates constants."""
    f = np.asarray(f, dtype=float)
    return chain.kernel @ f - f


def gamma(chain: MarkovChain, f: np.ndarray, g: np.ndarray | None = None) -> np.ndarray:
    """Gamma(f, g)(x) = 1/2 sum_y (f(y)-f(x)) (g(y)-g(x)) K(x, y).

    Computed from the pairwise differences directly rather than by expanding
    the products, which avoids cancellation between large terms.
    """
    f = np.asarray(f, dtype=float)
    g = f if g is None else np.asarray(g, dtype=float)
    df = f[None, :] - f[:, None]
    dg = g[None, :] - g[:, None]
    return 0.5 * np.einsum("xy,xy,xy->x", chain.kernel, df, dg)


def gamma2(chain: MarkovChain, f: np.ndarray) -> np.ndarray:
    """Iterated form Gamma_2(f) = 1/2 L Gamma(f) - Gamma(f, L f)."""
    f = np.asarray(f, dtype=float)
    return 0.5 * generator_apply(chain, gamma(chain, f)) - gamma(chain, f, generator_apply(chain, f))


def gamma2_tilde(chain: MarkovChain, f: np.ndarray, floor: float = POSITIVITY_FLOOR) -> np.ndarray:
    """Modified form Gamma_2(f) - Gamma(f, Gamma(f)/f) for strictly positive f.

    Zeros of f make the correction term blow up, so fields at or below the
    positivity floor are rejected instead of regularized.
    """
    f = np.asarray(f, dtype=float)
    if (f < floor).any():
        raise NonPositiveField(f"field must be >= {floor} everywhere")
    return gamma2(chain, f) - gamma(chain, f, gamma(chain, f) / f)


def two_ball(chain: MarkovChain, x: int) -> np.ndarray:
    """Sorted indices of the radius-2 ball around x in the support graph."""
    nbr = lambda z: set(np.nonzero(chain.kernel[z] > 0)[0].tolist()) - {z}
    b1 = nbr(x)
    b2: set[int] = set()
    for y in b1:
        b2 |= nbr(y)
    return np.array(sorted({x} | b1 | b2), dtype=int)


@dataclass(frozen=True)
class LocalForms:
    """Quadratic forms of Gamma and Gamma_2 at one state, over its 2-ball.

    For any field f, with u = f[support], the identities
    u @ gamma_form @ u == Gamma(f)(center) and
    u @ gamma2_form @ u == Gamma_2(f)(center) hold exactly: values outside
    the 2-ball cannot enter either form.
    """

    center: int
    support: np.ndarray
    gamma_form: np.ndarray
    gamma2_form: np.ndarray
    local_kernel: np.ndarray

    def __post_init__(self):
        for a in (self.support, self.gamma_form, self.gamma2_form, self.local_kernel):
            a.setflags(write=False)


def _gamma_form_row(ks: np.ndarray, yi: int) -> np.ndarray:
    """Form matrix of f -> Gamma(f)(y) on the restricted index set."""
    m = ks.shape[0]
    a = np.zeros((m, m))
    for j in range(m):
        w = ks[yi, j]
        if j == yi or w <= 0:
            continue
        v = np.zeros(m)
        v[j] = 1.0
        v[yi] = -1.0
        a += 0.5 * w * np.outer(v, v)
    return a


def local_forms(chain: MarkovChain, x: int) -> LocalForms:
    """Assemble the Gamma and Gamma_2 quadratic forms at state x.

    Both are built by explicit expansion over the 2-ball.  Rows of the
    restricted kernel are complete for the centre and its neighbours, which
    is all the assembly touches.
    """
    support = two_ball(chain, x)
    m = len(support)
    loc = {int(s): i for i, s in enumerate(support)}
    xi = loc[x]
    ks = chain.kernel[np.ix_(support, support)]

    a_x = _gamma_form_row(ks, xi)

    # 1/2 L Gamma(f)(x) as a form: 1/2 sum_y K(x,y) (A_y - A_x)
    b = np.zeros((m, m))
    for j in range(m):
        w = ks[xi, j]
        if j == xi or w <= 0:
            continue
        b += 0.5 * w * (_gamma_form_row(ks, j) - a_x)
    # Gamma(f, Lf)(x) as a form, symmetrized
    gen = ks - np.eye(m)
    c = np.zeros((m, m))
    for j in range(m):
        w = ks[xi, j]
        if j == xi or w <= 0:
            continue
        v = np.zeros(m)
        v[j] = 1.0
        v[xi] = -1.0
        c += 0.5 * w * np.outer(v, gen[j] - gen[xi])
    c = 0.5 * (c + c.T)
    if not np.isfinite(b).all() or not np.isfinite(c).all():
        raise DegenerateForm("local form assembly produced non-finite entries")
    return LocalForms(center=x, support=support, gamma_form=a_x,
                      gamma2_form=b - c, local_kernel=ks)
