"""Mean of ln|x - y| over pairs of axis-aligned grid cells.

For two cubes of side h whose lattice offset is k (in units of h), the
mean of ln|x - y| over x in one cube and y in the other equals
ln h + m_d(k) with m_d depending only on the dimension and the offset.
The average of the kernel ln(T/|x - y|) over the same pair is therefore
ln T - ln h - m_d(k), which is what the covariance assembly uses.

Evaluation goes through the Frullani representation

    ln s = (1/2) * int_0^inf (e^{-u} - e^{-u s^2}) / u du,

so the pair mean only needs E exp(-u|x - y|^2), which factorizes over
axes into one-dimensional Gaussian integrals against the triangular
weight on [k-1, k+1] (the density of the difference of two independent
uniform coordinates).  Those have erf/expm1 closed forms.  The outer
u-integral uses a fixed Gauss-Legendre panel rule on [0, 60] plus an
analytic algebraic tail, so whole offset tables evaluate vectorized.
Non-integer offsets (needed when cell sizes differ between grids) fall
back to adaptive quadrature per offset.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from .errors import QuadratureError

_SQRT_PI = float(np.sqrt(np.pi))
_U_CUT = 60.0


def _triangle_gauss(k, u):
    """int_{k-1}^{k+1} (1 - |t - k|) e^{-u t^2} dt, vectorized in k and u."""
    su = np.sqrt(u)

    def piece(a, b, c0, c1):
        t0, t1 = k + a, k + b
        lin = (c0 - c1 * k) * 0.5 * _SQRT_PI / su * (erf(su * t1) - erf(su * t0))
        # expm1 keeps the difference accurate at small u: the leading 1's
        # cancel exactly instead of drowning the O(u) part in rounding
        gau = c1 * (-0.5 / u) * (np.expm1(-u * t1**2) - np.expm1(-u * t0**2))
        return lin + gau

    return piece(-1.0, 0.0, 1.0, 1.0) + piece(0.0, 1.0, 1.0, -1.0)


def _panel_rule() -> tuple[np.ndarray, np.ndarray]:
    edges = np.geomspace(1e-9, _U_CUT, 40)
    edges = np.concatenate([[0.0], edges[1:]])
    x, w = np.polynomial.legendre.leggauss(32)
    nodes = np.concatenate(
        [0.5 * (b - a) * x + 0.5 * (a + b) for a, b in zip(edges[:-1], edges[1:])]
    )
    weights = np.concatenate([0.5 * (b - a) * w for a, b in zip(edges[:-1], edges[1:])])
    return nodes, weights


_U_NODES, _U_WEIGHTS = _panel_rule()


def _algebraic_tail(ks) -> float:
    """int_{U}^inf prod_i phi(k_i, u) / u du for an all-small offset row.

    Beyond the cutoff, phi(0, u) = sqrt(pi) u^{-1/2} - u^{-1} and
    phi(1, u) = u^{-1}/2 up to exponentially small terms, while any
    component >= 2 makes the whole product negligible.  The product is a
    polynomial in u^{-1/2}; each power integrates in closed form.  The
    returned value carries the sign with which it enters the main
    integral (the integrand is (e^{-u} - prod)/u and e^{-U_CUT} ~ 1e-27).
    """
    poly = {0: 1.0}
    for k in ks:
        term = {1: _SQRT_PI, 2: -1.0} if k == 0 else {2: 0.5}
        newp: dict[int, float] = {}
        for p1, c1 in poly.items():
            for p2, c2 in term.items():
                newp[p1 + p2] = newp.get(p1 + p2, 0.0) + c1 * c2
        poly = newp
    return sum(-c * (2.0 / p) * _U_CUT ** (-p / 2) for p, c in poly.items())


def unit_pair_log_mean(offsets: np.ndarray) -> np.ndarray:
    """Mean of ln|x-y| over two unit cubes at each integer offset row.

    offsets -- (m, d) array of nonnegative integer lattice offsets.
    Returns an (m,) array.  Accurate to ~1e-11 absolute.
    """
    kmat = np.atleast_2d(np.asarray(offsets))
    if np.any(kmat < 0):
        raise ValueError("offsets must be componentwise nonnegative")
    m, d = kmat.shape
    u = _U_NODES[None, :]
    prod = np.ones((m, _U_NODES.size))
    for j in range(d):
        prod *= _triangle_gauss(kmat[:, j : j + 1].astype(float), u)
    main = ((np.exp(-u) - prod) / u) @ _U_WEIGHTS
    tail = np.array(
        [_algebraic_tail(row) if np.all(row < 2) else 0.0 for row in kmat]
    )
    return 0.5 * (main + tail)


_REAL_CACHE: dict[tuple[float, ...], float] = {}


def unit_pair_log_mean_real(offset: tuple[float, ...]) -> float:
    """Adaptive-quadrature variant for a single, possibly non-integer offset."""
    key = tuple(float(abs(k)) for k in offset)
    if key in _REAL_CACHE:
        return _REAL_CACHE[key]

    def f(u):
        p = 1.0
        for k in key:
            p *= _triangle_gauss(k, u)
        return (np.exp(-u) - p) / u

    i1, e1 = quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    i2, e2 = quad(f, 1.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    if e1 + e2 > 1e-8:
        raise QuadratureError(
            f"pair log-mean quadrature error {e1 + e2:.2e} at offset {key}"
        )
    val = 0.5 * (i1 + i2)
    _REAL_CACHE[key] = val
    return val


def pair_log_mean_table(dims: tuple[int, ...], block: int = 2048) -> np.ndarray:
    """Dense table of unit_pair_log_mean over all offsets 0..dims[i]-1.

    Returns an array of shape dims; entry [k] is the pair mean at offset k.
    Covariance assembly then reads table[abs(i - j)] for index tuples i, j.
    """
    grids = np.meshgrid(*[np.arange(n) for n in dims], indexing="ij")
    flat = np.stack([g.ravel() for g in grids], axis=1)
    out = np.empty(flat.shape[0])
    for start in range(0, flat.shape[0], block):
        out[start : start + block] = unit_pair_log_mean(flat[start : start + block])
    return out.reshape(dims)


def self_log_mean(d: int) -> float:
    """Mean of ln|x-y| over a single unit cube in dimension d (offset 0)."""
    return float(unit_pair_log_mean(np.zeros((1, d), dtype=int))[0])
