"""Pure numpy kernels (reference backend).

All arguments are equal-shape float arrays.  Naming:

``p0..p4``  profile ρ and its r-derivatives
``s0..s3``  domain warp σ and its derivatives at r
``l0..l3``  target warp λ and its derivatives at ρ(r)

Every residual comes with a magnitude: the same expression evaluated with
absolute values of all summands.  ``eps * magnitude`` bounds (up to a small
factor) the rounding error of the residual, which matters because residuals
are differences of terms of size σ⁻⁴ near the poles.
"""

from __future__ import annotations

import numpy as np


def _recip(v):
    """``1/v`` with zero where ``v`` vanishes.

    Every ``1/λ`` term carries a factor ``c``; for ``c = 0`` a vanishing λ is
    harmless and must not turn the residual into NaN.
    """
    v = np.asarray(v, dtype=float)
    return np.divide(1.0, v, out=np.zeros_like(v), where=v != 0)


def _geometry(s0, s1, s2, s3, k, c):
    inv = 1.0 / s0
    q = s1 * inv
    a2 = s2 * inv
    q1 = a2 - q * q
    q2 = s3 * inv - 3.0 * q * a2 + 2.0 * q ** 3
    k2 = k * k
    inv2 = inv * inv
    w = c * c + k2 * inv2
    w1 = -2.0 * k2 * s1 * inv2 * inv
    w2 = -2.0 * k2 * s2 * inv2 * inv + 6.0 * k2 * s1 * s1 * inv2 * inv2
    mags = (
        np.abs(q),
        np.abs(a2) + q * q,
        np.abs(s3 * inv) + 3.0 * np.abs(q * a2) + 2.0 * np.abs(q) ** 3,
        c * c + k2 * inv2,
        np.abs(w1),
        2.0 * k2 * np.abs(s2 * inv2 * inv) + 6.0 * k2 * s1 * s1 * inv2 * inv2,
    )
    return (q, q1, q2, w, w1, w2), mags


def _target(l0, l1, l2, l3):
    mu = l0 * l1
    mu1 = l1 * l1 + l0 * l2
    mu2 = 3.0 * l1 * l2 + l0 * l3
    inv = _recip(l0)
    nu = l1 * inv
    b2 = l2 * inv
    nu1 = b2 - nu * nu
    nu2 = l3 * inv - 3.0 * nu * b2 + 2.0 * nu ** 3
    mags = (
        np.abs(mu),
        l1 * l1 + np.abs(l0 * l2),
        3.0 * np.abs(l1 * l2) + np.abs(l0 * l3),
        np.abs(nu),
        np.abs(b2) + nu * nu,
        np.abs(l3 * inv) + 3.0 * np.abs(nu * b2) + 2.0 * np.abs(nu) ** 3,
    )
    return (mu, mu1, mu2, nu, nu1, nu2), mags


def tension(p0, p1, p2, s0, s1, l0, l1, c, k):
    q = s1 / s0
    w = c * c + k * k / (s0 * s0)
    x = p2 + q * p1 - w * l0 * l1
    y = c * (2.0 * p1 * l1 * _recip(l0) + q)
    return x, y


def field_jets(p0, p1, p2, p3, p4, s0, s1, s2, s3, l0, l1, l2, l3, c, k):
    """Tension components with two r-derivatives each, plus magnitudes.

    Returns ``(vals, mags, geo, tgt, extra)``; ``vals`` is
    ``(x, x', x'', y, y', y'')`` and ``extra`` holds the magnitudes of the
    coefficients the residual formulas reuse.
    """
    (q, q1, q2, w, w1, w2), (qm, q1m, q2m, wm, w1m, w2m) = _geometry(s0, s1, s2, s3, k, c)
    (mu, mu1, mu2, nu, nu1, nu2), (mum, mu1m, mu2m, num, nu1m, nu2m) = _target(l0, l1, l2, l3)
    a1, a2, a3, a4 = np.abs(p1), np.abs(p2), np.abs(p3), np.abs(p4)

    m1 = mu1 * p1
    m2 = mu2 * p1 * p1 + mu1 * p2
    m1m = mu1m * a1
    m2m = mu2m * a1 * a1 + mu1m * a2
    n1 = nu1 * p1
    n2 = nu2 * p1 * p1 + nu1 * p2
    n1m = nu1m * a1
    n2m = nu2m * a1 * a1 + nu1m * a2

    x = p2 + q * p1 - w * mu
    x1 = p3 + q1 * p1 + q * p2 - w1 * mu - w * m1
    x2 = p4 + q2 * p1 + 2.0 * q1 * p2 + q * p3 - w2 * mu - 2.0 * w1 * m1 - w * m2
    xm = a2 + qm * a1 + wm * mum
    x1m = a3 + q1m * a1 + qm * a2 + w1m * mum + wm * m1m
    x2m = a4 + q2m * a1 + 2.0 * q1m * a2 + qm * a3 + w2m * mum + 2.0 * w1m * m1m + wm * m2m

    y = c * (2.0 * p1 * nu + q)
    y1 = c * (2.0 * (p2 * nu + p1 * n1) + q1)
    y2 = c * (2.0 * (p3 * nu + 2.0 * p2 * n1 + p1 * n2) + q2)
    ac = np.abs(c)
    ym = ac * (2.0 * a1 * num + qm)
    y1m = ac * (2.0 * (a2 * num + a1 * n1m) + q1m)
    y2m = ac * (2.0 * (a3 * num + 2.0 * a2 * n1m + a1 * n2m) + q2m)

    vals = (x, x1, x2, y, y1, y2)
    mags = (xm, x1m, x2m, ym, y1m, y2m)
    geo = (q, q1, q2, w, w1, w2)
    tgt = (mu, mu1, mu2, nu, nu1, nu2)
    return vals, mags, geo, tgt, (qm, wm, mum, mu1m, num)


def residual_simplified(p0, p1, p2, p3, p4, s0, s1, s2, s3, l0, l1, l2, l3, c, k):
    """Reduced biharmonic system.

    Returns ``x, y, res1, res2`` followed by the magnitudes of the same four.
    """
    vals, mags, geo, tgt, extra = field_jets(p0, p1, p2, p3, p4, s0, s1, s2, s3,
                                             l0, l1, l2, l3, c, k)
    x, x1, x2, y, y1, y2 = vals
    xm, x1m, x2m, ym, y1m, y2m = mags
    q, _, _, w, _, _ = geo
    mu, mu1, _, nu, _, _ = tgt
    qm, wm, mum, mu1m, num = extra

    res1 = x2 + q * x1 - w * mu1 * x - (2.0 * c * y1 + y * y) * mu
    c2 = c * c
    res2 = (c * y2 + y * y1 + 2.0 * c2 * nu * x1
            + 2.0 * c2 * (q * nu + p1 * mu1 * _recip(l0) ** 2) * x)

    ac = np.abs(c)
    mag1 = x2m + qm * x1m + wm * mu1m * xm + (2.0 * ac * y1m + ym * ym) * mum
    mag2 = (ac * y2m + ym * y1m + 2.0 * c2 * num * x1m
            + 2.0 * c2 * (qm * num + np.abs(p1) * mu1m * _recip(l0) ** 2) * xm)
    return x, y, res1, res2, xm, ym, mag1, mag2


def termsum_terms(p0, p1, p2, p3, p4, s0, s1, s2, s3, l0, l1, l2, l3, c, k):
    """The individual contributions of the coordinate biharmonic equation.

    Keys ending in ``1``/``2`` belong to the first/second target component.
    """
    vals, _, geo, tgt, _ = field_jets(p0, p1, p2, p3, p4, s0, s1, s2, s3,
                                      l0, l1, l2, l3, c, k)
    x, x1, x2, y, y1, y2 = vals
    q, _, _, w, _, _ = geo
    mu, mu1, _, nu, nu1, _ = tgt
    lpp = l0 * l2
    l1sq = l1 * l1
    b2 = l2 * _recip(l0)
    lap_phi1 = p2 + q * p1
    return {
        "laplace1": x2 + q * x1,
        "laplace2": y2 + q * y1,
        "grad1": -2.0 * c * mu * y1,
        "grad2": 2.0 * (c * x1 + p1 * y1) * nu,
        "lapphi1": -c * q * mu * y,
        "lapphi2": nu * (c * q * x + lap_phi1 * y),
        "dgamma1": -c * p1 * mu1 * y,
        "gammagamma1": -w * l1sq * x - c * p1 * l1sq * y,
        "dgamma2": c * p1 * nu1 * x + p1 * p1 * nu1 * y,
        "gammagamma2": c * p1 * nu * nu * x + p1 * p1 * nu * nu * y - w * l1sq * y,
        "curv1": -w * lpp * x + c * p1 * lpp * y,
        "curv2": c * p1 * b2 * x - p1 * p1 * b2 * y,
    }


def residual_termsum(p0, p1, p2, p3, p4, s0, s1, s2, s3, l0, l1, l2, l3, c, k):
    """Sum of the individual contributions.

    The reduced second equation equals ``c`` times the raw second component,
    so the raw sum is multiplied by ``c`` to put both routes on one scale.
    """
    t = termsum_terms(p0, p1, p2, p3, p4, s0, s1, s2, s3, l0, l1, l2, l3, c, k)
    r1 = (t["laplace1"] + t["grad1"] + t["lapphi1"] + t["dgamma1"]
          + t["gammagamma1"] + t["curv1"])
    r2 = (t["laplace2"] + t["grad2"] + t["lapphi2"] + t["dgamma2"]
          + t["gammagamma2"] + t["curv2"])
    return r1, c * r2


def obstruction(a, k, a1, r):
    """The trigonometric obstruction for linear sphere profiles and f', f'', f'''."""
    rho = a * r + a1
    s2r, c2r = np.sin(2.0 * r), np.cos(2.0 * r)
    s2p, c2p = np.sin(2.0 * rho), np.cos(2.0 * rho)
    s4p, c4p = np.sin(4.0 * rho), np.cos(4.0 * rho)
    K = k * k
    K2 = K * K
    A = 2.0 * K * a * a - 3.0 * K
    f0 = (a * s2r + A * s2p - (2.0 * K * a * a + K) * c2r * s2p
          + 2.0 * K * a * s2r * c2p + K2 * s2p * c2p)
    f1 = (2.0 * a * c2r + 2.0 * a * A * c2p + 2.0 * K * s2r * s2p
          + (2.0 * K * a - 4.0 * K * a ** 3) * c2r * c2p + 2.0 * K2 * a * c4p)
    f2 = (-4.0 * a * s2r - 4.0 * a * a * A * s2p
          + (8.0 * K * a ** 4 - 4.0 * K * a * a + 4.0 * K) * c2r * s2p
          + 8.0 * K * a ** 3 * s2r * c2p - 8.0 * K2 * a * a * s4p)
    f3 = (-8.0 * a * c2r - 8.0 * a ** 3 * A * c2p
          + (-32.0 * K * a ** 4 + 8.0 * K * a * a - 8.0 * K) * s2r * s2p
          + (16.0 * K * a ** 5 + 8.0 * K * a ** 3 + 8.0 * K * a) * c2r * c2p
          - 32.0 * K2 * a ** 3 * c4p)
    return f0, f1, f2, f3
