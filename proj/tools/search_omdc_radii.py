#!/usr/bin/env python3
"""Offline max-min search for the on-axis MDC constellation radii.

Each radius r_i contributes the antipodal pair +-r_i on the real or the
imaginary axis.  The objective is min over point pairs of |dR^2 - dI^2|
at unit mean energy.  Nelder-Mead restarts over every axis pattern find the
basin, then an SLSQP epigraph polish pins the optimum to ~1e-15.

Usage: search_omdc_radii.py [q ...]   (default: 4 8)
"""
import itertools
import sys

import numpy as np
from scipy.optimize import minimize


def points(r, axes):
    p = []
    for ri, ax in zip(r, axes):
        z = ri if ax == 0 else 1j * ri
        p += [z, -z]
    return np.array(p)


def gaps(r, axes):
    p = points(r, axes)
    d = p[:, None] - p[None, :]
    iu = np.triu_indices(len(p), 1)
    d = d[iu]
    return np.abs(d.real**2 - d.imag**2)


def normalize(r, q):
    r = np.abs(r)
    return r * np.sqrt((q / 2) / np.sum(r**2))


def coarse(q, restarts=300, seed=0):
    n = q // 2
    best = None
    # the first circle sits on the real axis without loss of generality
    for axes in itertools.product([0, 1], repeat=n):
        if axes[0] != 0:
            continue
        rng = np.random.default_rng(seed)
        for _ in range(restarts):
            r0 = np.sort(rng.uniform(0.1, 2, n))
            res = minimize(lambda x: -gaps(normalize(x, q), axes).min(), r0, method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
            v = -res.fun
            if best is None or v > best[0] + 1e-12:
                best = (v, axes, normalize(res.x, q))
    return best


def polish(q, axes, r0, t0):
    n = q // 2
    cons = [{"type": "ineq", "fun": lambda x: gaps(x[:n], axes) - x[n]},
            {"type": "eq", "fun": lambda x: np.sum(x[:n]**2) - q / 2}]
    res = minimize(lambda x: -x[n], np.append(r0, t0), method="SLSQP", constraints=cons,
                   options={"ftol": 1e-15, "maxiter": 1000})
    r = np.sort(np.abs(res.x[:n]))
    return r, gaps(r, axes).min()


def main(argv):
    qs = [int(a) for a in argv] or [4, 8]
    np.set_printoptions(precision=15)
    for q in qs:
        v, axes, r = coarse(q)
        order = np.argsort(r)
        axes = tuple(int(a) for a in np.array(axes)[order])
        r, obj = polish(q, axes, r[order], v)
        print(f"q={q} axes={axes} radii={r} objective={obj:.15f}")


if __name__ == "__main__":
    main(sys.argv[1:])
