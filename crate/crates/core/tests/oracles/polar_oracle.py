"""Independent oracle for the state-(2) system (O-POLAR / O-ANGLE).

Parametrizes the reflected shock through P0 by the angle of its normal and
closes the jump relations in the normal direction, then imposes the wedge
slip condition.  This route shares no code or parametrization with the crate,
which solves for the state-(2) speed along the wedge.

Run: python3 polar_oracle.py > ../golden/polar_gamma2_rho0_1_rho1_2.json
"""
import hashlib
import json
import sys

import mpmath as mp
import numpy as np

mp.mp.dps = 40

GAMMA, RHO0, RHO1 = mp.mpf(2), mp.mpf(1), mp.mpf(2)


def h(r):
    return (r ** (GAMMA - 1) - 1) / (GAMMA - 1)


U1 = mp.sqrt(2 * (RHO1 - RHO0) * (h(RHO1) - h(RHO0)) / (RHO1 + RHO0))
XI0 = RHO1 * U1 / (RHO1 - RHO0)


def p0(theta):
    return mp.matrix([XI0, XI0 * mp.tan(theta)])


def rho2_of_normal(n1):
    """Non-trivial density behind a shock with upstream normal speed n1."""
    m = RHO1 * n1

    def f(r):
        return (m / r) ** 2 / 2 + h(r) - n1 ** 2 / 2 - h(RHO1)

    # compressive root lies in (RHO1, big); f > 0 far right, f < 0 just right of RHO1
    lo = RHO1 * (1 + mp.mpf(10) ** -30)
    if f(lo) >= 0:
        return None
    hi = RHO1 * 2
    while f(hi) < 0:
        hi *= 2
    return mp.findroot(f, (lo, hi), solver="anderson")


def state2(theta, beta):
    """State (2) for shock normal angle beta; returns (u2, v2, rho2) or None."""
    P = p0(theta)
    d1 = mp.matrix([U1 - P[0], -P[1]])
    nu = mp.matrix([mp.cos(beta), mp.sin(beta)])
    n1 = d1[0] * nu[0] + d1[1] * nu[1]
    r2 = rho2_of_normal(n1)
    if r2 is None:
        return None
    n2 = RHO1 * n1 / r2
    d2 = d1 + (n2 - n1) * nu
    vel = P + d2
    return vel[0], vel[1], r2


def slip(theta, beta):
    s = state2(theta, beta)
    if s is None:
        return None
    u2, v2, _ = s
    return u2 * mp.sin(theta) - v2 * mp.cos(theta)


def slip_np(theta, betas):
    """float64 vectorised slip residual for scanning (nan where no shock)."""
    g, r0, r1 = float(GAMMA), float(RHO0), float(RHO1)
    u1, xi0 = float(U1), float(XI0)
    P = np.array([xi0, xi0 * np.tan(theta)])
    nu = np.stack([np.cos(betas), np.sin(betas)])
    d1 = np.array([u1 - P[0], -P[1]])
    n1 = d1 @ nu
    m = r1 * n1
    hh = lambda r: (r ** (g - 1) - 1) / (g - 1)
    f = lambda r: (m / r) ** 2 / 2 + hh(r) - n1 ** 2 / 2 - hh(r1)
    lo = np.full_like(n1, r1 * (1 + 1e-12))
    ok = f(lo) < 0
    hi = np.full_like(n1, 2 * r1)
    for _ in range(200):
        bad = ok & (f(hi) < 0)
        if not bad.any():
            break
        hi = np.where(bad, hi * 2, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        neg = f(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    r2 = 0.5 * (lo + hi)
    n2 = m / r2
    vel = P[:, None] + d1[:, None] + (n2 - n1) * nu
    out = vel[0] * np.sin(theta) - vel[1] * np.cos(theta)
    forward = vel[0] * np.cos(theta) + vel[1] * np.sin(theta) >= 0
    return np.where(ok & forward, out, np.nan)


BETAS = np.linspace(-np.pi / 2 + 1e-9, np.pi / 2 - 1e-9, 100_001)


def roots(theta):
    """All slip roots in beta, refined in high precision."""
    theta = mp.mpf(theta)
    vals = slip_np(float(theta), BETAS)
    found = []
    for k in range(len(BETAS) - 1):
        a, b = vals[k], vals[k + 1]
        if np.isnan(a) or np.isnan(b):
            continue
        if a == 0 or a * b < 0:
            found.append(mp.findroot(lambda bb: slip(theta, bb),
                                     (mp.mpf(BETAS[k]), mp.mpf(BETAS[k + 1])),
                                     solver="anderson"))
    # close pairs hidden inside one scan cell: refine discrete |g| minima
    for k in range(1, len(BETAS) - 1):
        a, b, c = vals[k - 1], vals[k], vals[k + 1]
        if np.isnan(a) or np.isnan(b) or np.isnan(c):
            continue
        if abs(b) < abs(a) and abs(b) < abs(c) and a * b > 0 and b * c > 0:
            ext = extremum(theta, mp.mpf(BETAS[k - 1]), mp.mpf(BETAS[k + 1]))
            if ext is not None and ext[1] * b <= 0:
                found.append(ext[0])
    sols = []
    for beta in found:
        u2, v2, r2 = state2(theta, beta)
        if r2 > RHO1:
            sols.append((r2, u2, v2, beta))
    sols.sort(key=lambda s: s[0])
    return sols


def extremum(theta, lo, hi):
    gr = (mp.sqrt(5) - 1) / 2
    f = lambda bb: slip(theta, bb)
    if f(lo) is None or f(hi) is None:
        return None
    sgn = 1 if f((lo + hi) / 2) > 0 else -1
    a, b = lo, hi
    for _ in range(200):
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        if sgn * f(c) < sgn * f(d):
            b = d
        else:
            a = c
    x = (a + b) / 2
    return x, f(x)


def exists(theta):
    return len(roots(theta)) > 0


def mach_weak(theta):
    s = roots(theta)
    r2, u2, v2, _ = s[0]
    P = p0(mp.mpf(theta))
    return mp.sqrt((P[0] - u2) ** 2 + (P[1] - v2) ** 2) / mp.sqrt(r2 ** (GAMMA - 1))


def bisect(pred, lo, hi, tol):
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def main():
    # O-ANGLE: existence over 10^4 angles, then bisection at the boundary
    grid = np.linspace(1e-4, np.pi / 2 - 1e-4, 10_000)
    flags = []
    for th in grid:
        v = slip_np(th, BETAS[::25])
        ok = np.isfinite(v)
        s = np.sign(v[ok])
        flags.append(bool((s[:-1] * s[1:] < 0).any()))
    first = flags.index(True)
    theta_d = bisect(exists, mp.mpf(grid[first - 1]), mp.mpf(grid[first]), mp.mpf(1e-12))
    theta_s = bisect(lambda t: mach_weak(t) > 1, theta_d + mp.mpf(1e-7),
                     mp.pi / 2 - mp.mpf(1e-4), mp.mpf(1e-12))
    cases = {}
    for label, th in [("60deg", mp.radians(60)), ("80deg", mp.radians(80)),
                      ("85deg", mp.radians(85)),
                      ("half_pi_minus_1e-3", mp.pi / 2 - mp.mpf(1e-3))]:
        s = roots(th)
        P = p0(th)
        row = {}
        for name, (r2, u2, v2, _) in zip(("weak", "strong"), (s[0], s[-1])):
            q2 = mp.sqrt(u2 ** 2 + v2 ** 2)
            mach = mp.sqrt((P[0] - u2) ** 2 + (P[1] - v2) ** 2) / mp.sqrt(r2 ** (GAMMA - 1))
            row[name] = {"q2": float(q2), "rho2": float(r2), "pseudo_mach": float(mach)}
        row["theta_rad"] = float(th)
        row["root_count"] = len(s)
        cases[label] = row
    out = {
        "params": {"gamma": 2.0, "rho0": 1.0, "rho1": 2.0},
        "theta_d": float(theta_d),
        "theta_s": float(theta_s),
        "cases": cases,
    }
    out["config_hash"] = hashlib.sha256(json.dumps(out["params"], sort_keys=True).encode()).hexdigest()[:16]
    json.dump(out, sys.stdout, indent=2, sort_keys=True)
    print()


if __name__ == "__main__":
    main()
