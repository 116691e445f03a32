#!/usr/bin/env python3
"""Arbitrary-precision reference values for the special-function tests.

Regenerate with:  python3 gen_refs.py > ../data/refs.json

Everything here is computed with mpmath at 50 significant digits using
direct definitions (power series, brute-force multi-index sums, adaptive
quadrature), independent of the Rust implementation.
"""
import json
import mpmath as mp

mp.mp.dps = 50


def logspace(lo, hi, n):
    return [float(mp.mpf(lo) * (mp.mpf(hi) / lo) ** (mp.mpf(i) / (n - 1))) for i in range(n)]


def erf_series(x):
    # erf(x) = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (1*3*...*(2n+1)), positive terms
    x = mp.mpf(x)
    term = x
    total = term
    n = 0
    while True:
        n += 1
        term = term * 2 * x * x / (2 * n + 1)
        total += term
        if term < total * mp.mpf(10) ** -45:
            break
    return 2 / mp.sqrt(mp.pi) * mp.exp(-x * x) * total


def j1_series(x):
    x = mp.mpf(x)
    return mp.nsum(lambda m: (-1) ** m * (x / 2) ** (2 * m + 1) / (mp.factorial(m) * mp.factorial(m + 1)), [0, mp.inf])


def i0_series(x):
    # plain summation; nsum's extrapolation is unreliable for large x
    q = mp.mpf(x) ** 2 / 4
    term, total, k = mp.mpf(1), mp.mpf(1), 0
    while term > total * mp.eps:
        k += 1
        term *= q / (k * k)
        total += term
    return total


def q_ref(s, x):
    return mp.gammainc(mp.mpf(s), mp.mpf(x), mp.inf, regularized=True)


def psi2_brute(x, y, nmax=60):
    x = mp.mpf(x)
    y = mp.mpf(y)
    total = mp.mpf(0)
    for m in range(nmax):
        for n in range(nmax):
            total += mp.factorial(m + n) * x ** m * y ** n / (
                mp.rf(2, m) * mp.factorial(n) * mp.factorial(m) * mp.factorial(n))
    return total


def psi2_deep(x, y):
    # same double series, truncated far enough that the tail is below 1e-40
    x = mp.mpf(x)
    y = mp.mpf(y)
    total = mp.mpf(0)
    for n in range(400):
        inner = mp.mpf(0)
        for m in range(400):
            t = mp.binomial(m + n, m) * x ** m / mp.factorial(m + 1)
            inner += t
            if m > 10 and abs(t) < mp.mpf(10) ** -45 * (abs(inner) + 1):
                break
        t = y ** n / mp.factorial(n) * inner
        total += t
        if n > 10 and abs(t) < mp.mpf(10) ** -45 * abs(total):
            break
    return total


def f4_brute(x1, x2, y1, y2, nmax=30):
    x1, x2, y1, y2 = map(mp.mpf, (x1, x2, y1, y2))
    f = [mp.factorial(i) for i in range(4 * nmax)]
    total = mp.mpf(0)
    for m in range(nmax):
        for k in range(nmax):
            for n in range(nmax):
                for l in range(nmax):
                    num = f[m + n] * f[k + l] * f[n + l] * x1 ** m * x2 ** k * y1 ** n * y2 ** l
                    den = f[n] * f[m + 1] * f[l] * f[k + 1] * f[m] * f[n] * f[k] * f[l]
                    total += num / den
    return total


def eta_integral(a, s):
    # coupling efficiency in normalised units t = rho / omega0
    a = mp.mpf(a)
    s = mp.mpf(s)
    b = 2 * mp.sqrt(a)
    f = lambda t: mp.besselj(1, b * t) * mp.exp(-(t - s) ** 2) * mp.exp(-2 * t * s) * mp.besseli(0, 2 * t * s)
    lo = max(mp.mpf(0), s - 14)
    pts = [lo] + [lo + (s + 14 - lo) * i / 40 for i in range(1, 41)]
    val = mp.quad(f, pts)
    return 8 * val ** 2


out = {}

out["erf"] = [[x, float(erf_series(x))] for x in logspace(1e-3, 6.0, 100)] + [[2.3696, float(erf_series(2.3696))]]
out["bessel_j1"] = [[x, float(j1_series(x))] for x in logspace(1e-3, 60.0, 100)]
out["bessel_j1_first_root"] = float(mp.besseljzero(1, 1))
out["bessel_i0"] = [[x, float(i0_series(x))] for x in logspace(1e-3, 700.0, 100)]
out["bessel_i0_scaled"] = [[x, float(mp.exp(-x) * mp.besseli(0, x))] for x in [100.0, 500.0, 700.0, 701.0, 1000.0, 1e4]]
gq = []
for s in [0.5, 1.0, 2.5, 5.0, 6.0, 10.0, 50.0, 201.0]:
    for x in logspace(1e-6, 100.0, 25):
        gq.append([s, x, float(q_ref(s, x))])
out["gamma_q"] = gq

out["psi2_brute_60"] = [[x, y, float(psi2_brute(x, y))] for (x, y) in [(-0.5, 0.25), (-1.0, 0.0), (-0.2, 0.8), (-1.0, 1.0)]]
out["psi2_deep"] = [[x, y, float(psi2_deep(x, y))] for (x, y) in [
    (-1.256431227014838, 1.0), (-5.0, 9.0), (-3.0, 4.0), (-0.05, 0.5), (-2.0, 0.0), (-0.5, 16.0), (-8.0, 2.0)]]
out["f4_brute_30"] = [[x1, x2, y1, y2, float(f4_brute(x1, x2, y1, y2))] for (x1, x2, y1, y2) in [
    (-0.3, -0.3, 0.2, 0.2), (-0.5, -0.1, 0.1, 0.25), (-1.0, -1.0, 0.05, 0.05)]]
out["eta_integral"] = [[a, s, float(eta_integral(a, s))] for (a, s) in [
    (1.256431227014838, 0.0), (0.05, 0.0), (1.0, 0.5), (1.256431227014838, 1.0), (5.0, 3.0), (0.3, 2.0), (2.5, 10.0)]]

print(json.dumps(out, indent=1))
