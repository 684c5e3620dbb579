#!/usr/bin/env python3
"""Oracle: quantiles of the Kolmogorov distribution K(x) = 1 - 2*sum (-1)^{k-1} e^{-2 k^2 x^2}.

Freezes the one-sample KS acceptance multipliers c_alpha with
P(sqrt(R) * D > c_alpha) = alpha for large R.
"""
import math


def kolmogorov_sf(x):
    if x <= 0:
        return 1.0
    s = 0.0
    for k in range(1, 200):
        s += (-1) ** (k - 1) * math.exp(-2.0 * k * k * x * x)
    return 2.0 * s


def quantile(alpha):
    lo, hi = 0.01, 5.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kolmogorov_sf(mid) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


for a in (0.10, 0.05, 0.01, 0.001):
    print(f"alpha={a}: c = {quantile(a):.6f}")

# two-sample factor: D_{m,n} * sqrt(mn/(m+n)) has the same limit law
print("two-sample uses the same quantiles with effective sqrt(mn/(m+n))")
