#!/usr/bin/env python3
"""Independent oracle for mean-reverting Gaussian diffusion moments.

Integrates the moment ODEs  dm/dt = -mu*m,  dv/dt = -2*mu*v + 2*mu  with RK4
and prints values used as frozen constants in tests, next to the closed forms
m(t) = x0*exp(-mu t), v(t) = 1 - exp(-2 mu t) they must agree with.
"""
import math


def rk4(f, y0, t1, steps=200000):
    y = list(y0)
    h = t1 / steps
    t = 0.0
    for _ in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, [y[i] + h / 2 * k1[i] for i in range(len(y))])
        k3 = f(t + h / 2, [y[i] + h / 2 * k2[i] for i in range(len(y))])
        k4 = f(t + h, [y[i] + h * k3[i] for i in range(len(y))])
        y = [y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(len(y))]
        t += h
    return y


def moments(mu, x0, t):
    f = lambda _t, y: [-mu * y[0], -2 * mu * y[1] + 2 * mu]
    return rk4(f, [x0, 0.0], t)


for (mu, x0, t, label) in [
    (1.0, 2.0, 1.0, "mu=1 x0=2 t=1"),
    (1.0, 1.0, math.log(2.0), "mu=1 x0=1 t=ln2"),
    (1.0, 0.0, 40.0, "stationary (t=40)"),
]:
    m, v = moments(mu, x0, t)
    mc, vc = x0 * math.exp(-mu * t), 1 - math.exp(-2 * mu * t)
    print(f"{label}: ode mean={m:.12f} var={v:.12f}  closed mean={mc:.12f} var={vc:.12f}")

# two-time covariance of the limit: Cov(X(s),X(t)) = e^{-mu(t-s)}(1-e^{-2 mu s}), X(0)=0
s, t, mu = 0.5, 1.0, 1.0
print(f"cov(s=0.5,t=1,mu=1) = {math.exp(-mu*(t-s))*(1-math.exp(-2*mu*s)):.12f}")
