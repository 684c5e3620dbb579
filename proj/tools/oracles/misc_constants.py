#!/usr/bin/env python3
"""Oracle for assorted frozen test constants.

- Poisson(100) upper-tail mass beyond 2n (initial-state truncation probability)
- interarrival squared coefficient of variation c_a^2 for Erlang-2 and uniform laws
- perturbation certificate eps * e^{cT} sample values
- transient infinite-server mean (1-e^{-mu t}) * lambda/mu via the ODE dE/dt = lambda - mu E
"""
import math


def poisson_tail_above(mean, cut):
    # P(X > cut), summed from above with log pmf; stop when negligible
    total = 0.0
    for k in range(cut + 1, cut + 2000):
        total += math.exp(-mean + k * math.log(mean) - math.lgamma(k + 1))
    return total


print(f"P(Poisson(100) > 200) = {poisson_tail_above(100.0, 200):.3e}")

# c_a^2 = Var / mean^2 of the interarrival law
print(f"Erlang-2 c_a^2 = {2/(2.0**2):.6f}")           # k/rate^2 over (k/rate)^2 = 1/k
a, b = 0.0, 2.0                                        # uniform(0,2), mean 1
print(f"Uniform(0,2) c_a^2 = {((b-a)**2/12)/1.0:.6f}")

print(f"gronwall eps=0.1 c=1 T=2 -> {0.1*math.exp(2.0):.10f}")

# transient M/M/inf mean from empty start, RK4 on dE/dt = lambda - mu E
lam, mu, t1 = 5.0, 1.0, 1.0
E, steps = 0.0, 100000
h = t1 / steps
for _ in range(steps):
    k1 = lam - mu * E
    k2 = lam - mu * (E + h / 2 * k1)
    k3 = lam - mu * (E + h / 2 * k2)
    k4 = lam - mu * (E + h * k3)
    E += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
closed = lam / mu * (1 - math.exp(-mu * t1))
print(f"transient mean lam=5 mu=1 t=1: ode={E:.10f} closed={closed:.10f}")
