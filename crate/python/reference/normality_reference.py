"""Reference Anderson-Darling and Lilliefors values for the Rust test suite.

Samples come from a SplitMix64 stream so both sides build them bit-for-bit
(up to libm rounding in log/cos). Statistics and p-values are computed with
statsmodels, an implementation independent of the Rust code.

    python3 python/reference/normality_reference.py
"""

import math

import numpy as np
from statsmodels.stats.diagnostic import lilliefors
from statsmodels.stats._adnorm import normal_ad

MASK = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def uniforms(seed, count):
    out = []
    for _ in range(count):
        seed, x = splitmix64(seed)
        out.append((x >> 11) * 2.0**-53)
    return out


def normal_sample(seed, n):
    u = uniforms(seed, 2 * n)
    return [math.sqrt(-2.0 * math.log1p(-u[2 * k])) * math.cos(2.0 * math.pi * u[2 * k + 1])
            for k in range(n)]


def exponential_sample(seed, n):
    return [-math.log1p(-u) for u in uniforms(seed, n)]


def uniform_sample(seed, n):
    return uniforms(seed, n)


CASES = [
    ("normal", 20240601, 1000),
    ("normal", 11, 20),
    ("exponential", 7, 1000),
    ("exponential", 5, 30),
    ("uniform", 3, 60),
]

if __name__ == "__main__":
    makers = {"normal": normal_sample, "exponential": exponential_sample, "uniform": uniform_sample}
    for kind, seed, n in CASES:
        x = np.array(makers[kind](seed, n))
        a2, p = normal_ad(x)
        d, p_lf = lilliefors(x, dist="norm", pvalmethod="approx")
        print(f"{kind:12s} seed={seed:<9d} n={n:<5d} A2={a2!r} p_ad={p!r} D={d!r} p_lf={p_lf!r}")
