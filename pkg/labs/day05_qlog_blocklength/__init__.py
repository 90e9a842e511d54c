"""
Day 05: Finite-Blocklength Limits with the q-Logarithm

Exact and approximate source-coding limits for finite-alphabet memoryless sources:
- Moments and cumulants of self-information (entropy, varentropy, skewness)
- q-logarithm algebra with the dynamic scaling law 1 - q_n = alpha / n
- Exact limits from the full law of the information density
- Normal, Edgeworth and q-algebraic closed-form bounds
- Monte Carlo checks of centralization and term scaling orders
"""
