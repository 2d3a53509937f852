"""Monte Carlo toolkit for beta-ensemble largest-eigenvalue tails and
exponential last passage percolation.

Modules
-------
core_rand   splittable deterministic random streams and base samplers
tridiag     symmetric tridiagonal / bidiagonal types and the eigen machinery
ensembles   Hermite and Laguerre samplers, scalings, couplings
profiles    test-vector profiles, quadratic-form statistics, Riccati walk
lpp         last-passage engine: passage times, geodesics, geometry
stats       Monte Carlo drivers, tail fits, KS test, rate function, LIL
cli         batch command-line entry point
"""

__version__ = "0.1.0"
