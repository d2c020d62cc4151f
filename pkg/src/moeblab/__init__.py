"""moeblab: covering complexity of dynamical systems and Mobius correlations.

A library plus CLI for desk-scale experiments: Mobius sieving and
pretentious distances, typical-factorization sets and bilinear Mobius
averages, continued fractions with certified best-approximation bounds,
Fourier cocycles and coboundary splits over circle rotations, concrete
dynamical systems with averaged orbit metrics, covering-number complexity
profiles, and end-to-end Mobius-orbit correlation experiments.
"""

__version__ = "0.1.0"
