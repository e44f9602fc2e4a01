"""Classical mechanics in Hilbert space: Weyl-Wigner calculus, odot products,
Groenewold quasidensity operators and truncated semiquantum evolution."""

__version__ = "0.1.0"
