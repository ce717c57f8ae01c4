"""Time-dependent Hartree-Fock-Bogoliubov dynamics on a discrete momentum
torus, validated against an exact Fock-space oracle."""

__version__ = "0.1.0"
