"""
jcells: exact computations with rank one idempotents on finite equivariant
sets, unipotent centralizers in classical groups, representation rings of
disconnected groups, block matrix models over Laurent rings, and rigid
pairings of affine Hecke cocentres.

Usage:
    python -m jcells --help
"""

__version__ = "0.1.0"
