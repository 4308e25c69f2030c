"""Topological field constructions and invariant verification on periodic
grids: Hopf-fibration electromagnetic fields, monopole potential patches,
curl eigenfields, helicity/Chern-Simons functionals, field-line topology
and contact-geometric identities."""

__version__ = "0.1.0"
