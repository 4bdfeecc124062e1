"""Casimir energies, forces and free energies for canonical geometries.

Three independent computational routes are provided and cross-checked
against each other:

* ``lifshitz`` -- parallel-plate energies from reflection coefficients,
  at zero and finite temperature (Matsubara sums),
* ``pfa`` -- the proximity force approximation and its derivative
  (gradient-of-height) corrections for gently curved surfaces,
* ``scattering`` -- round-trip scattering determinants for scalar
  sphere-sphere / sphere-plate geometries and the electromagnetic
  dipole (Casimir-Polder) limit,

plus ``edges`` for strip and perpendicular half-plane geometries and
``thermal`` for finite-temperature orchestration.

Internally everything uses natural units hbar = c = k_B = 1: lengths in
an arbitrary unit L0, wavenumbers/frequencies/temperatures in 1/L0, and
energies in hbar*c/L0 (per-area in hbar*c/L0^3, and so on).  The command
line front end (``casimir.cli``) optionally converts SI inputs at the
boundary.
"""

__version__ = "0.1.0"
