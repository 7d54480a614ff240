"""Central numeric tolerances.

Modules and tests refer to these by name so that a threshold is pinned in
exactly one place.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-12        # Hermitian symmetry defect
    norm: float = 1e-10        # unit vectors, trace one, mu(I) = 1
    recon: float = 1e-10       # eigendecomposition reconstruction
    orth: float = 1e-10        # pairwise orthonormality
    psd: float = 1e-10         # density-operator positivity slack
    effect: float = 1e-10      # effect spectrum slack outside [0, 1]
    commute: float = 1e-10     # commutator norm for compatibility
    prob: float = 1e-12        # collapse probability floor
    povm: float = 1e-10        # POVM completeness
    additivity: float = 1e-8   # measure linearity probes
    gpm: float = 1e-9          # axiom-audit pass threshold
    unit3: float = 1e-12       # unit 3-vector norm
    column: float = 1e-12      # likelihood columns sum to one
    match: float = 1e-10       # sufficiency / ancillarity / proportionality
    dist: float = 1e-12        # probability vectors sum to one
    wf_norm: float = 1e-8      # wave-function normalization


TOL = Tolerances()
