"""Division sequences c -> c/q or p*c + 1, and the abelian groups they present.

Submodules:

- ``numth``: factorization and exponent vectors over a prime basis
- ``dynamics``: orbits, cycles and class censuses
- ``lattice``: Hermite and Smith forms with membership certificates
- ``presentation``: harvested relations, kernel certificates, quotient reports
- ``deduce``: a rule engine over a persistent fact store
"""

from . import deduce, dynamics, lattice, numth, presentation
from .dynamics import Budget, SequenceParams, census, orbit
from .errors import DivseqError
from .presentation import HarvestConfig, harvest, kernel_member, quotient_report

__version__ = "0.1.0"

__all__ = [
    "deduce", "dynamics", "lattice", "numth", "presentation",
    "Budget", "SequenceParams", "census", "orbit", "DivseqError",
    "HarvestConfig", "harvest", "kernel_member", "quotient_report",
]
