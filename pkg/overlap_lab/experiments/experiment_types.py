"""
Experiment Type Definitions

This module defines the CLI commands and the verification experiments.
"""

from enum import Enum


class Command(Enum):
    """CLI subcommands."""
    SAMPLE = "sample"
    OVERLAP_HIST = "overlap-hist"
    VERIFY = "verify"

    @classmethod
    def from_string(cls, value: str) -> 'Command':
        """Create Command from string."""
        key = value.lower().strip().replace('_', '-')
        for command in cls:
            if command.value == key:
                return command
        raise ValueError(f"Unknown command: {value}")


class Experiment(Enum):
    """Verification experiments run by `verify`."""
    SCHUR = "schur"
    IDENTITIES = "identities"
    QUENCHED_OV11 = "quenched-ov11"
    QUENCHED_OV12 = "quenched-ov12"
    QUENCHED_TRACE = "quenched-trace"
    DECOMPOSITION_KS = "decomposition-ks"
    KOSTLAN = "kostlan"
    LIMIT_LAW = "limit-law"
    INTEGRALS = "integrals"
    INVARIANCE = "invariance"

    @property
    def description(self) -> str:
        """Get one-line description."""
        descriptions = {
            Experiment.SCHUR: 'Schur reconstruction and unitarity residuals',
            Experiment.IDENTITIES: 'Overlap row sums, diagonal bound and mixed-trace identity',
            Experiment.QUENCHED_OV11: 'Conditional mean of O_11 against its closed form',
            Experiment.QUENCHED_OV12: 'Conditional mean of O_12 against its closed form',
            Experiment.QUENCHED_TRACE: 'Conditional mean of tr G G*/N against its closed form',
            Experiment.DECOMPOSITION_KS: 'Recurrence O_11 against the product of independent factors',
            Experiment.KOSTLAN: 'Squared eigenvalue moduli against independent radii',
            Experiment.LIMIT_LAW: 'Origin-conditioned O_11/N against the inverse-gamma_2 law',
            Experiment.INTEGRALS: 'Normalization constants and vector-law identities',
            Experiment.INVARIANCE: 'Band medians of quenched O_11 across the plane',
        }
        return descriptions[self]

    @property
    def is_matrix_level(self) -> bool:
        """True when the suite samples full matrices rather than triangular factors."""
        return self in (Experiment.SCHUR, Experiment.IDENTITIES, Experiment.KOSTLAN,
                        Experiment.INVARIANCE)

    @classmethod
    def from_string(cls, value: str) -> 'Experiment':
        """Create Experiment from string ('quenched-ov11' or 'quenched_ov11')."""
        key = value.lower().strip().replace('_', '-')
        for experiment in cls:
            if experiment.value == key:
                return experiment
        raise ValueError(f"Unknown experiment: {value}")
