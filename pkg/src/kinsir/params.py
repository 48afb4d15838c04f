"""Model parameters shared by all three tiers of the toolkit."""

from dataclasses import dataclass, fields

from .errors import ValidationError

_NONNEGATIVE = ("d1", "d2", "d3", "beta", "k", "r", "chi0")
_POSITIVE = ("sigma1", "sigma2", "sigma3", "vmax")
_SCALING = ("q1", "q2", "q3", "p")


@dataclass(frozen=True)
class ModelParams:
    """Rates and scaling exponents of the virus dynamics model.

    d1, d2, d3   natural death rates of healthy cells, infected cells, virus
    beta         infection rate
    k            virus production rate by infected cells
    r            constant production rate of healthy cells
    sigma1..3    velocity relaxation rates of the three kinetic populations
    chi0         strength of the velocity bias toward the infected gradient
    q1, q2, q3   relaxation scaling exponents (integers >= 1)
    p            perturbation scaling exponent (integer >= 1)
    vmax         velocity domain half-width, V = [-vmax, vmax]

    Reaction rates may be zero (pure transport/diffusion configurations);
    relaxation rates and vmax must be positive.
    """

    d1: float
    d2: float
    d3: float
    beta: float
    k: float
    r: float
    sigma1: float = 1.0
    sigma2: float = 1.0
    sigma3: float = 1.0
    chi0: float = 0.0
    q1: int = 1
    q2: int = 1
    q3: int = 1
    p: int = 1
    vmax: float = 1.0

    def __post_init__(self):
        for name in _NONNEGATIVE:
            if not getattr(self, name) >= 0:
                raise ValidationError(f"{name} must be >= 0")
        for name in _POSITIVE:
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0")
        for name in _SCALING:
            value = getattr(self, name)
            if not (isinstance(value, int) and value >= 1):
                raise ValidationError(
                    f"{name} must be an integer >= 1 (q_i >= 1, p >= 1)"
                )

    def sigma(self, species):
        """Relaxation rate of species i in {1, 2, 3}."""
        return (self.sigma1, self.sigma2, self.sigma3)[species - 1]

    def q(self, species):
        """Relaxation scaling exponent of species i in {1, 2, 3}."""
        return (self.q1, self.q2, self.q3)[species - 1]

    def replace(self, **changes):
        """Copy with some fields changed, revalidating the result."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ModelParams(**values)
