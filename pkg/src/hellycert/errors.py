"""Exception types shared across the package."""


class HellycertError(Exception):
    """Base class for all package-specific failures."""


class InvalidMatrix(HellycertError):
    """Matrix input is malformed (not square, not finite, wrong shape)."""


class IllConditioned(HellycertError):
    """Linear solve rejected because the condition number is too large."""


class SolverStall(HellycertError):
    """Simplex iteration limit hit without reaching a terminal status."""


class EmptyBody(HellycertError):
    """A polytope that was expected to be nonempty turned out infeasible."""


class NotInterior(HellycertError):
    """A point that must lie strictly inside a body does not."""


class DegenerateInterior(HellycertError):
    """The intersection of the family has (numerically) no interior."""


class UnboundedBody(HellycertError):
    """An operation that needs a bounded set met an unbounded one."""


class Outside(HellycertError):
    """Gauge evaluation at a point outside the admissible cone."""


class DegenerateSpan(HellycertError):
    """Input points do not span the ambient space."""


class JohnExtractionFailed(HellycertError):
    """Contact-point extraction left residuals above tolerance."""


class BarrierStuck(HellycertError):
    """No admissible vector in a barrier step of the sparsifier."""


class ShiftCertificateFailed(HellycertError):
    """Every retry of the shifted decomposition failed its certificate."""


class CaratheodoryFailed(HellycertError):
    """Could not express the target as a small convex combination."""


class OracleTooLarge(HellycertError):
    """Brute-force oracle request exceeds its hard combinatorial caps."""


class SharpnessGenFailed(HellycertError):
    """Sharpness instance generation exhausted its resampling budget."""


class InvalidInstance(HellycertError):
    """Instance file fails schema or consistency validation."""
