class PolysumError(Exception):
    """Base class for all errors raised by the package."""


class ContractError(PolysumError, ValueError):
    """A precondition of an operation was violated by the caller."""


class IntegrityError(PolysumError):
    """An internal consistency check failed (bug or non-simple input)."""


class EnumerationCapError(PolysumError):
    def __init__(self, ncols: int, cap: int):
        super().__init__(f"{ncols} columns exceeds the enumeration cap of {cap}")
        self.ncols = ncols
        self.cap = cap


class NoVerticesError(PolysumError):
    def __init__(self, name: str = ""):
        super().__init__(f"no vertices{': ' + name if name else ''}")


class PerturbationError(PolysumError):
    def __init__(self, schedule):
        super().__init__(f"no simple feasible perturbation found; tried eps = {schedule}")
        self.schedule = list(schedule)


class GenerationError(PolysumError):
    def __init__(self, attempts: int, stats: dict):
        super().__init__(f"instance generation gave up after {attempts} attempts: {stats}")
        self.attempts = attempts
        self.stats = stats


class ConstructionError(PolysumError):
    """A walk construction could not be completed."""
