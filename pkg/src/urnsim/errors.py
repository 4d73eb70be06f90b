"""Exception types shared across the package."""


class UrnError(Exception):
    """Base class for all urnsim errors."""


class ValidationError(UrnError):
    """A kernel or initial configuration failed validation."""


class NonStochasticRow(ValidationError):
    def __init__(self, row, total):
        self.row = row
        self.total = total
        super().__init__(f"row {row} sums to {total!r}, expected 1 within 1e-12")


class NegativeWeight(ValidationError):
    pass


class BlockLeak(ValidationError):
    def __init__(self, row, mass):
        self.row = row
        self.mass = mass
        super().__init__(f"row {row} places mass {mass!r} outside its own block")


class ColorOutOfSpace(UrnError):
    pass


class NotErgodic(UrnError):
    pass


class InfiniteSupport(UrnError):
    pass


class TooLarge(UrnError):
    pass


class IrrationalWeights(UrnError):
    pass


class EmptyStructure(UrnError):
    pass


class TooFewSamples(UrnError):
    pass


class EmptyInput(UrnError):
    pass


class SupportMismatch(UrnError):
    pass


class DegenerateFit(UrnError):
    pass


class UnsupportedKernel(UrnError):
    pass


class ConfigError(UrnError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class UnknownSuite(UrnError):
    pass
