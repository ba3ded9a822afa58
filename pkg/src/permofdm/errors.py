"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Input array has a length or shape the operation cannot accept."""


class FramingError(ValueError):
    """Sample block is in the wrong framing state (cyclic prefix present/absent)."""


class SingularChannelError(ValueError):
    """Channel frequency response has an exactly-zero bin and no floor was requested."""


class KeyFormatError(ValueError):
    """Key material is missing, too short, or not decodable."""


class IqFormatError(ValueError):
    """Binary IQ file is truncated or not a whole number of complex samples."""


class BruteForceCostError(ValueError):
    """Exhaustive permutation search refused; carries the keyspace size in bits."""

    def __init__(self, size: int, bits: float):
        self.size = size
        self.bits = bits
        super().__init__(
            f"exhaustive search over {size}! permutations refused: "
            f"keyspace is {bits:.1f} bits (limit is size <= 8)"
        )


class AmbiguousMatchWarning(UserWarning):
    """Two candidate matches were closer than the tolerance; assignment is arbitrary."""
