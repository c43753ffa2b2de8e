"""Model domains: the interval (-1, 1) and the square (-1, 1)^2."""

from dataclasses import dataclass

INTERVAL = "interval"
SQUARE = "square"


@dataclass(frozen=True)
class Domain:
    kind: str

    def __post_init__(self):
        if self.kind not in (INTERVAL, SQUARE):
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def interval(cls):
        return cls(INTERVAL)

    @classmethod
    def square(cls):
        return cls(SQUARE)

    @property
    def dim(self):
        return 1 if self.kind == INTERVAL else 2

    @property
    def measure(self):
        # |(-1,1)| = 2, |(-1,1)^2| = 4
        return 2.0 ** self.dim
