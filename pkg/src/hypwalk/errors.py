"""Exception types shared across the library.

The split mirrors how callers are expected to react: ``InputError`` means the
caller passed something malformed and should fix it, ``ResourceError`` means a
configured budget (degree cap, census cap) was exhausted and carries whatever
partial data was computed, ``UnsupportedError`` marks operations that are
deliberately out of scope for a given model.
"""

from __future__ import annotations


class InputError(ValueError):
    """Malformed argument: broken metric oracle, bad generator index, etc."""


class UnsupportedError(NotImplementedError):
    """The requested computation has no exact meaning for this model."""


class ResourceError(RuntimeError):
    """A configured cap was hit.  ``payload`` holds partial results."""

    def __init__(self, message: str, payload=None):
        super().__init__(message)
        self.payload = payload


class BadPrimeSignal(RuntimeError):
    """Internal retry signal: modular arithmetic hit an unlucky prime.

    Raised when a composed coordinate triple collapses to zero mod p, or when
    two coefficient primes disagree about a degree.  Trial runners catch this
    and recompute the trial at fresh primes.
    """

    def __init__(self, message: str, prime: int | None = None):
        super().__init__(message)
        self.prime = prime
