"""Sparse multimode Fock states.

States are stored as sparse maps from occupation vectors (one photon count
per mode) to complex amplitudes in the orthonormal number basis, i.e. the
sqrt(n!) normalization of (a^dag)^n |0> is already absorbed into the stored
amplitude.  Kets are immutable values: every operation returns a new Ket.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Iterator, Mapping

Occupation = tuple[int, ...]

# Amplitudes with modulus below this are dropped after every operation.
# Small enough that no detection probability at the tolerances used anywhere
# downstream is affected (|amp|^2 < 1e-30).
PRUNE_TOL = 1e-15


class Ket:
    """A pure multimode number-basis state with sparse complex amplitudes.

    Instances are treated as immutable; the amplitude map must not be
    mutated after construction.  Use :meth:`vacuum` or :meth:`from_terms`
    to build one.
    """

    __slots__ = ("modes", "_amps")

    def __init__(self, modes: int, amps: Mapping[Occupation, complex] | None = None):
        if modes < 1:
            raise ValueError(f"mode count must be >= 1, got {modes}")
        self.modes = modes
        self._amps: dict[Occupation, complex] = dict(amps) if amps else {}

    # -- construction -------------------------------------------------

    @classmethod
    def vacuum(cls, modes: int) -> "Ket":
        """All modes empty, amplitude 1."""
        return cls(modes, {(0,) * modes: 1.0 + 0.0j})

    @classmethod
    def from_terms(cls, modes: int,
                   terms: Iterable[tuple[Iterable[int], complex]]) -> "Ket":
        """Build a ket from (occupation, amplitude) pairs.

        Duplicate occupations are summed.  Occupations must all have length
        ``modes`` and non-negative counts; amplitudes must be finite.
        Negligible amplitudes are pruned.
        """
        amps: dict[Occupation, complex] = {}
        for occ, amp in terms:
            key = tuple(occ)
            if len(key) != modes:
                raise ValueError(f"occupation {key} has length {len(key)}, expected {modes}")
            if any(n < 0 for n in key):
                raise ValueError(f"negative photon count in {key}")
            amp = complex(amp)
            if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
                raise ValueError(f"non-finite amplitude for {key}")
            amps[key] = amps.get(key, 0.0) + amp
        return cls(modes, {k: a for k, a in amps.items() if abs(a) > PRUNE_TOL})

    @classmethod
    def _raw(cls, modes: int, amps: dict[Occupation, complex]) -> "Ket":
        """Trusted constructor for internal use: no validation, no copy."""
        ket = cls.__new__(cls)
        ket.modes = modes
        ket._amps = amps
        return ket

    # -- inspection ---------------------------------------------------

    @property
    def n_terms(self) -> int:
        return len(self._amps)

    def amplitude(self, occ: Iterable[int]) -> complex:
        return self._amps.get(tuple(occ), 0.0 + 0.0j)

    def items(self) -> Iterator[tuple[Occupation, complex]]:
        """Iterate terms in lexicographic occupation order (deterministic)."""
        for occ in sorted(self._amps):
            yield occ, self._amps[occ]

    def norm_sq(self) -> float:
        """Sum of squared amplitude moduli (0 for an empty ket)."""
        # fsum is correctly rounded, so the result does not depend on
        # the iteration order of the underlying dict.
        return math.fsum(abs(a) ** 2 for a in self._amps.values())

    def __repr__(self) -> str:
        return f"Ket(modes={self.modes}, n_terms={self.n_terms})"

    # -- operations ---------------------------------------------------

    def pattern_probabilities(self, detected_modes: Iterable[int]
                              ) -> dict[Occupation, float]:
        """Probabilities of photon-count patterns on a subset of modes.

        Terms agreeing on the detected modes are grouped and their squared
        moduli summed, which marginalizes over every undetected mode.

        Parameters
        ----------
        detected_modes : iterable of int
            0-based mode indices to observe; must be a non-empty subset of
            the ket's modes.
        """
        idx = sorted(set(detected_modes))
        if not idx:
            raise ValueError("detected_modes must be non-empty")
        if idx[0] < 0 or idx[-1] >= self.modes:
            raise ValueError(f"detected modes {idx} out of range for {self.modes} modes")
        groups: dict[Occupation, list[float]] = {}
        for occ, amp in self._amps.items():
            pattern = tuple(occ[i] for i in idx)
            groups.setdefault(pattern, []).append(abs(amp) ** 2)
        return {pat: math.fsum(vals) for pat, vals in sorted(groups.items())}

    def truncate(self, n_max: int | float, detected_modes: Iterable[int]) -> "Ket":
        """Drop every term whose count on any detected mode exceeds n_max.

        Counts on non-detected (loss) modes are unconstrained.  ``math.inf``
        is accepted as a no-op ceiling.
        """
        if n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {n_max}")
        if n_max == math.inf:
            return self
        idx = sorted(set(detected_modes))
        if idx and (idx[0] < 0 or idx[-1] >= self.modes):
            raise ValueError(f"detected modes {idx} out of range for {self.modes} modes")
        kept = {occ: amp for occ, amp in self._amps.items()
                if all(occ[i] <= n_max for i in idx)}
        return Ket._raw(self.modes, kept)

    # -- serialization ------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "modes": self.modes,
            "terms": [{"n": list(occ), "re": amp.real, "im": amp.imag}
                      for occ, amp in self.items()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Ket":
        terms = [(tuple(t["n"]), complex(t["re"], t["im"])) for t in obj["terms"]]
        return cls.from_terms(obj["modes"], terms)

    @classmethod
    def loads(cls, text: str) -> "Ket":
        return cls.from_json_obj(json.loads(text))


# Module-level aliases matching the operation-style API used elsewhere.

def vacuum(modes: int) -> Ket:
    return Ket.vacuum(modes)


def from_terms(modes: int, terms: Iterable[tuple[Iterable[int], complex]]) -> Ket:
    return Ket.from_terms(modes, terms)


def norm_sq(ket: Ket) -> float:
    return ket.norm_sq()


def pattern_probabilities(ket: Ket, detected_modes: Iterable[int]
                          ) -> dict[Occupation, float]:
    return ket.pattern_probabilities(detected_modes)


def truncate(ket: Ket, n_max: int | float, detected_modes: Iterable[int]) -> Ket:
    return ket.truncate(n_max, detected_modes)
