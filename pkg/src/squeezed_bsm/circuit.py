"""Bell states, the measurement circuits, and per-state detection tables.

The passive circuit mixes the two rails of each qubit pair on 50-50
beamsplitters; the boosted circuit adds a single-mode squeezer on every
output arm, and the lossy circuit further inserts a transmission-eta
channel in front of each detector.  A DetectionTable collects, for each
input Bell state, the conditional probability of every photon-count
pattern the detectors can report.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

from .fock import Ket, Occupation
from .ops import (
    LossParams,
    SqueezeParams,
    TruncationPolicy,
    apply_beamsplitter,
    apply_loss,
    apply_squeeze,
)

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

N_DETECTED_MODES = 4

# Extra headroom used while constructing lossy states: photons above the
# detector ceiling can fall back below it by losing photons, so the state
# is built two levels higher and cut back after the loss channels.
LOSS_CONSTRUCTION_MARGIN = 2


class BellLabel(enum.Enum):
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"
    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"


# Fixed declaration order; used for prior weighting and tie-breaking.
BELL_ORDER: tuple[BellLabel, ...] = (
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
)

# Uniform prior over the four input states.
BELL_PRIOR = 0.25

_BELL_TERMS = {
    BellLabel.PSI_PLUS: (((1, 0, 0, 1), _INV_SQRT2), ((0, 1, 1, 0), _INV_SQRT2)),
    BellLabel.PSI_MINUS: (((1, 0, 0, 1), _INV_SQRT2), ((0, 1, 1, 0), -_INV_SQRT2)),
    BellLabel.PHI_PLUS: (((1, 0, 1, 0), _INV_SQRT2), ((0, 1, 0, 1), _INV_SQRT2)),
    BellLabel.PHI_MINUS: (((1, 0, 1, 0), _INV_SQRT2), ((0, 1, 0, 1), -_INV_SQRT2)),
}


def bell_state(label: BellLabel) -> Ket:
    """The dual-rail Bell state on 4 modes (modes 1&2 and 3&4 are the qubits)."""
    return Ket.from_terms(4, _BELL_TERMS[label])


def passive_bsm(ket: Ket) -> Ket:
    """Beamsplitters between modes 1&3 and modes 2&4 (0-indexed: 0&2, 1&3)."""
    if ket.modes != 4:
        raise ValueError(f"passive circuit expects a 4-mode ket, got {ket.modes}")
    return apply_beamsplitter(apply_beamsplitter(ket, 0, 2), 1, 3)


@dataclass(frozen=True)
class CircuitParams:
    """Full parameter set of the boosted circuit.

    One squeezer per detected mode, a uniform detector transmission eta,
    and the truncation policy (PNR ceiling).  The main configuration is
    uniform squeezing at phase zero; per-mode intensities exist for the
    coarse non-uniform scan only.
    """

    squeezers: tuple[SqueezeParams, SqueezeParams, SqueezeParams, SqueezeParams]
    eta: float = 1.0
    policy: TruncationPolicy = TruncationPolicy()

    def __post_init__(self):
        if len(self.squeezers) != N_DETECTED_MODES:
            raise ValueError("exactly four per-mode squeezer settings required")
        if not (0.0 <= self.eta <= 1.0):
            raise ValueError(f"eta={self.eta} outside [0, 1]")

    @classmethod
    def uniform(cls, r: float, n_max: int | None = None, eta: float = 1.0,
                ) -> "CircuitParams":
        """Identical squeezing intensity r on all four modes, phase 0."""
        sq = SqueezeParams(r, 0.0)
        return cls(squeezers=(sq, sq, sq, sq), eta=eta,
                   policy=TruncationPolicy(n_max=n_max))

    @classmethod
    def per_mode(cls, rs: tuple[float, float, float, float],
                 n_max: int | None = None, eta: float = 1.0) -> "CircuitParams":
        sqs = tuple(SqueezeParams(r, 0.0) for r in rs)
        return cls(squeezers=sqs, eta=eta, policy=TruncationPolicy(n_max=n_max))

    @property
    def r_values(self) -> tuple[float, ...]:
        return tuple(s.r for s in self.squeezers)

    @property
    def is_uniform(self) -> bool:
        rs = self.r_values
        return all(r == rs[0] for r in rs) and all(s.phi == 0.0 for s in self.squeezers)


@dataclass(frozen=True)
class DetectionTable:
    """Per Bell state, the conditional pattern probabilities P(pattern | state).

    ``deficits`` holds, per state, the probability mass removed by finite
    construction and detector saturation (1 minus the stored sum).
    """

    params: CircuitParams
    probs: dict[BellLabel, dict[Occupation, float]]
    deficits: dict[BellLabel, float]

    def patterns(self) -> list[Occupation]:
        """Union of patterns over all labels, lexicographically sorted."""
        pats: set[Occupation] = set()
        for table in self.probs.values():
            pats.update(table)
        return sorted(pats)

    def weighted(self, pattern: Occupation) -> dict[BellLabel, float]:
        """Prior-weighted probabilities q = P(pattern|state)/4 per label."""
        return {label: BELL_PRIOR * self.probs[label].get(pattern, 0.0)
                for label in BELL_ORDER}

    def label_sum(self, label: BellLabel) -> float:
        return math.fsum(self.probs[label].values())

    @property
    def total_weighted_deficit(self) -> float:
        return math.fsum(BELL_PRIOR * self.deficits[label] for label in BELL_ORDER)

    # -- serialization ------------------------------------------------

    def to_json_obj(self) -> dict:
        n_max = self.params.policy.n_max
        return {
            "circuit": {
                "r": list(self.params.r_values),
                "phi": [s.phi for s in self.params.squeezers],
                "eta": self.params.eta,
                "n_max": "inf" if n_max is None else n_max,
            },
            "labels": {
                label.value: {
                    "sum": self.label_sum(label),
                    "deficit": self.deficits[label],
                    "patterns": [{"n": list(pat), "p": p}
                                 for pat, p in sorted(self.probs[label].items())],
                }
                for label in BELL_ORDER
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "DetectionTable":
        circ = obj["circuit"]
        n_max = circ["n_max"]
        params = CircuitParams(
            squeezers=tuple(SqueezeParams(r, phi)
                            for r, phi in zip(circ["r"], circ["phi"])),
            eta=circ["eta"],
            policy=TruncationPolicy(n_max=None if n_max == "inf" else int(n_max)),
        )
        probs: dict[BellLabel, dict[Occupation, float]] = {}
        deficits: dict[BellLabel, float] = {}
        for label in BELL_ORDER:
            entry = obj["labels"][label.value]
            probs[label] = {tuple(row["n"]): row["p"] for row in entry["patterns"]}
            deficits[label] = entry["deficit"]
        return cls(params=params, probs=probs, deficits=deficits)

    @classmethod
    def loads(cls, text: str) -> "DetectionTable":
        return cls.from_json_obj(json.loads(text))

    def to_csv(self) -> str:
        lines = ["label,n1,n2,n3,n4,probability"]
        for label in BELL_ORDER:
            for pat, p in sorted(self.probs[label].items()):
                lines.append(f"{label.value},{pat[0]},{pat[1]},{pat[2]},{pat[3]},{p!r}")
        return "\n".join(lines) + "\n"


def build_detection_table(params: CircuitParams) -> DetectionTable:
    """Run the circuit for all four Bell states and tabulate the patterns.

    Pipeline per state: passive beamsplitter stage, one squeezer per mode,
    then (for eta < 1) a loss channel per detected mode with the state
    built two ceiling levels high, a cut back to the detector ceiling, and
    finally pattern probabilities marginalized over the loss modes.
    """
    ceiling = params.policy.ceiling
    lossy = params.eta < 1.0
    build_policy = params.policy
    if lossy and build_policy.rule == "detector-matched":
        build_policy = TruncationPolicy(
            n_max=ceiling + LOSS_CONSTRUCTION_MARGIN, rule=build_policy.rule)
    detected = range(N_DETECTED_MODES)
    probs: dict[BellLabel, dict[Occupation, float]] = {}
    deficits: dict[BellLabel, float] = {}
    for label in BELL_ORDER:
        ket = passive_bsm(bell_state(label))
        for mode in detected:
            ket = apply_squeeze(ket, mode, params.squeezers[mode], build_policy)
        if lossy:
            loss = LossParams(params.eta)
            for mode in detected:
                ket = apply_loss(ket, mode, loss)
        ket = ket.truncate(ceiling, detected)
        table = ket.pattern_probabilities(detected)
        probs[label] = table
        deficits[label] = 1.0 - math.fsum(table.values())
    return DetectionTable(params=params, probs=probs, deficits=deficits)


def table_dump(table: DetectionTable, fmt: str = "json") -> str:
    """Serialize a detection table ('json' or 'csv'), deterministically ordered."""
    if fmt == "json":
        return table.dumps()
    if fmt == "csv":
        return table.to_csv()
    raise ValueError(f"unknown table format {fmt!r}")
