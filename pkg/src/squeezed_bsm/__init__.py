"""Exact Fock-space simulator of squeezing-boosted Bell state measurement."""

from .circuit import (
    BELL_ORDER,
    BellLabel,
    CircuitParams,
    DetectionTable,
    bell_state,
    build_detection_table,
    passive_bsm,
    table_dump,
)
from .discrimination import (
    DiscriminationResult,
    ErrorBudget,
    PatternClass,
    classify,
    confidence,
    psd_oracle,
    psd_select,
    usd_success,
)
from .fock import Ket
from .ops import (
    INF_MODEL_CEILING,
    LossParams,
    SqueezeParams,
    TruncationPolicy,
    apply_beamsplitter,
    apply_loss,
    apply_squeeze,
    squeeze_oracle,
)
from .sweep import (
    SINGULAR_R,
    EnvelopePoint,
    SweepPoint,
    SweepSpec,
    SweepSpecError,
    default_pe_budgets,
    envelope,
    nonuniform_scan,
    psd_sweep,
    usd_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BELL_ORDER",
    "BellLabel",
    "CircuitParams",
    "DetectionTable",
    "DiscriminationResult",
    "EnvelopePoint",
    "ErrorBudget",
    "INF_MODEL_CEILING",
    "Ket",
    "LossParams",
    "PatternClass",
    "SINGULAR_R",
    "SqueezeParams",
    "SweepPoint",
    "SweepSpec",
    "SweepSpecError",
    "TruncationPolicy",
    "apply_beamsplitter",
    "apply_loss",
    "apply_squeeze",
    "bell_state",
    "build_detection_table",
    "classify",
    "confidence",
    "default_pe_budgets",
    "envelope",
    "nonuniform_scan",
    "passive_bsm",
    "psd_oracle",
    "psd_select",
    "psd_sweep",
    "squeeze_oracle",
    "table_dump",
    "usd_success",
    "usd_sweep",
]
