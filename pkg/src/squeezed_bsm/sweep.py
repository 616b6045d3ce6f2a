"""Parameter sweeps, confidence envelopes, and deterministic file emission.

Sweeps walk a squeezing-intensity grid for lists of detector ceilings,
transmissions, and error budgets, producing one row per combination.  The
envelope reduces sweep rows to the best success probability available at
each measurement confidence.  All outputs are byte-deterministic for a
fixed input spec.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass, field, replace

from .circuit import CircuitParams, build_detection_table
from .discrimination import ErrorBudget, classify, psd_select, usd_success

# Squeezing value at which full destructive interference makes the
# two-photon pattern family unambiguous; injected into sweep grids so the
# discontinuous peak is reproducible.
SINGULAR_R = 0.5 * math.acosh(2.0)

R_GRID_MAX = 0.9

# Default coarse per-mode intensities for the non-uniform scan.
COARSE_SCAN_VALUES = (0.0, 0.15, 0.30, 0.45, 0.60, 0.6585, 0.75)

NONUNIFORM_SCAN_LIMIT = 10_000


class SweepSpecError(ValueError):
    """Raised when a sweep specification is invalid (CLI exit code 2)."""


def default_pe_budgets() -> tuple[float, ...]:
    """Error budgets: 40 per decade from 1e-4 to 1e-1, plus admit-all.

    The infinite budget ends each confidence curve at the maximum
    achievable declared-success probability.
    """
    budgets = [10.0 ** (-4.0 + k / 40.0) for k in range(121)]
    budgets.append(math.inf)
    return tuple(budgets)


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition for USD/PSD sweeps."""

    r_start: float = 0.0
    r_stop: float = 0.9
    r_step: float = 0.005
    n_max_values: tuple[int | None, ...] = (None,)
    eta_values: tuple[float, ...] = (1.0,)
    pe_max_values: tuple[float, ...] = (0.0,)
    include_singular: bool = True
    allow_coinflip: bool = False

    def __post_init__(self):
        if self.r_step <= 0.0:
            raise SweepSpecError(f"r step must be > 0, got {self.r_step}")
        if self.r_stop < self.r_start:
            raise SweepSpecError("r grid is empty (stop < start)")
        if not (0.0 <= self.r_start and self.r_stop <= R_GRID_MAX):
            raise SweepSpecError(f"r grid must lie within [0, {R_GRID_MAX}]")
        if not self.n_max_values:
            raise SweepSpecError("n_max list is empty")
        if not self.eta_values:
            raise SweepSpecError("eta list is empty")
        if not self.pe_max_values:
            raise SweepSpecError("pe_max list is empty")
        for eta in self.eta_values:
            if not (0.0 <= eta <= 1.0):
                raise SweepSpecError(f"eta={eta} outside [0, 1]")
        for pe in self.pe_max_values:
            if math.isnan(pe) or pe < 0.0:
                raise SweepSpecError(f"pe_max={pe} invalid")
        for n in self.n_max_values:
            if n is not None and n < 0:
                raise SweepSpecError(f"n_max={n} invalid")

    def r_values(self) -> tuple[float, ...]:
        count = int(round((self.r_stop - self.r_start) / self.r_step)) + 1
        values = []
        for k in range(count):
            r = round(self.r_start + k * self.r_step, 12)
            if r <= self.r_stop + 1e-12:
                values.append(min(r, self.r_stop))
        if self.include_singular and self.r_start <= SINGULAR_R <= self.r_stop:
            values.append(SINGULAR_R)
        return tuple(sorted(set(values)))


@dataclass(frozen=True)
class SweepPoint:
    """One sweep evaluation; column order matches the CSV schema."""

    r: float
    n_max: int | None
    eta: float
    pe_max: float
    p_s: float
    p_e: float
    alpha: float | None
    erasure: float
    n_selected: int
    deficit: float


CSV_HEADER = "r,n_max,eta,pe_max,p_s,p_e,alpha,erasure,n_selected,deficit"


def _n_max_key(n_max: int | None) -> tuple[int, int]:
    return (1, 0) if n_max is None else (0, n_max)


def _point_sort_key(p: SweepPoint):
    return (p.r, _n_max_key(p.n_max), p.eta, p.pe_max)


class _Progress:
    """Minimal elapsed/ETA reporter on stderr."""

    def __init__(self, total: int, label: str, enabled: bool):
        self.total = total
        self.label = label
        self.enabled = enabled and total > 0
        self.start = time.monotonic()
        self._last = 0.0

    def update(self, done: int) -> None:
        if not self.enabled:
            return
        now = time.monotonic()
        if done < self.total and now - self._last < 1.0:
            return
        self._last = now
        elapsed = now - self.start
        eta = elapsed / done * (self.total - done) if done else math.inf
        print(f"{self.label}: {done}/{self.total} "
              f"elapsed {elapsed:.1f}s eta {eta:.1f}s",
              file=sys.stderr, flush=True)


def _evaluate_cell(args) -> list[SweepPoint]:
    """Build one (r, n_max, eta) table and evaluate every budget on it."""
    r, n_max, eta, budgets, allow_coinflip = args
    params = CircuitParams.uniform(r, n_max=n_max, eta=eta)
    classes = classify(build_detection_table(params))
    points = []
    for pe_max in budgets:
        res = psd_select(classes, ErrorBudget(pe_max), allow_coinflip=allow_coinflip)
        points.append(SweepPoint(
            r=r, n_max=n_max, eta=eta, pe_max=pe_max,
            p_s=res.p_s, p_e=res.p_e, alpha=res.alpha, erasure=res.erasure,
            n_selected=res.n_selected, deficit=res.deficit))
    return points


def _run_cells(cells, workers: int, progress: _Progress) -> list[SweepPoint]:
    points: list[SweepPoint] = []
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for i, chunk in enumerate(pool.map(_evaluate_cell, cells), 1):
                points.extend(chunk)
                progress.update(i)
    else:
        for i, cell in enumerate(cells, 1):
            points.extend(_evaluate_cell(cell))
            progress.update(i)
    points.sort(key=_point_sort_key)
    return points


def psd_sweep(spec: SweepSpec, workers: int = 1,
              progress: bool = False) -> list[SweepPoint]:
    """One point per (r, n_max, eta, pe_max), sorted deterministically."""
    cells = [(r, n_max, eta, spec.pe_max_values, spec.allow_coinflip)
             for r in spec.r_values()
             for n_max in spec.n_max_values
             for eta in spec.eta_values]
    return _run_cells(cells, workers, _Progress(len(cells), "sweep", progress))


def usd_sweep(spec: SweepSpec, workers: int = 1,
              progress: bool = False) -> list[SweepPoint]:
    """Zero-error sweep: pe_max fixed at 0, one point per (r, n_max, eta)."""
    if any(pe != 0.0 for pe in spec.pe_max_values):
        spec = replace(spec, pe_max_values=(0.0,))
    return psd_sweep(spec, workers=workers, progress=progress)


# ---------------------------------------------------------------------------
# envelope
# ---------------------------------------------------------------------------

ALPHA_MIN = 0.25
ALPHA_MAX = 1.0
DEFAULT_ALPHA_BIN_WIDTH = 0.002


@dataclass(frozen=True)
class EnvelopePoint:
    """Best success probability among sweep points in one confidence bin."""

    alpha: float  # bin center
    p_s: float
    r: float
    pe_max: float


def envelope(points: list[SweepPoint],
             bin_width: float = DEFAULT_ALPHA_BIN_WIDTH) -> list[EnvelopePoint]:
    """Bin sweep points by confidence and keep the max-p_s point per bin.

    Bins cover [0.25, 1]; points with undefined confidence are skipped.
    Deterministic: on p_s ties the first point in sweep order wins.
    """
    if not points:
        raise SweepSpecError("cannot build an envelope from an empty sweep")
    if bin_width <= 0.0:
        raise SweepSpecError(f"bin width must be > 0, got {bin_width}")
    n_bins = max(1, math.ceil((ALPHA_MAX - ALPHA_MIN) / bin_width - 1e-12))
    best: dict[int, tuple[float, SweepPoint]] = {}
    for point in sorted(points, key=_point_sort_key):
        if point.alpha is None:
            continue
        alpha = min(max(point.alpha, ALPHA_MIN), ALPHA_MAX)
        idx = min(int((alpha - ALPHA_MIN) / bin_width), n_bins - 1)
        if idx not in best or point.p_s > best[idx][0]:
            best[idx] = (point.p_s, point)
    return [EnvelopePoint(alpha=ALPHA_MIN + (idx + 0.5) * bin_width,
                          p_s=ps, r=pt.r, pe_max=pt.pe_max)
            for idx, (ps, pt) in sorted(best.items())]


# ---------------------------------------------------------------------------
# non-uniform scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanEntry:
    rs: tuple[float, float, float, float]
    p_s: float

    @property
    def is_uniform(self) -> bool:
        return all(r == self.rs[0] for r in self.rs)


@dataclass(frozen=True)
class ScanReport:
    """Uniform-vs-non-uniform comparison over a coarse intensity grid."""

    entries: tuple[ScanEntry, ...]
    n_max: int | None

    @property
    def best_uniform(self) -> ScanEntry:
        return max((e for e in self.entries if e.is_uniform), key=lambda e: e.p_s)

    @property
    def best_nonuniform(self) -> ScanEntry | None:
        cands = [e for e in self.entries if not e.is_uniform]
        return max(cands, key=lambda e: e.p_s) if cands else None

    @property
    def nonuniform_outperforms(self) -> bool:
        """True if some non-uniform tuple beats every uniform tuple."""
        nu = self.best_nonuniform
        return nu is not None and nu.p_s > self.best_uniform.p_s

    def to_json_obj(self) -> dict:
        nu = self.best_nonuniform
        return {
            "n_max": "inf" if self.n_max is None else self.n_max,
            "n_points": len(self.entries),
            "best_uniform": {"r": list(self.best_uniform.rs),
                             "p_s": self.best_uniform.p_s},
            "best_nonuniform": None if nu is None else
                {"r": list(nu.rs), "p_s": nu.p_s},
            "nonuniform_outperforms": self.nonuniform_outperforms,
        }

    def to_csv(self) -> str:
        lines = ["r1,r2,r3,r4,p_s"]
        for e in self.entries:
            lines.append(",".join(repr(v) for v in e.rs) + f",{e.p_s!r}")
        return "\n".join(lines) + "\n"


def _scan_task(args) -> ScanEntry:
    rs, n_max = args
    params = CircuitParams.per_mode(rs, n_max=n_max)
    classes = classify(build_detection_table(params))
    return ScanEntry(rs=rs, p_s=usd_success(classes))


def nonuniform_scan(values: tuple[float, ...] = COARSE_SCAN_VALUES,
                    n_max: int | None = None, workers: int = 1,
                    progress: bool = False) -> ScanReport:
    """Zero-error success probability for every per-mode intensity tuple.

    Walks the full 4-fold product of ``values`` (uniform tuples are the
    diagonal) and reports whether any non-uniform tuple beats the best
    uniform one.
    """
    values = tuple(sorted(set(values)))
    if not values:
        raise SweepSpecError("scan value list is empty")
    total = len(values) ** 4
    if total > NONUNIFORM_SCAN_LIMIT:
        raise SweepSpecError(
            f"{total} scan points exceed the limit of {NONUNIFORM_SCAN_LIMIT}")
    tuples = sorted(itertools.product(values, repeat=4))
    prog = _Progress(total, "scan", progress)
    tasks = [(rs, n_max) for rs in tuples]
    entries: list[ScanEntry] = []
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for i, entry in enumerate(pool.map(_scan_task, tasks, chunksize=8), 1):
                entries.append(entry)
                prog.update(i)
    else:
        for i, task in enumerate(tasks, 1):
            entries.append(_scan_task(task))
            prog.update(i)
    entries.sort(key=lambda e: e.rs)
    return ScanReport(entries=tuple(entries), n_max=n_max)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _fmt_n_max(n_max: int | None) -> str:
    return "inf" if n_max is None else str(n_max)


def _fmt_budget(pe_max: float) -> str:
    return "inf" if math.isinf(pe_max) else repr(pe_max)


def points_to_csv(points: list[SweepPoint]) -> str:
    lines = [CSV_HEADER]
    for p in points:
        alpha = "" if p.alpha is None else repr(p.alpha)
        lines.append(f"{p.r!r},{_fmt_n_max(p.n_max)},{p.eta!r},"
                     f"{_fmt_budget(p.pe_max)},{p.p_s!r},{p.p_e!r},{alpha},"
                     f"{p.erasure!r},{p.n_selected},{p.deficit!r}")
    return "\n".join(lines) + "\n"


def points_from_csv(text: str) -> list[SweepPoint]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise SweepSpecError("unrecognized sweep CSV header")
    points = []
    for line in lines[1:]:
        (r, n_max, eta, pe_max, p_s, p_e, alpha,
         erasure, n_selected, deficit) = line.split(",")
        points.append(SweepPoint(
            r=float(r),
            n_max=None if n_max == "inf" else int(n_max),
            eta=float(eta),
            pe_max=math.inf if pe_max == "inf" else float(pe_max),
            p_s=float(p_s), p_e=float(p_e),
            alpha=None if alpha == "" else float(alpha),
            erasure=float(erasure), n_selected=int(n_selected),
            deficit=float(deficit)))
    return points


def points_to_json_obj(points: list[SweepPoint]) -> list[dict]:
    return [{
        "r": p.r, "n_max": _fmt_n_max(p.n_max) if p.n_max is None else p.n_max,
        "eta": p.eta,
        "pe_max": "inf" if math.isinf(p.pe_max) else p.pe_max,
        "p_s": p.p_s, "p_e": p.p_e, "alpha": p.alpha, "erasure": p.erasure,
        "n_selected": p.n_selected, "deficit": p.deficit,
    } for p in points]


def points_from_json_obj(rows: list[dict]) -> list[SweepPoint]:
    points = []
    for row in rows:
        n_max = row["n_max"]
        pe_max = row["pe_max"]
        points.append(SweepPoint(
            r=row["r"],
            n_max=None if n_max == "inf" else int(n_max),
            eta=row["eta"],
            pe_max=math.inf if pe_max == "inf" else float(pe_max),
            p_s=row["p_s"], p_e=row["p_e"], alpha=row["alpha"],
            erasure=row["erasure"], n_selected=row["n_selected"],
            deficit=row["deficit"]))
    return points


ENVELOPE_CSV_HEADER = "alpha,p_s,r,pe_max"


def envelope_to_csv(env: list[EnvelopePoint]) -> str:
    lines = [ENVELOPE_CSV_HEADER]
    for e in env:
        lines.append(f"{e.alpha!r},{e.p_s!r},{e.r!r},{_fmt_budget(e.pe_max)}")
    return "\n".join(lines) + "\n"


def envelope_to_json_obj(env: list[EnvelopePoint]) -> list[dict]:
    return [{
        "alpha": e.alpha, "p_s": e.p_s, "r": e.r,
        "pe_max": "inf" if math.isinf(e.pe_max) else e.pe_max,
    } for e in env]


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
