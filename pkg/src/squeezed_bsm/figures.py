"""Canned sweep recipes behind the `figures` CLI subcommand.

Each recipe regenerates one figure's underlying data as CSV (and
optionally an SVG rendering).  Grids are chosen to resolve the features of
interest at tolerable single-core runtimes; every axis can be overridden
through the regular sweep subcommands when more detail is wanted.
"""

from __future__ import annotations

import math
import os
from dataclasses import replace

from .plot import Series, svg_line_plot
from .sweep import (
    DEFAULT_ALPHA_BIN_WIDTH,
    SweepPoint,
    SweepSpec,
    default_pe_budgets,
    envelope,
    envelope_to_csv,
    points_to_csv,
    psd_sweep,
    usd_sweep,
    write_text,
)

FIGURES = ("fig3", "fig4", "fig5", "fig6", "fig8", "fig9", "fig10")

_LABEL_INF = "inf"


def _nm_label(n_max: int | None) -> str:
    return _LABEL_INF if n_max is None else str(n_max)


def _write(outdir: str, name: str, text: str, written: list[str]) -> None:
    path = os.path.join(outdir, name)
    write_text(path, text)
    written.append(path)


def _usd_series(points: list[SweepPoint], n_max: int | None) -> Series:
    pts = tuple((p.r, p.p_s) for p in points if p.n_max == n_max)
    return Series(label=f"n_max={_nm_label(n_max)}", points=pts)


def fig3(outdir: str, svg: bool, workers: int, progress: bool,
         r_step: float = 0.005) -> list[str]:
    """Zero-error success probability vs squeezing, unbounded resolution."""
    spec = SweepSpec(r_step=r_step, n_max_values=(None,))
    points = usd_sweep(spec, workers=workers, progress=progress)
    written: list[str] = []
    _write(outdir, "fig3_usd_inf.csv", points_to_csv(points), written)
    if svg:
        base = [p for p in points if abs(p.r - round(p.r / spec.r_step) * spec.r_step) < 1e-9]
        peaks = [p for p in points if p not in base]
        series = [Series("continuous", tuple((p.r, p.p_s) for p in base))]
        if peaks:
            series.append(Series("singular peak",
                                 tuple((p.r, p.p_s) for p in peaks), marker_only=True))
        _write(outdir, "fig3_usd_inf.svg",
               svg_line_plot(series, "Zero-error success vs squeezing",
                             "squeezing intensity r", "success probability p_s"),
               written)
    return written


def fig4(outdir: str, svg: bool, workers: int, progress: bool,
         r_step: float = 0.005) -> list[str]:
    """Zero-error curves for detector ceilings 1..12 plus unbounded."""
    n_values = tuple(range(1, 13)) + (None,)
    spec = SweepSpec(r_step=r_step, n_max_values=n_values)
    points = usd_sweep(spec, workers=workers, progress=progress)
    written: list[str] = []
    _write(outdir, "fig4_usd_finite.csv", points_to_csv(points), written)
    if svg:
        series = [_usd_series(points, n) for n in n_values]
        _write(outdir, "fig4_usd_finite.svg",
               svg_line_plot(series, "Zero-error success vs squeezing, finite PNR",
                             "squeezing intensity r", "success probability p_s"),
               written)
    return written


FIG5_BUDGETS = (1e-4, 1e-3, 1e-2, 1e-1)


def fig5(outdir: str, svg: bool, workers: int, progress: bool,
         r_step: float = 0.005) -> list[str]:
    """Budgeted success vs squeezing for a 7-photon detector."""
    spec = SweepSpec(r_step=r_step, n_max_values=(7,),
                     pe_max_values=(0.0,) + FIG5_BUDGETS)
    points = psd_sweep(spec, workers=workers, progress=progress)
    written: list[str] = []
    _write(outdir, "fig5_psd_nmax7.csv", points_to_csv(points), written)
    if svg:
        series = []
        for budget in FIG5_BUDGETS:
            pts = tuple((p.r, p.p_s) for p in points if p.pe_max == budget)
            series.append(Series(label=f"pe_max={budget:g}", points=pts))
        usd_pts = tuple((p.r, p.p_s) for p in points if p.pe_max == 0.0)
        series.append(Series(label="zero error", points=usd_pts))
        _write(outdir, "fig5_psd_nmax7.svg",
               svg_line_plot(series, "Budgeted success vs squeezing (n_max=7)",
                             "squeezing intensity r", "success probability p_s"),
               written)
    return written


def _envelope_recipe(outdir: str, stem: str, title: str, svg: bool,
                     workers: int, progress: bool,
                     n_values: tuple[int | None, ...],
                     eta_values: tuple[float, ...],
                     r_step: float,
                     alpha_floor: float | None = None) -> list[str]:
    written: list[str] = []
    csv_parts = []
    series = []
    for eta in eta_values:
        for n_max in n_values:
            spec = SweepSpec(r_step=r_step, n_max_values=(n_max,),
                             eta_values=(eta,),
                             pe_max_values=default_pe_budgets())
            points = psd_sweep(spec, workers=workers, progress=progress)
            env = envelope(points, DEFAULT_ALPHA_BIN_WIDTH)
            if alpha_floor is not None:
                env = [e for e in env if e.alpha >= alpha_floor]
            label = f"n_max={_nm_label(n_max)}, eta={eta:g}"
            csv_parts.append(f"# {label}\n" + envelope_to_csv(env))
            series.append(Series(label=label,
                                 points=tuple((e.alpha, e.p_s) for e in env)))
    _write(outdir, f"{stem}.csv", "".join(csv_parts), written)
    if svg:
        _write(outdir, f"{stem}.svg",
               svg_line_plot(series, title, "measurement confidence alpha",
                             "max success probability p_s"),
               written)
    return written


def fig6(outdir: str, svg: bool, workers: int, progress: bool,
         r_step: float = 0.005) -> list[str]:
    """Lossless confidence envelopes for ceilings 1..12 and unbounded."""
    return _envelope_recipe(
        outdir, "fig6_envelopes", "Max success vs confidence (lossless)",
        svg, workers, progress,
        n_values=tuple(range(1, 13)) + (None,), eta_values=(1.0,),
        r_step=r_step)


def fig8(outdir: str, svg: bool, workers: int, progress: bool,
         r_step: float = 0.01) -> list[str]:
    """Lossy envelopes across detector transmissions (heavy; see README)."""
    return _envelope_recipe(
        outdir, "fig8_lossy_envelopes", "Max success vs confidence (lossy)",
        svg, workers, progress,
        n_values=tuple(range(1, 8)), eta_values=(0.90, 0.95, 0.98, 1.0),
        r_step=r_step)


def fig9(outdir: str, svg: bool, workers: int, progress: bool,
         r_step: float = 0.01) -> list[str]:
    """Envelopes in the reported TES regime: 7-photon ceiling, eta near 1."""
    return _envelope_recipe(
        outdir, "fig9_tes_envelopes", "Max success vs confidence (n_max=7)",
        svg, workers, progress,
        n_values=(7,), eta_values=(0.98, 0.99, 1.0), r_step=r_step)


HIGH_CONFIDENCE_FLOOR = 0.9925


def fig10(outdir: str, svg: bool, workers: int, progress: bool,
          r_step: float = 0.01) -> list[str]:
    """High-confidence (alpha >= 0.9925) envelope slice, 7-photon ceiling."""
    return _envelope_recipe(
        outdir, "fig10_high_confidence", "Max success at alpha >= 0.9925",
        svg, workers, progress,
        n_values=(7,), eta_values=(0.98, 1.0), r_step=r_step,
        alpha_floor=HIGH_CONFIDENCE_FLOOR)


_RECIPES = {
    "fig3": fig3, "fig4": fig4, "fig5": fig5, "fig6": fig6,
    "fig8": fig8, "fig9": fig9, "fig10": fig10,
}


def run_figure(name: str, outdir: str, svg: bool = True, workers: int = 1,
               progress: bool = False, r_step: float | None = None) -> list[str]:
    if name not in _RECIPES:
        raise ValueError(f"unknown figure {name!r}; choose from {FIGURES}")
    os.makedirs(outdir, exist_ok=True)
    if r_step is None:
        return _RECIPES[name](outdir, svg, workers, progress)
    return _RECIPES[name](outdir, svg, workers, progress, r_step=r_step)
