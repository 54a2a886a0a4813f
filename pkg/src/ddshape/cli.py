"""Command-line interface: fourier, shape, spectrum, energy, predict."""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .config import (
    RunConfig,
    build_shape,
    build_target,
    design_period,
    parse_config,
    resonance_frequencies,
    scan_grid,
    write_csv,
    write_json,
)
from .metrics import build_energy_report, pulse_energy, tophat_energy
from .model import GAMMA_H, SpinSystem
from .modulation import (
    SequencePlan,
    f_l_instantaneous,
    f_l_numeric,
    f_l_tophat,
    shaped_modulation,
    tophat_modulation,
)
from .shaper import ShapedPulse
from .simulator import Instantaneous, TopHat, scan_spectrum
from . import simulator

TWO_PI = 2.0 * np.pi


@click.group()
@click.version_option(version=__version__, prog_name="ddshape")
def main() -> None:
    """Shaped pi-pulses for energy-efficient high-field decoupling sequences."""


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


@main.command()
@click.option("--l-min", type=int, default=1, show_default=True)
@click.option("--l-max", type=int, default=99, show_default=True)
@click.option("--odd-only/--all-l", default=True, show_default=True)
@click.option(
    "--alpha",
    "alpha_list",
    default="0,0.5,1,2,4",
    show_default=True,
    help="Comma-separated pulse widths in target-harmonic periods.",
)
@click.option(
    "--profile",
    type=click.Choice(["instantaneous", "tophat", "shaped"]),
    default="tophat",
    show_default=True,
)
@click.option("--gamma", type=float, default=10.0, show_default=True,
              help="Gaussian width ratio for shaped profiles.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def fourier(l_min, l_max, odd_only, alpha_list, profile, gamma, out) -> None:
    """Tabulate harmonic weights f_l over an (l, alpha) grid as CSV.

    Pairs whose geometry is impossible (alpha >= l/2, pulses would
    overlap) are skipped.  For the instantaneous profile only alpha = 0
    rows are emitted.
    """
    alphas = [0.0] if profile == "instantaneous" else _parse_floats(alpha_list)
    ls = range(l_min, l_max + 1, 2 if odd_only else 1)
    rows = []
    for l in ls:
        for alpha in alphas:
            if profile != "instantaneous" and alpha >= l / 2.0:
                continue
            if l % 2 == 0:
                value = 0.0 if profile != "shaped" else _shaped_f_l(l, alpha, gamma)
            elif profile == "instantaneous":
                value = f_l_instantaneous(l)
            elif profile == "tophat":
                value = f_l_tophat(l, alpha)
            else:
                value = _shaped_f_l(l, alpha, gamma)
            rows.append((l, alpha, value, abs(value)))
    write_csv(out, ("l", "alpha", "f_l", "abs_f_l"), rows)
    click.echo(f"wrote {len(rows)} rows to {out}")


def _shaped_f_l(l: int, alpha: float, gamma: float) -> float:
    if alpha < 1 or int(alpha) != alpha:
        raise click.BadParameter("shaped profiles need integer alpha >= 1")
    pulse = ShapedPulse.design(int(alpha), gamma, l, period=1.0)
    plan = SequencePlan(period=1.0, t_pi=pulse.t_pi)
    mod = shaped_modulation(plan, pulse.profile, oscillations=2.0 * alpha)
    return f_l_numeric(mod, l)


def _shape_from_options(alpha, gamma, l, period_us, b_z_t, gamma_n_mhz, refine):
    if period_us is not None:
        period = period_us * 1e-6
    elif b_z_t is not None:
        gamma_n = TWO_PI * 1e6 * gamma_n_mhz if gamma_n_mhz else GAMMA_H
        period = TWO_PI * l / (abs(gamma_n) * b_z_t)
    else:
        raise click.UsageError("give either --period-us or --b-z-T")
    return ShapedPulse.design(alpha, gamma, l, period, refine=refine)


def _pulse_summary(pulse: ShapedPulse) -> dict:
    return {
        "alpha": pulse.alpha,
        "gamma": pulse.gamma,
        "beta": pulse.beta,
        "harmonic": pulse.harmonic,
        "period_us": pulse.period * 1e6,
        "t_pi_us": pulse.t_pi * 1e6,
        "peak_rabi_MHz": pulse.peak_rabi / TWO_PI / 1e6,
        "pulse_area": pulse.area,
        "overlap_residual": pulse.overlap_residual,
        "pulse_energy_rad2_per_s": pulse_energy(pulse.omega, pulse.times),
        "monotone_envelope": pulse.monotone_envelope,
        "beta_refined": pulse.refined,
    }


@main.command()
@click.option("--alpha", type=int, required=True)
@click.option("--gamma", type=float, default=10.0, show_default=True)
@click.option("--l", "l", type=int, required=True, help="Target harmonic.")
@click.option("--period-us", type=float, default=None, help="Sequence period T.")
@click.option("--b-z-T", "b_z_t", type=float, default=None,
              help="Derive T from the nuclear Larmor frequency at this field.")
@click.option("--gamma-n-mhz", type=float, default=None,
              help="Nuclear gyromagnetic ratio in MHz/T (default: proton).")
@click.option("--refine/--no-refine", default=False, show_default=True,
              help="Fit beta to the overlap quadrature instead of the closed form.")
@click.option("--out-csv", type=click.Path(dir_okay=False), default=None)
@click.option("--out-json", type=click.Path(dir_okay=False), default=None)
def shape(alpha, gamma, l, period_us, b_z_t, gamma_n_mhz, refine, out_csv, out_json):
    """Synthesise a shaped pi-pulse; emit its waveform and a JSON summary."""
    pulse = _shape_from_options(alpha, gamma, l, period_us, b_z_t, gamma_n_mhz, refine)
    if out_csv:
        rows = zip(pulse.times * 1e6, pulse.f_z, pulse.omega / TWO_PI / 1e6)
        write_csv(out_csv, ("t_us", "F_z", "omega_MHz"), rows)
    summary = _pulse_summary(pulse)
    if out_json:
        write_json(out_json, summary)
    click.echo(
        f"beta={summary['beta']:.6f} peak={summary['peak_rabi_MHz']:.4f} MHz "
        f"area={summary['pulse_area']:.9f} overlap={summary['overlap_residual']:.3e}"
    )


def _shape_metadata(shape_obj) -> dict:
    if isinstance(shape_obj, Instantaneous):
        return {"kind": "instantaneous", "t_pi_us": 0.0}
    if isinstance(shape_obj, TopHat):
        return {
            "kind": "tophat",
            "rabi_MHz": shape_obj.omega / TWO_PI / 1e6,
            "t_pi_us": shape_obj.t_pi * 1e6,
            "pulse_energy_rad2_per_s": tophat_energy(shape_obj.omega),
        }
    return {"kind": "shaped", **_pulse_summary(shape_obj)}


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out-csv", type=click.Path(dir_okay=False), default=None,
              help="Override [output].csv")
@click.option("--out-json", type=click.Path(dir_okay=False), default=None,
              help="Override [output].json")
@click.option("--points", type=int, default=None, help="Override [scan].points")
@click.option("--workers", type=int, default=None,
              help="Thread pool size (default: DDSHAPE_WORKERS or 1).")
def spectrum(config_path, out_csv, out_json, points, workers) -> None:
    """Scan the modulation frequency and record the NV coherence."""
    cfg = parse_config(config_path)
    if cfg.sequence is None or cfg.pulse is None or cfg.scan is None:
        raise click.UsageError("spectrum needs [sequence], [pulse] and [scan] blocks")
    if points is not None:
        from dataclasses import replace

        cfg = replace(cfg, scan=replace(cfg.scan, points=points))
    target = build_target(cfg)
    shape_obj = build_shape(cfg, target)
    omega_ms = scan_grid(cfg, target)
    result = scan_spectrum(
        target,
        shape_obj,
        harmonic=cfg.sequence.harmonic,
        n_periods=cfg.sequence.n_periods,
        omega_m_values=omega_ms,
        phase_pattern=cfg.sequence.phase_pattern,
        workers=workers,
    )
    k = cfg.sequence.harmonic
    center = float(np.mean(resonance_frequencies(target))) / k
    csv_path = out_csv or cfg.output.csv
    json_path = out_json or cfg.output.json
    if csv_path:
        rows = zip(
            result.omega_m / TWO_PI / 1e6,
            (result.omega_m - center) / TWO_PI / 1e3,
            result.sigma_x,
        )
        write_csv(csv_path, ("omega_m_MHz", "detuning_kHz", "sigma_x"), rows)
    meta = {
        "harmonic": k,
        "n_periods": cfg.sequence.n_periods,
        "pulse_count": 2 * cfg.sequence.n_periods,
        "phase_pattern": cfg.sequence.phase_pattern,
        "t_f_us_at_center": cfg.sequence.n_periods * (TWO_PI / center) * 1e6,
        "scan_center_MHz": center / TWO_PI / 1e6,
        "resonances_MHz": [w / TWO_PI / 1e6 for w in resonance_frequencies(target)],
        "sigma_x_min": float(np.min(result.sigma_x)),
        "shape": _shape_metadata(shape_obj),
    }
    if isinstance(target, SpinSystem):
        meta["b_z_T"] = target.b_z
        meta["a_perp_kHz"] = [f.a_perp / TWO_PI / 1e3 for f in target.frames]
    else:
        meta["tones_MHz"] = [f / TWO_PI / 1e6 for _, f in target.components]
        meta["signal_rabi_kHz"] = [a / TWO_PI / 1e3 for a, _ in target.components]
    if json_path:
        write_json(json_path, meta)
    click.echo(
        f"{result.sigma_x.size} points, min sigma_x = {meta['sigma_x_min']:.4f}"
        + (f", csv -> {csv_path}" if csv_path else "")
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--alpha", type=int, default=None)
@click.option("--gamma", type=float, default=10.0, show_default=True)
@click.option("--l", "l", type=int, default=None)
@click.option("--period-us", type=float, default=None)
@click.option("--b-z-T", "b_z_t", type=float, default=None)
@click.option("--gamma-n-mhz", type=float, default=None)
@click.option("--reference-rabi-mhz", type=float, default=None,
              help="Top-hat Rabi frequency to compare against.")
@click.option("--refine/--no-refine", default=False, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def energy(config_path, alpha, gamma, l, period_us, b_z_t, gamma_n_mhz,
           reference_rabi_mhz, refine, out) -> None:
    """Energy and peak-power ratios of a shaped pulse vs a reference top-hat."""
    if config_path:
        cfg = parse_config(config_path)
        if cfg.pulse is None or cfg.pulse.kind != "shaped":
            raise click.UsageError("energy --config needs a shaped [pulse] block")
        target = build_target(cfg)
        pulse = build_shape(cfg, target)
        reference_rabi_mhz = reference_rabi_mhz or cfg.reference_rabi_MHz
    else:
        if alpha is None or l is None:
            raise click.UsageError("give --config or (--alpha, --l, and a period source)")
        pulse = _shape_from_options(alpha, gamma, l, period_us, b_z_t, gamma_n_mhz, refine)
    if reference_rabi_mhz is None:
        raise click.UsageError("a reference top-hat Rabi frequency is required")
    report = build_energy_report(pulse, TWO_PI * 1e6 * reference_rabi_mhz)
    payload = report.to_dict()
    if out:
        write_json(out, payload)
    click.echo(
        f"peak power ratio = {report.peak_power_ratio:.2f}, "
        f"energy ratio = {report.energy_ratio:.3f}"
    )


@main.command()
@click.option("--f-k", type=float, required=True, help="Harmonic weight f_k.")
@click.option("--coupling-khz", type=float, required=True,
              help="a_perp (nuclear) or Omega_s (classical), as omega/2pi in kHz.")
@click.option("--t-f-us", type=float, required=True)
@click.option("--kind", type=click.Choice(["nuclear", "classical"]),
              default="nuclear", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def predict(f_k, coupling_khz, t_f_us, kind, out) -> None:
    """Closed-form on-resonance coherence prediction."""
    value = simulator.predict_signal(
        f_k, TWO_PI * 1e3 * coupling_khz, t_f_us * 1e-6, kind=kind
    )
    if out:
        write_json(out, {"kind": kind, "f_k": f_k, "coupling_kHz": coupling_khz,
                         "t_f_us": t_f_us, "sigma_x": value})
    click.echo(f"{value:.9f}")


if __name__ == "__main__":
    main()
