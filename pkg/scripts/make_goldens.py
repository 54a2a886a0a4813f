"""Regenerate the golden CSV/JSON artefacts from the reference configs.

Run from the repository root:

    PYTHONPATH=src python3 scripts/make_goldens.py

Spectra and the coefficient table go through the installed CLI so the
goldens exercise the same code path users run; the envelope waveforms need
the in-repo design period, so their period is computed here and passed to
the ``shape`` verb explicitly.
"""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = sorted((ROOT / "configs").glob("*.toml"))


def cli(*args: str) -> None:
    cmd = [sys.executable, "-m", "ddshape.cli", *args]
    print("+", " ".join(args))
    subprocess.run(cmd, check=True, cwd=ROOT)


def main() -> None:
    (ROOT / "golden").mkdir(exist_ok=True)

    # harmonic-weight decay table (l = 25, 27, 29 over alpha in [0, 4])
    alphas = ",".join(f"{a:.2f}" for a in [i * 0.05 for i in range(81)])
    cli(
        "fourier", "--l-min", "25", "--l-max", "29", "--profile", "tophat",
        "--alpha", alphas, "--out", "golden/coefficients_l25_27_29.csv",
    )

    # spectra for every reference config
    for config in CONFIGS:
        cli("spectrum", "--config", str(config.relative_to(ROOT)))

    # shaped-pulse waveforms at the two reference design points
    sys.path.insert(0, str(ROOT / "src"))
    from ddshape.config import build_target, design_period, parse_config

    for config_name, alpha, tag in (
        ("two_protons_1p5T_shaped_a30.toml", 30, "a30"),
        ("two_tone_0p2G_shaped_a8.toml", 8, "a8"),
    ):
        cfg = parse_config(ROOT / "configs" / config_name)
        period = design_period(build_target(cfg), cfg.sequence.harmonic)
        cli(
            "shape", "--alpha", str(alpha), "--gamma", "10", "--l",
            str(cfg.sequence.harmonic), "--period-us", f"{period * 1e6:.15g}",
            "--out-csv", f"golden/envelope_{tag}.csv",
            "--out-json", f"golden/envelope_{tag}.json",
        )


if __name__ == "__main__":
    main()
