"""Run configuration: TOML/JSON parsing, unit handling and result emission.

Config fields carry their unit in the name (``b_z_T``, ``tones_MHz``,
``hyperfine_kHz``, ``b_s_G``, ``span_hz``, ``position_nm``); frequencies
written in MHz/kHz mean ``omega / 2 pi`` and are converted to angular
rad/s at this boundary, so the rest of the package never sees a bare MHz.
Unknown fields fail loudly; a known quantity spelled without its unit
suffix raises :class:`UnitError` naming the correct field.

Emitted artefacts are CSV (data, 12 significant digits, LF endings,
locale independent) plus a JSON sidecar with run metadata.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .model import GAMMA_H, ClassicalSignal, Nucleus, SpinSystem
from .shaper import ShapedPulse
from .simulator import Instantaneous, TopHat

if sys.version_info >= (3, 11):  # pragma: no cover - version shim
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "ParseError",
    "UnitError",
    "NucleusConfig",
    "SystemConfig",
    "SignalConfig",
    "SequenceConfig",
    "PulseConfig",
    "ScanConfig",
    "OutputConfig",
    "RunConfig",
    "parse_config",
    "write_config",
    "build_target",
    "build_shape",
    "design_period",
    "resonance_frequencies",
    "scan_grid",
    "write_csv",
    "write_json",
]

TWO_PI = 2.0 * np.pi

GAMMA_BY_SPECIES = {"H": GAMMA_H}


class ParseError(ValueError):
    """Malformed or unknown configuration content (field named in message)."""


class UnitError(ParseError):
    """A known field was written without its unit suffix."""


# base name -> canonical suffixed field, used to diagnose missing units
_UNIT_HINTS = {
    "b_z": "b_z_T",
    "hyperfine": "hyperfine_kHz",
    "position": "position_nm",
    "gamma_n": "gamma_n_MHz_per_T",
    "tones": "tones_MHz",
    "b_s": "b_s_G",
    "rabi": "rabi_MHz",
    "span": "span_hz",
    "center": "center_MHz",
    "reference_rabi": "reference_rabi_MHz",
}


def _check_fields(block: dict, allowed: set[str], where: str) -> None:
    for key in block:
        if key in allowed:
            continue
        if key in _UNIT_HINTS and _UNIT_HINTS[key] in allowed:
            raise UnitError(
                f"{where}.{key}: missing unit suffix, write {_UNIT_HINTS[key]!r}"
            )
        raise ParseError(f"unknown field {where}.{key}")


@dataclass(frozen=True)
class NucleusConfig:
    hyperfine_kHz: tuple[float, float, float] | None = None
    position_nm: tuple[float, float, float] | None = None
    species: str = "H"
    gamma_n_MHz_per_T: float | None = None

    def gamma_n(self) -> float:
        if self.gamma_n_MHz_per_T is not None:
            return TWO_PI * self.gamma_n_MHz_per_T * 1e6
        try:
            return GAMMA_BY_SPECIES[self.species]
        except KeyError:
            raise ParseError(
                f"unknown species {self.species!r}; give gamma_n_MHz_per_T"
            ) from None


@dataclass(frozen=True)
class SystemConfig:
    b_z_T: float
    nuclei: tuple[NucleusConfig, ...]


@dataclass(frozen=True)
class SignalConfig:
    b_s_G: float
    tones_MHz: tuple[float, ...]


@dataclass(frozen=True)
class SequenceConfig:
    harmonic: int
    n_periods: int
    phase_pattern: str = "XYXYYXYX"


@dataclass(frozen=True)
class PulseConfig:
    kind: str  # instantaneous | tophat | shaped
    alpha: int | None = None
    gamma: float = 10.0
    rabi_MHz: float | None = None
    refine_beta: bool = False


@dataclass(frozen=True)
class ScanConfig:
    points: int
    span_hz: float
    center_MHz: float | None = None
    include_resonances: bool = True


@dataclass(frozen=True)
class OutputConfig:
    csv: str | None = None
    json: str | None = None


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig | None = None
    signal: SignalConfig | None = None
    sequence: SequenceConfig | None = None
    pulse: PulseConfig | None = None
    scan: ScanConfig | None = None
    output: OutputConfig = field(default_factory=OutputConfig)
    reference_rabi_MHz: float | None = None

    def to_dict(self) -> dict:
        """Config content in file form (units at the boundary), JSON-ready."""
        out: dict[str, Any] = {}
        if self.system is not None:
            nuclei = []
            for n in self.system.nuclei:
                entry: dict[str, Any] = {}
                if n.hyperfine_kHz is not None:
                    entry["hyperfine_kHz"] = list(n.hyperfine_kHz)
                if n.position_nm is not None:
                    entry["position_nm"] = list(n.position_nm)
                if n.gamma_n_MHz_per_T is not None:
                    entry["gamma_n_MHz_per_T"] = n.gamma_n_MHz_per_T
                else:
                    entry["species"] = n.species
                nuclei.append(entry)
            out["system"] = {"b_z_T": self.system.b_z_T, "nuclei": nuclei}
        if self.signal is not None:
            out["signal"] = {
                "b_s_G": self.signal.b_s_G,
                "tones_MHz": list(self.signal.tones_MHz),
            }
        if self.sequence is not None:
            out["sequence"] = {
                "harmonic": self.sequence.harmonic,
                "n_periods": self.sequence.n_periods,
                "phase_pattern": self.sequence.phase_pattern,
            }
        if self.pulse is not None:
            block: dict[str, Any] = {"kind": self.pulse.kind}
            if self.pulse.alpha is not None:
                block["alpha"] = self.pulse.alpha
            if self.pulse.kind == "shaped":
                block["gamma"] = self.pulse.gamma
                block["refine_beta"] = self.pulse.refine_beta
            if self.pulse.rabi_MHz is not None:
                block["rabi_MHz"] = self.pulse.rabi_MHz
            out["pulse"] = block
        if self.scan is not None:
            block = {
                "points": self.scan.points,
                "span_hz": self.scan.span_hz,
                "include_resonances": self.scan.include_resonances,
            }
            if self.scan.center_MHz is not None:
                block["center_MHz"] = self.scan.center_MHz
            out["scan"] = block
        if self.output.csv or self.output.json:
            block = {}
            if self.output.csv:
                block["csv"] = self.output.csv
            if self.output.json:
                block["json"] = self.output.json
            out["output"] = block
        if self.reference_rabi_MHz is not None:
            out["energy"] = {"reference_rabi_MHz": self.reference_rabi_MHz}
        return out


def _triple(value: Any, where: str) -> tuple[float, float, float]:
    try:
        x, y, z = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ParseError(f"{where} must be a 3-vector of numbers") from None
    return (x, y, z)


def _parse_system(block: dict) -> SystemConfig:
    _check_fields(block, {"b_z_T", "nuclei"}, "system")
    if "b_z_T" not in block:
        raise ParseError("system.b_z_T is required")
    raw_nuclei = block.get("nuclei", [])
    if not raw_nuclei:
        raise ParseError("system.nuclei must list at least one nucleus")
    nuclei = []
    for i, nb in enumerate(raw_nuclei):
        where = f"system.nuclei[{i}]"
        _check_fields(
            nb,
            {"hyperfine_kHz", "position_nm", "species", "gamma_n_MHz_per_T"},
            where,
        )
        hyper = nb.get("hyperfine_kHz")
        pos = nb.get("position_nm")
        if (hyper is None) == (pos is None):
            raise ParseError(f"{where}: give exactly one of hyperfine_kHz, position_nm")
        nuclei.append(
            NucleusConfig(
                hyperfine_kHz=_triple(hyper, where) if hyper is not None else None,
                position_nm=_triple(pos, where) if pos is not None else None,
                species=nb.get("species", "H"),
                gamma_n_MHz_per_T=nb.get("gamma_n_MHz_per_T"),
            )
        )
    return SystemConfig(b_z_T=float(block["b_z_T"]), nuclei=tuple(nuclei))


def _parse_signal(block: dict) -> SignalConfig:
    _check_fields(block, {"b_s_G", "tones_MHz"}, "signal")
    if "b_s_G" not in block or "tones_MHz" not in block:
        raise ParseError("signal requires b_s_G and tones_MHz")
    tones = tuple(float(t) for t in block["tones_MHz"])
    if not tones:
        raise ParseError("signal.tones_MHz must list at least one tone")
    return SignalConfig(b_s_G=float(block["b_s_G"]), tones_MHz=tones)


def _parse_sequence(block: dict) -> SequenceConfig:
    _check_fields(block, {"harmonic", "n_periods", "phase_pattern"}, "sequence")
    for req in ("harmonic", "n_periods"):
        if req not in block:
            raise ParseError(f"sequence.{req} is required")
    return SequenceConfig(
        harmonic=int(block["harmonic"]),
        n_periods=int(block["n_periods"]),
        phase_pattern=str(block.get("phase_pattern", "XYXYYXYX")),
    )


def _parse_pulse(block: dict) -> PulseConfig:
    _check_fields(
        block, {"kind", "alpha", "gamma", "rabi_MHz", "refine_beta"}, "pulse"
    )
    kind = block.get("kind")
    if kind not in ("instantaneous", "tophat", "shaped"):
        raise ParseError(
            "pulse.kind must be one of instantaneous, tophat, shaped"
        )
    if kind == "tophat" and "rabi_MHz" not in block:
        raise ParseError("pulse.rabi_MHz is required for top-hat pulses")
    if kind == "shaped" and "alpha" not in block:
        raise ParseError("pulse.alpha is required for shaped pulses")
    if kind != "tophat" and "rabi_MHz" in block:
        raise ParseError("pulse.rabi_MHz applies to top-hat pulses only")
    if kind == "instantaneous" and ("alpha" in block or "gamma" in block):
        raise ParseError("instantaneous pulses take no shape parameters")
    return PulseConfig(
        kind=kind,
        alpha=int(block["alpha"]) if "alpha" in block else None,
        gamma=float(block.get("gamma", 10.0)),
        rabi_MHz=float(block["rabi_MHz"]) if "rabi_MHz" in block else None,
        refine_beta=bool(block.get("refine_beta", False)),
    )


def _parse_scan(block: dict) -> ScanConfig:
    _check_fields(
        block, {"points", "span_hz", "center_MHz", "include_resonances"}, "scan"
    )
    for req in ("points", "span_hz"):
        if req not in block:
            raise ParseError(f"scan.{req} is required")
    points = int(block["points"])
    if points < 3:
        raise ParseError("scan.points must be >= 3")
    return ScanConfig(
        points=points,
        span_hz=float(block["span_hz"]),
        center_MHz=float(block["center_MHz"]) if "center_MHz" in block else None,
        include_resonances=bool(block.get("include_resonances", True)),
    )


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a TOML or JSON run configuration."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        elif path.suffix.lower() == ".json":
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        else:
            raise ParseError(f"unsupported config extension: {path.suffix!r}")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None

    _check_fields(
        raw,
        {"system", "signal", "sequence", "pulse", "scan", "output", "energy"},
        "config",
    )
    system = _parse_system(raw["system"]) if "system" in raw else None
    signal = _parse_signal(raw["signal"]) if "signal" in raw else None
    if system is not None and signal is not None:
        raise ParseError("config must give either [system] or [signal], not both")

    out_block = raw.get("output", {})
    _check_fields(out_block, {"csv", "json"}, "output")
    reference = None
    if "energy" in raw:
        _check_fields(raw["energy"], {"reference_rabi_MHz"}, "energy")
        if "reference_rabi_MHz" in raw["energy"]:
            reference = float(raw["energy"]["reference_rabi_MHz"])

    return RunConfig(
        system=system,
        signal=signal,
        sequence=_parse_sequence(raw["sequence"]) if "sequence" in raw else None,
        pulse=_parse_pulse(raw["pulse"]) if "pulse" in raw else None,
        scan=_parse_scan(raw["scan"]) if "scan" in raw else None,
        output=OutputConfig(
            csv=out_block.get("csv"), json=out_block.get("json")
        ),
        reference_rabi_MHz=reference,
    )


def write_config(cfg: RunConfig, path: str | Path) -> None:
    """Serialise a RunConfig to a JSON config file (parse round-trips)."""
    write_json(path, cfg.to_dict())


def build_target(cfg: RunConfig) -> SpinSystem | ClassicalSignal:
    """Instantiate the physical target described by the config."""
    if cfg.system is not None:
        nuclei = []
        for nc in cfg.system.nuclei:
            gamma = nc.gamma_n()
            if nc.hyperfine_kHz is not None:
                hyper = TWO_PI * 1e3 * np.asarray(nc.hyperfine_kHz)
                nuclei.append(Nucleus(gamma_n=gamma, hyperfine=hyper))
            else:
                r = 1e-9 * np.asarray(nc.position_nm)
                nuclei.append(Nucleus.from_position(r, gamma_n=gamma))
        return SpinSystem(b_z=cfg.system.b_z_T, nuclei=nuclei)
    if cfg.signal is not None:
        freqs = [TWO_PI * 1e6 * t for t in cfg.signal.tones_MHz]
        return ClassicalSignal.from_field(1e-4 * cfg.signal.b_s_G, freqs)
    raise ParseError("config has neither [system] nor [signal]")


def resonance_frequencies(target: SpinSystem | ClassicalSignal) -> list[float]:
    """Target resonance frequencies (rad/s): omega_n per nucleus or tones."""
    if isinstance(target, SpinSystem):
        return [frame.omega_n for frame in target.frames]
    return [freq for _, freq in target.components]


def design_period(target: SpinSystem | ClassicalSignal, harmonic: int) -> float:
    """Sequence period placing harmonic ``k`` on the mean target resonance."""
    omega_bar = float(np.mean(resonance_frequencies(target)))
    return TWO_PI * harmonic / omega_bar


def build_shape(
    cfg: RunConfig, target: SpinSystem | ClassicalSignal
) -> Instantaneous | TopHat | ShapedPulse:
    """Instantiate the pulse shape; shaped pulses design at the mean resonance."""
    if cfg.pulse is None:
        raise ParseError("config needs a [pulse] block")
    if cfg.sequence is None:
        raise ParseError("config needs a [sequence] block")
    p = cfg.pulse
    if p.kind == "instantaneous":
        return Instantaneous()
    if p.kind == "tophat":
        return TopHat(omega=TWO_PI * 1e6 * p.rabi_MHz)
    period = design_period(target, cfg.sequence.harmonic)
    return ShapedPulse.design(
        alpha=p.alpha,
        gamma=p.gamma,
        l=cfg.sequence.harmonic,
        period=period,
        refine=p.refine_beta,
    )


def scan_grid(cfg: RunConfig, target: SpinSystem | ClassicalSignal) -> np.ndarray:
    """Modulation frequencies (rad/s): linspace over the span, resonances merged in.

    The scan centre defaults to the mean resonance divided by the harmonic;
    with ``include_resonances`` the exact per-target resonance points
    ``omega_res / k`` are added so dips are sampled on resonance.
    """
    if cfg.scan is None or cfg.sequence is None:
        raise ParseError("config needs [scan] and [sequence] blocks")
    k = cfg.sequence.harmonic
    if cfg.scan.center_MHz is not None:
        center = TWO_PI * 1e6 * cfg.scan.center_MHz
    else:
        center = float(np.mean(resonance_frequencies(target))) / k
    half = TWO_PI * 0.5 * cfg.scan.span_hz
    resonances = [w / k for w in resonance_frequencies(target)]
    n_extra = sum(1 for w in resonances if abs(w - center) <= half)
    n_lin = max(3, cfg.scan.points - (n_extra if cfg.scan.include_resonances else 0))
    grid = list(np.linspace(center - half, center + half, n_lin))
    if cfg.scan.include_resonances:
        grid.extend(w for w in resonances if abs(w - center) <= half)
    return np.array(sorted(set(grid)))


def _fmt(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{value:.12g}"
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """CSV with 12-significant-digit floats, LF endings, no locale effects."""
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_round_floats(v) for v in obj]
    return obj


def write_json(path: str | Path, obj: dict) -> None:
    """JSON with insertion-ordered fields and 12-significant-digit floats."""
    text = json.dumps(_round_floats(obj), indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8", newline="\n")
