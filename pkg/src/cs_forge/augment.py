"""Five-stage augmentation chain simulating a rough user environment.

Stages run in a fixed order: additive noise, clipping, tanh distortion,
gradual gain transition, bitcrushing. Each stage fires independently with
its configured probability, ranged parameters are drawn uniformly from
[min, max], and every draw (including skips) is recorded in the applied
log, so a run is fully reconstructable from (input, config, seed).

Defaults:

    noise            target RMS in [-45, -40] dB, p=1.0
    clip             [-0.07, 0.07], p=1.0
    tanh distortion  0.3, p=0.5
    gain transition  [-3, +3] dB over 0.5-1.0 s, p=1.0
    bitcrush         8 bits, p=1.0
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .audio import AudioBuffer, read_wav, resample_linear, rms
from .errors import AudioError, ConfigError

STAGE_ORDER = ("noise", "clip", "tanh_distortion", "gain_transition", "bitcrush")


@dataclass(frozen=True)
class NoiseConfig:
    min_rms_db: float = -45.0
    max_rms_db: float = -40.0
    p: float = 1.0
    noise_bank: tuple[str, ...] = ()


@dataclass(frozen=True)
class ClipConfig:
    a_min: float = -0.07
    a_max: float = 0.07
    p: float = 1.0


@dataclass(frozen=True)
class TanhConfig:
    min_distortion: float = 0.3
    max_distortion: float = 0.3
    p: float = 0.5


@dataclass(frozen=True)
class GainTransitionConfig:
    min_gain_db: float = -3.0
    max_gain_db: float = 3.0
    min_duration_s: float = 0.5
    max_duration_s: float = 1.0
    p: float = 1.0


@dataclass(frozen=True)
class BitcrushConfig:
    min_bit_depth: int = 8
    max_bit_depth: int = 8
    p: float = 1.0


@dataclass(frozen=True)
class AugmentationConfig:
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    clip: ClipConfig = field(default_factory=ClipConfig)
    tanh: TanhConfig = field(default_factory=TanhConfig)
    gain_transition: GainTransitionConfig = field(default_factory=GainTransitionConfig)
    bitcrush: BitcrushConfig = field(default_factory=BitcrushConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("noise", "clip", "tanh", "gain_transition", "bitcrush"):
            p = getattr(self, name).p
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name}.p must be in [0, 1], got {p}")
        if self.noise.min_rms_db > self.noise.max_rms_db:
            raise ConfigError("noise: min_rms_db > max_rms_db")
        if self.clip.a_min >= self.clip.a_max:
            raise ConfigError("clip: a_min must be strictly below a_max")
        if self.tanh.min_distortion > self.tanh.max_distortion:
            raise ConfigError("tanh: min_distortion > max_distortion")
        if self.gain_transition.min_gain_db > self.gain_transition.max_gain_db:
            raise ConfigError("gain_transition: min_gain_db > max_gain_db")
        if self.gain_transition.min_duration_s > self.gain_transition.max_duration_s:
            raise ConfigError("gain_transition: min_duration_s > max_duration_s")
        if self.gain_transition.min_duration_s <= 0:
            raise ConfigError("gain_transition: durations must be positive")
        for depth in (self.bitcrush.min_bit_depth, self.bitcrush.max_bit_depth):
            if not 1 <= depth <= 16:
                raise ConfigError(f"bitcrush depth {depth} outside [1, 16]")
        if self.bitcrush.min_bit_depth > self.bitcrush.max_bit_depth:
            raise ConfigError("bitcrush: min_bit_depth > max_bit_depth")

    @classmethod
    def from_dict(cls, raw: dict[str, Any], seed: int | None = None) -> "AugmentationConfig":
        """Build a config from a JSON-style dict of per-stage overrides."""
        cfg = cls(
            noise=NoiseConfig(**{**raw.get("noise", {}), "noise_bank": tuple(raw.get("noise", {}).get("noise_bank", ()))}),
            clip=ClipConfig(**raw.get("clip", {})),
            tanh=TanhConfig(**raw.get("tanh", {})),
            gain_transition=GainTransitionConfig(**raw.get("gain_transition", {})),
            bitcrush=BitcrushConfig(**raw.get("bitcrush", {})),
            seed=raw.get("seed", 0),
        )
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        return cfg


def derive_seed(seed: int, key: str) -> int:
    """Mix a base seed with a string key, stably across processes."""
    digest = hashlib.sha256(f"{seed}:{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def add_noise(x: AudioBuffer, noise: AudioBuffer, target_rms_db: float) -> AudioBuffer:
    """Mix noise into x at an absolute RMS level given in dB.

    The noise is tiled or trimmed to the signal length first, and the gain
    targets the RMS of that tiled segment, so the injected component lands
    on the requested level exactly.
    """
    if len(x) == 0:
        raise AudioError("cannot add noise to an empty signal")
    if len(noise) == 0:
        raise AudioError("noise source is empty")
    if noise.sample_rate != x.sample_rate:
        noise = resample_linear(noise, x.sample_rate)
    reps = -(-len(x) // len(noise))  # ceil
    tiled = np.tile(noise.samples, reps)[: len(x)]
    tiled_rms = float(np.sqrt(np.mean(np.square(tiled))))
    if tiled_rms == 0.0:
        raise AudioError("noise source is silent over the mixed span")
    gain = 10.0 ** (target_rms_db / 20.0) / tiled_rms
    return AudioBuffer(samples=x.samples + gain * tiled, sample_rate=x.sample_rate)


def clip(x: AudioBuffer, a_min: float, a_max: float) -> AudioBuffer:
    """Hard-clip every sample into [a_min, a_max]."""
    if a_min >= a_max:
        raise ConfigError("clip requires a_min < a_max")
    return AudioBuffer(samples=np.clip(x.samples, a_min, a_max), sample_rate=x.sample_rate)


def tanh_distortion(x: AudioBuffer, distortion: float) -> AudioBuffer:
    """Saturating distortion with drive k = 1 + 15*distortion, RMS preserved.

    The drive mapping is this artifact's definition of the distortion
    amount; the rescale keeps perceived level constant so the following
    stages see a comparable signal.
    """
    if not 0.0 <= distortion <= 1.0:
        raise ConfigError(f"distortion must be in [0, 1], got {distortion}")
    drive = 1.0 + 15.0 * distortion
    shaped = np.tanh(drive * x.samples)
    shaped_rms = float(np.sqrt(np.mean(np.square(shaped)))) if len(shaped) else 0.0
    if shaped_rms > 0.0:
        shaped = shaped * (rms(x) / shaped_rms)
    return AudioBuffer(samples=shaped, sample_rate=x.sample_rate)


def gain_transition(x: AudioBuffer, gain_db: float, start_s: float, duration_s: float) -> AudioBuffer:
    """Ramp gain linearly (in dB) from 0 to gain_db across a window.

    Before the window the signal is untouched; after it the full gain_db
    holds for the rest of the signal.
    """
    if duration_s <= 0:
        raise ConfigError("gain transition duration must be positive")
    if start_s < 0 or start_s + duration_s > x.duration_s + 1e-9:
        raise ConfigError(
            f"gain window [{start_s:.3f}, {start_s + duration_s:.3f}] s outside "
            f"signal of {x.duration_s:.3f} s"
        )
    t = np.arange(len(x)) / x.sample_rate
    env_db = np.clip((t - start_s) / duration_s, 0.0, 1.0) * gain_db
    return AudioBuffer(samples=x.samples * 10.0 ** (env_db / 20.0), sample_rate=x.sample_rate)


def bitcrush(x: AudioBuffer, bit_depth: int) -> AudioBuffer:
    """Mid-tread quantisation to 2^(bit_depth-1) steps per unit, clamped to [-1, 1]."""
    if not 1 <= bit_depth <= 16:
        raise ConfigError(f"bit depth {bit_depth} outside [1, 16]")
    q = float(2 ** (bit_depth - 1))
    crushed = np.clip(np.rint(x.samples * q) / q, -1.0, 1.0)
    return AudioBuffer(samples=crushed, sample_rate=x.sample_rate)


def _load_noise_bank(cfg: NoiseConfig) -> list[AudioBuffer]:
    return [read_wav(p) for p in cfg.noise_bank]


def pseudo_noise(duration_s: float = 5.0, sample_rate: int = 16_000, seed: int = 0) -> AudioBuffer:
    """Deterministic shaped noise for tests and bank-less runs.

    White noise passed through a one-pole lowpass, loosely resembling
    environmental rumble; nothing downstream depends on its spectrum.
    """
    rng = np.random.default_rng(seed)
    white = rng.uniform(-1.0, 1.0, size=int(round(duration_s * sample_rate)))
    shaped = np.empty_like(white)
    acc = 0.0
    alpha = 0.15
    for i, w in enumerate(white):
        acc += alpha * (w - acc)
        shaped[i] = acc
    peak = np.max(np.abs(shaped))
    if peak > 0:
        shaped = 0.5 * shaped / peak
    return AudioBuffer(samples=shaped, sample_rate=sample_rate)


def apply_chain(
    x: AudioBuffer,
    cfg: AugmentationConfig,
    noise_bank: Sequence[AudioBuffer] | None = None,
    tap: Callable[[str, AudioBuffer], None] | None = None,
) -> tuple[AudioBuffer, list[dict[str, Any]]]:
    """Run the full chain under the config's seed.

    ``noise_bank`` overrides the config's path list with preloaded buffers
    (the corpus runner loads once and reuses). ``tap`` receives each
    stage's output as it is produced, which is how the acceptance checks
    observe intermediate signals. The applied log records, per stage, the
    gate draw outcome and every sampled parameter.
    """
    rng = random.Random(cfg.seed)
    log: list[dict[str, Any]] = []
    out = x

    # Draw pattern is fixed: one gate draw per stage, then that stage's
    # parameter draws only if it fires. Changing a p therefore perturbs
    # downstream draws only through skipped parameter draws.
    gate = rng.random()
    if gate < cfg.noise.p:
        bank = list(noise_bank) if noise_bank is not None else _load_noise_bank(cfg.noise)
        if not bank:
            raise ConfigError("noise stage enabled but the noise bank is empty")
        index = rng.randrange(len(bank))
        target_db = rng.uniform(cfg.noise.min_rms_db, cfg.noise.max_rms_db)
        out = add_noise(out, bank[index], target_db)
        log.append(
            {
                "stage": "noise",
                "applied": True,
                "params": {"noise_index": index, "target_rms_db": target_db},
            }
        )
    else:
        log.append({"stage": "noise", "applied": False, "params": {}})
    if tap:
        tap("noise", out)

    gate = rng.random()
    if gate < cfg.clip.p:
        out = clip(out, cfg.clip.a_min, cfg.clip.a_max)
        log.append(
            {
                "stage": "clip",
                "applied": True,
                "params": {"a_min": cfg.clip.a_min, "a_max": cfg.clip.a_max},
            }
        )
    else:
        log.append({"stage": "clip", "applied": False, "params": {}})
    if tap:
        tap("clip", out)

    gate = rng.random()
    if gate < cfg.tanh.p:
        distortion = rng.uniform(cfg.tanh.min_distortion, cfg.tanh.max_distortion)
        out = tanh_distortion(out, distortion)
        log.append(
            {"stage": "tanh_distortion", "applied": True, "params": {"distortion": distortion}}
        )
    else:
        log.append({"stage": "tanh_distortion", "applied": False, "params": {}})
    if tap:
        tap("tanh_distortion", out)

    gate = rng.random()
    if gate < cfg.gain_transition.p:
        gt = cfg.gain_transition
        gain_db = rng.uniform(gt.min_gain_db, gt.max_gain_db)
        duration = rng.uniform(gt.min_duration_s, gt.max_duration_s)
        # Short clips: shrink the window to fit rather than skipping.
        duration = min(duration, out.duration_s)
        start = rng.uniform(0.0, out.duration_s - duration)
        out = gain_transition(out, gain_db, start, duration)
        log.append(
            {
                "stage": "gain_transition",
                "applied": True,
                "params": {"gain_db": gain_db, "start_s": start, "duration_s": duration},
            }
        )
    else:
        log.append({"stage": "gain_transition", "applied": False, "params": {}})
    if tap:
        tap("gain_transition", out)

    gate = rng.random()
    if gate < cfg.bitcrush.p:
        depth = rng.randint(cfg.bitcrush.min_bit_depth, cfg.bitcrush.max_bit_depth)
        out = bitcrush(out, depth)
        log.append({"stage": "bitcrush", "applied": True, "params": {"bit_depth": depth}})
    else:
        log.append({"stage": "bitcrush", "applied": False, "params": {}})
    if tap:
        tap("bitcrush", out)

    return out, log


def augment_utterance(
    x: AudioBuffer,
    cfg: AugmentationConfig,
    utterance_id: str,
    noise_bank: Sequence[AudioBuffer] | None = None,
) -> tuple[AudioBuffer, list[dict[str, Any]]]:
    """Chain application with a per-utterance seed derived from the id.

    The derived seed makes corpus runs independent of scheduling order:
    each utterance's output depends only on (its audio, config, id).
    """
    per_utt = replace(cfg, seed=derive_seed(cfg.seed, utterance_id))
    return apply_chain(x, per_utt, noise_bank=noise_bank)


def load_noise_dir(noise_dir: str | Path) -> list[AudioBuffer]:
    """All WAVs in a directory, sorted by name for determinism."""
    paths = sorted(Path(noise_dir).glob("*.wav"))
    if not paths:
        raise ConfigError(f"no .wav files found in noise dir {noise_dir}")
    return [read_wav(p) for p in paths]


__all__ = [
    "NoiseConfig",
    "ClipConfig",
    "TanhConfig",
    "GainTransitionConfig",
    "BitcrushConfig",
    "AugmentationConfig",
    "add_noise",
    "clip",
    "tanh_distortion",
    "gain_transition",
    "bitcrush",
    "apply_chain",
    "augment_utterance",
    "pseudo_noise",
    "load_noise_dir",
    "derive_seed",
    "STAGE_ORDER",
]
