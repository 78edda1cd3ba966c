"""WAV I/O, linear resampling, and signal measurements.

Everything downstream (concatenation, augmentation, the TTS client) moves
audio through :class:`AudioBuffer`: mono float64 samples nominally in
[-1, 1] plus a sample rate. Files are RIFF/WAVE PCM 16-bit; reading maps
ints to floats by division by 32768, writing encodes round(s * 32767) so
-1.0 and +1.0 land symmetrically on -32767/+32767.

The canonical pipeline rate is 16 kHz mono; every ingest path resamples
to it so the DSP below never sees mixed rates.
"""

from __future__ import annotations

import io
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import AudioError

CANONICAL_RATE = 16_000

_INT_FULL_SCALE = 32768  # decode divisor
_INT_MAX = 32767  # encode multiplier


@dataclass(frozen=True)
class AudioBuffer:
    """Immutable mono audio: float64 samples plus a sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(samples)):
            raise AudioError("audio samples must be finite")
        if self.sample_rate <= 0:
            raise AudioError(f"sample rate must be positive, got {self.sample_rate}")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def read_wav(path: str | Path) -> AudioBuffer:
    """Read a PCM 16-bit mono or stereo WAV file.

    Stereo is downmixed by channel mean. Anything that is not 16-bit PCM
    (8-bit, mu-law, float, ...) raises AudioError.
    """
    return _decode_wav_stream(str(path), open(path, "rb"))


def read_wav_bytes(payload: bytes) -> AudioBuffer:
    """Decode an in-memory WAV payload (e.g. a TTS response body)."""
    return _decode_wav_stream("<bytes>", io.BytesIO(payload))


def _decode_wav_stream(name: str, stream) -> AudioBuffer:
    try:
        with stream:
            with wave.open(stream, "rb") as wav:
                channels = wav.getnchannels()
                width = wav.getsampwidth()
                rate = wav.getframerate()
                n_frames = wav.getnframes()
                frames = wav.readframes(n_frames)
    except wave.Error as exc:
        raise AudioError(f"{name}: unsupported or corrupt WAV: {exc}") from exc
    except EOFError as exc:
        raise AudioError(f"{name}: truncated WAV file") from exc
    if width != 2:
        raise AudioError(f"{name}: unsupported encoding ({8 * width}-bit); PCM 16-bit required")
    if channels not in (1, 2):
        raise AudioError(f"{name}: {channels} channels unsupported; mono or stereo required")
    if len(frames) < n_frames * channels * 2:
        raise AudioError(f"{name}: truncated WAV file")
    ints = np.frombuffer(frames, dtype="<i2")
    if channels == 2:
        ints = ints.reshape(-1, 2)
        samples = ints.mean(axis=1) / _INT_FULL_SCALE
    else:
        samples = ints / _INT_FULL_SCALE
    return AudioBuffer(samples=samples, sample_rate=rate)


def write_wav(buf: AudioBuffer, path: str | Path) -> None:
    """Write PCM 16-bit mono little-endian.

    Samples outside [-1, 1] are rejected rather than silently clipped;
    clamp or renormalise upstream if that is what you mean.
    """
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(encode_wav_bytes(buf))


def encode_wav_bytes(buf: AudioBuffer) -> bytes:
    out_of_range = np.abs(buf.samples) > 1.0
    if np.any(out_of_range):
        worst = float(buf.samples[np.argmax(np.abs(buf.samples))])
        raise AudioError(f"sample {worst:+.6f} outside [-1, 1]; refusing to write")
    ints = np.clip(np.rint(buf.samples * _INT_MAX), -_INT_FULL_SCALE, _INT_MAX).astype("<i2")
    stream = io.BytesIO()
    with wave.open(stream, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(buf.sample_rate)
        wav.writeframes(ints.tobytes())
    return stream.getvalue()


def resample_linear(buf: AudioBuffer, target_rate: int) -> AudioBuffer:
    """Linear-interpolation resample; identity when rates already match.

    Output length is round(n * target / source) with endpoints aligned, so
    constants stay constant and no sample overshoots the input range.
    """
    if target_rate <= 0:
        raise AudioError(f"target rate must be positive, got {target_rate}")
    if target_rate == buf.sample_rate:
        return buf
    n = len(buf)
    m = int(round(n * target_rate / buf.sample_rate))
    if n == 0 or m == 0:
        return AudioBuffer(samples=np.zeros(m), sample_rate=target_rate)
    if n == 1 or m == 1:
        values = np.full(m, buf.samples[0])
        return AudioBuffer(samples=values, sample_rate=target_rate)
    positions = np.linspace(0.0, n - 1, num=m)
    values = np.interp(positions, np.arange(n), buf.samples)
    return AudioBuffer(samples=values, sample_rate=target_rate)


def silence(duration_s: float, sample_rate: int = CANONICAL_RATE) -> AudioBuffer:
    if duration_s < 0:
        raise AudioError("silence duration must be nonnegative")
    return AudioBuffer(samples=np.zeros(int(round(duration_s * sample_rate))), sample_rate=sample_rate)


def concatenate(buffers: list[AudioBuffer]) -> AudioBuffer:
    """Join buffers end to end; all must share one sample rate."""
    if not buffers:
        raise AudioError("cannot concatenate zero buffers")
    rates = {b.sample_rate for b in buffers}
    if len(rates) > 1:
        raise AudioError(f"cannot concatenate mixed sample rates {sorted(rates)}")
    return AudioBuffer(
        samples=np.concatenate([b.samples for b in buffers]),
        sample_rate=buffers[0].sample_rate,
    )


def rms(buf: AudioBuffer) -> float:
    """Root mean square amplitude; errors on an empty buffer."""
    if len(buf) == 0:
        raise AudioError("rms of an empty buffer is undefined")
    return float(np.sqrt(np.mean(np.square(buf.samples))))


def rms_db(buf: AudioBuffer) -> float:
    """RMS in dB relative to full scale; errors on silence instead of -inf."""
    value = rms(buf)
    if value == 0.0:
        raise AudioError("rms_db of an all-zero signal is undefined")
    return 20.0 * float(np.log10(value))


__all__ = [
    "AudioBuffer",
    "CANONICAL_RATE",
    "read_wav",
    "read_wav_bytes",
    "write_wav",
    "encode_wav_bytes",
    "resample_linear",
    "silence",
    "concatenate",
    "rms",
    "rms_db",
]
