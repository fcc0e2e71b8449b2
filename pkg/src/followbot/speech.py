"""Voice pipeline: frame energy VAD, ring-buffer utterance collection,
pluggable transcription, and keyword dispatch.

The collector follows the classic padded ring-buffer scheme: it triggers
when at least start_ratio of the last padding_window frames are voiced
(the utterance starts at the window's oldest voiced frame) and ends when
at least end_ratio of the window is unvoiced, trimming the trailing
unvoiced run.  While a transcription is in flight incoming frames are
dropped.
"""
from __future__ import annotations

import math
import re
import wave
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Protocol

import numpy as np

from .fsm import Keyword

FRAME_SECONDS = 0.03


@dataclass(frozen=True)
class AudioFrame:
    samples: np.ndarray            # int16 mono
    sample_rate: int = 16000

    def __post_init__(self):
        expected = round(self.sample_rate * FRAME_SECONDS)
        if len(self.samples) != expected:
            raise ValueError(
                f"frame must hold {expected} samples at {self.sample_rate} Hz, "
                f"got {len(self.samples)}")

    def rms(self) -> float:
        x = self.samples.astype(np.float64)
        return math.sqrt(float(np.mean(x * x)))


@dataclass(frozen=True)
class VadConfig:
    energy_threshold: float = 500.0   # RMS in int16 amplitude units
    padding_window: int = 10          # frames
    start_ratio: float = 0.9
    end_ratio: float = 0.9
    max_utterance: float = 10.0       # seconds

    def __post_init__(self):
        if not (0.0 < self.start_ratio <= 1.0 and 0.0 < self.end_ratio <= 1.0):
            raise ValueError("ratios must be in (0, 1]")
        if self.padding_window < 1:
            raise ValueError("padding_window must be >= 1")


def classify_frame(frame: AudioFrame, config: VadConfig) -> bool:
    """True = voiced (RMS energy above threshold)."""
    return frame.rms() > config.energy_threshold


@dataclass(frozen=True)
class Utterance:
    frames: tuple                     # contiguous frames (audio or labels)
    start_time: float
    end_time: float
    uid: str = ""

    def __post_init__(self):
        if not self.frames:
            raise ValueError("utterance must contain frames")
        if self.end_time <= self.start_time:
            raise ValueError("utterance must span positive time")


class UtteranceCollector:
    """Ring-buffer segmentation of a frame stream into utterances.

    Frames are fed with their voiced flag; emitted utterances carry frame
    indices as times (index * FRAME_SECONDS).  Call ``set_busy(True)``
    while a transcription is running to drop incoming frames.
    """

    def __init__(self, config: VadConfig):
        self.config = config
        self._window: deque = deque(maxlen=config.padding_window)
        self._triggered = False
        self._current: list = []           # (index, frame, voiced)
        self._index = 0
        self._utterance_count = 0
        self.busy = False

    def set_busy(self, busy: bool) -> None:
        self.busy = busy

    def push(self, frame, voiced: bool) -> Optional[Utterance]:
        """Feed one frame; returns a completed Utterance when one closes."""
        idx = self._index
        self._index += 1
        if self.busy:
            return None

        cfg = self.config
        self._window.append((idx, frame, voiced))

        if not self._triggered:
            voiced_count = sum(1 for _, _, v in self._window if v)
            if voiced_count >= cfg.start_ratio * cfg.padding_window:
                self._triggered = True
                entries = list(self._window)
                first_voiced = next(i for i, (_, _, v) in enumerate(entries) if v)
                self._current = entries[first_voiced:]
                self._window.clear()
            return None

        self._current.append((idx, frame, voiced))
        unvoiced_count = sum(1 for _, _, v in self._window if not v)
        if unvoiced_count >= cfg.end_ratio * cfg.padding_window:
            return self._finish(trim_trailing=True)
        if len(self._current) * FRAME_SECONDS > cfg.max_utterance:
            return self._finish(trim_trailing=False)
        return None

    def _finish(self, trim_trailing: bool) -> Optional[Utterance]:
        entries = self._current
        if trim_trailing:
            while entries and not entries[-1][2]:
                entries.pop()
        self._triggered = False
        self._current = []
        self._window.clear()
        if not entries:
            return None
        self._utterance_count += 1
        start_idx = entries[0][0]
        end_idx = entries[-1][0]
        return Utterance(
            frames=tuple(f for _, f, _ in entries),
            start_time=start_idx * FRAME_SECONDS,
            end_time=(end_idx + 1) * FRAME_SECONDS,
            uid=f"u{self._utterance_count}",
        )


def collect_utterances(labeled_frames: Iterable[tuple[object, bool]],
                       config: VadConfig) -> list[Utterance]:
    """Run the collector over a finite (frame, voiced) stream."""
    collector = UtteranceCollector(config)
    out = []
    for frame, voiced in labeled_frames:
        utt = collector.push(frame, voiced)
        if utt is not None:
            out.append(utt)
    return out


class Transcriber(Protocol):
    def transcribe(self, utterance: Utterance) -> str: ...


@dataclass
class ScriptedTranscriber:
    """Maps utterance ids to configured strings; optional word corruption
    emulates recognition noise."""

    script: dict[str, str] = field(default_factory=dict)
    corruption_rate: float = 0.0
    rng: Optional[np.random.Generator] = None

    def transcribe(self, utterance: Utterance) -> str:
        text = self.script.get(utterance.uid, "")
        text = text.lower()
        if self.corruption_rate > 0.0 and self.rng is not None:
            words = text.split()
            words = ["***" if self.rng.random() < self.corruption_rate else w
                     for w in words]
            text = " ".join(words)
        return text


def transcribe(utterance: Utterance, transcriber: Optional[Transcriber]) -> Optional[str]:
    """Lowercased transcript, or None (dropped) when no transcriber is set."""
    if transcriber is None:
        return None
    return transcriber.transcribe(utterance).lower()


@dataclass(frozen=True)
class KeywordCommand:
    keyword: Keyword
    matched_text: str


# priority order: escalation first, then movement keywords
_KEYWORD_PHRASES: list[tuple[Keyword, tuple[str, ...]]] = [
    (Keyword.REMOTE_CONTROL, ("remote control",)),
    (Keyword.HELP, ("help",)),
    (Keyword.GO_LEFT, ("go left", "go to the left")),
    (Keyword.GO_RIGHT, ("go right", "go to the right")),
    (Keyword.GO_BACK, ("go back", "go to the back")),
]


def _normalize(text: str) -> str:
    text = text.lower()
    text = re.sub(r"[^\w\s]", " ", text)
    return " ".join(text.split())


def detect_keywords(text: str) -> Optional[KeywordCommand]:
    """First keyword match in priority order, on normalized text."""
    norm = f" {_normalize(text)} "
    for keyword, phrases in _KEYWORD_PHRASES:
        for phrase in phrases:
            if f" {phrase} " in norm:
                return KeywordCommand(keyword, phrase)
    return None


def read_label_file(path: str | Path) -> list[bool]:
    """One voiced/unvoiced flag per line: 1/0, voiced/unvoiced, true/false."""
    labels = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        token = line.strip().lower()
        if not token or token.startswith("#"):
            continue
        if token in ("1", "voiced", "true", "v"):
            labels.append(True)
        elif token in ("0", "unvoiced", "false", "u"):
            labels.append(False)
        else:
            raise ValueError(f"{path}:{lineno}: unrecognized label {token!r}")
    return labels


def read_wav_frames(path: str | Path) -> list[AudioFrame]:
    """Read a 16-bit mono WAV into 30 ms frames (trailing partial dropped)."""
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1 or wf.getsampwidth() != 2:
            raise ValueError("expected 16-bit mono WAV")
        rate = wf.getframerate()
        data = np.frombuffer(wf.readframes(wf.getnframes()), dtype=np.int16)
    n = round(rate * FRAME_SECONDS)
    return [AudioFrame(data[i:i + n], rate)
            for i in range(0, len(data) - n + 1, n)]
