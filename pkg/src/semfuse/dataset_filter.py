"""Single-speaker filtering, emotion-agreement filtering, and splitting.

Reproduces the construction of a filtered emotional dataset: keep one
speaker, keep utterances whose annotated emotion matches the label an
LM predicted from the transcript, then split deterministically.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .tensor_io import UtteranceRecord

logger = logging.getLogger(__name__)


@dataclass
class SplitSpec:
    train_fraction: float
    dev_fraction: float
    test_fraction: float
    seed: int = 0

    def __post_init__(self):
        fractions = (self.train_fraction, self.dev_fraction, self.test_fraction)
        if any(f <= 0 for f in fractions):
            raise ValueError(f"all fractions must be positive, got {fractions}")
        if abs(sum(fractions) - 1.0) > 1e-12:
            raise ValueError(f"fractions must sum to 1, got {sum(fractions)}")


def filter_by_speaker(records, speaker_id: str) -> list[UtteranceRecord]:
    """Keep records whose manifest ``speaker`` field matches, order preserved."""
    kept = [r for r in records if r.extra.get("speaker") == speaker_id]
    if not kept:
        logger.warning("no records matched speaker %r", speaker_id)
    return kept


def filter_by_emotion_agreement(records) -> list[UtteranceRecord]:
    """Keep records whose annotated and predicted emotions agree.

    Comparison is case-insensitive after trimming. Records missing
    either label are dropped; the drop count is logged.
    """
    kept = []
    missing = 0
    for record in records:
        if record.emotion_annotated is None or record.emotion_predicted is None:
            missing += 1
            continue
        annotated = record.emotion_annotated.strip().lower()
        predicted = record.emotion_predicted.strip().lower()
        if annotated == predicted:
            kept.append(record)
    if missing:
        logger.warning("dropped %d records missing an emotion label", missing)
    return kept


def split(records, spec: SplitSpec, by_duration: bool = False):
    """Deterministic (train, dev, test) partition.

    Records are shuffled by ``spec.seed`` and cut contiguously. By
    default the cut points are record counts (floored for train and
    dev, remainder to test); with ``by_duration`` the cuts track each
    record's ``duration`` manifest field instead, so the partition
    approximates the requested time fractions.
    """
    records = list(records)
    n = len(records)
    if n < 3:
        raise ValueError(f"need at least 3 records to split, got {n}")
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)
    shuffled = [records[i] for i in order]

    if by_duration:
        durations = []
        for record in shuffled:
            value = record.extra.get("duration")
            if value is None:
                raise ValueError(
                    f"record {record.utt_id!r} has no duration field; "
                    "duration-weighted split needs one per record"
                )
            durations.append(float(value))
        total = sum(durations)
        cumulative = np.cumsum(durations)
        train_end = int(np.searchsorted(cumulative, spec.train_fraction * total, side="right"))
        dev_end = int(
            np.searchsorted(
                cumulative, (spec.train_fraction + spec.dev_fraction) * total, side="right"
            )
        )
        dev_end = max(dev_end, train_end)
    else:
        # floor with a hair of slack so exact thirds of 3 stay 1/1/1
        train_end = int(spec.train_fraction * n + 1e-9)
        dev_end = train_end + int(spec.dev_fraction * n + 1e-9)

    return shuffled[:train_end], shuffled[train_end:dev_end], shuffled[dev_end:]
