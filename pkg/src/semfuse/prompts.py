"""Prompt construction for the LM-side dumper.

Three prompt families: ask for the emotion, intention, and speaking
style of a transcript as three words, as one plain sentence, or ask for
a single emotion label out of a fixed set. Substitution is literal
string splicing; templates are data and can be loaded from files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

EIS_WORD_NAME = "EIS_WORD"
EIS_SENTENCE_NAME = "EIS_SENTENCE"
EMOTION_LABEL_NAME = "EMOTION_LABEL"

DEFAULT_EMOTION_LABELS = ("amused", "angry", "disgusted", "neutral", "sleepy")

DEFAULT_EIS_WORD_TEMPLATE = (
    "Read the following transcript and answer with exactly three words, "
    "separated by spaces: one word for the Emotion it carries, one word "
    "for the Intention behind it, and one word for the speaking Style it "
    "suggests. Answer with the three words only.\n"
    "Transcript: {transcript}\n"
    "Answer:"
)

DEFAULT_EIS_SENTENCE_TEMPLATE = (
    "Read the following transcript and describe, in one short, "
    "easy-to-understand sentence, the Emotion it carries, the Intention "
    "behind it, and the speaking Style it suggests.\n"
    "Transcript: {transcript}\n"
    "Answer:"
)

DEFAULT_EMOTION_LABEL_TEMPLATE = (
    "Pick the single emotion label that best matches the following "
    "transcript. Answer with exactly one label from this list: {labels}.\n"
    "Transcript: {transcript}\n"
    "Answer:"
)


class TemplateError(ValueError):
    """Template is missing a required placeholder or has it repeated."""


@dataclass
class PromptTemplate:
    name: str
    template_text: str

    def __post_init__(self):
        self._require_once("{transcript}")
        if self.name == EMOTION_LABEL_NAME:
            self._require_once("{labels}")

    def _require_once(self, placeholder: str):
        count = self.template_text.count(placeholder)
        if count != 1:
            raise TemplateError(
                f"{self.name} template must contain {placeholder} exactly once, found {count}"
            )

    @classmethod
    def from_file(cls, name: str, path) -> "PromptTemplate":
        return cls(name, Path(path).read_text(encoding="utf-8"))


def _default_template(name: str) -> PromptTemplate:
    text = {
        EIS_WORD_NAME: DEFAULT_EIS_WORD_TEMPLATE,
        EIS_SENTENCE_NAME: DEFAULT_EIS_SENTENCE_TEMPLATE,
        EMOTION_LABEL_NAME: DEFAULT_EMOTION_LABEL_TEMPLATE,
    }[name]
    return PromptTemplate(name, text)


def _splice(template: PromptTemplate, transcript: str, labels=None) -> str:
    # plain replace, not str.format: braces in the transcript stay literal
    if not transcript:
        raise ValueError("transcript must be non-empty")
    text = template.template_text
    if labels is not None:
        text = text.replace("{labels}", ", ".join(labels))
    return text.replace("{transcript}", transcript)


def build_eis_word_prompt(transcript: str, tpl: PromptTemplate | None = None) -> str:
    """Prompt asking for three words: emotion, intention, speaking style."""
    tpl = tpl if tpl is not None else _default_template(EIS_WORD_NAME)
    return _splice(tpl, transcript)


def build_eis_sentence_prompt(transcript: str, tpl: PromptTemplate | None = None) -> str:
    """Prompt asking for one easy-to-understand descriptive sentence."""
    tpl = tpl if tpl is not None else _default_template(EIS_SENTENCE_NAME)
    return _splice(tpl, transcript)


def build_emotion_label_prompt(
    transcript: str, labels=DEFAULT_EMOTION_LABELS, tpl: PromptTemplate | None = None
) -> str:
    """Prompt asking for exactly one label from an ordered label list."""
    labels = tuple(labels)
    if not labels:
        raise ValueError("label list must be non-empty")
    tpl = tpl if tpl is not None else _default_template(EMOTION_LABEL_NAME)
    return _splice(tpl, transcript, labels=labels)


# --- answer post-processing ---------------------------------------------
#
# The dumper needs a deterministic contract for what counts as a usable
# answer: three words, a non-empty sentence, or one known label.


def parse_three_words(answer: str) -> tuple[str, str, str]:
    words = answer.strip().split()
    if len(words) != 3:
        raise ValueError(f"expected exactly three words, got {len(words)}: {answer!r}")
    return tuple(w.strip(".,;:!?").lower() for w in words)


def parse_sentence(answer: str) -> str:
    sentence = answer.strip()
    if not sentence:
        raise ValueError("expected a non-empty sentence")
    return sentence


def parse_label(answer: str, labels=DEFAULT_EMOTION_LABELS) -> str:
    label = answer.strip().strip(".,;:!?").lower()
    if label not in set(labels):
        raise ValueError(f"answer {answer!r} is not one of {tuple(labels)}")
    return label
