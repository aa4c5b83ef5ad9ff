"""Prompt template construction and answer post-processing."""

import pytest

from semfuse import prompts
from semfuse.prompts import PromptTemplate, TemplateError


class TestEisWordPrompt:
    def test_substitution(self):
        tpl = PromptTemplate("EIS_WORD", "Describe the feeling of: {transcript}")
        assert (
            prompts.build_eis_word_prompt("Hello.", tpl)
            == "Describe the feeling of: Hello."
        )

    def test_braces_preserved_literally(self):
        tpl = PromptTemplate("EIS_WORD", "T: {transcript}")
        built = prompts.build_eis_word_prompt("a {weird} one", tpl)
        assert "{weird}" in built

    def test_default_template_splices_exactly_once(self):
        built = prompts.build_eis_word_prompt("I hate this!")
        assert built.count("I hate this!") == 1
        assert "three words" in built

    def test_empty_transcript_rejected(self):
        with pytest.raises(ValueError):
            prompts.build_eis_word_prompt("")

    def test_placeholder_required_exactly_once(self):
        with pytest.raises(TemplateError):
            PromptTemplate("EIS_WORD", "no placeholder here")
        with pytest.raises(TemplateError):
            PromptTemplate("EIS_WORD", "{transcript} and {transcript}")


class TestEisSentencePrompt:
    def test_substitution(self):
        tpl = PromptTemplate("EIS_SENTENCE", "Explain: {transcript}")
        assert prompts.build_eis_sentence_prompt("Go on.", tpl) == "Explain: Go on."

    def test_default_single_occurrence(self):
        built = prompts.build_eis_sentence_prompt("An odd, odd day.")
        assert built.count("An odd, odd day.") == 1
        assert "sentence" in built


class TestEmotionLabelPrompt:
    def test_default_labels_all_present(self):
        built = prompts.build_emotion_label_prompt("Why me?")
        for label in ("amused", "angry", "disgusted", "neutral", "sleepy"):
            assert label in built

    def test_single_label(self):
        built = prompts.build_emotion_label_prompt("ok", ["neutral"])
        assert "neutral" in built

    def test_transcript_spliced_once(self):
        built = prompts.build_emotion_label_prompt("watch the dog")
        assert built.count("watch the dog") == 1

    def test_empty_labels_rejected(self):
        with pytest.raises(ValueError):
            prompts.build_emotion_label_prompt("hi", [])


class TestTemplatesAsData:
    def test_file_template_matches_in_memory(self, tmp_path):
        text = "Custom lead-in.\nSay it: {transcript}\nEnd."
        target = tmp_path / "tpl.txt"
        target.write_text(text, encoding="utf-8")
        from_file = PromptTemplate.from_file("EIS_WORD", target)
        in_memory = PromptTemplate("EIS_WORD", text)
        assert (
            prompts.build_eis_word_prompt("Same input.", from_file)
            == prompts.build_eis_word_prompt("Same input.", in_memory)
        )


class TestAnswerParsing:
    def test_three_words(self):
        assert prompts.parse_three_words(" Happy, Greeting, Calm ") == (
            "happy", "greeting", "calm",
        )

    def test_wrong_word_count_rejected(self):
        with pytest.raises(ValueError, match="three words"):
            prompts.parse_three_words("only two")

    def test_sentence_nonempty(self):
        assert prompts.parse_sentence("  A calm warning.  ") == "A calm warning."
        with pytest.raises(ValueError):
            prompts.parse_sentence("   ")

    def test_label_must_be_known(self):
        assert prompts.parse_label(" Angry. ") == "angry"
        with pytest.raises(ValueError, match="not one of"):
            prompts.parse_label("furious")
