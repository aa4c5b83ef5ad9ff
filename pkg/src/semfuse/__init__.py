"""Semantic token extraction, acoustic fusion, and objective TTS evaluation."""

from .tensor_io import (
    ArrayFormatError,
    ManifestError,
    UtteranceRecord,
    read_array,
    read_manifest,
    write_array,
    write_manifest,
)
from .strategies import (
    GlobalToken,
    SemanticSequence,
    extract_ave,
    extract_eis_sentence,
    extract_eis_word,
    extract_last,
    extract_pca,
    make_sequence,
    principal_axis,
)
from .fusion import (
    FusedEmbedding,
    FusionConfig,
    MaskPair,
    ProjectionMatrix,
    fuse_global,
    fuse_sequential,
    fuse_sequential_backward,
    init_projection,
    project,
)
from .prompts import (
    PromptTemplate,
    build_eis_sentence_prompt,
    build_eis_word_prompt,
    build_emotion_label_prompt,
)
from .metrics import (
    AnalysisConfig,
    EditStats,
    MelCepstra,
    cer,
    dtw_align,
    edit_stats,
    mcd,
    mel_cepstra_from_audio,
    wer,
)
from .dataset_filter import SplitSpec, filter_by_emotion_agreement, filter_by_speaker, split
from .report import format_mean_std, summarize, write_report

__version__ = "0.1.0"
