"""weaksup: distant supervision and noisy-label learning for low-resource
NER and topic classification.

The pieces fit together as a pipeline: rule annotators produce weak
labels, a confusion matrix estimated on a small clean set models their
errors, and a linear classifier trains on clean and weak data jointly by
composing its output with that noise channel. Evaluation covers CoNLL
span F1, classification metrics, and multi-seed learning curves.
"""

from .annotate import (
    DateMatcher,
    GazetteerMatcher,
    NerRuleAnnotator,
    TopicRuleAnnotator,
    merge_span_layers,
)
from .corpus import (
    Dataset,
    Sentence,
    Span,
    SplitSpec,
    Token,
    downsample,
    downsized_dev_target,
    drop_abstained,
    extract_spans,
    parse_conll,
    parse_topic_tsv,
    project_labels,
    repair_bio,
    spans_to_tags,
    split_dataset,
    tag_alphabet,
    tokenize,
    write_conll,
    write_topic_tsv,
)
from .embeddings import (
    HashedEmbeddings,
    WordEmbeddings,
    load_word_embeddings,
    ner_features,
    topic_features,
)
from .experiment import (
    CurveConfig,
    CurveResult,
    DegenerateRunsError,
    run_learning_curve,
    write_curve_outputs,
)
from .lexicon import (
    Gazetteer,
    TopicLexicon,
    build_gazetteer,
    build_topic_lexicon,
    load_gazetteer,
    load_keyword_overrides,
    load_topic_lexicon,
)
from .metrics import (
    PRF,
    aggregate_runs,
    classification_prf,
    convergence_filter,
    macro_f1,
    micro_f1,
    per_type_span_prf,
    span_f1,
    span_prf,
)
from .model import (
    EpochRecord,
    NoisyChannelClassifier,
    Part,
    epoch_noisy_indices,
    load_checkpoint,
    mixed_loss_and_gradients,
    save_checkpoint,
    softmax,
)
from .noise import (
    apply_noise_channel,
    estimate_confusion_matrix,
    identity_channel,
    read_confusion_tsv,
    smooth_confusion_matrix,
    write_confusion_tsv,
)

__version__ = "0.1.0"

__all__ = [
    "DateMatcher",
    "GazetteerMatcher",
    "NerRuleAnnotator",
    "TopicRuleAnnotator",
    "merge_span_layers",
    "Dataset",
    "Sentence",
    "Span",
    "SplitSpec",
    "Token",
    "downsample",
    "downsized_dev_target",
    "drop_abstained",
    "extract_spans",
    "parse_conll",
    "parse_topic_tsv",
    "project_labels",
    "repair_bio",
    "spans_to_tags",
    "split_dataset",
    "tag_alphabet",
    "tokenize",
    "write_conll",
    "write_topic_tsv",
    "HashedEmbeddings",
    "WordEmbeddings",
    "load_word_embeddings",
    "ner_features",
    "topic_features",
    "CurveConfig",
    "CurveResult",
    "DegenerateRunsError",
    "run_learning_curve",
    "write_curve_outputs",
    "Gazetteer",
    "TopicLexicon",
    "build_gazetteer",
    "build_topic_lexicon",
    "load_gazetteer",
    "load_keyword_overrides",
    "load_topic_lexicon",
    "PRF",
    "aggregate_runs",
    "classification_prf",
    "convergence_filter",
    "macro_f1",
    "micro_f1",
    "per_type_span_prf",
    "span_f1",
    "span_prf",
    "EpochRecord",
    "NoisyChannelClassifier",
    "Part",
    "epoch_noisy_indices",
    "load_checkpoint",
    "mixed_loss_and_gradients",
    "save_checkpoint",
    "softmax",
    "apply_noise_channel",
    "estimate_confusion_matrix",
    "identity_channel",
    "read_confusion_tsv",
    "smooth_confusion_matrix",
    "write_confusion_tsv",
    "__version__",
]
