"""INI-backed configuration: rule files for the annotators and experiment
files for the curve harness.

Rule file sections: ``[date]`` (keywords, months, connectors,
conjunctions, max_gap), one ``[gazetteer.TYPE]`` per entity type (path,
min_token_length, lowercase, fold_diacritics), ``[topic]`` (dict_dir,
stage_one, classes, abstain_on_empty, tie_seed), optional ``[ner]``
(priority). List values are whitespace-separated, which keeps "," usable
as a connector token. All paths are resolved relative to the INI file.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .annotate import (
    DEFAULT_TYPE_PRIORITY,
    DateMatcher,
    GazetteerMatcher,
    NerRuleAnnotator,
    TopicRuleAnnotator,
)
from .corpus import NER, TOPIC, ParseError
from .lexicon import load_gazetteer, load_keyword_overrides, load_topic_lexicon

GAZETTEER_PREFIX = "gazetteer."

_BOOL_WORDS = {
    "true": True,
    "on": True,
    "yes": True,
    "1": True,
    "false": False,
    "off": False,
    "no": False,
    "0": False,
}


def read_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    parser.optionxform = str
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from None
    return parser


def _listify(value: str) -> tuple[str, ...]:
    return tuple(value.split())


def _boolify(value: str, context: str) -> bool:
    try:
        return _BOOL_WORDS[value.strip().lower()]
    except KeyError:
        raise ParseError(f"{context}: expected a boolean, got {value!r}") from None


def _intify(value: str, context: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{context}: expected an integer, got {value!r}") from None


def _floatify(value: str, context: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"{context}: expected a number, got {value!r}") from None


def _resolve(base: Path, value: str) -> Path:
    return (base / value).resolve() if not Path(value).is_absolute() else Path(value)


def load_ner_annotator(path) -> NerRuleAnnotator:
    """Build the NER rule annotator from gazetteer and date sections."""
    path = Path(path)
    parser = read_ini(path)
    base = path.parent
    matchers = []
    for section in parser.sections():
        if not section.startswith(GAZETTEER_PREFIX):
            continue
        etype = section[len(GAZETTEER_PREFIX) :]
        if not etype:
            raise ParseError(f"{path}: gazetteer section without an entity type")
        opts = parser[section]
        if "path" not in opts:
            raise ParseError(f"{path}: [{section}] is missing 'path'")
        gaz = load_gazetteer(
            _resolve(base, opts["path"]),
            etype=etype,
            min_token_length=_intify(
                opts.get("min_token_length", "1"), f"{path} [{section}]"
            ),
            lowercase=_boolify(opts.get("lowercase", "false"), f"{path} [{section}]"),
            fold_diacritics=_boolify(
                opts.get("fold_diacritics", "false"), f"{path} [{section}]"
            ),
        )
        matchers.append(GazetteerMatcher(gaz))
    if parser.has_section("date"):
        opts = parser["date"]
        if "keywords" not in opts:
            raise ParseError(f"{path}: [date] is missing 'keywords'")
        matchers.append(
            DateMatcher(
                keywords=frozenset(_listify(opts["keywords"])),
                months=frozenset(_listify(opts.get("months", ""))),
                connectors=frozenset(_listify(opts.get("connectors", ""))),
                conjunctions=frozenset(_listify(opts.get("conjunctions", ""))),
                max_gap=_intify(opts.get("max_gap", "2"), f"{path} [date]"),
            )
        )
    if not matchers:
        raise ParseError(f"{path}: no [gazetteer.*] or [date] sections found")
    priority = DEFAULT_TYPE_PRIORITY
    if parser.has_section("ner") and "priority" in parser["ner"]:
        priority = _listify(parser["ner"]["priority"])
    return NerRuleAnnotator(matchers, priority=priority)


def load_topic_annotator(path) -> TopicRuleAnnotator:
    """Build the topic rule annotator from the [topic] section."""
    path = Path(path)
    parser = read_ini(path)
    if not parser.has_section("topic"):
        raise ParseError(f"{path}: no [topic] section found")
    opts = parser["topic"]
    if "dict_dir" not in opts:
        raise ParseError(f"{path}: [topic] is missing 'dict_dir'")
    classes = _listify(opts["classes"]) if "classes" in opts else None
    lexicon = load_topic_lexicon(_resolve(path.parent, opts["dict_dir"]), classes)
    overrides = ()
    if "stage_one" in opts:
        overrides = load_keyword_overrides(_resolve(path.parent, opts["stage_one"]))
    return TopicRuleAnnotator(
        lexicon,
        overrides=overrides,
        tie_seed=_intify(opts.get("tie_seed", "0"), f"{path} [topic]"),
        abstain_on_empty=_boolify(
            opts.get("abstain_on_empty", "true"), f"{path} [topic]"
        ),
    )


def load_annotator(path, task: str):
    if task == NER:
        return load_ner_annotator(path)
    if task == TOPIC:
        return load_topic_annotator(path)
    raise ValueError(f"unknown task {task!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    """Parsed [experiment] section; paths already resolved.

    ``sizes`` of None means "use the default ladder for the training-set
    size" and is resolved once the data is loaded.
    """

    task: str
    train_path: Path
    dev_path: Path
    rules_path: Path | None
    embeddings_path: Path | None
    hash_dim: int
    out_dir: Path
    sizes: tuple[int, ...] | None
    n_seeds: int
    settings: tuple[str, ...]
    master_seed: int
    beta: float
    max_reseeds: int
    n_epochs: int
    learning_rate: float | None
    init_bound: float
    dev_downsize: bool


def load_experiment_config(path) -> ExperimentSpec:
    path = Path(path)
    parser = read_ini(path)
    if not parser.has_section("experiment"):
        raise ParseError(f"{path}: no [experiment] section found")
    opts = parser["experiment"]
    ctx = f"{path} [experiment]"

    def require(key: str) -> str:
        if key not in opts:
            raise ParseError(f"{ctx}: missing required key {key!r}")
        return opts[key]

    task = require("task").strip()
    if task not in (NER, TOPIC):
        raise ParseError(f"{ctx}: task must be 'ner' or 'topic', got {task!r}")
    base = path.parent
    lr = opts.get("learning_rate", "").strip()
    return ExperimentSpec(
        task=task,
        train_path=_resolve(base, require("train")),
        dev_path=_resolve(base, require("dev")),
        rules_path=_resolve(base, opts["rules"]) if "rules" in opts else None,
        embeddings_path=(
            _resolve(base, opts["embeddings"]) if "embeddings" in opts else None
        ),
        hash_dim=_intify(opts.get("hash_dim", "32"), ctx),
        out_dir=_resolve(base, opts.get("out_dir", ".")),
        sizes=(
            tuple(_intify(v, ctx) for v in _listify(opts["sizes"]))
            if "sizes" in opts
            else None
        ),
        n_seeds=_intify(opts.get("seeds", "10"), ctx),
        settings=_listify(opts.get("settings", "clean distant")),
        master_seed=_intify(opts.get("master_seed", "0"), ctx),
        beta=_floatify(opts.get("beta", "0.8"), ctx),
        max_reseeds=_intify(opts.get("max_reseeds", "3"), ctx),
        n_epochs=_intify(opts.get("epochs", "50"), ctx),
        learning_rate=_floatify(lr, ctx) if lr else None,
        init_bound=_floatify(opts.get("init_bound", "0.1"), ctx),
        dev_downsize=_boolify(opts.get("dev_downsize", "on"), ctx),
    )
