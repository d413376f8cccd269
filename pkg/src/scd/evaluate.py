"""VQA accuracy metric, answer normalization, and script-aware reporting.

The accuracy metric is the one used by the VQA challenge evaluation script:
for a prediction and 10 annotator answers, average min(1, matches/3) over
all ten leave-one-out subsets of 9 annotators, with answers compared after
normalization. Because every subset score is min(3, matches)/3, the whole
metric reduces to an integer numerator over 30, which we compute exactly.

Reports break accuracy down per language and per script category
(Roman-mono, nonRoman-mono, CS-romanized, CS-mixed-script) and expose the
two headline gaps: Roman vs non-Roman monolingual, and code-switched vs
monolingual counterpart. Gaps over empty categories are None, never 0.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import SCRIPT_ROMAN, detect_script
from .errors import ValidationError
from .hashing import canonical_json

REPORT_VERSION = 1

CATEGORIES = ("Roman-mono", "nonRoman-mono", "CS-romanized", "CS-mixed-script")

_ARTICLES = {"a", "an", "the"}

_NUMBER_WORDS = {
    "zero": "0",
    "one": "1",
    "two": "2",
    "three": "3",
    "four": "4",
    "five": "5",
    "six": "6",
    "seven": "7",
    "eight": "8",
    "nine": "9",
    "ten": "10",
}

_PUNCT_TABLE = str.maketrans("", "", ".,?!;:'\"()")


def normalize_answer(answer: str) -> str:
    """Canonical answer form: lowercase, punctuation stripped, articles
    dropped, number words zero..ten mapped to digits, whitespace collapsed."""
    text = answer.lower().translate(_PUNCT_TABLE)
    tokens = []
    for tok in text.split():
        if tok in _ARTICLES:
            continue
        tokens.append(_NUMBER_WORDS.get(tok, tok))
    return " ".join(tokens)


def vqa_accuracy(prediction: str, annotator_answers) -> float:
    """Leave-one-out VQA accuracy of one prediction against 10 annotators.

    With m annotators matching the (normalized) prediction, dropping a
    matching annotator leaves m-1 matches and dropping a non-matching one
    leaves m, so the sum of the ten subset scores min(3, matches)/3 is
    (m*min(3, m-1) + (10-m)*min(3, m)) / 3. Integer arithmetic until the
    final division keeps the result exact.
    """
    answers = list(annotator_answers)
    if len(answers) != 10:
        raise ValidationError(f"expected exactly 10 annotator answers, got {len(answers)}")
    target = normalize_answer(prediction)
    m = sum(1 for a in answers if normalize_answer(a) == target)
    numerator = m * min(3, m - 1) + (10 - m) * min(3, m)
    return numerator / 30


def script_category(language: str, script: str) -> str:
    """Map a (language tag, script tag) pair onto one of the four report
    categories. `xx-en` tags are code-switched; everything else monolingual."""
    if language.endswith("-en"):
        return "CS-romanized" if script == SCRIPT_ROMAN else "CS-mixed-script"
    return "Roman-mono" if script == SCRIPT_ROMAN else "nonRoman-mono"


def _mean(values):
    return sum(values) / len(values) if values else None


def _pstd(values):
    if not values:
        return None
    mu = sum(values) / len(values)
    return (sum((v - mu) ** 2 for v in values) / len(values)) ** 0.5


@dataclass
class EvalReport:
    """Aggregated accuracy report for one evaluation (or a mean over runs)."""

    per_example: list = field(default_factory=list)
    per_language: dict = field(default_factory=dict)
    per_category: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    roman_gap: float | None = None
    cs_gap: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    n_runs: int = 1
    format_version: int = REPORT_VERSION

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "per_example": self.per_example,
            "per_language": self.per_language,
            "per_category": self.per_category,
            "rows": self.rows,
            "roman_gap": self.roman_gap,
            "cs_gap": self.cs_gap,
            "counts": self.counts,
            "metadata": self.metadata,
            "n_runs": self.n_runs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        if data.get("format_version") != REPORT_VERSION:
            from .errors import VersionError

            raise VersionError(
                f"unsupported report version {data.get('format_version')!r}"
            )
        return cls(
            per_example=data["per_example"],
            per_language=data["per_language"],
            per_category=data["per_category"],
            rows=data["rows"],
            roman_gap=data["roman_gap"],
            cs_gap=data["cs_gap"],
            counts=data["counts"],
            metadata=data["metadata"],
            n_runs=data["n_runs"],
        )

    def save(self, path) -> None:
        Path(path).write_text(canonical_json(self.to_dict()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "EvalReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _build_report(scored, metadata) -> EvalReport:
    """Assemble an EvalReport from per-example dicts with keys
    example_id/language/script/category/accuracy."""
    by_language: dict[str, list[float]] = {}
    by_category: dict[str, list[float]] = {}
    by_lang_cat: dict[tuple[str, str], list[float]] = {}
    for row in scored:
        by_language.setdefault(row["language"], []).append(row["accuracy"])
        by_category.setdefault(row["category"], []).append(row["accuracy"])
        by_lang_cat.setdefault((row["language"], row["category"]), []).append(row["accuracy"])

    per_language = {lang: _mean(v) for lang, v in sorted(by_language.items())}
    per_category = {cat: _mean(by_category.get(cat)) for cat in CATEGORIES}
    counts = {cat: len(by_category.get(cat, [])) for cat in CATEGORIES}

    roman_gap = None
    if per_category["Roman-mono"] is not None and per_category["nonRoman-mono"] is not None:
        roman_gap = per_category["Roman-mono"] - per_category["nonRoman-mono"]

    cs_gap = {}
    for lang in per_language:
        if not lang.endswith("-en"):
            continue
        counterpart = lang[: -len("-en")]
        if counterpart in per_language:
            cs_gap[lang] = per_language[lang] - per_language[counterpart]
        else:
            cs_gap[lang] = None

    rows = [
        {
            "language": lang,
            "category": cat,
            "mean_accuracy": _mean(vals),
            "std": 0.0,
        }
        for (lang, cat), vals in sorted(by_lang_cat.items())
    ]

    return EvalReport(
        per_example=list(scored),
        per_language=per_language,
        per_category=per_category,
        rows=rows,
        roman_gap=roman_gap,
        cs_gap=cs_gap,
        counts=counts,
        metadata=dict(metadata or {}),
    )


def evaluate_model(ckpt, dataset, split="test", vocab=None, languages=None, metadata=None) -> EvalReport:
    """Score a checkpoint on one dataset split.

    Predictions see the target question only (never a concatenated prompt):
    the question string passed to the model is exactly `example.question`.
    """
    from .model import predict_batch

    vocab = vocab if vocab is not None else dataset.vocab
    if vocab is None:
        raise ValidationError("no answer vocabulary available for evaluation")
    examples = [ex for ex in dataset.split(split) if languages is None or ex.language in languages]
    if not examples:
        raise ValidationError(f"split {split!r} has no examples to evaluate")

    inputs = [(ex.question, dataset.features.get(ex.image_id)) for ex in examples]
    predictions = predict_batch(ckpt, inputs, vocab)

    scored = []
    for ex, pred in zip(examples, predictions):
        scored.append(
            {
                "example_id": ex.example_id,
                "language": ex.language,
                "script": ex.script,
                "category": script_category(ex.language, ex.script),
                "accuracy": vqa_accuracy(pred.answer, ex.answers),
            }
        )

    meta = {"split": split, "n_examples": len(scored)}
    meta.update(ckpt.provenance.get("stage") and {"model_stage": ckpt.provenance["stage"]} or {})
    meta.update(metadata or {})
    return _build_report(scored, meta)


def evaluate_predictions(records, metadata=None) -> EvalReport:
    """Build a report from already-scored (prediction, example) pairs.

    `records` yields dicts with example_id, language, question, answers and
    prediction; script is recomputed from the question text.
    """
    scored = []
    for rec in records:
        script = detect_script(rec["question"])
        scored.append(
            {
                "example_id": rec["example_id"],
                "language": rec["language"],
                "script": script,
                "category": script_category(rec["language"], script),
                "accuracy": vqa_accuracy(rec["prediction"], rec["answers"]),
            }
        )
    return _build_report(scored, metadata)


def aggregate_runs(reports) -> EvalReport:
    """Unweighted mean of per-category/per-language means across runs, with
    population standard deviation per entry."""
    reports = list(reports)
    if not reports:
        raise ValidationError("no reports to aggregate")

    key_sets = [tuple(sorted((r["language"], r["category"]) for r in rep.rows)) for rep in reports]
    if len(set(key_sets)) != 1:
        raise ValidationError("reports do not share the same language/category structure")
    lang_sets = [tuple(sorted(rep.per_language)) for rep in reports]
    if len(set(lang_sets)) != 1:
        raise ValidationError("reports do not share the same language set")

    per_language = {}
    language_std = {}
    for lang in reports[0].per_language:
        vals = [rep.per_language[lang] for rep in reports]
        per_language[lang] = _mean(vals)
        language_std[lang] = _pstd(vals)

    per_category = {}
    category_std = {}
    for cat in CATEGORIES:
        vals = [rep.per_category[cat] for rep in reports]
        if any(v is None for v in vals):
            per_category[cat] = None
            category_std[cat] = None
        else:
            per_category[cat] = _mean(vals)
            category_std[cat] = _pstd(vals)

    roman_gap = None
    if per_category["Roman-mono"] is not None and per_category["nonRoman-mono"] is not None:
        roman_gap = per_category["Roman-mono"] - per_category["nonRoman-mono"]

    cs_gap = {}
    for lang in per_language:
        if not lang.endswith("-en"):
            continue
        counterpart = lang[: -len("-en")]
        cs_gap[lang] = (
            per_language[lang] - per_language[counterpart] if counterpart in per_language else None
        )

    rows = []
    for key in sorted({(r["language"], r["category"]) for r in reports[0].rows}):
        vals = []
        for rep in reports:
            for r in rep.rows:
                if (r["language"], r["category"]) == key:
                    vals.append(r["mean_accuracy"])
        rows.append(
            {
                "language": key[0],
                "category": key[1],
                "mean_accuracy": _mean(vals),
                "std": _pstd(vals),
            }
        )

    counts = dict(reports[0].counts)
    metadata = {
        "aggregated_from": [rep.metadata for rep in reports],
        "language_std": language_std,
        "category_std": category_std,
    }
    return EvalReport(
        per_example=[],
        per_language=per_language,
        per_category=per_category,
        rows=rows,
        roman_gap=roman_gap,
        cs_gap=cs_gap,
        counts=counts,
        metadata=metadata,
        n_runs=len(reports),
    )


def emit_plot_data(report: EvalReport, path) -> None:
    """Write the report's per-(language, category) table as CSV, rows sorted
    by language then category. Floats are written with full repr precision so
    a parse of the file reproduces the report numbers exactly."""
    rows = sorted(report.rows, key=lambda r: (r["language"], r["category"]))
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["language", "category", "mean_accuracy", "std"])
        for row in rows:
            writer.writerow(
                [row["language"], row["category"], repr(row["mean_accuracy"]), repr(row["std"])]
            )
