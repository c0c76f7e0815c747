"""Tests for corpus labels, datasets, TSV I/O and published statistics."""

import logging

import numpy as np
import pytest

from src.corpus.dataset import (
    Dataset,
    LabeledComment,
    Origin,
    Split,
    class_distribution,
    merge_all,
    merge_datasets,
    parse_tsv_record,
    serialize_record,
    validate_labels,
)
from src.corpus.io import load_split, read_tagged, serialize_dataset, write_dataset
from src.corpus.labels import LABEL_ALIASES, Language, OffenseLabel, parse_label
from src.corpus.stats import PUBLISHED_CLASS_COUNTS, compare_with_published, describe
from src.errors import (
    DataError,
    EmptyTextError,
    IoError,
    LabelParseError,
    LabelSetError,
    LanguageMismatchError,
    RecordError,
    UnlabeledSampleError,
)

NO = OffenseLabel.NOT_OFFENSIVE
OL = OffenseLabel.OTHER_LANGUAGE
OTO = OffenseLabel.TARGETED_OTHER
OU = OffenseLabel.UNTARGETED


def comment(text: str, label: OffenseLabel | None = NO, language: Language = Language.KANNADA) -> LabeledComment:
    return LabeledComment(text, label, language)


class TestLabels:
    """Tests for the label set and alias table."""

    def test_canonical_order(self):
        """Test labels sort in the fixed NO < OL < OTI < OTG < OTO < OU order."""
        assert [label.code for label in sorted(OffenseLabel, reverse=True)] == [
            "OU",
            "OTO",
            "OTG",
            "OTI",
            "OL",
            "NO",
        ]
        assert NO.index == 0 and OU.index == 5

    def test_malayalam_has_no_targeted_other(self):
        """Test Malayalam's label set omits OTO."""
        assert Language.MALAYALAM.num_classes == 5
        assert not Language.MALAYALAM.permits(OTO)
        assert Language.TAMIL.permits(OTO)

    @pytest.mark.parametrize(
        ("raw", "expected"),
        [
            ("not-Kannada", OL),
            ("not-malayalam", OL),
            ("not-Tamil", OL),
            ("Offensive_Untargetede", OU),
            ("Not_offensive", NO),
            (" NO ", NO),
        ],
    )
    def test_parse_aliases(self, raw, expected):
        """Test raw label spellings from the distributed files."""
        assert parse_label(raw) is expected

    def test_unknown_label(self):
        """Test an unregistered spelling raises LabelParseError."""
        with pytest.raises(LabelParseError):
            parse_label("Offensive")

    def test_alias_table_is_read_only(self):
        """Test the alias table cannot be modified."""
        with pytest.raises(TypeError):
            LABEL_ALIASES["x"] = NO  # type: ignore[index]


class TestRecords:
    """Tests for single-record parsing and serialization."""

    def test_label_after_last_tab(self):
        """Test texts may contain tabs; the label is the last field."""
        sample = parse_tsv_record("a\tb\tNot_offensive", Language.KANNADA, labeled=True)
        assert sample.text == "a\tb"
        assert sample.label is NO
        assert sample.origin is Origin.CODE_MIXED

    def test_unlabeled_record(self):
        """Test an unlabeled record keeps the whole line as text."""
        sample = parse_tsv_record("super padam", Language.TAMIL, labeled=False)
        assert sample.text == "super padam"
        assert sample.label is None

    def test_empty_text(self):
        """Test whitespace-only text is rejected."""
        with pytest.raises(EmptyTextError):
            parse_tsv_record("   \tNot_offensive", Language.KANNADA, labeled=True)

    def test_label_not_permitted(self):
        """Test OTO is rejected for Malayalam."""
        with pytest.raises(LabelSetError):
            parse_tsv_record("x\tOffensive_Targeted_Insult_Other", Language.MALAYALAM, labeled=True)

    def test_serialize_parse(self):
        """Test a serialized record parses back to the same comment."""
        original = comment("ondu\tcomment", OU)
        parsed = parse_tsv_record(serialize_record(original), Language.KANNADA, labeled=True)
        assert parsed == original


class TestDataset:
    """Tests for Dataset behavior."""

    def test_language_mismatch(self):
        """Test a dataset rejects samples of another language."""
        with pytest.raises(LanguageMismatchError):
            Dataset((comment("a"), comment("b", language=Language.TAMIL)), Language.KANNADA)

    def test_labels_require_gold(self):
        """Test labels() fails on unlabeled samples."""
        dataset = Dataset((comment("a"), comment("b", None)), Language.KANNADA)
        assert not dataset.is_labeled
        with pytest.raises(UnlabeledSampleError):
            dataset.labels()

    def test_class_distribution_covers_label_set(self):
        """Test every permitted label appears, zeros included, summing to the size."""
        dataset = Dataset((comment("a"), comment("b"), comment("c", OU)), Language.KANNADA)
        counts = class_distribution(dataset)
        assert list(counts) == list(Language.KANNADA.labels)
        assert counts[NO] == 2 and counts[OU] == 1 and counts[OL] == 0
        assert sum(counts.values()) == len(dataset)

    def test_validate_labels_flags_violations(self):
        """Test validate_labels reports labels outside the language's set."""
        dataset = Dataset(
            (comment("a", NO, Language.MALAYALAM), comment("b", OTO, Language.MALAYALAM)),
            Language.MALAYALAM,
        )
        result = validate_labels(dataset)
        assert not result.is_valid
        assert result.violations == [(1, OTO)]

    def test_merge_keeps_order(self):
        """Test merge places a's samples first and keeps a shared split."""
        a = Dataset((comment("a"), comment("b")), Language.KANNADA, Split.TRAIN)
        b = Dataset((comment("c"),), Language.KANNADA, Split.TRAIN)
        merged = merge_datasets(a, b)
        assert merged.texts() == ["a", "b", "c"]
        assert merged.split is Split.TRAIN
        assert merge_datasets(a, Dataset((), Language.KANNADA, Split.DEV)).split is Split.UNSPLIT

    def test_merge_all_left_fold(self):
        """Test merge_all concatenates in sequence order."""
        parts = [Dataset((comment(t),), Language.KANNADA) for t in "xyz"]
        assert merge_all(parts).texts() == ["x", "y", "z"]

    def test_merge_language_mismatch(self):
        """Test merging different languages fails."""
        with pytest.raises(LanguageMismatchError):
            merge_datasets(Dataset((), Language.KANNADA), Dataset((), Language.TAMIL))

    def test_shuffled_is_permutation(self):
        """Test shuffling keeps the multiset of samples and is seed-determined."""
        dataset = Dataset(tuple(comment(str(i)) for i in range(20)), Language.KANNADA)
        first = dataset.shuffled(np.random.default_rng(3))
        second = dataset.shuffled(np.random.default_rng(3))
        assert sorted(first.texts()) == sorted(dataset.texts())
        assert first.texts() == second.texts()

    def test_filter_origin(self):
        """Test filter_origin selects by origin tag."""
        tra = LabeledComment("ಸೂಪರ್", NO, Language.KANNADA, Origin.TRANSLITERATED)
        dataset = Dataset((comment("super"), tra), Language.KANNADA)
        assert dataset.filter_origin(Origin.TRANSLITERATED).texts() == ["ಸೂಪರ್"]


class TestLoadSplit:
    """Tests for reading corpus files."""

    def test_header_crlf_and_blank_lines(self, tmp_path, caplog):
        """Test header skipping, CRLF endings and warned blank lines."""
        path = tmp_path / "train.tsv"
        path.write_bytes(
            "text\tlabel\r\nsuper padam\tNot_offensive\r\n\r\nwaste\tnot-Kannada\r\n".encode()
        )
        with caplog.at_level(logging.WARNING):
            dataset = load_split(path, Language.KANNADA, Split.TRAIN)
        assert dataset.texts() == ["super padam", "waste"]
        assert dataset.labels() == [NO, OL]
        assert dataset.split is Split.TRAIN
        assert "blank line 3" in caplog.text

    def test_record_error_carries_line_number(self, tmp_path):
        """Test a bad label is reported with its file line."""
        path = tmp_path / "bad.tsv"
        path.write_text("a\tNot_offensive\nb\tbogus\n", encoding="utf-8")
        with pytest.raises(RecordError) as exc_info:
            load_split(path, Language.KANNADA, Split.TRAIN)
        assert exc_info.value.line_number == 2
        assert exc_info.value.code == "LabelParseError"
        assert exc_info.value.exit_code == 2

    def test_missing_file(self, tmp_path):
        """Test a missing file is an IoError."""
        with pytest.raises(IoError):
            load_split(tmp_path / "nope.tsv", Language.KANNADA, Split.TRAIN)

    def test_invalid_utf8(self, tmp_path):
        """Test undecodable bytes are an IoError."""
        path = tmp_path / "latin1.tsv"
        path.write_bytes(b"caf\xe9\tNot_offensive\n")
        with pytest.raises(IoError):
            load_split(path, Language.KANNADA, Split.TRAIN)

    def test_unicode_line_separator_stays_in_text(self, tmp_path):
        """Test only LF/CRLF end records."""
        path = tmp_path / "sep.tsv"
        path.write_text("one\u2028two\tNot_offensive\n", encoding="utf-8")
        dataset = load_split(path, Language.KANNADA, Split.TRAIN)
        assert dataset.texts() == ["one\u2028two"]

    def test_write_then_load(self, tmp_path):
        """Test a written two-column file loads back identically."""
        dataset = Dataset((comment("a b"), comment("c", OU)), Language.KANNADA, Split.TRAIN)
        path = write_dataset(dataset, tmp_path / "out.tsv")
        assert load_split(path, Language.KANNADA, Split.TRAIN) == dataset

    def test_tagged_format(self, tmp_path):
        """Test the three-column format keeps origin tags."""
        tra = LabeledComment("ಸೂಪರ್", OU, Language.KANNADA, Origin.TRANSLITERATED)
        dataset = Dataset((comment("super"), tra), Language.KANNADA, Split.TRAIN)
        path = write_dataset(dataset, tmp_path / "tagged.tsv", with_origin=True)
        assert serialize_dataset(dataset, with_origin=True).splitlines()[1] == (
            "ಸೂಪರ್\tOffensive_Untargeted\ttra"
        )
        assert read_tagged(path, Language.KANNADA) == dataset

    def test_tagged_unknown_origin(self, tmp_path):
        """Test an unknown origin tag is a data error."""
        path = tmp_path / "tagged.tsv"
        path.write_text("a\tNot_offensive\tweb\n", encoding="utf-8")
        with pytest.raises(DataError):
            read_tagged(path, Language.KANNADA)


def published_dataset(language: Language, split: Split) -> Dataset:
    samples = []
    for label, count in PUBLISHED_CLASS_COUNTS[language][split].items():
        samples += [LabeledComment(f"comment {i}", label, language) for i in range(count)]
    return Dataset(tuple(samples), language, split)


class TestPublishedStatistics:
    """Tests for comparisons with the published corpus tables."""

    def test_kannada_train_matches(self):
        """Test a Kannada train split with the published counts has no discrepancies."""
        dataset = published_dataset(Language.KANNADA, Split.TRAIN)
        assert len(dataset) == 6_217
        assert class_distribution(dataset)[NO] == 3_544
        assert compare_with_published(dataset) == []

    def test_kannada_test_size_warning(self, caplog):
        """Test the Kannada test split's 778 vs 768 gap surfaces as one warning."""
        dataset = published_dataset(Language.KANNADA, Split.TEST)
        with caplog.at_level(logging.WARNING):
            discrepancies = compare_with_published(dataset)
        assert len(discrepancies) == 1
        assert discrepancies[0].quantity == "size"
        assert (discrepancies[0].expected, discrepancies[0].actual) == (778, 768)
        assert "published 778, found 768" in caplog.text

    def test_tamil_test_class_total_gap(self):
        """Test the Tamil test class counts (4,397) disagree with the listed 4,392."""
        dataset = published_dataset(Language.TAMIL, Split.TEST)
        assert len(dataset) == 4_397
        discrepancies = compare_with_published(dataset)
        assert [(d.quantity, d.expected) for d in discrepancies] == [("size", 4_392)]

    def test_class_count_discrepancy(self):
        """Test a changed class count is reported by its code."""
        dataset = published_dataset(Language.MALAYALAM, Split.TEST)
        relabeled = dataset.with_samples(
            [dataset[0].with_label(OL)] + list(dataset.samples[1:])
        )
        quantities = {d.quantity for d in compare_with_published(relabeled)}
        assert quantities == {"NO", "OL"}

    def test_unpublished_split(self):
        """Test splits without published figures produce no discrepancies."""
        dataset = Dataset((comment("a"),), Language.KANNADA, Split.UNSPLIT)
        assert compare_with_published(dataset) == []

    def test_describe_shares(self):
        """Test describe reports size, distribution and shares."""
        dataset = Dataset((comment("a"), comment("b"), comment("c", OU), comment("d", OU)), Language.KANNADA)
        summary = describe(dataset)
        assert summary.size == 4
        assert summary.shares()[NO] == pytest.approx(0.5)
        assert summary.discrepancies == []
