import json
import random

import pytest
from sklearn.metrics import accuracy_score, precision_score, recall_score

from conftest import make_synth_corpus
from sentmt.dialect import (
    LABEL_DA,
    LABEL_MSA,
    LabeledSentence,
    TrainConfig,
    evaluate,
    extract_da,
    load_labeled_tsv,
    load_model,
    predict,
    save_model,
    train,
    _features,
    _sigmoid,
)
from sentmt.errors import InputError
from sentmt.textproc import normalize_arabic

TOY = [
    LabeledSentence("مش عايز كده", LABEL_DA),
    LabeledSentence("دلوقتي اوي خالص", LABEL_DA),
    LabeledSentence("ليس هذا صحيحا", LABEL_MSA),
    LabeledSentence("أريد أن أذهب الآن", LABEL_MSA),
]


def toy_model(seed=0):
    return train(TOY, split=(1.0, 0.0), config=TrainConfig(epochs=50, seed=seed))


class TestTrain:
    def test_toy_set_memorized(self):
        model = toy_model()
        for ex in TOY:
            label, p = predict(model, ex.text)
            assert label == ex.label
            margin = p - 0.5 if ex.label == LABEL_DA else 0.5 - p
            assert margin > 0.05

    def test_deterministic_under_fixed_seed(self, tmp_path):
        a, b = toy_model(seed=7), toy_model(seed=7)
        assert a.feature_weights == b.feature_weights
        assert a.bias == b.bias
        pa, pb = tmp_path / "a.json", tmp_path / "b.json"
        save_model(a, pa)
        save_model(b, pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_single_class_data_rejected(self):
        with pytest.raises(InputError, match="2 examples per class"):
            train([ex for ex in TOY if ex.label == LABEL_DA])

    def test_bad_split_rejected(self):
        with pytest.raises(InputError, match="split"):
            train(TOY, split=(0.9, 0.3))

    def test_synthetic_corpus_held_out_accuracy(self):
        corpus = make_synth_corpus(n=2000, seed=42)
        rng = random.Random(7)
        rng.shuffle(corpus)
        held_out = corpus[1800:]
        model = train(corpus[:1800], split=(8 / 9, 1 / 9), config=TrainConfig(seed=1))
        metrics = evaluate(model, held_out)
        assert metrics["accuracy"] >= 0.90

    def test_labeled_sentence_validation(self):
        with pytest.raises(ValueError):
            LabeledSentence("  ", LABEL_DA)
        with pytest.raises(ValueError):
            LabeledSentence("ok", "DIALECT")


class TestPredict:
    def test_empty_text_tie_rule(self):
        model = toy_model()
        assert predict(model, "") == (LABEL_MSA, 0.5)
        assert predict(model, "ًَ") == (LABEL_MSA, 0.5)  # only diacritics

    def test_unseen_ngrams_give_sigmoid_bias(self):
        model = toy_model()
        text = "qqxx zzvv"
        feats = _features(text, model.ngram_orders, model.hash_bits, model.hash_seed)
        assert not set(feats) & set(model.feature_weights)  # no collisions by construction
        _, p = predict(model, text)
        assert p == _sigmoid(model.bias)

    def test_invariant_under_normalization(self):
        model = toy_model()
        text = "مش عَايز كدههه"
        assert predict(model, text) == predict(model, normalize_arabic(text))

    def test_probability_in_open_interval(self):
        model = toy_model()
        for ex in TOY:
            _, p = predict(model, ex.text)
            assert 0.0 < p < 1.0


class TestExtractDa:
    def test_partition_and_monotonicity_on_10k_lines(self):
        model = toy_model()
        rng = random.Random(3)
        corpus = [ex.text for ex in make_synth_corpus(n=9900, seed=9)]
        corpus += ["" for _ in range(50)]
        corpus += ["qq zz xx " * rng.randint(1, 3) for _ in range(50)]
        rng.shuffle(corpus)
        da_50, msa_50, report = extract_da(model, corpus, threshold=0.5)
        assert len(da_50) + len(msa_50) == len(corpus) == 10000
        assert sorted(da_50 + msa_50) == sorted(corpus)
        assert len(report) == len(corpus)
        da_99, _, _ = extract_da(model, corpus, threshold=0.99)
        assert len(da_99) <= len(da_50)

    def test_training_da_sentences_extracted(self):
        model = toy_model()
        da_texts = [ex.text for ex in TOY if ex.label == LABEL_DA]
        da, msa, _ = extract_da(model, da_texts, threshold=0.5)
        assert da == da_texts and msa == []

    def test_bad_threshold(self):
        with pytest.raises(InputError, match="threshold"):
            extract_da(toy_model(), ["x"], threshold=1.0)


class TestEvaluate:
    def test_perfect_predictions(self):
        model = toy_model()
        metrics = evaluate(model, TOY)
        assert metrics["accuracy"] == 1.0
        assert metrics["precision"] == 1.0 and metrics["recall"] == 1.0
        assert metrics["tp"] + metrics["fp"] + metrics["fn"] + metrics["tn"] == len(TOY)

    def test_inverted_labels_accuracy_zero(self):
        model = toy_model()
        flipped = [
            LabeledSentence(ex.text, LABEL_MSA if ex.label == LABEL_DA else LABEL_DA)
            for ex in TOY
        ]
        assert evaluate(model, flipped)["accuracy"] == 0.0

    def test_against_sklearn_oracle(self):
        corpus = make_synth_corpus(n=400, seed=11)
        model = train(corpus[:300], split=(0.9, 0.1), config=TrainConfig(seed=2))
        test = corpus[300:]
        metrics = evaluate(model, test)
        gold = [ex.label for ex in test]
        pred = [predict(model, ex.text)[0] for ex in test]
        assert metrics["accuracy"] == accuracy_score(gold, pred)
        assert metrics["precision"] == precision_score(gold, pred, pos_label=LABEL_DA)
        assert metrics["recall"] == recall_score(gold, pred, pos_label=LABEL_DA)

    def test_empty_test_set(self):
        with pytest.raises(InputError):
            evaluate(toy_model(), [])


class TestModelIO:
    def test_save_load_round_trip(self, tmp_path):
        model = toy_model()
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.feature_weights == model.feature_weights
        assert loaded.bias == model.bias
        assert loaded.ngram_orders == model.ngram_orders
        for ex in TOY:
            assert predict(loaded, ex.text) == predict(model, ex.text)
        resaved = tmp_path / "model2.json"
        save_model(loaded, resaved)
        assert resaved.read_bytes() == path.read_bytes()

    def test_magic_header_present(self, tmp_path):
        path = tmp_path / "model.json"
        save_model(toy_model(), path)
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["magic"] == "DAID1"
        assert payload["version"] == 1

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"magic": "NOPE"}', encoding="utf-8")
        with pytest.raises(InputError, match="DAID1"):
            load_model(path)
        garbage = tmp_path / "garbage.json"
        garbage.write_text("not json", encoding="utf-8")
        with pytest.raises(InputError):
            load_model(garbage)


class TestLabeledTsv:
    def test_load(self, tmp_path):
        path = tmp_path / "data.tsv"
        path.write_text(
            "DA\tمش عايز\nMSA\tليس كذلك\n",
            encoding="utf-8",
        )
        data = load_labeled_tsv(path)
        assert [ex.label for ex in data] == [LABEL_DA, LABEL_MSA]

    def test_unknown_label_names_line(self, tmp_path):
        path = tmp_path / "data.tsv"
        path.write_text("XX\ttext\n", encoding="utf-8")
        with pytest.raises(InputError, match="line 1"):
            load_labeled_tsv(path)
