"""Answer metrics (token F1, HEQ) and question statistics."""

import random

import pytest

from convsr.metrics import (
    QuestionResult,
    count_proper_nouns,
    count_pronouns,
    heq_aggregate,
    human_f1,
    normalize,
    question_f1,
    question_stats,
    token_f1,
)

from oracles import oracle_token_f1


class TestNormalize:
    def test_articles_and_punctuation(self):
        assert normalize("The Fourteenth.") == ["fourteenth"]

    def test_plain_name(self):
        assert normalize("Courteney Cox") == ["courteney", "cox"]

    def test_empty(self):
        assert normalize("") == []


class TestTokenF1:
    def test_exact_match(self):
        assert token_f1("Courteney Cox", "Courteney Cox") == 1.0

    def test_partial_overlap_hand_value(self):
        # "the" drops as an article: P = 1/2, R = 1, F1 = 2/3
        assert token_f1("the fourteenth episode", "fourteenth") == pytest.approx(
            0.6667, abs=1e-4)

    def test_mutual_no_answer(self):
        assert token_f1("CANNOTANSWER", "CANNOTANSWER") == 1.0

    def test_one_sided_no_answer(self):
        assert token_f1("CANNOTANSWER", "Courteney Cox") == 0.0
        assert token_f1("Courteney Cox", "CANNOTANSWER") == 0.0

    def test_empty_bags(self):
        assert token_f1("", "") == 1.0
        assert token_f1("the", "fourteenth") == 0.0  # prediction normalizes to empty

    def test_range_and_symmetry_random(self):
        rng = random.Random(3)
        words = ["the", "a", "cat", "dog", "ran", "Ran!", "fast,", "slow", "CANNOTANSWER"]
        for _ in range(500):
            pred = " ".join(rng.choices(words, k=rng.randint(0, 6)))
            ref = " ".join(rng.choices(words, k=rng.randint(0, 6)))
            f1 = token_f1(pred, ref)
            assert 0.0 <= f1 <= 1.0
            assert f1 == pytest.approx(token_f1(ref, pred), abs=1e-12)
            assert f1 == pytest.approx(oracle_token_f1(pred, ref), abs=1e-9)

    def test_equals_one_iff_bags_equal(self):
        assert token_f1("Cox  Courteney", "courteney cox!") == 1.0
        assert token_f1("cox cox", "cox") < 1.0


class TestQuestionF1:
    def test_max_over_references(self):
        assert question_f1("fourteenth", ["nope", "fourteenth", "other"]) == 1.0

    def test_numeric_variant(self):
        assert question_f1("fourteenth", ["fourteenth", "the 14th"]) == 1.0

    def test_disjoint(self):
        assert question_f1("alpha", ["omega"]) == 0.0

    def test_empty_references_error(self):
        with pytest.raises(ValueError):
            question_f1("x", [])

    def test_monotone_in_references(self):
        base = question_f1("a b", ["a c"])
        assert question_f1("a b", ["a c", "a b d"]) >= base


class TestHumanF1:
    def test_single_reference_convention(self):
        assert human_f1(["x"]) == 1.0

    def test_identical_references(self):
        assert human_f1(["fourteenth", "fourteenth"]) == 1.0

    def test_leave_one_out(self):
        # each direction scores 2*(1/2*1/2)/(1/2+1/2) = 1/2
        assert human_f1(["x y", "y z"]) == pytest.approx(0.5)
        # asymmetric references: best direction wins
        assert human_f1(["x y", "x y z"]) == pytest.approx(
            max(oracle_token_f1("x y", "x y z"), oracle_token_f1("x y z", "x y")))


def _result(did, turn, model, human=1.0):
    return QuestionResult(dialogue_id=did, turn_index=turn, model_f1=model,
                          human_f1=human)


class TestHeqAggregate:
    def test_all_pass(self):
        results = [_result("d1", 0, 1.0), _result("d2", 0, 1.0)]
        assert heq_aggregate(results) == (100.0, 100.0)

    def test_mixed_dialogues(self):
        results = [_result("d1", 0, 1.0)]
        results += [_result("d2", i, 1.0) for i in range(9)]
        results += [_result("d2", 9, 0.5)]
        heq_q, heq_d = heq_aggregate(results)
        assert heq_q == pytest.approx(10 / 11 * 100)
        assert heq_d == pytest.approx(50.0)

    def test_none_pass(self):
        results = [_result("d1", 0, 0.0), _result("d2", 0, 0.5)]
        assert heq_aggregate(results) == (0.0, 0.0)

    def test_empty_error(self):
        with pytest.raises(ValueError):
            heq_aggregate([])

    def test_heq_flag_consistency(self):
        assert _result("d", 0, 0.8, human=0.8).heq
        assert not _result("d", 0, 0.79, human=0.8).heq


class TestQuestionStats:
    def test_pronoun_question(self):
        stats = question_stats(["What was she obsessed about?"])
        assert stats.avg_length == 5
        assert stats.avg_pronouns == 1
        assert stats.avg_proper_nouns == 0

    def test_empty(self):
        stats = question_stats([])
        assert (stats.avg_length, stats.avg_pronouns, stats.avg_proper_nouns) == (0, 0, 0)

    def test_proper_noun_counting(self):
        assert count_proper_nouns("Who played Monica Geller in FRIENDS?") == 3
        assert count_proper_nouns("Release date of the first season?") == 0
        assert count_proper_nouns("The Rock visited The Hague.") == 2  # Rock, Hague

    def test_pronoun_lexicon(self):
        assert count_pronouns("He told them it was hers.") == 4
        assert count_pronouns("Nobody came.") == 0

    def test_sentence_initial_capital_ignored(self):
        # both "We" tokens open a sentence; both "Paris" tokens count
        assert count_proper_nouns("We saw Paris? We saw Paris!") == 2
        assert count_proper_nouns("Paris") == 0
