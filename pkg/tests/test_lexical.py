import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import zeta as scipy_zeta
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import StandardScaler

from infoforage.lexical import (
    Category,
    EmptySampleError,
    LexicalMeasuresTransformer,
    TextSample,
    clean_and_tokenize,
    fit_power_law,
    power_law_loglik,
    rank_observations,
    truncate_last,
    type_token_ratio,
    word_entropy,
    zeta,
    zipf_exponent,
)

from helpers import sample_discrete_power_law


def sample(tokens):
    return TextSample(tuple(tokens))


class TestCleaning:
    def test_plain(self):
        assert clean_and_tokenize("Hello, hello world.", "plain").tokens == ("hello", "hello", "world")

    def test_coha_drops_redacted_sentence(self):
        s = clean_and_tokenize("Good text. Redacted @ @ @ here. More text.", "coha_coca")
        assert s.tokens == ("good", "text", "more", "text")

    def test_social(self):
        assert clean_and_tokenize("check https://x.y #tag @user hi", "social").tokens == ("check", "hi")

    def test_apostrophes_removed(self):
        assert clean_and_tokenize("Don't stop", "plain").tokens == ("dont", "stop")

    def test_coha_header_and_tags(self):
        raw = "##4001234 Some Title\nAUTHOR LINE\n\n<p> The body <b>starts</b> here. </p>"
        assert clean_and_tokenize(raw, "coha_coca").tokens == ("the", "body", "starts", "here")

    def test_coha_header_without_blank_line(self):
        raw = "##4001234\nThe body text."
        assert clean_and_tokenize(raw, "coha_coca").tokens == ("the", "body", "text")

    def test_no_header_kept(self):
        raw = "First line of text\n\nsecond paragraph"
        assert clean_and_tokenize(raw, "coha_coca").tokens == ("first", "line", "of", "text", "second", "paragraph")

    def test_empty_after_cleaning(self):
        with pytest.raises(EmptySampleError):
            clean_and_tokenize("... !!! ---", "plain")
        with pytest.raises(EmptySampleError):
            clean_and_tokenize("@user #tag", "social")

    def test_metadata(self):
        s = clean_and_tokenize("words here", "plain", year=1950, category="nf", source_id="x1")
        assert (s.year, s.category, s.source_id) == (1950, Category.NONFICTION, "x1")

    @pytest.mark.parametrize("label,expected", [
        ("nf", "nonfiction"), ("non-fiction", "nonfiction"), ("Non Fiction", "nonfiction"),
        ("mag", "magazine"), ("fic", "fiction"), ("news", "news"), ("social", "social"),
    ])
    def test_category_aliases(self, label, expected):
        assert Category.parse(label).value == expected

    def test_unknown_category(self):
        with pytest.raises(ValueError):
            Category.parse("poetry")

    @settings(max_examples=200, deadline=None)
    @given(st.text(alphabet=st.sampled_from(list("abcXYZ019 .,!?'@#<>/:\n")), min_size=1, max_size=80),
           st.sampled_from(["plain", "coha_coca", "social"]))
    def test_idempotent(self, raw, profile):
        try:
            first = clean_and_tokenize(raw, profile)
        except EmptySampleError:
            return
        again = clean_and_tokenize(" ".join(first.tokens), profile)
        assert again.tokens == first.tokens


class TestTruncate:
    def test_suffix(self):
        s = sample(str(i) for i in range(1, 2501))
        t = truncate_last(s, 2000)
        assert t.tokens[0] == "501" and t.tokens[-1] == "2500" and len(t) == 2000

    def test_exact(self):
        s = sample(["a"] * 2000)
        assert truncate_last(s, 2000) is s

    def test_too_short(self):
        assert truncate_last(sample(["a"] * 1999), 2000) is None


class TestEntropyAndTTR:
    def test_single_type(self):
        assert word_entropy(sample("aaa")) == 0.0
        assert type_token_ratio(sample("aaa")) == pytest.approx(1 / 3)

    @pytest.mark.parametrize("n", [1, 2, 7, 2000])
    def test_all_distinct(self, n):
        toks = [f"w{i}" for i in range(n)]
        assert word_entropy(sample(toks)) == pytest.approx(math.log2(n), abs=1e-12)
        assert type_token_ratio(sample(toks)) == 1.0

    def test_two_thirds(self):
        h = -(2 / 3 * math.log2(2 / 3) + 1 / 3 * math.log2(1 / 3))
        assert word_entropy(sample("aab")) == pytest.approx(h, abs=1e-15)
        assert type_token_ratio(sample("aab")) == pytest.approx(2 / 3)

    def test_empty(self):
        with pytest.raises(EmptySampleError):
            word_entropy(sample([]))
        with pytest.raises(EmptySampleError):
            type_token_ratio(sample([]))

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=60), st.randoms())
    def test_bag_of_words_properties(self, toks, rnd):
        n_types = len(set(toks))
        h = word_entropy(sample(toks))
        assert 0 <= h <= math.log2(min(len(toks), n_types)) + 1e-12
        shuffled = list(toks)
        rnd.shuffle(shuffled)
        assert word_entropy(sample(shuffled)) == pytest.approx(h, abs=1e-12)
        assert type_token_ratio(sample(shuffled)) == type_token_ratio(sample(toks))
        doubled = [t for t in toks for _ in range(2)]
        assert word_entropy(sample(doubled)) == pytest.approx(h, abs=1e-12)
        assert type_token_ratio(sample(doubled)) == pytest.approx(type_token_ratio(sample(toks)) / 2)
        if n_types >= 2:
            assert zipf_exponent(sample(shuffled))[0] == pytest.approx(zipf_exponent(sample(toks))[0], abs=1e-12)


class TestZeta:
    def test_against_scipy(self):
        for s in np.linspace(1.0001, 20, 500):
            assert zeta(s) == pytest.approx(scipy_zeta(s), rel=1e-12)

    def test_known_value(self):
        assert zeta(2.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            zeta(1.0)


class TestZipf:
    def test_rank_observations_ties_by_first_occurrence(self):
        counts = rank_observations(list("bbaacd"))
        assert counts.tolist() == [2, 2, 1, 1]

    def test_single_type_raises(self):
        with pytest.raises(ValueError):
            zipf_exponent(sample("aaaa"))

    def test_two_types_grid_oracle(self):
        c = 50
        alpha, _ = zipf_exponent(sample(["a"] * c + ["b"] * c))
        # Observations: rank 1 and rank 2, c times each.
        grid = np.arange(1.0001, 20.0, 1e-4)
        ll = [-(a * c * math.log(2)) - 2 * c * math.log(scipy_zeta(a)) for a in grid]
        best = grid[int(np.argmax(ll))]
        assert abs(alpha - best) <= 1e-4

    def test_local_maximum(self):
        rng = np.random.default_rng(3)
        x = sample_discrete_power_law(rng, 1.7, 2000)
        alpha, ll = fit_power_law(x)
        n, slx = x.size, float(np.log(x).sum())
        assert ll >= power_law_loglik(alpha + 0.01, n, slx)
        assert ll >= power_law_loglik(alpha - 0.01, n, slx)

    def test_recovery_alpha_1_1(self):
        est = [fit_power_law(sample_discrete_power_law(np.random.default_rng(s), 1.1, 2000))[0] for s in range(100)]
        assert abs(np.median(est) - 1.1) <= 0.1

    def test_all_ones_rejected(self):
        with pytest.raises(ValueError):
            fit_power_law(np.ones(10))

    def test_bracket_edge(self):
        # The optimum solves 2^alpha ~ n for one x = 2 among n ones.
        alpha, _ = fit_power_law([1] * 100000 + [2])
        assert alpha == pytest.approx(math.log2(100000), abs=0.01)
        # log2(1e8) ~ 26.6 lies beyond the bracket, so the edge is returned.
        alpha, _ = fit_power_law(n=1e8, sum_log_x=math.log(2))
        assert alpha == pytest.approx(20.0, abs=1e-12)


class TestTransformer:
    def test_transform_shape_and_short_rows(self):
        rng = np.random.default_rng(0)
        long_doc = " ".join(f"w{i}" for i in rng.integers(0, 300, size=2500))
        X = [long_doc, "too short", long_doc]
        out = LexicalMeasuresTransformer(sample_size=2000).fit_transform(X)
        assert out.shape == (3, 3)
        assert np.isnan(out[1]).all()
        assert np.allclose(out[0], out[2])
        assert 0 < out[0, 1] <= 1

    def test_params_and_pipeline(self):
        t = LexicalMeasuresTransformer(profile="social", sample_size=5)
        assert t.get_params() == {"profile": "social", "sample_size": 5}
        docs = ["one two three four five six", "a b a b a b c", "x y z x y z q"]
        out = make_pipeline(t, StandardScaler()).fit_transform(docs)
        assert out.shape == (3, 3)
        assert list(t.get_feature_names_out()) == ["word_entropy_bits", "type_token_ratio", "zipf_exponent"]

    def test_bad_profile(self):
        with pytest.raises(ValueError):
            LexicalMeasuresTransformer(profile="nope").fit(["x"])
