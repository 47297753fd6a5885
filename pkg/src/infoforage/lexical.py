"""Corpus cleaning and lexical measures of fixed-size text samples.

Three bag-of-words measures are computed on the last ``N`` tokens of a
cleaned sample: plug-in unigram word entropy (bits), type-token ratio, and
a maximum-likelihood Zipf exponent.

Tokens are lowercased and purely non-alphanumeric tokens are dropped, so
absolute entropy levels depend on these choices; trends across samples
cleaned the same way do not.
"""
from __future__ import annotations

import enum
import math
import re
from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

__all__ = [
    "Category",
    "Profile",
    "TextSample",
    "LexicalMeasures",
    "EmptySampleError",
    "clean_and_tokenize",
    "tokenize",
    "truncate_last",
    "word_entropy",
    "type_token_ratio",
    "rank_observations",
    "zeta",
    "power_law_loglik",
    "fit_power_law",
    "zipf_exponent",
    "measure_sample",
    "LexicalMeasuresTransformer",
]

DEFAULT_SAMPLE_SIZE = 2000
ALPHA_BOUNDS = (1.0001, 20.0)
ALPHA_TOL = 1e-6


class EmptySampleError(ValueError):
    """Raised when cleaning leaves no tokens, or a measure gets an empty sample."""


class Category(str, enum.Enum):
    NEWS = "news"
    MAGAZINE = "magazine"
    FICTION = "fiction"
    NONFICTION = "nonfiction"
    SOCIAL = "social"
    OTHER = "other"

    @classmethod
    def parse(cls, label: str) -> "Category":
        key = re.sub(r"[^a-z]", "", str(label).strip().lower())
        try:
            return cls(_CATEGORY_ALIASES.get(key, key))
        except ValueError:
            raise ValueError(f"unknown category {label!r}") from None


_CATEGORY_ALIASES = {
    "nf": "nonfiction",
    "non": "nonfiction",
    "academic": "nonfiction",
    "acad": "nonfiction",
    "mag": "magazine",
    "magazines": "magazine",
    "fic": "fiction",
    "newspaper": "news",
    "newspapers": "news",
}


class Profile(str, enum.Enum):
    COHA_COCA = "coha_coca"
    PLAIN = "plain"
    SOCIAL = "social"


@dataclass(frozen=True)
class TextSample:
    tokens: tuple[str, ...]
    year: Optional[int] = None
    category: Category = Category.OTHER
    source_id: str = ""

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class LexicalMeasures:
    word_entropy_bits: float
    type_token_ratio: float
    zipf_exponent: float
    zipf_loglik: float
    n_tokens: int
    n_types: int


# --------------------------------------------------------------------------
# Cleaning

_TAG_RE = re.compile(r"<[^>]*>")
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.?!])\s+")
_APOSTROPHE_RE = re.compile(r"['’‘`]")
_URL_RE = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)
_HANDLE_RE = re.compile(r"\S*[@#]\S*")
_TOKEN_RE = re.compile(r"\w+|[^\w\s]+")


def _is_header_line(line: str) -> bool:
    s = line.strip()
    if s.startswith("##"):
        return True
    letters = [c for c in s if c.isalpha()]
    return bool(letters) and all(c.isupper() for c in letters)


def _strip_header(text: str) -> str:
    lines = text.splitlines()
    if not lines or not _is_header_line(lines[0]):
        return text
    for i, line in enumerate(lines):
        if not line.strip():
            return "\n".join(lines[i + 1 :])
    # No blank separator: drop the leading run of metadata lines only.
    i = 0
    while i < len(lines) and _is_header_line(lines[i]):
        i += 1
    return "\n".join(lines[i:])


def _drop_redacted_sentences(text: str) -> str:
    return " ".join(s for s in _SENTENCE_SPLIT_RE.split(text) if "@" not in s)


def tokenize(text: str) -> list[str]:
    """Whitespace split with punctuation as separate tokens; keep alphanumeric tokens, lowercased."""
    return [tok.lower() for tok in _TOKEN_RE.findall(text) if any(c.isalnum() for c in tok)]


def clean_and_tokenize(
    raw: str,
    profile: Profile | str = Profile.PLAIN,
    *,
    year: Optional[int] = None,
    category: Category | str = Category.OTHER,
    source_id: str = "",
) -> TextSample:
    profile = Profile(profile)
    text = raw
    if profile is Profile.COHA_COCA:
        text = _strip_header(text)
        text = _TAG_RE.sub(" ", text)
        text = _drop_redacted_sentences(text)
    text = _APOSTROPHE_RE.sub("", text)
    if profile is Profile.SOCIAL:
        text = _URL_RE.sub(" ", text)
        text = _HANDLE_RE.sub(" ", text)
    text = " ".join(text.split())
    tokens = tokenize(text)
    if not tokens:
        raise EmptySampleError(f"no tokens left after cleaning {source_id or 'sample'!s}")
    if not isinstance(category, Category):
        category = Category.parse(category)
    return TextSample(tuple(tokens), year, category, source_id)


def truncate_last(sample: TextSample, n: int = DEFAULT_SAMPLE_SIZE) -> Optional[TextSample]:
    """Last ``n`` tokens of the sample, or None when it is shorter than ``n``."""
    if len(sample.tokens) < n:
        return None
    if len(sample.tokens) == n:
        return sample
    return replace(sample, tokens=sample.tokens[-n:])


# --------------------------------------------------------------------------
# Measures


def _tokens(sample) -> Sequence[str]:
    tokens = sample.tokens if isinstance(sample, TextSample) else sample
    if len(tokens) == 0:
        raise EmptySampleError("measure of an empty sample is undefined")
    return tokens


def word_entropy(sample) -> float:
    """Plug-in unigram entropy in bits per token."""
    tokens = _tokens(sample)
    # sorted so the sum does not depend on token order
    counts = np.sort(np.fromiter(Counter(tokens).values(), dtype=float))
    f = counts / counts.sum()
    h = -float(np.sum(f * np.log2(f)))
    return max(h, 0.0)


def type_token_ratio(sample) -> float:
    tokens = _tokens(sample)
    return len(set(tokens)) / len(tokens)


def rank_observations(tokens: Sequence[str]) -> np.ndarray:
    """Frequency rank of each token's type (1 = most frequent; ties by first occurrence).

    Returns the type counts in rank order, so that rank ``r`` is observed
    ``counts[r - 1]`` times.
    """
    counts = Counter(tokens)  # insertion order == first occurrence
    return np.array(sorted(counts.values(), key=lambda c: -c), dtype=float)


_BERNOULLI_TERMS = (1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0)
_ZETA_N = 20


def zeta(s: float) -> float:
    """Riemann zeta for real s > 1.

    Direct summation of the first terms plus an Euler-Maclaurin tail (the
    integral of the remainder and its derivative corrections); relative
    error is below 1e-13 over s in (1, 20].
    """
    if not s > 1:
        raise ValueError("zeta requires s > 1")
    n = _ZETA_N
    k = np.arange(1, n, dtype=float)
    head = math.fsum(k ** (-s))
    tail = n ** (1.0 - s) / (s - 1.0) + 0.5 * n ** (-s)
    # B_2j / (2j)! * s (s+1) ... (s+2j-2) * n^(-s-2j+1)
    rising = s
    fact = 2.0
    for j, b in enumerate(_BERNOULLI_TERMS, start=1):
        tail += b / fact * rising * n ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + tail


def power_law_loglik(alpha: float, n: float, sum_log_x: float) -> float:
    """Log-likelihood of ``n`` discrete power-law observations with x_min = 1."""
    return -alpha * sum_log_x - n * math.log(zeta(alpha))


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    # The maximum may sit on the bracket edge.
    return max((lo, x, hi), key=f)


def fit_power_law(observations=None, *, n: float | None = None, sum_log_x: float | None = None,
                  bounds=ALPHA_BOUNDS, tol: float = ALPHA_TOL) -> tuple[float, float]:
    """Maximum-likelihood exponent of a discrete power law P(x) ~ x^-alpha, x >= 1.

    Either pass raw integer ``observations`` or their sufficient statistics
    ``n`` and ``sum_log_x``. Returns ``(alpha, loglik)``.
    """
    if observations is not None:
        x = np.asarray(observations, dtype=float)
        if x.size == 0 or np.any(x < 1):
            raise ValueError("observations must be nonempty and >= 1")
        n, sum_log_x = float(x.size), math.fsum(np.log(x))
    if n is None or sum_log_x is None:
        raise TypeError("pass observations or both n and sum_log_x")
    if sum_log_x <= 0:
        raise ValueError("all observations equal 1; the exponent is unbounded")

    def loglik(a):
        return power_law_loglik(a, n, sum_log_x)

    alpha = _golden_max(loglik, bounds[0], bounds[1], tol)
    return alpha, loglik(alpha)


def zipf_exponent(sample) -> tuple[float, float]:
    """Zipf exponent from per-token rank observations; returns ``(alpha, loglik)``."""
    tokens = _tokens(sample)
    counts = rank_observations(tokens)
    if counts.size < 2:
        raise ValueError("Zipf exponent is undefined for a single-type sample")
    ranks = np.arange(1, counts.size + 1, dtype=float)
    return fit_power_law(n=float(counts.sum()), sum_log_x=math.fsum(counts * np.log(ranks)))


def measure_sample(sample: TextSample) -> LexicalMeasures:
    alpha, ll = zipf_exponent(sample)
    n_types = len(set(sample.tokens))
    return LexicalMeasures(
        word_entropy_bits=word_entropy(sample),
        type_token_ratio=type_token_ratio(sample),
        zipf_exponent=alpha,
        zipf_loglik=ll,
        n_tokens=len(sample.tokens),
        n_types=n_types,
    )


class LexicalMeasuresTransformer(TransformerMixin, BaseEstimator):
    """Map raw documents to ``[word_entropy_bits, type_token_ratio, zipf_exponent]``.

    Stateless; ``fit`` only validates parameters. Documents shorter than
    ``sample_size`` tokens after cleaning give a row of NaN so the output
    stays aligned with the input.

    Parameters
    ----------
    profile : {"plain", "coha_coca", "social"}
    sample_size : int
        Number of trailing tokens each measure is computed on.
    """

    feature_names = ("word_entropy_bits", "type_token_ratio", "zipf_exponent")

    def __init__(self, profile: str = "plain", sample_size: int = DEFAULT_SAMPLE_SIZE):
        self.profile = profile
        self.sample_size = sample_size

    def fit(self, X, y=None):
        Profile(self.profile)
        if int(self.sample_size) < 1:
            raise ValueError("sample_size must be >= 1")
        self.n_features_out_ = len(self.feature_names)
        return self

    def transform(self, X):
        if not hasattr(self, "n_features_out_"):
            self.fit(X)
        if isinstance(X, str):
            raise TypeError("expected an iterable of documents, got a single string")
        rows = []
        for doc in X:
            try:
                sample = truncate_last(clean_and_tokenize(doc, self.profile), int(self.sample_size))
            except EmptySampleError:
                sample = None
            if sample is None or len(set(sample.tokens)) < 2:
                rows.append([np.nan] * 3)
                continue
            m = measure_sample(sample)
            rows.append([m.word_entropy_bits, m.type_token_ratio, m.zipf_exponent])
        return np.asarray(rows, dtype=float).reshape(-1, 3)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.feature_names, dtype=object)
