"""Independent oracles and fixture generators shared by the test modules."""
from __future__ import annotations

import itertools
import math
from pathlib import Path

import numpy as np

from infoforage.foraging import InfoItem

# one "criterion N: PASS|FAIL ..." line per acceptance check, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def random_items(rng, n, lam=(0.01, 2.0), u=(0.0, 10.0), t=(0.1, 5.0)):
    return [
        InfoItem(float(rng.uniform(*lam)), float(rng.uniform(*u)), float(rng.uniform(*t)))
        for _ in range(n)
    ]


def brute_force_diet(items):
    """Best subset by exhaustive enumeration; returns (rate, subset)."""
    best_rate, best = 0.0, ()
    n = len(items)
    for k in range(1, n + 1):
        for sub in itertools.combinations(range(n), k):
            num = sum(items[i].encounter_rate * items[i].utility for i in sub)
            den = 1.0 + sum(items[i].encounter_rate * items[i].handling_time for i in sub)
            if num / den > best_rate:
                best_rate, best = num / den, sub
    return best_rate, best


def sample_discrete_power_law(rng, alpha, size):
    """Devroye's rejection sampler for P(x) ~ x^-alpha on x = 1, 2, ...

    Works in floating point so very large draws are not truncated.
    """
    am1 = alpha - 1.0
    b = 2.0**am1
    out = np.empty(0)
    while out.size < size:
        m = 2 * (size - out.size) + 16
        u = 1.0 - rng.random(m)
        v = rng.random(m)
        x = np.floor(u ** (-1.0 / am1))
        tt = (1.0 + 1.0 / x) ** am1
        ok = v * x * (tt - 1.0) / (b - 1.0) <= tt / b
        out = np.concatenate([out, x[ok]])
    return out[:size]


def kpss_by_hand(x, lags):
    """KPSS level statistic with explicit loops."""
    n = len(x)
    mean = sum(x) / n
    e = [v - mean for v in x]
    s, partial_sq = 0.0, 0.0
    for v in e:
        s += v
        partial_sq += s * s
    gamma0 = sum(v * v for v in e) / n
    lrv = gamma0
    for j in range(1, lags + 1):
        w = 1.0 - j / (lags + 1.0)
        gj = sum(e[t] * e[t - j] for t in range(j, n)) / n
        lrv += 2.0 * w * gj
    return partial_sq / (n * n * lrv)


def mk_s_by_hand(x):
    s = 0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            s += (x[j] > x[i]) - (x[j] < x[i])
    return s


def pearson_by_hand(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def anova_f_by_hand(groups):
    allv = [v for g in groups for v in g]
    grand = sum(allv) / len(allv)
    ssb = sum(len(g) * (sum(g) / len(g) - grand) ** 2 for g in groups)
    ssw = sum(sum((v - sum(g) / len(g)) ** 2 for v in g) for g in groups)
    k, n = len(groups), len(allv)
    return (ssb / (k - 1)) / (ssw / (n - k))


# --------------------------------------------------------------------------
# Synthetic corpus

VOCAB = 4000


def _doc_tokens(rng, exponent, n_tokens):
    ranks = np.arange(1, VOCAB + 1, dtype=float)
    p = ranks**-exponent
    p /= p.sum()
    ids = rng.choice(VOCAB, size=n_tokens, p=p)
    return [f"w{i}" for i in ids]


def _as_text(tokens, rng):
    out, sentence = [], []
    for tok in tokens:
        sentence.append(tok)
        if len(sentence) >= rng.integers(8, 20):
            out.append(" ".join(sentence).capitalize() + ".")
            sentence = []
    if sentence:
        out.append(" ".join(sentence) + ".")
    return " ".join(out)


def write_synthetic_corpus(root: Path, n_docs=300, trended=("news", "magazine"), flat=("fiction",),
                           seed=2024, n_tokens=2100, short_docs=0) -> Path:
    """Write documents and a manifest; entropy rises with year in ``trended`` categories.

    Documents of the first trended category use the coha_coca layout (id
    header, tags, redacted "@" sentences) to exercise that cleaning profile.
    Returns the manifest path.
    """
    root = Path(root)
    docs = root / "docs"
    docs.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    cats = list(trended) + list(flat)
    lines = ["path,year,category,profile,source_id"]
    for k in range(n_docs):
        cat = cats[k % len(cats)]
        year = int(rng.integers(1900, 2010))
        if cat in trended:
            exponent = 1.25 - 0.25 * (year - 1900) / 109.0
        else:
            exponent = 1.1
        text = _as_text(_doc_tokens(rng, exponent, n_tokens), rng)
        profile = "plain"
        if cat == trended[0]:
            profile = "coha_coca"
            text = f"##{k:06d} {cat} {year}\n\n<p> {text} </p> Redacted @ @ @ @ @ @ @ @ @ @ text here. Closing words."
        name = f"doc{k:04d}.txt"
        (docs / name).write_text(text, encoding="utf-8")
        lines.append(f"docs/{name},{year},{cat},{profile},{cat}-{k:04d}")
    for k in range(short_docs):
        name = f"short{k}.txt"
        (docs / name).write_text("too short to measure " * 10, encoding="utf-8")
        lines.append(f"docs/{name},1950,fiction,plain,short-{k}")
    manifest = root / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest
