"""Generates the language-identification fixture texts.

Each text is a sequence of pseudo-sentences whose words are drawn from the
language's word-frequency distribution with a fixed seed, so the files are
reproducible and carry realistic character n-gram statistics.
"""
import pathlib
import random

import wordfreq

LANGS = ["de", "en", "es", "fr", "it"]
TARGET_CHARS = 45_000
VOCAB = 3_000
SEED = 20060520

out = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures/langid"
out.mkdir(parents=True, exist_ok=True)

for lang in LANGS:
    rng = random.Random(f"{SEED}-{lang}")
    words = [w for w in wordfreq.top_n_list(lang, VOCAB) if w.isalpha()]
    weights = [wordfreq.word_frequency(w, lang) for w in words]
    sentences, size = [], 0
    while size < TARGET_CHARS:
        n = rng.randint(6, 18)
        s = " ".join(rng.choices(words, weights, k=n))
        s = s[0].upper() + s[1:] + "."
        sentences.append(s)
        size += len(s) + 1
    lines = [" ".join(sentences[i:i + 6]) for i in range(0, len(sentences), 6)]
    (out / f"{lang}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
