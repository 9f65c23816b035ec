#!/usr/bin/env python3
"""Trains a small byte-level BPE on the corpus and freezes reference counts.

Usage: freeze_vocab.py CORPUS.jsonl FIXTURE_DIR
Writes vocab/merges.txt and vocab/counts.json. Counts come from the Hugging
Face `tokenizers` implementation, independent of the C++ encoder.
"""
import json
import os
import sys
import tempfile

from tokenizers import ByteLevelBPETokenizer

corpus, out_dir = sys.argv[1:3]
texts = [json.loads(line)["code"] for line in open(corpus, encoding="utf-8")]

tok = ByteLevelBPETokenizer(add_prefix_space=False)
tok.train_from_iterator(texts, vocab_size=600, min_frequency=2, show_progress=False)
vocab_dir = os.path.join(out_dir, "vocab")
os.makedirs(vocab_dir, exist_ok=True)
with tempfile.TemporaryDirectory() as tmp:
    tok.save_model(tmp)
    with open(os.path.join(tmp, "merges.txt"), encoding="utf-8") as f:
        merges = f.read()
with open(os.path.join(vocab_dir, "merges.txt"), "w", encoding="utf-8") as f:
    f.write(merges)

samples = [
    "",
    "x = x + 1\n",
    "x += 1\n",
    "def f(a, b):\n    return a + b\n",
    "result = [x * 2 for x in data]\n",
    "msg = \"Hello {}!\".format(name)\n",
    "  two  spaces \n\n\tand tabs\n",
    "it's they'll we've I'm\n",
    "café = 1\n",
    "x=1\n \ny=2",
] + texts[:5]
counts = [{"text": s, "count": len(tok.encode(s).ids)} for s in samples]
with open(os.path.join(vocab_dir, "counts.json"), "w", encoding="utf-8") as f:
    json.dump(counts, f, indent=1, ensure_ascii=False)
    f.write("\n")
