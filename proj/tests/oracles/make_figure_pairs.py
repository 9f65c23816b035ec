#!/usr/bin/env python3
"""Regenerates tests/fixtures/figure_pairs.jsonl and truthiness_pair.jsonl.

Usage: make_figure_pairs.py PATH/TO/shortcoder FIXTURE_DIR
Token fields are counted with Python's tokenize, not the C++ lexer.
"""
import io
import json
import os
import subprocess
import sys
import tokenize

CLI = sys.argv[1]
OUT = sys.argv[2]

def count(src):
    n = 0
    for t in tokenize.generate_tokens(io.StringIO(src).readline):
        if t.type in (tokenize.NL, tokenize.COMMENT, tokenize.ENDMARKER, tokenize.ENCODING):
            continue
        n += 1
    return n
def simplify(src, strictness, rules=None):
    return subprocess.run([CLI, "simplify", "--strictness", strictness] + (["--rules", rules] if rules else []), input=src, capture_output=True, text=True, check=True).stdout

FIG = {
 "R1": ("a = 0\nb = 0\nc = 0\n", "", ["assert (a, b, c) == (0, 0, 0)", "assert a is b"]),
 "R2": ("def add(x, y):\n    return (x + y)\n", "", ["assert add(2, 3) == 5", "assert add('a', 'b') == 'ab'"]),
 "R3": ("x = x + 1\n", "x = 41\n", ["assert x == 42", "assert isinstance(x, int)"]),
 "R4": ("if condition:\n    flag = True\nelse:\n    flag = False\n", "condition = 3 > 2\n", ["assert flag is True", "assert isinstance(flag, bool)"]),
 "R5": ("if condition1:\n    result = 'A'\nelse:\n    if condition2:\n        result = 'B'\n    else:\n        result = 'C'\n", "condition1 = False\ncondition2 = True\n", ["assert result == 'B'", "assert condition1 is False"]),
 "R6": ("result = []\nfor x in data:\n    result.append(x * 2)\n", "data = [1, 2, 3]\n", ["assert result == [2, 4, 6]", "assert len(result) == 3"]),
 "R7": ("del a\ndel b\ndel c\n", "a = 1\nb = 2\nc = 3\n", ["assert 'a' not in globals()", "assert 'c' not in globals()"]),
 "R8-present": ("if key in dictionary:\n    value = dictionary[key]\nelse:\n    value = default\n", "dictionary = {'k': 1}\nkey = 'k'\ndefault = 0\n", ["assert value == 1", "assert key in dictionary"]),
 "R8-absent": ("if key in dictionary:\n    value = dictionary[key]\nelse:\n    value = default\n", "dictionary = {'k': 1}\nkey = 'z'\ndefault = 0\n", ["assert value == 0", "assert key not in dictionary"]),
 "R9": ("msg = \"Hello \" + name + \"!\"\n", "name = 'World'\n", ["assert msg == 'Hello World!'", "assert len(msg) == 12"]),
 "R10-read": ("f = open('file.txt', 'r')\ndata = f.read()\nf.close()\n", "with open('file.txt', 'w') as g:\n    g.write('hi')\n", ["assert data == 'hi'", "assert f.closed"]),
 "R10-write": ("f = open('file.txt', 'w')\nf.write(\"Hello\")\nf.close()\n", "", ["assert open('file.txt').read() == 'Hello'", "assert f.closed"]),
}
out = []
for name, (fig, prelude, tests) in FIG.items():
    original = prelude + fig
    strictness = "paper-faithful" if name == "R9" else "strict"
    simplified = simplify(original, strictness, name.split("-")[0])
    rule = name.split("-")[0]
    o, s = count(original), count(simplified)
    assert simplified != original, name
    out.append({"pair_id": "figure-%s/independent/%s" % (name, rule), "source_task_id": "figure-" + name,
                "mode": "independent", "rules_applied": [rule], "original_code": original,
                "simplified_code": simplified, "original_tokens": o, "simplified_tokens": s,
                "reduction_pct": 100.0 * (o - s) / o, "validated": "none", "test_list": tests})
with open(os.path.join(OUT, "figure_pairs.jsonl"), "w") as f:
    for p in out:
        f.write(json.dumps(p) + "\n")
# Truthiness counterexample: paper-faithful R4 on a non-bool condition.
orig = "condition = 5\nif condition:\n    flag = True\nelse:\n    flag = False\n"
simp = simplify(orig, "paper-faithful")
o, s = count(orig), count(simp)
p = {"pair_id": "truthiness/independent/R4", "source_task_id": "truthiness", "mode": "independent",
     "rules_applied": ["R4"], "original_code": orig, "simplified_code": simp, "original_tokens": o,
     "simplified_tokens": s, "reduction_pct": 100.0 * (o - s) / o, "validated": "none",
     "test_list": ["assert flag is True", "assert condition == 5"]}
with open(os.path.join(OUT, "truthiness_pair.jsonl"), "w") as f:
    f.write(json.dumps(p) + "\n")
