"""The command-line workflow end to end.

Trains a bigram model on a three-line corpus, decodes a small batch of
instances with traces enabled, then summarizes how deep in the ranking
each instance's winner ever sat. Every artifact is a plain file, so the
same steps work from a shell; this script just runs them via subprocess
and shows the outputs.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CORPUS = "the cat sat\nthe dog sat\nthe cat ran\n"
INSTANCES = [
    {"id": "cold-open", "context": ""},
    {"id": "after-the", "context": "the"},
    {"id": "after-the-cat", "context": "the cat"},
]


def run(*args):
    command = [sys.executable, "-m", "nucleus_search", *map(str, args)]
    print(f"$ nucleus-search {' '.join(map(str, args))}")
    proc = subprocess.run(command, capture_output=True, text=True)
    if proc.stdout:
        print(proc.stdout, end="")
    if proc.returncode != 0:
        print(proc.stderr, end="")
        raise SystemExit(proc.returncode)
    print()


with tempfile.TemporaryDirectory() as scratch:
    scratch = Path(scratch)
    (scratch / "corpus.txt").write_text(CORPUS)
    (scratch / "instances.jsonl").write_text(
        "".join(json.dumps(i) + "\n" for i in INSTANCES)
    )

    run("train-ngram", "--corpus", scratch / "corpus.txt", "--order", "2",
        "--output", scratch / "bigram.json")

    run("decode", "--model", scratch / "bigram.json",
        "--input", scratch / "instances.jsonl",
        "--output", scratch / "decoded.jsonl",
        "--algorithm", "beam", "--k", "3", "--max-steps", "6", "--trace")

    print("decoded records:")
    for line in (scratch / "decoded.jsonl").read_text().splitlines():
        record = json.loads(line)
        print(f"  {record['id']:14} -> {' '.join(record['tokens'])}   "
              f"logprob {record['logprob']}")
    print()

    run("analyze-ranks", "--input", scratch / "decoded.jsonl",
        "--threshold", "2")

print("a rank analysis like this is how you pick a beam width: if every")
print("winner stayed within rank r, a beam of width r was already enough.")
