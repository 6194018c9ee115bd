#!/usr/bin/env python3
# Copyright 2026 The nppkit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent reference scorer for BLEU-4, exact METEOR and plain CIDEr.

Written from the metric definitions, not from the C++ sources. METEOR
alignments are found by exhaustive enumeration, so keep segments short.

  metrics_oracle.py                 check committed expected values
  metrics_oracle.py --write         regenerate tests/data/eval/expected.json
  metrics_oracle.py --cli PATH      also diff the CLI on random corpora
"""

import argparse
import collections
import json
import math
import os
import random
import subprocess
import sys
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))
EVAL = os.path.join(HERE, "..", "data", "eval")
TOL = 1e-9


def tokenize(text):
    out = []
    for word in text.lower().split():
        cut = len(word)
        while cut > 0 and word[cut - 1] in ".,!?;:":
            cut -= 1
        if cut:
            out.append(word[:cut])
        out.extend(word[cut:])
    return out


def ngrams(tokens, n):
    return collections.Counter(
        tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


# BLEU

def bleu_stats(cand, refs):
    matches, totals = [], []
    for n in range(1, 5):
        c = ngrams(cand, n)
        best = collections.Counter()
        for r in refs:
            for g, k in ngrams(r, n).items():
                best[g] = max(best[g], k)
        matches.append(sum(min(k, best[g]) for g, k in c.items()))
        totals.append(sum(c.values()))
    ref_len = min((abs(len(r) - len(cand)), len(r)) for r in refs)[1]
    return matches, totals, len(cand), ref_len


def brevity(c, r):
    return 1.0 if c >= r else math.exp(1 - r / c)


def corpus_bleu(segs):
    m, t, c, r = [0] * 4, [0] * 4, 0, 0
    for cand, refs in segs:
        sm, st, sc, sr = bleu_stats(cand, refs)
        m = [a + b for a, b in zip(m, sm)]
        t = [a + b for a, b in zip(t, st)]
        c += sc
        r += sr
    if c == 0 or any(x == 0 for x in m) or any(x == 0 for x in t):
        return 0.0
    logp = sum(math.log(a / b) for a, b in zip(m, t)) / 4
    return 100 * brevity(c, r) * math.exp(logp)


def sentence_bleu(cand, refs):
    m, t, c, r = bleu_stats(cand, refs)
    if c == 0 or m[0] == 0:
        return 0.0
    logp = math.log(m[0] / t[0])
    logp += sum(math.log((m[n] + 1) / (t[n] + 1)) for n in range(1, 4))
    return 100 * brevity(c, r) * math.exp(logp / 4)


# METEOR

def chunks_of(pairs):
    pairs = sorted(pairs)
    count = 0
    prev = None
    for i, j in pairs:
        if prev is None or (i, j) != (prev[0] + 1, prev[1] + 1):
            count += 1
        prev = (i, j)
    return count


def align(cand, ref):
    """(matches, chunks) by enumerating every one-to-one exact alignment."""
    best = [0, 0]

    def go(i, used, pairs):
        if i == len(cand):
            m = len(pairs)
            ch = chunks_of(pairs)
            if m > best[0] or (m == best[0] and m > 0 and ch < best[1]):
                best[0], best[1] = m, ch
            return
        go(i + 1, used, pairs)
        for j, tok in enumerate(ref):
            if tok == cand[i] and j not in used:
                used.add(j)
                pairs.append((i, j))
                go(i + 1, used, pairs)
                pairs.pop()
                used.discard(j)

    go(0, set(), [])
    return best[0], best[1]


def meteor_from(m, ch, c, r):
    if m == 0:
        return 0.0
    p, rc = m / c, m / r
    fmean = 10 * p * rc / (rc + 9 * p)
    return fmean * (1 - 0.5 * (ch / m) ** 3)


def meteor_stats(cand, refs):
    best, best_score = None, -1.0
    for r in refs:
        m, ch = align(cand, r)
        s = meteor_from(m, ch, len(cand), len(r))
        if s > best_score:
            best, best_score = (m, ch, len(cand), len(r)), s
    return best


def corpus_meteor(segs):
    tot = [0, 0, 0, 0]
    for cand, refs in segs:
        tot = [a + b for a, b in zip(tot, meteor_stats(cand, refs))]
    return meteor_from(*tot)


# CIDEr

def cider(segs):
    S = len(segs)
    scores = [0.0] * S
    for n in range(1, 5):
        df = collections.Counter()
        for _, refs in segs:
            df.update(set(g for r in refs for g in ngrams(r, n)))

        def vec(tokens):
            return {g: k * math.log(S / max(1, df[g]))
                    for g, k in ngrams(tokens, n).items()}

        def cos(a, b):
            na = math.sqrt(sum(v * v for v in a.values()))
            nb = math.sqrt(sum(v * v for v in b.values()))
            if na == 0 or nb == 0:
                return 0.0
            return sum(v * b.get(g, 0.0) for g, v in a.items()) / (na * nb)

        for s, (cand, refs) in enumerate(segs):
            cv = vec(cand)
            scores[s] += sum(cos(cv, vec(r)) for r in refs) / len(refs)
    scores = [10 * x / 4 for x in scores]
    return sum(scores) / S, scores


def score(cand_lines, ref_lines):
    segs = [(tokenize(c), [tokenize(r) for r in refs.split("\t")])
            for c, refs in zip(cand_lines, ref_lines)]
    corpus_cider, seg_cider = cider(segs)
    return {
        "bleu4": corpus_bleu(segs),
        "meteor": corpus_meteor(segs),
        "cider": corpus_cider,
        "per_segment": [
            {"bleu": sentence_bleu(c, r),
             "meteor": meteor_from(*meteor_stats(c, r)),
             "cider": seg_cider[i]}
            for i, (c, r) in enumerate(segs)],
    }


def read_lines(path):
    with open(path, encoding="utf-8") as f:
        return f.read().splitlines()


FIXTURES = {
    "main": ("candidates.txt", "references.txt"),
    "cider_toy": ("cider_toy_candidates.txt", "cider_toy_references.txt"),
}


def fixture_scores():
    return {name: score(read_lines(os.path.join(EVAL, c)),
                        read_lines(os.path.join(EVAL, r)))
            for name, (c, r) in FIXTURES.items()}


def close(a, b):
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(close(a[k], b[k]) for k in a)
    if isinstance(a, list):
        return len(a) == len(b) and all(close(x, y) for x, y in zip(a, b))
    if a is None or b is None:
        return a is b
    return abs(a - b) <= TOL


def hand_values():
    failures = []
    m = bleu_stats(tokenize("the the the"), [tokenize("the cat")])
    if (m[0][0], m[1][0]) != (1, 3):
        failures.append("clipped unigram precision != 1/3")
    v = meteor_from(*meteor_stats(tokenize("the cat sat"),
                                  [tokenize("the cat napped")]))
    if abs(v - 0.625) > TOL:
        failures.append("meteor the-cat-sat %r" % v)
    v = meteor_from(*meteor_stats(tokenize("a b c d"), [tokenize("a b c d")]))
    if abs(v - 0.9921875) > TOL:
        failures.append("meteor identity %r" % v)
    return failures


def random_corpus(rng):
    vocab = ["a", "b", "c", "d", "e", "the", "cat"]
    segs = rng.randint(2, 6)
    cands, refs = [], []
    for _ in range(segs):
        cands.append(" ".join(rng.choice(vocab)
                              for _ in range(rng.randint(0, 7))))
        refs.append("\t".join(
            " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 7)))
            for _ in range(rng.randint(1, 3))))
    return cands, refs


def run_cli(cli, cands, refs, workdir):
    cp, rp = os.path.join(workdir, "c.txt"), os.path.join(workdir, "r.txt")
    report = os.path.join(workdir, "report.txt")
    with open(cp, "w") as f:
        f.write("".join(x + "\n" for x in cands))
    with open(rp, "w") as f:
        f.write("".join(x + "\n" for x in refs))
    subprocess.run([cli, "evaluate", "--candidates", cp, "--references", rp,
                    "--report", report], check=True, stdout=subprocess.DEVNULL)
    with open(report + ".json") as f:
        doc = json.load(f)
    return {"bleu4": doc["bleu4"], "meteor": doc["meteor"],
            "cider": doc["cider"],
            "per_segment": [{k: s[k] for k in ("bleu", "meteor", "cider")}
                            for s in doc["per_segment"]]}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write", action="store_true")
    ap.add_argument("--cli")
    ap.add_argument("--trials", type=int, default=300)
    args = ap.parse_args()

    expected_path = os.path.join(EVAL, "expected.json")
    got = fixture_scores()
    if args.write:
        with open(expected_path, "w") as f:
            json.dump(got, f, indent=2)
            f.write("\n")
        print("wrote", expected_path)
        return 0

    failures = hand_values()
    with open(expected_path) as f:
        committed = json.load(f)
    if not close(got, committed):
        failures.append("committed expected.json is stale")

    if args.cli:
        with tempfile.TemporaryDirectory() as tmp:
            for name, (c, r) in FIXTURES.items():
                out = run_cli(args.cli, read_lines(os.path.join(EVAL, c)),
                              read_lines(os.path.join(EVAL, r)), tmp)
                if not close(out, got[name]):
                    failures.append("cli differs on fixture " + name)
            rng = random.Random(1234)
            for trial in range(args.trials):
                cands, refs = random_corpus(rng)
                if not close(run_cli(args.cli, cands, refs, tmp),
                             score(cands, refs)):
                    failures.append("cli differs on random corpus %d: %r %r"
                                    % (trial, cands, refs))
                    break

    for f in failures:
        print("FAIL:", f)
    print("metrics oracle:", "FAIL" if failures else "ok")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
