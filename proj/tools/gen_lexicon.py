#!/usr/bin/env python3
"""Regenerate core/src/lexicon_data.inc.

Takes the most frequent English words (wordfreq's large_en list) that also
appear in the Brill tagger lexicon (as shipped in TextBlob's en-lexicon.txt)
and maps each word's most likely Penn tag onto the coarse tag set used by
the tagger.

    pip download textblob==0.15.3 wordfreq==3.1.1 --no-deps
    python3 tools/gen_lexicon.py --brill en-lexicon.txt \
        --freq large_en.msgpack.gz --size 8000 > core/src/lexicon_data.inc
"""
import argparse
import gzip
import re

import msgpack

COARSE = {
    "NN": "Noun", "NNS": "Noun",
    "NNP": "ProperNoun", "NNPS": "ProperNoun",
    "JJ": "Adj", "JJR": "Adj", "JJS": "Adj",
    "VB": "Verb", "VBD": "Verb", "VBG": "Verb", "VBN": "Verb",
    "VBP": "Verb", "VBZ": "Verb",
}

WORD = re.compile(r"^[a-z][a-z'-]*$")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--brill", required=True)
    ap.add_argument("--freq", required=True)
    ap.add_argument("--size", type=int, default=8000)
    args = ap.parse_args()

    brill = {}
    with open(args.brill, encoding="utf-8") as f:
        for line in f:
            if line.startswith(";;;"):
                continue
            parts = line.split()
            if len(parts) == 2 and parts[0] not in brill:
                brill[parts[0]] = parts[1]

    with gzip.open(args.freq, "rb") as f:
        buckets = msgpack.load(f, raw=False)[1:]

    picked = []
    seen = set()
    for bucket in buckets:
        for word in bucket:
            if len(picked) >= args.size:
                break
            if word in seen or not WORD.match(word) or word not in brill:
                continue
            seen.add(word)
            picked.append((word, COARSE.get(brill[word], "Other")))

    picked.sort()
    print("// Generated by tools/gen_lexicon.py. Do not edit by hand.")
    print("// Source: Brill tagger lexicon (via TextBlob), ranked by wordfreq.")
    for word, tag in picked:
        print('{"%s", Pos::%s},' % (word, tag))


if __name__ == "__main__":
    main()
