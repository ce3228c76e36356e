#!/usr/bin/env python3
# Copyright 2026 The adaptrag Authors.
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
"""Token-overlap F1 reference scores for hand-written answer pairs.

Writes one tab-separated line per pair: prediction, golds joined by "|",
and the expected score printed with full double precision.
"""

import collections
import sys

PAIRS = [
    ("New York City", ["New York City"]),
    ("non ferrous metal", ["non-ferrous"]),
    ("Paris", ["Berlin"]),
    ("The New-York City.", ["new york city"]),
    ("", [""]),
    ("", ["Paris"]),
    ("Paris", [""]),
    ("the", ["a"]),
    ("Bhupendranath Dutt", ["Bhupendranath Dutt", "B. Dutt"]),
    ("Dutt", ["Bhupendranath Dutt"]),
    ("Columbia University in New York", ["Columbia University"]),
    ("one member", ["One member", "a single member"]),
    ("four four instruments", ["four instruments"]),
    ("four instruments", ["four four instruments"]),
    ("an apple a day", ["The apple"]),
    ("1906", ["1906", "March 1906"]),
    ("March, 1906!", ["1906"]),
    ("Badly Drawn Boy", ["Wolf Alice", "Badly Drawn Boy"]),
    ("wolf", ["Wolf Alice", "Alice"]),
    ("Café Müller", ["café müller"]),
    ("CAFÉ", ["cafe"]),
    ("x y z", ["z y x"]),
    ("a b c d", ["b d e"]),
    ("Gisuth", ["gisuth", "other"]),
    ("well-known 2nd-place", ["well known", "2nd place finish"]),
]

ARTICLES = {"a", "an", "the"}


def normalize(text):
    spaced = "".join(ch.lower() if ch.isalnum() else " " for ch in text)
    return [t for t in spaced.split() if t not in ARTICLES]


def pair_f1(pred, gold):
    if not pred and not gold:
        return 1.0
    if not pred or not gold:
        return 0.0
    common = collections.Counter(pred) & collections.Counter(gold)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred)
    recall = overlap / len(gold)
    return 2.0 * precision * recall / (precision + recall)


def score(pred, golds):
    p = normalize(pred)
    return max(pair_f1(p, normalize(g)) for g in golds)


def main():
    out = sys.stdout if len(sys.argv) < 2 else open(sys.argv[1], "w", encoding="utf-8")
    for pred, golds in PAIRS:
        out.write("%s\t%s\t%s\n" % (pred, "|".join(golds), repr(score(pred, golds))))


if __name__ == "__main__":
    main()
