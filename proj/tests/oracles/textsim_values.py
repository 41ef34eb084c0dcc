#!/usr/bin/env python3
"""Frozen expected values for the textsim tests.

sequence ratio: difflib.SequenceMatcher with autojunk disabled, run with the
                code-point-smaller string first.
OSA distance:   rapidfuzz.distance.OSA.
"""
from difflib import SequenceMatcher

from rapidfuzz.distance import OSA


def ratio(a, b):
    if not a and not b:
        return 1.0
    a, b = min(a, b), max(a, b)
    return SequenceMatcher(None, a, b, autojunk=False).ratio()


def token_sort(a, b):
    return ratio(" ".join(sorted(a.split())), " ".join(sorted(b.split())))


pairs = [
    ("abcd", "bcde"),
    ("hola mundo", "bola mundo"),
    ("kitten", "sitting"),
    ("ñande ru", "nande ru"),
    ("the quick brown fox", "the quick brown dog"),
    ("mba'éichapa reiko", "mbaéichapa reiko"),
    ("abcabcabc", "cbacbacba"),
    ("xochitl in cuicatl", "in xochitl in cuicatl"),
]
for a, b in pairs:
    print(f"ratio({a!r},{b!r}) = {ratio(a, b)!r}  osa={OSA.distance(a, b)}"
          f"  lexsim={1 - OSA.distance(a, b) / max(len(a), len(b))!r}  tsr={token_sort(a, b)!r}")
print("tsr(hola mundo, mundo bola)", repr(token_sort("hola mundo", "mundo bola")))
