#!/usr/bin/env python3
"""Writes small synthetic annotated sets in the dataset TSV format.

  <lang>.dev.tsv   100 rows
  <lang>.test.tsv  200 rows

References are strings of made-up words drawn from a per-language syllable
inventory; hypotheses are noisy copies of them. The human columns are a noisy
function of how much damage was applied, so the scores correlate with real
string similarity without being a closed form of any one feature.

Output is deterministic for a given --seed.
"""
import argparse
import pathlib
import random

SYLLABLES = {
    "gn": "ña ndé ru yvy pa re ko che hai mba'e po rã jey ka gua ñe'ẽ tã py kuã".split(),
    "bzd": "ye' ká wö sa tsö ì di blö kë ñì shka ju bë tté sö ala kua".split(),
    "nah": "xo chi tl in cui ca tl a tla mo ti hua tzin cal me tzi yo nqui".split(),
}
SOURCE_WORDS = "el la casa agua tierra sol luna perro niño mujer hombre camino grande pequeño come habla ve".split()


def word(rng, inv):
    return "".join(rng.choice(inv) for _ in range(rng.randint(1, 3)))


def damage(rng, ref, inv, level):
    words = ref.split()
    out = []
    for w in words:
        u = rng.random()
        if u < level * 0.25:
            continue  # dropped
        if u < level * 0.5:
            out.append(word(rng, inv))  # replaced
            continue
        chars = list(w)
        for i in range(len(chars)):
            if rng.random() < level * 0.2:
                chars[i] = rng.choice("aeiouktnmsy")
        out.append("".join(chars))
    if out and rng.random() < level:
        i = rng.randrange(len(out))
        j = rng.randrange(len(out))
        out[i], out[j] = out[j], out[i]
    if rng.random() < level * 0.3:
        out.append(word(rng, inv))
    return " ".join(out) if out else word(rng, inv)


def clip(x):
    return max(0.0, min(100.0, x))


def rows(rng, lang, n, prefix):
    inv = SYLLABLES[lang]
    for k in range(n):
        ref = " ".join(word(rng, inv) for _ in range(rng.randint(3, 9)))
        src = " ".join(rng.choice(SOURCE_WORDS) for _ in range(rng.randint(3, 8)))
        level = rng.random() ** 1.3
        hyp = ref if level < 0.03 else damage(rng, ref, inv, level)
        semantic = round(clip(100 * (1 - level) ** 1.2 + rng.gauss(0, 6)))
        fluency = round(clip(100 * (1 - level * level) + rng.gauss(0, 8)))
        yield f"{prefix}-{k + 1:04d}", src, ref, hyp, semantic, fluency


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=pathlib.Path(__file__).parent, type=pathlib.Path)
    ap.add_argument("--seed", default=2025, type=int)
    ap.add_argument("--languages", nargs="+", default=sorted(SYLLABLES))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for lang in args.languages:
        for split, n in (("dev", 100), ("test", 200)):
            rng = random.Random(f"{args.seed}:{lang}:{split}")
            path = args.out / f"{lang}.{split}.tsv"
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write("id\tsource\treference\thypothesis\tsemantic\tfluency\n")
                for r in rows(rng, lang, n, f"{lang}-{split}"):
                    f.write("\t".join(str(x) for x in r) + "\n")
            print(path)


if __name__ == "__main__":
    main()
