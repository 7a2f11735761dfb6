#!/usr/bin/env python3
# Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
#
# Regenerates pairs.tsv and word_vectors_50d.txt. Output is deterministic.
#
# Pairs are separable by construction: label-1 pairs share most of their
# words (a paraphrase swaps one or two), label-0 pairs share none.

import os
import random

WORDS = """
the a cat dog bird fish horse cow sheep goat
runs walks jumps sleeps eats drinks sings reads writes swims
quickly slowly quietly loudly happily sadly often rarely never always
red blue green yellow black white small large old young
house garden river forest city village school market field road
morning evening night winter summer spring autumn today yesterday tomorrow
man woman child teacher doctor farmer baker singer painter driver
apple bread water milk cheese rice soup tea coffee cake
book letter song story poem picture map key door window
near under over behind beside inside outside across along through
""".split()
assert len(WORDS) == 100 and len(set(WORDS)) == 100

HERE = os.path.dirname(os.path.abspath(__file__))


def make_pairs(rng, count=40):
    rows = []
    for i in range(count):
        n = rng.randint(6, 9)
        s1 = rng.sample(WORDS, n)
        if i % 2 == 0:
            s2 = list(s1)
            for _ in range(rng.randint(1, 2)):
                pos = rng.randrange(n)
                s2[pos] = rng.choice([w for w in WORDS if w not in s1])
            rng.shuffle(s2)
            label = 1
        else:
            rest = [w for w in WORDS if w not in s1]
            s2 = rng.sample(rest, rng.randint(6, 9))
            label = 0
        rows.append((label, " ".join(s1), " ".join(s2)))
    return rows


def main():
    rng = random.Random(42)
    with open(os.path.join(HERE, "pairs.tsv"), "w", newline="\n") as f:
        f.write("label\tsentence1\tsentence2\n")
        for label, a, b in make_pairs(rng):
            f.write(f"{label}\t{a}\t{b}\n")
    with open(os.path.join(HERE, "word_vectors_50d.txt"), "w", newline="\n") as f:
        for w in WORDS:
            f.write(w + " " + " ".join(f"{rng.gauss(0.0, 0.5):.6f}" for _ in range(50)) + "\n")


if __name__ == "__main__":
    main()
