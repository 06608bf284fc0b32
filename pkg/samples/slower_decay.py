"""
Which of two diffusion parameters relaxes more slowly?
Lower orders win at late times and lose at early times.
"""
import math

import numpy as np

from src.dodiff import band, compare_decay, delta

if __name__ == "__main__":
    pairs = [
        (delta((1.0, 0.3)), delta((1.0, 0.7))),
        (band(0.3, 0.7), delta((1.0, 0.7))),
    ]
    for early, late in ((1e-3, 1e-1), (10.0, 1e3)):
        times = np.logspace(math.log10(early), math.log10(late), 10)
        for C1, C2 in pairs:
            verdict = compare_decay(C1, C2, math.pi, times)
            print(f"t in [{early:g}, {late:g}]: {C1!r} vs {C2!r} -> {verdict.verdict} "
                  f"(sufficient condition: {verdict.sufficient_condition_holds})")
