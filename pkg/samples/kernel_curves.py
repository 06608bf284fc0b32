"""
Time kernels of a single order, a band and the classical equation
for the first mode, next to the Mittag-Leffler reference.
"""
import math

import numpy as np

from src.dodiff import SpectralContext, band, delta, kernel_curve
from src.dodiff.oracle import mittag_leffler

if __name__ == "__main__":
    times = np.logspace(-3, 2, 11)
    parameters = {
        'delta(0.5)': delta((1.0, 0.5)),
        'band(0.2, 0.8)': band(0.2, 0.8),
        'delta(1)': delta((1.0, 1.0)),
    }
    curves = {name: kernel_curve(SpectralContext(C, math.pi), times) for name, C in parameters.items()}

    print(f"{'t':>10} " + " ".join(f"{name:>16}" for name in curves) + f" {'E_0.5':>16}")
    for index, t_value in enumerate(times):
        reference = mittag_leffler(0.5, -math.pi ** 2 * math.sqrt(t_value))
        row = " ".join(f"{curve.values[index]:16.10f}" for curve in curves.values())
        print(f"{t_value:10.4g} {row} {reference:16.10f}")
