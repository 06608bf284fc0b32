"""
Central integral of a band parameter between its lower and upper bounds
"""
import math

import numpy as np

from src.dodiff import band, bounds_report

if __name__ == "__main__":
    report = bounds_report(band(0.3, 0.7), math.pi, np.logspace(-1, 2, 8))
    print(f"m = {report.m:.6g} at r0 = {report.r0:.6g} (two-step minimum {report.m_alternative:.6g})")
    print(f"{'t':>10} {'lower':>14} {'I':>14} {'upper':>14}")
    for t_value, lower, central, upper in zip(report.times, report.lower, report.central, report.upper):
        print(f"{t_value:10.4g} {lower:14.6e} {central:14.6e} {upper:14.6e}")
    print(f"sandwich holds: {report.sandwich_holds()}")
