#!/usr/bin/env python3
"""Regenerates the bundled synthetic panel under data/synthetic/.

Six sectors over 1957-2020 (64 years). Value added grows at 2%/year while the
economy-wide capital stock grows at 3.5%/year, so the average rate of profit
declines throughout the sample. A small Juglar-length cycle and deterministic
noise are layered on top so the trend filters have something to remove.
"""

import math
import os
import random

START_YEAR = 1957
N_YEARS = 64

SECTORS = [
    ("Farms", 120.0, 1),
    ("Mining", 80.0, 1),
    ("Construction", 150.0, 1),
    ("Durable goods manufacturing", 260.0, 1),
    ("Retail trade", 180.0, 0),
    ("Finance and insurance", 140.0, 0),
]


def main() -> None:
    rng = random.Random(20200704)
    here = os.path.dirname(os.path.abspath(__file__))
    out = os.path.join(here, "..", "data", "synthetic")
    os.makedirs(out, exist_ok=True)

    rows = {"surplus": [], "depreciation": [], "compensation": [], "value_added": []}
    capital, intermediate = [], []

    for t in range(N_YEARS):
        year = START_YEAR + t
        cycle = 1.0 + 0.03 * math.sin(2.0 * math.pi * t / 9.0)
        va_total = 0.0
        for name, base, _ in SECTORS:
            va = base * (1.02 ** t) * cycle * (1.0 + 0.01 * rng.uniform(-1.0, 1.0))
            comp = 0.58 * va * (1.0 + 0.005 * rng.uniform(-1.0, 1.0))
            surplus = va - comp
            dep = 0.12 * surplus
            va_total += va
            rows["value_added"].append((name, year, va))
            rows["compensation"].append((name, year, comp))
            rows["surplus"].append((name, year, surplus))
            rows["depreciation"].append((name, year, dep))
        capital.append((year, 2400.0 * (1.035 ** t)))
        intermediate.append((year, 0.45 * va_total))

    for key, data in rows.items():
        with open(os.path.join(out, f"{key}.csv"), "w", encoding="utf-8") as f:
            f.write("sector,year,value\n")
            for name, year, value in data:
                f.write(f"{name},{year},{value:.6f}\n")
    for key, data in (("capital_stock", capital), ("intermediate_consumption", intermediate)):
        with open(os.path.join(out, f"{key}.csv"), "w", encoding="utf-8") as f:
            f.write("year,value\n")
            for year, value in data:
                f.write(f"{year},{value:.6f}\n")
    with open(os.path.join(out, "criteria_mask.csv"), "w", encoding="utf-8") as f:
        f.write("sector,flag\n")
        for name, _, flag in SECTORS:
            f.write(f"{name},{flag}\n")


if __name__ == "__main__":
    main()
