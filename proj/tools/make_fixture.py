#!/usr/bin/env python3
"""Writes the synthetic 1995-2019 accident-record fixture used by the tests.

The data is invented: yearly cause counts follow independent Poisson draws
around slowly drifting means, districts and hours follow fixed weights.
"""
import random
import sys

DISTRICTS = [
    ("Barishal", 18), ("Chattogram", 16), ("Dhaka", 12), ("Narayanganj", 10),
    ("Chandpur", 9), ("Khulna", 8), ("Munshiganj", 7), ("Bhola", 5),
    ("Patuakhali", 4), ("Sunamganj", 3), ("Kishoreganj", 3), ("Pirojpur", 2),
    ("Madaripur", 2), ("Shariatpur", 2), ("Gopalganj", 1), ("Sirajganj", 1),
]
CAUSES = ["Collision", "StormyWeather", "ExcessiveCurrent", "Grounding", "Overloading", "Other"]
BASE = {"Collision": 9.0, "StormyWeather": 4.0, "ExcessiveCurrent": 3.0,
        "Grounding": 2.0, "Overloading": 2.5, "Other": 3.0}
HOUR_WEIGHTS = [1, 1, 1, 1, 1, 2, 2, 3, 3, 4, 6, 7, 7, 6, 7, 6, 4, 3, 4, 4, 3, 3, 2, 1]


def poisson(rng, lam):
    # Knuth's method; lam stays small here.
    import math
    threshold, k, p = math.exp(-lam), 0, 1.0
    while True:
        p *= rng.random()
        if p <= threshold:
            return k
        k += 1


def main(out):
    rng = random.Random(20190611)
    names = [d for d, _ in DISTRICTS]
    weights = [w for _, w in DISTRICTS]
    out.write("year,district,hour,cause,casualties\n")
    for year in range(1995, 2020):
        drift = 1.0 + 0.6 * rng.random()
        for cause in CAUSES:
            for _ in range(poisson(rng, BASE[cause] * drift)):
                district = rng.choices(names, weights)[0]
                hour = "" if rng.random() < 0.3 else str(rng.choices(range(24), HOUR_WEIGHTS)[0])
                casualties = "unknown" if rng.random() < 0.2 else str(poisson(rng, 4.0))
                out.write(f"{year},{district},{hour},{cause},{casualties}\n")


if __name__ == "__main__":
    main(sys.stdout)
