#!/usr/bin/env python3
"""Writes data/recidivism/, a synthetic dataset in the layout of the public
two-year recidivism data: demographic and criminal-history features, a binary
outcome, and three classifiers of different quality."""

import csv
import json
import math
import random
import sys
from pathlib import Path

RACES = ["African-American", "Caucasian", "Hispanic", "Other"]
RACE_WEIGHTS = [0.5, 0.34, 0.09, 0.07]
LABELS = ["no", "yes"]


def logistic(x):
    return 1.0 / (1.0 + math.exp(-x))


def main(out_dir, n=800, seed=5):
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(n):
        race = rng.choices(RACES, RACE_WEIGHTS)[0]
        sex = "Female" if rng.random() < 0.2 else "Male"
        age = rng.randint(18, 70)
        priors = min(int(rng.expovariate(0.3)), 38)
        degree = "F" if rng.random() < 0.64 else "M"
        risk = -0.4 + 0.12 * priors - 0.04 * (age - 35) + (0.3 if degree == "F" else 0.0)
        risk -= 0.35 if sex == "Female" else 0.0
        actual = "yes" if rng.random() < logistic(risk) else "no"

        def predict(noise, bias):
            score = risk + rng.gauss(0.0, noise) + bias
            return "yes" if score > 0.0 else "no"

        # the scored tool leans on group membership; the others do not
        compas = predict(1.1, 0.45 if race == "African-American" else -0.1)
        logreg = predict(0.8, 0.0)
        tree = predict(1.3, 0.05)
        split = "test" if rng.random() < 0.3 else "train"
        rows.append([f"p{i:04d}", split, actual, age, priors, race, sex, degree, compas, logreg, tree])

    manifest = {
        "labels": LABELS,
        "classifiers": ["compas", "logreg", "tree"],
        "features": [
            {"name": "age", "kind": "continuous", "missing_allowed": False},
            {"name": "priors_count", "kind": "continuous", "missing_allowed": False},
            {"name": "race", "kind": "categorical", "categories": RACES, "missing_allowed": False},
            {"name": "sex", "kind": "categorical", "categories": ["Female", "Male"], "missing_allowed": False},
            {"name": "c_charge_degree", "kind": "categorical", "categories": ["F", "M"], "missing_allowed": False},
        ],
        "data": "data.csv",
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    with open(out / "data.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["id", "split", "actual", "age", "priors_count", "race", "sex", "c_charge_degree",
                    "compas", "logreg", "tree"])
        w.writerows(rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/recidivism")
