"""Lift the slow-manifold map with monomial observables and track forecast error by degree."""

import argparse
from dataclasses import dataclass

import numpy as np

import koopdmd as kd
from koopdmd import systems


@dataclass
class Config:
    lam: float = 0.9
    mu: float = 0.5
    x0: tuple = (1.0, 0.0)
    steps: int = 20
    horizon: int = 30
    max_degree: int = 3


def run(cfg: Config) -> dict:
    spec = systems.slow_manifold(cfg.lam, cfg.mu, list(cfg.x0), cfg.steps)
    data = systems.generate(spec)
    out = {}
    for degree in range(1, cfg.max_degree + 1):
        km = kd.fit_koopman(data, kd.monomial_dictionary(2, degree))
        err = max(
            np.abs(kd.predict_koopman(km, k).state - systems.true_state(spec, k)).max()
            for k in range(cfg.horizon + 1)
        )
        out[degree] = (km.p, km.lifted_model.r, km.lifted_model.eigenvalues, err)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=Config.lam)
    ap.add_argument("--mu", type=float, default=Config.mu)
    ap.add_argument("--horizon", type=int, default=Config.horizon)
    ap.add_argument("--max-degree", type=int, default=Config.max_degree)
    cfg = Config(**vars(ap.parse_args()))
    for degree, (p, r, lam, err) in run(cfg).items():
        spectrum = ", ".join(f"{z.real:.4f}" for z in lam)
        print(f"degree {degree}: p={p} r={r} max error {err:.2e}  spectrum [{spectrum}]")


if __name__ == "__main__":
    main()
