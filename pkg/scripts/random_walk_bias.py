"""Distribution of the fitted eigenvalue for a 1-D random walk over many seeds."""

import argparse
from dataclasses import dataclass

import numpy as np

import koopdmd as kd
from koopdmd import systems


@dataclass
class Config:
    sigma: float = 0.01
    samples: int = 200
    seeds: int = 100


def run(cfg: Config) -> np.ndarray:
    lam = []
    for seed in range(cfg.seeds):
        spec = systems.noisy_random_walk(cfg.sigma, seed, [1.0], cfg.samples - 1)
        lam.append(kd.fit(systems.generate(spec)).eigenvalues[0].real)
    return np.array(lam)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=Config.sigma)
    ap.add_argument("--samples", type=int, default=Config.samples)
    ap.add_argument("--seeds", type=int, default=Config.seeds)
    cfg = Config(**vars(ap.parse_args()))
    lam = run(cfg)
    print(f"seeds={cfg.seeds} samples={cfg.samples} sigma={cfg.sigma}")
    print(f"eigenvalue mean {lam.mean():.5f} std {lam.std():.5f} range [{lam.min():.5f}, {lam.max():.5f}]")
    print(f"within 0.05 of 1: {np.mean(np.abs(lam - 1) <= 0.05):.0%}")


if __name__ == "__main__":
    main()
