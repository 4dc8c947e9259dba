"""Frechet means on the 3-spider.

Run with ``python demos/01_spider_means.py``.
"""
# %%
import numpy as np

from spiderfss import (
    ORIGIN,
    SpiderPoint,
    SpiderSample,
    distance,
    fold,
    folded_sample_summary,
    frechet_function_value,
    frechet_sample_mean,
)

# %% Points and the metric. Distances across legs run through the origin.
a, b = SpiderPoint(1, 1.0), SpiderPoint(3, 2.0)
print("d(a, b) =", distance(a, b, K=3))
print("d(origin, b) =", distance(ORIGIN, b, K=3))

# %% Folding map 1 sends leg 1 to the positive axis and folds the others onto the negative one.
print("F_1(a) =", fold(1, a), " F_1(b) =", fold(1, b))

# %% A sample with its folded means. At most one eta_k is positive; that leg carries the mean.
sample = SpiderSample.from_pairs(3, [(1, 3.0), (2, 1.0), (3, 0.5), (1, 0.25)])
summary = folded_sample_summary(sample)
print("eta =", summary.eta)
print("h   =", summary.h)
mean = frechet_sample_mean(sample)
print("sample mean:", mean)

# %% Check against a brute-force search over a grid on every leg.
grid = np.arange(0.001, 4.0, 0.001)
best = min(
    ((frechet_function_value(sample, SpiderPoint(leg, x)), leg, x) for leg in (1, 2, 3) for x in grid[::10]),
)
print(f"grid minimum {best[0]:.6f} at leg {best[1]}, x={best[2]:.3f}; "
      f"closed form {frechet_function_value(sample, mean):.6f}")

# %% A symmetric sample sticks to the origin.
sym = SpiderSample.from_pairs(3, [(1, 1.0), (2, 1.0), (3, 1.0)])
print("symmetric sample mean:", frechet_sample_mean(sym))
