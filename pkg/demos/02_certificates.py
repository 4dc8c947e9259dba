"""Finite sample stickiness certificates for the X_t family on the 3-spider.

Scans every n in {N, ..., N^2} and reports the certified level rho.
The largest case (N = 5000) evaluates 25 million bounds and takes a few
seconds.
"""
# %%
from spiderfss import BoundInputs, CertificationFailed, bound_curve, certify, example_xt, population_folded_summary

# %% Folded moments of X_t for t = 0.01: the mean sits on leg 3 at distance t.
dist = example_xt(3, 0.01)
s = population_folded_summary(dist)
print("m      =", s.m)
print("sigma2 =", s.sigma2)

# %% The bound p_n + n m_k^2 / sigma_k^2 (1 - p_nk) at a few sample sizes.
inp = BoundInputs.from_distribution(dist)
for row in bound_curve([10, 100, 1000, 10_000], inp):
    print(f"n={row.n:>6}  p_n={row.p_n:.4f}  p_nk={row.p_nk:+.4f}  bound={row.bound:.4f}")

# %% Certificates for the three settings with scale 2.
for t, N in [(1e-2, 100), (1e-3, 500), (1e-4, 5000)]:
    cert = certify(N, 2, BoundInputs.from_distribution(example_xt(3, t)))
    print(f"t={t:g}  N={N:<5} rho={cert.level:.4f}  (largest bound {cert.max_bound:.4f} at n={cert.argmin_n})")

# %% Too large a t: the n m_k^2 / sigma_k^2 term pushes the bound above 1.
try:
    certify(100, 2, BoundInputs.from_distribution(example_xt(3, 1.0)))
except CertificationFailed as fail:
    print("no certificate:", fail)
