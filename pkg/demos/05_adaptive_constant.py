"""
The plateau rule behind the adaptive criterion
==============================================

The adaptive variant estimates its over-penalization constant from the
data: fit a slope-1/n line to the negated empirical risks of the largest
models, normalize the residuals into candidate constants, and scan the
proportion of models used.  The constant is read off the longest plateau
of proportions that select the same model.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from overpen import (
    adaptive_constant,
    criterion_from_string,
    default_model_grid,
    draw_samples,
    get_density,
    select_argmin,
)

density = get_density("bilog_peak")
n = 200
samples = draw_samples(density, seed=11, n=n)
models = default_model_grid(density.support, n)

trace = adaptive_constant(models, samples)
print(f"{len(models)} models, alpha grid of {len(trace.alpha_grid)} points")
lo, hi = trace.plateau
print(f"plateau: proportions {trace.alpha_grid[lo]:.2f}..."
      f"{trace.alpha_grid[hi - 1]:.2f} all select dimension "
      f"{trace.selected_dim_per_alpha[lo]}")
print(f"estimated constant: C = {trace.c_hat:.4f}")

res = select_argmin(models, samples, criterion_from_string("adaptive"))
print(f"adaptive selection: {models[res.selected].cells} cells")

# ---------------------------------------------------------------
# the two diagnostic views: the line fit and the plateau scan
# ---------------------------------------------------------------
from overpen import empirical_risk, fit_mle

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))

dims = np.array([m.dim for m in models], dtype=float)
neg_risk = np.array([-empirical_risk(fit_mle(m, samples), samples)
                     for m in models])
ax1.scatter(dims, neg_risk, s=12, label="-empirical risk")
ax1.plot(dims, dims / n + trace.intercept_hat, "r-", lw=1,
         label="slope-1/n fit")
ax1.set_xlabel("model dimension")
ax1.legend()

ax2.step(trace.alpha_grid, trace.selected_dim_per_alpha, where="mid")
ax2.axvspan(trace.alpha_grid[lo], trace.alpha_grid[hi - 1], alpha=0.2,
            color="tab:green", label="longest plateau")
ax2.set_xlabel("proportion of largest models")
ax2.set_ylabel("selected dimension")
ax2.legend()

fig.tight_layout()
fig.savefig("adaptive_constant.png", dpi=120)
print("wrote adaptive_constant.png")
