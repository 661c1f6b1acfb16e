"""
relu vs gelu from identical starting weights
============================================

A small hand-backprop network learns a smooth 2D target twice, once per
activation, from byte-identical seeded initial weights. The only varying
factor is the activation, so the loss curves are directly comparable.
"""

import numpy as np

from openscene.numerics import (
    ConvergenceConfig,
    format_summary,
    gelu,
    gelu_grad,
    relu,
    run_convergence_lab,
)

# gelu is a smooth gate on the identity: x times the probability that a
# standard normal stays below x. It never exceeds relu.
xs = np.linspace(-3, 3, 7)
print("x     ", "  ".join(f"{v:6.2f}" for v in xs))
print("relu  ", "  ".join(f"{v:6.3f}" for v in relu(xs)))
print("gelu  ", "  ".join(f"{v:6.3f}" for v in gelu(xs)))
print("gelu' ", "  ".join(f"{v:6.3f}" for v in gelu_grad(xs)))

config = ConvergenceConfig(seed=7, hidden_sizes=(16,), learning_rate=0.05,
                           epochs=150, loss_threshold=0.05, optimizer="adam")
report = run_convergence_lab(config)
print()
print(format_summary(report))

# Same config, same seed, same bytes: the report is reproducible.
again = run_convergence_lab(config)
same = all(report.runs[k].losses == again.runs[k].losses for k in report.runs)
print(f"\nrepeat run identical: {same}")
