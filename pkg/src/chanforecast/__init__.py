"""Non-stationary MIMO channel prediction workbench.

Synthetic time-varying channel generation, hypernetwork-adjusted LSTM
predictors, classical baselines and the evaluation harness around them.
"""

__version__ = "0.1.0"
