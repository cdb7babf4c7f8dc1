"""k-regular subgraphs of random graphs near the k-core threshold.

Threshold constants, truncated-Poisson degree sequences, configuration-model
and process samplers, k-core / k-factor detection, and the first-moment bound
functions, with a seeded experiment harness and CLI.
"""

__version__ = "0.1.0"
