"""Multi-dimensional statistical dialogue management: per-dimension policy
agents trained by reinforcement learning against a simulated user with a
noisy channel, cross-domain policy transfer, a simulated evaluation
harness, an equivalence-testing statistics suite, and a text dialogue
service for human evaluation.
"""

from mddial.kernels import KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
