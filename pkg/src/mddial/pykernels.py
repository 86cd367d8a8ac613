"""Pure-numpy fallback for the linear-policy kernels.

Same contract as the compiled module mddial._ckernels; see kernels.py for
how one of the two gets selected at import time.
"""

import numpy as np


def q_values(weights, features, out=None):
    """Action values weights @ features; writes into ``out`` when given."""
    return np.dot(weights, features, out=out)


def argmax_q(weights, features):
    """Index of the best action; ties resolve to the lowest index."""
    return int(np.argmax(np.dot(weights, features)))


def q_value_at(weights, action, features):
    """Single action value weights[action] . features."""
    return float(np.dot(weights[action], features))


def add_scaled(weights, action, features, scale):
    """In-place TD step: weights[action] += scale * features."""
    weights[action] += scale * features
