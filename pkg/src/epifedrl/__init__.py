"""Federated reinforcement-learning simulator for epidemic intervention policy.

Province clients train RL agents against independent compartment-model
epidemic environments; a server periodically averages their parameters
into a global model and compares it with a centralized baseline.
"""

__version__ = "0.1.0"
