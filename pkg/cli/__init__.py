"""
CLI Module

Command-line entry point: quantizer inspection, single-shot recovery, bound
evaluation and experiment sweeps.
"""
