"""Learnable pipeline: slot encoding, networks, losses, training, inference.

Submodules are imported explicitly (`roomfit.model.train`, ...) to keep
lightweight users of `roomfit.model.slots` from paying for the full stack.
"""
