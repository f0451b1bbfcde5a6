"""Central-difference gradient checking against autograd."""

from typing import Callable

import torch
from torch import nn


def numeric_grads(
    f: Callable[[], torch.Tensor], tensors: list[torch.Tensor], h: float = 1e-6
) -> list[torch.Tensor]:
    grads = []
    for t in tensors:
        g = torch.zeros_like(t)
        flat, gflat = t.view(-1), g.view(-1)
        for i in range(flat.numel()):
            orig = flat[i].item()
            flat[i] = orig + h
            plus = f().item()
            flat[i] = orig - h
            minus = f().item()
            flat[i] = orig
            gflat[i] = (plus - minus) / (2 * h)
        grads.append(g)
    return grads


def max_relative_grad_error(
    loss_fn: Callable[[], torch.Tensor], modules: list[nn.Module]
) -> float:
    """max |analytic - numeric| / max |numeric| over all module parameters."""
    params = [p for m in modules for p in m.parameters()]
    for p in params:
        p.grad = None
    loss_fn().backward()
    analytic = torch.cat(
        [
            (p.grad if p.grad is not None else torch.zeros_like(p)).reshape(-1)
            for p in params
        ]
    )
    with torch.no_grad():
        numeric = torch.cat(
            [g.reshape(-1) for g in numeric_grads(loss_fn, [p.data for p in params])]
        )
    scale = max(numeric.abs().max().item(), 1e-12)
    return (analytic - numeric).abs().max().item() / scale
