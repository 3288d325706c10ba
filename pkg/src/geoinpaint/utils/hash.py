"""
Parameter hashing utilities for geoinpaint.

Digests over network parameters are how the frozen-task-network contract is
checked: the digest of an adapter must not change across training.
"""

import hashlib
from typing import Iterable, Tuple

import torch
from torch import nn


def _named_tensors(module: nn.Module) -> Iterable[Tuple[str, torch.Tensor]]:
    """Parameters then buffers, each in registration order."""
    yield from module.named_parameters()
    yield from module.named_buffers()


def calculate_module_digest(module: nn.Module, algorithm: str = "sha256") -> str:
    """
    Calculate a deterministic digest over every parameter and buffer.

    Names, dtypes, shapes and raw bytes all feed the hash, so a single
    perturbed element changes the result.

    Args:
        module: Network to hash
        algorithm: Hash algorithm to use (sha256, md5, sha1, etc.)

    Returns:
        Hexadecimal hash string

    Raises:
        ValueError: If algorithm is not supported
    """
    try:
        hasher = hashlib.new(algorithm)
    except ValueError:
        raise ValueError(f"Unsupported hash algorithm: {algorithm}")

    with torch.no_grad():
        for name, tensor in _named_tensors(module):
            data = tensor.detach().to("cpu").contiguous()
            hasher.update(name.encode("utf-8"))
            hasher.update(str(data.dtype).encode("utf-8"))
            hasher.update(str(tuple(data.shape)).encode("utf-8"))
            hasher.update(data.reshape(-1).view(torch.uint8).numpy().tobytes())

    return hasher.hexdigest()


def verify_module_digest(module: nn.Module, expected_hash: str, algorithm: str = "sha256") -> bool:
    """
    Verify a module's digest matches the expected value.

    Args:
        module: Network to verify
        expected_hash: Expected hash value (hexadecimal)
        algorithm: Hash algorithm to use

    Returns:
        True if hash matches, False otherwise
    """
    return calculate_module_digest(module, algorithm).lower() == expected_hash.lower()
