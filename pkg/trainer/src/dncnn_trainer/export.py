"""Batch-norm folding and binary weight export.

At inference batch-norm is the affine y = gamma * (x - mean) / sqrt(var +
eps) + beta, so it folds into the preceding convolution:

    kernel' = kernel * gamma / sqrt(var + eps)        (per output channel)
    bias'   = (bias - mean) * gamma / sqrt(var + eps) + beta

Folding is verified numerically before anything is written.  The DNCW
file stores the folded stack plus the dataset affine; the DNPF parity
fixture stores one input image and this trainer's residual on it, so the
estimation toolkit can check its forward pass bit-for-bit-close.
"""

import copy
import os
import struct
import tempfile

import numpy as np
import torch
from torch import nn

from .errors import ExportError

WEIGHTS_MAGIC = b"DNCW"
WEIGHTS_VERSION = 1
FIXTURE_MAGIC = b"DNPF"
FIXTURE_VERSION = 1

_WEIGHTS_HEADER = struct.Struct("<4sIIff")
_LAYER_HEADER = struct.Struct("<II")
_FIXTURE_HEADER = struct.Struct("<4sIII")

FOLD_TOLERANCE = 1e-6
FOLD_CHECK_INPUTS = 100


def fold_batch_norm(model):
    """Fold each conv(+BN) block; returns [(kernel, bias), ...] float64 arrays.

    Folding runs in double precision so the verification measures the
    folding algebra itself, not float32 round-off; quantization to the
    file's float32 happens at serialization.
    """
    model.eval()
    folded = []
    modules = list(model.body)
    i = 0
    while i < len(modules):
        layer = modules[i]
        if isinstance(layer, nn.Conv2d):
            kernel = layer.weight.detach().numpy().astype(np.float64)
            if layer.bias is not None:
                bias = layer.bias.detach().numpy().astype(np.float64)
            else:
                bias = np.zeros(kernel.shape[0], dtype=np.float64)
            if i + 1 < len(modules) and isinstance(modules[i + 1], nn.BatchNorm2d):
                bn = modules[i + 1]
                gamma = bn.weight.detach().numpy().astype(np.float64)
                beta = bn.bias.detach().numpy().astype(np.float64)
                mean = bn.running_mean.detach().numpy().astype(np.float64)
                std = np.sqrt(bn.running_var.detach().numpy().astype(np.float64) + bn.eps)
                kernel = kernel * (gamma / std)[:, None, None, None]
                bias = (bias - mean) * (gamma / std) + beta
                _verify_fold(layer, bn, kernel, bias)
                i += 1
            folded.append((np.ascontiguousarray(kernel), bias))
        i += 1
    return folded


def _verify_fold(conv, bn, kernel, bias):
    # double precision isolates the folding error from conv round-off
    check = nn.Conv2d(conv.in_channels, conv.out_channels, 3, padding=1).double()
    conv64 = _copy_double(conv)
    bn64 = _copy_double(bn)
    with torch.no_grad():
        check.weight.copy_(torch.from_numpy(kernel).double())
        check.bias.copy_(torch.from_numpy(bias).double())
        worst = 0.0
        gen = torch.Generator().manual_seed(0)
        for _ in range(FOLD_CHECK_INPUTS):
            x = torch.randn(1, conv.in_channels, 8, 8, generator=gen).double()
            reference = bn64(conv64(x))
            worst = max(worst, float(torch.max(torch.abs(check(x) - reference))))
    if worst >= FOLD_TOLERANCE:
        raise ExportError(f"batch-norm folding error {worst:.3e} >= {FOLD_TOLERANCE}")


def _copy_double(module):
    clone = copy.deepcopy(module)
    clone.eval()
    return clone.double()


def _atomic_write(path, payload):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_weights(folded, affine, path):
    chunks = [_WEIGHTS_HEADER.pack(WEIGHTS_MAGIC, WEIGHTS_VERSION, len(folded),
                                   affine.scale, affine.offset)]
    for kernel, bias in folded:
        out_c, in_c = kernel.shape[:2]
        chunks.append(_LAYER_HEADER.pack(in_c, out_c))
        chunks.append(kernel.astype("<f4").tobytes())
        chunks.append(bias.astype("<f4").tobytes())
    _atomic_write(path, b"".join(chunks))


def write_parity_fixture(input_image, residual, path):
    m, n = input_image.shape
    payload = (_FIXTURE_HEADER.pack(FIXTURE_MAGIC, FIXTURE_VERSION, m, n)
               + input_image.astype("<f4").tobytes(order="F")
               + residual.astype("<f4").tobytes(order="F"))
    _atomic_write(path, payload)


def folded_forward(folded, affine, image):
    """Deployment-form forward pass: the quantized folded stack on one image.

    Uses exactly the float32 parameter values that land in the weight file,
    evaluated in double precision, so any runtime that loads the file can
    reproduce the result to arithmetic round-off.
    """
    # the affine rides in the file as float32; quantize it the same way here
    scale = float(np.float32(affine.scale))
    offset = float(np.float32(affine.offset))
    x = torch.from_numpy(scale * np.asarray(image, dtype=np.float64) + offset)[None, None]
    last = len(folded) - 1
    with torch.no_grad():
        for i, (kernel, bias) in enumerate(folded):
            weight = torch.from_numpy(kernel.astype(np.float32).astype(np.float64))
            shift = torch.from_numpy(bias.astype(np.float32).astype(np.float64))
            x = torch.nn.functional.conv2d(x, weight, shift, padding=1)
            if i != last:
                x = torch.relu(x)
    return x[0, 0].numpy()


def export_weights(model, affine, path, fixture_path=None, fixture_input=None):
    """Fold, verify, and write the weight file (and optionally the fixture).

    The fixture residual is the exported network's forward pass on the
    affine-mapped fixture input, stored alongside the channel-scale input.
    """
    folded = fold_batch_norm(model)
    write_weights(folded, affine, path)
    if fixture_path is not None:
        if fixture_input is None:
            raise ValueError("fixture_path given without fixture_input")
        residual = folded_forward(folded, affine, fixture_input).astype(np.float32)
        write_parity_fixture(fixture_input.astype(np.float32), residual, fixture_path)
    return folded
