"""Minimal forward-pass engine for the residual denoising CNN.

The network is a plain stack of 3x3 same-padding convolutions: the first
followed by a ReLU, the hidden ones by (folded) batch-norm and ReLU, the
last linear.  It is trained to predict the *noise* in its input, so the
denoised image is input minus network output.  Batch-norm is folded into
the convolution weights at export time, which leaves convolution and ReLU
as the only primitives needed here.

Weights arrive in the DNCW binary format together with the affine map
(scale, offset) that carries channel-scale values into the [0, 1] domain
the network was trained in.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .channel import devectorize, vectorize
from .denoisers import Denoiser
from .errors import FormatError, TruncatedFileError, ValidationError

WEIGHTS_MAGIC = b"DNCW"
WEIGHTS_VERSION = 1
FIXTURE_MAGIC = b"DNPF"
FIXTURE_VERSION = 1

_WEIGHTS_HEADER = struct.Struct("<4sIIff")  # magic, version, num_layers, scale, offset
_LAYER_HEADER = struct.Struct("<II")  # in_channels, out_channels
_FIXTURE_HEADER = struct.Struct("<4sIII")  # magic, version, m, n


@dataclass(frozen=True)
class ConvLayer:
    kernel: np.ndarray  # (out, in, 3, 3) float32
    bias: np.ndarray  # (out,) float32


@dataclass(frozen=True)
class DnCnnWeights:
    layers: tuple
    scale: float  # channel value v maps to scale*v + offset in the trained domain
    offset: float

    @property
    def num_layers(self):
        return len(self.layers)


def validate_weights(weights):
    """Check the layer stack is a well-formed 1 -> hidden... -> 1 chain."""
    if weights.num_layers < 1:
        raise ValidationError("network needs at least one layer")
    if weights.scale == 0.0:
        raise ValidationError("input affine scale must be nonzero")
    prev_out = 1
    for i, layer in enumerate(weights.layers):
        out_c, in_c, kh, kw = layer.kernel.shape
        if (kh, kw) != (3, 3):
            raise ValidationError(f"layer {i}: kernel must be 3x3, got {kh}x{kw}")
        if in_c != prev_out:
            raise ValidationError(f"layer {i}: expected {prev_out} input channels, got {in_c}")
        if layer.bias.shape != (out_c,):
            raise ValidationError(f"layer {i}: bias length {layer.bias.shape} != {out_c}")
        prev_out = out_c
    if prev_out != 1:
        raise ValidationError(f"final layer must emit 1 channel, got {prev_out}")
    return weights


def save_weights(weights, path):
    with open(path, "wb") as fh:
        fh.write(_WEIGHTS_HEADER.pack(WEIGHTS_MAGIC, WEIGHTS_VERSION, weights.num_layers,
                                      weights.scale, weights.offset))
        for layer in weights.layers:
            out_c, in_c = layer.kernel.shape[:2]
            fh.write(_LAYER_HEADER.pack(in_c, out_c))
            fh.write(layer.kernel.astype("<f4").tobytes())
            fh.write(layer.bias.astype("<f4").tobytes())


def load_weights(path):
    """Read and validate a DNCW weight file."""
    with open(path, "rb") as fh:
        header = fh.read(_WEIGHTS_HEADER.size)
        if len(header) < _WEIGHTS_HEADER.size:
            raise TruncatedFileError(f"weight header truncated: {path}")
        magic, version, num_layers, scale, offset = _WEIGHTS_HEADER.unpack(header)
        if magic != WEIGHTS_MAGIC:
            raise FormatError(f"bad weight magic {magic!r} in {path}")
        if version != WEIGHTS_VERSION:
            raise FormatError(f"unsupported weight version {version} in {path}")
        layers = []
        for i in range(num_layers):
            lh = fh.read(_LAYER_HEADER.size)
            if len(lh) < _LAYER_HEADER.size:
                raise TruncatedFileError(f"layer {i} header truncated: {path}")
            in_c, out_c = _LAYER_HEADER.unpack(lh)
            kernel_bytes = fh.read(4 * out_c * in_c * 9)
            bias_bytes = fh.read(4 * out_c)
            if len(kernel_bytes) < 4 * out_c * in_c * 9 or len(bias_bytes) < 4 * out_c:
                raise TruncatedFileError(f"layer {i} payload truncated: {path}")
            kernel = np.frombuffer(kernel_bytes, dtype="<f4").reshape(out_c, in_c, 3, 3)
            bias = np.frombuffer(bias_bytes, dtype="<f4")
            layers.append(ConvLayer(kernel=kernel, bias=bias))
    return validate_weights(DnCnnWeights(layers=tuple(layers), scale=scale, offset=offset))


def conv2d_same(feature, kernel, bias):
    """3x3 cross-correlation with zero padding 1 and stride 1.

    ``feature`` is (channels, h, w); ``kernel`` is (out, in, 3, 3).  Spatial
    size is preserved.  Implemented as im2col plus one matrix product.
    """
    feature = np.asarray(feature, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    c, h, w = feature.shape
    out_c, in_c = kernel.shape[:2]
    if in_c != c:
        raise ValueError(f"kernel expects {in_c} channels, feature has {c}")
    padded = np.zeros((c, h + 2, w + 2))
    padded[:, 1:-1, 1:-1] = feature
    # column order (c, dy, dx) matches the row-major flattening of the kernel
    cols = np.empty((c * 9, h * w))
    idx = 0
    for ci in range(c):
        for dy in range(3):
            for dx in range(3):
                cols[idx] = padded[ci, dy:dy + h, dx:dx + w].ravel()
                idx += 1
    out = kernel.reshape(out_c, c * 9) @ cols
    out += np.asarray(bias, dtype=np.float64)[:, None]
    return out.reshape(out_c, h, w)


def dncnn_forward(noisy_image, weights):
    """Run the residual network on one channel-scale image.

    Returns (residual, denoised): the residual in the trained [0, 1] domain
    and the denoised image back at channel scale.
    """
    validate_weights(weights)
    noisy_image = np.asarray(noisy_image, dtype=np.float64)
    if noisy_image.ndim != 2:
        raise ValueError("expected a 2D image")
    trained = weights.scale * noisy_image + weights.offset
    feature = trained[None, :, :]
    last = weights.num_layers - 1
    for i, layer in enumerate(weights.layers):
        feature = conv2d_same(feature, layer.kernel, layer.bias)
        if i != last:
            np.maximum(feature, 0.0, out=feature)
    residual = feature[0]
    denoised = (trained - residual - weights.offset) / weights.scale
    return residual, denoised


class DnCnnDenoiser(Denoiser):
    """Adapter exposing the CNN as a vector denoiser.

    The network is blind: ``sigma_hat`` is accepted for contract
    compatibility and ignored.  Works at any rectangular geometry since the
    stack is fully convolutional.
    """

    name = "dncnn"

    def __init__(self, weights, m, n):
        validate_weights(weights)
        self.weights = weights
        self.m = m
        self.n = n

    def denoise(self, x, sigma_hat):
        image = devectorize(x, self.m, self.n)
        _, denoised = dncnn_forward(image, self.weights)
        return vectorize(denoised)


def save_parity_fixture(path, input_image, residual):
    """Write a DNPF fixture: one input image and its reference residual."""
    input_image = np.asarray(input_image)
    residual = np.asarray(residual)
    if input_image.shape != residual.shape or input_image.ndim != 2:
        raise ValueError("input and residual must be 2D and share a shape")
    m, n = input_image.shape
    with open(path, "wb") as fh:
        fh.write(_FIXTURE_HEADER.pack(FIXTURE_MAGIC, FIXTURE_VERSION, m, n))
        fh.write(input_image.astype("<f4").tobytes(order="F"))
        fh.write(residual.astype("<f4").tobytes(order="F"))


def load_parity_fixture(path):
    """Read a DNPF fixture; returns (input_image, residual)."""
    with open(path, "rb") as fh:
        header = fh.read(_FIXTURE_HEADER.size)
        if len(header) < _FIXTURE_HEADER.size:
            raise TruncatedFileError(f"fixture header truncated: {path}")
        magic, version, m, n = _FIXTURE_HEADER.unpack(header)
        if magic != FIXTURE_MAGIC:
            raise FormatError(f"bad fixture magic {magic!r} in {path}")
        if version != FIXTURE_VERSION:
            raise FormatError(f"unsupported fixture version {version} in {path}")
        payload = fh.read(2 * 4 * m * n)
        if len(payload) < 2 * 4 * m * n:
            raise TruncatedFileError(f"fixture payload truncated: {path}")
    flat = np.frombuffer(payload, dtype="<f4")
    image = flat[: m * n].reshape((m, n), order="F").astype(np.float64)
    residual = flat[m * n:].reshape((m, n), order="F").astype(np.float64)
    return image, residual
