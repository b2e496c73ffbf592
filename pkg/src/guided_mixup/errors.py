# SPDX-FileCopyrightText: 2025 guided-mixup contributors
# SPDX-License-Identifier: GPL-3.0

from typing import Any


class GmxError(Exception):
    """Base class of all errors raised by the augmentation engine."""


class MissingInputError(GmxError, FileNotFoundError):
    """A referenced input file does not exist."""


class TensorFormatError(GmxError):
    """A GMTN file could not be decoded."""


class BadMagicError(TensorFormatError):
    pass


class UnsupportedVersionError(TensorFormatError):
    pass


class UnsupportedDtypeError(TensorFormatError):
    pass


class TruncatedPayloadError(TensorFormatError):
    pass


class ImageReadError(GmxError):
    pass


class ShapeMismatchError(GmxError):
    pass


class ChannelError(GmxError):
    pass


class ParameterError(GmxError, ValueError):
    """An argument is outside its documented range."""


class SaliencyError(GmxError):
    pass


class BatchItemError(GmxError):
    """Failure of one batch item, `index` is its position in the batch."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"item {index}: {cause}")
        self.index = index
        self.cause = cause


class PairingError(GmxError):
    pass


class InvalidPairingError(PairingError):
    """A pairing matrix violates the diversity constraints."""

    def __init__(self, report: Any):
        super().__init__(f"invalid pairing matrix: {report}")
        self.report = report


class ManifestError(GmxError):
    pass


class BenchError(GmxError):
    pass
