"""Raw planar YCbCr video I/O.

Frames are stored as consecutive Y, Cb, Cr planes with no container
metadata. 8-bit samples occupy one byte; 10-bit samples occupy two bytes
little-endian with the low 10 bits significant (legal values 0..1023,
anything above is treated as corrupt input rather than masked).
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

__all__ = [
    "Channel",
    "ChromaFormat",
    "Frame",
    "Plane",
    "SampleRangeError",
    "TruncatedInputError",
    "VideoFormat",
    "YuvError",
    "frame_bytes",
    "plane_dims",
    "probe_frame_count",
    "read_frame",
    "write_frame",
]


class YuvError(ValueError):
    """Invalid geometry or raw YCbCr data."""


class TruncatedInputError(YuvError):
    """The stream ended before a whole frame could be read."""


class SampleRangeError(YuvError):
    """A sample value lies outside the legal range for the bit depth."""


class ChromaFormat(enum.Enum):
    """Chroma subsampling layout in the usual J:a:b shorthand."""

    YUV444 = "444"
    YUV422 = "422"
    YUV420 = "420"

    @property
    def sub_x(self) -> int:
        """Horizontal luma-to-chroma subsampling factor."""
        return 1 if self is ChromaFormat.YUV444 else 2

    @property
    def sub_y(self) -> int:
        """Vertical luma-to-chroma subsampling factor."""
        return 2 if self is ChromaFormat.YUV420 else 1


class Channel(enum.Enum):
    Y = "Y"
    CB = "Cb"
    CR = "Cr"


@dataclass(frozen=True)
class VideoFormat:
    """Geometry and sample format of a raw clip.

    Raw files carry no metadata, so all of this must be declared by the
    caller and is validated up front.
    """

    width: int
    height: int
    bit_depth: int = 8
    chroma_format: ChromaFormat = ChromaFormat.YUV420
    frame_count_hint: int | None = None

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise YuvError(f"frame size {self.width}x{self.height} must be positive")
        if self.bit_depth not in (8, 10):
            raise YuvError(f"bit depth {self.bit_depth} unsupported (use 8 or 10)")
        cf = self.chroma_format
        if cf.sub_x == 2 and self.width % 2:
            raise YuvError(f"width {self.width} must be even for {cf.value} subsampling")
        if cf.sub_y == 2 and self.height % 2:
            raise YuvError(f"height {self.height} must be even for {cf.value} subsampling")

    @property
    def max_sample(self) -> int:
        return (1 << self.bit_depth) - 1

    @property
    def bytes_per_sample(self) -> int:
        return 1 if self.bit_depth == 8 else 2

    @property
    def dtype(self) -> np.dtype:
        """Native in-memory dtype for this bit depth."""
        return np.dtype(np.uint8 if self.bit_depth == 8 else np.uint16)


def plane_dims(fmt: VideoFormat, channel: Channel) -> tuple[int, int]:
    """Per-channel plane size as (width, height) in samples."""
    if channel is Channel.Y:
        return fmt.width, fmt.height
    cf = fmt.chroma_format
    return fmt.width // cf.sub_x, fmt.height // cf.sub_y


def frame_bytes(fmt: VideoFormat) -> int:
    """Exact number of bytes one stored frame occupies."""
    samples = 0
    for channel in Channel:
        w, h = plane_dims(fmt, channel)
        samples += w * h
    return samples * fmt.bytes_per_sample


@dataclass(eq=False)
class Plane:
    """One channel of samples as a row-major (height, width) integer array."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim != 2:
            raise YuvError(f"plane data must be 2-D, got {self.data.ndim}-D")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Plane):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )


@dataclass(eq=False)
class Frame:
    """A decoded frame: three planes plus the format they were declared with."""

    y: Plane
    cb: Plane
    cr: Plane
    format: VideoFormat

    def __post_init__(self) -> None:
        for channel, plane in ((Channel.Y, self.y), (Channel.CB, self.cb), (Channel.CR, self.cr)):
            expect = plane_dims(self.format, channel)
            got = (plane.width, plane.height)
            if got != expect:
                raise YuvError(f"{channel.value} plane is {got}, format implies {expect}")
            lo, hi = int(plane.data.min()), int(plane.data.max())
            if lo < 0 or hi > self.format.max_sample:
                raise SampleRangeError(
                    f"{channel.value} sample out of range 0..{self.format.max_sample}"
                    f" (saw {lo}..{hi})"
                )

    def plane(self, channel: Channel) -> Plane:
        if channel is Channel.Y:
            return self.y
        return self.cb if channel is Channel.CB else self.cr

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.format == other.format
            and self.y == other.y
            and self.cb == other.cb
            and self.cr == other.cr
        )


def _storage_dtype(fmt: VideoFormat) -> np.dtype:
    # 10-bit samples are stored as explicit little-endian 16-bit words.
    return np.dtype("<u2" if fmt.bit_depth == 10 else np.uint8)


def read_frame(source: BinaryIO, fmt: VideoFormat, index: int = 0) -> Frame:
    """Read the index-th frame (0-based) from a seekable planar stream.

    Raises TruncatedInputError if the stream holds fewer than index+1
    whole frames, and SampleRangeError if a 10-bit sample is >= 1024.
    """
    nbytes = frame_bytes(fmt)
    source.seek(index * nbytes)
    raw = source.read(nbytes)
    if len(raw) < nbytes:
        raise TruncatedInputError(
            f"frame {index}: needed {nbytes} bytes, stream had {len(raw)} past the seek point"
        )
    flat = np.frombuffer(raw, dtype=_storage_dtype(fmt))
    planes = []
    offset = 0
    for channel in Channel:
        w, h = plane_dims(fmt, channel)
        planes.append(Plane(flat[offset : offset + w * h].reshape(h, w).astype(fmt.dtype)))
        offset += w * h
    return Frame(*planes, format=fmt)


def write_frame(sink: BinaryIO, frame: Frame) -> int:
    """Append one frame in the planar layout read_frame consumes.

    Returns the number of bytes written, always frame_bytes(frame.format).
    """
    dtype = _storage_dtype(frame.format)
    written = 0
    for plane in (frame.y, frame.cb, frame.cr):
        buf = np.ascontiguousarray(plane.data, dtype=dtype).tobytes()
        sink.write(buf)
        written += len(buf)
    return written


def probe_frame_count(source: BinaryIO, fmt: VideoFormat) -> int:
    """Whole frames in a seekable stream.

    The stream size must be an exact multiple of the frame size; anything
    else means the declared geometry does not match the file.
    """
    source.seek(0, io.SEEK_END)
    size = source.tell()
    count, leftover = divmod(size, frame_bytes(fmt))
    if leftover:
        raise YuvError(
            f"stream size {size} is not a multiple of the {frame_bytes(fmt)}-byte frame size;"
            f" declared geometry is wrong"
        )
    return count
