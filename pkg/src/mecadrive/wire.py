"""Command-link codec and latest-value mailbox.

Canonical frame: ``%.3f,%.3f,%.3f\\n`` ASCII carrying (vx, vy, omega) in
m/s, m/s, rad/s. No spaces, LF terminator; an optional CR before the LF and
surrounding whitespace are tolerated on receive. Values are rounded half
away from zero to 3 decimals; a value that rounds to zero is emitted as
"0.000" (never "-0.000").

This is the wire format; it must stay byte-identical across implementations.
"""

from __future__ import annotations

import math
import threading
from decimal import ROUND_HALF_UP, Decimal

from .geometry import Twist

MAX_FRAME_BYTES = 64  # partial-frame buffer bound before resync

_MILLI = Decimal("0.001")


class MalformedFrame(ValueError):
    """Raised (or emitted as a stream item) for undecodable frames."""


def _field(value: float) -> str:
    q = Decimal(value).quantize(_MILLI, rounding=ROUND_HALF_UP)
    if q == 0:
        q = abs(q)
    return f"{q:.3f}"


def serialize(t: Twist) -> bytes:
    """Encode a twist as one canonical frame."""
    return f"{_field(t.vx)},{_field(t.vy)},{_field(t.omega)}\n".encode("ascii")


def parse(data: bytes) -> Twist:
    """Decode one frame. Raises MalformedFrame on wrong field count,
    non-numeric content, or overflow; the caller keeps its previous command."""
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as e:
        raise MalformedFrame(f"non-ASCII frame: {data!r}") from e
    fields = text.strip().split(",")
    if len(fields) != 3:
        raise MalformedFrame(f"expected 3 fields, got {len(fields)}: {text!r}")
    values = []
    for f in fields:
        try:
            v = float(f)
        except ValueError as e:
            raise MalformedFrame(f"non-numeric field {f!r}") from e
        if not math.isfinite(v):
            raise MalformedFrame(f"non-finite field {f!r}")
        values.append(v)
    return Twist(*values)


class FrameAssembler:
    """Reassembles LF-delimited frames from arbitrary chunk boundaries.

    A partial frame growing past MAX_FRAME_BYTES is flagged once as
    malformed and the stream resynchronizes at the next LF.
    """

    def __init__(self):
        self._buf = bytearray()
        self._discarding = False

    def feed(self, chunk: bytes) -> list[Twist | MalformedFrame]:
        out: list[Twist | MalformedFrame] = []
        for byte in chunk:
            if self._discarding:
                if byte == 0x0A:
                    self._discarding = False
                continue
            self._buf.append(byte)
            if byte == 0x0A:
                frame = bytes(self._buf)
                self._buf.clear()
                try:
                    out.append(parse(frame))
                except MalformedFrame as e:
                    out.append(e)
            elif len(self._buf) > MAX_FRAME_BYTES:
                out.append(MalformedFrame("frame exceeds 64 bytes without terminator"))
                self._buf.clear()
                self._discarding = True
        return out


def feed_stream(chunks) -> list[Twist | MalformedFrame]:
    """Run a sequence of byte chunks through a fresh assembler. Output is
    invariant under re-chunking of the same byte stream."""
    asm = FrameAssembler()
    out = []
    for chunk in chunks:
        out.extend(asm.feed(chunk))
    return out


class CommandMailbox:
    """Single-writer/single-reader latest-value store.

    Reads never block and always return the most recently committed twist.
    stale_age counts control ticks since the last commit; the motor loop
    stops the vehicle once it exceeds its watchdog bound.
    """

    def __init__(self, initial: Twist = Twist()):
        self._lock = threading.Lock()
        self._latest = initial
        self._seq = 0
        self._stale_age = 0

    def commit(self, t: Twist) -> int:
        with self._lock:
            self._latest = t
            self._seq += 1
            self._stale_age = 0
            return self._seq

    def read(self) -> tuple[Twist, int]:
        with self._lock:
            return self._latest, self._seq

    def tick(self) -> int:
        """Advance and return the staleness age; called once per control tick."""
        with self._lock:
            self._stale_age += 1
            return self._stale_age

    @property
    def stale_age(self) -> int:
        with self._lock:
            return self._stale_age
