"""Store-and-forward message relay along a chain of robots."""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .._validation import check_positive, raise_if
from ..errors import BrokenChainError, ValidationError
from .survey import COMM_RANGE, robots_required

LINK_RATE = 1.0e6  # bit/s
LINK_LATENCY = 5.0e-3  # s per link
CARRIER_FREQUENCY = 2.4e9  # Hz, informational only


@dataclass
class RelayChain:
    """Robots strung along a cave; node 0 is the base station.

    ``positions`` are distances along the cave in metres, increasing away
    from the base.
    """

    positions: np.ndarray
    link_rate: float = LINK_RATE
    link_latency: float = LINK_LATENCY
    comm_range: float = COMM_RANGE
    carrier_frequency: float = CARRIER_FREQUENCY

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        raise_if(self.problems())

    def problems(self):
        out = []
        if self.positions.ndim != 1 or len(self.positions) < 2:
            out.append("positions must list at least two nodes")
        elif not np.all(np.isfinite(self.positions)):
            out.append("positions must be finite")
        elif np.any(np.diff(self.positions) <= 0):
            out.append("positions must be strictly increasing")
        for name in ("link_rate", "comm_range"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                out.append(f"{name} must be > 0, got {value!r}")
        if not (math.isfinite(self.link_latency) and self.link_latency >= 0):
            out.append(f"link_latency must be >= 0, got {self.link_latency!r}")
        return out

    @property
    def node_count(self):
        return len(self.positions)

    @property
    def hops(self):
        return self.node_count - 1

    @classmethod
    def evenly_spaced(cls, node_count, length, **kwargs):
        if node_count < 2:
            raise ValidationError(f"node_count must be >= 2, got {node_count!r}")
        return cls(np.linspace(0.0, length, node_count), **kwargs)

    @classmethod
    def for_cave(cls, length, comm_range=COMM_RANGE, **kwargs):
        """Chain sized with :func:`robots_required`, spread evenly over the cave."""
        n = robots_required(length, comm_range)
        return cls.evenly_spaced(n, length, comm_range=comm_range, **kwargs)

    def check_links(self):
        """Raise :class:`BrokenChainError` for the first gap wider than the radio range."""
        for i, gap in enumerate(np.diff(self.positions)):
            if gap > self.comm_range * (1 + 1e-12):
                raise BrokenChainError(i, float(gap), self.comm_range)


@dataclass
class NodeTimeline:
    node: int
    received: list = field(default_factory=list)
    transmitted: list = field(default_factory=list)


@dataclass
class RelayResult:
    end_to_end_latency: float
    hops: int
    timeline: list
    deliveries: list

    def rows(self):
        for entry in self.timeline:
            for k, (rx, tx) in enumerate(zip(entry.received, entry.transmitted)):
                yield entry.node, k, rx, tx


def simulate_relay(chain, payload_bits, source=None):
    """Event-driven store-and-forward relay of messages to node 0.

    Each message is fully received by a node before it is forwarded; every
    link carries one message at a time and adds ``link_latency`` of
    propagation and processing. ``payload_bits`` is one message size or a
    list of sizes, all released by ``source`` (default: the farthest node)
    at t = 0 in order.

    Returns:
        :class:`RelayResult` whose ``end_to_end_latency`` is the arrival time
        of the last message at the base. For a single message this equals
        ``hops * (bits / link_rate + link_latency)``.

    Raises:
        BrokenChainError: naming the first gap wider than ``comm_range``.
    """
    chain.check_links()
    sizes = [payload_bits] if np.isscalar(payload_bits) else list(payload_bits)
    if not sizes:
        raise ValidationError("payload_bits must contain at least one message")
    sizes = [check_positive(b, "payload_bits", allow_zero=True) for b in sizes]
    src = chain.node_count - 1 if source is None else int(source)
    if not 0 < src < chain.node_count:
        raise ValidationError(f"source must be a node index in [1, {chain.node_count - 1}], got {source!r}")

    timeline = {i: NodeTimeline(i) for i in range(src, -1, -1)}
    link_free = {i: 0.0 for i in range(1, src + 1)}  # link i carries node i -> i-1
    deliveries = [None] * len(sizes)
    queue = []
    seq = 0
    for msg, _ in enumerate(sizes):
        heapq.heappush(queue, (0.0, seq, src, msg))
        seq += 1

    while queue:
        t, _, node, msg = heapq.heappop(queue)
        timeline[node].received.append(t)
        if node == 0:
            timeline[node].transmitted.append(math.nan)
            deliveries[msg] = t
            continue
        start = max(t, link_free[node])
        serialize = sizes[msg] / chain.link_rate
        link_free[node] = start + serialize
        timeline[node].transmitted.append(start)
        heapq.heappush(queue, (start + serialize + chain.link_latency, seq, node - 1, msg))
        seq += 1

    return RelayResult(
        end_to_end_latency=max(deliveries),
        hops=src,
        timeline=[timeline[i] for i in range(src, -1, -1)],
        deliveries=deliveries,
    )
