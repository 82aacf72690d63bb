"""Deterministic discrete-event core.

A single integer tick clock, one priority event queue ordered by
(fire_at, insertion sequence), and named pseudo-random streams derived from
the master seed so that one seed fully determines one trace.
"""

import heapq
import random


class SchedulingError(Exception):
    """Raised when an event is scheduled in the past (a logic bug)."""


class SimulationTrace:
    """Outcome of one run_until call.

    dispatch_count and final_tick are always filled; the per-dispatch
    (tick, seq, kind) records are kept only when recording was requested,
    since full runs dispatch millions of events.
    """

    __slots__ = ("dispatch_count", "final_tick", "events")

    def __init__(self, record: bool):
        self.dispatch_count = 0
        self.final_tick = 0
        self.events = [] if record else None


class SimulationEngine:
    """Event loop with a global tick clock and named RNG streams."""

    def __init__(self, master_seed: int):
        self.master_seed = master_seed
        self.now = 0
        self._heap = []
        self._seq = 0
        self._streams = {}

    def stream(self, name: str) -> random.Random:
        """Return the named stream, creating it on first use.

        Streams are seeded from (master_seed, name) via string seeding,
        which hashes with sha512 and is therefore stable across processes
        and platforms. Adding a new stream never perturbs existing ones.
        """
        rng = self._streams.get(name)
        if rng is None:
            rng = random.Random(f"{self.master_seed}/{name}")
            self._streams[name] = rng
        return rng

    def schedule(self, fire_at: int, kind: str, fn, arg=None) -> None:
        """Enqueue fn(arg) to run at fire_at; ties dispatch in insertion order."""
        if fire_at < self.now:
            raise SchedulingError(f"fire_at {fire_at} is before current tick {self.now}")
        self._seq += 1
        heapq.heappush(self._heap, (fire_at, self._seq, kind, fn, arg))

    def schedule_in(self, delay: int, kind: str, fn, arg=None) -> None:
        self.schedule(self.now + delay, kind, fn, arg)

    def run_until(self, limit: int, record: bool = False) -> SimulationTrace:
        """Dispatch every event with fire_at <= limit in (fire_at, seq) order."""
        trace = SimulationTrace(record)
        heap = self._heap
        pop = heapq.heappop
        events = trace.events
        count = 0
        while heap and heap[0][0] <= limit:
            fire_at, seq, kind, fn, arg = pop(heap)
            self.now = fire_at
            count += 1
            if events is not None:
                events.append((fire_at, seq, kind))
            fn(arg)
        if limit > self.now:
            self.now = limit
        trace.dispatch_count = count
        trace.final_tick = self.now
        return trace

    def pending(self) -> int:
        return len(self._heap)
