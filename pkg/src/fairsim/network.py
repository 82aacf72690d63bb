"""Message transport with per-channel random delays.

Every directed (sender, receiver) pair owns an independent delay
distribution instance and RNG stream. Samples are rounded up to whole
ticks, floor 1, and capped by the profile's partial-synchrony bound Delta.
There is no message loss unless an adversarial stop/skip interception is
active on an endpoint.
"""

import math
from dataclasses import dataclass


def poisson_sample(rng, mean: float) -> int:
    """Knuth's multiplication method; normal approximation far above the
    regime used here (means are <= a few hundred ticks)."""
    if mean <= 0:
        return 0
    if mean > 700:
        return max(0, round(rng.gauss(mean, math.sqrt(mean))))
    limit = math.exp(-mean)
    n = 0
    prod = rng.random()
    while prod > limit:
        n += 1
        prod *= rng.random()
    return n


@dataclass(frozen=True)
class Constant:
    ticks: int

    def sample(self, rng):
        return self.ticks


@dataclass(frozen=True)
class PoissonDelay:
    mean: float

    def sample(self, rng):
        return poisson_sample(rng, self.mean)


@dataclass(frozen=True)
class Hypoexponential:
    """Sum of independent exponential phases, one rate per phase."""

    rates: tuple

    def sample(self, rng):
        ev = rng.expovariate
        return sum(ev(r) for r in self.rates)


@dataclass(frozen=True)
class DelayProfile:
    name: str
    distribution: object
    mean: float
    delta: int  # hard per-message delivery cap


def _hypoexp_profile(name: str, rates: tuple) -> DelayProfile:
    mean = sum(1.0 / r for r in rates)
    return DelayProfile(name, Hypoexponential(tuple(rates)), mean, int(40 * mean))


# Declared latency profiles: long right tails, clearly separated medians,
# cap at 40x the mean. All channel classes share the profile.
PROFILES = {
    "small": _hypoexp_profile("small", (1 / 2, 1 / 4)),
    "medium": _hypoexp_profile("medium", (1 / 8, 1 / 16)),
    "large": _hypoexp_profile("large", (1 / 20, 1 / 40, 1 / 60)),
}


def sample_delay(dist, rng, delta: int) -> int:
    """Integer delay in [1, delta] drawn from dist."""
    t = math.ceil(dist.sample(rng))
    if t < 1:
        return 1
    if t > delta:
        return delta
    return int(t)


class Interception:
    """Adversarial message-layer state attached to one agent.

    delay_in/delay_out of None means held forever (equivalent to skip);
    integers add that many ticks to every intercepted message.
    """

    __slots__ = ("stopped", "skip_in", "skip_out", "delay_in", "delay_out")

    def __init__(self):
        self.stopped = False
        self.skip_in = False
        self.skip_out = False
        self.delay_in = 0
        self.delay_out = 0


class Network:
    """Directed channels between registered agents.

    Handlers are registered per (agent id, message kind). Interceptions are
    consulted at send time; static attack plans install them at tick 0, so
    no in-flight messages predate them.
    """

    def __init__(self, engine, profile: DelayProfile):
        self.engine = engine
        self.profile = profile
        self._channels = {}   # (src, dst) -> (distribution, rng)
        self._overrides = {}  # (src, dst) -> distribution, mostly for staged tests
        self._handlers = {}   # (agent id, kind) -> callable(payload)
        self._intercepts = {} # agent id -> Interception
        self.sent = 0
        self.suppressed = 0

    def register(self, agent_id: str, kind: str, handler) -> None:
        self._handlers[(agent_id, kind)] = handler

    def set_channel_delay(self, src: str, dst: str, distribution) -> None:
        """Pin one directed channel to a fixed distribution (test staging)."""
        self._overrides[(src, dst)] = distribution
        self._channels.pop((src, dst), None)

    def intercept(self, agent_id: str) -> Interception:
        icpt = self._intercepts.get(agent_id)
        if icpt is None:
            icpt = Interception()
            self._intercepts[agent_id] = icpt
        return icpt

    def _channel(self, key):
        dist = self._overrides.get(key, self.profile.distribution)
        rng = self.engine.stream(f"delay:{key[0]}>{key[1]}")
        ch = (dist, rng)
        self._channels[key] = ch
        return ch

    def send(self, src: str, dst: str, kind: str, payload) -> None:
        extra = 0
        if self._intercepts:
            a = self._intercepts.get(src)
            if a is not None:
                if a.stopped or a.skip_out or a.delay_out is None:
                    self.suppressed += 1
                    return
                extra += a.delay_out
            b = self._intercepts.get(dst)
            if b is not None:
                if b.stopped or b.skip_in or b.delay_in is None:
                    self.suppressed += 1
                    return
                extra += b.delay_in
        key = (src, dst)
        ch = self._channels.get(key)
        if ch is None:
            ch = self._channel(key)
        dist, rng = ch
        t = math.ceil(dist.sample(rng))
        delta = self.profile.delta
        if t < 1:
            t = 1
        elif t > delta:
            t = delta
        self.sent += 1
        eng = self.engine
        eng.schedule(eng.now + t + extra, kind, self._handlers[(dst, kind)], payload)

    def broadcast(self, src: str, dsts, kind: str, payload) -> None:
        send = self.send
        for dst in dsts:
            send(src, dst, kind, payload)
