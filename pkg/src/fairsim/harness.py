"""Configuration, single runs, sweeps and persistence.

Configs are flat key=value INI files: a [simulation] section overriding a
preset, plus an optional [sweep] section whose keys are axis fields with
comma-separated values (special key `seeds`). Sweeps enumerate the
Cartesian product in declared-axis order with seeds innermost, and append
rows to a fixed-schema CSV incrementally; each run also gets a JSON mirror.
"""

import configparser
import csv
import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from .adversary import bft_peer_cap, bft_orderer_cap, FailureModel, CommunicationModel
from .mitigation import RULES
from .network import PROFILES
from .simulation import Simulation, RunResult

log = logging.getLogger("fairsim")

CSV_COLUMNS = (
    "seed", "m", "n", "n_prime", "quorum", "delay_profile",
    "infected_peers", "infected_orderers", "withhold_votes", "mitigation",
    "of_snd_dlv", "of_snd_blc", "of_eds_dlv", "of_eds_blc",
    "of_ord_dlv", "of_ord_blc",
    "score_target", "g", "num_blocks", "blocksize_q3", "goal_met",
)

SWEEP_AXES = ("infected_peers", "infected_orderers", "delay_profile",
              "mitigation", "clients", "peers", "orderers", "withhold_votes",
              "quorum")


@dataclass(frozen=True)
class SimulationConfig:
    seed: int = 1
    clients: int = 3              # m
    peers: int = 25               # n
    orderers: int = 25            # n'
    quorum: int = 12              # q
    delay_profile: str = "medium"
    infected_peers: int = 0
    infected_orderers: int = 0
    withhold_votes: bool = False
    mitigation: str = "off"
    num_puzzles: int = 5000
    puzzle_interval: int = 200
    solve_mean: float = 75.0
    heartbeat_interval: int = 20
    phase_timeout: int = 1500
    drain_margin: int = 200_000
    g_min: int = 5000
    score_max: float = 0.75
    failure_model: str = "byzantine"
    communication: str = "eventually_synchronous"
    within_bft: bool = True
    budget_peers: int = -1        # -1 means "exactly what the plan needs"
    budget_orderers: int = -1

    def effective_budget(self) -> tuple:
        bp = self.infected_peers if self.budget_peers < 0 else self.budget_peers
        bo = self.infected_orderers if self.budget_orderers < 0 else self.budget_orderers
        return (bp, bo)

    def validate(self):
        checks = [
            (self.clients >= 1, "clients", "need at least one client"),
            (self.peers >= 1, "peers", "need at least one peer"),
            (self.orderers >= 1, "orderers", "need at least one orderer"),
            (1 <= self.quorum <= self.peers, "quorum",
             f"must be within [1, peers={self.peers}]"),
            (self.delay_profile in PROFILES, "delay_profile",
             f"must be one of {sorted(PROFILES)}"),
            (self.mitigation in RULES, "mitigation", f"must be one of {RULES}"),
            (0 <= self.infected_peers <= self.peers - self.quorum, "infected_peers",
             f"must be within [0, peers - quorum = {self.peers - self.quorum}]"),
            (0 <= self.infected_orderers <= self.orderers, "infected_orderers",
             f"must be within [0, orderers = {self.orderers}]"),
            (self.num_puzzles >= 1, "num_puzzles", "need at least one puzzle"),
            (self.puzzle_interval >= 1, "puzzle_interval", "must be positive"),
            (self.solve_mean > 0, "solve_mean", "must be positive"),
            (self.heartbeat_interval >= 0, "heartbeat_interval",
             "must be non-negative (0 disables heartbeats)"),
            (self.phase_timeout >= 1, "phase_timeout", "must be positive"),
            (self.drain_margin >= 0, "drain_margin", "must be non-negative"),
            (self.g_min >= 0, "g_min", "must be non-negative"),
            (self.score_max >= 0, "score_max", "must be non-negative"),
        ]
        for ok, fieldname, msg in checks:
            if not ok:
                raise ValueError(f"config field {fieldname}: {msg}")
        if self.within_bft:
            if self.infected_orderers > bft_orderer_cap(self.orderers):
                raise ValueError(
                    f"config field infected_orderers: exceeds the BFT cap "
                    f"{bft_orderer_cap(self.orderers)} for orderers={self.orderers}")
            if self.infected_peers > bft_peer_cap(self.peers):
                raise ValueError(
                    f"config field infected_peers: exceeds the BFT cap "
                    f"{bft_peer_cap(self.peers)} for peers={self.peers}")
        FailureModel(self.failure_model)
        CommunicationModel(self.communication)
        return self


# Full-scale reference parameters, and a reduced preset sized for test suites.
PRESETS = {
    "paper": SimulationConfig(),
    "desk": SimulationConfig(num_puzzles=400, peers=15, orderers=13, quorum=8,
                             g_min=300, drain_margin=40_000),
}


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_bool(raw: str) -> bool:
    v = raw.strip().lower()
    if v in _BOOL_TRUE:
        return True
    if v in _BOOL_FALSE:
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _field_parser(f: dataclasses.Field):
    if f.type in ("int", int):
        return int
    if f.type in ("float", float):
        return float
    if f.type in ("bool", bool):
        return _parse_bool
    return str


_CONFIG_FIELDS = {f.name: f for f in dataclasses.fields(SimulationConfig)}


def parse_config_value(name: str, raw: str):
    f = _CONFIG_FIELDS.get(name)
    if f is None:
        raise ValueError(f"unknown config key {name!r}")
    return _field_parser(f)(raw.strip())


@dataclass
class SweepSpec:
    base: SimulationConfig
    axes: dict = field(default_factory=dict)  # field name -> list of values
    seeds: tuple = ()

    def expand(self) -> list:
        """Deterministic Cartesian product, declared-axis order, seeds innermost."""
        seeds = self.seeds or (self.base.seed,)
        points = [{}]
        for axis, values in self.axes.items():
            points = [dict(p, **{axis: v}) for p in points for v in values]
        return [replace(self.base, seed=s, **p) for p in points for s in seeds]


def load_config_file(path, preset: str = "desk"):
    """Parse an INI run/sweep file into (SimulationConfig, SweepSpec)."""
    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    base = PRESETS[preset]
    overrides = {}
    if parser.has_section("simulation"):
        for key, raw in parser.items("simulation"):
            overrides[key] = parse_config_value(key, raw)
    base = replace(base, **overrides)
    axes = {}
    seeds = ()
    if parser.has_section("sweep"):
        for key, raw in parser.items("sweep"):
            values = [v.strip() for v in raw.split(",") if v.strip()]
            if key == "seeds":
                seeds = tuple(int(v) for v in values)
                continue
            if key not in SWEEP_AXES:
                raise ValueError(
                    f"sweep axis {key!r} not supported; choose from {SWEEP_AXES}")
            axes[key] = [parse_config_value(key, v) for v in values]
    return base, SweepSpec(base, axes, seeds)


# ---------------------------------------------------------------------------
# execution and persistence

def run_one(config: SimulationConfig) -> RunResult:
    """Build, attack, run and measure one configuration."""
    started = time.perf_counter()
    sim = Simulation(config)
    result = sim.run()
    log.info(
        "run seed=%d profile=%s peers_inf=%d orderers_inf=%d withhold=%s rule=%s: "
        "score_target=%s g=%d blocks=%d in %.1fs",
        config.seed, config.delay_profile, config.infected_peers,
        config.infected_orderers, config.withhold_votes, config.mitigation,
        f"{result.report.score_target:.3f}" if result.report.score_target is not None else "n/a",
        result.report.g, result.report.num_blocks, time.perf_counter() - started)
    return result


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_row(config: SimulationConfig, report) -> dict:
    cells = {
        "seed": config.seed,
        "m": config.clients,
        "n": config.peers,
        "n_prime": config.orderers,
        "quorum": config.quorum,
        "delay_profile": config.delay_profile,
        "infected_peers": config.infected_peers,
        "infected_orderers": config.infected_orderers,
        "withhold_votes": config.withhold_votes,
        "mitigation": config.mitigation,
    }
    if report is not None:
        cells.update(
            of_snd_dlv=report.of_snd_dlv, of_snd_blc=report.of_snd_blc,
            of_eds_dlv=report.of_eds_dlv, of_eds_blc=report.of_eds_blc,
            of_ord_dlv=report.of_ord_dlv, of_ord_blc=report.of_ord_blc,
            score_target=report.score_target, g=report.g,
            num_blocks=report.num_blocks, blocksize_q3=report.blocksize_q3,
            goal_met=report.goal_met)
    return {k: _fmt(cells.get(k)) for k in CSV_COLUMNS}


def report_json(config: SimulationConfig, result: RunResult) -> dict:
    return {
        "config": dataclasses.asdict(config),
        "report": result.report.to_dict(),
        "budget_spent": list(result.budget_spent),
        "budget_remaining": list(result.budget_remaining),
        "dispatch_count": result.dispatch_count,
        "final_tick": result.final_tick,
    }


def write_json(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def run_sweep(spec: SweepSpec, out_dir, csv_name: str = "results.csv",
              json_mirrors: bool = True) -> Path:
    """Run every sweep point, appending CSV rows as runs finish.

    A failed run keeps its identity cells and leaves metric cells empty so
    the sweep continues; the error is logged.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / csv_name
    configs = spec.expand()
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        fh.flush()
        for i, config in enumerate(configs):
            try:
                result = run_one(config)
            except Exception:
                log.exception("sweep point %d failed (seed=%d)", i, config.seed)
                writer.writerow(csv_row(config, None))
                fh.flush()
                continue
            writer.writerow(csv_row(config, result.report))
            fh.flush()
            if json_mirrors:
                write_json(out / f"run_{i:04d}.json", report_json(config, result))
    return csv_path
