"""Networked control loop tying camera, planner, controller and plant together.

The simulation is a single-threaded discrete-event loop.  The camera samples
the true pose at a fixed rate and ships it through an uplink channel; when a
pose packet arrives at the controller it picks a reference (potential-field
guidance or path tracking on the fast-marching baseline), computes one
command, and ships it through a downlink channel; when the command arrives
the plant latches it (zero-order hold).  Between events the plant integrates
exactly, in dt = 0.01 s micro-steps that only set the logging granularity.
A watchdog zeroes the held command after a configurable silence window.

Channels are either simulated ``DelayLine``s (constant delay, optional
uniform jitter, drops, a packet deadline) or real UDP endpoints speaking the
little-endian wire format defined here; the loop treats both as push/poll
queues stamped with simulation time.
"""

from __future__ import annotations

import heapq
import itertools
import math
import random
import socket
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import controller as ctl
from . import fm, guidance, hpf, plant, vision
from .controller import Command
from .workspace import Scenario, WorldPose, pixel_to_world, world_to_pixel

DT_MICRO = 0.01          # plant integration micro-step, s
INCREMENTAL_SWEEPS = 200  # relaxation cap for per-frame multi-agent re-solves

# wire format: magic, version u8, kind u8, seq u32, send time in us u64
WIRE_MAGIC = b"ISPC"
WIRE_VERSION = 1
_HEADER = struct.Struct("<4sBBIQ")
KIND_POSE = 1
KIND_CMD = 2
_KIND_CODE = {"pose": KIND_POSE, "cmd": KIND_CMD}
_KIND_NAME = {KIND_POSE: "pose", KIND_CMD: "cmd"}
_PAYLOAD_LEN = {KIND_POSE: 3, KIND_CMD: 2}


@dataclass(frozen=True)
class Packet:
    """One message on the control network."""

    kind: str          # "pose" or "cmd"
    seq: int
    send_time: float   # s, simulation clock
    payload: tuple     # (x, y, theta) for pose, (v, omega) for cmd


def pack_packet(pkt: Packet) -> bytes:
    """Serialize a packet to the wire format (send time rounded to 1 us)."""
    code = _KIND_CODE.get(pkt.kind)
    if code is None:
        raise ValueError("unknown packet kind %r" % (pkt.kind,))
    if len(pkt.payload) != _PAYLOAD_LEN[code]:
        raise ValueError(
            "%s packet needs %d payload floats, got %d" % (pkt.kind, _PAYLOAD_LEN[code], len(pkt.payload))
        )
    head = _HEADER.pack(WIRE_MAGIC, WIRE_VERSION, code, pkt.seq, round(pkt.send_time * 1e6))
    return head + struct.pack("<%dd" % len(pkt.payload), *pkt.payload)


def unpack_packet(data: bytes) -> Packet:
    """Parse wire bytes back into a packet; malformed input raises ValueError."""
    if len(data) < _HEADER.size:
        raise ValueError("datagram shorter than header (%d bytes)" % len(data))
    magic, version, code, seq, t_us = _HEADER.unpack_from(data)
    if magic != WIRE_MAGIC:
        raise ValueError("bad magic %r" % (magic,))
    if version != WIRE_VERSION:
        raise ValueError("unsupported wire version %d" % version)
    if code not in _KIND_NAME:
        raise ValueError("unknown packet kind code %d" % code)
    want = _PAYLOAD_LEN[code]
    body = data[_HEADER.size :]
    if len(body) != 8 * want:
        raise ValueError("kind %d expects %d payload bytes, got %d" % (code, 8 * want, len(body)))
    payload = struct.unpack("<%dd" % want, body)
    return Packet(_KIND_NAME[code], seq, t_us / 1e6, payload)


class DelayLine:
    """Simulated one-way channel with delay, jitter, drops and a deadline.

    Each pushed packet draws a delay (constant + uniform jitter, clamped at
    zero) and a drop decision from the line's own seeded RNG.  Packets whose
    sampled delay exceeds the deadline would arrive stale and are discarded
    at once.  With zero jitter deliveries keep push order (FIFO).
    """

    exact = True  # delivery times are known at push time

    def __init__(self, constant: float, jitter: float = 0.0, drop_prob: float = 0.0,
                 deadline: float = math.inf, seed: int = 0):
        if constant < 0 or jitter < 0:
            raise ValueError("delay and jitter must be non-negative")
        if not 0.0 <= drop_prob <= 1.0:
            raise ValueError("drop_prob must lie in [0, 1]")
        self.constant = constant
        self.jitter = jitter
        self.drop_prob = drop_prob
        self.deadline = deadline
        self._rng = random.Random(seed)
        self._queue = []   # (delivery_time, order, packet, delay)
        self._order = itertools.count()

    def push(self, pkt: Packet):
        """Accept a packet; returns the sampled delay, or None if it is lost."""
        u = self._rng.random()
        delay = max(0.0, self.constant + (2.0 * u - 1.0) * self.jitter)
        dropped = self._rng.random() < self.drop_prob
        if dropped or delay > self.deadline:
            return None
        heapq.heappush(self._queue, (pkt.send_time + delay, next(self._order), pkt, delay))
        return delay

    def poll(self, now: float):
        """Packets whose delivery time has come, oldest delivery first."""
        out = []
        while self._queue and self._queue[0][0] <= now + 1e-12:
            _, _, pkt, delay = heapq.heappop(self._queue)
            out.append((pkt, delay))
        return out

    def pending(self) -> int:
        return len(self._queue)


class UdpEndpoint:
    """Non-blocking UDP socket speaking the packet wire format."""

    def __init__(self, bind=("127.0.0.1", 0), peer=None):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.bind(bind)
        self._sock.setblocking(False)
        self.address = self._sock.getsockname()
        self.peer = peer

    def send(self, pkt: Packet) -> None:
        if self.peer is None:
            raise ValueError("no peer address configured")
        self._sock.sendto(pack_packet(pkt), self.peer)

    def recv(self, timeout: float = 0.0):
        """Next packet, or None when nothing arrives within the timeout."""
        self._sock.settimeout(timeout if timeout > 0 else None if timeout < 0 else 0.0)
        try:
            data, _ = self._sock.recvfrom(4096)
        except (BlockingIOError, socket.timeout, TimeoutError):
            return None
        finally:
            self._sock.setblocking(False)
        return unpack_packet(data)

    def close(self) -> None:
        self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class UdpChannel:
    """Adapter letting the event loop ride a real UDP leg.

    push() serializes onto the socket; poll() drains whatever has come back
    and stamps it with the simulation-time lag since it was sent.  Delivery
    instants are only observed at poll time (the loop polls at least every
    camera frame), unlike a DelayLine whose deliveries are scheduled exactly.
    """

    exact = False

    def __init__(self, endpoint: UdpEndpoint):
        self.endpoint = endpoint

    def push(self, pkt: Packet):
        self.endpoint.send(pkt)
        return None

    def poll(self, now: float):
        out = []
        while True:
            pkt = self.endpoint.recv(0.0)
            if pkt is None:
                return out
            out.append((pkt, now - pkt.send_time))


# --- run logs ----------------------------------------------------------------


@dataclass
class Record:
    """One controller sample."""

    t: float
    pose: WorldPose          # true plant pose at the sample instant
    obs: WorldPose           # stale camera pose the controller acted on
    v_cmd: float
    omega_cmd: float
    v_applied: float
    omega_applied: float
    delta_l: int
    delay_up: float
    delay_down: float        # nan when the command was lost
    collision: bool


CSV_COLUMNS = "t,x,y,theta,x_obs,y_obs,v_cmd,omega_cmd,delta_L,delay_up,delay_down,dist_err,collision"


@dataclass
class RunLog:
    """Everything one run produced."""

    records: list
    trace: list              # (t, x, y, theta, v_applied, omega_applied) at micro-steps
    outcome: str             # "reached" | "timeout" | "unreachable"
    total_time: float
    scenario: Scenario
    any_collision: bool = False

    def trace_array(self) -> np.ndarray:
        return np.asarray(self.trace)

    def to_csv(self, path, dist_err=None) -> None:
        """Write records in the documented column order.

        dist_err is an optional per-record series (see analysis.distance_error);
        absent values are written as nan.
        """
        if dist_err is not None and len(dist_err) != len(self.records):
            raise ValueError("dist_err length %d != %d records" % (len(dist_err), len(self.records)))
        lines = [CSV_COLUMNS]
        for i, r in enumerate(self.records):
            err = float(dist_err[i]) if dist_err is not None else math.nan
            lines.append(
                ",".join(
                    [
                        repr(float(r.t)),
                        repr(float(r.pose.x)),
                        repr(float(r.pose.y)),
                        repr(float(r.pose.theta)),
                        repr(float(r.obs.x)),
                        repr(float(r.obs.y)),
                        repr(float(r.v_cmd)),
                        repr(float(r.omega_cmd)),
                        str(int(r.delta_l)),
                        repr(float(r.delay_up)),
                        repr(float(r.delay_down)),
                        repr(err),
                        str(int(r.collision)),
                    ]
                )
            )
        Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class MultiRunLog:
    agent_logs: list
    dm_times: list
    dm_values: list          # min pairwise distance at each camera frame
    outcome: str
    total_time: float

    def min_dm(self) -> float:
        return min(self.dm_values) if self.dm_values else math.inf


# --- planner preparation -----------------------------------------------------


@dataclass
class PlannerState:
    """Static per-scenario planning products, reusable across runs."""

    kind: str
    boundary: hpf.BoundaryGrid
    edges: object
    grad: hpf.GradientField | None = None
    potential: hpf.PotentialField | None = None
    arrival: np.ndarray | None = None
    path: np.ndarray | None = None


def prepare(scenario: Scenario) -> PlannerState:
    """Run the static pipeline: image -> edges -> boundary -> field or path."""
    img = scenario.build_image()
    edges = vision.detect_edges(img, scenario.vision)
    boundary = hpf.build_boundary(edges, scenario.target, scenario.hpf.dilation)
    cfg = scenario.hpf
    if scenario.planner == "hpf":
        pot = hpf.relax(boundary, cfg.omega_sor, cfg.tolerance, cfg.max_sweeps)
        grad = hpf.gradient(pot, boundary, cfg.eps_flat)
        return PlannerState("hpf", boundary, edges, grad=grad, potential=pot)
    arrival = fm.fm_arrival(boundary)
    start_cell = world_to_pixel((scenario.start.x, scenario.start.y), scenario.gd,
                                scenario.width, scenario.height)
    path = None
    if math.isfinite(arrival[start_cell[1], start_cell[0]]):
        path = fm.fm_path(arrival, start_cell, scenario.gd, scenario.fm_step)
    return PlannerState("fm", boundary, edges, arrival=arrival, path=path)


def _make_lines(scenario: Scenario, seed: int):
    """Uplink/downlink delay lines with seeds derived from the run seed."""
    rng = random.Random(seed)
    d = scenario.delay
    up = DelayLine(d.constant_s * d.up_fraction, d.jitter_s * d.up_fraction,
                   d.drop_prob, d.deadline_s, rng.getrandbits(32))
    down = DelayLine(d.constant_s * (1.0 - d.up_fraction), d.jitter_s * (1.0 - d.up_fraction),
                     d.drop_prob, d.deadline_s, rng.getrandbits(32))
    return up, down


# --- single-agent loop -------------------------------------------------------


class _Vehicle:
    """Mutable plant-side state shared by the single and multi agent loops."""

    def __init__(self, scenario, start: WorldPose, target_world):
        self.pose = start
        self.applied = Command(0.0, 0.0)
        self.cmd_expiry = math.inf
        self.t = 0.0
        self.trace = [(0.0, start.x, start.y, start.theta, 0.0, 0.0)]
        self.records = []
        self.any_collision = False
        self.outcome = None
        self.end_time = None
        self.target_world = target_world
        self.goal_radius = scenario.goal_radius
        self.watchdog = scenario.watchdog_s

    def reached_goal(self) -> bool:
        return math.hypot(self.pose.x - self.target_world[0],
                          self.pose.y - self.target_world[1]) <= self.goal_radius

    def integrate_to(self, t_target: float, boundary, gd: float) -> None:
        """Advance the plant to t_target in micro-steps; flags goal and collisions."""
        while self.t < t_target - 1e-12 and self.outcome is None:
            t_next = min(self.t + DT_MICRO, t_target)
            if self.t < self.cmd_expiry < t_next:
                t_next = self.cmd_expiry  # split exactly at watchdog expiry
            self.pose = plant.step(self.pose, self.applied, t_next - self.t)
            self.t = t_next
            if self.t >= self.cmd_expiry - 1e-12:
                self.applied = Command(0.0, 0.0)
                self.cmd_expiry = math.inf
            self.trace.append((self.t, self.pose.x, self.pose.y, self.pose.theta,
                               self.applied.v, self.applied.omega))
            try:
                if plant.collides(self.pose, boundary, gd):
                    self.any_collision = True
            except ValueError:
                self.any_collision = True  # drove out of the workspace
            if self.reached_goal():
                self.outcome = "reached"
                self.end_time = self.t

    def latch(self, t: float, v: float, omega: float) -> None:
        self.applied = Command(v, omega)
        self.cmd_expiry = t + self.watchdog


def _control_sample(scenario, state, obs: WorldPose):
    """One controller evaluation: returns (cmd, delta_l, flat_hold, unreachable)."""
    gd = scenario.gd
    if state.kind == "hpf":
        try:
            ref = guidance.guidance_step(state.grad, obs, scenario.control, scenario.lookahead, gd)
        except ValueError:
            return Command(0.0, 0.0), 0, True, False  # observed cell blocked: hold
        if ref.flat:
            return Command(0.0, 0.0), 0, True, True
        e = ctl.body_errors(obs, ref.point)
        a = guidance.safe_curve_coeff(e)
        return ctl.command(a, e, scenario.control), ref.delta_l, False, False
    # fast-marching baseline: track the precomputed path
    d0 = scenario.fm_d0 if scenario.fm_d0 is not None else scenario.control.d_max
    refpt, _ = fm.path_reference(state.path, obs, d0)
    e = ctl.body_errors(obs, refpt)
    a = guidance.safe_curve_coeff(e)
    return ctl.command(a, e, scenario.control), 0, False, False


def run_loop(scenario: Scenario, state: PlannerState | None = None,
             uplink=None, downlink=None) -> RunLog:
    """Simulate one networked run of a single vehicle.

    `state` may carry a planner prepared earlier for the same scenario
    (the static field does not depend on delay or seed).  `uplink` and
    `downlink` default to seeded DelayLines; any push/poll channel works.
    """
    if state is None:
        state = prepare(scenario)
    gd = scenario.gd
    target_world = pixel_to_world(scenario.target, gd, scenario.width, scenario.height)
    if uplink is None or downlink is None:
        up, down = _make_lines(scenario, scenario.seed)
        uplink = uplink or up
        downlink = downlink or down

    veh = _Vehicle(scenario, scenario.start, target_world)
    if state.kind == "fm" and state.path is None:
        return RunLog(veh.records, veh.trace, "unreachable", 0.0, scenario)

    frame_dt = 1.0 / scenario.camera.rate_hz
    heap = []
    order = itertools.count()
    heapq.heappush(heap, (0.0, 1, next(order), "frame"))
    frame_seq = 0

    def pump(t: float) -> None:
        for pkt, dly in uplink.poll(t):
            if veh.outcome == "unreachable":
                break
            obs = WorldPose(*pkt.payload)
            cmd, delta_l, hold, unreachable = _control_sample(scenario, state, obs)
            delay_down = math.nan
            if not (unreachable and hold):
                d = downlink.push(Packet("cmd", pkt.seq, t, (cmd.v, cmd.omega)))
                if d is not None:
                    delay_down = d
                    heapq.heappush(heap, (t + d, 0, next(order), "wake"))
            try:
                col = plant.collides(veh.pose, state.boundary, gd)
            except ValueError:
                col = True
            veh.records.append(Record(t, veh.pose, obs, cmd.v, cmd.omega,
                                      veh.applied.v, veh.applied.omega,
                                      delta_l, dly, delay_down, col))
            if unreachable:
                veh.outcome = "unreachable"
                veh.end_time = t
        for pkt, _ in downlink.poll(t):
            if veh.outcome is None:
                veh.latch(t, pkt.payload[0], pkt.payload[1])

    while veh.outcome is None:
        t_ev, _, _, kind = heapq.heappop(heap)
        if t_ev > scenario.timeout_s:
            veh.integrate_to(scenario.timeout_s, state.boundary, gd)
            if veh.outcome is None:
                veh.outcome = "timeout"
                veh.end_time = scenario.timeout_s
            break
        veh.integrate_to(t_ev, state.boundary, gd)
        if veh.outcome is not None:
            break
        pump(t_ev)
        if kind == "frame":
            try:
                obs = plant.observe(veh.pose, scenario.camera, gd, scenario.width, scenario.height)
            except ValueError:
                obs = None  # vehicle out of frame: camera has nothing to report
            if obs is not None:
                pkt = Packet("pose", frame_seq, t_ev, (obs.x, obs.y, obs.theta))
                d = uplink.push(pkt)
                if d is not None:
                    heapq.heappush(heap, (t_ev + d, 0, next(order), "wake"))
            frame_seq += 1
            heapq.heappush(heap, (t_ev + frame_dt, 1, next(order), "frame"))

    return RunLog(veh.records, veh.trace, veh.outcome, veh.end_time, scenario,
                  any_collision=veh.any_collision)


# --- multi-agent loop --------------------------------------------------------


def _stamp_agents(static_edges: np.ndarray, poses, me: int, own_target, scenario) -> np.ndarray:
    """Static edges plus discs for the other agents this one is aware of."""
    n, m = static_edges.shape
    gd = scenario.gd
    r_px = scenario.agent_radius / gd
    others = [(j, p) for j, p in enumerate(poses) if j != me]
    if scenario.awareness == "nearest" and others:
        mine = poses[me]
        others = [min(others, key=lambda jp: math.hypot(jp[1].x - mine.x, jp[1].y - mine.y))]
    ys, xs = np.mgrid[0:n, 0:m]
    stamp = np.zeros_like(static_edges)
    for _, p in others:
        ax, ay = p.x / gd, p.y / gd
        stamp |= (xs - ax) ** 2 + (ys - ay) ** 2 <= r_px**2
    # never wall off this agent's own goal: clear enough around the target
    # that the later dilation step cannot re-cover it
    d = scenario.hpf.dilation
    tx, ty = own_target
    stamp[max(0, ty - d):ty + d + 1, max(0, tx - d):tx + d + 1] = False
    return static_edges | stamp


def run_multi(scenario: Scenario) -> MultiRunLog:
    """Decentralized multi-vehicle run.

    Every camera frame each agent rebuilds its own boundary (static edges
    plus the other agents' footprint discs), re-relaxes its potential warm
    started from the previous frame, and otherwise runs the same networked
    loop as a single vehicle.  A flat sample here means "blocked right now"
    and holds the vehicle instead of ending the run, since the blocker moves.
    """
    k = len(scenario.agents)
    if k < 2:
        raise ValueError("run_multi needs at least 2 agents (use run_loop for one)")
    gd = scenario.gd
    for i in range(k):
        for j in range(i + 1, k):
            a, b = scenario.agents[i].start, scenario.agents[j].start
            if math.hypot(a.x - b.x, a.y - b.y) < 2 * scenario.agent_radius:
                raise ValueError("agents %d and %d start overlapping" % (i, j))
            if scenario.agents[i].target == scenario.agents[j].target:
                raise ValueError("agents %d and %d share a target cell" % (i, j))

    img = scenario.build_image()
    static_edges = vision.detect_edges(img, scenario.vision).cells
    cfg = scenario.hpf
    rng = random.Random(scenario.seed)

    vehicles = []
    lines = []
    grads: list = [None] * k
    phis: list = [None] * k
    labels_prev: list = [None] * k
    for i, spec in enumerate(scenario.agents):
        tw = pixel_to_world(spec.target, gd, scenario.width, scenario.height)
        vehicles.append(_Vehicle(scenario, spec.start, tw))
        up = DelayLine(scenario.delay.constant_s * scenario.delay.up_fraction,
                       scenario.delay.jitter_s * scenario.delay.up_fraction,
                       scenario.delay.drop_prob, scenario.delay.deadline_s, rng.getrandbits(32))
        down = DelayLine(scenario.delay.constant_s * (1 - scenario.delay.up_fraction),
                         scenario.delay.jitter_s * (1 - scenario.delay.up_fraction),
                         scenario.delay.drop_prob, scenario.delay.deadline_s, rng.getrandbits(32))
        lines.append((up, down))

    boundaries: list = [None] * k

    def replan(i: int) -> None:
        poses = [v.pose for v in vehicles]
        cells = _stamp_agents(static_edges, poses, i, scenario.agents[i].target, scenario)
        boundary = hpf.build_boundary(cells, scenario.agents[i].target, cfg.dilation)
        if labels_prev[i] is not None and np.array_equal(labels_prev[i], boundary.labels):
            boundaries[i] = boundary
            return
        if phis[i] is None:
            pot = hpf.relax(boundary, cfg.omega_sor, cfg.tolerance, cfg.max_sweeps)
        else:
            pot = hpf.relax(boundary, cfg.omega_sor, cfg.tolerance, INCREMENTAL_SWEEPS, initial=phis[i])
        phis[i] = pot.phi
        labels_prev[i] = boundary.labels
        boundaries[i] = boundary
        grads[i] = hpf.gradient(pot, boundary, cfg.eps_flat)

    frame_dt = 1.0 / scenario.camera.rate_hz
    heap = []
    order = itertools.count()
    heapq.heappush(heap, (0.0, 1, next(order), "frame", -1))
    frame_seq = 0
    dm_times, dm_values = [], []
    t_end = scenario.timeout_s

    def integrate_all(t: float) -> None:
        for i, v in enumerate(vehicles):
            if v.outcome is None:
                v.integrate_to(t, boundaries[i] if boundaries[i] is not None else
                               hpf.build_boundary(static_edges, scenario.agents[i].target, cfg.dilation),
                               gd)
                if v.outcome == "reached":
                    v.applied = Command(0.0, 0.0)
            else:
                v.t = t

    def pump(i: int, t: float) -> None:
        up, down = lines[i]
        v = vehicles[i]
        for pkt, dly in up.poll(t):
            if v.outcome is not None:
                continue
            obs = WorldPose(*pkt.payload)
            st = PlannerState("hpf", boundaries[i], None, grad=grads[i])
            cmd, delta_l, hold, _ = _control_sample(scenario, st, obs)
            # transient flats hold the vehicle; the blocking agent will move on
            d = down.push(Packet("cmd", pkt.seq, t, (cmd.v, cmd.omega)))
            if d is not None:
                heapq.heappush(heap, (t + d, 0, next(order), "wake", i))
            try:
                col = plant.collides(v.pose, boundaries[i], gd)
            except ValueError:
                col = True
            v.records.append(Record(t, v.pose, obs, cmd.v, cmd.omega,
                                    v.applied.v, v.applied.omega, delta_l, dly,
                                    d if d is not None else math.nan, col))
        for pkt, _ in down.poll(t):
            if v.outcome is None:
                v.latch(t, pkt.payload[0], pkt.payload[1])

    while True:
        if all(v.outcome is not None for v in vehicles):
            t_end = max(v.end_time for v in vehicles)
            break
        t_ev, _, _, kind, who = heapq.heappop(heap)
        if t_ev > scenario.timeout_s:
            integrate_all(scenario.timeout_s)
            for v in vehicles:
                if v.outcome is None:
                    v.outcome = "timeout"
                    v.end_time = scenario.timeout_s
            t_end = scenario.timeout_s
            break
        if kind == "frame":
            # order per frame: move everyone, measure spacing, replan, observe
            integrate_all(t_ev)
            if k >= 2:
                dm = min(
                    math.hypot(vehicles[i].pose.x - vehicles[j].pose.x,
                               vehicles[i].pose.y - vehicles[j].pose.y)
                    for i in range(k) for j in range(i + 1, k)
                )
                dm_times.append(t_ev)
                dm_values.append(dm)
            for i in range(k):
                if vehicles[i].outcome is None:
                    replan(i)
            for i, v in enumerate(vehicles):
                pump(i, t_ev)
                if v.outcome is not None:
                    continue
                try:
                    obs = plant.observe(v.pose, scenario.camera, gd, scenario.width, scenario.height)
                except ValueError:
                    obs = None
                if obs is not None:
                    pkt = Packet("pose", frame_seq, t_ev, (obs.x, obs.y, obs.theta))
                    d = lines[i][0].push(pkt)
                    if d is not None:
                        heapq.heappush(heap, (t_ev + d, 0, next(order), "wake", i))
            frame_seq += 1
            heapq.heappush(heap, (t_ev + frame_dt, 1, next(order), "frame", -1))
        else:
            if vehicles[who].outcome is None:
                vehicles[who].integrate_to(t_ev, boundaries[who], gd)
            pump(who, t_ev)

    outcome = "reached" if all(v.outcome == "reached" for v in vehicles) else "timeout"
    logs = [RunLog(v.records, v.trace, v.outcome or "timeout",
                   v.end_time if v.end_time is not None else scenario.timeout_s,
                   scenario, any_collision=v.any_collision)
            for v in vehicles]
    return MultiRunLog(logs, dm_times, dm_values, outcome, t_end)
