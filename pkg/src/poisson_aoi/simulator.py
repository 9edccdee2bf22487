"""Slot-level simulation of isolated Geo/G/1/2 queues and of the full network.

Both simulators share the numba slot loop in ``_kernels``. Uniform variates
are drawn in chunks from a numpy ``Generator`` so results depend only on the
seed, never on chunk size or thread count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels as K
from .curves import CdfCurve
from .params import NetworkParams, Policy, RngSpec, TrafficParams

_POLICY_CODE = {Policy.NONE: K.POLICY_NONE, Policy.A: K.POLICY_A, Policy.B: K.POLICY_B}


class SimulationError(RuntimeError):
    pass


class InterferenceMode(str, Enum):
    ACTUAL = "Actual"
    SYSTEM_A = "SystemA_dummy"
    SYSTEM_B = "SystemB_drop"

    @classmethod
    def parse(cls, value) -> "InterferenceMode":
        if isinstance(value, InterferenceMode):
            return value
        v = str(value).lower()
        for m in cls:
            if v in (m.value.lower(), m.name.lower()):
                return m
        aliases = {"a": cls.SYSTEM_A, "a_dummy": cls.SYSTEM_A, "dummy": cls.SYSTEM_A,
                   "b": cls.SYSTEM_B, "b_drop": cls.SYSTEM_B, "drop": cls.SYSTEM_B}
        if v in aliases:
            return aliases[v]
        raise ValueError(f"unknown interference mode {value!r}")

    @property
    def code(self) -> int:
        return {InterferenceMode.ACTUAL: K.MODE_ACTUAL, InterferenceMode.SYSTEM_A: K.MODE_SYSTEM_A,
                InterferenceMode.SYSTEM_B: K.MODE_SYSTEM_B}[self]


def _safe_div(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(b > 0, a / np.where(b > 0, b, 1), np.nan)


@dataclass
class LinkStats:
    """Per-link counters measured over the post-warmup slots (arrays over links)."""

    offered: np.ndarray
    delivered: np.ndarray
    dropped_full: np.ndarray
    dropped_deadline: np.ndarray
    in_system_start: np.ndarray
    in_system_end: np.ndarray
    age_sum: np.ndarray
    slots: int
    busy: np.ndarray
    successes: np.ndarray
    psi_departures: np.ndarray
    y_sum: np.ndarray
    y2_sum: np.ndarray
    y_n: np.ndarray
    t_sum: np.ndarray
    w_sum: np.ndarray
    s_psi_sum: np.ndarray
    s_psibar_sum: np.ndarray
    occupancy_slots: np.ndarray
    link_id: np.ndarray
    realization_id: np.ndarray
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_accumulators(cls, acc, in_start, in_end, slots, link_id, realization_id=0):
        a = acc
        return cls(
            offered=a[:, K.OFFERED].astype(np.int64), delivered=a[:, K.DELIVERED].astype(np.int64),
            dropped_full=a[:, K.DROP_FULL].astype(np.int64),
            dropped_deadline=a[:, K.DROP_DL].astype(np.int64),
            in_system_start=np.asarray(in_start, dtype=np.int64),
            in_system_end=np.asarray(in_end, dtype=np.int64),
            age_sum=a[:, K.AGE_SUM].copy(), slots=int(slots), busy=a[:, K.BUSY].astype(np.int64),
            successes=a[:, K.SUCC].astype(np.int64), psi_departures=a[:, K.PSI_DEP].astype(np.int64),
            y_sum=a[:, K.Y_SUM].copy(), y2_sum=a[:, K.Y2_SUM].copy(), y_n=a[:, K.Y_N].copy(),
            t_sum=a[:, K.T_SUM].copy(), w_sum=a[:, K.W_SUM].copy(),
            s_psi_sum=a[:, K.S_PSI_SUM].copy(), s_psibar_sum=a[:, K.S_PSIBAR_SUM].copy(),
            occupancy_slots=a[:, [K.OCC0, K.OCC1, K.OCC2]].astype(np.int64),
            link_id=np.asarray(link_id, dtype=np.int64),
            realization_id=np.full(len(link_id), realization_id, dtype=np.int64),
        )

    def __len__(self) -> int:
        return int(self.offered.size)

    def subset(self, mask) -> "LinkStats":
        kw = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            kw[name] = v[mask] if isinstance(v, np.ndarray) else v
        return LinkStats(**kw)

    @property
    def time_avg_age(self) -> np.ndarray:
        return self.age_sum / self.slots

    @property
    def empirical_mu(self) -> np.ndarray:
        """Successes per slot in which the link held a packet (includes the access probability)."""
        return _safe_div(self.successes, self.busy)

    @property
    def p_los(self) -> np.ndarray:
        return _safe_div(self.dropped_full + self.dropped_deadline, self.offered)

    @property
    def lambda_e(self) -> np.ndarray:
        return self.delivered / self.slots

    @property
    def pr_psi(self) -> np.ndarray:
        return _safe_div(self.psi_departures, self.delivered)

    @property
    def mean_interdeparture(self) -> np.ndarray:
        return _safe_div(self.y_sum, self.y_n)

    @property
    def second_moment_interdeparture(self) -> np.ndarray:
        return _safe_div(self.y2_sum, self.y_n)

    @property
    def mean_wait(self) -> np.ndarray:
        return _safe_div(self.w_sum, self.delivered)

    @property
    def mean_system_time(self) -> np.ndarray:
        return _safe_div(self.t_sum, self.delivered)

    @property
    def mean_service_psi(self) -> np.ndarray:
        return _safe_div(self.s_psi_sum, self.psi_departures)

    @property
    def mean_service_psibar(self) -> np.ndarray:
        return _safe_div(self.s_psibar_sum, self.delivered - self.psi_departures)

    @property
    def occupancy_fractions(self) -> np.ndarray:
        return self.occupancy_slots / self.slots

    def conservation_residual(self) -> np.ndarray:
        """offered + in_start - (delivered + drops + in_end); zero for every link."""
        return (self.offered + self.in_system_start - self.delivered - self.dropped_full
                - self.dropped_deadline - self.in_system_end)

    def rows(self):
        for k in range(len(self)):
            yield {
                "realization_id": int(self.realization_id[k]), "link_id": int(self.link_id[k]),
                "empirical_mu": float(self.empirical_mu[k]), "time_avg_age": float(self.time_avg_age[k]),
                "delivered": int(self.delivered[k]), "dropped_full": int(self.dropped_full[k]),
                "dropped_deadline": int(self.dropped_deadline[k]),
            }

    @staticmethod
    def concat(items) -> "LinkStats":
        items = list(items)
        if not items:
            raise ValueError("nothing to concatenate")
        slots = {s.slots for s in items}
        if len(slots) != 1:
            raise ValueError("cannot merge runs with different horizons")
        kw = {}
        for name in items[0].__dataclass_fields__:
            v = getattr(items[0], name)
            if isinstance(v, np.ndarray):
                kw[name] = np.concatenate([getattr(s, name) for s in items])
            elif name == "extra":
                kw[name] = {}
            else:
                kw[name] = v
        return LinkStats(**kw)


def _check_horizon(slots, warmup):
    if warmup < 0 or slots <= warmup:
        raise ValueError(f"need slots > warmup >= 0 (got slots={slots}, warmup={warmup})")


def _chunk_bounds(slots, warmup, chunk):
    """Chunk boundaries that include ``warmup`` so the occupancy can be sampled there."""
    edges = set(range(0, slots, chunk)) | {warmup, slots}
    return sorted(edges)


def run_isolated_queue(traffic: TrafficParams, mu: float, slots: int, warmup: int = 0,
                       rng: RngSpec | None = None, trace: bool = False,
                       chunk: int = 1 << 20) -> LinkStats:
    """Single queue with Bernoulli(mu) service success in every busy slot.

    ``slots`` counts the whole run including ``warmup``. With ``trace=True``
    the age after every slot and the delivery indicator are returned in
    ``stats.extra['age']`` and ``stats.extra['delivered']``.
    """
    traffic.validate()
    if not 0 < mu <= 1:
        raise ValueError(f"mu outside (0,1] (got {mu})")
    _check_horizon(slots, warmup)
    arr_ss, srv_ss = (rng or RngSpec(0, 0)).seed_sequence().spawn(2)
    gen_a = np.random.Generator(np.random.PCG64(arr_ss))
    gen_s = np.random.Generator(np.random.PCG64(srv_ss))
    st, acc = K.init_state(1)
    age = np.zeros(slots if trace else 0, dtype=np.int64)
    dl = np.zeros(slots if trace else 0, dtype=np.int8)
    edges = _chunk_bounds(slots, warmup, chunk)
    in_start = 0
    for t0, t1 in zip(edges[:-1], edges[1:]):
        if t0 == warmup:
            in_start = int(st[0, K.OCC])
        n = t1 - t0
        u_arr = gen_a.random(n)
        u_srv = gen_s.random(n)
        K.isolated_chunk(st, acc, t0, u_arr, u_srv, float(traffic.lambda_a), float(mu),
                         _POLICY_CODE[traffic.policy], traffic.d, warmup, age, dl)
    stats = LinkStats.from_accumulators(acc, [in_start], [int(st[0, K.OCC])], slots - warmup, [0])
    if trace:
        stats.extra["age"] = age
        stats.extra["delivered"] = dl.astype(bool)
    return stats


@dataclass(frozen=True)
class Geometry:
    tx: np.ndarray
    rx: np.ndarray
    interior: np.ndarray


def sample_geometry(net: NetworkParams, region_radius: float, gen: np.random.Generator,
                    guard: float = 0.2, point_cap: int = 20000) -> Geometry:
    """PPP transmitters on a disk; each receiver at distance r0 in a uniform direction."""
    expected = net.lam * math.pi * region_radius**2
    if expected > point_cap:
        raise SimulationError(
            f"expected {expected:.0f} transmitters exceeds the cap of {point_cap}; "
            "lower region_radius or raise point_cap")
    n = int(gen.poisson(expected)) if expected > 0 else 0
    rad = region_radius * np.sqrt(gen.random(n))
    ang = 2 * math.pi * gen.random(n)
    tx = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    phi = 2 * math.pi * gen.random(n)
    rx = tx + net.r0 * np.column_stack([np.cos(phi), np.sin(phi)])
    interior = np.hypot(rx[:, 0], rx[:, 1]) <= (1 - guard) * region_radius
    return Geometry(tx, rx, interior)


def _neighbours(geom: Geometry, net: NetworkParams, explicit: bool, cutoff: float | None):
    """CSR interferer lists per receiver, strongest first."""
    n = geom.tx.shape[0]
    ptr = np.zeros(n + 1, dtype=np.int64)
    idx_parts, val_parts, suf_parts = [], [], []
    for i in range(n):
        d = np.hypot(geom.tx[:, 0] - geom.rx[i, 0], geom.tx[:, 1] - geom.rx[i, 1])
        d[i] = np.inf
        keep = np.isfinite(d) if cutoff is None else d <= cutoff
        j = np.flatnonzero(keep)
        dj = np.maximum(d[j], 1e-12)
        gain = dj ** (-net.alpha)
        order = np.argsort(-gain, kind="stable")
        j, gain = j[order], gain[order]
        factor = 1.0 / (1.0 + net.theta * net.r0**net.alpha * gain)
        suf = np.cumprod(factor[::-1])[::-1] if factor.size else factor
        idx_parts.append(j)
        val_parts.append(gain if explicit else factor)
        suf_parts.append(suf)
        ptr[i + 1] = ptr[i] + j.size
    cat = lambda parts, dt: np.concatenate(parts).astype(dt) if parts else np.zeros(0, dt)
    return ptr, cat(idx_parts, np.int64), cat(val_parts, float), cat(suf_parts, float)


def run_realization(net: NetworkParams, traffic: TrafficParams, mode, slots: int, warmup: int,
                    region_radius: float, rng: RngSpec, guard: float = 0.2,
                    point_cap: int = 20000, fading: str = "marginal",
                    cutoff_radius: float | None = None, chunk: int = 4096,
                    realization_id: int = 0, all_links: bool = False) -> LinkStats:
    """Simulate every link of one PPP realization; return stats of interior links.

    ``fading='marginal'`` integrates the Rayleigh fading of each slot exactly
    (success iff a uniform falls below the product of per-interferer success
    factors), which has the same law as drawing Exp(1) powers and checking the
    SIR but is much cheaper. ``fading='explicit'`` draws the powers.

    ``cutoff_radius`` drops interferers farther than that from a receiver
    (an approximation; ``None`` keeps every pair in the window).
    """
    net.validate()
    traffic.validate()
    mode = InterferenceMode.parse(mode)
    _check_horizon(slots, warmup)
    if fading not in ("marginal", "explicit"):
        raise ValueError("fading must be 'marginal' or 'explicit'")
    if not 0 <= guard < 1:
        raise ValueError("guard margin must lie in [0,1)")
    geo_ss, arr_ss, sch_ss, fad_ss = rng.seed_sequence().spawn(4)
    geom = sample_geometry(net, region_radius, np.random.Generator(np.random.PCG64(geo_ss)),
                           guard, point_cap)
    n = geom.tx.shape[0]
    explicit = fading == "explicit"
    ptr, idx, val, suf = _neighbours(geom, net, explicit, cutoff_radius)
    gen_a = np.random.Generator(np.random.PCG64(arr_ss))
    gen_s = np.random.Generator(np.random.PCG64(sch_ss))
    fgen = np.random.Generator(np.random.PCG64(fad_ss))
    pool = fgen.standard_exponential(max(4 * (idx.size + n), 1 << 16)) if explicit else np.zeros(0)
    pos = 0
    st, acc = K.init_state(n)
    in_start = np.zeros(n, dtype=np.int64)
    edges = _chunk_bounds(slots, warmup, chunk)
    policy = _POLICY_CODE[traffic.policy]
    for t0, t1 in zip(edges[:-1], edges[1:]):
        if t0 == warmup:
            in_start = st[:, K.OCC].copy()
        u_arr = gen_a.random((t1 - t0, n))
        u_sch = gen_s.random((t1 - t0, n))
        k = 0
        while k < t1 - t0:
            done, pos = K.network_chunk(st, acc, t0 + k, u_arr[k:], u_sch[k:], float(traffic.lambda_a),
                                        float(net.p), policy, traffic.d, warmup, mode.code,
                                        ptr, idx, val, suf, explicit, float(net.r0 ** -net.alpha),
                                        float(net.theta), pool, pos)
            k += done
            if k < t1 - t0:
                pool = fgen.standard_exponential(pool.size)
                pos = 0
    stats = LinkStats.from_accumulators(acc, in_start, st[:, K.OCC].copy(), slots - warmup,
                                        np.arange(n), realization_id)
    stats.extra.update(n_links=n, n_interior=int(geom.interior.sum()), mode=mode.value)
    if not all_links:
        extra = stats.extra
        stats = stats.subset(geom.interior)
        stats.extra = extra
    stats.extra["geometry"] = geom
    return stats


def run_realizations(net, traffic, mode, slots, warmup, region_radius, rng: RngSpec,
                     n_real: int = 1, threads: int = 1, **kw) -> LinkStats:
    """Independent realizations on streams split from ``rng``; rows stay in realization order."""
    from .params import split_stream

    specs = split_stream(rng, n_real)
    job = lambda k: run_realization(net, traffic, mode, slots, warmup, region_radius, specs[k],
                                    realization_id=k, **kw)
    t = time.perf_counter()
    if threads > 1 and n_real > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(job, range(n_real)))
    else:
        parts = [job(k) for k in range(n_real)]
    out = LinkStats.concat(parts)
    out.extra["runtime_s"] = time.perf_counter() - t
    out.extra["n_links"] = sum(p.extra["n_links"] for p in parts)
    return out


@dataclass
class AgeSummary:
    n_links: int
    n_used: int
    excluded_fraction: float
    mean_age: float
    median_age: float


def aggregate(stats, min_deliveries: int = 10) -> tuple[CdfCurve, AgeSummary]:
    """Empirical cdf of per-link time-average age over links with enough deliveries."""
    if isinstance(stats, (list, tuple)):
        if not stats:
            raise ValueError("empty collection of link statistics")
        stats = LinkStats.concat(stats)
    if len(stats) == 0:
        raise ValueError("empty collection of link statistics")
    keep = stats.delivered >= min_deliveries
    if not np.any(keep):
        raise SimulationError(
            f"all {len(stats)} links delivered fewer than {min_deliveries} packets "
            f"(max delivered {int(stats.delivered.max())}); lengthen the run or lower min_deliveries")
    ages = np.sort(stats.time_avg_age[keep])
    grid, counts = np.unique(ages, return_counts=True)
    values = np.cumsum(counts) / ages.size
    summary = AgeSummary(len(stats), int(keep.sum()), float(1 - keep.mean()),
                         float(ages.mean()), float(np.median(ages)))
    curve = CdfCurve(grid, values, {"excluded_fraction": summary.excluded_fraction,
                                    "n_used": summary.n_used}, raw=values.copy())
    curve.meta["samples"] = ages
    return curve, summary
