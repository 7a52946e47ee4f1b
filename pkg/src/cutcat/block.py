"""Whole-code simulation: noisy extraction of every generator with the
repeat-until-stable protocol and table decoding.

Generators of weight above six get the ring-checked gadget, the rest the
plain cat gadget.  All per-trial state is packed into uint64 vectors so
batches run through numpy; only ring decoding and table misses drop into
per-trial Python, and those are deduplicated first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .decoders import CodeLUT, RuleDecoderD3D5, build_code_lut
from .gadgets import GadgetSpec, build_cut_cat, build_full_cat
from .pauli import CssCode, bits_of
from .sim import CatSyndrome, NoiseParams, noisy_operations, op_code_effects
from .experiments import SweepResult, TrialStats, fit_slope, run_batches_until

CUT_CAT_WEIGHT_THRESHOLD = 6


def _popcount_u64(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr)


class _GeneratorExtractor:
    """Noisy extraction machinery for one generator, global coordinates.

    The same effect tables serve X- and Z-type generators: the noise
    model is symmetric under swapping the Pauli frame components, so the
    sector only decides which data component receives residuals and
    which one the outcome reads.
    """

    def __init__(self, sector: str, support_mask: int, distance: int):
        self.sector = sector
        self.support_mask = np.uint64(support_mask)
        support = list(bits_of(support_mask))
        self.gamma = len(support)
        if self.gamma > CUT_CAT_WEIGHT_THRESHOLD:
            spec = GadgetSpec(gamma=self.gamma, distance=distance, adaptive=False)
            self.gadget = build_cut_cat(spec)
            self.decoder = RuleDecoderD3D5(self.gadget, spec.t)
        else:
            self.gadget = build_full_cat(self.gamma)
            self.decoder = None
        self.has_ring = self.gadget.n_slots > 0

        ops = noisy_operations(self.gadget, NoiseParams(p=0.0))
        self.n_codes = np.array([op.n_codes for op in ops], dtype=np.int64)
        n_ops = len(ops)
        self.data_tab = np.zeros((n_ops, 15), dtype=np.uint64)
        self.slot_tab = np.zeros((n_ops, 15), dtype=np.uint64)
        self.gen_tab = np.zeros((n_ops, 15), dtype=np.uint64)
        for i, op in enumerate(ops):
            for c, eff in enumerate(op_code_effects(self.gadget, op)):
                self.data_tab[i, c] = self._globalize(eff.data_x, support)
                self.slot_tab[i, c] = eff.slot_flips
                self.gen_tab[i, c] = eff.gen_flip
        self._ring_cache: dict[int, int] = {}

    @staticmethod
    def _globalize(local_mask: int, support: Sequence[int]) -> int:
        out = 0
        for i in bits_of(local_mask):
            out |= 1 << support[i]
        return out

    def _ring_correction(self, slots_key: int) -> int:
        corr = self._ring_cache.get(slots_key)
        if corr is None:
            syn = CatSyndrome(self.gadget.cat_count, (slots_key,))
            local = self.decoder.decode(syn)
            corr = self._globalize(local, list(bits_of(int(self.support_mask))))
            self._ring_cache[slots_key] = corr
        return corr

    def extract(
        self,
        rng: np.random.Generator,
        data_x: np.ndarray,
        data_z: np.ndarray,
        active: np.ndarray,
        p_ft: float,
    ) -> np.ndarray:
        """Run one noisy extraction across the batch; returns outcome bits.

        The incoming anticommuting error component sets the true parity;
        sampled gadget faults flip the readout, inject residuals onto the
        data (corrected in place by the ring decoder when present), and
        are applied only to still-active trials.
        """
        size = data_x.shape[0]
        reads = data_z if self.sector == "X" else data_x
        true = (_popcount_u64(reads & self.support_mask) & np.uint64(1)).astype(np.uint64)

        acc_data = np.zeros(size, dtype=np.uint64)
        acc_slot = np.zeros(size, dtype=np.uint64)
        acc_gen = np.zeros(size, dtype=np.uint64)
        if p_ft > 0.0:
            for i in range(len(self.n_codes)):
                hit = np.nonzero(rng.random(size, dtype=np.float32) < p_ft)[0]
                if hit.size == 0:
                    continue
                codes = rng.integers(0, self.n_codes[i], size=hit.size)
                acc_data[hit] ^= self.data_tab[i, codes]
                acc_slot[hit] ^= self.slot_tab[i, codes]
                acc_gen[hit] ^= self.gen_tab[i, codes]

        if self.has_ring:
            cand = np.nonzero((acc_slot != 0) & active)[0]
            for idx in cand:
                acc_data[idx] ^= np.uint64(self._ring_correction(int(acc_slot[idx])))

        upd = np.where(active, acc_data, np.uint64(0))
        if self.sector == "X":
            data_x ^= upd
        else:
            data_z ^= upd
        return (true ^ acc_gen) & np.uint64(1)


def _table_apply(table: dict[int, int], keys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized dict lookup; returns (corrections, miss flags)."""
    uniq, inv = np.unique(keys, return_inverse=True)
    corr_u = np.zeros(len(uniq), dtype=np.uint64)
    miss_u = np.zeros(len(uniq), dtype=bool)
    for i, k in enumerate(uniq):
        v = table.get(int(k))
        if v is None:
            miss_u[i] = True
        else:
            corr_u[i] = v
    return corr_u[inv], miss_u[inv]


class BlockSimulator:
    """Repeat-until-stable QEC cycle for a CSS code under circuit noise."""

    def __init__(self, code: CssCode, ratio: float, max_rounds: int | None = None,
                 lut_weight_cap: int | None = None):
        if not code.lx or not code.lz:
            raise ValueError("code file must supply LX/LZ rows for logical checks")
        if ratio <= 0:
            raise ValueError("ratio must be positive")
        self.code = code
        self.ratio = ratio
        self.t = code.t
        self.max_rounds = max_rounds if max_rounds is not None else max(25, 5 * (self.t + 1))
        self.code_lut: CodeLUT = build_code_lut(code, weight_cap=lut_weight_cap)
        self.extractors = [
            _GeneratorExtractor("X", row, code.d) for row in code.hx
        ] + [
            _GeneratorExtractor("Z", row, code.d) for row in code.hz
        ]
        self.n_hx = len(code.hx)

    def run_batch(self, p: float, seed: int, batch_index: int, size: int) -> int:
        """Returns the number of logical failures in the batch."""
        rng = np.random.default_rng([seed, 3, batch_index])
        p_ft = p / self.ratio
        code = self.code

        data_x = np.zeros(size, dtype=np.uint64)
        data_z = np.zeros(size, dtype=np.uint64)
        for q in range(code.n):
            hit = np.nonzero(rng.random(size, dtype=np.float32) < p)[0]
            if hit.size == 0:
                continue
            codes = rng.integers(0, 3, size=hit.size)  # X, Y, Z
            bit = np.uint64(1 << q)
            data_x[hit[codes != 2]] ^= bit
            data_z[hit[codes != 0]] ^= bit

        done = np.zeros(size, dtype=bool)
        run_len = np.zeros(size, dtype=np.int64)
        last_syn = np.full(size, -1, dtype=np.int64)
        accepted = np.zeros(size, dtype=np.uint64)
        for _ in range(self.max_rounds):
            active = ~done
            syn = np.zeros(size, dtype=np.uint64)
            for gi, ext in enumerate(self.extractors):
                syn |= ext.extract(rng, data_x, data_z, active, p_ft) << np.uint64(gi)
            same = syn.astype(np.int64) == last_syn
            run_len = np.where(active & same, run_len + 1, np.where(active, 1, run_len))
            last_syn = np.where(active, syn.astype(np.int64), last_syn)
            newly = active & (run_len >= self.t + 1)
            accepted = np.where(newly, syn, accepted)
            done |= newly
            if done.all():
                break
        # round-capped trials continue with their last syndrome, flagged
        # unstable by the protocol but still decoded
        accepted = np.where(done, accepted, last_syn.astype(np.uint64))

        n_hx = self.n_hx
        sx = accepted & np.uint64((1 << n_hx) - 1)
        sz = accepted >> np.uint64(n_hx)
        z_corr, z_miss = _table_apply(self.code_lut.z_table, sx)
        x_corr, x_miss = _table_apply(self.code_lut.x_table, sz)
        data_z ^= z_corr
        data_x ^= x_corr
        fail = z_miss | x_miss

        # one ideal decoding pass: noiseless syndromes plus the tables
        s2x = np.zeros(size, dtype=np.uint64)
        for i, row in enumerate(code.hx):
            s2x |= (_popcount_u64(data_z & np.uint64(row)) & np.uint64(1)) << np.uint64(i)
        s2z = np.zeros(size, dtype=np.uint64)
        for i, row in enumerate(code.hz):
            s2z |= (_popcount_u64(data_x & np.uint64(row)) & np.uint64(1)) << np.uint64(i)
        z_corr, z_miss = _table_apply(self.code_lut.z_table, s2x)
        x_corr, x_miss = _table_apply(self.code_lut.x_table, s2z)
        data_z ^= z_corr
        data_x ^= x_corr
        fail |= z_miss | x_miss

        for row in code.lz:
            fail |= (_popcount_u64(data_x & np.uint64(row)) & np.uint64(1)).astype(bool)
        for row in code.lx:
            fail |= (_popcount_u64(data_z & np.uint64(row)) & np.uint64(1)).astype(bool)
        return int(fail.sum())


class _BlockBatchTask:
    """Picklable batch closure for process pools."""

    def __init__(self, sim: BlockSimulator, p: float, seed: int):
        self.sim = sim
        self.p = p
        self.seed = seed

    def __call__(self, batch_index: int, size: int) -> int:
        return self.sim.run_batch(self.p, self.seed, batch_index, size)


def run_block_mc(
    code: CssCode,
    p: float,
    ratio: float = 20.0,
    min_failures: int = 100,
    seed: int = 0,
    trial_cap: int = 10**8,
    batch_size: int = 100_000,
    jobs: int = 1,
    max_rounds: int | None = None,
    simulator: BlockSimulator | None = None,
) -> TrialStats:
    """Logical failure rate of one full QEC cycle at data error rate ``p``
    and extraction noise p/ratio."""
    if min_failures < 1:
        raise ValueError("min_failures must be positive")
    sim = simulator if simulator is not None else BlockSimulator(code, ratio, max_rounds)
    trials, failures = run_batches_until(
        _BlockBatchTask(sim, p, seed), min_failures, trial_cap, batch_size, jobs
    )
    return TrialStats(
        p=p, p_ft=p / ratio, trials=trials, failures=failures, seed=seed,
        censored=failures < min_failures,
    )


def sweep_block_mc(
    code: CssCode,
    p_list: Sequence[float],
    ratio: float = 20.0,
    min_failures: int = 100,
    seed: int = 0,
    trial_cap: int = 10**8,
    batch_size: int = 100_000,
    jobs: int = 1,
    max_rounds: int | None = None,
) -> SweepResult:
    sim = BlockSimulator(code, ratio, max_rounds)
    points = []
    for p in sorted(p_list):
        points.append(
            run_block_mc(code, p, ratio, min_failures, seed, trial_cap,
                         batch_size, jobs=jobs, simulator=sim)
        )
    slope, stderr = _fit_sweep_block(points)
    return SweepResult(tuple(points), tuple(float("nan") for _ in points),
                       slope, stderr)


def _fit_sweep_block(points):
    usable = [(s.p, s.estimate) for s in points if not s.censored and s.failures > 0]
    if len(usable) < 3:
        return None, None
    return fit_slope(usable)
