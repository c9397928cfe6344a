"""Translation-based cipher model and the partition-trapdoor audit.

A cipher here is a sequence of rounds, each one bricklayer substitution
(parallel S-boxes), one invertible mixing layer, one round-key XOR, with
independent round keys.  The trapdoor being audited is a chain of linear
partitions L(U_1) -> ... -> L(U_{l+1}) transported by the keyless round
maps; key addition never disturbs a linear partition, so such a chain works
for every key tuple at once.

Two search modes are provided.  The walls mode follows wall images through
the mixing layers (complete for the family-not-strongly-proper case, where
chains through walls always exist).  The exhaustive mode scans every
nontrivial subspace of (F_2)^d for the first round and pushes survivors
forward; it is complete but capped at small d.

The audit itself is certificate-based: it reports Secure only when the
layer/brick hypotheses that provably exclude all chains hold, Vulnerable
only with a chain that re-verifies, and Inconclusive otherwise.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded
from .gf2 import (BrickLayout, Subspace, Wall, _iter_rref_bases, as_wall,
                  bounded_image_span, count_proper_subspaces, rref,
                  subspace_image)
from .mixing import (FamilyReport, LayerFamily, MixingLayer,
                     family_strongly_proper, is_strongly_proper)
from .sbox import (ANTI_INVARIANCE_BUDGET, SBox, ddt,
                   differential_uniformity, is_strongly_anti_invariant,
                   min_derivative_image)
from . import presets

__all__ = [
    "MAX_TABLE_D",
    "DEFAULT_CHAIN_CAP",
    "SEMANTICS",
    "Round",
    "TbCipher",
    "LinearPartition",
    "PartitionChain",
    "BrickConditionReport",
    "RoundConditionReport",
    "AuditVerdict",
    "encrypt",
    "decrypt",
    "substitution_table",
    "round_table",
    "encryption_table",
    "partition_image",
    "check_lemma_containment",
    "find_trapdoor_chains",
    "verify_chain",
    "chain_holds_under_key",
    "audit",
    "build_rotation_cipher",
    "build_present_toy_cipher",
    "build_secure_toy_cipher",
    "build_linear_toy_cipher",
]

MAX_TABLE_D = 20
DEFAULT_CHAIN_CAP = 9

# Definition-resolution choices this implementation commits to; embedded in
# machine-readable reports so downstream consumers know what was checked.
SEMANTICS = {
    "strongly_proper": "image of every proper wall is not a wall (same or other)",
    "family_prefix_range": "j in [1, l-1]",
    "uniformity_exponent": "r = ceil(log2(delta)), required r < m",
    "degenerate_anti_invariance": "strong 0-anti-invariance is vacuously true",
    "normalization": "bricks are normalized to f(0)=0 for partition analysis",
}


@dataclass(frozen=True)
class Round:
    bricks: tuple[SBox, ...]
    layer: MixingLayer

    def __post_init__(self) -> None:
        layout = self.layer.layout
        if len(self.bricks) != layout.b:
            raise ValueError(
                f"round has {len(self.bricks)} bricks, layout needs {layout.b}")
        for i, box in enumerate(self.bricks):
            if box.m != layout.m:
                raise ValueError(
                    f"brick {i + 1} is {box.m}-bit, layout needs {layout.m}-bit")

    @property
    def layout(self) -> BrickLayout:
        return self.layer.layout


@dataclass(frozen=True)
class TbCipher:
    rounds: tuple[Round, ...]

    def __post_init__(self) -> None:
        if not self.rounds:
            raise ValueError("cipher has no rounds")
        layouts = {r.layout for r in self.rounds}
        if len(layouts) > 1:
            raise ValueError("rounds disagree on brick layout")

    @property
    def layout(self) -> BrickLayout:
        return self.rounds[0].layout

    @property
    def ell(self) -> int:
        return len(self.rounds)

    def layers(self) -> tuple[MixingLayer, ...]:
        return tuple(r.layer for r in self.rounds)


def _substitute(layout: BrickLayout, bricks: Sequence[SBox], x: int) -> int:
    m = layout.m
    mask = (1 << m) - 1
    y = 0
    for i, box in enumerate(bricks):
        y |= box.table[(x >> (i * m)) & mask] << (i * m)
    return y


def _check_key_tuple(cipher: TbCipher, keys: Sequence[int]) -> None:
    if len(keys) != cipher.ell:
        raise ValueError(f"expected {cipher.ell} round keys, got {len(keys)}")
    top = 1 << cipher.layout.d
    for k in keys:
        if not 0 <= k < top:
            raise ValueError("round key out of range")


def encrypt(cipher: TbCipher, keys: Sequence[int], x: int) -> int:
    _check_key_tuple(cipher, keys)
    layout = cipher.layout
    for rnd, k in zip(cipher.rounds, keys):
        x = rnd.layer.matrix.apply(_substitute(layout, rnd.bricks, x)) ^ k
    return x


def decrypt(cipher: TbCipher, keys: Sequence[int], y: int) -> int:
    _check_key_tuple(cipher, keys)
    layout = cipher.layout
    m = layout.m
    mask = (1 << m) - 1
    for rnd, k in zip(reversed(cipher.rounds), reversed(list(keys))):
        y = rnd.layer.matrix.inverse().apply(y ^ k)
        x = 0
        for i, box in enumerate(rnd.bricks):
            inv = box.inverse_table()
            x |= inv[(y >> (i * m)) & mask] << (i * m)
        y = x
    return y


# ---------------------------------------------------------------------------
# Full-codebook tables (capped at MAX_TABLE_D bits).


def _require_table_width(d: int) -> None:
    if d > MAX_TABLE_D:
        raise CapExceeded(
            f"full-codebook table at d={d} refused",
            estimate=1 << d, limit=1 << MAX_TABLE_D)


@lru_cache(maxsize=None)
def _layer_table(layer: MixingLayer) -> np.ndarray:
    _require_table_width(layer.layout.d)
    tab = np.zeros(1, dtype=np.int64)
    for row in layer.matrix.rows:
        tab = np.concatenate([tab, tab ^ row])
    tab.setflags(write=False)
    return tab


@lru_cache(maxsize=None)
def substitution_table(bricks: tuple[SBox, ...], layout: BrickLayout,
                       normalized: bool = True) -> np.ndarray:
    """Lookup table of the bricklayer alone (no mixing, no key)."""
    d = layout.d
    _require_table_width(d)
    if len(bricks) != layout.b:
        raise ValueError(f"got {len(bricks)} bricks, layout needs {layout.b}")
    n = 1 << d
    m = layout.m
    idx = np.arange(n, dtype=np.int64)
    sub = np.zeros(n, dtype=np.int64)
    for i, box in enumerate(bricks):
        if box.m != m:
            raise ValueError(f"brick {i + 1} is {box.m}-bit, layout needs {m}-bit")
        t = box.normalized() if normalized else box.table
        bt = np.array(t, dtype=np.int64)
        sub |= bt[(idx >> (i * m)) & ((1 << m) - 1)] << (i * m)
    sub.setflags(write=False)
    return sub


@lru_cache(maxsize=None)
def round_table(rnd: Round, normalized: bool = True) -> np.ndarray:
    """Lookup table of the keyless round map; ``normalized`` folds each
    brick's f(0) away so the table fixes 0."""
    sub = substitution_table(rnd.bricks, rnd.layout, normalized)
    out = _layer_table(rnd.layer)[sub]
    out.setflags(write=False)
    return out


def encryption_table(cipher: TbCipher, keys: Sequence[int]) -> np.ndarray:
    """Full codebook of the keyed cipher."""
    _check_key_tuple(cipher, keys)
    _require_table_width(cipher.layout.d)
    state = np.arange(1 << cipher.layout.d, dtype=np.int64)
    for rnd, k in zip(cipher.rounds, keys):
        state = round_table(rnd, normalized=False)[state] ^ k
    return state


# ---------------------------------------------------------------------------
# Linear partitions and their images.


@dataclass(frozen=True)
class LinearPartition:
    """The partition of (F_2)^d into cosets of a subspace."""

    subspace: Subspace

    @property
    def nontrivial(self) -> bool:
        return not self.subspace.is_trivial()


def _np_elements(s: Subspace) -> np.ndarray:
    els = np.zeros(1, dtype=np.int64)
    for row in s.basis:
        els = np.concatenate([els, els ^ row])
    return els


def _indicator(s: Subspace) -> np.ndarray:
    ind = np.zeros(1 << s.ambient, dtype=bool)
    ind[_np_elements(s)] = True
    return ind


def partition_image(table, part: LinearPartition) -> LinearPartition | None:
    """Image of a linear partition under an arbitrary permutation table.

    Returns L(W) when the image partition is again linear, else None.  The
    zero block of the image must be the image of the block containing the
    preimage of 0; the scan checks that it is a subspace W (span size equals
    block size) and then that every block lands inside a single W-coset.
    """
    arr = np.asarray(table, dtype=np.int64)
    n = len(arr)
    d = n.bit_length() - 1
    if n != 1 << d:
        raise ValueError("table length is not a power of two")
    _require_table_width(d)
    u = part.subspace
    if u.ambient != d:
        raise ValueError("partition ambient does not match table width")
    k = u.dim
    if k == 0 or k == d:
        return part
    x0 = int(np.nonzero(arr == 0)[0][0])
    zero_block = arr[_np_elements(u) ^ x0]
    w_rows = _span_rows_bounded(zero_block.tolist(), k)
    if w_rows is None:
        return None
    w = rref(w_rows, d)
    w_ind = _indicator(w)
    idx = np.arange(n, dtype=np.int64)
    for uel in u.elements()[1:]:
        if not w_ind[arr[idx ^ uel] ^ arr].all():
            return None
    return LinearPartition(w)


def _span_rows_bounded(vectors: Iterable[int], k: int) -> tuple[int, ...] | None:
    """Echelon rows of the span, or None as soon as the rank exceeds k."""
    red: dict[int, int] = {}
    rank = 0
    for y in vectors:
        while y:
            p = y & -y
            q = red.get(p)
            if q is None:
                rank += 1
                if rank > k:
                    return None
                red[p] = y
                break
            y ^= q
    if rank != k:
        return None
    return tuple(red[p] for p in sorted(red))


def check_lemma_containment(table, u: Subspace, w: Subspace) -> bool:
    """Whether every derivative image Im(x -> f(x+u') + f(x)), u' in U, is
    contained in W.  Requires f(0) = 0 (normalized map)."""
    arr = np.asarray(table, dtype=np.int64)
    n = len(arr)
    d = n.bit_length() - 1
    if n != 1 << d or u.ambient != d or w.ambient != d:
        raise ValueError("dimension mismatch")
    if arr[0] != 0:
        raise ValueError("map is not normalized (f(0) != 0)")
    w_ind = _indicator(w)
    idx = np.arange(n, dtype=np.int64)
    for uel in u.elements()[1:]:
        if not w_ind[arr[idx ^ uel] ^ arr].all():
            return False
    return True


# ---------------------------------------------------------------------------
# Trapdoor chains.


@dataclass(frozen=True)
class PartitionChain:
    """Subspaces U_1, ..., U_{l+1} with each keyless round mapping L(U_i) to
    L(U_{i+1}); all nontrivial, so the chain is usable as a trapdoor."""

    spaces: tuple[Subspace, ...]

    def __post_init__(self) -> None:
        if len(self.spaces) < 2:
            raise ValueError("chain needs at least two subspaces")
        ambients = {s.ambient for s in self.spaces}
        if len(ambients) > 1:
            raise ValueError("chain subspaces live in different dimensions")
        for s in self.spaces:
            if s.is_trivial():
                raise ValueError("chain contains a trivial subspace")


def _walls_mode_chains(cipher: TbCipher) -> list[PartitionChain]:
    layout = cipher.layout
    ell = cipher.ell
    supports = [rnd.layer.brick_supports() for rnd in cipher.rounds]
    from .mixing import _lex_proper_masks

    def mask_wall(mask: int) -> Wall:
        bricks = frozenset(j + 1 for j in range(layout.b) if (mask >> j) & 1)
        return Wall(layout, bricks)

    chains = []
    for _, mask in _lex_proper_masks(layout.b):
        cur = mask
        masks = [cur]
        ok = True
        for h in range(ell - 1):
            img = 0
            m2 = cur
            while m2:
                img |= supports[h][(m2 & -m2).bit_length() - 1]
                m2 &= m2 - 1
            if img.bit_count() != cur.bit_count():
                ok = False
                break
            cur = img
            masks.append(cur)
        if not ok:
            continue
        spaces = [mask_wall(m).subspace() for m in masks]
        final = subspace_image(spaces[-1], cipher.rounds[ell - 1].layer.matrix)
        spaces.append(final)
        chains.append(PartitionChain(tuple(spaces)))
    return chains


def _scan_linear_targets(py_table: list[int], np_table: np.ndarray, d: int,
                         k: int, start: int, stop: int
                         ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Scan a range of k-dim subspaces; return (U basis, W basis) for every U
    whose image partition under the table is linear."""
    found = []
    idx = np.arange(1 << d, dtype=np.int64)
    for rows in _iter_rref_bases(d, k, start, stop):
        w_rows = bounded_image_span(py_table, rows, k)
        if w_rows is None:
            continue
        u = Subspace(tuple(rows), d)
        w = rref(w_rows, d)
        w_ind = _indicator(w)
        ok = True
        for uel in u.elements()[1:]:
            if not w_ind[np_table[idx ^ uel] ^ np_table].all():
                ok = False
                break
        if ok:
            found.append((u.basis, w.basis))
    return found


_SCAN_STATE: dict = {}


def _init_scan_worker(py_table: list[int], d: int) -> None:
    _SCAN_STATE["py"] = py_table
    _SCAN_STATE["np"] = np.array(py_table, dtype=np.int64)
    _SCAN_STATE["d"] = d


def _scan_worker(task: tuple[int, int, int]):
    k, start, stop = task
    return _scan_linear_targets(_SCAN_STATE["py"], _SCAN_STATE["np"],
                                _SCAN_STATE["d"], k, start, stop)


def _first_round_targets(rnd: Round, threads: int = 1) -> dict[tuple[int, ...], Subspace]:
    from .gf2 import gaussian_binomial

    d = rnd.layout.d
    tab = round_table(rnd, normalized=True)
    py = tab.tolist()
    found: dict[tuple[int, ...], Subspace] = {}
    if threads <= 1:
        for k in range(1, d):
            for ub, wb in _scan_linear_targets(py, tab, d, k, 0,
                                               gaussian_binomial(d, k)):
                found[ub] = Subspace(wb, d)
        return found
    import multiprocessing as mp

    tasks = []
    for k in range(1, d):
        total = gaussian_binomial(d, k)
        pieces = min(total, threads * 4)
        bounds = [total * i // pieces for i in range(pieces + 1)]
        for lo, hi in zip(bounds, bounds[1:]):
            if lo < hi:
                tasks.append((k, lo, hi))
    ctx = mp.get_context("fork")
    with ctx.Pool(threads, initializer=_init_scan_worker, initargs=(py, d)) as pool:
        for part in pool.imap(_scan_worker, tasks):
            for ub, wb in part:
                found[ub] = Subspace(wb, d)
    return found


def find_trapdoor_chains(cipher: TbCipher, mode: str = "walls", *,
                         cap: int = DEFAULT_CHAIN_CAP,
                         threads: int = 1) -> list[PartitionChain]:
    """Chains of nontrivial subspaces transported by the keyless rounds.

    walls mode: starts from every proper wall and requires each intermediate
    image (before the last round) to stay a wall; complete for the chains
    that exist whenever the layer family is not strongly proper.

    exhaustive mode: scans all nontrivial subspaces for round one (pruning on
    the image-span dimension before the full coset test) and pushes the
    survivors through the remaining rounds; complete, but refused above
    ``cap`` ambient bits.
    """
    if mode == "walls":
        return _walls_mode_chains(cipher)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    d = cipher.layout.d
    if d > cap:
        raise CapExceeded(
            f"exhaustive chain search at d={d} refused",
            estimate=count_proper_subspaces(d), limit=cap)
    first = _first_round_targets(cipher.rounds[0], threads)
    later_tables = [round_table(r, normalized=True) for r in cipher.rounds[1:]]
    chains = []
    for u_basis, w in first.items():
        spaces = [Subspace(u_basis, d), w]
        cur = w
        ok = True
        for tab in later_tables:
            if cur.is_trivial():
                ok = False
                break
            nxt = partition_image(tab, LinearPartition(cur))
            if nxt is None:
                ok = False
                break
            cur = nxt.subspace
            spaces.append(cur)
        if ok:
            chains.append(PartitionChain(tuple(spaces)))
    chains.sort(key=lambda ch: (ch.spaces[0].dim, ch.spaces[0].basis))
    return chains


def verify_chain(cipher: TbCipher, chain: PartitionChain, *,
                 elementwise: bool | None = None) -> bool:
    """Re-derive every link of a chain against the cipher.

    Wall links are verified structurally (a bricklayer of bijective bricks
    maps every wall coset to a wall coset, and the layer transports the
    partition along its matrix); non-wall links need the full-codebook
    partition image, so they require d <= MAX_TABLE_D.  ``elementwise``
    forces the table route even for wall links.
    """
    layout = cipher.layout
    if len(chain.spaces) != cipher.ell + 1:
        return False
    if any(s.ambient != layout.d for s in chain.spaces):
        return False
    for h, rnd in enumerate(cipher.rounds):
        cur, nxt = chain.spaces[h], chain.spaces[h + 1]
        wall = as_wall(cur, layout)
        if wall is not None and not elementwise:
            if subspace_image(cur, rnd.layer.matrix) != nxt:
                return False
        else:
            img = partition_image(round_table(rnd, normalized=True),
                                  LinearPartition(cur))
            if img is None or img.subspace != nxt:
                return False
    return True


def chain_holds_under_key(cipher: TbCipher, chain: PartitionChain,
                          keys: Sequence[int]) -> bool:
    """Whether the keyed cipher maps L(U_1) to L(U_{l+1})."""
    table = encryption_table(cipher, keys)
    first, last = chain.spaces[0], chain.spaces[-1]
    ind = _indicator(last)
    idx = np.arange(len(table), dtype=np.int64)
    for uel in first.elements()[1:]:
        if not ind[table[idx ^ uel] ^ table].all():
            return False
    return True


# ---------------------------------------------------------------------------
# The audit.


@dataclass(frozen=True)
class BrickConditionReport:
    brick_index: int
    delta: int
    min_image_size: int
    min_image_u: int
    route: str
    r: int | None
    anti_ok: bool | None
    ok: bool
    detail: str


@dataclass(frozen=True)
class RoundConditionReport:
    round_index: int
    bricks: tuple[BrickConditionReport, ...]

    @property
    def ok(self) -> bool:
        return all(b.ok for b in self.bricks)


@dataclass(frozen=True)
class AuditVerdict:
    status: str  # "secure" | "vulnerable" | "inconclusive"
    clause1_round: int | None
    clause2_ok: bool
    strongly_proper_layers: tuple[bool, ...]
    family: FamilyReport
    rounds: tuple[RoundConditionReport, ...]
    chain: PartitionChain | None
    chain_count: int
    exhaustive_ran: bool
    exhaustive_empty: bool | None
    condition_1prime: bool
    notes: tuple[str, ...]

    @property
    def clause1_ok(self) -> bool:
        return self.clause1_round is not None


@lru_cache(maxsize=None)
def _brick_conditions(box: SBox, use_1prime: bool,
                      budget: int) -> BrickConditionReport:
    m = box.m
    table = ddt(box)
    delta = differential_uniformity(box, table)
    mini = min_derivative_image(box, table)
    r: int | None
    if use_1prime:
        route = "min-image"
        r = next((c for c in range(1, m) if mini.size > (1 << (m - c))), None)
        r_text = (f"min image {mini.size} > 2^({m}-{r})" if r is not None
                  else f"min image {mini.size} supports no exponent r < {m}")
    else:
        route = "uniformity"
        r = (delta - 1).bit_length()
        if r >= m:
            r_text = f"delta={delta} needs exponent r={r}, not below m={m}"
            r = None
        else:
            r_text = f"delta={delta} <= 2^{r}"
    anti_ok: bool | None = None
    if r is not None:
        if r == 1:
            anti_ok = True
            anti_text = "strong 0-anti-invariance holds vacuously"
        else:
            anti_ok, _ = is_strongly_anti_invariant(box, r - 1, budget=budget)
            anti_text = (f"strongly {r - 1}-anti-invariant: "
                         f"{'yes' if anti_ok else 'no'}")
    else:
        anti_text = "anti-invariance not evaluated"
    ok = r is not None and bool(anti_ok)
    return BrickConditionReport(
        brick_index=0, delta=delta, min_image_size=mini.size,
        min_image_u=mini.u, route=route, r=r, anti_ok=anti_ok, ok=ok,
        detail=f"{r_text}; {anti_text}")


def audit(cipher: TbCipher, *, use_condition1prime: bool = False,
          anti_budget: int = ANTI_INVARIANCE_BUDGET,
          exhaustive_fallback_cap: int = 0,
          threads: int = 1) -> AuditVerdict:
    """Certificate-based audit for the partition trapdoor.

    Secure requires one of two sufficient clauses: (1) some round h < l has
    a strongly proper layer and both round h and round h+1 have bricks that
    are 2^r-uniform (r < m) and strongly (r-1)-anti-invariant, or (2) the
    whole layer family is strongly proper and every round's bricks satisfy
    those conditions.  Vulnerable requires a verified chain (the walls-mode
    search finds one whenever the family is not strongly proper).  Anything
    else is Inconclusive; an empty search is never promoted to Secure.

    With ``use_condition1prime`` the per-brick uniformity bound is replaced
    by the measured minimum derivative-image size, which can certify boxes
    whose delta is too coarse.  ``exhaustive_fallback_cap`` >= d opts in to
    running the exhaustive search when the clauses fail and the walls search
    is empty; a chain found that way still yields Vulnerable.
    """
    layout = cipher.layout
    ell = cipher.ell
    notes: list[str] = []
    sp = tuple(is_strongly_proper(r.layer)[0] for r in cipher.rounds)
    rounds = []
    for h, rnd in enumerate(cipher.rounds):
        bricks = tuple(
            dataclasses.replace(
                _brick_conditions(box, use_condition1prime, anti_budget),
                brick_index=i + 1)
            for i, box in enumerate(rnd.bricks))
        rounds.append(RoundConditionReport(round_index=h + 1, bricks=bricks))
    rounds_t = tuple(rounds)
    clause1_round = None
    for h in range(ell - 1):
        if sp[h] and rounds_t[h].ok and rounds_t[h + 1].ok:
            clause1_round = h + 1
            break
    family = family_strongly_proper(LayerFamily(cipher.layers()))
    clause2 = family.strongly_proper and all(rep.ok for rep in rounds_t)
    if clause1_round is not None:
        notes.append(
            f"round {clause1_round} is strongly proper and rounds "
            f"{clause1_round},{clause1_round + 1} satisfy the brick conditions")
    if clause2:
        notes.append("layer family is strongly proper and every round "
                     "satisfies the brick conditions")
    if clause1_round is not None or clause2:
        return AuditVerdict(
            status="secure", clause1_round=clause1_round, clause2_ok=clause2,
            strongly_proper_layers=sp, family=family, rounds=rounds_t,
            chain=None, chain_count=0, exhaustive_ran=False,
            exhaustive_empty=None, condition_1prime=use_condition1prime,
            notes=tuple(notes))
    chains = [ch for ch in find_trapdoor_chains(cipher, "walls")
              if verify_chain(cipher, ch)]
    if not family.strongly_proper:
        notes.append(
            f"{len(family.surviving_walls())} proper wall(s) survive every "
            f"prefix of the layer family")
    for rep in rounds_t:
        for brick in rep.bricks:
            if not brick.ok:
                notes.append(
                    f"round {rep.round_index} brick {brick.brick_index}: "
                    f"{brick.detail}")
    if chains:
        return AuditVerdict(
            status="vulnerable", clause1_round=None, clause2_ok=False,
            strongly_proper_layers=sp, family=family, rounds=rounds_t,
            chain=chains[0], chain_count=len(chains), exhaustive_ran=False,
            exhaustive_empty=None, condition_1prime=use_condition1prime,
            notes=tuple(notes))
    exhaustive_ran = False
    exhaustive_empty: bool | None = None
    if exhaustive_fallback_cap >= layout.d:
        exhaustive_ran = True
        deep = find_trapdoor_chains(cipher, "exhaustive",
                                    cap=exhaustive_fallback_cap,
                                    threads=threads)
        exhaustive_empty = not deep
        if deep:
            notes.append("chain found by the exhaustive search")
            return AuditVerdict(
                status="vulnerable", clause1_round=None, clause2_ok=False,
                strongly_proper_layers=sp, family=family, rounds=rounds_t,
                chain=deep[0], chain_count=len(deep), exhaustive_ran=True,
                exhaustive_empty=False, condition_1prime=use_condition1prime,
                notes=tuple(notes))
        notes.append("exhaustive chain search found nothing; absence of a "
                     "chain is not a security certificate")
    return AuditVerdict(
        status="inconclusive", clause1_round=None, clause2_ok=False,
        strongly_proper_layers=sp, family=family, rounds=rounds_t,
        chain=None, chain_count=0, exhaustive_ran=exhaustive_ran,
        exhaustive_empty=exhaustive_empty,
        condition_1prime=use_condition1prime, notes=tuple(notes))


# ---------------------------------------------------------------------------
# Reference ciphers.


def build_rotation_cipher(m: int, b: int, ell: int) -> TbCipher:
    """Field-inversion bricks with the brick-rotation layer: proper mixing
    in every round, yet every wall image is again a wall, so the partition
    trapdoor applies for any number of rounds."""
    if ell < 1:
        raise ValueError("need at least one round")
    layout = BrickLayout(m, b)
    box = presets.inversion_sbox(m)
    rnd = Round((box,) * b, presets.rotation_layer(layout))
    return TbCipher((rnd,) * ell)


@lru_cache(maxsize=None)
def _toy_layer(m: int, b: int) -> MixingLayer:
    return presets.find_strongly_proper_layer(BrickLayout(m, b), seed=0)


def build_present_toy_cipher(ell: int = 3) -> TbCipher:
    """PRESENT bricks under a strongly proper layer; audits Secure."""
    box = presets.present_sbox()
    rnd = Round((box, box), _toy_layer(4, 2))
    return TbCipher((rnd,) * ell)


def build_secure_toy_cipher(ell: int = 2) -> TbCipher:
    """3-bit inversion bricks under a strongly proper layer; audits Secure."""
    box = presets.inversion_sbox(3)
    rnd = Round((box, box), _toy_layer(3, 2))
    return TbCipher((rnd,) * ell)


def build_linear_toy_cipher(ell: int = 2) -> TbCipher:
    """Identity bricks under a strongly proper layer: the walls search has
    nothing to find, but the bricks are linear, so the audit must stay
    Inconclusive rather than Secure."""
    box = presets.identity_sbox(3)
    rnd = Round((box, box), _toy_layer(3, 2))
    return TbCipher((rnd,) * ell)
