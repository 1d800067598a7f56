"""Multi-input functional encryption for inner products, vectorized.

Each participant owns one slot. A slot encrypts a whole coordinate vector;
a function key for an integer weight vector y lets the holder recover, per
coordinate j, exactly the weighted sum over slots of x_i[j] and nothing
else. DDH-style construction over the group in :mod:`fefl.groups`:

    setup      a <- Z_q, per slot W_i = (w_i0, w_i1) <- Z_q^2, u_i <- Z_q
    slot key   (g, g^a), (g^w_i0, g^(w_i1 * a)), u_i
    encrypt    nonce r: t = (g^r, g^(a r)),
               c[j] = g^(x[j] + u_i + (w_i0 + w_i1 a) r)
    key for y  d_i = (y_i w_i0, y_i w_i1), z = sum y_i u_i
    decrypt    C[j] = prod_i c_i[j]^(y_i) / (t_i0^(d_i0) t_i1^(d_i1))
               sum_i y_i x_i[j] = log_g(C[j] / g^z)

Two nonce modes: the default draws a fresh nonce per coordinate; the
batched mode reuses one nonce across the vector, which is faster but leaks
pairwise plaintext differences within a vector (c[j]/c[k] = g^(x_j - x_k)).
"""

from __future__ import annotations

import enum
import secrets
from dataclasses import dataclass
from typing import Iterable, MutableMapping, Optional, Sequence, Tuple

import gmpy2

from . import wire
from .errors import (DimensionError, EncodingError, NoSlotError,
                     ProtocolError)
from .groups import DlogTable, GroupParams, dlog_solve


class NonceMode(str, enum.Enum):
    """`fresh` draws one nonce per coordinate; `shared` reuses one per vector."""

    FRESH = "fresh"
    SHARED = "shared"


@dataclass(frozen=True)
class MasterKeys:
    """Master key material for `capacity` provisioned slots.

    The public part is (group, a_exp, wa_exp); w and u are the secrets the
    authority keeps. wa_exp[i] holds g raised to W_i * (1, a) componentwise.
    """

    group: GroupParams
    capacity: int
    a_exp: Tuple[int, int]
    wa_exp: Tuple[Tuple[int, int], ...]
    w: Tuple[Tuple[int, int], ...]
    u: Tuple[int, ...]


@dataclass(frozen=True)
class PublicKeyShare:
    """Per-participant encryption key for one slot."""

    slot_index: int
    group: GroupParams
    a_exp: Tuple[int, int]
    wa_exp_i: Tuple[int, int]
    u_i: int


@dataclass(frozen=True)
class FunctionKey:
    """Decryption key bound to one integer weight vector."""

    d: Tuple[Tuple[int, int], ...]
    z: int
    weight_vector: Tuple[int, ...]


@dataclass(frozen=True)
class SlotCiphertext:
    slot_index: int
    mode: NonceMode
    coord_count: int
    t_exp: Tuple[Tuple[int, int], ...]
    c_exp: Tuple[int, ...]


def mife_setup(params: GroupParams, capacity: int, rng=None) -> MasterKeys:
    """Sample master keys with `capacity` independent slots."""
    if capacity < 1:
        raise DimensionError("capacity must be at least 1")
    rng = rng if rng is not None else secrets.SystemRandom()
    q = params.order
    a = rng.randrange(q)
    a_exp = (int(params.element(1)), int(params.element(a)))
    w = []
    u = []
    wa_exp = []
    for _ in range(capacity):
        w0 = rng.randrange(q)
        w1 = rng.randrange(q)
        w.append((w0, w1))
        u.append(rng.randrange(q))
        wa_exp.append((int(params.element(w0)), int(params.element(w1 * a % q))))
    return MasterKeys(group=params, capacity=capacity, a_exp=a_exp,
                      wa_exp=tuple(wa_exp), w=tuple(w), u=tuple(u))


def pk_distribute(keys: MasterKeys, participant_id: str,
                  assignments: MutableMapping[str, int]) -> PublicKeyShare:
    """Return the participant's slot key, assigning the next free slot once.

    `assignments` is the authority-owned id -> slot map; repeated calls with
    the same id return the same share. Raises NoSlotError when all
    provisioned slots are taken.
    """
    slot = assignments.get(participant_id)
    if slot is None:
        if len(assignments) >= keys.capacity:
            raise NoSlotError(
                f"all {keys.capacity} slots assigned; cannot admit {participant_id!r}")
        slot = len(assignments)
        assignments[participant_id] = slot
    return PublicKeyShare(slot_index=slot, group=keys.group, a_exp=keys.a_exp,
                          wa_exp_i=keys.wa_exp[slot], u_i=keys.u[slot])


def sk_generate(keys: MasterKeys, y: Sequence[int]) -> FunctionKey:
    """Derive the decryption key for integer weights y over the first |y| slots."""
    if len(y) > keys.capacity:
        raise DimensionError(
            f"weight vector has {len(y)} entries but only {keys.capacity} slots exist")
    q = keys.group.order
    d = tuple((int(y_i) * w0 % q, int(y_i) * w1 % q)
              for y_i, (w0, w1) in zip(y, keys.w))
    z = sum(int(y_i) * u_i for y_i, u_i in zip(y, keys.u)) % q
    return FunctionKey(d=d, z=z, weight_vector=tuple(int(v) for v in y))


def encrypt(share: PublicKeyShare, x, mode: NonceMode = NonceMode.FRESH,
            rng=None) -> SlotCiphertext:
    """Encrypt a coordinate vector under this slot's key.

    `x` is a sequence of integers already reduced into [0, order), e.g. an
    EncodedVector. In shared mode a single nonce covers the whole vector.
    """
    coords = getattr(x, "coords", x)
    rng = rng if rng is not None else secrets.SystemRandom()
    group = share.group
    mod = gmpy2.mpz(group.modulus)
    q = group.order
    g = gmpy2.mpz(group.generator)
    ga = gmpy2.mpz(share.a_exp[1])
    wa = gmpy2.mpz(share.wa_exp_i[0]) * share.wa_exp_i[1] % mod
    u_i = share.u_i

    for v in coords:
        if not 0 <= v < q:
            raise EncodingError(f"coordinate {v} outside [0, order)")

    mode = NonceMode(mode)
    t_exp = []
    c_exp = []
    if mode is NonceMode.SHARED:
        r = rng.randrange(q)
        t_exp.append((int(gmpy2.powmod(g, r, mod)), int(gmpy2.powmod(ga, r, mod))))
        mask = gmpy2.powmod(wa, r, mod)
        for v in coords:
            c_exp.append(int(gmpy2.powmod(g, (v + u_i) % q, mod) * mask % mod))
    else:
        for v in coords:
            r = rng.randrange(q)
            t_exp.append((int(gmpy2.powmod(g, r, mod)), int(gmpy2.powmod(ga, r, mod))))
            mask = gmpy2.powmod(wa, r, mod)
            c_exp.append(int(gmpy2.powmod(g, (v + u_i) % q, mod) * mask % mod))
    return SlotCiphertext(slot_index=share.slot_index, mode=mode,
                          coord_count=len(c_exp), t_exp=tuple(t_exp),
                          c_exp=tuple(c_exp))


def decrypt(cts: Iterable[SlotCiphertext], fk: FunctionKey, table: DlogTable,
            bound: int) -> list:
    """Recover the per-coordinate weighted sums as signed integers.

    The ciphertext set must cover exactly the slots where the key's weight
    vector is nonzero, with one ciphertext per slot and matching coordinate
    counts. Values outside [-bound, bound] raise DlogRangeError.
    """
    by_slot = {}
    for ct in cts:
        if ct.slot_index in by_slot:
            raise ProtocolError(f"duplicate ciphertext for slot {ct.slot_index}")
        by_slot[ct.slot_index] = ct

    expected = {i for i, y_i in enumerate(fk.weight_vector) if y_i != 0}
    if set(by_slot) != expected:
        raise ProtocolError(
            f"ciphertext slots {sorted(by_slot)} do not match key slots {sorted(expected)}")
    if not by_slot:
        raise ProtocolError("cannot decrypt with an all-zero weight vector")

    counts = {ct.coord_count for ct in by_slot.values()}
    if len(counts) != 1:
        raise ProtocolError(f"ciphertexts disagree on coordinate count: {sorted(counts)}")
    dim = counts.pop()

    group = table.group
    mod = gmpy2.mpz(group.modulus)
    gz = gmpy2.powmod(group.generator, fk.z, mod)

    # per-slot t-factor: t0^d0 * t1^d1; constant across coordinates when the
    # slot used a shared nonce
    shared_den = gz
    per_coord: list = []
    ordered = sorted(by_slot.items())
    for slot, ct in ordered:
        d0, d1 = fk.d[slot]
        if ct.mode is NonceMode.SHARED:
            t0, t1 = ct.t_exp[0]
            shared_den = shared_den * gmpy2.powmod(t0, d0, mod) % mod
            shared_den = shared_den * gmpy2.powmod(t1, d1, mod) % mod
        else:
            per_coord.append((ct, d0, d1))

    result = []
    for j in range(dim):
        num = gmpy2.mpz(1)
        den = shared_den
        for slot, ct in ordered:
            y_i = fk.weight_vector[slot]
            cj = gmpy2.mpz(ct.c_exp[j])
            num = num * (cj if y_i == 1 else gmpy2.powmod(cj, y_i, mod)) % mod
        for ct, d0, d1 in per_coord:
            t0, t1 = ct.t_exp[j]
            den = den * gmpy2.powmod(t0, d0, mod) % mod
            den = den * gmpy2.powmod(t1, d1, mod) % mod
        c_val = num * gmpy2.invert(den, mod) % mod
        result.append(dlog_solve(c_val, table, bound))
    return result


# -- wire encoding ----------------------------------------------------------
# Length-prefixed big-endian integers; the byte counts reported by the
# simulator come from these encoders.

def serialize_ciphertext(ct: SlotCiphertext) -> bytes:
    buf = bytearray()
    wire.put_uint(buf, 0 if ct.mode is NonceMode.FRESH else 1, width=1)
    wire.put_uint(buf, ct.slot_index)
    wire.put_uint(buf, ct.coord_count)
    wire.put_uint(buf, len(ct.t_exp))
    for t0, t1 in ct.t_exp:
        wire.put_bigint(buf, t0)
        wire.put_bigint(buf, t1)
    for c in ct.c_exp:
        wire.put_bigint(buf, c)
    return bytes(buf)


def serialize_group(params: GroupParams) -> bytes:
    buf = bytearray()
    wire.put_bigint(buf, params.modulus)
    wire.put_bigint(buf, params.order)
    wire.put_bigint(buf, params.generator)
    wire.put_uint(buf, params.security_bits)
    return bytes(buf)


def serialize_public_share(share: PublicKeyShare) -> bytes:
    buf = bytearray()
    wire.put_uint(buf, share.slot_index)
    buf += serialize_group(share.group)
    for v in (*share.a_exp, *share.wa_exp_i, share.u_i):
        wire.put_bigint(buf, v)
    return bytes(buf)


def serialize_function_key(fk: FunctionKey) -> bytes:
    buf = bytearray()
    wire.put_uint(buf, len(fk.d))
    for d0, d1 in fk.d:
        wire.put_bigint(buf, d0)
        wire.put_bigint(buf, d1)
    wire.put_bigint(buf, fk.z)
    wire.put_uint(buf, len(fk.weight_vector))
    for y_i in fk.weight_vector:
        wire.put_int64(buf, y_i)
    return bytes(buf)


def serialize_master_keys(keys: MasterKeys) -> bytes:
    buf = bytearray()
    buf += serialize_group(keys.group)
    wire.put_uint(buf, keys.capacity)
    wire.put_bigint(buf, keys.a_exp[0])
    wire.put_bigint(buf, keys.a_exp[1])
    for (e0, e1), (w0, w1), u_i in zip(keys.wa_exp, keys.w, keys.u):
        for v in (e0, e1, w0, w1, u_i):
            wire.put_bigint(buf, v)
    return bytes(buf)
