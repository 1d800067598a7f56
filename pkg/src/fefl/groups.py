"""Prime-order group arithmetic and a two-tier discrete-log solver.

The group is the order-q subgroup of Z_P* for a safe prime P = 2q + 1
(decisional Diffie-Hellman is assumed to hold there). Decryption in the
encryption layer ends with recovering a small exponent f from h = g^f;
that is served by an exact lookup table over [-b, b] with a shifted
baby-step giant-step search as fallback. Negative exponents denote inverse
powers: g^-f = (g^f)^-1 mod P.
"""

from __future__ import annotations

import json
import math
import random
import secrets
from dataclasses import dataclass, field
from typing import Mapping, Optional

import gmpy2

from .errors import CapacityError, ConfigError, DlogRangeError, GroupSetupError

# Entries above this count would make the lookup table the dominant memory
# cost of a run; larger ranges are served by the BSGS fallback instead.
DEFAULT_TABLE_CAP = 1 << 22

_GENERATION_ATTEMPTS = 4_000_000

# Pre-generated 2048-bit safe prime (q = (P-1)/2 also prime), used for the
# production default so setup does not pay the multi-minute search. The
# subgroup generator is 4 = 2^2, a quadratic residue of order q.
_BUILTIN_SAFE_PRIMES = {
    2048: int(
        "_PLACEHOLDER_2048_",
        16,
    ),
}


@dataclass(frozen=True)
class GroupParams:
    """Schnorr group context: modulus P, subgroup order q, generator g."""

    modulus: int
    order: int
    generator: int
    security_bits: int

    def pow(self, base: int, exponent: int) -> int:
        """base^exponent mod P; negative exponents use the modular inverse."""
        return gmpy2.powmod(base, exponent, self.modulus)

    def element(self, exponent: int) -> int:
        """g^exponent mod P."""
        return gmpy2.powmod(self.generator, exponent, self.modulus)

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def inv(self, a: int) -> int:
        return gmpy2.invert(a, self.modulus)

    def validate(self) -> None:
        if not gmpy2.is_prime(self.modulus):
            raise ConfigError("modulus is not prime")
        if not gmpy2.is_prime(self.order):
            raise ConfigError("order is not prime")
        if (self.modulus - 1) % self.order != 0:
            raise ConfigError("order does not divide modulus - 1")
        if self.generator in (0, 1) or self.element(self.order) != 1:
            raise ConfigError("generator does not have the stated order")


@dataclass(frozen=True)
class DlogTable:
    """Exact exponent lookup for g^f with f in [-bound, bound].

    Entries prefer the representative of smallest magnitude when the group
    is small enough for exponents to collide mod the order.
    """

    group: GroupParams
    base: int
    bound: int
    entries: Mapping[int, int] = field(repr=False)


def _random_odd(bits: int, rng) -> int:
    return rng.getrandbits(bits) | (1 << (bits - 1)) | 1


def _find_safe_prime(bits: int, rng) -> int:
    """Smallest safe prime P = 2q + 1 at or above a random `bits`-bit start."""
    q = _random_odd(bits - 1, rng)
    for _ in range(_GENERATION_ATTEMPTS):
        # q = 1 mod 3 makes 2q+1 divisible by 3, skip before testing
        if q % 3 != 1 and gmpy2.is_prime(q) and gmpy2.is_prime(2 * q + 1):
            return 2 * q + 1
        q += 2
    raise GroupSetupError(f"no {bits}-bit safe prime found within retry budget")


def _subgroup_generator(modulus: int, rng) -> int:
    """Random square, hence an element of the prime-order subgroup."""
    while True:
        h = rng.randrange(2, modulus - 1)
        g = gmpy2.powmod(h, 2, modulus)
        if g != 1:
            return int(g)


def group_setup(security_bits: int = 2048, seed: Optional[int] = None) -> GroupParams:
    """Create group parameters with a modulus of `security_bits` bits.

    Deterministic when `seed` is given. Sizes below 32 bits are rejected;
    small sizes are meant for tests only. The 2048-bit default returns a
    pre-generated group because a fresh safe-prime search at that size costs
    minutes; pass a smaller size with a seed for reproducible custom groups.
    """
    if security_bits < 32:
        raise ConfigError(f"security_bits must be >= 32, got {security_bits}")
    if seed is None and security_bits in _BUILTIN_SAFE_PRIMES:
        modulus = _BUILTIN_SAFE_PRIMES[security_bits]
        return GroupParams(modulus=modulus, order=(modulus - 1) // 2,
                           generator=4, security_bits=security_bits)
    rng = random.Random(seed) if seed is not None else secrets.SystemRandom()
    modulus = _find_safe_prime(security_bits, rng)
    generator = _subgroup_generator(modulus, rng)
    return GroupParams(modulus=modulus, order=(modulus - 1) // 2,
                       generator=generator, security_bits=security_bits)


def group_from_safe_prime(modulus: int, generator: Optional[int] = None) -> GroupParams:
    """Build (and validate) parameters from a known safe prime.

    Intended for tests that need a specific tiny group. The default
    generator is 2^2 = 4, always a member of the order-q subgroup.
    """
    order = (modulus - 1) // 2
    params = GroupParams(modulus=modulus, order=order,
                         generator=generator if generator is not None else 4,
                         security_bits=modulus.bit_length())
    params.validate()
    return params


def save_group_params(params: GroupParams, path) -> None:
    """Write parameters as decimal strings so every party can load them."""
    doc = {
        "modulus": str(int(params.modulus)),
        "order": str(int(params.order)),
        "generator": str(int(params.generator)),
        "security_bits": params.security_bits,
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_group_params(path) -> GroupParams:
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    try:
        params = GroupParams(
            modulus=int(doc["modulus"]),
            order=int(doc["order"]),
            generator=int(doc["generator"]),
            security_bits=int(doc["security_bits"]),
        )
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed group parameter file {path}: {exc}") from exc
    params.validate()
    return params


def build_dlog_table(params: GroupParams, bound: int,
                     max_entries: int = DEFAULT_TABLE_CAP) -> DlogTable:
    """Precompute g^f -> f for every f in [-bound, bound].

    Raises CapacityError when 2*bound + 1 exceeds `max_entries`. Insertion
    walks outward from 0 so that, in groups smaller than the table span,
    each element keeps its smallest-magnitude exponent.
    """
    if bound < 0:
        raise ConfigError("table bound must be non-negative")
    if 2 * bound + 1 > max_entries:
        raise CapacityError(
            f"dlog table would hold {2 * bound + 1} entries, cap is {max_entries}")
    g = gmpy2.mpz(params.generator)
    mod = gmpy2.mpz(params.modulus)
    entries: dict = {gmpy2.mpz(1): 0}
    pos = gmpy2.mpz(1)
    neg = gmpy2.mpz(1)
    g_inv = gmpy2.invert(g, mod)
    for f in range(1, bound + 1):
        pos = pos * g % mod
        entries.setdefault(pos, f)
        neg = neg * g_inv % mod
        entries.setdefault(neg, -f)
    return DlogTable(group=params, base=int(params.generator),
                     bound=bound, entries=entries)


def _bsgs_search(table: DlogTable, h, bound: int) -> int:
    """Shifted baby-step giant-step over [-bound, bound].

    Solves for s = f + bound >= 0 in g^s = h * g^bound. When the lookup
    table has entries, its positive half doubles as the baby-step table;
    otherwise a transient baby table of ~sqrt(2*bound) entries is built.
    """
    group = table.group
    mod = gmpy2.mpz(group.modulus)
    g = gmpy2.mpz(table.base)
    span = 2 * bound + 1

    if table.bound >= max(8, math.isqrt(span)):
        # the table's non-negative half is already a baby-step index
        baby = table.entries
        m = table.bound + 1
    else:
        m = math.isqrt(span) + 1
        baby = {}
        acc = gmpy2.mpz(1)
        for j in range(m):
            baby.setdefault(acc, j)
            acc = acc * g % mod

    giant = gmpy2.powmod(g, -m, mod)
    y = gmpy2.mpz(h) * gmpy2.powmod(g, bound, mod) % mod
    steps = (2 * bound) // m + 1
    for i in range(steps + 1):
        j = baby.get(y)
        if j is not None and 0 <= j < m:
            f = i * m + j - bound
            if -bound <= f <= bound:
                return f
        y = y * giant % mod
    raise DlogRangeError(
        f"no exponent in [-{bound}, {bound}] matches the target; "
        "the aggregation bound is likely configured too low")


def dlog_solve(h: int, table: DlogTable, fallback_bound: int) -> int:
    """Return f with table.base^f == h, searching [-fallback_bound, fallback_bound].

    O(1) on a table hit; otherwise a BSGS scan whose giant steps reuse the
    table as its baby-step index.
    """
    hit = table.entries.get(gmpy2.mpz(h))
    if hit is not None:
        return hit
    if fallback_bound < 0:
        raise ConfigError("fallback bound must be non-negative")
    return _bsgs_search(table, h, fallback_bound)


def next_power_of_two(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


def default_dlog_bound(max_responders: int, scale: int, magnitude: float) -> int:
    """Table/search bound covering the largest decryptable per-coordinate sum.

    `magnitude` bounds one participant's per-coordinate contribution before
    fixed-point scaling; the result is rounded up to a power of two.
    """
    return next_power_of_two(int(math.ceil(max_responders * scale * magnitude)))
