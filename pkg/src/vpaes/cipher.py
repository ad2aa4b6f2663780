"""AES-128 with a per-block bit permutation spliced in after the initial
whitening XOR.

Encryption of one block: state = block XOR roundkey0, permute the 128 state
bits with the block's own permutation, then the ten standard rounds.
Decryption unwinds the rounds, un-permutes, and strips the whitening key.

Payloads are processed as independent 16-byte blocks (a tweaked-codebook
arrangement: the permutation is the tweak, derived from the block index via
the sliding keystream window). ``encrypt_block``/``decrypt_block`` are the
scalar reference; payload functions run a numpy path that processes every
block of the image at once and is tested byte-for-byte against the scalar
composition.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .keystream import key_to_integer, pi_fraction_bytes, required_byte_count
from .permgen import BLOCK_BITS, WINDOW_BYTES, apply_to_bits, invert

BLOCK_BYTES = 16
ROUNDS = 10

SBOX = bytes.fromhex(
    "637c777bf26b6fc53001672bfed7ab76ca82c97dfa5947f0add4a2af9ca472c0"
    "b7fd9326363ff7cc34a5e5f171d8311504c723c31896059a071280e2eb27b275"
    "09832c1a1b6e5aa0523bd6b329e32f8453d100ed20fcb15b6acbbe394a4c58cf"
    "d0efaafb434d338545f9027f503c9fa851a3408f929d38f5bcb6da2110fff3d2"
    "cd0c13ec5f974417c4a77e3d645d197360814fdc222a908846eeb814de5e0bdb"
    "e0323a0a4906245cc2d3ac629195e479e7c8376d8dd54ea96c56f4ea657aae08"
    "ba78252e1ca6b4c6e8dd741f4bbd8b8a703eb5664803f60e613557b986c11d9e"
    "e1f8981169d98e949b1e87e9ce5528df8ca1890dbfe6426841992d0fb054bb16")

_inv = bytearray(256)
for _i, _v in enumerate(SBOX):
    _inv[_v] = _i
INV_SBOX = bytes(_inv)
del _inv, _i, _v


def _gmul(a, b):
    """Multiplication in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1."""
    r = 0
    for _ in range(8):
        if b & 1:
            r ^= a
        hi = a & 0x80
        a = (a << 1) & 0xFF
        if hi:
            a ^= 0x1B
        b >>= 1
    return r


G2 = bytes(_gmul(2, x) for x in range(256))
G3 = bytes(_gmul(3, x) for x in range(256))
G9 = bytes(_gmul(9, x) for x in range(256))
G11 = bytes(_gmul(11, x) for x in range(256))
G13 = bytes(_gmul(13, x) for x in range(256))
G14 = bytes(_gmul(14, x) for x in range(256))

# ShiftRows on bytes in AES input order (byte i sits at row i%4, col i//4):
# output byte r+4c takes input byte r+4((c+r)%4).
SHIFT_IDX = tuple(
    (i % 4) + 4 * (((i // 4) + (i % 4)) % 4) for i in range(16))
INV_SHIFT_IDX = tuple(
    (i % 4) + 4 * (((i // 4) - (i % 4)) % 4) for i in range(16))

RCON = (0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36)


@dataclass(frozen=True)
class RoundKeys:
    """The 11 expanded 16-byte round keys; keys[0] is the cipher key."""

    keys: tuple

    def __post_init__(self):
        if len(self.keys) != ROUNDS + 1:
            raise DomainError(f"expected {ROUNDS + 1} round keys")
        if any(len(k) != BLOCK_BYTES for k in self.keys):
            raise DomainError("each round key must hold 16 bytes")


def expand_key(key):
    """Standard AES-128 key expansion: 44 words, 11 round keys."""
    words = [list(key.data[4 * i:4 * i + 4]) for i in range(4)]
    for i in range(4, 44):
        t = list(words[i - 1])
        if i % 4 == 0:
            t = t[1:] + t[:1]
            t = [SBOX[b] for b in t]
            t[0] ^= RCON[i // 4 - 1]
        words.append([a ^ b for a, b in zip(words[i - 4], t)])
    return RoundKeys(tuple(
        bytes(words[4 * r] + words[4 * r + 1] + words[4 * r + 2]
              + words[4 * r + 3]) for r in range(ROUNDS + 1)))


def _xor16(a, b):
    return bytes(x ^ y for x, y in zip(a, b))


def _mix_columns(s):
    out = bytearray(16)
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c], s[c + 1], s[c + 2], s[c + 3]
        out[c] = G2[a0] ^ G3[a1] ^ a2 ^ a3
        out[c + 1] = a0 ^ G2[a1] ^ G3[a2] ^ a3
        out[c + 2] = a0 ^ a1 ^ G2[a2] ^ G3[a3]
        out[c + 3] = G3[a0] ^ a1 ^ a2 ^ G2[a3]
    return bytes(out)


def _inv_mix_columns(s):
    out = bytearray(16)
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = s[c], s[c + 1], s[c + 2], s[c + 3]
        out[c] = G14[a0] ^ G11[a1] ^ G13[a2] ^ G9[a3]
        out[c + 1] = G9[a0] ^ G14[a1] ^ G11[a2] ^ G13[a3]
        out[c + 2] = G13[a0] ^ G9[a1] ^ G14[a2] ^ G11[a3]
        out[c + 3] = G11[a0] ^ G13[a1] ^ G9[a2] ^ G14[a3]
    return bytes(out)


def encrypt_block(block, perm, round_keys):
    """One 16-byte block under one 128-position permutation."""
    if len(block) != BLOCK_BYTES:
        raise DomainError(f"block must hold 16 bytes, got {len(block)}")
    rks = round_keys.keys
    s = _xor16(block, rks[0])
    s = apply_to_bits(perm, s)
    for rnd in range(1, ROUNDS):
        s = s.translate(SBOX)
        s = bytes(s[i] for i in SHIFT_IDX)
        s = _mix_columns(s)
        s = _xor16(s, rks[rnd])
    s = s.translate(SBOX)
    s = bytes(s[i] for i in SHIFT_IDX)
    return _xor16(s, rks[ROUNDS])


def decrypt_block(block, perm, round_keys):
    """Exact inverse of encrypt_block for the same permutation."""
    if len(block) != BLOCK_BYTES:
        raise DomainError(f"block must hold 16 bytes, got {len(block)}")
    rks = round_keys.keys
    s = _xor16(block, rks[ROUNDS])
    for rnd in range(ROUNDS - 1, 0, -1):
        s = bytes(s[i] for i in INV_SHIFT_IDX)
        s = s.translate(INV_SBOX)
        s = _xor16(s, rks[rnd])
        s = _inv_mix_columns(s)
    s = bytes(s[i] for i in INV_SHIFT_IDX)
    s = s.translate(INV_SBOX)
    s = apply_to_bits(invert(perm), s)
    return _xor16(s, rks[0])


# ---------------------------------------------------------------------------
# Vectorised payload path: one numpy array op per cipher step, every block of
# the payload at once.

_SBOX_NP = np.frombuffer(SBOX, dtype=np.uint8)
_INV_SBOX_NP = np.frombuffer(INV_SBOX, dtype=np.uint8)
_G2_NP = np.frombuffer(G2, dtype=np.uint8)
_G3_NP = np.frombuffer(G3, dtype=np.uint8)
_G9_NP = np.frombuffer(G9, dtype=np.uint8)
_G11_NP = np.frombuffer(G11, dtype=np.uint8)
_G13_NP = np.frombuffer(G13, dtype=np.uint8)
_G14_NP = np.frombuffer(G14, dtype=np.uint8)
_SHIFT_NP = np.array(SHIFT_IDX, dtype=np.intp)
_INV_SHIFT_NP = np.array(INV_SHIFT_IDX, dtype=np.intp)
_WINDOW_MODS = (BLOCK_BITS - np.arange(WINDOW_BYTES, dtype=np.int16))


def derive_permutation_matrix(stream, blocks):
    """Per-block permutations as a (blocks, 128) array.

    Row j is the selection sequence for the digits of window j; identical to
    running coefficients_from_bytes + permutation_from_coefficients per
    block, but the selection loop runs across all blocks at once.
    """
    if blocks < 1:
        raise DomainError(f"blocks must be positive, got {blocks}")
    if stream.count < required_byte_count(blocks):
        raise DomainError(
            f"stream of {stream.count} bytes cannot serve {blocks} blocks")
    raw = np.frombuffer(stream.data, dtype=np.uint8)
    wins = np.lib.stride_tricks.sliding_window_view(raw, WINDOW_BYTES)[:blocks]
    digits = np.empty((blocks, BLOCK_BITS), dtype=np.intp)
    digits[:, :WINDOW_BYTES] = wins.astype(np.int16) % _WINDOW_MODS
    digits[:, WINDOW_BYTES] = 0
    arrangement = np.tile(
        np.arange(BLOCK_BITS, dtype=np.uint8), (blocks, 1))
    rows = np.arange(blocks)
    perms = np.empty((blocks, BLOCK_BITS), dtype=np.uint8)
    for i in range(BLOCK_BITS):
        c = digits[:, i]
        perms[:, i] = arrangement[rows, c]
        arrangement[rows, c] = arrangement[:, BLOCK_BITS - 1 - i]
    return perms


def _permute_bits(state, perms):
    bits = np.unpackbits(state, axis=1)
    bits = np.take_along_axis(bits, perms, axis=1)
    return np.packbits(bits, axis=1)


def _encrypt_blocks(state, perms, rks):
    n = state.shape[0]
    state = state ^ rks[0]
    state = _permute_bits(state, perms)
    for rnd in range(1, ROUNDS):
        state = _SBOX_NP[state]
        state = state[:, _SHIFT_NP]
        cols = state.reshape(n, 4, 4)
        a0, a1, a2, a3 = (cols[:, :, i] for i in range(4))
        mixed = np.empty_like(cols)
        mixed[:, :, 0] = _G2_NP[a0] ^ _G3_NP[a1] ^ a2 ^ a3
        mixed[:, :, 1] = a0 ^ _G2_NP[a1] ^ _G3_NP[a2] ^ a3
        mixed[:, :, 2] = a0 ^ a1 ^ _G2_NP[a2] ^ _G3_NP[a3]
        mixed[:, :, 3] = _G3_NP[a0] ^ a1 ^ a2 ^ _G2_NP[a3]
        state = mixed.reshape(n, 16) ^ rks[rnd]
    state = _SBOX_NP[state]
    state = state[:, _SHIFT_NP]
    return state ^ rks[ROUNDS]


def _decrypt_blocks(state, perms, rks):
    n = state.shape[0]
    state = state ^ rks[ROUNDS]
    for rnd in range(ROUNDS - 1, 0, -1):
        state = state[:, _INV_SHIFT_NP]
        state = _INV_SBOX_NP[state]
        state = state ^ rks[rnd]
        cols = state.reshape(n, 4, 4)
        a0, a1, a2, a3 = (cols[:, :, i] for i in range(4))
        mixed = np.empty_like(cols)
        mixed[:, :, 0] = _G14_NP[a0] ^ _G11_NP[a1] ^ _G13_NP[a2] ^ _G9_NP[a3]
        mixed[:, :, 1] = _G9_NP[a0] ^ _G14_NP[a1] ^ _G11_NP[a2] ^ _G13_NP[a3]
        mixed[:, :, 2] = _G13_NP[a0] ^ _G9_NP[a1] ^ _G14_NP[a2] ^ _G11_NP[a3]
        mixed[:, :, 3] = _G11_NP[a0] ^ _G13_NP[a1] ^ _G9_NP[a2] ^ _G14_NP[a3]
        state = mixed.reshape(n, 16)
    state = state[:, _INV_SHIFT_NP]
    state = _INV_SBOX_NP[state]
    # inverse bit permutation: argsort of a permutation row is its inverse
    state = _permute_bits(state, np.argsort(perms, axis=1))
    return state ^ rks[0]


def _run_blocks(kernel, data, perms, round_keys, threads):
    blocks = len(data) // BLOCK_BYTES
    state = np.frombuffer(data, dtype=np.uint8).reshape(blocks, BLOCK_BYTES)
    rks = [np.frombuffer(k, dtype=np.uint8) for k in round_keys.keys]
    if threads <= 1 or blocks < 2 * threads:
        return kernel(state, perms, rks).tobytes()
    out = np.empty_like(state)
    step = -(-blocks // threads)
    spans = [(i, min(i + step, blocks)) for i in range(0, blocks, step)]

    def work(span):
        lo, hi = span
        out[lo:hi] = kernel(state[lo:hi], perms[lo:hi], rks)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, spans))
    return out.tobytes()


def _check_aligned(data):
    if len(data) % BLOCK_BYTES:
        raise DomainError(
            f"payload length {len(data)} is not a multiple of 16")


def encrypt_payload_with_stream(data, key, stream, *, threads=1):
    """Encrypt an aligned payload using an already-materialised stream."""
    _check_aligned(data)
    if not data:
        return b""
    blocks = len(data) // BLOCK_BYTES
    perms = derive_permutation_matrix(stream, blocks)
    return _run_blocks(_encrypt_blocks, data, perms, expand_key(key), threads)


def decrypt_payload_with_stream(data, key, stream, *, threads=1):
    _check_aligned(data)
    if not data:
        return b""
    blocks = len(data) // BLOCK_BYTES
    perms = derive_permutation_matrix(stream, blocks)
    return _run_blocks(_decrypt_blocks, data, perms, expand_key(key), threads)


def _stream_for(key, blocks):
    return pi_fraction_bytes(key_to_integer(key), required_byte_count(blocks))


def encrypt_payload(data, key, *, threads=1):
    """Encrypt a 16-byte-aligned payload; block j gets the permutation of
    keystream window j. Output length equals input length."""
    _check_aligned(data)
    if not data:
        return b""
    stream = _stream_for(key, len(data) // BLOCK_BYTES)
    return encrypt_payload_with_stream(data, key, stream, threads=threads)


def decrypt_payload(data, key, *, threads=1):
    _check_aligned(data)
    if not data:
        return b""
    stream = _stream_for(key, len(data) // BLOCK_BYTES)
    return decrypt_payload_with_stream(data, key, stream, threads=threads)
