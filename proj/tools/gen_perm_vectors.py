#!/usr/bin/env python3
"""Reference generator for the keyed permutation test vectors.

Independent of the C++ code: SHA-256 from hashlib, ChaCha20 from the
`cryptography` package. Output lines: size, key-hex, block_index, map...
"""
import hashlib
import sys

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

MASK64 = (1 << 64) - 1


class Stream:
    def __init__(self, key: bytes, block_index: int):
        chacha_key = hashlib.sha256(key + block_index.to_bytes(8, "big")).digest()
        # cryptography's 16-byte nonce = 4-byte LE counter || 12-byte IETF nonce
        nonce = (0).to_bytes(4, "little") + bytes(12)
        self._enc = Cipher(algorithms.ChaCha20(chacha_key, nonce), mode=None).encryptor()

    def u64(self) -> int:
        return int.from_bytes(self._enc.update(bytes(8)), "little")

    def below(self, bound: int) -> int:
        rem = (1 << 64) % bound
        limit = MASK64 - rem
        while True:
            r = self.u64()
            if r <= limit:
                return r % bound


def derive(key: bytes, block_index: int, size: int):
    m = list(range(size))
    s = Stream(key, block_index)
    for i in range(size - 1, 0, -1):
        j = s.below(i + 1)
        m[i], m[j] = m[j], m[i]
    return m


CASES = [
    (1, "000102030405060708090a0b0c0d0e0f", 0),
    (2, "000102030405060708090a0b0c0d0e0f", 0),
    (6, "000102030405060708090a0b0c0d0e0f", 0),
    (6, "000102030405060708090a0b0c0d0e0f", 1),
    (8, "00112233445566778899aabbccddeeff", 7),
    (16, "ffffffffffffffffffffffffffffffff", 0),
    (16, "fffffffffffffffffffffffffffffffe", 0),
    (64, "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", 3),
    (256, "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", 0),
    (256, "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", 18446744073709551615),
]


def main():
    out = sys.stdout
    out.write("# size, key-hex, block_index, map (comma-separated)\n")
    for size, key_hex, idx in CASES:
        m = derive(bytes.fromhex(key_hex), idx, size)
        out.write(f"{size}, {key_hex}, {idx}, " + ",".join(map(str, m)) + "\n")


if __name__ == "__main__":
    main()
