#!/usr/bin/env python3
"""Regenerate known-answer vectors for the philox4x64-10 counter-based
generator from numpy's independent implementation.

Convention used by the library: a stream is keyed by key = (seed, stream
index); block b of a stream is the four-word output of the keyed bijection
applied to counter (b, 0, 0, 0). numpy pre-increments its 256-bit counter,
so numpy raw words [4k .. 4k+3] equal block k+1 of the same key.

Output: tests/data/philox_kat.inc
"""
import os

import numpy as np

CASES = [
    # (seed, stream, first block index, number of blocks)
    (0, 0, 1, 4),
    (1, 0, 1, 2),
    (0, 1, 1, 2),
    (0xDEADBEEF, 0xFACE, 1, 2),
    (2**64 - 1, 2**64 - 1, 1, 2),
    (0x0123456789ABCDEF, 42, 1, 2),
    # exercise high counter bits via an explicitly positioned counter
    (12345, 6789, 2**40, 2),
    (12345, 6789, 2**63, 1),
]


def main():
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "data",
                       "philox_kat.inc")
    rows = []
    for seed, stream, first_block, nblocks in CASES:
        key = seed + (stream << 64)
        bg = np.random.Philox(counter=first_block - 1, key=key)
        raw = bg.random_raw(4 * nblocks)
        for b in range(nblocks):
            words = [int(raw[4 * b + i]) for i in range(4)]
            rows.append((seed, stream, first_block + b, words))
    with open(out, "w") as f:
        f.write("// philox4x64-10 known-answer vectors (numpy reference).\n")
        f.write("// Generated by tools/gen_philox_reference.py.\n")
        f.write("inline constexpr struct {\n")
        f.write("    std::uint64_t seed, stream, block, out[4];\n")
        f.write("} kPhiloxKat[] = {\n")
        for seed, stream, block, words in rows:
            w = ", ".join(f"0x{v:016x}ull" for v in words)
            f.write(f"    {{0x{seed:016x}ull, 0x{stream:016x}ull, "
                    f"0x{block:016x}ull, {{{w}}}}},\n")
        f.write("};\n")
    print(f"wrote {out}: {len(rows)} vectors")


if __name__ == "__main__":
    main()
