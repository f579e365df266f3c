"""
Coding and decoding a file with random chunk combinations
=========================================================

The server never hands out file pieces directly. It splits the file into k
chunks, then serves random GF(2^8) combinations of all of them; any k
independent combinations reconstruct the file exactly.
"""

import random

from fountainswarm import Decoder, draw_coefficients, encode, split_file

rng = random.Random(7)

# split a payload into k = 4 chunks (padded to equal length)
payload = b"the quick brown fox jumps over the lazy dog"
k = 4
src = split_file(payload, k)
print(f"payload {len(payload)} bytes -> {k} chunks of {src.chunk_len} bytes")

# draw random coded chunks until the decoder reaches full rank. Each chunk
# carries its coefficient vector; dependent draws simply do not raise the
# rank and are thrown away.
dec = Decoder(k)
drawn = 0
while dec.rank < k:
    chunk = encode(src, draw_coefficients(k, rng))
    before = dec.rank
    dec.absorb(chunk)
    drawn += 1
    tag = "innovative" if dec.rank > before else "dependent, discarded"
    print(f"  chunk {drawn}: coeffs {list(chunk.coeffs)} -> rank {dec.rank} ({tag})")

# with 255 usable coefficients per position, k draws almost always suffice
out = dec.decode()
assert out[: len(payload)] == payload
print(f"decoded {drawn} draws later: {out[: len(payload)]!r}")
