"""Deterministic random streams for the rollout simulator.

Every random draw in the simulator flows through :class:`DeterministicStream`,
a thin layer over the counter-based Philox4x64-10 bit generator.  The raw
64-bit stream is fixed by the Philox algorithm and by numpy's SeedSequence
construction, and the float derivations below are spelled out explicitly, so
a trace is a pure function of ``(seed, labels, draw order)``:

- uniforms take the top 53 bits of each word: ``u = (x >> 11) * 2**-53``
- normals are Box-Muller pairs: ``sqrt(-2 ln u1) * (cos, sin)(2 pi u2)``

``STREAM_VERSION`` names this derivation; bump it if any of the above
changes so old golden traces are not silently invalidated.
"""

from __future__ import annotations

import numpy as np

STREAM_VERSION = "philox4x64-10/boxmuller-1"

_INV_2_53 = 2.0 ** -53


class DeterministicStream:
    """Seeded, labeled random stream.

    ``labels`` select independent substreams of the same seed (for example
    ``("signatures",)`` vs ``("values",)``) via SeedSequence entropy mixing.
    String labels are folded to integers by a fixed byte encoding.
    """

    def __init__(self, seed: int, *labels: int | str):
        entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
        for label in labels:
            if isinstance(label, str):
                entropy.append(int.from_bytes(label.encode("utf-8"), "little") & 0xFFFFFFFFFFFFFFFF)
            else:
                entropy.append(int(label) & 0xFFFFFFFFFFFFFFFF)
        self._bits = np.random.Philox(np.random.SeedSequence(entropy))

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1)."""
        raw = self._bits.random_raw(n)
        return (raw >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def normals(self, shape: tuple[int, ...] | int) -> np.ndarray:
        """Standard normal draws via Box-Muller on uniform pairs."""
        if isinstance(shape, int):
            shape = (shape,)
        n = int(np.prod(shape)) if shape else 1
        half = (n + 1) // 2
        # 1 - u keeps the log argument in (0, 1], avoiding log(0)
        u1 = 1.0 - self.uniforms(half)
        u2 = self.uniforms(half)
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:n]
        return z.reshape(shape)

    def unit_vector(self, dim: int) -> np.ndarray:
        """One uniformly random direction on the unit sphere."""
        v = self.normals(dim)
        norm = float(np.linalg.norm(v))
        while norm == 0.0:  # probability ~0, but keep the contract total
            v = self.normals(dim)
            norm = float(np.linalg.norm(v))
        return v / norm
