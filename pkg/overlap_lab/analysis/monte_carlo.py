"""
Monte Carlo Replica Harness

This module runs replicated experiments reproducibly:
- Fixed-size replica blocks, each drawing from its own RngStream
- Optional thread pool; results gathered in block order so output does not
  depend on the thread count
- Moment accumulation merged block by block
- Per-replica spectrum sampling for the matrix-level suites
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, List, Tuple

import numpy as np

from ..errors import ParameterError
from ..linalg import Spectrum, eigenvalues_batch
from ..sampling.ensembles import EnsembleSpec, sample_matrix
from ..sampling.rng import RngStream
from .statistical_analysis import MomentAccumulator

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_SIZE = 1000
# Matrices per batched eigenvalue solve
SPECTRA_CHUNK = 250

BlockFunc = Callable[[RngStream, int], np.ndarray]


class ReplicaRunner:
    """
    Reproducible Monte Carlo runner.

    Block b covers replicas [b*block_size, (b+1)*block_size) and draws from
    RngStream(seed, b, (channel,)). The channel separates independent
    quantities within one experiment.
    """

    def __init__(self, seed: int, threads: int = 1, block_size: int = DEFAULT_BLOCK_SIZE):
        """
        Initialize replica runner.

        Args:
            seed: Master seed
            threads: Worker threads (1 runs inline)
            block_size: Replicas per block; part of the reproducibility key
        """
        if int(threads) < 1:
            raise ParameterError(f"threads must be >= 1, got {threads}")
        if int(block_size) < 1:
            raise ParameterError(f"block_size must be >= 1, got {block_size}")
        self._seed = int(seed)
        self._threads = int(threads)
        self._block_size = int(block_size)

    @property
    def seed(self) -> int:
        """Get master seed."""
        return self._seed

    @property
    def threads(self) -> int:
        """Get worker thread count."""
        return self._threads

    @property
    def block_size(self) -> int:
        """Get replicas per block."""
        return self._block_size

    def blocks(self, replicas: int) -> List[Tuple[int, int]]:
        """
        Split replicas into (block_index, count) pairs.

        Args:
            replicas: Total replica count

        Returns:
            Blocks in order; the last may be short
        """
        if int(replicas) < 1:
            raise ParameterError(f"replicas must be >= 1, got {replicas}")
        replicas = int(replicas)
        return [(b, min(self._block_size, replicas - start))
                for b, start in enumerate(range(0, replicas, self._block_size))]

    def stream(self, index: int, channel: int = 0) -> RngStream:
        """Stream for block (or replica) `index` on `channel`."""
        return RngStream(self._seed, index, (channel,))

    def _map(self, func: Callable[[Any], Any], tasks: List[Any]) -> List[Any]:
        if self._threads == 1 or len(tasks) == 1:
            return [func(task) for task in tasks]
        with ThreadPoolExecutor(max_workers=self._threads) as pool:
            # map yields in submission order
            return list(pool.map(func, tasks))

    def run_blocks(self, func: BlockFunc, replicas: int, channel: int = 0) -> np.ndarray:
        """
        Evaluate func(rng, count) on every block and concatenate along axis 0.

        Args:
            func: Draws `count` replicas from `rng`, returning an array of leading size count
            replicas: Total replica count
            channel: Stream channel

        Returns:
            Concatenated results in replica order
        """
        blocks = self.blocks(replicas)
        logger.debug(f"Running {replicas} replicas in {len(blocks)} blocks on {self._threads} threads")
        results = self._map(lambda block: np.asarray(func(self.stream(block[0], channel), block[1])),
                            blocks)
        return np.concatenate(results, axis=0)

    def accumulate(self, func: BlockFunc, replicas: int, channel: int = 0,
                   is_complex: bool = False, keep_values: bool = False) -> MomentAccumulator:
        """
        Moments of func's outputs, merged block by block in block order.

        Returns:
            MomentAccumulator over all replicas
        """
        def run(block: Tuple[int, int]) -> MomentAccumulator:
            acc = MomentAccumulator(is_complex, keep_values)
            acc.add_many(func(self.stream(block[0], channel), block[1]))
            return acc

        total = MomentAccumulator(is_complex, keep_values)
        for acc in self._map(run, self.blocks(replicas)):
            total.merge(acc)
        return total

    def map_replicas(self, func: Callable[[RngStream], Any], replicas: int, channel: int = 0) -> List[Any]:
        """
        Evaluate func once per replica; replica r draws from stream(r, channel).

        Returns:
            Results in replica order
        """
        if int(replicas) < 1:
            raise ParameterError(f"replicas must be >= 1, got {replicas}")
        return self._map(lambda r: func(self.stream(r, channel)), list(range(int(replicas))))

    def sample_spectra(self, spec: EnsembleSpec, replicas: int, channel: int = 0) -> List[Spectrum]:
        """
        Eigenvalues of `replicas` direct matrix draws.

        Replica r draws its matrix from stream(r, channel). The matrices of a
        block are solved together in chunks of SPECTRA_CHUNK, so spectra
        depend on block_size only through rounding.

        Returns:
            Spectra in replica order
        """
        def run(block: Tuple[int, int]) -> List[Spectrum]:
            index, count = block
            start = index * self._block_size
            spectra = []
            for offset in range(0, count, SPECTRA_CHUNK):
                chunk = range(start + offset, start + min(count, offset + SPECTRA_CHUNK))
                stack = np.stack([sample_matrix(spec, self.stream(r, channel)) for r in chunk])
                spectra.extend(Spectrum(values) for values in eigenvalues_batch(stack))
            return spectra

        return [s for part in self._map(run, self.blocks(replicas)) for s in part]
