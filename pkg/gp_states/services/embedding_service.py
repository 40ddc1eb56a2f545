"""Geometric progression embeddings, word factorization and automorphisms of O_n."""

import logging
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag

from ..exceptions import DimensionError, IndexOutOfRangeError, NoEmbeddingError, NonUnitaryError, UsageError
from ..models.embedding import Factorization, GpEmbedding
from ..models.settings import SystemSettings
from ..models.words import EMPTY, Monomial, MultiIndex, NcPolynomial, poly_mul

logger = logging.getLogger(__name__)

WordLike = Union[MultiIndex, Sequence[int]]


def _as_index(word: WordLike) -> MultiIndex:
    return word if isinstance(word, MultiIndex) else MultiIndex(tuple(word))


@lru_cache(maxsize=65536)
def _factorize(n: int, order: Optional[int], letters: Tuple[int, ...]) -> Tuple[Tuple[int, ...], int]:
    """Greedy left-to-right parse of s_J into t_hatJ s_n^a."""
    hat_j: List[int] = []
    run = 0
    m = None if order is None else (n - 1) * order + 1
    for letter in letters:
        if letter == n:
            run += 1
            continue
        if order is None:
            hat_j.append((n - 1) * run + letter)
        else:
            full, rest = divmod(run, order)
            hat_j.extend([m] * full)
            hat_j.append((n - 1) * rest + letter)
        run = 0
    if order is None:
        return tuple(hat_j), run
    full, tail = divmod(run, order)
    hat_j.extend([m] * full)
    return tuple(hat_j), tail


class EmbeddingService:
    """Generator images, factorization and automorphisms for GP embeddings."""

    def __init__(self, settings: SystemSettings):
        self.settings = settings
        self.tolerances = settings.tolerances

    # Embeddings

    @staticmethod
    def validate_embedding(n: int, m: int) -> int:
        """Return the order k with m = (n-1)k + 1.

        Raises:
            NoEmbeddingError: when (n - 1) does not divide (m - 1)
        """
        if n < 2 or m < 2:
            raise UsageError(f"Cuntz algebras need at least two generators, got n={n}, m={m}")
        k, remainder = divmod(m - 1, n - 1)
        if remainder:
            raise NoEmbeddingError(f"No unital embedding of O_{m} into O_{n}: {n - 1} does not divide {m - 1}")
        return k

    def generator_image(self, embedding: GpEmbedding, j: int) -> Monomial:
        """f(t_j): s_n^r s_i for j = (n-1)r + i with i < n, and s_n^k for j = m."""
        return Monomial(self.image_word(embedding, j), EMPTY, embedding.n)

    def image_word(self, embedding: GpEmbedding, j: int) -> MultiIndex:
        n = embedding.n
        if j < 1 or (embedding.is_finite and j > embedding.m):
            raise IndexOutOfRangeError(f"Generator t_{j} does not exist for {embedding.describe()}")
        if embedding.is_finite and j == embedding.m:
            return MultiIndex.power(n, embedding.order)
        r, i = divmod(j - 1, n - 1)
        return MultiIndex((n,) * r + (i + 1,))

    def generator_images(self, embedding: GpEmbedding, count: Optional[int] = None) -> List[Monomial]:
        """Images of t_1..t_m; infinite order needs an explicit count."""
        if count is None:
            if not embedding.is_finite:
                raise UsageError("Infinite-order embeddings need an explicit image count")
            count = embedding.m
        return [self.generator_image(embedding, j) for j in range(1, count + 1)]

    def factorize_word(self, embedding: GpEmbedding, word: WordLike) -> Factorization:
        """The unique (hat J, a) with s_J = t_hatJ s_n^a; finite order keeps a < k."""
        index = _as_index(word)
        index.validate(embedding.n)
        hat_j, tail = _factorize(embedding.n, embedding.order, index.letters)
        return Factorization(hat_j=hat_j, tail=tail)

    def expand_word(self, embedding: GpEmbedding, hat_j: WordLike) -> MultiIndex:
        """The word of f(t_hatJ); images are isometries so products concatenate."""
        letters: Tuple[int, ...] = ()
        for j in _as_index(hat_j):
            letters += self.image_word(embedding, j).letters
        return MultiIndex(letters)

    def expand_monomial(self, embedding: GpEmbedding, monomial: Monomial) -> Monomial:
        return Monomial(
            self.expand_word(embedding, monomial.left),
            self.expand_word(embedding, monomial.right),
            embedding.n,
        )

    def expand_poly(self, embedding: GpEmbedding, p: NcPolynomial) -> NcPolynomial:
        """*-homomorphic extension of the generator images to a polynomial over O_m."""
        if p.n != embedding.m:
            raise UsageError(f"Polynomial lives in O_{p.n}, embedding source is O_{embedding.m or 'inf'}")
        terms: Dict[Monomial, complex] = {}
        for monomial, coeff in p.items():
            image = self.expand_monomial(embedding, monomial)
            terms[image] = terms.get(image, 0j) + coeff
        return NcPolynomial(embedding.n, terms, p.prune)

    def generating_polynomial(self, images: Sequence[Monomial], z: Sequence[complex], n: int) -> NcPolynomial:
        """t(z) = sum_j z_j f(t_j) for an image family."""
        if len(images) != len(z):
            raise DimensionError(f"{len(images)} images but {len(z)} coefficients")
        return NcPolynomial.linear_combination(z, images, n, self.tolerances.prune_threshold)

    # Sub-Cuntz index coding

    @staticmethod
    def subcuntz_index(n: int, m: int, word: WordLike) -> int:
        """i = sum_r (j_r - 1) n^(m-r) + 1, the row-major position of e_J in (C^n)^(tensor m).

        Raises:
            DimensionError: when the word does not have length m
        """
        index = _as_index(word)
        if len(index) != m:
            raise DimensionError(f"Sub-Cuntz words of order {m} have length {m}, got {len(index)}")
        index.validate(n)
        value = 0
        for letter in index:
            value = value * n + (letter - 1)
        return value + 1

    @staticmethod
    def subcuntz_word(n: int, m: int, i: int) -> MultiIndex:
        """Inverse of subcuntz_index on {1..n^m}."""
        if not 1 <= i <= n ** m:
            raise IndexOutOfRangeError(f"Index {i} outside 1..{n ** m}")
        digits = []
        rest = i - 1
        for _ in range(m):
            rest, digit = divmod(rest, n)
            digits.append(digit + 1)
        return MultiIndex(tuple(reversed(digits)))

    def subcuntz_images(self, n: int, order: int) -> List[Monomial]:
        """f(t_i) = s_J(i) for the sub-Cuntz embedding of O_{n^order} into O_n."""
        if order < 1:
            raise UsageError(f"Sub-Cuntz order must be positive, got {order}")
        return [Monomial(self.subcuntz_word(n, order, i), EMPTY, n) for i in range(1, n ** order + 1)]

    # Automorphisms

    @staticmethod
    def _flip_index(n: int, index: MultiIndex) -> MultiIndex:
        return MultiIndex(tuple(n - letter + 1 for letter in index))

    def flip_monomial(self, n: int, monomial: Monomial) -> Monomial:
        if monomial.n != n:
            raise UsageError(f"Monomial lives in O_{monomial.n}, not O_{n}")
        return Monomial(self._flip_index(n, monomial.left), self._flip_index(n, monomial.right), n)

    def flip_automorphism(self, n: int, p: NcPolynomial) -> NcPolynomial:
        """alpha(s_i) = s_{n-i+1} applied letter-wise."""
        if p.n != n:
            raise UsageError(f"Polynomial lives in O_{p.n}, not O_{n}")
        return NcPolynomial(n, {self.flip_monomial(n, mono): c for mono, c in p.items()}, p.prune)

    def flipped_generator_images(self, n: int) -> List[Monomial]:
        """f' = alpha o f o beta for the order-2 GP embedding, beta(t_j) = t_{2n-j}."""
        embedding = GpEmbedding(n=n, order=2)
        return [
            self.flip_monomial(n, self.generator_image(embedding, 2 * n - j))
            for j in range(1, 2 * n)
        ]

    def check_unitary(self, g, size: Optional[int] = None) -> np.ndarray:
        """Return g as a complex array after checking g*g = I within the unitarity tolerance."""
        matrix = np.asarray(g, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"Expected a square matrix, got shape {matrix.shape}")
        if size is not None and matrix.shape[0] != size:
            raise DimensionError(f"Expected a {size}x{size} unitary, got {matrix.shape[0]}x{matrix.shape[1]}")
        defect = float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))
        if defect > self.tolerances.unitarity:
            raise NonUnitaryError(f"Matrix is not unitary: max |g*g - I| = {defect:.3e}")
        return matrix

    def embed_unitary(self, g, n: int) -> np.ndarray:
        """Block embedding U(n-1) -> U(n) fixing the last basis vector."""
        matrix = self.check_unitary(g, n - 1)
        return block_diag(matrix, np.ones((1, 1), dtype=complex))

    def gauge_automorphism(self, g, p: NcPolynomial) -> NcPolynomial:
        """alpha_g(s_i) = sum_j g_{ji} s_j extended multiplicatively and *-preservingly."""
        n = p.n
        if n is None:
            raise UsageError("Gauge automorphisms act on O_n with finite n")
        matrix = self.check_unitary(g, n)
        prune = p.prune
        images = [
            NcPolynomial(n, {Monomial.generator(j + 1, n): matrix[j, i] for j in range(n)}, prune)
            for i in range(n)
        ]
        word_cache: Dict[Tuple[int, ...], NcPolynomial] = {(): NcPolynomial.unit(n, prune=prune)}

        def image_of(letters: Tuple[int, ...]) -> NcPolynomial:
            if letters not in word_cache:
                word_cache[letters] = poly_mul(image_of(letters[:-1]), images[letters[-1] - 1])
            return word_cache[letters]

        result = NcPolynomial.zero(n, prune)
        for monomial, coeff in p.items():
            left = image_of(monomial.left.letters)
            right = image_of(monomial.right.letters).adjoint()
            result = result + poly_mul(left, right).scale(coeff)
        return result

    def is_isometry_family(self, images: Sequence[Monomial]) -> bool:
        """t_i* t_j = delta_ij I for every pair of images."""
        for i, ti in enumerate(images):
            for j, tj in enumerate(images):
                product = ti.adjoint() * tj
                if i == j and (product is None or not product.is_unit):
                    return False
                if i != j and product is not None:
                    return False
        return True
