"""GP embeddings, word factorization and automorphisms."""

import itertools

import numpy as np
import pytest

from gp_states.exceptions import DimensionError, IndexOutOfRangeError, NoEmbeddingError, NonUnitaryError
from gp_states.models.embedding import GpEmbedding
from gp_states.models.words import Monomial, MultiIndex, NcPolynomial, polynomials_equal, words_of_length

from .conftest import random_unitary


def word(*letters, n=2):
    return Monomial.word(letters, n)


class TestValidateEmbedding:
    def test_order_two(self, embeddings):
        assert embeddings.validate_embedding(2, 3) == 2

    def test_identity(self, embeddings):
        assert embeddings.validate_embedding(2, 2) == 1

    def test_no_embedding(self, embeddings):
        with pytest.raises(NoEmbeddingError):
            embeddings.validate_embedding(3, 4)


class TestGeneratorImages:
    def test_order_two_images(self, embeddings):
        images = embeddings.generator_images(GpEmbedding(n=2, order=2))
        assert images == [word(1), word(2, 1), word(2, 2)]

    def test_infinite_order(self, embeddings):
        embedding = GpEmbedding(n=2, order="infinite")
        assert embedding.m is None
        for r in range(6):
            assert embeddings.generator_image(embedding, r + 1) == word(*((2,) * r + (1,)))

    def test_last_generator(self, embeddings):
        assert embeddings.generator_image(GpEmbedding(n=3, order=2), 5) == word(3, 3, n=3)

    def test_out_of_range(self, embeddings):
        with pytest.raises(IndexOutOfRangeError):
            embeddings.generator_image(GpEmbedding(n=2, order=2), 4)

    @pytest.mark.parametrize("n,order", [(2, 1), (2, 3), (3, 2), (4, 3)])
    def test_images_are_isometries(self, embeddings, n, order):
        images = embeddings.generator_images(GpEmbedding(n=n, order=order))
        assert embeddings.is_isometry_family(images)

    def test_order_one_is_identity(self, embeddings):
        images = embeddings.generator_images(GpEmbedding(n=3, order=1))
        assert images == [Monomial.generator(i, 3) for i in range(1, 4)]


class TestFactorization:
    def test_two_one(self, embeddings):
        factorization = embeddings.factorize_word(GpEmbedding(n=2, order=2), (2, 1))
        assert factorization.hat_j == (2,)
        assert factorization.tail == 0

    def test_trailing_run(self, embeddings):
        factorization = embeddings.factorize_word(GpEmbedding(n=2, order=2), (2, 2, 2))
        assert factorization.hat_j == (3,)
        assert factorization.tail == 1

    def test_empty_word(self, embeddings):
        factorization = embeddings.factorize_word(GpEmbedding(n=2, order=3), ())
        assert factorization.hat_j == ()
        assert factorization.tail == 0

    def test_middle_run_split(self, embeddings):
        # s_2^5 s_1 = t_3^2 t_2 for order 2
        factorization = embeddings.factorize_word(GpEmbedding(n=2, order=2), (2, 2, 2, 2, 2, 1))
        assert factorization.hat_j == (3, 3, 2)
        assert factorization.tail == 0

    def test_infinite_order_keeps_tail(self, embeddings):
        factorization = embeddings.factorize_word(GpEmbedding(n=3, order=None), (3, 2, 3, 3, 3))
        assert factorization.hat_j == (4,)
        assert factorization.tail == 3

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("order", [2, 3, None])
    def test_round_trip_exhaustive(self, embeddings, n, order):
        embedding = GpEmbedding(n=n, order=order)
        for length in range(9):
            for letters in words_of_length(n, length):
                factorization = embeddings.factorize_word(embedding, letters)
                expanded = embeddings.expand_word(embedding, factorization.hat_j).letters + (n,) * factorization.tail
                assert expanded == letters.letters
                if order is not None:
                    assert factorization.tail < order
                assert embeddings.factorize_word(embedding, MultiIndex(expanded)) == factorization


class TestExpandPoly:
    def test_generating_polynomial(self, embeddings):
        embedding = GpEmbedding(n=2, order=2)
        z = (0.3, 0.4j, 0.5)
        source = NcPolynomial.linear_combination(z, [Monomial.generator(j, 3) for j in (1, 2, 3)], 3)
        expected = NcPolynomial(2, {word(1): 0.3, word(2, 1): 0.4j, word(2, 2): 0.5})
        assert polynomials_equal(embeddings.expand_poly(embedding, source), expected, 1e-15)

    def test_unit(self, embeddings):
        embedding = GpEmbedding(n=2, order=2)
        assert polynomials_equal(embeddings.expand_poly(embedding, NcPolynomial.unit(3)), NcPolynomial.unit(2), 1e-15)

    def test_homomorphism(self, embeddings, rng):
        embedding = GpEmbedding(n=3, order=2)
        monomials = [Monomial(j, k, 5) for j, k in itertools.product([(), (1,), (5,), (2, 4)], repeat=2)]
        def random_poly():
            picks = rng.choice(len(monomials), size=3, replace=False)
            coeffs = rng.normal(size=3) + 1j * rng.normal(size=3)
            return NcPolynomial(5, {monomials[int(i)]: c for i, c in zip(picks, coeffs)})

        for _ in range(20):
            p, q = random_poly(), random_poly()
            lhs = embeddings.expand_poly(embedding, p * q)
            rhs = embeddings.expand_poly(embedding, p) * embeddings.expand_poly(embedding, q)
            assert polynomials_equal(lhs, rhs, 1e-12)
            assert polynomials_equal(embeddings.expand_poly(embedding, p.adjoint()), embeddings.expand_poly(embedding, p).adjoint(), 1e-12)

    def test_generating_polynomial_is_isometry(self, embeddings, rng):
        embedding = GpEmbedding(n=2, order=3)
        images = embeddings.generator_images(embedding)
        z = rng.normal(size=len(images)) + 1j * rng.normal(size=len(images))
        z /= np.linalg.norm(z)
        t = embeddings.generating_polynomial(images, z, 2)
        assert polynomials_equal(t.adjoint() * t, NcPolynomial.unit(2), 1e-12)


class TestSubCuntz:
    def test_order_two_listing(self, embeddings):
        listing = [embeddings.subcuntz_word(2, 2, i).letters for i in range(1, 5)]
        assert listing == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_order_one(self, embeddings):
        assert embeddings.subcuntz_index(2, 1, (1,)) == 1
        assert embeddings.subcuntz_index(2, 1, (2,)) == 2

    def test_bijection(self, embeddings):
        for letters in words_of_length(3, 3):
            assert embeddings.subcuntz_word(3, 3, embeddings.subcuntz_index(3, 3, letters)) == letters

    def test_images_are_isometries(self, embeddings):
        assert embeddings.is_isometry_family(embeddings.subcuntz_images(2, 3))

    def test_index_out_of_range(self, embeddings):
        with pytest.raises(IndexOutOfRangeError):
            embeddings.subcuntz_word(2, 2, 5)

    def test_wrong_word_length(self, embeddings):
        with pytest.raises(DimensionError):
            embeddings.subcuntz_index(2, 3, (1, 2))
        with pytest.raises(DimensionError):
            embeddings.subcuntz_index(3, 1, (1, 1))


class TestFlip:
    def test_swaps_generators(self, embeddings):
        flipped = embeddings.flip_automorphism(2, NcPolynomial.from_monomial(word(1)))
        assert flipped.coefficient(word(2)) == 1

    def test_involution(self, embeddings):
        p = NcPolynomial(3, {Monomial((1, 3), (2,), 3): 1 + 1j, Monomial((2,), (), 3): 0.5})
        assert polynomials_equal(embeddings.flip_automorphism(3, embeddings.flip_automorphism(3, p)), p, 1e-15)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_flipped_images(self, embeddings, n):
        images = embeddings.flipped_generator_images(n)
        expected = [word(1, i, n=n) for i in range(1, n + 1)] + [word(i, n=n) for i in range(2, n + 1)]
        assert images == expected
        assert embeddings.is_isometry_family(images)


class TestGauge:
    def test_identity(self, embeddings):
        p = NcPolynomial(2, {Monomial((1, 2), (1,), 2): 2.0})
        assert polynomials_equal(embeddings.gauge_automorphism(np.eye(2), p), p, 1e-15)

    def test_diagonal_phase(self, embeddings):
        phase = np.exp(0.7j)
        moved = embeddings.gauge_automorphism(np.diag([phase, 1.0]), NcPolynomial.from_monomial(word(1)))
        assert moved.coefficient(word(1)) == pytest.approx(phase)

    def test_fixes_last_generator(self, embeddings, rng):
        g = embeddings.embed_unitary(random_unitary(rng, 2), 3)
        moved = embeddings.gauge_automorphism(g, NcPolynomial.from_monomial(Monomial.generator(3, 3)))
        assert polynomials_equal(moved, NcPolynomial.from_monomial(Monomial.generator(3, 3)), 1e-12)

    def test_images_stay_orthonormal(self, embeddings, rng):
        n = 3
        g = random_unitary(rng, n)
        images = [embeddings.gauge_automorphism(g, NcPolynomial.from_monomial(Monomial.generator(i, n))) for i in range(1, n + 1)]
        for i, j in itertools.product(range(n), repeat=2):
            expected = NcPolynomial.unit(n) if i == j else NcPolynomial.zero(n)
            assert polynomials_equal(images[i].adjoint() * images[j], expected, 1e-9)

    def test_composition(self, embeddings, rng):
        g, h = random_unitary(rng, 2), random_unitary(rng, 2)
        p = NcPolynomial(2, {Monomial((1, 2), (2,), 2): 1.0, Monomial((2,), (), 2): 1j})
        lhs = embeddings.gauge_automorphism(g, embeddings.gauge_automorphism(h, p))
        rhs = embeddings.gauge_automorphism(g @ h, p)
        assert polynomials_equal(lhs, rhs, 1e-9)

    def test_rejects_non_unitary(self, embeddings):
        with pytest.raises(NonUnitaryError):
            embeddings.gauge_automorphism(np.array([[1.0, 1.0], [0.0, 1.0]]), NcPolynomial.unit(2))
