import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmfsep.cmf import (
    CmfResult,
    SplitQuad,
    assemble_hc,
    assemble_zc,
    block_product_identity_check,
    cmf_factorize,
    merge_quad,
    split_complex,
    symmetrize_h,
)
from cmfsep.config import SepConfig
from cmfsep.linalg import frobenius_norm_sq


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestSplitMerge:
    def test_split_examples(self):
        q = split_complex([[3 - 4j]])
        assert (q.pr[0, 0], q.nr[0, 0], q.pi[0, 0], q.ni[0, 0]) == (3, 0, 0, 4)
        q = split_complex([[-2 + 5j]])
        assert (q.pr[0, 0], q.nr[0, 0], q.pi[0, 0], q.ni[0, 0]) == (0, 2, 5, 0)
        q = split_complex([[0j]])
        assert (q.pr[0, 0], q.nr[0, 0], q.pi[0, 0], q.ni[0, 0]) == (0, 0, 0, 0)

    def test_merge_examples(self):
        q = SplitQuad(
            pr=np.array([[3.0]]), nr=np.array([[0.0]]),
            pi=np.array([[0.0]]), ni=np.array([[4.0]]),
        )
        assert merge_quad(q)[0, 0] == 3 - 4j
        q = SplitQuad(
            pr=np.array([[1.0]]), nr=np.array([[1.0]]),
            pi=np.array([[0.0]]), ni=np.array([[0.0]]),
        )
        assert merge_quad(q)[0, 0] == 0

    @given(st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_round_trip_exact(self, seed):
        rng = np.random.default_rng(seed)
        shape = (int(rng.integers(1, 33)), int(rng.integers(1, 33)))
        z = random_complex(rng, shape)
        assert np.array_equal(merge_quad(split_complex(z)), z)

    @given(st.integers(0, 10_000))
    @settings(max_examples=100, deadline=None)
    def test_complementarity(self, seed):
        rng = np.random.default_rng(seed)
        q = split_complex(random_complex(rng, (8, 8)))
        assert np.all(q.pr * q.nr == 0)
        assert np.all(q.pi * q.ni == 0)


class TestBlockAssembly:
    def test_assemble_zc_scalar(self):
        bm = assemble_zc(split_complex([[3 - 4j]]))
        assert np.array_equal(bm.assembled, [[3, 0], [0, 4]])

    def test_assemble_zc_blocks_match_split(self):
        rng = np.random.default_rng(20)
        q = split_complex(random_complex(rng, (2, 3)))
        a = assemble_zc(q).assembled
        assert a.shape == (4, 6)
        assert np.array_equal(a[:2, :3], q.pr)
        assert np.array_equal(a[:2, 3:], q.nr)
        assert np.array_equal(a[2:, :3], q.pi)
        assert np.array_equal(a[2:, 3:], q.ni)

    def test_assemble_hc_layout(self):
        a = assemble_hc(np.array([[1.0]]), np.array([[2.0]])).assembled
        assert np.array_equal(a, [[1, 2], [2, 1]])

    def test_assemble_hc_tie_by_construction(self):
        rng = np.random.default_rng(21)
        bm = assemble_hc(rng.random((3, 4)), rng.random((3, 4)))
        assert np.array_equal(bm.b11, bm.b22)
        assert np.array_equal(bm.b12, bm.b21)

    def test_assemble_hc_rejects_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            assemble_hc(np.ones((2, 2)), np.ones((2, 3)))


class TestBlockProductIdentity:
    def test_zero_inputs(self):
        q = split_complex(np.zeros((2, 2), dtype=complex))
        for part in block_product_identity_check(q, np.zeros((2, 3)), np.zeros((2, 3))):
            assert np.all(part == 0)

    def test_vanishing_terms(self):
        rng = np.random.default_rng(22)
        xpr = rng.random((3, 2))
        xpi = rng.random((3, 2))
        q = SplitQuad(pr=xpr, nr=np.zeros((3, 2)), pi=xpi, ni=np.zeros((3, 2)))
        hp = rng.random((2, 4))
        z1, z2, z3, z4 = block_product_identity_check(q, hp, np.zeros((2, 4)))
        np.testing.assert_allclose(z1, xpr @ hp, atol=1e-15)
        assert np.all(z2 == 0)
        np.testing.assert_allclose(z3, xpi @ hp, atol=1e-15)
        assert np.all(z4 == 0)

    @given(st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_matches_assembled_block_product(self, seed):
        rng = np.random.default_rng(seed)
        q = split_complex(random_complex(rng, (4, 3)))
        hp, hm = rng.random((3, 5)), rng.random((3, 5))
        xc = assemble_zc(q).assembled
        hc = assemble_hc(hp, hm).assembled
        full = xc @ hc
        z1, z2, z3, z4 = block_product_identity_check(q, hp, hm)
        assert np.max(np.abs(z1 - full[:4, :5])) <= 1e-12
        assert np.max(np.abs(z2 - full[:4, 5:])) <= 1e-12
        assert np.max(np.abs(z3 - full[4:, :5])) <= 1e-12
        assert np.max(np.abs(z4 - full[4:, 5:])) <= 1e-12

    def test_dimension_mismatch(self):
        q = split_complex(np.ones((2, 3), dtype=complex))
        with pytest.raises(ValueError, match="dimension mismatch"):
            block_product_identity_check(q, np.ones((4, 2)), np.ones((4, 2)))


class TestSymmetrize:
    def test_arithmetic_mean(self):
        hp, hm = symmetrize_h(
            np.array([[1.0]]), np.array([[0.0]]), np.array([[2.0]]), np.array([[3.0]])
        )
        assert hp[0, 0] == 2.0 and hm[0, 0] == 1.0

    def test_symmetric_input_unchanged(self):
        rng = np.random.default_rng(23)
        a, b = rng.random((2, 2)), rng.random((2, 2))
        hp, hm = symmetrize_h(a, b, b, a)
        assert np.array_equal(hp, a) and np.array_equal(hm, b)

    @given(st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        h1, h2, h3, h4 = (rng.random((3, 3)) for _ in range(4))
        hp, hm = symmetrize_h(h1, h2, h3, h4)
        hp2, hm2 = symmetrize_h(hp, hm, hm, hp)
        assert np.max(np.abs(hp2 - hp)) <= 1e-15
        assert np.max(np.abs(hm2 - hm)) <= 1e-15


def planted_problem(seed, rows=64, rank=20, cols=100, support=8):
    """Z = X H with complex X of sign-consistent rows on sparse column
    supports and strictly positive real H; exactly representable."""
    rng = np.random.default_rng(seed)
    x = np.zeros((rows, rank), dtype=complex)
    sr = rng.choice([-1.0, 1.0], size=rows)
    si = rng.choice([-1.0, 1.0], size=rows)
    for k in range(rank):
        picked = rng.choice(rows, size=support, replace=False)
        mag = rng.uniform(0.3, 1.0, size=(support, 2))
        x[picked, k] = sr[picked] * mag[:, 0] + 1j * si[picked] * mag[:, 1]
    h = rng.uniform(0.3, 1.0, size=(rank, cols))
    return x, h


class TestCmfFactorize:
    def test_zero_input_short_circuits(self):
        res = cmf_factorize(np.zeros((3, 4), dtype=complex), 2)
        assert np.all(res.x == 0) and np.all(res.h == 0)
        assert res.final_error == 0.0
        assert res.objective_history == []

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="empty"):
            cmf_factorize(np.zeros((0, 3), dtype=complex), 2)

    def test_rejects_bad_rank(self):
        with pytest.raises(ValueError, match="rank"):
            cmf_factorize(np.ones((2, 2), dtype=complex), 0)

    def test_rejects_fixed_x_shape(self):
        with pytest.raises(ValueError, match="fixed_x shape"):
            cmf_factorize(
                np.ones((2, 2), dtype=complex), 2, fixed_x=np.ones((3, 2), dtype=complex)
            )

    def test_shapes_and_types(self):
        rng = np.random.default_rng(24)
        z = random_complex(rng, (10, 7))
        res = cmf_factorize(z, 3, SepConfig(rank=3, iters=20))
        assert res.x.shape == (10, 3) and res.x.dtype == np.complex128
        assert res.h.shape == (3, 7) and res.h.dtype == np.float64

    def test_objective_monotone(self):
        rng = np.random.default_rng(25)
        z = random_complex(rng, (16, 12))
        res = cmf_factorize(z, 4, SepConfig(rank=4, iters=200, tol=0.0))
        hist = res.objective_history
        assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))

    def test_planted_fixed_x_small(self):
        # rows carry consistent real/imaginary signs so the planted
        # solution is compatible with the nonnegative block geometry
        x = np.array(
            [[0.5 + 0.6j, 0.9 + 0.4j], [-0.7 - 0.3j, -0.4 - 0.8j]], dtype=complex
        )
        h = np.array([[0.8, 0.3, 0.5], [0.4, 0.9, 0.6]])
        z = x @ h
        res = cmf_factorize(z, 2, SepConfig(rank=2, iters=2000, tol=1e-15), fixed_x=x)
        assert res.final_error / frobenius_norm_sq(z) <= 1e-4

    def test_planted_fixed_x_large(self):
        x, h = planted_problem(0)
        z = x @ h
        res = cmf_factorize(z, 20, SepConfig(rank=20, iters=500), fixed_x=x)
        assert res.final_error / frobenius_norm_sq(z) <= 1e-3

    def test_determinism(self):
        rng = np.random.default_rng(26)
        z = random_complex(rng, (8, 6))
        cfg = SepConfig(rank=3, iters=50, seed=7)
        a = cmf_factorize(z, 3, cfg)
        b = cmf_factorize(z, 3, cfg)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.h, b.h)

    def test_h_init_used(self):
        x, h = planted_problem(1, rows=16, rank=4, cols=10, support=4)
        z = x @ h
        hp0 = np.maximum(h, 0.0) + 0.01
        hm0 = np.zeros_like(h) + 0.01
        res = cmf_factorize(
            z, 4, SepConfig(rank=4, iters=5, tol=0.0), fixed_x=x, h_init=(hp0, hm0)
        )
        assert res.final_error / frobenius_norm_sq(z) < 0.5

    def test_h_init_validation(self):
        z = np.ones((2, 3), dtype=complex)
        with pytest.raises(ValueError, match="rank x cols"):
            cmf_factorize(z, 1, h_init=(np.ones((2, 3)), np.ones((2, 3))))
        with pytest.raises(ValueError, match="nonnegative"):
            cmf_factorize(z, 1, h_init=(-np.ones((1, 3)), np.ones((1, 3))))

    def test_checkpoints_and_log_format(self):
        rng = np.random.default_rng(27)
        z = random_complex(rng, (8, 6))
        buf = io.StringIO()
        res = cmf_factorize(
            z, 2, SepConfig(rank=2, iters=30, tol=0.0), checkpoint_every=10, log=buf
        )
        its = [c[0] for c in res.checkpoints]
        assert its == [10, 20, 30]
        lines = buf.getvalue().strip().split("\n")
        assert len(lines) == 30
        for ln in lines:
            fields = ln.split("\t")
            assert int(fields[0]) >= 1
            assert len(fields) in (2, 3)
        # checkpoint lines carry the complex-domain error as a third field
        assert len(lines[9].split("\t")) == 3
        assert len(lines[0].split("\t")) == 2

    def test_final_checkpoint_always_present(self):
        rng = np.random.default_rng(28)
        z = random_complex(rng, (6, 5))
        res = cmf_factorize(z, 2, SepConfig(rank=2, iters=17, tol=0.0))
        assert res.checkpoints[-1][0] == 17
        assert res.checkpoints[-1][2] == res.final_error


class TestStatedConvergenceTargets:
    """Convergence figures stated for two reference runs; both are
    unattainable for this algorithm (see the failure analyses in the
    sibling acceptance notes), kept here as strict expected failures."""

    @pytest.mark.xfail(
        strict=True,
        reason="the averaging tie freezes the weight-half ratio for a "
        "purely imaginary 1x1 input; the iteration converges to a "
        "strictly positive residual depending on the initial ratio",
    )
    def test_scalar_imaginary_exact(self):
        res = cmf_factorize(np.array([[5j]]), 1, SepConfig(rank=1, iters=500))
        assert res.final_error <= 1e-6

    @pytest.mark.xfail(
        strict=True,
        reason="dense unstructured complex input: the block objective's "
        "minimum does not align with the complex-domain error; observed "
        "median relative error is ~0.35, not 0.05",
    )
    def test_random_64x50_rank40(self):
        rels = []
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            z = random_complex(rng, (64, 50))
            res = cmf_factorize(z, 40, SepConfig(rank=40, iters=500, seed=seed))
            rels.append(np.sqrt(res.final_error / frobenius_norm_sq(z)))
        assert np.median(rels) <= 0.05
