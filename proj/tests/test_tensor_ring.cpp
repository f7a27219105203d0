#include <gtest/gtest.h>

#include "ctrf/kernels.hpp"
#include "ctrf/reference.hpp"
#include "ctrf/tensor_ring.hpp"
#include "support.hpp"

using namespace ctrf;
using namespace ctrf::test;

TEST(TRCores, RejectsInconsistentRing)
{
    EXPECT_THROW(TRCores({DenseTensor({2, 3, 4}), DenseTensor({3, 3, 2})}), ShapeError);
    EXPECT_THROW(TRCores({DenseTensor({2, 3})}), ShapeError);
    TRCores ok({DenseTensor({2, 3, 4}), DenseTensor({4, 5, 2})});
    EXPECT_EQ(ok.ranks(), (std::vector<Index>{2, 4}));
    EXPECT_EQ(ok.dims(), (Shape{3, 5}));
    EXPECT_THROW(ok.set_core(0, DenseTensor({2, 3, 3})), ShapeError);
}

// With every rank 1 each element is a product of scalars: an outer product.
TEST(TrReconstruct, RankOneIsOuterProduct)
{
    const TRCores c = tr_init({2, 3, 4}, {1, 1, 1}, 11);
    const DenseTensor x = tr_reconstruct(c);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j)
            for (Index k = 0; k < 4; ++k)
                EXPECT_NEAR(x(i, j, k), c.core(0).raw()[i] * c.core(1).raw()[j] * c.core(2).raw()[k], 1e-15);
}

// Oracle: per-element trace of slice products.
TEST(TrReconstruct, MatchesElementwiseTraces)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const TRCores c = random_ring(rng, 1, 5, 4, 4);
        EXPECT_LT(rel_err(tr_reconstruct(c), reference::tr_reconstruct(c)), 1e-12) << "order " << c.order();
    }
}

TEST(TrReconstruct, OrderOneIsSliceTrace)
{
    DenseTensor g({2, 3, 2});
    for (Index i = 0; i < 3; ++i) {
        g(0, i, 0) = static_cast<double>(i);
        g(1, i, 1) = 10.0;
        g(0, i, 1) = 99.0;
    }
    const DenseTensor x = tr_reconstruct(TRCores({g}));
    EXPECT_EQ(x, DenseTensor({3}, {10.0, 11.0, 12.0}));
}

TEST(MergeCores, SingleCoreIsItself)
{
    const TRCores c = tr_init({3, 4, 5}, {2, 3, 2}, 13);
    for (Index n = 0; n < 3; ++n) EXPECT_EQ(merge_cores(c, n, 1), c.core(n));
    EXPECT_THROW(merge_cores(c, 0, 0), ShapeError);
    EXPECT_THROW(merge_cores(c, 0, 4), ShapeError);
}

// Oracle: the merged slice (i + j·I) is the product of slices i and j.
TEST(MergeCores, SliceInterleaving)
{
    const TRCores c = tr_init({3, 4, 5}, {2, 3, 2}, 14);
    const DenseTensor m = merge_cores(c, 0, 2);
    ASSERT_EQ(m.shape(), (Shape{2, 12, 2}));
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 4; ++j)
            for (Index a = 0; a < 2; ++a)
                for (Index d = 0; d < 2; ++d) {
                    double s = 0.0;
                    for (Index b = 0; b < 3; ++b) s += c.core(0)(a, i, b) * c.core(1)(b, j, d);
                    EXPECT_NEAR(m(a, i + 3 * j, d), s, 1e-14);
                }
}

TEST(MergeCores, WrapsAroundTheRing)
{
    const TRCores c = tr_init({3, 4, 5}, {2, 3, 4}, 15);
    const DenseTensor wrapped = merge_cores(c, 2, 2);
    EXPECT_EQ(wrapped.shape(), (Shape{4, 15, 3}));
    EXPECT_LT(rel_err(wrapped, kernels::merge_pair(c.core(2), c.core(0))), 1e-15);
}

TEST(MergeCores, FullMergeTraceReproducesTensor)
{
    const TRCores c = tr_init({3, 4, 2, 2}, {2, 3, 2, 3}, 16);
    const DenseTensor all = merge_cores(c, 0, 4);
    const DenseTensor x = tr_reconstruct(c);
    for (Index k = 0; k < all.dim(1); ++k) {
        double tr = 0.0;
        for (Index a = 0; a < all.dim(0); ++a) tr += all(a, k, a);
        // merged index has the first mode fastest; x is first-slowest
        const Index i = k % 3, j = (k / 3) % 4, l = (k / 12) % 2, m = k / 24;
        EXPECT_NEAR(tr, x.at({i, j, l, m}), 1e-13);
    }
}

// Oracle: both sides of the block-unfolding factorization computed independently.
TEST(MergeCores, BlockUnfoldingFactorization)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const TRCores c = random_ring(rng, 3, 3, 4, 5);
        const DenseTensor x = tr_reconstruct(c);
        for (Index n = 1; n < 3; ++n) {
            const Matrix lhs = mode_n_unfold(merge_cores(c, 0, n), 2) * tr_unfold(merge_cores(c, n, 3 - n), 2).transpose();
            EXPECT_LT(rel_err(lhs, block_unfold(x, n)), 1e-10);
        }
    }
}

TEST(Rotated, ShiftsTheTensor)
{
    std::mt19937_64 rng(18);
    for (int trial = 0; trial < 10; ++trial) {
        const TRCores c = random_ring(rng, 3, 4, 3, 4);
        for (Index s = 0; s < c.order(); ++s)
            EXPECT_LT(rel_err(tr_reconstruct(c.rotated(s)), circ_shift(tr_reconstruct(c), s)), 1e-12);
    }
}

TEST(TrInit, DeterministicAndBalanced)
{
    const TRCores a = tr_init({4, 5, 6}, {2, 3, 2}, 19), b = tr_init({4, 5, 6}, {2, 3, 2}, 19);
    for (Index n = 0; n < 3; ++n) {
        EXPECT_EQ(a.core(n), b.core(n));
        EXPECT_NEAR(fro_norm(a.core(n)), 1.0, 1e-12);
    }
    EXPECT_NE(tr_init({4, 5, 6}, {2, 3, 2}, 20).core(0), a.core(0));
    EXPECT_THROW(tr_init({4, 5, 6}, {2, 3}, 1), ArgumentError);
    EXPECT_THROW(tr_init({4, 5, 6}, {2, 0, 2}, 1), ArgumentError);
}

TEST(TrInit, ReconstructionNormsStayWithinADecade)
{
    double lo = 1e300, hi = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const double n = fro_norm(tr_reconstruct(tr_init({6, 6, 6}, {3, 3, 3}, seed)));
        lo = std::min(lo, n);
        hi = std::max(hi, n);
    }
    EXPECT_LT(hi / lo, 10.0);
}

TEST(RankBound, Examples)
{
    const TRCores c = tr_init({4, 5, 6}, {2, 3, 2}, 21);
    const RankBound r = rank_bound_check(c, 3);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.core_rank, 4);
    EXPECT_LE(r.tensor_rank, 4);

    const TRCores ones = tr_init({3, 3, 3}, {1, 1, 1}, 22);
    for (Index n = 1; n <= 3; ++n) {
        const RankBound b = rank_bound_check(ones, n);
        EXPECT_TRUE(b.holds);
        EXPECT_LE(b.tensor_rank, 1);
        EXPECT_LE(b.core_rank, 1);
    }

    const TRCores zero({DenseTensor({2, 3, 2}), DenseTensor({2, 3, 2})});
    const RankBound z = rank_bound_check(zero, 1);
    EXPECT_EQ(z.core_rank, 0);
    EXPECT_EQ(z.tensor_rank, 0);
    EXPECT_TRUE(z.holds);
}

TEST(RankBound, HoldsOnRandomRings)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const TRCores c = random_ring(rng, 3, 4, 4, 6);
        for (Index n = 1; n <= c.order(); ++n) EXPECT_TRUE(rank_bound_check(c, n).holds);
    }
}
