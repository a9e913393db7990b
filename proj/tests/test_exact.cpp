// Copyright 2026 The equil Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <equil/equil.hpp>

#include "oracles.hpp"

using namespace equil;

namespace
{

/// Doubly stochastic limit of a positive 2x2 matrix: [[p, 1-p], [1-p, p]]
/// with p^2 / (1-p)^2 equal to the cross ratio b11 b22 / (b12 b21).
double two_by_two_limit(double b11, double b12, double b21, double b22)
{
    const double t = std::sqrt(b11 * b22 / (b12 * b21));
    return t / (1.0 + t);
}

oracle::Dense random_symmetric_nonnegative(std::mt19937_64& gen, std::size_t n)
{
    // Square of a random spd matrix with a full diagonal: symmetric,
    // nonnegative and fully indecomposable.
    std::normal_distribution<double> z;
    std::bernoulli_distribution keep(0.3);
    oracle::Dense a(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (keep(gen))
                a[i][j] = a[j][i] = z(gen);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (double v : a[i])
            row += std::abs(v);
        a[i][i] = row + 1.0;
    }
    for (auto& row : a)
        for (double& v : row)
            v *= v;
    return a;
}

} // namespace

TEST(SinkhornKnopp, DoublyStochasticInputIsFixedPoint)
{
    const auto b = from_rows({{0.5, 0.25, 0.25}, {0.25, 0.5, 0.25}, {0.25, 0.25, 0.5}});
    const auto res = sinkhorn_knopp(b);
    EXPECT_TRUE(res.converged);
    ASSERT_EQ(res.history.size(), 1u);
    EXPECT_EQ(res.history[0].row_deviation, 0.0);
    EXPECT_EQ(res.history[0].col_deviation, 0.0);
    for (double v : res.scaling.left())
        EXPECT_EQ(v, 1.0);
    for (double v : res.scaling.right())
        EXPECT_EQ(v, 1.0);
}

TEST(SinkhornKnopp, TwoByTwoMatchesClosedForm)
{
    const auto b = from_rows({{1, 4}, {9, 16}});
    const auto res = sinkhorn_knopp(b);
    ASSERT_TRUE(res.converged);
    const auto f = oracle::to_dense(scale(b, res.scaling));
    const double p = two_by_two_limit(1, 4, 9, 16);
    EXPECT_NEAR(p, 0.4, 1e-15);
    EXPECT_NEAR(f[0][0], p, 1e-10);
    EXPECT_NEAR(f[0][1], 1 - p, 1e-10);
    EXPECT_NEAR(f[1][0], 1 - p, 1e-10);
    EXPECT_NEAR(f[1][1], p, 1e-10);
    const auto sums = oracle::scaled_sums(oracle::to_dense(b), res.scaling.left(), res.scaling.right());
    EXPECT_LT(oracle::max_abs_deviation_from_one(sums.rows), 1e-10);
    EXPECT_LT(oracle::max_abs_deviation_from_one(sums.cols), 1e-10);
}

TEST(SinkhornKnopp, DiagonalScalesToIdentity)
{
    const auto b = diagonal(std::vector<double>{1.0, 2.0});
    const auto res = sinkhorn_knopp(b);
    ASSERT_TRUE(res.converged);
    const auto f = scale(b, res.scaling);
    EXPECT_NEAR(f.coeff(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(f.coeff(1, 1), 1.0, 1e-12);
}

TEST(SinkhornKnopp, CertificateOnRandomTotalSupport)
{
    std::mt19937_64 gen(31);
    std::uniform_real_distribution<double> pos(0.1, 10.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial) * 3;
        // Positive diagonal plus a cycle and random extra entries: fully
        // indecomposable, hence total support.
        oracle::Dense d(n, std::vector<double>(n, 0.0));
        std::bernoulli_distribution keep(0.2);
        for (std::size_t i = 0; i < n; ++i) {
            d[i][i] = pos(gen);
            d[i][(i + 1) % n] = pos(gen);
            for (std::size_t j = 0; j < n; ++j)
                if (keep(gen))
                    d[i][j] = pos(gen);
        }
        const auto res = sinkhorn_knopp(oracle::from_dense(d));
        ASSERT_TRUE(res.converged) << n;
        EXPECT_LE(res.history.size(), ExactOptions{}.max_iters);
        const auto sums = oracle::scaled_sums(d, res.scaling.left(), res.scaling.right());
        EXPECT_LT(oracle::max_abs_deviation_from_one(sums.rows), 1e-10);
        EXPECT_LT(oracle::max_abs_deviation_from_one(sums.cols), 1e-10);
    }
}

TEST(SinkhornKnopp, SupportWithoutTotalSupportDoesNotConverge)
{
    // Entry (0, 1) lies on no positive diagonal; the scalings diverge while
    // the scaled matrix tends to the identity.
    const auto b = from_rows({{1, 1}, {0, 1}});
    ExactOptions opts;
    opts.max_iters = 2000;
    const auto res = sinkhorn_knopp(b, opts);
    EXPECT_FALSE(res.converged);
    EXPECT_EQ(res.history.size(), 2000u);
    const auto f = scale(b, res.scaling);
    EXPECT_LT(f.coeff(0, 1), 1e-2);
    EXPECT_NEAR(f.coeff(0, 0), 1.0, 1e-2);
    // f(0,1) = r0 c1 = r0 / r1 once the diagonal is fixed at 1.
    EXPECT_GT(res.scaling.left()[1] / res.scaling.left()[0], 100.0);
}

TEST(SinkhornKnopp, Errors)
{
    EXPECT_THROW(sinkhorn_knopp(from_rows({{1, 0}, {0, 0}})), ZeroRowOrColumn);
    EXPECT_THROW(sinkhorn_knopp(from_rows({{1, 1}, {0, 0}})), ZeroRowOrColumn);
    EXPECT_THROW(sinkhorn_knopp(from_rows({{1, -1}, {1, 1}})), std::invalid_argument);
    EXPECT_THROW(sinkhorn_knopp(from_rows({{1, 1, 1}, {1, 1, 1}})), DimensionMismatch);
    ExactOptions bad;
    bad.tol = 0.0;
    EXPECT_THROW(sinkhorn_knopp(identity(2), bad), std::invalid_argument);
    ExactOptions bad_start;
    bad_start.start = std::vector<double>{1.0, -1.0};
    EXPECT_THROW(sinkhorn_knopp(identity(2), bad_start), std::invalid_argument);
    bad_start.start = std::vector<double>{1.0};
    EXPECT_THROW(sinkhorn_knopp(identity(2), bad_start), DimensionMismatch);
}

TEST(SinkhornKnopp, ObserverSeesEveryIteration)
{
    std::size_t calls = 0, last = 0;
    const auto res = sinkhorn_knopp(from_rows({{1, 4}, {9, 16}}), {},
                                    [&](std::size_t k, const DiagonalScaling&) {
                                        ++calls;
                                        last = k;
                                    });
    EXPECT_EQ(calls, res.history.size());
    EXPECT_EQ(last, res.history.size());
}

TEST(SinkhornKnopp, UniqueScaledMatrixFromDifferentStarts)
{
    std::mt19937_64 gen(32);
    const auto d = random_symmetric_nonnegative(gen, 15);
    oracle::Dense nonsym = d;
    for (std::size_t i = 0; i < 15; ++i)
        nonsym[i][(i + 3) % 15] += 1.0;
    const auto b = oracle::from_dense(nonsym);
    ExactOptions a_opts, b_opts;
    std::uniform_real_distribution<double> pos(0.01, 100.0);
    std::vector<double> start(15);
    for (double& v : start)
        v = pos(gen);
    b_opts.start = start;
    const auto ra = sinkhorn_knopp(b, a_opts);
    const auto rb = sinkhorn_knopp(b, b_opts);
    ASSERT_TRUE(ra.converged && rb.converged);
    const auto fa = oracle::to_dense(scale(b, ra.scaling));
    const auto fb = oracle::to_dense(scale(b, rb.scaling));
    for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = 0; j < 15; ++j)
            EXPECT_NEAR(fa[i][j], fb[i][j], 10 * a_opts.tol);
}

TEST(SymSinkhornKnopp, ScalarOscillation)
{
    const auto b = identity(1);
    std::vector<double> y{2.0};
    y = symmetric_sk_sweep(b, y);
    EXPECT_EQ(y[0], 0.5);
    y = symmetric_sk_sweep(b, y);
    EXPECT_EQ(y[0], 2.0);

    ExactOptions opts;
    opts.start = std::vector<double>{2.0};
    const auto res = sym_sinkhorn_knopp(b, opts);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.x[0], 1.0);
}

TEST(SymSinkhornKnopp, Diag12)
{
    const auto b = diagonal(std::vector<double>{1.0, 2.0});
    const auto v = symmetric_sk_sweep(b, std::vector<double>{1.0, 1.0});
    EXPECT_EQ(v, (std::vector<double>{1.0, 0.5}));
    const auto res = sym_sinkhorn_knopp(b);
    ASSERT_TRUE(res.converged);
    EXPECT_NEAR(res.x[0], 1.0, 1e-10);
    EXPECT_NEAR(res.x[1], 1.0 / std::sqrt(2.0), 1e-10);
}

TEST(SymSinkhornKnopp, RandomSpdSquaredIsDoublyStochastic)
{
    std::mt19937_64 gen(33);
    for (int trial = 0; trial < 5; ++trial) {
        const auto d = random_symmetric_nonnegative(gen, 20);
        const auto res = sym_sinkhorn_knopp(oracle::from_dense(d));
        ASSERT_TRUE(res.converged);
        const auto sums = oracle::scaled_sums(d, res.x, res.x);
        EXPECT_LT(oracle::max_abs_deviation_from_one(sums.rows), 1e-10);
        EXPECT_LT(oracle::max_abs_deviation_from_one(sums.cols), 1e-10);
    }
}

TEST(SymSinkhornKnopp, ReducibleMatchesGeometricMeanOfNonsymmetric)
{
    std::mt19937_64 gen(34);
    const auto b1 = random_symmetric_nonnegative(gen, 6);
    const auto b2 = random_symmetric_nonnegative(gen, 4);
    oracle::Dense d(10, std::vector<double>(10, 0.0));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            d[i][j] = b1[i][j];
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            d[6 + i][6 + j] = 1e3 * b2[i][j];
    const auto b = oracle::from_dense(d);
    ASSERT_FALSE(is_irreducible(b));
    ExactOptions opts;
    const auto sym = sym_sinkhorn_knopp(b, opts);
    const auto nonsym = sinkhorn_knopp(b, opts);
    ASSERT_TRUE(sym.converged && nonsym.converged);
    const auto x = symmetrize(nonsym.scaling);
    for (std::size_t i = 0; i < 10; ++i)
        EXPECT_NEAR(sym.x[i], x[i], 10 * opts.tol * std::max(1.0, x[i]));
}

TEST(SymSinkhornKnopp, RejectsNonsymmetric)
{
    EXPECT_THROW(sym_sinkhorn_knopp(from_rows({{1, 2}, {3, 4}})), std::invalid_argument);
}

TEST(Equilibrate2Norm, AlreadyEquilibratedGivesIdentityScaling)
{
    const auto a = from_rows({{0.6, 0.8}, {-0.8, 0.6}});
    const auto res = equilibrate_2norm(a);
    ASSERT_TRUE(res.converged);
    for (double v : res.scaling.left())
        EXPECT_NEAR(v, 1.0, 1e-12);
    for (double v : res.scaling.right())
        EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Equilibrate2Norm, UnitRowAndColumnNorms)
{
    const auto a = from_rows({{1, 2}, {3, 4}});
    const auto res = equilibrate_2norm(a);
    ASSERT_TRUE(res.converged);
    const auto scaled = oracle::scaled(oracle::to_dense(a), res.scaling.left(), res.scaling.right());
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(std::hypot(scaled[i][0], scaled[i][1]), 1.0, 1e-10);
        EXPECT_NEAR(std::hypot(scaled[0][i], scaled[1][i]), 1.0, 1e-10);
    }
}

TEST(Equilibrate2Norm, DiagonalIsForced)
{
    const auto a = diagonal(std::vector<double>{3.0, 5.0});
    const auto res = equilibrate_2norm(a);
    ASSERT_TRUE(res.converged);
    EXPECT_NEAR(res.scaling.left()[0], 1 / std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(res.scaling.left()[1], 1 / std::sqrt(5.0), 1e-10);
    EXPECT_EQ(res.scaling.left(), res.scaling.right());
    const auto s = scale(a, res.scaling);
    EXPECT_NEAR(s.coeff(0, 0), 1.0, 1e-10);
    EXPECT_NEAR(s.coeff(1, 1), 1.0, 1e-10);
}

TEST(Equilibrate2Norm, SymmetricInputGivesSymmetricScaling)
{
    CorpusSpec spec;
    spec.family = Family::symmetric_indefinite;
    spec.n = 60;
    spec.seed = 5;
    const auto a = generate(spec);
    const auto sym = equilibrate_2norm(a);
    const auto non = equilibrate_2norm(a, {}, SymmetryMode::force_nonsymmetric);
    ASSERT_TRUE(sym.converged && non.converged);
    EXPECT_EQ(sym.scaling.left(), sym.scaling.right());
    EXPECT_LT(scaled_ratio(a, sym.scaling).value, 1 + 1e-8);
    EXPECT_LT(scaled_ratio(a, non.scaling).value, 1 + 1e-8);
}

TEST(JacobiScale, Examples)
{
    const auto a = from_rows({{4, 1}, {1, 9}});
    const auto [s, m] = jacobi_scale(a);
    EXPECT_EQ(m.coeff(0, 0), 1.0);
    EXPECT_EQ(m.coeff(1, 1), 1.0);
    EXPECT_EQ(s.left(), (std::vector<double>{0.5, 1.0 / 3.0}));

    const auto indefinite = from_rows({{2, 3}, {3, 0}});
    const auto [si, mi] = jacobi_scale(indefinite);
    EXPECT_EQ(si.left()[1], 1.0);
    EXPECT_EQ(mi.coeff(1, 1), 0.0);

    const auto unit = from_rows({{1, 0.5, 0}, {0.5, -1, 2}, {0, 2, 1}});
    EXPECT_EQ(jacobi_scale(unit).second, unit);

    EXPECT_THROW(jacobi_scale(from_rows({{1, 2}, {3, 4}})), std::invalid_argument);
}

TEST(InfNormScale, Examples)
{
    const auto s = inf_norm_scale(from_rows({{2, 0}, {0, 4}}));
    EXPECT_EQ(scale(from_rows({{2, 0}, {0, 4}}), s), identity(2));

    const auto a = from_rows({{1, -3}, {2, 1}});
    const auto scaled = oracle::to_dense(scale(a, inf_norm_scale(a)));
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(std::max(std::abs(scaled[i][0]), std::abs(scaled[i][1])), 1.0, 1e-15);
        EXPECT_NEAR(std::max(std::abs(scaled[0][i]), std::abs(scaled[1][i])), 1.0, 1e-15);
    }

    const auto done = from_rows({{1, -0.5}, {0.25, -1}});
    const auto id = inf_norm_scale(done);
    EXPECT_EQ(id.left(), (std::vector<double>{1, 1}));
    EXPECT_EQ(id.right(), (std::vector<double>{1, 1}));

    EXPECT_THROW(inf_norm_scale(from_rows({{1, 0}, {0, 0}})), ZeroRowOrColumn);
}

TEST(SpdProperties, DiagonalBoundsAndJacobiVariance)
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        CorpusSpec spec;
        spec.family = Family::spd;
        spec.n = 40 * seed;
        spec.seed = seed;
        spec.cond_target = 1e6;
        const auto a = generate(spec);
        const double n = static_cast<double>(a.nrows());

        const auto res = equilibrate_2norm(a);
        ASSERT_TRUE(res.converged);
        const auto eq = scale(a, res.scaling);
        for (std::size_t i = 0; i < a.nrows(); ++i) {
            EXPECT_GT(eq.coeff(i, i), 1 / std::sqrt(n));
            EXPECT_LE(eq.coeff(i, i), 1 + 1e-10);
        }

        const auto jac = jacobi_scale(a).second;
        EXPECT_LT(row_sum_variance(jac), (n - 1) * (n - 1));
    }
}
