#include <gtest/gtest.h>

#include <otfsprony/numerics.hpp>

#include "oracles.hpp"

namespace
{

using namespace otfsprony;

double max_abs(const ComplexMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

TEST(Dft, AllOnesConcentratesInBinZero)
{
    const ComplexVector v = ComplexVector::Ones(8);
    const ComplexVector y = dft(v, DftDirection::forward);
    EXPECT_NEAR(std::abs(y[0] - Complex(8, 0)), 0.0, 1e-14);
    for (Index k = 1; k < 8; ++k)
    {
        EXPECT_LT(std::abs(y[k]), 1e-14);
    }
}

TEST(Dft, PureToneLandsOnItsBin)
{
    ComplexVector v(8);
    for (Index n = 0; n < 8; ++n)
    {
        v[n] = oracle::phasor(3.0 * static_cast<double>(n) / 8.0);
    }
    const ComplexVector y = dft(v, DftDirection::forward);
    for (Index k = 0; k < 8; ++k)
    {
        EXPECT_NEAR(std::abs(y[k] - (k == 3 ? Complex(8, 0) : Complex(0, 0))), 0.0, 1e-13);
    }
}

TEST(Dft, MatchesNaiveSumAndRoundTrips)
{
    std::mt19937_64 rng(1);
    for (const Index len : {1, 2, 3, 7, 16, 20, 64})
    {
        const ComplexVector v = oracle::random_vector(rng, len);
        const ComplexVector f = dft(v, DftDirection::forward);
        EXPECT_LT(max_abs(f - oracle::naive_dft(v, -1)), 1e-11) << len;
        const ComplexVector b = dft(v, DftDirection::inverse);
        EXPECT_LT(max_abs(b - oracle::naive_dft(v, +1) / static_cast<double>(len)), 1e-12) << len;
        EXPECT_LT(max_abs(dft(f, DftDirection::inverse) - v), 1e-12) << len;
    }
}

TEST(Dft, RoundTripUpTo4096)
{
    std::mt19937_64 rng(2);
    for (const Index len : {128, 1000, 1024, 4096})
    {
        const ComplexVector v = oracle::random_vector(rng, len);
        EXPECT_LT(max_abs(dft(dft(v, DftDirection::forward), DftDirection::inverse) - v), 1e-10)
            << len;
    }
}

TEST(Dft, EmptyInputRejected)
{
    EXPECT_THROW(dft(ComplexVector(), DftDirection::forward), InvalidArgument);
}

TEST(Toeplitz, DefinitionUnrolled)
{
    ComplexVector y(4);
    y << Complex(1, 0), Complex(2, 1), Complex(3, -1), Complex(4, 2);
    const ComplexMatrix t = toeplitz_from_series(y, 1, 1);
    ASSERT_EQ(t.rows(), 3);
    ASSERT_EQ(t.cols(), 2);
    for (Index i = 0; i < 3; ++i)
    {
        EXPECT_EQ(t(i, 0), y[i + 1]);
        EXPECT_EQ(t(i, 1), y[i]);
    }
}

TEST(Toeplitz, ColumnShapeForOrder)
{
    const Index n = 16;
    for (Index p = 1; p < n; ++p)
    {
        const ComplexMatrix t = toeplitz_from_series(ComplexVector::Ones(n), p, p);
        EXPECT_EQ(t.rows(), n - p);
        EXPECT_EQ(t.cols(), p + 1);
    }
}

TEST(Toeplitz, GeometricSeriesHasRankOne)
{
    const Complex z = std::polar(0.97, 0.8);
    ComplexVector y(12);
    for (Index k = 0; k < 12; ++k)
    {
        y[k] = std::pow(z, static_cast<double>(k));
    }
    for (Index p = 1; p <= 5; ++p)
    {
        const ComplexMatrix t = toeplitz_from_series(y, p, p);
        Eigen::JacobiSVD<ComplexMatrix> svd(t);
        const auto s = svd.singularValues();
        EXPECT_GT(s[0], 1e-3);
        for (Index i = 1; i < s.size(); ++i)
        {
            EXPECT_LT(s[i], 1e-12 * s[0]) << "order " << p;
        }
    }
}

TEST(Toeplitz, ExplicitRowCountAndRangeChecks)
{
    const ComplexVector y = ComplexVector::LinSpaced(10, 0.0, 9.0);
    const ComplexMatrix t = toeplitz_from_series(y, 2, 3, 4);
    ASSERT_EQ(t.rows(), 4);
    EXPECT_EQ(t(0, 0), y[3]);
    EXPECT_EQ(t(3, 2), y[4]);
    EXPECT_THROW(toeplitz_from_series(y, 2, 1), InvalidArgument);
    EXPECT_THROW(toeplitz_from_series(y, 0, 0), InvalidArgument);
    EXPECT_THROW(toeplitz_from_series(y, 2, 3, 8), InvalidArgument);
}

TEST(LeastSquares, IdentityAndOrthonormalFrames)
{
    std::mt19937_64 rng(3);
    const ComplexMatrix b = oracle::random_matrix(rng, 5, 3);
    EXPECT_LT(max_abs(least_squares(ComplexMatrix::Identity(5, 5), b) - b), 1e-14);

    const ComplexMatrix q = oracle::random_matrix(rng, 9, 4).householderQr().householderQ() *
                            ComplexMatrix::Identity(9, 4);
    const ComplexMatrix rhs = oracle::random_matrix(rng, 9, 2);
    EXPECT_LT(max_abs(least_squares(q, rhs) - q.adjoint() * rhs), 1e-12);
}

TEST(LeastSquares, RecoversExactSolution)
{
    std::mt19937_64 rng(4);
    const ComplexMatrix a  = oracle::random_matrix(rng, 12, 3);
    const ComplexMatrix x0 = oracle::random_matrix(rng, 3, 4);
    EXPECT_LT(max_abs(least_squares(a, a * x0) - x0), 1e-10);
}

TEST(LeastSquares, NormalEquationsHold)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial)
    {
        const ComplexMatrix a = oracle::random_matrix(rng, 15, 6);
        const ComplexMatrix b = oracle::random_matrix(rng, 15, 3);
        const ComplexMatrix x = least_squares(a, b);
        EXPECT_LT(max_abs(a.adjoint() * (b - a * x)), 1e-8 * b.norm());
    }
}

TEST(LeastSquares, MinimumNormUnderRankDeficiency)
{
    ComplexMatrix a(3, 2);
    a << 1, 1, 2, 2, 3, 3;
    ComplexMatrix b(3, 1);
    b << 1, 2, 3;
    const ComplexMatrix x = least_squares(a, b);
    EXPECT_NEAR(std::abs(x(0, 0) - 0.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(x(1, 0) - 0.5), 0.0, 1e-12);
    EXPECT_THROW(least_squares(a, ComplexMatrix::Zero(2, 1)), InvalidArgument);
}

TEST(PseudoInverse, PenroseConditions)
{
    std::mt19937_64 rng(6);
    const ComplexMatrix a = oracle::random_matrix(rng, 7, 4);
    const ComplexMatrix p = pseudo_inverse(a);
    EXPECT_LT(max_abs(a * p * a - a), 1e-10);
    EXPECT_LT(max_abs(p * a * p - p), 1e-10);
    EXPECT_LT(max_abs((a * p).adjoint() - a * p), 1e-10);
    EXPECT_LT(max_abs((p * a).adjoint() - p * a), 1e-10);
}

TEST(ConditionNumber, DiagonalAndRankDeficient)
{
    ComplexMatrix d = ComplexMatrix::Zero(3, 2);
    d(0, 0) = 10;
    d(1, 1) = 0.5;
    EXPECT_NEAR(condition_number(d), 20.0, 1e-12);
    ComplexMatrix r(2, 2);
    r << 1, 2, 2, 4;
    EXPECT_GT(condition_number(r), 1e15);
}

TEST(MinNormNullVector, ExplicitNullspace)
{
    ComplexMatrix t(2, 2);
    t << 1, 0, 0, 0;
    const NullVector nv = min_norm_null_vector(t);
    EXPECT_NEAR(nv.rss, 0.0, 1e-30);
    EXPECT_NEAR(std::abs(nv.a[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(nv.a[1]), 1.0, 1e-15);
}

TEST(MinNormNullVector, OrthogonalColumns)
{
    ComplexMatrix t = ComplexMatrix::Zero(4, 2);
    t(0, 0) = 3;
    t(1, 1) = Complex(0, 2);
    EXPECT_NEAR(min_norm_null_vector(t).rss, 4.0, 1e-12);
}

TEST(MinNormNullVector, DenseGridSearchOnTwoColumns)
{
    // Unit vectors (cos th, e^{j ph} sin th) cover C^2 up to a global phase.
    std::mt19937_64 rng(7);
    const ComplexMatrix t = oracle::random_matrix(rng, 20, 2);
    const double rss      = min_norm_null_vector(t).rss;
    double best           = std::numeric_limits<double>::infinity();
    const int steps       = 600;
    for (int i = 0; i <= steps; ++i)
    {
        const double th = 0.5 * oracle::two_pi / 2.0 * i / steps;
        for (int k = 0; k < steps; ++k)
        {
            ComplexVector a(2);
            a << std::cos(th), std::sin(th) * oracle::phasor(static_cast<double>(k) / steps);
            best = std::min(best, (t * a).squaredNorm());
        }
    }
    EXPECT_LE(rss, best + 1e-12);
    EXPECT_LT(best - rss, 1e-3 * t.squaredNorm());
}

TEST(MinNormNullVector, RandomSearchLowerBoundAndGramOracle)
{
    std::mt19937_64 rng(8);
    const ComplexMatrix t = oracle::random_matrix(rng, 20, 4);
    const NullVector nv   = min_norm_null_vector(t);
    EXPECT_NEAR(nv.a.norm(), 1.0, 1e-12);
    EXPECT_NEAR((t * nv.a).squaredNorm(), nv.rss, 1e-12 * t.squaredNorm());
    EXPECT_NEAR(nv.rss, oracle::smallest_gram_eigenvalue(t), 1e-9 * t.squaredNorm());
    for (int i = 0; i < 20000; ++i)
    {
        ComplexVector a = oracle::random_vector(rng, 4);
        a.normalize();
        ASSERT_LE(nv.rss, (t * a).squaredNorm() + 1e-12);
    }
    for (Index j = 0; j < t.cols(); ++j)
    {
        EXPECT_LE(nv.rss, t.col(j).squaredNorm() + 1e-12);
    }
}

TEST(MinNormNullVector, WideMatrixHasZeroResidual)
{
    std::mt19937_64 rng(9);
    const ComplexMatrix t = oracle::random_matrix(rng, 2, 5);
    const NullVector nv   = min_norm_null_vector(t);
    EXPECT_EQ(nv.rss, 0.0);
    EXPECT_LT((t * nv.a).norm(), 1e-12);
}

ComplexVector geometric_sum(const std::vector<Complex>& zs, Index len)
{
    ComplexVector y = ComplexVector::Zero(len);
    for (const Complex z : zs)
    {
        for (Index k = 0; k < len; ++k)
        {
            y[k] += std::pow(z, static_cast<double>(k));
        }
    }
    return y;
}

TEST(Prony, FirstOrderRecurrence)
{
    const Complex z     = std::polar(1.0, 1.1);
    const ComplexMatrix t = toeplitz_from_series(geometric_sum({z}, 10), 1, 1);
    for (const PronyMode mode : {PronyMode::constrained, PronyMode::min_norm})
    {
        const ComplexVector a = prony_coefficients(t, mode);
        ASSERT_EQ(a.size(), 2);
        EXPECT_NEAR(std::abs(a[0] - 1.0), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(a[1] + z), 0.0, 1e-12);
    }
}

TEST(Prony, SecondOrderMatchesExpandedPolynomial)
{
    const Complex z1 = std::polar(1.0, 0.4);
    const Complex z2 = std::polar(1.0, -2.0);
    const ComplexMatrix t = toeplitz_from_series(geometric_sum({z1, z2}, 12), 2, 2);
    const ComplexVector expected = oracle::expand_roots({z1, z2});
    for (const PronyMode mode : {PronyMode::constrained, PronyMode::min_norm})
    {
        const ComplexVector a = prony_coefficients(t, mode);
        EXPECT_LT(max_abs(a - expected), 1e-10);
    }
}

TEST(Prony, RootSetsOfGeometricSumsMatchGenerators)
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 10; ++trial)
    {
        std::vector<Complex> zs;
        for (int p = 0; p < 4; ++p)
        {
            zs.push_back(oracle::phasor(u(rng)));
        }
        double sep = 10;
        for (std::size_t i = 0; i < zs.size(); ++i)
            for (std::size_t j = i + 1; j < zs.size(); ++j)
                sep = std::min(sep, std::abs(zs[i] - zs[j]));
        if (sep < 0.05)
        {
            continue;
        }
        const ComplexMatrix t = toeplitz_from_series(geometric_sum(zs, 16), 4, 4);
        for (const PronyMode mode : {PronyMode::constrained, PronyMode::min_norm})
        {
            const auto roots = polynomial_roots(prony_coefficients(t, mode));
            EXPECT_LT(oracle::best_pairing_error(roots, zs), 1e-8);
        }
    }
}

TEST(Prony, MinNormRejectsDegenerateLead)
{
    // The only null direction is e_1, so a[0] = 0.
    ComplexMatrix t(3, 2);
    t << 1, 0, 2, 0, 3, 0;
    EXPECT_THROW(prony_coefficients(t, PronyMode::min_norm), DegenerateLeadingCoefficient);
    EXPECT_THROW(prony_coefficients(ComplexMatrix::Ones(3, 1), PronyMode::constrained),
                 InvalidArgument);
}

TEST(Roots, TrivialPolynomials)
{
    ComplexVector c(3);
    c << 1, 0, -1;
    auto r = polynomial_roots(c);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_LT(oracle::best_pairing_error(r, {1.0, -1.0}), 1e-14);

    const Complex z(0.3, -1.7);
    ComplexVector lin(2);
    lin << 1, -z;
    r = polynomial_roots(lin);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_LT(std::abs(r[0] - z), 1e-15);
}

TEST(Roots, DegreeSixUnitCircle)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        std::vector<Complex> zs;
        for (int i = 0; i < 6; ++i)
        {
            zs.push_back(oracle::phasor(u(rng)));
        }
        const auto roots = polynomial_roots(oracle::expand_roots(zs));
        ASSERT_EQ(roots.size(), 6u);
        // Vieta: sum and product of roots.
        Complex sum = 0;
        Complex prod = 1;
        Complex sum_true = 0;
        Complex prod_true = 1;
        for (std::size_t i = 0; i < 6; ++i)
        {
            sum += roots[i];
            prod *= roots[i];
            sum_true += zs[i];
            prod_true *= zs[i];
        }
        EXPECT_LT(std::abs(sum - sum_true), 1e-10);
        EXPECT_LT(std::abs(prod - prod_true), 1e-10);
        EXPECT_LT(oracle::best_pairing_error(roots, zs), 1e-8);
    }
}

TEST(Roots, ResidualSmallUpToDegree32)
{
    // Roots drawn near the unit circle, where Prony polynomials place them.
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> radius(0.9, 1.1);
    std::uniform_real_distribution<double> turn(0.0, 1.0);
    for (const Index degree : {1, 5, 12, 24, 32})
    {
        for (int trial = 0; trial < 5; ++trial)
        {
            std::vector<Complex> zs;
            for (Index i = 0; i < degree; ++i)
            {
                zs.push_back(radius(rng) * oracle::phasor(turn(rng)));
            }
            const Complex lead    = Complex(0.5 + turn(rng), turn(rng));
            const ComplexVector c = lead * oracle::expand_roots(zs);
            const double scale    = c.cwiseAbs().maxCoeff();
            const auto roots      = polynomial_roots(c);
            ASSERT_EQ(static_cast<Index>(roots.size()), degree);
            for (const Complex z : roots)
            {
                EXPECT_LT(std::abs(polyval(c, z)), 1e-6 * scale) << "degree " << degree;
            }
        }
    }
}

TEST(Roots, RejectsBadInput)
{
    ComplexVector c(3);
    c << 0, 1, 1;
    EXPECT_THROW(polynomial_roots(c), InvalidArgument);
    EXPECT_THROW(polynomial_roots(ComplexVector::Ones(1)), InvalidArgument);
}

TEST(Polyval, Horner)
{
    ComplexVector c(3);
    c << 2, -3, 1;
    EXPECT_NEAR(std::abs(polyval(c, Complex(2, 0)) - Complex(3, 0)), 0.0, 1e-15);
}

} // namespace
