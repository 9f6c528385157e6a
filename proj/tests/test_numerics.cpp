#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qmeas/numerics/linear_algebra.hpp"
#include "qmeas/numerics/quadrature.hpp"
#include "qmeas/numerics/root_finding.hpp"
#include "qmeas/quantities.hpp"

using namespace qmeas;

// ---------------------------------------------------------------- roots

TEST(FindRoot, DottieNumber)
{
    RootProblem p{[](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-14};
    EXPECT_NEAR(find_root(p), 0.7390851332151607, 1e-13);
}

TEST(FindRoot, ReversedBracketAndExactEndpoint)
{
    RootProblem p{[](double x) { return x * x - 2.0; }, 2.0, 0.0, 1e-13};
    EXPECT_NEAR(find_root(p), std::sqrt(2.0), 1e-12);
    RootProblem q{[](double x) { return x - 1.0; }, 1.0, 3.0};
    EXPECT_EQ(find_root(q), 1.0);
}

TEST(FindRoot, NoSignChangeReportsBestEstimate)
{
    RootProblem p{[](double x) { return x * x + 1.0; }, -1.0, 2.0};
    try {
        (void)find_root(p);
        FAIL() << "expected root_failure";
    } catch (const root_failure& e) {
        EXPECT_EQ(e.best_estimate(), -1.0);
        EXPECT_EQ(e.residual(), 2.0);
    }
}

TEST(FindRoot, RejectsMissingFunction)
{
    EXPECT_THROW((void)find_root(RootProblem{}), invalid_input);
}

// ---------------------------------------------------------------- quadrature

TEST(Integrate, SmoothFinite)
{
    const auto r = integrate([](double x) { return std::sin(x); }, 0.0, pi);
    EXPECT_NEAR(r.value, 2.0, 1e-12);
    EXPECT_LE(r.error, 1e-9);
}

TEST(Integrate, SemiInfiniteWithLargeScale)
{
    // decay length 1e-7, as for SI wave numbers
    const double s = 1e7;
    const auto r = integrate([&](double x) { return s * std::exp(-s * x); }, 0.0, INFINITY, {1e-10}, {1.0 / s});
    EXPECT_NEAR(r.value, 1.0, 1e-9);
}

TEST(Integrate, EndpointSingularity)
{
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-8, 0.0, 200000});
    EXPECT_NEAR(r.value, 2.0, 1e-7);
}

TEST(Integrate, ComplexValued)
{
    using cd = std::complex<double>;
    const auto r = integrate([](double x) { return std::exp(cd(0.0, x)); }, 0.0, pi);
    EXPECT_NEAR(r.value.real(), 0.0, 1e-12);
    EXPECT_NEAR(r.value.imag(), 2.0, 1e-12);
}

TEST(Integrate, BudgetExhaustionKeepsPartialResult)
{
    try {
        (void)integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, {1e-14, 0.0, 200});
        FAIL() << "expected quadrature_failure";
    } catch (const quadrature_failure<double>& e) {
        EXPECT_GT(e.partial().evals, 0u);
        EXPECT_TRUE(std::isfinite(e.partial().value));
    }
}

TEST(Integrate, RejectsBadOptions)
{
    EXPECT_THROW((void)integrate([](double x) { return x; }, 0.0, 1.0, {0.0, 0.0}), invalid_input);
    EXPECT_THROW((void)integrate([](double x) { return x; }, 1.0, 0.0), invalid_input);
}

TEST(Radial3d, BallVolumeAndMoment)
{
    BallDomain dom;
    dom.radius = 2.0;
    const auto v = integrate_radial_3d([](const Vec3&) { return 1.0; }, dom, {1e-12}, Symmetry::azimuthal);
    EXPECT_NEAR(v.value, 4.0 * pi / 3.0 * 8.0, 1e-10);
    // x^2 over the unit ball off the polar axis needs the full angular integral
    dom.radius = 1.0;
    dom.axis = Vec3(0, 0, 1);
    const auto m = integrate_radial_3d([](const Vec3& x) { return x.x() * x.x(); }, dom, {1e-10});
    EXPECT_NEAR(m.value, 4.0 * pi / 15.0, 1e-9);
}

TEST(Radial3d, ExponentialOverAllSpaceOffCentre)
{
    BallDomain dom;
    dom.center = Vec3(1.0, -2.0, 0.5);
    dom.axis = Vec3(1, 1, 0);
    dom.radius = INFINITY;
    dom.radial_breakpoints = {1.0, 10.0};
    const auto r = integrate_radial_3d([&](const Vec3& x) { return std::exp(-(x - dom.center).norm()); }, dom,
                                       {1e-11}, Symmetry::azimuthal);
    EXPECT_NEAR(r.value, 8.0 * pi, 1e-9);
}

// ---------------------------------------------------------------- linear algebra

TEST(LeastNorm, UnderdeterminedPicksMinimumNorm)
{
    RMatrix A(1, 2);
    A << 1.0, 1.0;
    RVector b(1);
    b << 2.0;
    const RVector x = least_norm_solve(A, b);
    EXPECT_NEAR(x(0), 1.0, 1e-14);
    EXPECT_NEAR(x(1), 1.0, 1e-14);
}

TEST(LeastNorm, RankDeficientComplex)
{
    CMatrix A(2, 2);
    A << cplx(1, 1), cplx(2, 2), cplx(2, 2), cplx(4, 4);
    CVector b(2);
    b << cplx(1, 1), cplx(2, 2);
    const auto r = least_norm_solve_detailed<cplx>(A, b);
    EXPECT_EQ(r.rank, 1);
    EXPECT_LT(r.residual, 1e-12);
    // minimum norm solution lies along (1, 2)
    EXPECT_NEAR(std::abs(r.x(1) - 2.0 * r.x(0)), 0.0, 1e-12);
    EXPECT_NEAR(r.x.norm(), 1.0 / std::sqrt(5.0), 1e-12);
}

TEST(LeastNorm, DimensionMismatch)
{
    EXPECT_THROW((void)least_norm_solve(RMatrix(RMatrix::Identity(2, 2)), RVector(RVector::Ones(3))), invalid_input);
}

TEST(HermitianEigen, KnownSpectrumAndGauge)
{
    CMatrix M(2, 2);
    M << 2.0, cplx(0, 1), cplx(0, -1), 2.0;
    const auto e = hermitian_eigendecomposition(M);
    EXPECT_NEAR(e.values(0), 1.0, 1e-14);
    EXPECT_NEAR(e.values(1), 3.0, 1e-14);
    for (int i = 0; i < 2; ++i) {
        Eigen::Index lead;
        e.vectors.col(i).cwiseAbs().maxCoeff(&lead);
        EXPECT_NEAR(e.vectors(lead, i).imag(), 0.0, 1e-15);
        EXPECT_GT(e.vectors(lead, i).real(), 0.0);
        EXPECT_LT((M * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm(), 1e-13);
    }
}

TEST(HermitianEigen, DegenerateClusterOrderedByLeadIndex)
{
    CMatrix M = CMatrix::Identity(3, 3);
    M(2, 2) = 5.0;
    const auto e = hermitian_eigendecomposition(M);
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-14);
}

TEST(HermitianEigen, RejectsNonHermitian)
{
    CMatrix M(2, 2);
    M << 1.0, 2.0, 0.0, 1.0;
    EXPECT_THROW((void)hermitian_eigendecomposition(M), invalid_input);
}
