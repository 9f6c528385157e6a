#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "qmeas/rates.hpp"

using namespace qmeas;

namespace {

TransitionInputs zns(double b_k, int n_ph = 359)
{
    const auto& k = codata2018();
    TransitionInputs in;
    in.omega_if = angular_frequency(ev_to_joule(5.8), k);
    in.geometry.b_k = b_k;
    in.geometry.tau = 2.8e-15;
    in.n_k = 5.0;
    in.n_ph = n_ph;
    in.material = zinc_sulfide(k);
    return in;
}

/// Exact |int over the ball of radius R of exp(i k'.r - a|r|) d^3r|.
double finite_ball_integral(double kp, double a, double R)
{
    using cd = std::complex<double>;
    if (kp == 0.0)
        return 4.0 * pi / (a * a * a) * (2.0 - std::exp(-a * R) * (a * R * (a * R + 2.0) + 2.0));
    const cd s(-a, kp);
    const cd inner = std::exp(s * R) * (R / s - 1.0 / (s * s)) + 1.0 / (s * s);
    return std::abs(4.0 * pi / kp * inner.imag());
}

}  // namespace

TEST(GammaFactor, KnownValues)
{
    EXPECT_NEAR(gamma_factor(2.32), 0.590742, 1e-6);
    EXPECT_NEAR(gamma_factor(8.0), 0.013754, 1e-6);
    EXPECT_NEAR(gamma_factor(1e-9), 1.0, 1e-8);
    EXPECT_THROW((void)gamma_factor(0.0), invalid_input);
}

TEST(OptimalBk, RootOfStationarityCondition)
{
    const double b = optimal_bk();
    EXPECT_NEAR(b, 2.3185817, 1e-6);
    const auto [lhs, rhs] = optimal_bk_sides(b);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
    EXPECT_NEAR(lhs, 2.4532961, 1e-6);
    // it is a maximum of the rate factor
    EXPECT_GT(subsystem_rate_factor(b), subsystem_rate_factor(b - 0.05));
    EXPECT_GT(subsystem_rate_factor(b), subsystem_rate_factor(b + 0.05));
}

TEST(GoldenRule, BasicRates)
{
    const auto& k = codata2018();
    EXPECT_NEAR(golden_rule_rate(1.0, 1.0) * k.hbar, 2.0 * pi, 1e-12);
    EXPECT_THROW((void)golden_rule_rate(-1.0, 1.0), invalid_input);
    EXPECT_NEAR(dipole_spontaneous_rate(2.0, 1.0) / dipole_spontaneous_rate(1.0, 1.0), 8.0, 1e-12);
    EXPECT_THROW((void)dipole_spontaneous_rate(0.0, 1.0), invalid_input);
}

TEST(Geometry, RadiusAndValidation)
{
    SubsystemGeometry g{2.0, 1e-15, 4.0};
    EXPECT_NEAR(g.radius(), 2.0 * 2.0 * codata2018().c / 2.0 * 1e-15, 1e-20);
    g.b_k = 0.0;
    EXPECT_THROW(g.require_gamma_below_one(), invalid_input);
    g.b_k = 2.0;
    g.eps_r = 0.9;
    EXPECT_THROW(g.validate(), invalid_input);
}

TEST(Material, ZincSulfideIsValid)
{
    const auto m = zinc_sulfide();
    EXPECT_NO_THROW(m.validate());
    EXPECT_NEAR(m.cell_volume(), 1.5834e-28, 1e-31);
    auto bad = m;
    bad.m_eh = m.m_h;
    EXPECT_THROW(bad.validate(), invalid_input);
    bad = m;
    bad.band_gap = Energy::ev(-1.0);
    EXPECT_THROW(bad.validate(), invalid_input);
}

TEST(LatticeSum, QuadratureMatchesExactFiniteBall)
{
    const auto& k = codata2018();
    for (double b : {2.32, 8.0}) {
        for (double u : {0.0, 1.0, 2.0}) {
            TransitionInputs in = zns(b);
            const double L = 2.0 * k.c * in.tau();
            in.k_prime = u / L;
            const auto r = lattice_sum_integral(in, k);
            const double scale = detail::packet_amplitude_scale(in, k) / in.material.cell_volume();
            const double exact = scale * finite_ball_integral(in.k_prime, 1.0 / L, in.geometry.radius(k));
            EXPECT_NEAR(r.numeric / exact, 1.0, 1e-8) << "b " << b << " u " << u;
        }
    }
}

TEST(LatticeSum, ClosedFormExactAtZeroMismatch)
{
    for (double b : {2.32, 5.0, 8.0}) {
        const auto r = lattice_sum_integral(zns(b));
        EXPECT_NEAR(r.closed_form / r.numeric, 1.0, 1e-8) << b;
    }
}

TEST(LatticeSum, ClosedFormIsTheLargeBallLimit)
{
    TransitionInputs in = zns(40.0);
    in.k_prime = 1.0 / (2.0 * codata2018().c * in.tau());
    const auto r = lattice_sum_integral(in);
    EXPECT_NEAR(r.closed_form / r.numeric, 1.0, 1e-6);
}

TEST(LatticeSum, RatioLaw)
{
    EXPECT_DOUBLE_EQ(lattice_sum_ratio(0.0), 1.0);
    EXPECT_DOUBLE_EQ(lattice_sum_ratio(2.0), 0.04);
    EXPECT_DOUBLE_EQ(lattice_sum_ratio(1.0), 0.25);
}

TEST(Rates, ZincSulfideEmissionAndAbsorption)
{
    const TransitionInputs in = zns(optimal_bk());
    EXPECT_NEAR(kappa_bound_total(in) / 2.8131e9, 1.0, 1e-4);
    EXPECT_NEAR(kappa_down(in, false) / 3.6256e14, 1.0, 1e-4);
    EXPECT_NEAR(kappa_down(in, true) / kappa_down(in, false), std::sqrt(5.1), 1e-12);
    EXPECT_NEAR(kappa_up(in) / 9.7549e14, 1.0, 1e-4);
}

TEST(Rates, KappaIfPeaksAtZeroMismatch)
{
    TransitionInputs in = zns(optimal_bk());
    const double peak = kappa_if(in);
    in.k_prime = 1.0 / (2.0 * codata2018().c * in.tau());
    // fourth power of the bracket: (1 + u^2)^-4 at u = 1
    EXPECT_NEAR(kappa_if(in) / peak, 1.0 / 16.0, 1e-12);
}

TEST(Rates, BoundTotalMatchesQuadrature)
{
    for (double b : {2.32, 5.0, 8.0}) {
        const TransitionInputs in = zns(b);
        const auto q = kappa_bound_quadrature(in);
        EXPECT_NEAR((q.value + q.tail) / kappa_bound_total(in), 1.0, 1e-6) << b;
        EXPECT_LT(q.tail / q.value, 1e-5);
    }
}

TEST(Rates, EmissionQuadraticInPhotonCount)
{
    const double one = kappa_down(zns(2.32, 100), false);
    EXPECT_NEAR(kappa_down(zns(2.32, 300), false) / one, 9.0, 1e-12);
}

TEST(Rates, DimensionalAudit)
{
    TransitionInputs in = zns(optimal_bk());
    in.k_prime = 1e6;
    EXPECT_LT(rates_dimensional_audit(in, 10.0, 10.0, 0.1), 1e-12);
    EXPECT_LT(rates_dimensional_audit(in, 1e-3, 7.0, 3.0), 1e-12);
}

TEST(Rates, AbsorptionNeedsPhotonAboveGap)
{
    TransitionInputs in = zns(2.32);
    in.omega_if = angular_frequency(ev_to_joule(3.0));
    EXPECT_THROW((void)kappa_up(in), invalid_input);
}

TEST(Bands, PhotonEnergyAndPairDensity)
{
    const auto m = zinc_sulfide();
    EXPECT_DOUBLE_EQ(band_transition_photon_energy(0.0, m).in_ev(), 3.6);
    const double k1 = 1e9;
    const double rise = band_transition_photon_energy(k1, m).in_ev() - 3.6;
    EXPECT_NEAR(band_transition_photon_energy(2.0 * k1, m).in_ev() - 3.6, 4.0 * rise, 1e-12);
    const double d1 = pair_state_density(Energy::ev(4.6), m);
    EXPECT_NEAR(pair_state_density(Energy::ev(7.6), m) / d1, 2.0, 1e-12);
    EXPECT_THROW((void)pair_state_density(Energy::ev(3.0), m), invalid_input);
}

TEST(Inputs, Validation)
{
    TransitionInputs in = zns(2.32);
    in.n_ph = 0;
    EXPECT_THROW(in.validate(), invalid_input);
    in = zns(2.32);
    in.k_prime = -1.0;
    EXPECT_THROW(in.validate(), invalid_input);
    in = zns(2.32);
    in.geometry.tau = 0.0;
    EXPECT_THROW(in.validate(), invalid_input);
}
