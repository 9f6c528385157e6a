#pragma once

// Lorentzian line shape, its momentum-space weight and the localized
// vector-potential packet built from it.

#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "qmeas/errors.hpp"
#include "qmeas/numerics/quadrature.hpp"
#include "qmeas/quantities.hpp"

namespace qmeas {

using CVec3 = Eigen::Vector3cd;

/// Photon emitted with lifetime tau around angular frequency omega_if.
/// In a medium of relative permittivity eps_r the light speed entering
/// |k_if| and the decay length is c / sqrt(eps_r).
class PhotonPacket
{
public:
    struct Params
    {
        double omega_if = 0.0;       ///< rad/s
        double tau = 0.0;            ///< s
        Vec3 k_dir = Vec3::UnitZ();
        double n_k = 5.0;
        Vec3 pol_dir = Vec3::UnitX();
        Vec3 center = Vec3::Zero();  ///< m
        double eps_r = 1.0;
    };

    explicit PhotonPacket(const Params& p, const PhysicalConstants& k = codata2018()) : p_(p), k_(k)
    {
        if (!(p.omega_if > 0.0) || !(p.tau > 0.0))
            throw invalid_input("PhotonPacket: omega_if and tau must be positive");
        if (!(p.n_k >= 1.0))
            throw invalid_input("PhotonPacket: n_k must be >= 1");
        if (!(p.eps_r >= 1.0))
            throw invalid_input("PhotonPacket: eps_r must be >= 1");
        const double kn = p.k_dir.norm(), pn = p.pol_dir.norm();
        if (!(kn > 0.0) || !(pn > 0.0))
            throw invalid_input("PhotonPacket: direction vectors must be non-zero");
        p_.k_dir = p.k_dir / kn;
        const Vec3 pol = p.pol_dir / pn;
        if (std::abs(pol.dot(p_.k_dir)) > 1e-9)
            throw invalid_input("PhotonPacket: polarization must be orthogonal to the propagation direction");
        p_.pol_dir = (pol - pol.dot(p_.k_dir) * p_.k_dir).normalized();
        if (2.0 * light_speed() * p.tau * wave_number() < 10.0)
            throw invalid_input("PhotonPacket: line too broad, need 2 c tau |k_if| >= 10");
    }

    [[nodiscard]] const Params& params() const noexcept { return p_; }
    [[nodiscard]] const PhysicalConstants& constants() const noexcept { return k_; }
    [[nodiscard]] double omega_if() const noexcept { return p_.omega_if; }
    [[nodiscard]] double tau() const noexcept { return p_.tau; }
    [[nodiscard]] double n_k() const noexcept { return p_.n_k; }
    [[nodiscard]] const Vec3& k_dir() const noexcept { return p_.k_dir; }
    [[nodiscard]] const Vec3& pol_dir() const noexcept { return p_.pol_dir; }
    [[nodiscard]] const Vec3& center() const noexcept { return p_.center; }

    /// Light speed in the packet's medium.
    [[nodiscard]] double light_speed() const noexcept { return k_.c / std::sqrt(p_.eps_r); }
    /// |k_if|.
    [[nodiscard]] double wave_number() const noexcept { return p_.omega_if / light_speed(); }
    [[nodiscard]] Vec3 wave_vector() const { return wave_number() * p_.k_dir; }
    /// 2 c tau, the amplitude decay length.
    [[nodiscard]] double decay_length() const noexcept { return 2.0 * light_speed() * p_.tau; }
    /// 1 / (2 c tau), half width of the momentum line.
    [[nodiscard]] double line_half_width() const noexcept { return 1.0 / decay_length(); }
    /// 2 c tau |k_if|, large for narrow lines.
    [[nodiscard]] double quality() const noexcept { return decay_length() * wave_number(); }
    /// Effective radius 2 n_k c tau.
    [[nodiscard]] double radius() const noexcept { return p_.n_k * decay_length(); }
    /// C = sqrt(2 hbar n_k^3 / (3 eps0 omega_if)).
    [[nodiscard]] double amplitude_scale() const noexcept
    {
        return std::sqrt(2.0 * k_.hbar * p_.n_k * p_.n_k * p_.n_k / (3.0 * k_.eps0 * p_.omega_if));
    }

    /// Same packet moved by `d`.
    [[nodiscard]] PhotonPacket shifted(const Vec3& d) const
    {
        Params q = p_;
        q.center += d;
        return PhotonPacket(q, k_);
    }

private:
    Params p_;
    PhysicalConstants k_;
};

/// 1 / ((omega - omega_if)^2 + 1/(4 tau^2)).
[[nodiscard]] inline double lorentzian_omega(double omega, const PhotonPacket& packet)
{
    const double d = omega - packet.omega_if();
    const double t = packet.tau();
    return 1.0 / (d * d + 1.0 / (4.0 * t * t));
}

/// Momentum-space weight of the packet (m^3):
/// 4 pi |k_if| / (c tau |k| (|k - k_if|^2 + 1/(4 c^2 tau^2))^2).
/// Normalized so that (1/8 pi^3) times its integral over k-space tends to 1
/// for narrow lines.
[[nodiscard]] inline double momentum_lineshape(const Vec3& k, const PhotonPacket& packet)
{
    const double kn = k.norm();
    if (!(kn > 0.0))
        throw invalid_input("momentum_lineshape: |k| must be positive");
    const double a = packet.line_half_width();
    const double d2 = (k - packet.wave_vector()).squaredNorm() + a * a;
    const double ct = packet.light_speed() * packet.tau();
    return 4.0 * pi * packet.wave_number() / (ct * kn * d2 * d2);
}

namespace detail {

/// Spherical k-space grid hints around the line: radial breakpoints at the
/// peak and a few half widths away, polar breakpoints where the forward cone
/// of half angle ~ 1/(2 c tau |k_if|) sits.
inline BallDomain line_domain(const PhotonPacket& packet)
{
    const double a = packet.line_half_width();
    const double K = packet.wave_number();
    BallDomain dom;
    dom.axis = packet.k_dir();
    dom.radius = INFINITY;
    for (double m : {-30.0, -3.0, -1.0, 0.0, 1.0, 3.0, 30.0})
        if (K + m * a > 0.0)
            dom.radial_breakpoints.push_back(K + m * a);
    dom.radial_breakpoints.push_back(2.0 * K);
    const double w = 0.5 / (packet.quality() * packet.quality());
    for (double m : {1000.0, 100.0, 10.0, 1.0})
        if (m * w < 1.0)
            dom.polar_breakpoints.push_back(1.0 - m * w);
    dom.polar_breakpoints.push_back(0.0);
    return dom;
}

}  // namespace detail

/// (1/8 pi^3) times the k-space integral of momentum_lineshape, by spherical
/// quadrature over all of k-space.
[[nodiscard]] inline QuadratureResult<double> lineshape_normalization(const PhotonPacket& packet,
                                                                      const QuadratureOptions& opts = {1e-9, 0.0,
                                                                                                       20000000})
{
    const BallDomain dom = detail::line_domain(packet);
    auto res = integrate_radial_3d(
        [&](const Vec3& k) -> double { return k.isZero(0.0) ? 0.0 : momentum_lineshape(k, packet); }, dom, opts,
        Symmetry::azimuthal);
    res.value /= 8.0 * pi * pi * pi;
    res.error /= 8.0 * pi * pi * pi;
    return res;
}

/// Closed-form packet amplitude C exp(i k_if.(r - r_o(t)) - |r - r_o(t)|/(2 c tau)) n
/// with the centre moving as r_o(t) = r_o - k_dir c t.
[[nodiscard]] inline CVec3 packet_amplitude(const Vec3& r, double t, const PhotonPacket& packet)
{
    const Vec3 origin = packet.center() - packet.k_dir() * (packet.light_speed() * t);
    const Vec3 rel = r - origin;
    const std::complex<double> phase(-rel.norm() / packet.decay_length(), packet.wave_vector().dot(rel));
    return (packet.amplitude_scale() * std::exp(phase)) * packet.pol_dir().cast<std::complex<double>>();
}

/// Packet amplitude at t = 0 from the inverse Fourier transform of the
/// momentum weight, evaluated by quadrature. Validation oracle for
/// packet_amplitude; slow.
[[nodiscard]] inline CVec3 packet_amplitude_fourier(const Vec3& r, const PhotonPacket& packet,
                                                    const QuadratureOptions& opts = {3e-4, 0.0, 50000000})
{
    using cd = std::complex<double>;
    const Vec3 rel = r - packet.center();
    const double along = rel.dot(packet.k_dir());
    const double across = (rel - along * packet.k_dir()).norm();
    const BallDomain dom = detail::line_domain(packet);
    const Vec3 kdir = packet.k_dir();

    // k = |k| (u k_dir + sqrt(1-u^2) e_perp); the azimuthal integral of
    // exp(i k_perp . r_perp) is 2 pi J0(|k| sqrt(1-u^2) r_perp)
    auto g = [&](double kn, double u) -> cd {
        if (kn == 0.0)
            return 0.0;
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        const Vec3 k = kn * (u * kdir + s * kdir.unitOrthogonal());
        const double azimuthal = 2.0 * pi * std::cyl_bessel_j(0.0, kn * s * across);
        return momentum_lineshape(k, packet) * azimuthal * std::exp(cd(0.0, kn * u * along));
    };
    const auto res = integrate_ball_polar(g, INFINITY, opts, dom.radial_breakpoints, dom.polar_breakpoints);
    const cd value = packet.amplitude_scale() * res.value / (8.0 * pi * pi * pi);
    return value * packet.pol_dir().cast<cd>();
}

struct PacketNormSq
{
    double closed_form = 0.0;  ///< C^2 pi (2 c tau)^3 (1 - ((2 n_k + 1)^2 + 1) e^{-2 n_k} / 2)
    double numeric = 0.0;      ///< quadrature of |A|^2 over the ball of radius 2 n_k c tau
    double correction_factor = 0.0;
};

[[nodiscard]] inline PacketNormSq packet_norm_sq_integral(const PhotonPacket& packet,
                                                          const QuadratureOptions& opts = {1e-10, 0.0, 1000000})
{
    const double C = packet.amplitude_scale();
    const double L = packet.decay_length();
    const double nk = packet.n_k();
    PacketNormSq out;
    out.correction_factor = 1.0 - 0.5 * ((2.0 * nk + 1.0) * (2.0 * nk + 1.0) + 1.0) * std::exp(-2.0 * nk);
    out.closed_form = C * C * pi * L * L * L * out.correction_factor;

    BallDomain dom;
    dom.center = packet.center();
    dom.axis = packet.k_dir();
    dom.radius = packet.radius();
    dom.radial_breakpoints = {L, 4.0 * L};
    out.numeric = integrate_radial_3d(
                      [&](const Vec3& x) -> double { return packet_amplitude(x, 0.0, packet).squaredNorm(); }, dom,
                      opts, Symmetry::azimuthal)
                      .value;
    return out;
}

}  // namespace qmeas
