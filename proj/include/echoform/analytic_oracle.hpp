#pragma once

// Closed-form far-field series for a disk under Dirichlet, Neumann, or
// constant-impedance boundary conditions. Serves as the ground truth for the
// boundary-integral solver and pins the far-field phase convention:
//
//   u^s(x) = e^{ikr}/sqrt(r) * (u_inf(xhat, theta, k) + O(1/r)),
//   incident wave e^{ik x.theta}, outgoing Hankel H^(1), so that
//   u_inf = sqrt(2/(pi k)) e^{-i pi/4} sum_n c_n e^{i n phi},
//
// with phi the angle between xhat and theta and c_n the mode coefficient
// selected by the boundary condition.

#include <complex>
#include <stdexcept>

#include "echoform/cylinder_functions.hpp"
#include "echoform/geometry.hpp"

namespace echoform {

enum class BoundaryKind { Dirichlet, Neumann, Impedance };

inline const char* to_string(BoundaryKind b) {
    switch (b) {
        case BoundaryKind::Dirichlet: return "dirichlet";
        case BoundaryKind::Neumann: return "neumann";
        default: return "impedance";
    }
}

inline BoundaryKind boundary_kind_from_string(const std::string& s) {
    if (s == "dirichlet") return BoundaryKind::Dirichlet;
    if (s == "neumann") return BoundaryKind::Neumann;
    if (s == "impedance") return BoundaryKind::Impedance;
    throw std::invalid_argument("unknown boundary condition '" + s + "'");
}

/// Disk scatterer for the separation-of-variables oracle.
struct DiskSpec {
    double radius = 1.5;
    Vec2 center{0.0, 0.0};
    BoundaryKind bc = BoundaryKind::Dirichlet;
    double lambda = 0.0;  // used when bc == Impedance; must be positive

    DiskSpec(double r, Vec2 c, BoundaryKind b, double lam = 0.0)
        : radius(r), center(c), bc(b), lambda(lam) {
        if (radius <= 0.0) throw std::invalid_argument("DiskSpec: radius must be positive");
        if (bc == BoundaryKind::Impedance && lambda <= 0.0)
            throw std::invalid_argument("DiskSpec: impedance lambda must be positive");
    }
};

struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Far-field pattern of the disk, observation xhat, incidence theta.
/// The off-center case carries the plane-wave translation phase
/// e^{ik (theta - xhat).center}.
inline std::complex<double> disk_far_field(const DiskSpec& spec, const Direction& xhat,
                                           const Direction& theta, double k) {
    using namespace std::complex_literals;
    if (k <= 0.0) throw std::invalid_argument("disk_far_field: k must be positive");
    const double ka = k * spec.radius;
    const int N = mode_count(ka);
    CylinderFunctions cf(N, ka);

    auto coeff = [&](int n) -> std::complex<double> {
        switch (spec.bc) {
            case BoundaryKind::Dirichlet: return -cf.j(n) / cf.h1(n);
            case BoundaryKind::Neumann: return -cf.jp(n) / cf.h1p(n);
            default:
                return -(cf.jp(n) + 1i * spec.lambda * cf.j(n)) /
                       (cf.h1p(n) + 1i * spec.lambda * cf.h1(n));
        }
    };

    // The value depends on the directions only through cos(phi); sum the
    // symmetric modes with a Chebyshev recurrence for cos(n phi).
    const double cphi = std::clamp(xhat.dot(theta), -1.0, 1.0);
    std::complex<double> sum = coeff(0);
    double tprev = 1.0, tcur = cphi;
    std::complex<double> tail = 0.0;
    for (int n = 1; n <= N; ++n) {
        const std::complex<double> cn = coeff(n);
        sum += 2.0 * cn * tcur;
        if (n >= N - 1) tail += 2.0 * std::abs(cn);
        const double tnext = 2.0 * cphi * tcur - tprev;
        tprev = tcur;
        tcur = tnext;
    }
    if (std::abs(tail) > 1e-12 * std::max(1.0, std::abs(sum)))
        throw TruncationError("disk_far_field: series tail above 1e-12, increase truncation");

    const std::complex<double> prefactor =
        std::sqrt(2.0 / (pi * k)) * std::exp(-1i * pi / 4.0);
    const std::complex<double> shift =
        std::exp(1i * k * (theta.vec() - xhat.vec()).dot(spec.center));
    return shift * prefactor * sum;
}

}  // namespace echoform
