#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "echoform/forward_solver.hpp"

using namespace echoform;
using Catch::Approx;

namespace {
ImpedanceProfile lambda2_profile() {
    return {[](double t) { return 2.0 + 0.5 * std::sin(t) + 0.2 * std::sin(5.0 * t); },
            "2+0.5*sin(t)+0.2*sin(5*t)"};
}
}  // namespace

TEST_CASE("quadrature size rule", "[solver]") {
    const auto disk = BoundaryCurve::disk(1.5);
    CHECK(required_nystrom_size(disk, 0.5) == 64);
    const int n50 = required_nystrom_size(disk, 50.0);
    CHECK(n50 % 2 == 0);
    CHECK(n50 >= int(std::ceil(10.0 * 50.0 * disk.length() / (2.0 * pi))));

    ScattererSpec spec(disk, BoundaryKind::Dirichlet);
    CHECK_THROWS_WITH(FarFieldSolver(spec, 50.0, 128), Catch::Matchers::ContainsSubstring("required"));
}

TEST_CASE("single layer on the circle matches its eigenvalue", "[solver]") {
    const double a = 1.5, k = 2.0;
    const auto B = boundary_operators(BoundaryCurve::disk(a), k, 128);
    const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(128);
    const Eigen::VectorXcd Sone = B.S * one;
    CylinderFunctions cf(2, k * a);
    const Complex expect = Complex(0.0, pi * a / 2.0) * cf.j(0) * cf.h1(0);
    for (int i = 0; i < 128; i += 13) CHECK(std::abs(Sone(i) - expect) < 1e-8);
}

TEST_CASE("K and K' are adjoint up to the quadrature weights", "[solver]") {
    const auto B = boundary_operators(BoundaryCurve::egg(), 3.0, 128);
    double worst = 0.0;
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) {
            if (i == j) continue;
            worst = std::max(worst, std::abs(B.K(i, j) / B.samples.speed[std::size_t(j)] -
                                             B.Kp(j, i) / B.samples.speed[std::size_t(i)]));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("Calderon identity TS = K'^2 - I/4 on smooth densities", "[solver]") {
    // The identity holds spectrally on resolved trigonometric modes; the
    // unresolved Nyquist modes of the differentiation matrix are excluded.
    const int N = 256;
    const auto B = boundary_operators(BoundaryCurve::disk(1.5), 2.0, N);
    Eigen::MatrixXcd E = B.T * B.S - B.Kp * B.Kp;
    E.diagonal().array() += 0.25;
    Eigen::MatrixXcd E2 = B.S * B.T - B.K * B.K;
    E2.diagonal().array() += 0.25;
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(N);
        for (int m = 0; m <= N / 4; ++m) {
            const Complex c(coef(gen), coef(gen));
            for (int i = 0; i < N; ++i) {
                const double t = -pi + 2.0 * pi * i / double(N);
                v(i) += c * std::exp(Complex(0.0, m * t));
            }
        }
        const double scale = v.cwiseAbs().maxCoeff();
        CHECK((E * v).cwiseAbs().maxCoeff() < 1e-6 * scale);
        CHECK((E2 * v).cwiseAbs().maxCoeff() < 1e-6 * scale);
    }
}

TEST_CASE("solver matches the oracle across boundary conditions", "[solver]") {
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> ang(-pi, pi);
    for (auto bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Impedance}) {
        ScattererSpec spec(BoundaryCurve::disk(1.5), bc,
                           bc == BoundaryKind::Impedance ? ImpedanceProfile::constant(2.0)
                                                         : ImpedanceProfile{});
        const DiskSpec oracle(1.5, {0.0, 0.0}, bc, 2.0);
        for (double k : {1.0, 5.0, 20.0}) {
            FarFieldSolver solver(spec, k);
            for (int i = 0; i < 3; ++i) {
                const Direction th = Direction::from_angle(ang(gen));
                const Direction xh = Direction::from_angle(ang(gen));
                const Eigen::VectorXcd density = solver.solve_density(th);
                const Complex got = solver.far_field(xh, density);
                const Complex want = disk_far_field(oracle, xh, th, k);
                CHECK(std::abs(got - want) <= 1e-4 * std::abs(want));
            }
        }
    }
}

TEST_CASE("reciprocity on the egg", "[solver]") {
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> ang(-pi, pi);
    for (auto bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Impedance}) {
        ScattererSpec spec(BoundaryCurve::egg(), bc,
                           bc == BoundaryKind::Impedance ? lambda2_profile() : ImpedanceProfile{});
        for (double k : {5.0}) {
            FarFieldSolver solver(spec, k);
            for (int i = 0; i < 3; ++i) {
                const Direction th = Direction::from_angle(ang(gen));
                const Direction xh = Direction::from_angle(ang(gen));
                const Complex a = solver.far_field(xh, solver.solve_density(th));
                const Complex b = solver.far_field(-th, solver.solve_density(-xh));
                CHECK(std::abs(a - b) < 1e-6 * std::max(1.0, std::abs(a)));
            }
        }
    }
}

TEST_CASE("doubling the quadrature changes nothing above the floor", "[solver]") {
    ScattererSpec spec(BoundaryCurve::egg(), BoundaryKind::Neumann);
    const double k = 8.0;
    const Direction th = Direction::from_angle(0.9), xh = Direction::from_angle(-2.0);
    const int n0 = required_nystrom_size(spec.curve, k);
    FarFieldSolver s1(spec, k, n0), s2(spec, k, 2 * n0);
    const Complex a = s1.far_field(xh, s1.solve_density(th));
    const Complex b = s2.far_field(xh, s2.solve_density(th));
    CHECK(std::abs(a - b) < 1e-6 * std::abs(b));
}

TEST_CASE("translation leaves the far-field modulus unchanged", "[solver]") {
    const double k = 6.0;
    const Direction th = Direction::from_angle(0.2), xh = Direction::from_angle(2.5);
    ScattererSpec centered(BoundaryCurve::disk(1.2), BoundaryKind::Dirichlet);
    ScattererSpec moved(BoundaryCurve::disk(1.2, {0.8, -0.4}), BoundaryKind::Dirichlet);
    FarFieldSolver s1(centered, k), s2(moved, k);
    const Complex a = s1.far_field(xh, s1.solve_density(th));
    const Complex b = s2.far_field(xh, s2.solve_density(th));
    CHECK(std::abs(std::abs(a) - std::abs(b)) < 1e-6 * std::abs(a));
}

TEST_CASE("Rellich sign: k ||u_inf||^2 is positive for impedance scatterers", "[solver]") {
    ScattererSpec spec(BoundaryCurve::egg(), BoundaryKind::Impedance, lambda2_profile());
    const double k = 5.0;
    FarFieldSolver solver(spec, k);
    const Eigen::VectorXcd density = solver.solve_density(Direction::from_angle(0.6));
    double norm2 = 0.0;
    for (int i = 0; i < 360; ++i) {
        const Complex u = solver.far_field(Direction::from_angle(-pi + 2 * pi * i / 360.0), density);
        norm2 += std::norm(u) * (2.0 * pi / 360.0);
    }
    CHECK(k * norm2 > 0.0);
}

TEST_CASE("physical optics approximation", "[solver]") {
    const Direction xh = Direction::from_angle(0.0);

    // magnitude within 10% of the full solver at k = 50 (Dirichlet disk)
    ScattererSpec dir(BoundaryCurve::disk(1.5), BoundaryKind::Dirichlet);
    FarFieldSolver solver(dir, 50.0);
    const Complex full = solver.far_field(xh, solver.solve_density(-xh));
    const Complex po = po_far_field(dir, xh, 50.0);
    CHECK(std::abs(po) == Approx(std::abs(full)).epsilon(0.10));

    // a huge constant impedance reproduces the sound-soft integral
    ScattererSpec big(BoundaryCurve::disk(1.5), BoundaryKind::Impedance,
                      ImpedanceProfile::constant(1e9));
    CHECK(std::abs(po_far_field(big, xh, 12.0) - po_far_field(dir, xh, 12.0)) < 1e-6);

    // Neumann flips the sign of the Dirichlet approximation
    ScattererSpec neu(BoundaryCurve::disk(1.5), BoundaryKind::Neumann);
    const Complex pd = po_far_field(dir, xh, 30.0), pn = po_far_field(neu, xh, 30.0);
    CHECK(std::abs(pn + pd) < 1e-9 * std::abs(pd));
}

TEST_CASE("impedance profile validation", "[solver]") {
    CHECK_THROWS_WITH(
        ScattererSpec(BoundaryCurve::disk(1.0), BoundaryKind::Impedance,
                      ImpedanceProfile{[](double t) { return std::sin(t); }, "sin(t)"}),
        Catch::Matchers::ContainsSubstring("nonpositive"));
}
