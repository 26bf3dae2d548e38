#pragma once

// Nystrom boundary-integral solver for exterior Helmholtz scattering by a
// smooth closed curve under Dirichlet, Neumann, or variable-impedance
// boundary conditions, plus a physical-optics fast approximation.
//
// Formulation: combined single/double-layer ansatz
//     u^s = (D + i eta S) phi,   eta = k,
// resonance-free for every k > 0. The Dirichlet trace gives a second-kind
// equation; Neumann/impedance traces involve the hypersingular operator T,
// handled through Maue's identity
//     T phi = d/ds S[dphi/ds] + k^2 nu . S[nu phi].
// Periodic logarithmic singularities use the Martensen-Kussmaul
// trigonometric quadrature; smooth parts use the trapezoid rule.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "echoform/analytic_oracle.hpp"
#include "echoform/geometry.hpp"

namespace echoform {


/// Positive impedance coefficient lambda(t) on the parameter circle.
struct ImpedanceProfile {
    std::function<double(double)> fn;
    std::string text;

    static ImpedanceProfile constant(double value) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", value);
        return {[value](double) { return value; }, buf};
    }

    double operator()(double t) const { return fn(t); }

    /// Checks finiteness and strict positivity on 4096 sample points;
    /// throws with a witness parameter on failure.
    void validate() const {
        if (!fn) throw std::invalid_argument("ImpedanceProfile: empty evaluator");
        for (int i = 0; i < 4096; ++i) {
            const double t = -pi + 2.0 * pi * double(i) / 4096.0;
            const double v = fn(t);
            if (!std::isfinite(v) || v <= 0.0)
                throw std::invalid_argument("ImpedanceProfile: nonpositive value " +
                                            std::to_string(v) + " at t=" + std::to_string(t));
        }
    }
};

/// Scatterer: boundary curve plus boundary condition.
struct ScattererSpec {
    BoundaryCurve curve;
    BoundaryKind bc = BoundaryKind::Dirichlet;
    ImpedanceProfile profile;  // meaningful only for the impedance case

    ScattererSpec(BoundaryCurve c, BoundaryKind b, ImpedanceProfile p = {})
        : curve(std::move(c)), bc(b), profile(std::move(p)) {
        if (bc == BoundaryKind::Impedance) profile.validate();
    }
};

/// Minimum even quadrature size: at least ten nodes per wavelength along the
/// boundary, never below 64.
inline int required_nystrom_size(const BoundaryCurve& curve, double k) {
    const int by_wavelength = int(std::ceil(10.0 * k * curve.length() / (2.0 * pi)));
    int n = std::max(64, by_wavelength);
    if (n % 2 != 0) ++n;
    return n;
}

struct SolveRequest {
    ScattererSpec spec;
    double k = 1.0;
    std::vector<Direction> incident;
    std::vector<Direction> observation;
    int quadrature_size = 0;  // 0: pick the minimum admissible size

    SolveRequest(ScattererSpec s, double wavenumber, std::vector<Direction> inc,
                 std::vector<Direction> obs, int n = 0)
        : spec(std::move(s)), k(wavenumber), incident(std::move(inc)),
          observation(std::move(obs)), quadrature_size(n) {}
};

struct SolverBreakdownError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Geometry sampled at the 2n Nystrom nodes t_i = -pi + i pi/n.
struct CurveSamples {
    std::vector<double> t;
    std::vector<Vec2> x, dx;
    std::vector<double> speed;
    std::vector<Vec2> nu;        // unit outward normals
    std::vector<double> kappa;   // signed curvature

    CurveSamples(const BoundaryCurve& curve, int N)
        : t(N), x(N), dx(N), speed(N), nu(N), kappa(N) {
        for (int i = 0; i < N; ++i) {
            t[i] = -pi + 2.0 * pi * double(i) / double(N);
            x[i] = curve.point(t[i]);
            dx[i] = curve.derivative(t[i]);
            speed[i] = dx[i].norm();
            if (speed[i] < 1e-12)
                throw SingularParametrizationError("CurveSamples: vanishing speed");
            nu[i] = Vec2{dx[i].y, -dx[i].x} / speed[i];
            const Vec2 ddx = curve.second_derivative(t[i]);
            kappa[i] = dx[i].cross(ddx) / (speed[i] * speed[i] * speed[i]);
        }
    }
};

/// Martensen-Kussmaul weights R_{|i-j|} for ln(4 sin^2((t-s)/2)) on 2n nodes.
inline std::vector<double> log_quadrature_weights(int n) {
    std::vector<double> R(2 * n);
    for (int d = 0; d < 2 * n; ++d) {
        double s = 0.0;
        for (int m = 1; m < n; ++m) s += std::cos(m * d * pi / n) / double(m);
        R[std::size_t(d)] = -(2.0 * pi / n) * s - (pi / (n * n)) * (d % 2 == 0 ? 1.0 : -1.0);
    }
    return R;
}

/// Spectral differentiation matrix on the 2n-point periodic grid.
inline Eigen::MatrixXd trig_differentiation_matrix(int N) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double h = 2.0 * pi * double(i - j) / double(N);
            D(i, j) = 0.5 * ((i - j) % 2 == 0 ? 1.0 : -1.0) / std::tan(0.5 * h);
        }
    return D;
}

constexpr double euler_gamma = 0.57721566490153286;

enum AssembleFlags : unsigned {
    kNeedS = 1u,
    kNeedK = 2u,
    kNeedKp = 4u,
    kNeedT = 8u,
};

/// Shared-kernel assembly of the requested boundary operators.
struct Operators {
    Eigen::MatrixXcd S, K, Kp, T;

    Operators(const CurveSamples& cs, double k, unsigned flags) {
        const int N = int(cs.t.size());
        const int n = N / 2;
        const auto R = log_quadrature_weights(n);
        const double w = pi / double(n);

        const bool wantS = flags & kNeedS;
        const bool wantK = flags & kNeedK;
        const bool wantKp = flags & kNeedKp;
        const bool wantT = flags & kNeedT;

        if (wantS) S.resize(N, N);
        if (wantK) K.resize(N, N);
        if (wantKp) Kp.resize(N, N);
        Eigen::MatrixXcd Ssig, Snn;  // weight-free and nu.nu-weighted single layers
        if (wantT) {
            Ssig.resize(N, N);
            Snn.resize(N, N);
        }

        // diag of the split single layer with an arbitrary smooth weight wgt:
        //   R0 * (-wgt/(4 pi)) + w * (i/4 - gamma/(2 pi) - ln(k |x'|/2)/(2 pi)) * wgt
        auto diagS = [&](double sp, double wgt) {
            const double re = -euler_gamma / (2.0 * pi) - std::log(0.5 * k * sp) / (2.0 * pi);
            return R[0] * Complex(-wgt / (4.0 * pi), 0.0) + w * Complex(re * wgt, 0.25 * wgt);
        };

        for (int i = 0; i < N; ++i) {
            const double sp = cs.speed[i];
            const Complex dlDiag = w * Complex(-cs.kappa[i] * sp / (4.0 * pi), 0.0);
            if (wantS) S(i, i) = diagS(sp, sp);
            if (wantK) K(i, i) = dlDiag;
            if (wantKp) Kp(i, i) = dlDiag;
            if (wantT) {
                Ssig(i, i) = diagS(sp, 1.0);
                Snn(i, i) = diagS(sp, sp);
            }

            for (int j = 0; j < i; ++j) {
                const Vec2 d = cs.x[i] - cs.x[j];
                const double r = d.norm();
                const double kr = k * r;
                const double J0 = ::j0(kr), Y0 = ::y0(kr);
                const double logw =
                    std::log(4.0 * std::pow(std::sin(0.5 * (cs.t[i] - cs.t[j])), 2));
                const double Rd = R[std::size_t(i - j)];

                // single-layer family: kernel (i/4) H0(kr) * wgt
                auto fillS = [&](Eigen::MatrixXcd& A, int a, int b, double wgt) {
                    const Complex full = Complex(-0.25 * Y0, 0.25 * J0) * wgt;
                    const double M1 = -J0 / (4.0 * pi) * wgt;
                    A(a, b) = Rd * M1 + w * (full - M1 * logw);
                };
                if (wantS) {
                    fillS(S, i, j, cs.speed[j]);
                    fillS(S, j, i, cs.speed[i]);
                }
                if (wantT) {
                    fillS(Ssig, i, j, 1.0);
                    fillS(Ssig, j, i, 1.0);
                    const double nn = cs.nu[i].dot(cs.nu[j]);
                    fillS(Snn, i, j, nn * cs.speed[j]);
                    fillS(Snn, j, i, nn * cs.speed[i]);
                }

                if (wantK || wantKp) {
                    const double J1 = ::j1(kr), Y1 = ::y1(kr);
                    // double-layer family: kernel (i k/4) H1(kr) * proj / r
                    auto fillDL = [&](Eigen::MatrixXcd& A, int a, int b, double proj) {
                        const Complex full = Complex(-0.25 * Y1, 0.25 * J1) * (k * proj / r);
                        const double M1 = -k * J1 / (4.0 * pi) * (proj / r);
                        A(a, b) = Rd * M1 + w * (full - M1 * logw);
                    };
                    if (wantK) {
                        // K(a,b): (x_a - x_b).(nu |x'|)(t_b)
                        fillDL(K, i, j, d.dot(cs.nu[j] * cs.speed[j]));
                        fillDL(K, j, i, (-1.0 * d).dot(cs.nu[i] * cs.speed[i]));
                    }
                    if (wantKp) {
                        // K'(a,b): (x_b - x_a).nu(t_a) |x'(t_b)|
                        fillDL(Kp, i, j, (-1.0 * d).dot(cs.nu[i]) * cs.speed[j]);
                        fillDL(Kp, j, i, d.dot(cs.nu[j]) * cs.speed[i]);
                    }
                }
            }
        }

        if (wantT) {
            const Eigen::MatrixXd Dm = trig_differentiation_matrix(N);
            Eigen::VectorXd inv_speed(N);
            for (int i = 0; i < N; ++i) inv_speed(i) = 1.0 / cs.speed[i];
            T = inv_speed.asDiagonal() * (Dm * (Ssig * Dm).eval()).eval() + (k * k) * Snn;
        }
    }
};

}  // namespace detail

/// Dense Nystrom discretizations of the four boundary operators at N nodes,
/// exposed for verification (Calderon identities, circle eigenvalues).
struct OperatorBundle {
    detail::CurveSamples samples;
    Eigen::MatrixXcd S, K, Kp, T;
    double k;
};

inline OperatorBundle boundary_operators(const BoundaryCurve& curve, double k, int N) {
    if (k <= 0.0) throw std::invalid_argument("boundary_operators: k must be positive");
    if (N < 4 || N % 2 != 0) throw std::invalid_argument("boundary_operators: N must be even");
    detail::CurveSamples cs(curve, N);
    detail::Operators ops(cs, k,
                          detail::kNeedS | detail::kNeedK | detail::kNeedKp | detail::kNeedT);
    return {std::move(cs), std::move(ops.S), std::move(ops.K), std::move(ops.Kp),
            std::move(ops.T), k};
}

/// Factorized boundary system for one (scatterer, wavenumber) pair; the
/// factorization is reused across all incident and observation directions.
class FarFieldSolver {
  public:
    FarFieldSolver(const ScattererSpec& spec, double k, int N = 0)
        : k_(k), samples_(spec.curve, N > 0 ? N : required_nystrom_size(spec.curve, k)) {
        if (k <= 0.0) throw std::invalid_argument("FarFieldSolver: k must be positive");
        const int required = required_nystrom_size(spec.curve, k);
        const int actual = int(samples_.t.size());
        if (actual < required)
            throw std::invalid_argument("FarFieldSolver: quadrature size " +
                                        std::to_string(actual) + " below required " +
                                        std::to_string(required));
        if (actual % 2 != 0)
            throw std::invalid_argument("FarFieldSolver: quadrature size must be even");
        build(spec);
    }

    double k() const { return k_; }
    int size() const { return int(samples_.t.size()); }

    /// Boundary density for one incident plane-wave direction.
    Eigen::VectorXcd solve_density(const Direction& theta) const {
        return lu_.solve(rhs(theta));
    }

    /// Far-field value from a solved density.
    Complex far_field(const Direction& xhat, const Eigen::VectorXcd& density) const {
        const int N = size();
        const double w = 2.0 * pi / double(N);
        const Complex I(0.0, 1.0);
        Complex acc = 0.0;
        for (int j = 0; j < N; ++j) {
            const Complex ang = I * k_ * (-(xhat.vec().dot(samples_.nu[j])) + 1.0);
            acc += ang * std::exp(-I * k_ * xhat.dot(samples_.x[j])) * samples_.speed[j] *
                   density(j);
        }
        const Complex cphi = std::exp(I * pi / 4.0) / std::sqrt(8.0 * pi * k_);
        return cphi * w * acc;
    }

  private:
    void build(const ScattererSpec& spec) {
        using namespace detail;
        const int N = size();
        const Complex I(0.0, 1.0);
        const double eta = k_;  // coupling parameter

        unsigned flags = 0;
        switch (spec.bc) {
            case BoundaryKind::Dirichlet: flags = kNeedS | kNeedK; break;
            case BoundaryKind::Neumann: flags = kNeedKp | kNeedT; break;
            case BoundaryKind::Impedance: flags = kNeedS | kNeedK | kNeedKp | kNeedT; break;
        }
        Operators ops(samples_, k_, flags);

        Eigen::MatrixXcd A;
        bc_ = spec.bc;
        lambda_.resize(N);
        for (int i = 0; i < N; ++i)
            lambda_[std::size_t(i)] =
                bc_ == BoundaryKind::Impedance ? spec.profile(samples_.t[i]) : 0.0;

        switch (bc_) {
            case BoundaryKind::Dirichlet:
                A = ops.K + I * eta * ops.S;
                A.diagonal().array() += 0.5;
                break;
            case BoundaryKind::Neumann:
                A = ops.T + I * eta * ops.Kp;
                A.diagonal().array() -= 0.5 * I * eta;
                break;
            case BoundaryKind::Impedance: {
                Eigen::MatrixXcd trace = ops.K + I * eta * ops.S;
                trace.diagonal().array() += 0.5;
                Eigen::VectorXcd lam(N);
                for (int i = 0; i < N; ++i) lam(i) = I * k_ * lambda_[std::size_t(i)];
                A = ops.T + I * eta * ops.Kp + lam.asDiagonal() * trace;
                A.diagonal().array() -= 0.5 * I * eta;
                break;
            }
        }

        lu_.compute(A);
        if (lu_.rcond() < 1e-14)
            throw SolverBreakdownError("FarFieldSolver: system singular to working precision");
    }

    Eigen::VectorXcd rhs(const Direction& theta) const {
        const int N = size();
        const Complex I(0.0, 1.0);
        Eigen::VectorXcd b(N);
        for (int i = 0; i < N; ++i) {
            const Complex uin = std::exp(I * k_ * theta.dot(samples_.x[i]));
            switch (bc_) {
                case BoundaryKind::Dirichlet: b(i) = -uin; break;
                case BoundaryKind::Neumann:
                    b(i) = -I * k_ * theta.vec().dot(samples_.nu[i]) * uin;
                    break;
                case BoundaryKind::Impedance:
                    b(i) = -I * k_ *
                           (theta.vec().dot(samples_.nu[i]) + lambda_[std::size_t(i)]) * uin;
                    break;
            }
        }
        return b;
    }

    double k_;
    detail::CurveSamples samples_;
    BoundaryKind bc_ = BoundaryKind::Dirichlet;
    std::vector<double> lambda_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// Far-field matrix (rows: observation directions, cols: incident directions)
/// with one factorization shared across all directions.
inline Eigen::MatrixXcd solve_far_field(const SolveRequest& req) {
    FarFieldSolver solver(req.spec, req.k, req.quadrature_size);
    Eigen::MatrixXcd out(req.observation.size(), req.incident.size());
    for (std::size_t c = 0; c < req.incident.size(); ++c) {
        const Eigen::VectorXcd density = solver.solve_density(req.incident[c]);
        for (std::size_t r = 0; r < req.observation.size(); ++r)
            out(Eigen::Index(r), Eigen::Index(c)) = solver.far_field(req.observation[r], density);
    }
    return out;
}

/// Physical-optics (Kirchhoff) backscattering approximation: boundary integral
/// of the local reflection factor over the illuminated side, normalized by
/// C2 k^{-1/2}/2 with C2 = -e^{i pi/4}/sqrt(2 pi). Incidence is -xhat.
inline Complex po_far_field(const ScattererSpec& spec, const Direction& xhat, double k) {
    if (k <= 0.0) throw std::invalid_argument("po_far_field: k must be positive");
    const Complex I(0.0, 1.0);
    const int N = 2 * required_nystrom_size(spec.curve, k);
    const double w = 2.0 * pi / double(N);
    Complex acc = 0.0;
    for (int i = 0; i < N; ++i) {
        const double t = -pi + 2.0 * pi * double(i) / double(N);
        const Vec2 x = spec.curve.point(t);
        const Vec2 dx = spec.curve.derivative(t);
        const double sp = dx.norm();
        const Vec2 nu = Vec2{dx.y, -dx.x} / sp;
        const double c = nu.dot(xhat.vec());
        if (c <= 0.0) continue;  // shadow side for incidence -xhat
        double refl;
        switch (spec.bc) {
            case BoundaryKind::Dirichlet: refl = 1.0; break;
            case BoundaryKind::Neumann: refl = -1.0; break;
            default: {
                const double lam = spec.profile(t);
                refl = (lam - c) / (lam + c);
                break;
            }
        }
        acc += refl * (-2.0 * I * k * c) * std::exp(-2.0 * I * k * xhat.dot(x)) * sp * w;
    }
    const Complex c2 = -std::exp(I * pi / 4.0) / std::sqrt(2.0 * pi);
    return 0.5 * c2 / std::sqrt(k) * acc;
}

}  // namespace echoform
