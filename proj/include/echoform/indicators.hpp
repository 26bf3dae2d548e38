#pragma once

// Sampling-grid indicators. Both indicators depend on z only through
// xhat.z, so each direction's contribution factorizes into per-axis phase
// vectors and one complex rank-(M+1) product evaluates the whole grid:
//   sum_m c_m e^{i w_m xhat.z} = sum_m (c_m e^{i w_m xhat_x x_i}) (e^{i w_m xhat_y y_j}).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "echoform/calibration.hpp"
#include "echoform/data_synthesis.hpp"
#include "echoform/inversion.hpp"

namespace echoform {

struct GridSpec {
    double x_min = -3.0, x_max = 3.0, y_min = -3.0, y_max = 3.0;
    double h = 0.01;
};

/// Rectangular sampling grid of real indicator values. Dimensions are
/// pinned to 1 + (max - min)/h per axis, which must be integral.
class IndicatorGrid {
  public:
    explicit IndicatorGrid(const GridSpec& spec) : spec_(spec) {
        nx_ = axis_count(spec.x_min, spec.x_max, spec.h, "x");
        ny_ = axis_count(spec.y_min, spec.y_max, spec.h, "y");
        values_ = Eigen::MatrixXd::Zero(nx_, ny_);
    }

    const GridSpec& spec() const { return spec_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double x(int i) const { return spec_.x_min + i * spec_.h; }
    double y(int j) const { return spec_.y_min + j * spec_.h; }

    double& at(int i, int j) { return values_(i, j); }
    double at(int i, int j) const { return values_(i, j); }
    Eigen::MatrixXd& values() { return values_; }
    const Eigen::MatrixXd& values() const { return values_; }

    /// Bilinear sample; returns nothing outside the grid.
    std::optional<double> sample(const Vec2& p) const {
        const double fx = (p.x - spec_.x_min) / spec_.h;
        const double fy = (p.y - spec_.y_min) / spec_.h;
        if (fx < 0.0 || fy < 0.0 || fx > nx_ - 1 || fy > ny_ - 1) return std::nullopt;
        const int i = std::min(int(fx), nx_ - 2);
        const int j = std::min(int(fy), ny_ - 2);
        const double ax = fx - i, ay = fy - j;
        return (1 - ax) * (1 - ay) * values_(i, j) + ax * (1 - ay) * values_(i + 1, j) +
               (1 - ax) * ay * values_(i, j + 1) + ax * ay * values_(i + 1, j + 1);
    }

  private:
    static int axis_count(double lo, double hi, double h, const char* which) {
        if (!(hi > lo) || h <= 0.0)
            throw std::invalid_argument("IndicatorGrid: bad bounds/spacing");
        const double ratio = (hi - lo) / h;
        const int n = int(std::lround(ratio));
        if (std::abs(ratio - double(n)) > 1e-9 * std::max(1.0, ratio))
            throw std::invalid_argument(std::string("IndicatorGrid: (") + which +
                                        "_max - min)/h must be an integer");
        return n + 1;
    }

    GridSpec spec_;
    int nx_, ny_;
    Eigen::MatrixXd values_;
};

struct EmptyIndicatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyRidgeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Complex grid of sum_m c_m e^{i w_m xhat.z} via the separable-phase
/// factorization.
inline Eigen::MatrixXcd phase_grid(const std::vector<Complex>& c, const std::vector<double>& w,
                                   const Direction& xhat, const IndicatorGrid& grid) {
    const int M1 = int(c.size());
    const int nx = grid.nx(), ny = grid.ny();
    Eigen::MatrixXcd A(M1, nx), B(M1, ny);
    for (int m = 0; m < M1; ++m) {
        for (int i = 0; i < nx; ++i)
            A(m, i) = c[std::size_t(m)] * std::exp(Complex(0.0, w[std::size_t(m)] * xhat.x() * grid.x(i)));
        for (int j = 0; j < ny; ++j)
            B(m, j) = std::exp(Complex(0.0, w[std::size_t(m)] * xhat.y() * grid.y(j)));
    }
    return A.transpose() * B;
}

}  // namespace detail

struct IndicatorIResult {
    IndicatorGrid grid;            // real part of the assembled indicator
    double imaginary_ratio = 0.0;  // ||Im|| / ||Re|| diagnostic
    int skipped_directions = 0;    // directions dropped for gamma~ = 0
};

/// Bojarski-backed indicator I(z) = (1/l) sum_xhat I_xhat(z) with
///   I_xhat(z) = -sum_m [gamma~(xhat)^{-1} u(xhat,-xhat,k_m) E_m(z)
///                + i gamma~(-xhat)^{-1} conj(u(-xhat,xhat,k_m) conj(E_m(z)))]
///               dk / (2 C2 sqrt(k_m)),
/// where E_m(z) = e^{-s 2 i k_m xhat.z} with the calibrated phase sign s
/// (the sign pairing that cancels the data's reflection-point phase; see the
/// calibration notes in the README). gamma values are indexed per base
/// direction; directions with gamma~ = 0 are skipped and counted.
inline IndicatorIResult indicator_I(const FarFieldDataset& data, const std::vector<double>& gamma,
                                    const GridSpec& spec, const ConventionCalibration& cal) {
    const int l = data.directions.l;
    if (int(gamma.size()) != l)
        throw std::invalid_argument("indicator_I: gamma size must match direction count");
    IndicatorGrid out(spec);
    Eigen::MatrixXd re = Eigen::MatrixXd::Zero(out.nx(), out.ny());
    Eigen::MatrixXd im = Eigen::MatrixXd::Zero(out.nx(), out.ny());

    const int M1 = data.grid.count();
    std::vector<Complex> c(static_cast<std::size_t>(M1));
    std::vector<double> w(static_cast<std::size_t>(M1));
    int skipped = 0;
    for (int dir = 0; dir < l; ++dir) {
        const Direction xhat = data.directions.pair(dir, 0).xhat;
        const int rev = data.antipodal_index(dir);
        const double g_fwd = gamma[std::size_t(dir)];
        const double g_rev = gamma[std::size_t(rev)];
        if (g_fwd == 0.0 || g_rev == 0.0) {
            ++skipped;
            continue;
        }
        for (int m = 0; m < M1; ++m) {
            const double k = data.grid.k(m);
            const Complex u_fwd = data.value(dir, 0, m);
            const Complex u_rev = data.value(rev, 0, m);
            const Complex I(0.0, 1.0);
            c[std::size_t(m)] = -(u_fwd / g_fwd + I * std::conj(u_rev) / g_rev) * data.grid.dk /
                                (2.0 * bojarski_C2 * std::sqrt(k));
            w[std::size_t(m)] = -cal.phase_sign * 2.0 * k;
        }
        const Eigen::MatrixXcd G = detail::phase_grid(c, w, xhat, out);
        re += G.real();
        im += G.imag();
    }
    if (skipped == l) throw EmptyIndicatorError("indicator_I: all directions skipped");
    const double nre = re.norm();
    out.values() = re / double(l);
    IndicatorIResult res{std::move(out), nre > 0.0 ? im.norm() / nre : 0.0, skipped};
    return res;
}

/// Boundary indicator T(z) = (1/l) sum_xhat |T_xhat(z)| / sup_G |T_xhat|,
/// T_xhat(z) = sum_m u(xhat,-xhat,k_m) e^{-s 2 i k_m xhat.z} k_m^{-1/2}.
/// Directions whose sup falls below 1e-14 are skipped; an all-skip grid is an
/// error.
inline IndicatorGrid indicator_T(const FarFieldDataset& data, const GridSpec& spec,
                                 const ConventionCalibration& cal) {
    const int l = data.directions.l;
    IndicatorGrid out(spec);
    const int M1 = data.grid.count();
    std::vector<Complex> c(static_cast<std::size_t>(M1));
    std::vector<double> w(static_cast<std::size_t>(M1));
    int skipped = 0;
    for (int dir = 0; dir < l; ++dir) {
        const Direction xhat = data.directions.pair(dir, 0).xhat;
        for (int m = 0; m < M1; ++m) {
            const double k = data.grid.k(m);
            c[std::size_t(m)] = data.value(dir, 0, m) / std::sqrt(k);
            w[std::size_t(m)] = -cal.phase_sign * 2.0 * k;
        }
        const Eigen::MatrixXcd G = detail::phase_grid(c, w, xhat, out);
        const Eigen::MatrixXd mag = G.cwiseAbs();
        const double sup = mag.maxCoeff();
        if (sup < 1e-14) {
            ++skipped;
            continue;
        }
        out.values() += mag / sup;
    }
    if (skipped == l) throw EmptyIndicatorError("indicator_T: all directions skipped");
    out.values() /= double(l);
    return out;
}

struct RidgePoint {
    Vec2 p;
    Vec2 normal;  // outward unit normal estimate
};

/// Points above the given quantile of the grid values, thinned by
/// non-maximum suppression across the local ridge direction; normals point
/// away from the cloud's center of mass.
inline std::vector<RidgePoint> ridge_extract(const IndicatorGrid& grid, double quantile) {
    if (!(quantile > 0.0 && quantile < 1.0))
        throw std::invalid_argument("ridge_extract: quantile must be in (0,1)");
    const auto& V = grid.values();
    const int nx = grid.nx(), ny = grid.ny();
    std::vector<double> flat(V.data(), V.data() + V.size());
    const std::size_t qidx = std::size_t(quantile * double(flat.size() - 1));
    std::nth_element(flat.begin(), flat.begin() + std::ptrdiff_t(qidx), flat.end());
    const double threshold = flat[qidx];
    if (V.maxCoeff() - V.minCoeff() < 1e-14)
        throw EmptyRidgeError("ridge_extract: flat grid");

    // centroid of above-threshold mass for the outward orientation
    double cx = 0.0, cy = 0.0, mass = 0.0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            if (V(i, j) > threshold) {
                cx += grid.x(i);
                cy += grid.y(j);
                mass += 1.0;
            }
    if (mass == 0.0) throw EmptyRidgeError("ridge_extract: nothing above the threshold");
    cx /= mass;
    cy /= mass;

    static const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    std::vector<RidgePoint> cloud;
    for (int i = 1; i + 1 < nx; ++i)
        for (int j = 1; j + 1 < ny; ++j) {
            const double v = V(i, j);
            if (v <= threshold) continue;
            // cross-ridge direction: the most concave second difference
            int bestd = 0;
            double bestcurv = 0.0;
            for (int d = 0; d < 4; ++d) {
                const double second =
                    V(i + dirs[d][0], j + dirs[d][1]) - 2.0 * v + V(i - dirs[d][0], j - dirs[d][1]);
                if (second < bestcurv) {
                    bestcurv = second;
                    bestd = d;
                }
            }
            if (v < V(i + dirs[bestd][0], j + dirs[bestd][1]) ||
                v < V(i - dirs[bestd][0], j - dirs[bestd][1]))
                continue;  // not the crest along the cross direction
            const Vec2 p{grid.x(i), grid.y(j)};
            Vec2 n{double(dirs[bestd][0]), double(dirs[bestd][1])};
            n = n / n.norm();
            if (n.dot(p - Vec2{cx, cy}) < 0.0) n = -1.0 * n;
            cloud.push_back({p, n});
        }
    if (cloud.empty()) throw EmptyRidgeError("ridge_extract: all candidates suppressed");
    return cloud;
}

enum class SignVerdict { Dirichlet, Neumann, Inconclusive };

inline const char* to_string(SignVerdict v) {
    switch (v) {
        case SignVerdict::Dirichlet: return "dirichlet";
        case SignVerdict::Neumann: return "neumann";
        default: return "inconclusive";
    }
}

/// Dirichlet/Neumann disambiguation from the sign structure of I around the
/// boundary estimate: sample at +-d nu (d = 3h); Dirichlet when the outer
/// mean is negative and the inner positive, Neumann when reversed.
inline SignVerdict dn_sign_test(const IndicatorGrid& grid, const std::vector<RidgePoint>& boundary) {
    if (boundary.empty()) throw std::invalid_argument("dn_sign_test: empty boundary estimate");
    const double d = 3.0 * grid.spec().h;
    double outer = 0.0, inner = 0.0;
    int n = 0;
    for (const auto& bp : boundary) {
        const auto vo = grid.sample(bp.p + d * bp.normal);
        const auto vi = grid.sample(bp.p - d * bp.normal);
        if (!vo || !vi) continue;
        outer += *vo;
        inner += *vi;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("dn_sign_test: no probe fell inside the grid");
    outer /= n;
    inner /= n;
    if (outer < 0.0 && inner > 0.0) return SignVerdict::Dirichlet;
    if (outer > 0.0 && inner < 0.0) return SignVerdict::Neumann;
    return SignVerdict::Inconclusive;
}

/// CSV export: header row with the bounds and spacing, then ny rows (y
/// ascending) of nx comma-separated values (x ascending).
inline void write_grid_csv(const IndicatorGrid& grid, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_grid_csv: cannot open '" + path + "'");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "# x_min=%g x_max=%g y_min=%g y_max=%g h=%g\n",
                  grid.spec().x_min, grid.spec().x_max, grid.spec().y_min, grid.spec().y_max,
                  grid.spec().h);
    os << buf;
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.9g", grid.at(i, j));
            os << buf << (i + 1 < grid.nx() ? ',' : '\n');
        }
    }
}

/// 16-bit binary PGM (P5), linear min-max scaling; the scaling and grid
/// geometry go to a JSON sidecar at path + ".json". Row 0 of the image is
/// y_max (image convention).
inline void write_grid_pgm16(const IndicatorGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_grid_pgm16: cannot open '" + path + "'");
    const double lo = grid.values().minCoeff(), hi = grid.values().maxCoeff();
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    os << "P5\n" << grid.nx() << " " << grid.ny() << "\n65535\n";
    for (int j = grid.ny() - 1; j >= 0; --j) {
        for (int i = 0; i < grid.nx(); ++i) {
            const auto v = std::uint16_t(std::lround((grid.at(i, j) - lo) * scale));
            const unsigned char hibyte = (unsigned char)(v >> 8), lobyte = (unsigned char)(v & 0xff);
            os.put(char(hibyte)).put(char(lobyte));
        }
    }
    nlohmann::json side = {{"min", lo},
                           {"max", hi},
                           {"width", grid.nx()},
                           {"height", grid.ny()},
                           {"bounds", {grid.spec().x_min, grid.spec().x_max, grid.spec().y_min,
                                       grid.spec().y_max}},
                           {"spacing", grid.spec().h},
                           {"row0", "y_max"}};
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
}

}  // namespace echoform
