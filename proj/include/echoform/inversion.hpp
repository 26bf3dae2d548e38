#pragma once

// Reconstruction mathematics: high-frequency leading-term prediction,
// band-average tangent detection, L statistics and boundary-condition
// classification, closed-form impedance candidates and matching, the
// known-boundary impedance formula, and the Bojarski-type source values.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "echoform/calibration.hpp"
#include "echoform/data_synthesis.hpp"
#include "echoform/geometry.hpp"

namespace echoform {

struct ConcavePointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllPosedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reflection coefficient R^lambda(xhat, theta) in 2D. lambda is the
/// impedance at the reflection point; +infinity selects Dirichlet, 0 Neumann.
inline double reflection_coefficient(double lambda, const Direction& xhat,
                                     const Direction& theta) {
    const Direction phi = reflect_normal(xhat, theta);
    const double px = phi.dot(xhat);
    const double mag = 1.0 / std::sqrt((theta.vec() - xhat.vec()).norm());
    const double ratio = std::isinf(lambda) ? 1.0 : (lambda + px) / (lambda - px);
    return -mag * px * ratio;
}

/// Calibrated leading term rho e^{s i k y+.(xhat-theta)} kappa^{-1/2} R^lambda.
/// Throws ConcavePointError when kappa <= 0 (the asymptotics are invalid on
/// concave arcs).
inline Complex majda_leading(const Vec2& reflection_point, double kappa, double lambda,
                             const Direction& xhat, const Direction& theta, double k,
                             const ConventionCalibration& cal) {
    if (kappa <= 0.0)
        throw ConcavePointError("majda_leading: nonpositive curvature at the reflection point");
    const double phase = cal.phase_sign * k * reflection_point.dot(xhat.vec() - theta.vec());
    return cal.rho * std::exp(Complex(0.0, phase)) * std::pow(kappa, -0.5) *
           reflection_coefficient(lambda, xhat, theta);
}

/// Discrete band average (1/(K_hi - K_lo)) sum u(k_m) e^{-i k_m t} dk over
/// samples with uniformly increasing k.
inline Complex band_average(std::span<const std::pair<double, Complex>> samples, double t) {
    if (samples.size() < 2) throw std::invalid_argument("band_average: need at least 2 samples");
    const double k_lo = samples.front().first, k_hi = samples.back().first;
    const double dk = samples[1].first - samples[0].first;
    if (dk <= 0.0 || k_hi <= k_lo)
        throw std::invalid_argument("band_average: samples must increase in k");
    Complex acc = 0.0;
    for (const auto& [k, u] : samples) acc += u * std::exp(Complex(0.0, -k * t));
    return acc * dk / (k_hi - k_lo);
}

struct TangentDetection {
    double t_star;
    Complex amplitude;
};

/// Peak of |band_average| over a t grid, refined by three-point parabolic
/// interpolation. Returns nothing when the response is flat
/// (max below 10x the median).
inline std::optional<TangentDetection> detect_tangent(
    std::span<const std::pair<double, Complex>> samples, double t_min, double t_max,
    double t_step) {
    if (samples.size() < 2) throw std::invalid_argument("detect_tangent: need samples");
    const double k_plus = samples.back().first;
    if (t_step > pi / (2.0 * k_plus) * (1.0 + 1e-12))
        throw std::invalid_argument("detect_tangent: t_step above the Nyquist limit pi/(2 k_plus)");
    const int n = int(std::floor((t_max - t_min) / t_step)) + 1;
    if (n < 3) throw std::invalid_argument("detect_tangent: t range too small");

    std::vector<double> mag(static_cast<std::size_t>(n));
    int best = 0;
    for (int i = 0; i < n; ++i) {
        mag[std::size_t(i)] = std::abs(band_average(samples, t_min + i * t_step));
        if (mag[std::size_t(i)] > mag[std::size_t(best)]) best = i;
    }
    std::vector<double> sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double median = sorted[std::size_t(n / 2)];
    if (mag[std::size_t(best)] < 10.0 * median) return std::nullopt;

    double t_star = t_min + best * t_step;
    if (best > 0 && best < n - 1) {
        const double y0 = mag[std::size_t(best - 1)], y1 = mag[std::size_t(best)],
                     y2 = mag[std::size_t(best + 1)];
        const double denom = y0 - 2.0 * y1 + y2;
        if (std::abs(denom) > 1e-300) t_star += 0.5 * t_step * (y0 - y2) / denom;
    }
    return TangentDetection{t_star, band_average(samples, t_star)};
}

/// Backscattering band samples (k_m, u(xhat, -xhat, k_m)) for direction index
/// dir (xhat = -theta_dir) pulled from the dataset.
inline std::vector<std::pair<double, Complex>> backscatter_samples(const FarFieldDataset& data,
                                                                   int dir) {
    std::vector<std::pair<double, Complex>> s;
    s.reserve(std::size_t(data.grid.count()));
    for (int m = 0; m <= data.grid.M; ++m) s.emplace_back(data.grid.k(m), data.value(dir, 0, m));
    return s;
}

/// L statistic pairing the backscattering record with the alpha-rotated
/// record sharing its reflection normal:
///   L = [|xhat-theta|^{-1/2} (xhat.xhat)] / [|xhat_j-theta_j|^{-1/2} (xhat.xhat_j)]
///       * sum_m |u(xhat_j, theta_j, k_m)| / sum_m |u(xhat, theta, k_m)|.
/// alpha_index selects the rotated subset (0 -> alpha1, 1 -> alpha2).
inline double L_statistic(const FarFieldDataset& data, int dir, int alpha_index) {
    if (data.directions.config != DirectionPairSet::Config::A2)
        throw std::invalid_argument("L_statistic: requires an A2 dataset");
    const auto& back = data.directions.pair(dir, 0);
    const auto& rot = data.directions.pair(dir, alpha_index + 1);

    double sum_back = 0.0, sum_rot = 0.0;
    for (int m = 0; m <= data.grid.M; ++m) {
        sum_back += std::abs(data.value(dir, 0, m));
        sum_rot += std::abs(data.value(dir, alpha_index + 1, m));
    }
    if (sum_back < 1e-300 || sum_rot < 1e-300)
        throw DegenerateDataError("L_statistic: zero modulus sum in the band");

    const double num = std::pow((back.theta.vec() - back.xhat.vec()).norm(), -0.5) * 1.0;
    const double den = std::pow((rot.theta.vec() - rot.xhat.vec()).norm(), -0.5) *
                       back.xhat.dot(rot.xhat);
    return num / den * sum_rot / sum_back;
}

enum class BcClass { DirichletOrNeumann, Impedance };

/// Per-direction L values for both alphas.
struct LTable {
    std::vector<double> alpha1, alpha2;
};

/// Dirichlet-or-Neumann iff |L - 1| < delta/2 = 0.05 for every direction
/// (convex mode) or for the best direction (concave mode); the criterion is
/// satisfied when either alpha passes (both must be checked only when
/// require_both is set).
inline BcClass classify_bc(const LTable& table, bool concave, bool require_both = false,
                           double threshold = 0.05) {
    auto passes = [&](const std::vector<double>& L) {
        if (L.empty()) throw std::invalid_argument("classify_bc: empty table");
        if (concave) {
            double best = std::numeric_limits<double>::infinity();
            for (double v : L) best = std::min(best, std::abs(v - 1.0));
            return best < threshold;
        }
        for (double v : L)
            if (std::abs(v - 1.0) >= threshold) return false;
        return true;
    };
    const bool p1 = passes(table.alpha1);
    const bool p2 = passes(table.alpha2);
    const bool dn = require_both ? (p1 && p2) : (p1 || p2);
    return dn ? BcClass::DirichletOrNeumann : BcClass::Impedance;
}

/// The two positive roots of |(lambda - c)(lambda + 1)| / |(lambda + c)(lambda - 1)| = L,
/// c = xhat.xhat_j. Positivity of both roots needs c in (0, 1), which the
/// rotated-pair geometry guarantees (c = cos(alpha pi/32), alpha in {8, 10});
/// outside that range the quadratic can lose its real positive roots.
/// Throws IllPosedError at L = 1.
inline std::pair<double, double> lambda_candidates(double L, double c) {
    if (L <= 0.0) throw std::invalid_argument("lambda_candidates: L must be positive");
    if (std::abs(L - 1.0) < 1e-12)
        throw IllPosedError("lambda_candidates: L = 1 is ill-posed (Dirichlet/Neumann limit)");
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("lambda_candidates: c must lie in (0, 1)");
    const double bp = (1.0 + L) / (1.0 - L) * (1.0 - c);
    const double bm = (1.0 - L) / (1.0 + L) * (1.0 - c);
    const double l1 = 0.5 * (std::sqrt(bp * bp + 4.0 * c) - bp);
    const double l2 = 0.5 * (std::sqrt(bm * bm + 4.0 * c) - bm);
    return {l1, l2};
}

/// Matched impedance estimate: the candidate pair (one per alpha) minimizing
/// the normalized distance |l1 - l2| / sqrt(l1^2 + l2^2); ties break toward
/// the lexicographically smallest (s, t). Returns the average of the pair.
inline double match_lambda(const std::pair<double, double>& cand1,
                           const std::pair<double, double>& cand2) {
    const double a[2] = {cand1.first, cand1.second};
    const double b[2] = {cand2.first, cand2.second};
    double best = std::numeric_limits<double>::infinity();
    double out = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
            const double d = std::abs(a[s] - b[t]) / std::sqrt(a[s] * a[s] + b[t] * b[t]);
            if (d < best - 1e-15) {
                best = d;
                out = 0.5 * (a[s] + b[t]);
            }
        }
    return out;
}

/// gamma~ per direction: (lambda - 1)/(lambda + 1) for impedance scatterers,
/// 1 when classified Dirichlet-or-Neumann.
inline std::vector<double> gamma_tilde(BcClass classification,
                                       const std::vector<double>& matched_lambda) {
    std::vector<double> g(matched_lambda.size(), 1.0);
    if (classification == BcClass::Impedance)
        for (std::size_t i = 0; i < matched_lambda.size(); ++i)
            g[i] = (matched_lambda[i] - 1.0) / (matched_lambda[i] + 1.0);
    return g;
}

struct LambdaWithBoundary {
    double lambda;
    Complex H;
};

/// Known-boundary impedance recovery: H = sqrt(2 kappa(y+)) / (M+1)
/// sum_m u(xhat, -xhat, k_m) e^{-s 2 i k_m y+.xhat}, then the calibrated
/// Mobius map lambda = (1 + mH)/(1 - mH). Returns nothing when the mapped
/// value is nonpositive or has a large imaginary part.
inline std::optional<LambdaWithBoundary> lambda_with_boundary(const FarFieldDataset& data,
                                                              const BoundaryCurve& curve, int dir,
                                                              const ConventionCalibration& cal) {
    const Direction xhat = data.directions.pair(dir, 0).xhat;
    const Direction theta = data.directions.pair(dir, 0).theta;
    const double tstar = curve.reflection_parameter(xhat, theta);
    const Vec2 yplus = curve.point(tstar);
    const double kappa = curve.curvature(tstar);
    if (kappa <= 0.0)
        throw ConcavePointError("lambda_with_boundary: concave reflection point");

    Complex H = 0.0;
    for (int m = 0; m <= data.grid.M; ++m) {
        const double k = data.grid.k(m);
        H += data.value(dir, 0, m) *
             std::exp(Complex(0.0, -cal.phase_sign * 2.0 * k * yplus.dot(xhat.vec())));
    }
    H *= std::sqrt(2.0 * kappa) / double(data.grid.count());

    const Complex ms = double(cal.mobius_sign) * H;
    if (std::abs(1.0 - ms) < 1e-12) return LambdaWithBoundary{1e12, H};
    const Complex lam = (1.0 + ms) / (1.0 - ms);
    // Beyond the Dirichlet/Neumann truncation values the phase of the Mobius
    // image is unreliable but its magnitude is meaningful; inside the band a
    // genuinely complex value signals a failed recovery.
    const double mag = std::abs(lam);
    if (mag >= 12.06 || mag <= 0.06) return LambdaWithBoundary{mag, H};
    if (lam.real() <= 0.0 || std::abs(lam.imag()) > 0.5 * std::abs(lam.real()))
        return std::nullopt;
    return LambdaWithBoundary{lam.real(), H};
}

// C2 = -e^{i pi/4}/sqrt(2 pi) = -(1 + i)/(2 sqrt(pi))
inline constexpr Complex bojarski_C2{-0.28209479177387814, -0.28209479177387814};

/// Bojarski-type source value V(xhat, k): the far-field pattern of the
/// characteristic function at frequency 2k, assembled from the two opposite
/// backscattering records.
inline Complex bojarski_V(Complex u_fwd, Complex u_rev, double gamma_fwd, double gamma_rev,
                          double k) {
    if (gamma_fwd == 0.0 || gamma_rev == 0.0)
        throw DegenerateDataError("bojarski_V: vanishing gamma~");
    const Complex I(0.0, 1.0);
    return -(u_fwd / gamma_fwd + I * std::conj(u_rev) / gamma_rev) /
           (2.0 * bojarski_C2 * std::pow(k, 1.5));
}

}  // namespace echoform
