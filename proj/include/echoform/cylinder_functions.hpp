#pragma once

// Cylindrical wave functions J_n, Y_n, H^(1)_n and their derivatives for all
// orders 0..N at a fixed positive argument. J by Miller's downward recurrence
// anchored at j0, Y by upward recurrence from y0, y1; derivatives from
// F_n' = F_{n-1} - (n/x) F_n.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace echoform {

/// Series truncation order for an angular-mode expansion at size parameter ka:
/// N >= ka + 8 (ka)^{1/3} + 10, enough for super-exponential tail decay.
inline int mode_count(double ka) {
    if (ka <= 0.0) throw std::invalid_argument("mode_count: ka must be positive");
    return int(std::ceil(ka + 8.0 * std::cbrt(ka) + 10.0));
}

/// J_n(x), Y_n(x) and derivatives, n = 0..N, at fixed x > 0.
class CylinderFunctions {
  public:
    CylinderFunctions(int max_order, double x) : n_(max_order), x_(x) {
        if (x <= 0.0) throw std::invalid_argument("CylinderFunctions: x must be positive");
        if (max_order < 1) throw std::invalid_argument("CylinderFunctions: order must be >= 1");
        j_.resize(n_ + 1);
        y_.resize(n_ + 1);
        compute_j();
        compute_y();
    }

    double j(int n) const { return j_[n]; }
    double y(int n) const { return y_[n]; }
    std::complex<double> h1(int n) const { return {j_[n], y_[n]}; }

    double jp(int n) const { return n == 0 ? -j_[1] : j_[n - 1] - double(n) / x_ * j_[n]; }
    double yp(int n) const { return n == 0 ? -y_[1] : y_[n - 1] - double(n) / x_ * y_[n]; }
    std::complex<double> h1p(int n) const { return {jp(n), yp(n)}; }

    int max_order() const { return n_; }
    double argument() const { return x_; }

  private:
    void compute_j() {
        // Miller: start well above max(n, x), recur downward, rescale on
        // overflow risk, normalize against the libm anchor j0(x).
        const int start = n_ + 16 + int(std::ceil(std::sqrt(40.0 * double(n_ + 2))));
        std::vector<double> tmp(start + 2, 0.0);
        tmp[start + 1] = 0.0;
        tmp[start] = 1e-300;
        for (int n = start; n >= 1; --n) {
            tmp[n - 1] = 2.0 * double(n) / x_ * tmp[n] - tmp[n + 1];
            if (std::abs(tmp[n - 1]) > 1e280) {
                for (int m = n - 1; m <= start + 1; ++m) tmp[m] *= 1e-280;
            }
        }
        // Anchor on whichever of J0, J1 is farther from a zero (they never
        // vanish simultaneously).
        const double a0 = std::cyl_bessel_j(0.0, x_);
        const double a1 = std::cyl_bessel_j(1.0, x_);
        const double scale = std::abs(a0) >= std::abs(a1) ? a0 / tmp[0] : a1 / tmp[1];
        for (int n = 0; n <= n_; ++n) {
            double v = tmp[n] * scale;
            j_[n] = std::isfinite(v) ? v : 0.0;
        }
    }

    void compute_y() {
        y_[0] = std::cyl_neumann(0.0, x_);
        if (n_ >= 1) y_[1] = std::cyl_neumann(1.0, x_);
        for (int n = 1; n < n_; ++n) {
            y_[n + 1] = 2.0 * double(n) / x_ * y_[n] - y_[n - 1];
            if (!std::isfinite(y_[n + 1])) {
                for (int m = n + 1; m <= n_; ++m) y_[m] = -std::numeric_limits<double>::max();
                break;
            }
        }
    }

    int n_;
    double x_;
    std::vector<double> j_, y_;
};

}  // namespace echoform
