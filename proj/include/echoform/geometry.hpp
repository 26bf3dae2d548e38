#pragma once

// Parametric boundary curves and the differential geometry used throughout:
// outward normals, signed curvature, Gauss-map inversion, reflecting-plane
// normals and specular reflection points, half-plane hulls.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace echoform {

inline constexpr double pi = std::numbers::pi;
using Complex = std::complex<double>;

/// Plain 2D vector (double precision). Used for points and displacements.
struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    friend constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }

    constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    /// z-component of the cross product (this x r).
    constexpr double cross(const Vec2& r) const { return x * r.y - y * r.x; }
    double norm() const { return std::hypot(x, y); }
};

/// Unit vector on S^1. Construction enforces |v| = 1 to within 1e-12.
class Direction {
  public:
    /// Normalizes v; throws if v is too short to normalize reliably.
    static Direction of(const Vec2& v) {
        const double n = v.norm();
        if (n < 1e-14) throw std::invalid_argument("Direction::of: zero-length vector");
        return Direction(v.x / n, v.y / n);
    }
    static Direction from_angle(double beta) { return Direction(std::cos(beta), std::sin(beta)); }

    constexpr double x() const { return v_.x; }
    constexpr double y() const { return v_.y; }
    constexpr Vec2 vec() const { return v_; }
    double angle() const { return std::atan2(v_.y, v_.x); }

    constexpr double dot(const Direction& r) const { return v_.dot(r.v_); }
    constexpr double dot(const Vec2& r) const { return v_.dot(r); }
    constexpr Direction operator-() const { return Direction(-v_.x, -v_.y); }
    constexpr bool operator==(const Direction& r) const { return v_.x == r.v_.x && v_.y == r.v_.y; }

    /// Counterclockwise rotation by angle a.
    Direction rotated(double a) const {
        const double c = std::cos(a), s = std::sin(a);
        return Direction(c * v_.x - s * v_.y, s * v_.x + c * v_.y);
    }

  private:
    constexpr Direction(double x, double y) : v_(x, y) {}
    Vec2 v_;
};

/// Smallest unsigned angle between two unit vectors, robust near 0 and pi.
inline double angle_between(const Direction& a, const Direction& b) {
    return std::atan2(std::abs(a.vec().cross(b.vec())), a.dot(b));
}

/// Half plane { z : z . normal > offset }.
struct HalfPlane {
    Direction normal;
    double offset;
};

struct SingularParametrizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndefinedBisectorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Normal vector of the reflecting plane for an observation/incidence pair,
/// phi = (theta - xhat) / |theta - xhat|. Throws when xhat == theta.
inline Direction reflect_normal(const Direction& xhat, const Direction& theta) {
    const Vec2 d = theta.vec() - xhat.vec();
    if (d.norm() < 1e-12)
        throw UndefinedBisectorError("reflect_normal: xhat equals theta, bisector undefined");
    return Direction::of(d);
}

/// Closed 2pi-periodic parametric curve, t in [-pi, pi), oriented
/// counterclockwise. Presets: disk, egg, kite; generic curves are given by
/// truncated trigonometric series per coordinate.
///
/// Outward unit normal: nu(t) = (y'(t), -x'(t)) / |x'(t)|.
class BoundaryCurve {
  public:
    /// One coordinate of a trigonometric curve:
    /// f(t) = c0 + sum_j (a_j cos(j t) + b_j sin(j t)).
    struct TrigSeries {
        double c0 = 0.0;
        std::vector<double> a;  // cosine coefficients, index j-1 holds order j
        std::vector<double> b;  // sine coefficients

        double eval(double t, int deriv) const {
            double s = (deriv == 0) ? c0 : 0.0;
            const std::size_t n = std::max(a.size(), b.size());
            for (std::size_t i = 0; i < n; ++i) {
                const double j = double(i + 1);
                const double aj = i < a.size() ? a[i] : 0.0;
                const double bj = i < b.size() ? b[i] : 0.0;
                switch (deriv) {
                    case 0: s += aj * std::cos(j * t) + bj * std::sin(j * t); break;
                    case 1: s += j * (-aj * std::sin(j * t) + bj * std::cos(j * t)); break;
                    default: s += j * j * (-aj * std::cos(j * t) - bj * std::sin(j * t)); break;
                }
            }
            return s;
        }
    };

    static BoundaryCurve disk(double radius, Vec2 center = {0.0, 0.0}) {
        if (radius <= 0.0) throw std::invalid_argument("disk: radius must be positive");
        BoundaryCurve c;
        c.kind_ = Kind::Disk;
        c.radius_ = radius;
        c.center_ = center;
        c.name_ = format_disk_name(radius, center);
        c.finalize();
        return c;
    }

    /// x(t) = (1.5 cos t, sin t / (1 + 0.2 cos t)); convex.
    static BoundaryCurve egg() {
        BoundaryCurve c;
        c.kind_ = Kind::Egg;
        c.name_ = "egg";
        c.finalize();
        return c;
    }

    /// x(t) = (cos t + 0.65 cos 2t - 0.65, 1.5 sin t); nonconvex.
    static BoundaryCurve kite() {
        BoundaryCurve c;
        c.kind_ = Kind::Kite;
        c.name_ = "kite";
        c.finalize();
        return c;
    }

    /// Generic closed trigonometric curve. Orientation is normalized to
    /// counterclockwise via the signed area.
    static BoundaryCurve trigonometric(TrigSeries sx, TrigSeries sy, std::string name = "trig") {
        BoundaryCurve c;
        c.kind_ = Kind::Trig;
        c.sx_ = std::move(sx);
        c.sy_ = std::move(sy);
        c.name_ = std::move(name);
        if (c.signed_area() < 0.0) c.reversed_ = true;
        c.finalize();
        return c;
    }

    /// Parses the preset naming used in CLIs and manifests:
    /// "egg", "kite", "disk:a=1.5,cx=0,cy=0" (cx, cy optional).
    static BoundaryCurve from_name(const std::string& name) {
        if (name == "egg") return egg();
        if (name == "kite") return kite();
        if (name.rfind("disk", 0) == 0) {
            double a = 1.0, cx = 0.0, cy = 0.0;
            const auto colon = name.find(':');
            if (colon != std::string::npos) {
                std::string rest = name.substr(colon + 1);
                std::stringstream ss(rest);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto eq = item.find('=');
                    if (eq == std::string::npos)
                        throw std::invalid_argument("curve name: expected key=value in '" + name + "'");
                    const std::string key = item.substr(0, eq);
                    const double val = std::stod(item.substr(eq + 1));
                    if (key == "a") a = val;
                    else if (key == "cx") cx = val;
                    else if (key == "cy") cy = val;
                    else throw std::invalid_argument("curve name: unknown key '" + key + "'");
                }
            }
            return disk(a, {cx, cy});
        }
        throw std::invalid_argument("unknown curve name '" + name + "'");
    }

    const std::string& name() const { return name_; }

    /// Position x(t). t is wrapped into [-pi, pi).
    Vec2 point(double t) const { return eval(t, 0); }
    /// First derivative x'(t).
    Vec2 derivative(double t) const { return eval(t, 1); }
    /// Second derivative x''(t).
    Vec2 second_derivative(double t) const { return eval(t, 2); }

    double speed(double t) const { return derivative(t).norm(); }

    /// Outward unit normal. Throws SingularParametrizationError when the
    /// parametrization degenerates (|x'| < 1e-12).
    Direction normal(double t) const {
        const Vec2 d = derivative(t);
        const double sp = d.norm();
        if (sp < 1e-12)
            throw SingularParametrizationError("normal: |x'(t)| vanishes at t=" + std::to_string(t));
        return Direction::of({d.y / sp, -d.x / sp});
    }

    /// Signed curvature (x' y'' - y' x'') / |x'|^3; positive on convex
    /// counterclockwise arcs.
    double curvature(double t) const {
        const Vec2 d = derivative(t);
        const Vec2 dd = second_derivative(t);
        const double sp = d.norm();
        if (sp < 1e-12)
            throw SingularParametrizationError("curvature: |x'(t)| vanishes at t=" + std::to_string(t));
        return d.cross(dd) / (sp * sp * sp);
    }

    /// Total arc length (computed once at construction).
    double length() const { return length_; }

    /// True iff the point x(t) faces the incoming plane wave of direction
    /// theta, i.e. nu(t) . theta < 0.
    bool illuminated(double t, const Direction& theta) const { return normal(t).dot(theta) < 0.0; }

    /// All parameters t with nu(t) = target, found by bracketing sign changes
    /// of cross(nu, target) on a fine grid and refining by bisection down to
    /// 1e-12 in t. Strictly convex curves yield exactly one solution.
    std::vector<double> gauss_preimage(const Direction& target, int grid = 4096) const {
        // cross(nu, target) has the same zero set as x'(t) . target (tangent
        // perpendicular to the target normal), which avoids the normalization.
        auto g = [&](double t) { return derivative(t).dot(target.vec()); };
        std::vector<double> roots;
        double prev_t = -pi;
        double prev_g = g(prev_t);
        for (int i = 1; i <= grid; ++i) {
            const double t = -pi + 2.0 * pi * double(i) / double(grid);
            const double gt = g(t);
            if (prev_g == 0.0) {
                roots.push_back(prev_t);
            } else if (prev_g * gt < 0.0) {
                double lo = prev_t, hi = t, glo = prev_g;
                for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = g(mid);
                    if (glo * gm <= 0.0) hi = mid;
                    else { lo = mid; glo = gm; }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            prev_t = t;
            prev_g = gt;
        }
        std::vector<double> out;
        for (double t : roots) {
            if (normal(t).dot(target) <= 0.0) continue;  // antipodal branch
            if (angle_between(normal(t), target) > 1e-10) continue;
            bool dup = false;
            for (double s : out)
                if (std::abs(wrap_angle(s - t)) < 1e-9) dup = true;
            if (!dup) out.push_back(t);
        }
        if (out.empty())
            throw std::runtime_error("gauss_preimage: no preimage found (grid too coarse?)");
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Specular reflection point y+ for the pair (xhat, theta): the boundary
    /// point with nu = -phi(xhat, theta). When the Gauss map is not injective
    /// the supporting point minimizing y.phi is returned.
    Vec2 reflection_point(const Direction& xhat, const Direction& theta) const {
        const Direction phi = reflect_normal(xhat, theta);
        const auto ts = gauss_preimage(-phi);
        double best = std::numeric_limits<double>::infinity();
        Vec2 bestp{};
        for (double t : ts) {
            const Vec2 p = point(t);
            const double d = p.dot(phi.vec());
            if (d < best) {
                best = d;
                bestp = p;
            }
        }
        return bestp;
    }

    /// Parameter of the specular reflection point (same selection rule).
    double reflection_parameter(const Direction& xhat, const Direction& theta) const {
        const Direction phi = reflect_normal(xhat, theta);
        const auto ts = gauss_preimage(-phi);
        double best = std::numeric_limits<double>::infinity();
        double bestt = ts.front();
        for (double t : ts) {
            const double d = point(t).dot(phi.vec());
            if (d < best) {
                best = d;
                bestt = t;
            }
        }
        return bestt;
    }

    static double wrap_angle(double t) {
        t = std::fmod(t + pi, 2.0 * pi);
        if (t < 0.0) t += 2.0 * pi;
        return t - pi;
    }

  private:
    enum class Kind { Disk, Egg, Kite, Trig };

    Vec2 eval(double t, int deriv) const {
        t = wrap_angle(t);
        double sgn = 1.0;
        if (reversed_) {
            t = -t;
            if (deriv == 1) sgn = -1.0;
        }
        Vec2 v;
        switch (kind_) {
            case Kind::Disk: {
                const double c = std::cos(t), s = std::sin(t);
                switch (deriv) {
                    case 0: v = {center_.x + radius_ * c, center_.y + radius_ * s}; break;
                    case 1: v = {-radius_ * s, radius_ * c}; break;
                    default: v = {-radius_ * c, -radius_ * s}; break;
                }
                break;
            }
            case Kind::Egg: {
                const double c = std::cos(t), s = std::sin(t);
                const double q = 1.0 + 0.2 * c;
                switch (deriv) {
                    case 0: v = {1.5 * c, s / q}; break;
                    case 1: v = {-1.5 * s, (c + 0.2) / (q * q)}; break;
                    default: {
                        // y'' = -sin t / q^2 + 0.4 sin t (cos t + 0.2) / q^3
                        const double ypp = -s / (q * q) + 0.4 * s * (c + 0.2) / (q * q * q);
                        v = {-1.5 * c, ypp};
                        break;
                    }
                }
                break;
            }
            case Kind::Kite: {
                const double c = std::cos(t), s = std::sin(t);
                const double c2 = std::cos(2.0 * t), s2 = std::sin(2.0 * t);
                switch (deriv) {
                    case 0: v = {c + 0.65 * c2 - 0.65, 1.5 * s}; break;
                    case 1: v = {-s - 1.3 * s2, 1.5 * c}; break;
                    default: v = {-c - 2.6 * c2, -1.5 * s}; break;
                }
                break;
            }
            case Kind::Trig:
                v = {sx_.eval(t, deriv), sy_.eval(t, deriv)};
                break;
        }
        return sgn * v;
    }

    double signed_area() const {
        // 1/2 integral (x y' - y x') dt, trapezoid on the periodic grid
        const int n = 4096;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = -pi + 2.0 * pi * double(i) / double(n);
            const Vec2 p = eval_raw(t, 0);
            const Vec2 d = eval_raw(t, 1);
            acc += p.cross(d);
        }
        return 0.5 * acc * (2.0 * pi / double(n));
    }

    Vec2 eval_raw(double t, int deriv) const {
        // Trig evaluation ignoring the reversal flag (used while orienting).
        if (kind_ == Kind::Trig) return {sx_.eval(t, deriv), sy_.eval(t, deriv)};
        return eval(t, deriv);
    }

    void finalize() {
        const int n = 4096;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = -pi + 2.0 * pi * double(i) / double(n);
            acc += speed(t);
        }
        length_ = acc * (2.0 * pi / double(n));
        // closure check: x(-pi) == x(pi) is automatic for these forms, but a
        // mis-entered trigonometric table with a half-integer frequency is not
        // representable here, so nothing further to validate.
    }

    static std::string format_disk_name(double radius, Vec2 center) {
        std::ostringstream os;
        os << "disk:a=" << radius;
        if (center.x != 0.0 || center.y != 0.0) os << ",cx=" << center.x << ",cy=" << center.y;
        return os.str();
    }

    Kind kind_ = Kind::Disk;
    double radius_ = 1.0;
    Vec2 center_{};
    TrigSeries sx_, sy_;
    bool reversed_ = false;
    double length_ = 0.0;
    std::string name_;
};

struct DegenerateHullError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vertices of the intersection of half planes { z . normal > offset },
/// counterclockwise. Requires normals that positively span the plane;
/// throws DegenerateHullError for unbounded or empty intersections.
inline std::vector<Vec2> hull_from_detections(std::vector<HalfPlane> planes) {
    if (planes.size() < 3)
        throw DegenerateHullError("hull: need at least 3 half-planes");
    std::sort(planes.begin(), planes.end(), [](const HalfPlane& a, const HalfPlane& b) {
        return a.normal.angle() < b.normal.angle();
    });
    // Bounded iff no angular gap between consecutive inward normals reaches pi.
    for (std::size_t i = 0; i < planes.size(); ++i) {
        const double a0 = planes[i].normal.angle();
        double a1 = planes[(i + 1) % planes.size()].normal.angle();
        if (i + 1 == planes.size()) a1 += 2.0 * pi;
        if (a1 - a0 >= pi - 1e-12)
            throw DegenerateHullError("hull: normals do not positively span the plane (unbounded)");
    }
    std::vector<Vec2> verts;
    const std::size_t n = planes.size();
    for (std::size_t i = 0; i < n; ++i) {
        const HalfPlane& p = planes[i];
        const HalfPlane& q = planes[(i + 1) % n];
        // solve z.np = op, z.nq = oq
        const double det = p.normal.x() * q.normal.y() - p.normal.y() * q.normal.x();
        if (std::abs(det) < 1e-14)
            throw DegenerateHullError("hull: consecutive half-planes are parallel");
        const double zx = (p.offset * q.normal.y() - q.offset * p.normal.y()) / det;
        const double zy = (p.normal.x() * q.offset - q.normal.x() * p.offset) / det;
        verts.push_back({zx, zy});
    }
    // Empty intersection shows up as vertices violating non-adjacent planes.
    for (const Vec2& v : verts)
        for (const HalfPlane& p : planes)
            if (v.dot(p.normal.vec()) < p.offset - 1e-6)
                throw DegenerateHullError("hull: empty intersection");
    return verts;
}

/// Distance from a point to a closed polygon boundary (vertices in order).
inline double distance_to_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        const Vec2 ab = b - a;
        const double len2 = ab.dot(ab);
        double u = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (p - (a + u * ab)).norm());
    }
    return best;
}

}  // namespace echoform
