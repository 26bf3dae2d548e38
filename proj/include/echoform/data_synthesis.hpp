#pragma once

// Direction configurations A1/A2, multi-frequency far-field synthesis,
// relative Gaussian noise, and the dataset file format:
// a one-line JSON manifest followed by CSV records
// theta_x,theta_y,obs_x,obs_y,k,re,im (17 significant digits).

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "echoform/forward_solver.hpp"

namespace echoform {

/// Uniform wavenumber grid k_m = k_minus + m dk, m = 0..M.
struct FrequencyGrid {
    double k_minus, k_plus, dk;
    int M;

    FrequencyGrid(double kminus, double kplus, double step) : k_minus(kminus), k_plus(kplus), dk(step) {
        if (kminus <= 0.0 || kplus <= kminus || step <= 0.0)
            throw std::invalid_argument("FrequencyGrid: need 0 < k_minus < k_plus, dk > 0");
        const double ratio = (kplus - kminus) / step;
        M = int(std::lround(ratio));
        if (M < 1 || std::abs(ratio - double(M)) > 1e-9 * std::max(1.0, ratio))
            throw std::invalid_argument("FrequencyGrid: (k_plus - k_minus)/dk must be an integer >= 1");
    }

    int count() const { return M + 1; }
    double k(int m) const { return k_minus + m * dk; }
};

/// Generalized backscattering direction pairs. A1 applies one fixed rotation
/// Q to every base direction; A2 is the union of the classical backscattering
/// set (Q = -I) and two rotated sets built from Q_alpha, R_alpha.
struct DirectionPairSet {
    enum class Config { A1, A2 };

    struct Pair {
        Direction xhat, theta;
        int dir_index, rot_index;
    };

    Config config = Config::A1;
    int l = 0;
    double a1_rotation = pi;  // A1: Q rotates by this angle; pi means Q = -I
    std::array<int, 2> alphas{8, 10};
    std::vector<Direction> base;
    std::vector<Pair> pairs;  // canonical order: direction-major, rotation-minor

    int rotations() const { return config == Config::A1 ? 1 : 3; }
    const Pair& pair(int dir, int rot) const { return pairs[std::size_t(dir * rotations() + rot)]; }
};

/// Q_alpha and R_alpha exactly as used by the rotated data sets:
/// R rotates theta by -alpha pi/32; Q maps the rotated incidence to the
/// rotated observation.
inline Direction apply_Q(int alpha, const Direction& d) {
    const double a = alpha * pi / 16.0;
    const double c = std::cos(a), s = std::sin(a);
    return Direction::of({-c * d.x() + s * d.y(), -s * d.x() - c * d.y()});
}
inline Direction apply_R(int alpha, const Direction& d) {
    const double a = alpha * pi / 32.0;
    const double c = std::cos(a), s = std::sin(a);
    return Direction::of({c * d.x() + s * d.y(), -s * d.x() + c * d.y()});
}

struct A1Config {
    double rotation = pi;
};
struct A2Config {
    int alpha1 = 8;
    int alpha2 = 10;
};

inline DirectionPairSet build_direction_set(int l, const A1Config& cfg) {
    if (l < 4) throw std::invalid_argument("build_direction_set: need l >= 4");
    DirectionPairSet set;
    set.config = DirectionPairSet::Config::A1;
    set.l = l;
    set.a1_rotation = cfg.rotation;
    for (int i = 0; i < l; ++i)
        set.base.push_back(Direction::from_angle(-pi + 2.0 * pi * double(i) / double(l)));
    for (int i = 0; i < l; ++i)
        set.pairs.push_back({set.base[std::size_t(i)].rotated(cfg.rotation),
                             set.base[std::size_t(i)], i, 0});
    return set;
}

inline DirectionPairSet build_direction_set(int l, const A2Config& cfg) {
    if (l < 4) throw std::invalid_argument("build_direction_set: need l >= 4");
    if (l % 64 != 0)
        throw std::invalid_argument(
            "build_direction_set: A2 requires l divisible by 64 so that "
            "R_alpha permutes Theta_l");
    DirectionPairSet set;
    set.config = DirectionPairSet::Config::A2;
    set.l = l;
    set.alphas = {cfg.alpha1, cfg.alpha2};
    for (int i = 0; i < l; ++i)
        set.base.push_back(Direction::from_angle(-pi + 2.0 * pi * double(i) / double(l)));
    for (int i = 0; i < l; ++i) {
        const Direction& th = set.base[std::size_t(i)];
        set.pairs.push_back({-th, th, i, 0});
        for (int j = 0; j < 2; ++j) {
            const int alpha = j == 0 ? cfg.alpha1 : cfg.alpha2;
            const Direction thj = apply_R(alpha, th);
            set.pairs.push_back({apply_Q(alpha, thj), thj, i, j + 1});
        }
    }
    return set;
}

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tagged far-field samples over a direction set and frequency band. Records
/// are stored in the canonical order (direction index, rotation index, m);
/// the manifest fully determines regeneration of the noise-free values.
struct FarFieldDataset {
    DirectionPairSet directions;
    FrequencyGrid grid;
    std::string scatterer_geometry;
    BoundaryKind bc = BoundaryKind::Dirichlet;
    std::string lambda_text;  // empty unless impedance
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::vector<Complex> values;

    std::size_t record_index(int dir, int rot, int m) const {
        return (std::size_t(dir) * std::size_t(directions.rotations()) + std::size_t(rot)) *
                   std::size_t(grid.count()) +
               std::size_t(m);
    }
    Complex value(int dir, int rot, int m) const { return values[record_index(dir, rot, m)]; }
    std::size_t record_count() const {
        return std::size_t(directions.pairs.size()) * std::size_t(grid.count());
    }

    /// Index of the base direction opposite to direction i (theta_i' = -theta_i).
    int antipodal_index(int dir) const {
        const int j = (dir + directions.l / 2) % directions.l;
        if (directions.base[std::size_t(j)].dot(directions.base[std::size_t(dir)]) > -1.0 + 1e-9)
            throw std::logic_error("antipodal_index: direction set is not symmetric");
        return j;
    }

    nlohmann::json manifest() const {
        nlohmann::json dirs;
        if (directions.config == DirectionPairSet::Config::A1) {
            dirs = {{"config", "A1"}, {"l", directions.l}, {"rotation", directions.a1_rotation}};
        } else {
            dirs = {{"config", "A2"},
                    {"l", directions.l},
                    {"alphas", {directions.alphas[0], directions.alphas[1]}}};
        }
        nlohmann::json scat = {{"geometry", scatterer_geometry}, {"bc", to_string(bc)}};
        if (bc == BoundaryKind::Impedance) scat["lambda"] = lambda_text;
        return nlohmann::json{{"version", 1},
                              {"scatterer", scat},
                              {"directions", dirs},
                              {"k_minus", grid.k_minus},
                              {"k_plus", grid.k_plus},
                              {"dk", grid.dk},
                              {"delta", delta},
                              {"seed", seed},
                              {"count", record_count()}};
    }
};

/// Noise-free synthesis: one factorization per wavenumber serves every
/// incident direction; rotated incidence sets reuse base-set solves whenever
/// the directions coincide. Record order is canonical regardless of the
/// number of worker threads.
inline FarFieldDataset synthesize(const ScattererSpec& spec, const DirectionPairSet& pairs,
                                  const FrequencyGrid& grid, int threads = 1) {
    FarFieldDataset out{pairs, grid, spec.curve.name(), spec.bc,
                        spec.bc == BoundaryKind::Impedance ? spec.profile.text : "", 0.0, 0,
                        {}};
    out.values.assign(out.record_count(), Complex(0.0, 0.0));

    // unique incident directions across pairs
    std::vector<Direction> incident;
    std::vector<int> pair_inc(pairs.pairs.size());
    for (std::size_t p = 0; p < pairs.pairs.size(); ++p) {
        const Direction& th = pairs.pairs[p].theta;
        int found = -1;
        for (std::size_t q = 0; q < incident.size(); ++q)
            if (th.dot(incident[q]) > 1.0 - 1e-14) {
                found = int(q);
                break;
            }
        if (found < 0) {
            incident.push_back(th);
            found = int(incident.size()) - 1;
        }
        pair_inc[p] = found;
    }

    auto solve_one_k = [&](int m) {
        const double k = grid.k(m);
        FarFieldSolver solver(spec, k);
        std::vector<Eigen::VectorXcd> densities(incident.size());
        for (std::size_t q = 0; q < incident.size(); ++q)
            densities[q] = solver.solve_density(incident[q]);
        for (std::size_t p = 0; p < pairs.pairs.size(); ++p) {
            const auto& pr = pairs.pairs[p];
            const Complex v = solver.far_field(pr.xhat, densities[std::size_t(pair_inc[p])]);
            out.values[out.record_index(pr.dir_index, pr.rot_index, m)] = v;
        }
    };

    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        for (int m = 0; m <= grid.M; ++m) solve_one_k(m);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&]() {
                for (;;) {
                    const int m = next.fetch_add(1);
                    if (m > grid.M) return;
                    solve_one_k(m);
                }
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

namespace detail {

/// Portable deterministic N(0,1) pairs: mt19937_64 feeding Box-Muller, two
/// generator draws per record in record order.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

    std::pair<double, double> next_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * pi * u2), r * std::sin(2.0 * pi * u2)};
    }

  private:
    double uniform() {
        // strictly inside (0,1) so the log is finite
        return (double(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }
    std::mt19937_64 gen_;
};

}  // namespace detail

/// Relative Gaussian noise v -> v (1 + delta (X + iY)) with a fresh
/// independent pair per record in canonical record order.
inline FarFieldDataset add_noise(const FarFieldDataset& data, double delta, std::uint64_t seed) {
    if (delta < 0.0) throw std::invalid_argument("add_noise: delta must be nonnegative");
    FarFieldDataset out = data;
    out.delta = delta;
    out.seed = seed;
    if (delta == 0.0) return out;
    detail::GaussianStream gs(seed);
    for (auto& v : out.values) {
        const auto [x, y] = gs.next_pair();
        v *= Complex(1.0 + delta * x, delta * y);
    }
    return out;
}

inline void save_dataset(const FarFieldDataset& data, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_dataset: cannot open '" + path + "'");
    os << data.manifest().dump() << "\n";
    const int R = data.directions.rotations();
    char line[256];
    for (int dir = 0; dir < data.directions.l; ++dir)
        for (int rot = 0; rot < R; ++rot) {
            const auto& pr = data.directions.pair(dir, rot);
            for (int m = 0; m <= data.grid.M; ++m) {
                const Complex v = data.value(dir, rot, m);
                std::snprintf(line, sizeof(line),
                              "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", pr.theta.x(),
                              pr.theta.y(), pr.xhat.x(), pr.xhat.y(), data.grid.k(m), v.real(),
                              v.imag());
                os << line;
            }
        }
    if (!os) throw std::runtime_error("save_dataset: write failed for '" + path + "'");
}

inline FarFieldDataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_dataset: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line)) throw ParseError("load_dataset: empty file");
    nlohmann::json man;
    try {
        man = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("load_dataset: manifest parse failure at line 1: ") +
                         e.what());
    }

    DirectionPairSet dirs;
    try {
        const auto& jd = man.at("directions");
        const std::string cfg = jd.at("config").get<std::string>();
        const int l = jd.at("l").get<int>();
        if (cfg == "A1") {
            dirs = build_direction_set(l, A1Config{jd.at("rotation").get<double>()});
        } else if (cfg == "A2") {
            const auto alphas = jd.at("alphas");
            dirs = build_direction_set(l, A2Config{alphas.at(0).get<int>(), alphas.at(1).get<int>()});
        } else {
            throw ParseError("load_dataset: unknown direction config '" + cfg + "'");
        }
        FrequencyGrid grid(man.at("k_minus").get<double>(), man.at("k_plus").get<double>(),
                           man.at("dk").get<double>());
        const auto& js = man.at("scatterer");
        FarFieldDataset out{std::move(dirs),
                            grid,
                            js.at("geometry").get<std::string>(),
                            boundary_kind_from_string(js.at("bc").get<std::string>()),
                            js.contains("lambda") ? js.at("lambda").get<std::string>() : "",
                            man.at("delta").get<double>(),
                            man.at("seed").get<std::uint64_t>(),
                            {}};

        const std::size_t expected = man.at("count").get<std::size_t>();
        if (expected != out.record_count())
            throw IntegrityError("load_dataset: manifest count " + std::to_string(expected) +
                                 " does not match direction/frequency layout " +
                                 std::to_string(out.record_count()));

        out.values.reserve(expected);
        std::size_t lineno = 1;
        while (std::getline(is, line)) {
            ++lineno;
            if (line.empty()) continue;
            double tx, ty, ox, oy, k, re, im;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &tx, &ty, &ox, &oy, &k,
                            &re, &im) != 7)
                throw ParseError("load_dataset: malformed record at line " +
                                 std::to_string(lineno));
            const std::size_t idx = out.values.size();
            if (idx >= expected)
                throw IntegrityError("load_dataset: more records than manifest count");
            const int m = int(idx % std::size_t(out.grid.count()));
            const std::size_t pidx = idx / std::size_t(out.grid.count());
            const auto& pr = out.directions.pairs[pidx];
            if (std::abs(pr.theta.x() - tx) > 1e-12 || std::abs(pr.theta.y() - ty) > 1e-12 ||
                std::abs(pr.xhat.x() - ox) > 1e-12 || std::abs(pr.xhat.y() - oy) > 1e-12 ||
                std::abs(out.grid.k(m) - k) > 1e-9)
                throw IntegrityError("load_dataset: record at line " + std::to_string(lineno) +
                                     " does not match the canonical order");
            out.values.emplace_back(re, im);
        }
        if (out.values.size() != expected)
            throw IntegrityError("load_dataset: expected " + std::to_string(expected) +
                                 " records, found " + std::to_string(out.values.size()));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("load_dataset: manifest field error: ") + e.what());
    }
}

}  // namespace echoform
