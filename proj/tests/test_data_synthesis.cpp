#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "echoform/data_synthesis.hpp"

using namespace echoform;
using Catch::Approx;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

FarFieldDataset tiny_dataset() {
    ScattererSpec spec(BoundaryCurve::disk(1.0), BoundaryKind::Dirichlet);
    const auto pairs = build_direction_set(4, A1Config{});
    const FrequencyGrid grid(2.0, 2.4, 0.2);
    return synthesize(spec, pairs, grid);
}

}  // namespace

TEST_CASE("frequency grid invariants", "[data]") {
    const FrequencyGrid g(20.0, 50.0, 0.1);
    CHECK(g.M == 300);
    CHECK(g.k(0) == Approx(20.0));
    CHECK(g.k(300) == Approx(50.0));
    CHECK_THROWS(FrequencyGrid(20.0, 50.0, 0.7));   // non-integer step count
    CHECK_THROWS(FrequencyGrid(50.0, 20.0, 0.1));
    CHECK_THROWS(FrequencyGrid(-1.0, 2.0, 0.1));
}

TEST_CASE("A1 direction set", "[data]") {
    const auto set = build_direction_set(4, A1Config{});
    REQUIRE(set.pairs.size() == 4);
    for (const auto& p : set.pairs) {
        CHECK((p.xhat.vec() + p.theta.vec()).norm() < 1e-14);
        CHECK(std::abs(p.xhat.vec().norm() - 1.0) < 1e-12);
    }
    CHECK_THROWS(build_direction_set(3, A1Config{}));
}

TEST_CASE("A2 rotations reproduce the displayed matrices", "[data]") {
    const auto set = build_direction_set(64, A2Config{8, 10});
    REQUIRE(set.pairs.size() == 64 * 3);

    // theta = (1, 0): theta_1 = (cos pi/4, -sin pi/4), xhat_1 = Q_8 theta_1
    const Direction th = Direction::from_angle(0.0);
    const Direction th1 = apply_R(8, th);
    CHECK(th1.x() == Approx(std::cos(pi / 4)).margin(1e-14));
    CHECK(th1.y() == Approx(-std::sin(pi / 4)).margin(1e-14));
    const Direction xh1 = apply_Q(8, th1);
    CHECK(xh1.x() == Approx(-std::sqrt(2.0) / 2.0).margin(1e-14));
    CHECK(xh1.y() == Approx(-std::sqrt(2.0) / 2.0).margin(1e-14));

    // the rotated pair shares the backscattering pair's reflection normal
    const Direction mphi = -reflect_normal(xh1, th1);
    CHECK(mphi.x() == Approx(-1.0).margin(1e-12));
    CHECK(mphi.y() == Approx(0.0).margin(1e-12));

    // xhat.xhat_j = cos(alpha pi/32) for every base direction
    for (int dir = 0; dir < 64; ++dir) {
        const auto& back = set.pair(dir, 0);
        CHECK(back.xhat.dot(set.pair(dir, 1).xhat) == Approx(std::cos(pi / 4)).margin(1e-12));
        CHECK(back.xhat.dot(set.pair(dir, 2).xhat) ==
              Approx(std::cos(10.0 * pi / 32.0)).margin(1e-12));
        for (int rot = 1; rot <= 2; ++rot) {
            const auto& p = set.pair(dir, rot);
            const Direction shared = -reflect_normal(p.xhat, p.theta);
            CHECK((shared.vec() + back.theta.vec()).norm() < 1e-12);
        }
    }

    CHECK_THROWS_WITH(build_direction_set(60, A2Config{8, 10}),
                      Catch::Matchers::ContainsSubstring("divisible"));
}

TEST_CASE("A2 closure: rotated incidence directions stay in Theta_l", "[data]") {
    const auto set = build_direction_set(64, A2Config{8, 10});
    for (const auto& p : set.pairs) {
        bool found = false;
        for (const auto& b : set.base)
            if (p.theta.dot(b) > 1.0 - 1e-12) found = true;
        CHECK(found);
    }
}

TEST_CASE("A2 pairs are unique on (theta, xhat)", "[data]") {
    const auto set = build_direction_set(64, A2Config{8, 10});
    for (std::size_t i = 0; i < set.pairs.size(); ++i)
        for (std::size_t j = i + 1; j < set.pairs.size(); ++j) {
            const bool same = set.pairs[i].theta.dot(set.pairs[j].theta) > 1.0 - 1e-12 &&
                              set.pairs[i].xhat.dot(set.pairs[j].xhat) > 1.0 - 1e-12;
            CHECK_FALSE(same);
        }
}

TEST_CASE("noise model statistics and determinism", "[data]") {
    FarFieldDataset data = tiny_dataset();
    // blow the dataset up to 1e5 records by repeating values: statistics only
    FarFieldDataset big = data;
    big.values.assign(100000, Complex(1.0, -2.0));

    const auto noisy = add_noise(big, 0.1, 42);
    double mean_sq = 0.0, mx = 0.0, my = 0.0, mxx = 0.0, myy = 0.0, mxy = 0.0;
    for (std::size_t i = 0; i < noisy.values.size(); ++i) {
        const Complex ratio = noisy.values[i] / big.values[i] - 1.0;
        mean_sq += std::norm(ratio);
        const double x = ratio.real() / 0.1, y = ratio.imag() / 0.1;
        mx += x;
        my += y;
        mxx += x * x;
        myy += y * y;
        mxy += x * y;
    }
    const double n = double(noisy.values.size());
    mean_sq /= n;
    CHECK(mean_sq == Approx(0.02).epsilon(0.05));
    CHECK(std::abs(mx / n) < 0.05);
    CHECK(std::abs(my / n) < 0.05);
    CHECK(mxx / n == Approx(1.0).epsilon(0.05));
    CHECK(myy / n == Approx(1.0).epsilon(0.05));
    CHECK(std::abs(mxy / n) < 0.05);

    // determinism and the delta = 0 identity
    const auto again = add_noise(big, 0.1, 42);
    CHECK(again.values == noisy.values);
    const auto zero = add_noise(big, 0.0, 7);
    CHECK(zero.values == big.values);
}

TEST_CASE("dataset save/load round trip and integrity", "[data]") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "echoform_data_test";
    fs::create_directories(dir);
    const std::string path = (dir / "tiny.ds").string();

    FarFieldDataset data = add_noise(tiny_dataset(), 0.1, 9);
    save_dataset(data, path);
    const FarFieldDataset loaded = load_dataset(path);
    CHECK(loaded.values == data.values);
    CHECK(loaded.delta == data.delta);
    CHECK(loaded.seed == data.seed);
    CHECK(loaded.scatterer_geometry == data.scatterer_geometry);

    // byte-stable serialization
    const std::string path2 = (dir / "tiny2.ds").string();
    save_dataset(loaded, path2);
    CHECK(slurp(path) == slurp(path2));

    // truncated at a record boundary: integrity error (fewer records than
    // the manifest count); truncated mid-record: parse error
    const std::string whole = slurp(path);
    const std::size_t second_last_nl = whole.rfind('\n', whole.rfind('\n') - 1);
    const std::string path3 = (dir / "cut.ds").string();
    std::ofstream(path3, std::ios::binary) << whole.substr(0, second_last_nl + 1);
    CHECK_THROWS_AS(load_dataset(path3), IntegrityError);
    const std::string path3b = (dir / "cut2.ds").string();
    std::ofstream(path3b, std::ios::binary) << whole.substr(0, second_last_nl + 4);
    CHECK_THROWS_AS(load_dataset(path3b), ParseError);

    // manifest-only file fails integrity
    std::istringstream head(whole);
    std::string manifest_line;
    std::getline(head, manifest_line);
    const std::string path4 = (dir / "head.ds").string();
    std::ofstream(path4, std::ios::binary) << manifest_line << "\n";
    CHECK_THROWS_AS(load_dataset(path4), IntegrityError);

    // garbage record fails parsing with a line number
    const std::string path5 = (dir / "bad.ds").string();
    std::ofstream(path5, std::ios::binary) << manifest_line << "\nnot,a,record\n";
    CHECK_THROWS_WITH(load_dataset(path5), Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("record layout and counting", "[data]") {
    ScattererSpec spec(BoundaryCurve::disk(1.0), BoundaryKind::Dirichlet);
    const auto pairs = build_direction_set(64, A2Config{8, 10});
    const FrequencyGrid grid(5.0, 5.3, 0.1);
    const auto data = synthesize(spec, pairs, grid);
    CHECK(data.record_count() == 64u * 3u * 4u);
    // antipodal index flips the base direction
    for (int dir = 0; dir < 64; ++dir) {
        const int rev = data.antipodal_index(dir);
        CHECK((data.directions.base[std::size_t(rev)].vec() +
               data.directions.base[std::size_t(dir)].vec())
                  .norm() < 1e-12);
    }
}

TEST_CASE("multithreaded synthesis is bit-identical", "[data]") {
    ScattererSpec spec(BoundaryCurve::disk(1.0), BoundaryKind::Neumann);
    const auto pairs = build_direction_set(8, A1Config{});
    const FrequencyGrid grid(3.0, 4.0, 0.25);
    const auto seq = synthesize(spec, pairs, grid, 1);
    const auto par = synthesize(spec, pairs, grid, 4);
    CHECK(seq.values == par.values);
}
