#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include "echoform/calibration.hpp"

using namespace echoform;
using Catch::Approx;

TEST_CASE("oracle calibration resolves the convention", "[calibration]") {
    CalibrationDiagnostics diag;
    const ConventionCalibration cal = calibrate_with_oracle(&diag);

    // The reference-table convention: leading term -e^{-i k y+.(xhat-theta)} A.
    CHECK(cal.phase_sign == -1);
    CHECK(cal.rho.real() == Approx(-1.0).margin(1e-12));
    CHECK(cal.rho.imag() == Approx(0.0).margin(1e-12));
    CHECK(cal.mobius_sign == -1);

    CHECK(diag.fit_residual < 0.05);
    CHECK(diag.lambda_roundtrip == Approx(2.0).margin(0.05));
}

TEST_CASE("calibration record round trips through JSON", "[calibration]") {
    namespace fs = std::filesystem;
    const ConventionCalibration cal = calibrate_with_oracle();
    const auto path = (fs::temp_directory_path() / "echoform_cal.json").string();
    cal.save(path);
    const ConventionCalibration back = ConventionCalibration::load(path);
    CHECK(back.phase_sign == cal.phase_sign);
    CHECK(back.rho == cal.rho);
    CHECK(back.mobius_sign == cal.mobius_sign);

    // default_calibration honors the environment override
    setenv("ECHOFORM_CALIBRATION", path.c_str(), 1);
    const ConventionCalibration env = default_calibration();
    CHECK(env.phase_sign == cal.phase_sign);
    unsetenv("ECHOFORM_CALIBRATION");
}
