// echoform command-line driver: far-field synthesis, convention calibration,
// and the reconstruction pipeline (classification, impedance recovery, and
// the sampling indicators), with dataset/report/heatmap emitters.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "echoform/pipeline.hpp"

namespace {

using namespace echoform;

struct BandOption {
    double k_minus = 20.0, k_plus = 50.0, dk = 0.1;
};

void parse_band(const std::string& text, RunConfig& cfg) {
    double a, b, d;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &d) != 3)
        throw CLI::ValidationError("--band expects k_minus:k_plus:dk");
    if (!(a > 0.0) || !(b > a) || !(d > 0.0))
        throw CLI::ValidationError("--band needs 0 < k_minus < k_plus and dk > 0");
    cfg.k_minus = a;
    cfg.k_plus = b;
    cfg.dk = d;
}

void parse_grid(const std::string& text, RunConfig& cfg) {
    double x0, x1, y0, y1, h;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf:%lf:%lf", &x0, &x1, &y0, &y1, &h) != 5)
        throw CLI::ValidationError("--grid expects xmin:xmax:ymin:ymax:h");
    cfg.grid = GridSpec{x0, x1, y0, y1, h};
}

void add_synthesis_flags(CLI::App* cmd, RunConfig& cfg, std::string& band, std::string& alphas) {
    cmd->add_option("--geometry", cfg.geometry, "Curve preset: egg | kite | disk:a=R,cx=X,cy=Y");
    cmd->add_option("--bc", cfg.bc, "Boundary condition: dirichlet | neumann | impedance");
    cmd->add_option("--lambda", cfg.lambda_expr, "Impedance profile over t, e.g. '2+0.5*sin(t)'");
    cmd->add_option("--band", band, "Wavenumber band k_minus:k_plus:dk (default 20:50:0.1)");
    cmd->add_option("--directions", cfg.directions, "Number of base directions (default 64)");
    cmd->add_option("--set", cfg.direction_set, "Direction configuration A1 | A2 (default A2)");
    cmd->add_option("--alphas", alphas, "A2 rotation indices a1,a2 (default 8,10)");
    cmd->add_option("--noise", cfg.noise, "Relative noise level delta (default 0.1)");
    cmd->add_option("--seed", cfg.seed, "Noise seed (default 1)");
    cmd->add_option("--threads", cfg.threads, "Worker threads for synthesis (default 1)");
}

void finish_config(RunConfig& cfg, const std::string& band, const std::string& alphas) {
    if (!band.empty()) parse_band(band, cfg);
    if (!alphas.empty()) {
        if (std::sscanf(alphas.c_str(), "%d,%d", &cfg.alpha1, &cfg.alpha2) != 2)
            throw CLI::ValidationError("--alphas expects a1,a2");
    }
}

ConventionCalibration cli_calibration() { return default_calibration(); }

int cmd_oracle(bool as_json) {
    struct Cell {
        const char* label;
        BoundaryKind bc;
        double lambda;
        double k;
        bool forward;
        double re, im;
    };
    // noise-free reference values for the radius-1.5 disk at d = (1, 0)
    static const Cell cells[] = {
        {"neumann", BoundaryKind::Neumann, 0, 20, true, -3.3288, 3.8856},
        {"neumann", BoundaryKind::Neumann, 0, 20, false, -0.8189, 0.2814},
        {"neumann", BoundaryKind::Neumann, 0, 50, true, -5.5900, 6.0797},
        {"neumann", BoundaryKind::Neumann, 0, 50, false, 0.6111, 0.6135},
        {"lambda=0.06", BoundaryKind::Impedance, 0.06, 20, true, -3.5254, 3.9288},
        {"lambda=0.06", BoundaryKind::Impedance, 0.06, 20, false, -0.7255, 0.2493},
        {"lambda=0.06", BoundaryKind::Impedance, 0.06, 50, true, -5.8112, 6.1183},
        {"lambda=0.06", BoundaryKind::Impedance, 0.06, 50, false, 0.5418, 0.5442},
        {"lambda=12.06", BoundaryKind::Impedance, 12.06, 20, true, -4.3081, 3.6514},
        {"lambda=12.06", BoundaryKind::Impedance, 12.06, 20, false, 0.7007, -0.2172},
        {"lambda=12.06", BoundaryKind::Impedance, 12.06, 50, true, -6.4356, 5.8676},
        {"lambda=12.06", BoundaryKind::Impedance, 12.06, 50, false, -0.5109, -0.5262},
        {"dirichlet", BoundaryKind::Dirichlet, 0, 20, true, -4.3184, 3.6405},
        {"dirichlet", BoundaryKind::Dirichlet, 0, 20, false, 0.8278, -0.2555},
        {"dirichlet", BoundaryKind::Dirichlet, 0, 50, true, -6.4422, 5.8608},
        {"dirichlet", BoundaryKind::Dirichlet, 0, 50, false, -0.6030, -0.6217},
    };

    const Direction d = Direction::from_angle(0.0);
    bool ok = true;
    nlohmann::json rows = nlohmann::json::array();
    if (!as_json) std::printf("case,method,k,pair,re,im,ref_re,ref_im,abs_diff\n");
    for (const auto& cell : cells) {
        const Direction obs = d;
        const Direction inc = cell.forward ? d : -d;
        const DiskSpec mspec(1.5, {0, 0}, cell.bc, cell.lambda);
        const Complex oracle = disk_far_field(mspec, obs, inc, cell.k);
        ScattererSpec sspec(BoundaryCurve::disk(1.5), cell.bc,
                            cell.bc == BoundaryKind::Impedance
                                ? ImpedanceProfile::constant(cell.lambda)
                                : ImpedanceProfile{});
        const SolveRequest req(sspec, cell.k, {inc}, {obs});
        const Complex solver = solve_far_field(req)(0, 0);
        const Complex ref(cell.re, cell.im);
        for (const auto& [method, value] : {std::pair<const char*, Complex>{"oracle", oracle},
                                            std::pair<const char*, Complex>{"solver", solver}}) {
            const double diff = std::max(std::abs(value.real() - ref.real()),
                                         std::abs(value.imag() - ref.imag()));
            ok = ok && diff < 2e-3;
            if (as_json) {
                rows.push_back({{"case", cell.label},
                                {"method", method},
                                {"k", cell.k},
                                {"pair", cell.forward ? "forward" : "backscatter"},
                                {"re", value.real()},
                                {"im", value.imag()},
                                {"ref_re", cell.re},
                                {"ref_im", cell.im},
                                {"abs_diff", diff}});
            } else {
                std::printf("%s,%s,%g,%s,%.6f,%.6f,%.4f,%.4f,%.2e\n", cell.label, method, cell.k,
                            cell.forward ? "forward" : "backscatter", value.real(), value.imag(),
                            cell.re, cell.im, diff);
            }
        }
    }
    if (as_json)
        std::cout << nlohmann::json{{"cells", rows}, {"all_within_2e-3", ok}}.dump(2) << "\n";
    else
        std::printf("# all diffs < 2e-3: %s\n", ok ? "yes" : "NO");
    return ok ? 0 : 1;
}

void emit_grids(const PipelineReport& rep, const std::string& outdir) {
    namespace fs = std::filesystem;
    fs::create_directories(outdir);
    if (rep.grid_I) {
        write_grid_csv(*rep.grid_I, outdir + "/indicator_I.csv");
        write_grid_pgm16(*rep.grid_I, outdir + "/indicator_I.pgm");
    }
    if (rep.grid_T) {
        write_grid_csv(*rep.grid_T, outdir + "/indicator_T.csv");
        write_grid_pgm16(*rep.grid_T, outdir + "/indicator_T.pgm");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"echoform: multi-frequency backscattering synthesis and obstacle reconstruction"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string band, alphas, grid_text;
    std::string out_path, in_path;
    bool as_json = false;

    auto* synth = app.add_subcommand("synthesize", "Synthesize a far-field dataset file");
    add_synthesis_flags(synth, cfg, band, alphas);
    synth->add_option("--out", out_path, "Output dataset path")->required();

    auto* pipeline = app.add_subcommand("pipeline", "Run the full reconstruction pipeline");
    add_synthesis_flags(pipeline, cfg, band, alphas);
    pipeline->add_option("--in", in_path, "Existing dataset file (skips synthesis)");
    pipeline->add_option("--grid", grid_text, "Sampling grid xmin:xmax:ymin:ymax:h");
    pipeline->add_option("--indicator", cfg.indicator, "Indicator to image with: I | T");
    pipeline->add_flag("--concave", cfg.concave, "Use the concave classification criterion");
    pipeline->add_option("--out", out_path, "Output directory")->required();

    auto* recon = app.add_subcommand("reconstruct", "Emit indicator grids only");
    add_synthesis_flags(recon, cfg, band, alphas);
    recon->add_option("--in", in_path, "Existing dataset file (skips synthesis)");
    recon->add_option("--grid", grid_text, "Sampling grid xmin:xmax:ymin:ymax:h");
    recon->add_option("--indicator", cfg.indicator, "Indicator to image with: I | T");
    recon->add_flag("--concave", cfg.concave, "Use the concave classification criterion");
    recon->add_option("--out", out_path, "Output directory")->required();

    auto* imped = app.add_subcommand("impedance", "Recover the impedance profile");
    add_synthesis_flags(imped, cfg, band, alphas);
    imped->add_option("--in", in_path, "Existing dataset file (skips synthesis)");
    bool with_boundary = false, no_boundary = false;
    imped->add_flag("--with-boundary", with_boundary,
                    "Use the known-boundary formula (needs --geometry)");
    imped->add_flag("--no-boundary", no_boundary, "Use the rotation-pair formula (default)");
    imped->add_flag("--concave", cfg.concave, "Use the concave classification criterion");
    imped->add_option("--out", out_path, "Output JSON path")->required();

    auto* classify = app.add_subcommand("classify", "Boundary-condition classification only");
    add_synthesis_flags(classify, cfg, band, alphas);
    classify->add_option("--in", in_path, "Existing dataset file (skips synthesis)");
    classify->add_flag("--concave", cfg.concave, "Use the concave classification criterion");
    classify->add_option("--out", out_path, "Output JSON path");

    auto* oracle = app.add_subcommand("oracle", "Reference-disk regression table");
    oracle->add_flag("--json", as_json, "Machine-readable output");

    auto* calib = app.add_subcommand("calibrate", "Fit and print the phase-convention record");
    calib->add_option("--out", out_path, "Write the record to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        finish_config(cfg, band, alphas);
        if (!grid_text.empty()) parse_grid(grid_text, cfg);

        if (synth->parsed()) {
            const FarFieldDataset data = synthesize_dataset(cfg);
            save_dataset(data, out_path);
            std::printf("wrote %zu records to %s\n", data.record_count(), out_path.c_str());
            return 0;
        }

        if (oracle->parsed()) return cmd_oracle(as_json);

        if (calib->parsed()) {
            CalibrationDiagnostics diag;
            const ConventionCalibration cal = calibrate_with_oracle(&diag);
            nlohmann::json j = cal.to_json();
            j["fit_residual"] = diag.fit_residual;
            j["lambda_roundtrip"] = diag.lambda_roundtrip;
            std::cout << j.dump(2) << "\n";
            if (!out_path.empty()) cal.save(out_path);
            return 0;
        }

        // remaining commands consume a dataset
        const FarFieldDataset data =
            in_path.empty() ? synthesize_dataset(cfg) : load_dataset(in_path);
        const ConventionCalibration cal = cli_calibration();

        if (classify->parsed()) {
            const PipelineReport rep = classify_and_recover(data, cfg.concave);
            const nlohmann::json j = report_to_json(rep, data);
            if (out_path.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                std::ofstream os(out_path);
                os << j.dump(2) << "\n";
            }
            std::printf("classification: %s\n", rep.classification.c_str());
            return 0;
        }

        if (imped->parsed()) {
            nlohmann::json out;
            if (with_boundary) {
                const BoundaryCurve curve = BoundaryCurve::from_name(cfg.geometry);
                const auto table = impedance_with_boundary(data, curve, cal);
                nlohmann::json rows = nlohmann::json::array();
                for (const auto& est : table)
                    rows.push_back({{"beta", est.beta}, {"lambda", est.lambda_tilde}});
                out = {{"method", "with-boundary"}, {"directions", rows}};
            } else {
                const PipelineReport rep = classify_and_recover(data, cfg.concave);
                out = report_to_json(rep, data);
                out["method"] = "no-boundary";
            }
            std::ofstream os(out_path);
            os << out.dump(2) << "\n";
            std::printf("wrote %s\n", out_path.c_str());
            return 0;
        }

        if (pipeline->parsed() || recon->parsed()) {
            const PipelineReport rep =
                run_pipeline(data, cfg.grid, cfg.concave, cfg.indicator, cal);
            emit_grids(rep, out_path);
            if (pipeline->parsed()) {
                std::ofstream os(out_path + "/report.json");
                os << report_to_json(rep, data).dump(2) << "\n";
                std::printf("classification: %s\n", rep.classification.c_str());
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
