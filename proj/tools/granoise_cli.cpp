// Command-line front end: loads a scenario, runs one computation and writes
// tables plus a manifest sidecar into the output directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "granoise/errors.hpp"
#include "granoise/io/manifest.hpp"
#include "granoise/io/runs.hpp"
#include "granoise/io/scenario.hpp"
#include "granoise/io/svg.hpp"
#include "granoise/io/table.hpp"
#include "granoise/version.hpp"

namespace fs = std::filesystem;
using namespace granoise;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_config = 2;

struct Globals {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    unsigned threads = 0;
    std::string format = "csv";
};

struct Session {
    const Globals& g;
    std::string command;
    io::OutputFormat format;
    fs::path out_dir;
    io::RunManifest manifest;
    std::optional<io::Scenario> scenario;

    Session(const Globals& globals, std::string cmd)
        : g(globals), command(std::move(cmd)), format(io::output_format_from_string(globals.format)), out_dir(globals.out) {
        fs::create_directories(out_dir);
        manifest.tool_version = granoise::version;
        manifest.command = command;
        manifest.timestamp = io::utc_timestamp();
        manifest.threads = g.threads;
        manifest.format = std::string(io::to_string(format));
    }

    const io::Scenario& load() {
        if (g.scenario.empty()) throw ConfigError(command + ": --scenario is required");
        scenario = io::load_scenario(g.scenario);
        if (g.seed && scenario->mc) scenario->mc->seed = *g.seed;
        manifest.seed = scenario->mc ? scenario->mc->seed : g.seed.value_or(0);
        manifest.config_hash = io::config_hash(scenario->canonical_json, manifest.seed);
        manifest.input_file = fs::path(g.scenario).filename().string();
        manifest.input_digest = io::sha256_file(g.scenario);
        return *scenario;
    }

    std::string write(const std::string& stem, const io::Table& table) {
        const std::string name = stem + std::string(io::extension(format));
        std::ofstream f(out_dir / name, std::ios::binary);
        io::write_table(f, table, format);
        f.close();
        if (!f) throw Error("failed to write '" + (out_dir / name).string() + "'");
        manifest.add_output(out_dir, name);
        return name;
    }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream f(out_dir / name, std::ios::binary);
        f << text;
        f.close();
        if (!f) throw Error("failed to write '" + (out_dir / name).string() + "'");
        manifest.add_output(out_dir, name);
    }

    void finish() {
        const fs::path p = out_dir / (command + ".manifest.json");
        std::ofstream f(p, std::ios::binary);
        f << manifest.to_json();
        std::cerr << "manifest: " << p.string() << "\n";
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Granularity-noise modelling for vapour-cell Rydberg electrometry"};
    app.set_version_flag("--version", std::string(granoise::version));
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--scenario", g.scenario, "Scenario file (JSON with unit-suffixed quantities)");
    app.add_option("--seed", g.seed, "Override the Monte Carlo seed");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();

    int status = exit_ok;

    auto* fluxes = app.add_subcommand("fluxes", "Echo the loaded parameters and the atom/photon resource accounting");
    fluxes->callback([&] {
        Session s(g, "fluxes");
        const auto& sc = s.load();
        const io::Table t = io::run_fluxes(sc);
        io::write_csv(std::cout, t);
        s.write("fluxes", t);
        s.finish();
    });

    auto* scaling = app.add_subcommand("scaling-sweep", "Relative noise vs resource ratio, one curve per omega_s");
    scaling->callback([&] {
        Session s(g, "scaling-sweep");
        const auto& sc = s.load();
        std::cout << s.write("scaling_sweep", io::run_scaling_sweep(sc, g.threads)) << "\n";
        s.finish();
    });

    auto* map = app.add_subcommand("sensitivity-map", "Field sensitivity over input power and beam waist");
    map->callback([&] {
        Session s(g, "sensitivity-map");
        const auto& sc = s.load();
        const auto out = io::run_sensitivity_map(sc, g.threads);
        std::cout << s.write("sensitivity_map", out.grid) << "\n" << s.write("sensitivity_inset", out.inset) << "\n";
        s.finish();
    });

    auto* quantum = app.add_subcommand("quantum-sweep", "Relative noise vs resource ratio for several Mandel Q");
    quantum->callback([&] {
        Session s(g, "quantum-sweep");
        const auto& sc = s.load();
        const auto out = io::run_quantum_sweep(sc, g.threads);
        std::cout << s.write("quantum_sweep", out.table) << "\n";
        if (out.R_crit)
            std::cout << "R_crit = " << io::format_double(*out.R_crit) << "\n";
        else
            std::cout << "R_crit: no crossing inside the bracket\n";
        s.finish();
    });

    double inject_j_scale = 1.0;
    auto* mc = app.add_subcommand("mc-validate", "Monte Carlo check of the scaling law; exit 1 on failure");
    mc->add_option("--inject-j-scale", inject_j_scale, "Multiply the analytic J (harness self-test)")->group("");
    mc->callback([&] {
        Session s(g, "mc-validate");
        const auto& sc = s.load();
        const auto out = io::run_mc_validation(sc, g.threads, inject_j_scale);
        s.write("mc_validation", out.table);
        std::cout << "J = " << io::format_double(out.report.J) << ", density = " << io::format_double(out.density_n)
                  << " m^-3\n";
        for (const auto& r : out.report.rows)
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "R = " << io::format_double(r.R)
                      << "  empirical = " << r.empirical_ratio << " [" << r.ci_low << ", " << r.ci_high
                      << "]  analytic = " << r.analytic_ratio << "  deviation = " << r.deviation << "\n";
        if (out.report.agn_slope) std::cout << "AGN-branch log-log slope = " << *out.report.agn_slope << "\n";
        std::cout << (out.report.passed ? "validation passed" : "validation FAILED") << "\n";
        s.finish();
        if (!out.report.passed) status = exit_failure;
    });

    std::string csv_path, output, kind = "line", x, y, z, group, title;
    bool log_x = false, log_y = false, log_z = false;
    auto* svg = app.add_subcommand("emit-svg", "Render a CSV table as a line chart or heatmap");
    svg->add_option("--csv", csv_path, "Input CSV")->required();
    svg->add_option("--kind", kind, "line|heatmap")->check(CLI::IsMember({"line", "heatmap"}));
    svg->add_option("-x,--x", x, "X column")->required();
    svg->add_option("-y,--y", y, "Y column")->required();
    svg->add_option("-z,--z", z, "Colour column (heatmap)");
    svg->add_option("--group", group, "One line per distinct value of this column");
    svg->add_option("--title", title);
    svg->add_flag("--log-x", log_x);
    svg->add_flag("--log-y", log_y);
    svg->add_flag("--log-z", log_z);
    svg->add_option("-o,--output", output, "SVG file name inside --out (default: <csv stem>.svg)");
    svg->callback([&] {
        Session s(g, "emit-svg");
        std::ifstream in(csv_path, std::ios::binary);
        if (!in) throw ConfigError("cannot open '" + csv_path + "'");
        const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        io::PlotSpec spec;
        spec.kind = io::plot_kind_from_string(kind);
        spec.x = x;
        spec.y = y;
        spec.z = z;
        if (!group.empty()) spec.group = group;
        spec.log_x = log_x;
        spec.log_y = log_y;
        spec.log_z = log_z;
        spec.title = title;
        if (spec.kind == io::PlotKind::heatmap && z.empty()) throw ConfigError("emit-svg: heatmap needs --z");
        s.manifest.input_file = fs::path(csv_path).filename().string();
        s.manifest.input_digest = io::sha256_hex(text);
        const std::string name = output.empty() ? fs::path(csv_path).stem().string() + ".svg" : output;
        s.write_text(name, io::emit_svg(io::read_csv(text), spec));
        std::cout << name << "\n";
        s.finish();
    });

    std::string manifest_path;
    auto* verify = app.add_subcommand("verify-manifest", "Re-hash the outputs listed in a manifest");
    verify->add_option("manifest", manifest_path, "Manifest JSON file")->required();
    verify->callback([&] {
        const auto bad = io::verify_manifest(manifest_path);
        for (const auto& name : bad) std::cout << "mismatch: " << name << "\n";
        std::cout << (bad.empty() ? "manifest ok" : "manifest FAILED") << "\n";
        if (!bad.empty()) status = exit_failure;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return status;
}
