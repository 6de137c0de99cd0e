// Command-line front end: scans, witnesses, shot-noise sampling, the
// published-result reproduction table, and the invariant self-check.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/configuration error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nisim/dsl.hpp"
#include "nisim/interferometer.hpp"
#include "nisim/noise.hpp"
#include "nisim/selfcheck.hpp"
#include "nisim/table.hpp"
#include "nisim/witness.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Pre-run configuration problem: reported on stderr, exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SourceOpts {
    std::string preset;
    std::string beamline_file;
};

void add_source_options(CLI::App* cmd, SourceOpts& opts) {
    auto* preset = cmd->add_option("--preset", opts.preset,
                                   "beamline preset: mwp, rf3, rf2, hasegawa");
    auto* file = cmd->add_option("--beamline", opts.beamline_file,
                                 "path to a .nbl beamline description");
    preset->excludes(file);
    file->excludes(preset);
}

nisim::Beamline resolve_source(const SourceOpts& opts) {
    if (!opts.preset.empty()) {
        try {
            return nisim::preset_by_name(opts.preset);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    if (!opts.beamline_file.empty()) {
        return nisim::load_beamline(opts.beamline_file);
    }
    throw ConfigError("one beamline source is required: --preset or --beamline");
}

double parse_angle(const std::string& text, const char* flag, bool degrees) {
    double value = 0.0;
    try {
        value = nisim::parse_angle_expr(text, nisim::SourcePos{1, 1});
    } catch (const std::exception&) {
        throw ConfigError(std::string(flag) + ": bad angle expression '" + text + "'");
    }
    return degrees ? value * kPi / 180.0 : value;
}

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

std::vector<GridAxis> parse_grid_spec(const std::string& spec, bool degrees) {
    std::vector<GridAxis> axes;
    std::stringstream stream(spec);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size()) {
            throw ConfigError("--grid: expected name=value or name=start:stop:count, got '" +
                              item + "'");
        }
        GridAxis axis;
        axis.name = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        const std::size_t c1 = value.find(':');
        if (c1 == std::string::npos) {
            axis.values.push_back(parse_angle(value, "--grid", degrees));
        } else {
            const std::size_t c2 = value.find(':', c1 + 1);
            if (c2 == std::string::npos) {
                throw ConfigError("--grid: range for axis '" + axis.name +
                                  "' needs start:stop:count");
            }
            const double start = parse_angle(value.substr(0, c1), "--grid", degrees);
            const double stop = parse_angle(value.substr(c1 + 1, c2 - c1 - 1), "--grid", degrees);
            long count = 0;
            try {
                std::size_t used = 0;
                count = std::stol(value.substr(c2 + 1), &used);
                if (used != value.size() - c2 - 1) {
                    count = 0;
                }
            } catch (const std::exception&) {
                count = 0;
            }
            if (count <= 0) {
                throw ConfigError("--grid: axis '" + axis.name +
                                  "' needs a positive point count");
            }
            // Inclusive start, exclusive stop, evenly spaced.
            for (long k = 0; k < count; ++k) {
                axis.values.push_back(start + (stop - start) * static_cast<double>(k) /
                                                  static_cast<double>(count));
            }
        }
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) {
        throw ConfigError("--grid: empty grid specification");
    }
    return axes;
}

std::vector<nisim::PhaseSettings> build_grid(const nisim::Beamline& beamline,
                                             const std::vector<GridAxis>& axes) {
    for (const auto& axis : axes) {
        bool known = false;
        for (const auto& name : beamline.axis_names) {
            known = known || name == axis.name;
        }
        if (!known) {
            std::string names;
            for (const auto& name : beamline.axis_names) {
                names += (names.empty() ? "" : ", ") + name;
            }
            throw ConfigError("--grid: unknown axis '" + axis.name + "' (beamline axes: " +
                              names + ")");
        }
    }
    for (const auto& name : beamline.axis_names) {
        int bound = 0;
        for (const auto& axis : axes) {
            bound += axis.name == name ? 1 : 0;
        }
        if (bound != 1) {
            throw ConfigError("--grid: axis '" + name + "' must be bound exactly once");
        }
    }
    std::size_t rows = 1;
    for (const auto& axis : axes) {
        rows *= axis.values.size();
    }
    std::vector<nisim::PhaseSettings> grid;
    grid.reserve(rows);
    for (std::size_t row = 0; row < rows; ++row) {
        nisim::PhaseSettings settings;
        std::size_t remainder = row;
        // First listed axis varies slowest.
        for (std::size_t a = axes.size(); a-- > 0;) {
            const auto& axis = axes[a];
            settings.set(axis.name, axis.values[remainder % axis.values.size()]);
            remainder /= axis.values.size();
        }
        grid.push_back(std::move(settings));
    }
    return grid;
}

std::uint64_t default_seed() {
    const char* env = std::getenv("NISIM_SEED");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') {
        throw ConfigError(std::string("NISIM_SEED is not an unsigned integer: '") + env + "'");
    }
    return value;
}

void emit_table(const nisim::CountTable& table, const std::string& out_path,
                const std::string& format, bool degrees) {
    const double scale = degrees ? 180.0 / kPi : 1.0;
    std::ostringstream text;
    if (format == "json") {
        nisim::write_json(table, text, scale);
    } else {
        nisim::write_csv(table, text, scale);
    }
    if (out_path.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot write output file '" + out_path + "'");
        }
        file << text.str();
    }
}

struct CalibrationNote {
    double offset = 0.0;
    std::string axis;
};

std::string witness_record_text(const nisim::WitnessResult& result, const std::string& format,
                                const std::optional<CalibrationNote>& calibration) {
    std::ostringstream text;
    if (format == "json") {
        text << "{\n  \"kind\": \"" << to_string(result.kind) << "\",\n";
        text << "  \"value\": " << nisim::format_number(result.value) << ",\n";
        text << "  \"uncertainty\": ";
        if (result.uncertainty) {
            text << nisim::format_number(*result.uncertainty);
        } else {
            text << "null";
        }
        text << ",\n";
        text << "  \"classical_bound\": " << nisim::format_number(result.classical_bound)
             << ",\n";
        text << "  \"quantum_bound\": " << nisim::format_number(result.quantum_bound) << ",\n";
        text << "  \"classification\": \"" << to_string(result.classification) << "\"";
        if (calibration) {
            text << ",\n  \"calibration_offset\": " << nisim::format_number(calibration->offset)
                 << ",\n  \"calibration_axis\": \"" << calibration->axis << "\"";
        }
        text << "\n}\n";
    } else {
        if (calibration) {
            text << "# calibration_offset=" << nisim::format_number(calibration->offset)
                 << " axis=" << calibration->axis << "\n";
        }
        text << nisim::witness_record_header() << "\n"
             << nisim::witness_record_row(result) << "\n";
    }
    return text.str();
}

int cmd_scan(const SourceOpts& source, const std::string& grid_spec, double visibility,
             const std::string& out_path, const std::string& format, bool degrees) {
    const nisim::Beamline beamline = resolve_source(source);
    const auto grid = build_grid(beamline, parse_grid_spec(grid_spec, degrees));
    nisim::CountTable table = nisim::scan(beamline, grid);
    if (visibility != 1.0) {
        for (auto& row : table.rows) {
            row.rate = nisim::apply_visibility(row.rate, visibility);
        }
    }
    emit_table(table, out_path, format, degrees);
    return 0;
}

int cmd_sample(const SourceOpts& source, const std::string& grid_spec, double visibility,
               double n0, std::optional<std::uint64_t> seed, const std::string& sampler,
               const std::string& out_path, const std::string& format, bool degrees) {
    const nisim::Beamline beamline = resolve_source(source);
    const auto grid = build_grid(beamline, parse_grid_spec(grid_spec, degrees));
    nisim::CountTable table = nisim::scan(beamline, grid);
    for (auto& row : table.rows) {
        row.rate = nisim::apply_visibility(row.rate, visibility);
    }
    nisim::ShotConfig cfg;
    cfg.n0 = n0;
    cfg.seed = seed ? *seed : default_seed();
    cfg.sampler = sampler == "round" ? nisim::SamplerKind::deterministic_rounding
                                     : nisim::SamplerKind::poisson;
    emit_table(nisim::sample_counts(table, cfg, visibility), out_path, format, degrees);
    return 0;
}

int cmd_witness(const std::string& kind_name, const SourceOpts& source,
                const std::string& settings_spec, double visibility, double n0,
                std::optional<std::uint64_t> seed_opt, bool calibrate,
                const std::string& out_path, const std::string& format, bool degrees) {
    const nisim::Beamline beamline = resolve_source(source);
    const std::size_t n_axes = beamline.axis_names.size();
    const bool is_chsh = kind_name == "chsh";
    if (is_chsh && n_axes != 2) {
        throw ConfigError("chsh needs a beamline with two phase axes, this one has " +
                          std::to_string(n_axes));
    }
    if (!is_chsh && n_axes != 3) {
        throw ConfigError("mermin needs a beamline with three phase axes, this one has " +
                          std::to_string(n_axes));
    }
    if (!is_chsh && !settings_spec.empty()) {
        throw ConfigError("--settings applies to chsh only; the mermin contexts are fixed");
    }

    const auto rates = nisim::rate_fn(beamline);
    const nisim::CountFn scaled = [rates, visibility](const std::vector<double>& angles) {
        return nisim::apply_visibility(rates(angles), visibility);
    };

    std::optional<CalibrationNote> calibration;
    const std::size_t scan_axis = n_axes - 1;
    if (calibrate) {
        const double offset =
            nisim::calibrate_phase_offset(scaled, n_axes, scan_axis).radians;
        calibration = CalibrationNote{offset, beamline.axis_names[scan_axis]};
    } else {
        const double probe = nisim::calibrate_phase_offset(scaled, n_axes, scan_axis).radians;
        if (std::abs(probe) > 1e-6) {
            std::cerr << "warning: fringe offset " << nisim::format_number(probe)
                      << " rad detected on axis '" << beamline.axis_names[scan_axis]
                      << "'; results are uncalibrated (pass --calibrate)\n";
        }
    }

    const std::uint64_t seed = seed_opt ? *seed_opt : default_seed();
    auto with_calibration = [&](nisim::CountFn fn) {
        return calibration ? nisim::with_axis_offset(std::move(fn), scan_axis,
                                                     -calibration->offset)
                           : fn;
    };
    nisim::CountFn counts = scaled;
    std::optional<double> uncertainty;
    if (n0 > 0.0) {
        counts = nisim::sampled_count_fn(scaled, nisim::ShotConfig{n0, seed});
        const auto factory = [&](std::uint32_t rep) {
            return with_calibration(nisim::sampled_count_fn(
                scaled, nisim::ShotConfig{n0, nisim::mix_seed(seed, rep + 1)}));
        };
        constexpr int kRepetitions = 20;
        uncertainty = nisim::witness_uncertainty(factory,
                                                 is_chsh ? nisim::WitnessKind::chsh
                                                         : nisim::WitnessKind::mermin,
                                                 kRepetitions)
                          .second;
    }
    counts = with_calibration(std::move(counts));

    nisim::WitnessResult result;
    if (is_chsh) {
        auto [a1, a2, c1, c2] = nisim::optimal_chsh_angles();
        if (!settings_spec.empty()) {
            std::vector<double> parsed;
            std::stringstream stream(settings_spec);
            std::string item;
            while (std::getline(stream, item, ',')) {
                parsed.push_back(parse_angle(item, "--settings", degrees));
            }
            if (parsed.size() != 4) {
                throw ConfigError("--settings needs alpha1,alpha2,chi1,chi2");
            }
            a1 = parsed[0];
            a2 = parsed[1];
            c1 = parsed[2];
            c2 = parsed[3];
        }
        result = nisim::chsh(counts, a1, a2, c1, c2, visibility, uncertainty);
    } else {
        result = nisim::mermin(counts, visibility, uncertainty);
    }

    std::cout << (is_chsh ? "CHSH witness S = " : "Mermin witness M = ")
              << nisim::format_number(result.value);
    if (result.uncertainty) {
        std::cout << " +/- " << nisim::format_number(*result.uncertainty);
    }
    std::cout << "  [classical bound " << nisim::format_number(result.classical_bound)
              << ", quantum bound " << nisim::format_number(result.quantum_bound) << ", "
              << to_string(result.classification) << "]\n";
    if (calibration) {
        std::cout << "calibration offset " << nisim::format_number(calibration->offset)
                  << " rad on axis " << calibration->axis << "\n";
    }

    const std::string record = witness_record_text(result, format, calibration);
    if (out_path.empty()) {
        std::cout << record;
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            throw std::runtime_error("cannot write output file '" + out_path + "'");
        }
        file << record;
    }
    return 0;
}

int cmd_reproduce_table1() {
    const double v = 0.78;
    const auto [a1, a2, c1, c2] = nisim::optimal_chsh_angles();

    const auto mwp_rates = nisim::rate_fn(nisim::preset_mwp());
    const nisim::CountFn chsh_counts = [&](const std::vector<double>& angles) {
        return nisim::apply_visibility(mwp_rates(angles), v);
    };
    const double s_sim = nisim::chsh(chsh_counts, a1, a2, c1, c2, v).value;

    const auto rf3_rates = nisim::rate_fn(nisim::preset_rf3());
    const nisim::CountFn mermin_counts = [&](const std::vector<double>& angles) {
        return nisim::apply_visibility(rf3_rates(angles), v);
    };
    const double m_sim = nisim::mermin(mermin_counts, v).value;

    const double classical = 2.0 * v;
    std::printf("Contextuality witnesses at polarization product Pol x A = %.2f\n\n", v);
    std::printf("%-8s %-12s %-18s %-16s %s\n", "witness", "ideal", "visibility-scaled",
                "classical bound", "reference measurement");
    std::printf("%-8s %-12.10g %-18.10g %-16.10g %s\n", "S", 2.0 * std::sqrt(2.0), s_sim,
                classical, "2.16 +/- 0.01 (stat) +/- 0.02 (sys)");
    std::printf("%-8s %-12.10g %-18.10g %-16.10g %s\n", "M", 4.0, m_sim, classical,
                "3.052 +/- 0.007 (stat) +/- 0.017 (sys)");
    std::printf("\nbound arithmetic: 2 x 0.78 = %.10g, 2*sqrt(2) x 0.78 = %.10g (2.21 at 3"
                " significant figures), 4 x 0.78 = %.10g\n",
                2.0 * v, 2.0 * std::sqrt(2.0) * v, 4.0 * v);
    std::printf("note: the reference measurements fall below the visibility-scaled ideals;"
                " apparatus imperfections beyond the single contrast factor are not"
                " modeled here.\n");

    if (!(s_sim > classical && m_sim > classical)) {
        std::cerr << "error: simulated witnesses do not exceed the classical bound\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimode-entangled single-neutron interferometry simulator"};
    app.require_subcommand(1);

    auto* scan = app.add_subcommand("scan", "compute a count-rate table over a phase grid");
    SourceOpts scan_source;
    std::string scan_grid;
    double scan_visibility = 1.0;
    std::string scan_out;
    std::string scan_format = "csv";
    bool scan_degrees = false;
    add_source_options(scan, scan_source);
    scan->add_option("--grid", scan_grid, "grid spec, e.g. alpha=0:2pi:16,chi=0")->required();
    scan->add_option("--visibility", scan_visibility, "fringe contrast in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    scan->add_option("--out", scan_out, "output file (default: stdout)");
    scan->add_option("--format", scan_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    scan->add_flag("--degrees", scan_degrees, "angles in degrees for input and output");

    auto* sample = app.add_subcommand("sample", "Poisson-sample counts over a phase grid");
    SourceOpts sample_source;
    std::string sample_grid;
    double sample_visibility = 1.0;
    double sample_n0 = 1e6;
    std::optional<std::uint64_t> sample_seed;
    std::string sample_sampler = "poisson";
    std::string sample_out;
    std::string sample_format = "csv";
    bool sample_degrees = false;
    add_source_options(sample, sample_source);
    sample->add_option("--grid", sample_grid, "grid spec, e.g. alpha=0:2pi:16,chi=0")
        ->required();
    sample->add_option("--visibility", sample_visibility, "fringe contrast in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    sample->add_option("--shots", sample_n0, "expected counts at the fringe maximum")
        ->check(CLI::PositiveNumber);
    sample->add_option("--seed", sample_seed, "sampling seed (default: NISIM_SEED or 0)");
    sample->add_option("--sampler", sample_sampler, "poisson or round")
        ->check(CLI::IsMember({"poisson", "round"}));
    sample->add_option("--out", sample_out, "output file (default: stdout)");
    sample->add_option("--format", sample_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sample->add_flag("--degrees", sample_degrees, "angles in degrees for input and output");

    auto* witness = app.add_subcommand("witness", "reconstruct a contextuality witness");
    std::string witness_kind;
    SourceOpts witness_source;
    std::string witness_settings;
    double witness_visibility = 1.0;
    double witness_n0 = 0.0;
    std::optional<std::uint64_t> witness_seed;
    bool witness_calibrate = false;
    std::string witness_out;
    std::string witness_format = "csv";
    bool witness_degrees = false;
    witness->add_option("kind", witness_kind, "chsh or mermin")
        ->required()
        ->check(CLI::IsMember({"chsh", "mermin"}));
    add_source_options(witness, witness_source);
    witness->add_option("--settings", witness_settings,
                        "chsh angles alpha1,alpha2,chi1,chi2 (default: maximal violation)");
    witness->add_option("--visibility", witness_visibility, "fringe contrast in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    witness->add_option("--shots", witness_n0,
                        "sample counts with this fringe-maximum exposure (0 = analytic)")
        ->check(CLI::NonNegativeNumber);
    witness->add_option("--seed", witness_seed, "sampling seed (default: NISIM_SEED or 0)");
    witness->add_flag("--calibrate", witness_calibrate,
                      "fit and remove the interferogram phase offset on the last axis");
    witness->add_option("--out", witness_out, "record output file (default: stdout)");
    witness->add_option("--format", witness_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    witness->add_flag("--degrees", witness_degrees, "--settings angles are in degrees");

    auto* reproduce = app.add_subcommand(
        "reproduce-table1", "witness table at the published polarization product 0.78");

    auto* check = app.add_subcommand("check", "run the library invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (scan->parsed()) {
            return cmd_scan(scan_source, scan_grid, scan_visibility, scan_out, scan_format,
                            scan_degrees);
        }
        if (sample->parsed()) {
            return cmd_sample(sample_source, sample_grid, sample_visibility, sample_n0,
                              sample_seed, sample_sampler, sample_out, sample_format,
                              sample_degrees);
        }
        if (witness->parsed()) {
            return cmd_witness(witness_kind, witness_source, witness_settings,
                               witness_visibility, witness_n0, witness_seed,
                               witness_calibrate, witness_out, witness_format,
                               witness_degrees);
        }
        if (reproduce->parsed()) {
            return cmd_reproduce_table1();
        }
        if (check->parsed()) {
            return nisim::run_self_checks(std::cout) ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
