#pragma once

// Command-line front end: `run`, `matrix`, `report`, `validate`.
// Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.

#include "s2s/config_file.hpp"
#include "s2s/io.hpp"
#include "s2s/metrics.hpp"
#include "s2s/scenario.hpp"
#include "s2s/validation.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

namespace s2s::cli {

inline constexpr std::uint64_t kDefaultSeed = 20220307;
inline constexpr const char* kSeedEnv = "S2S_SIM_SEED";

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// --seed wins, then S2S_SIM_SEED, then kDefaultSeed.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv(kSeedEnv); env && *env) {
        std::uint64_t v = 0;
        const std::string_view text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw UsageError(std::string(kSeedEnv) + " is not an unsigned 64-bit decimal: " + env);
        }
        return v;
    }
    return kDefaultSeed;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string opt_num(const std::optional<SimTime>& t) { return t ? fmt::format("{}", t->seconds()) : ""; }
inline std::string opt_num(const std::optional<Duration>& d) { return d ? fmt::format("{}", d->seconds()) : ""; }

inline void write_trace_row(std::ostream& out, int replication, const ImageRequest& r) {
    out << replication << ',' << r.id << ',' << fmt::format("{}", r.t_created.seconds()) << ','
        << opt_num(r.t_sat_enqueued) << ',' << opt_num(r.t_sat_granted) << ',' << opt_num(r.t_picture_done) << ','
        << opt_num(r.t_downlink_enqueued) << ',' << opt_num(r.t_downlink_granted) << ',' << opt_num(r.t_delivered)
        << ',' << opt_num(r.sat_wait()) << ',' << opt_num(r.downlink_wait()) << ',' << opt_num(r.end_to_end()) << '\n';
}

inline constexpr std::string_view kTraceHeader =
    "replication,request_id,t_created,t_sat_enqueued,t_sat_granted,t_picture_done,t_downlink_enqueued,"
    "t_downlink_granted,t_delivered,sat_wait_s,downlink_wait_s,end_to_end_s";

struct CommonOptions {
    std::string config_path;
    double horizon_hours = 24.0;
    int replications = 30;
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
    bool reproducible = false;
    OutputFormat format = OutputFormat::csv;
};

inline ConstellationConfig base_config(const CommonOptions& o) {
    ConstellationConfig c = o.config_path.empty() ? ConstellationConfig{} : load_config(o.config_path);
    return o.deterministic ? c.zero_variance() : c;
}

inline Manifest make_manifest(const CommonOptions& o, const ConstellationConfig& base, std::uint64_t seed,
                              std::size_t scenarios) {
    Manifest m;
    m.master_seed = seed;
    m.horizon_hours = o.horizon_hours;
    m.replications = o.replications;
    m.deterministic = o.deterministic;
    m.scenarios = scenarios;
    m.config = base;
    if (!o.reproducible) m.timestamp = utc_timestamp();
    return m;
}

struct RunOptions : CommonOptions {
    ProcessingMode mode = ProcessingMode::ground_station;
    ResourceConstraint resources = ResourceConstraint::all;
    Modulation modulation = Modulation::none;
    bool single_request = false;
    std::string out_path;
    std::string trace_path;
};

inline int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
    if (o.mode != ProcessingMode::ground_station && o.resources == ResourceConstraint::one_ground_station) {
        err << "warning: onboard modes never use ground stations; the one-gs constraint has no effect\n";
    }
    const std::uint64_t seed = resolve_seed(o.seed);
    ConstellationConfig base = base_config(o);
    if (o.single_request) {
        base.batch_mean = 1.0;
        base.batch_std = 0.0;
    }
    const Scenario scenario = make_scenario(o.mode, o.resources, o.modulation);
    const ReplicationPlan plan{o.replications, seed, SimTime::from_hours(o.horizon_hours)};

    std::ostringstream trace;
    ReplicationInspector inspector;
    if (!o.trace_path.empty()) {
        trace << kTraceHeader << '\n';
        inspector = [&](const Scenario&, int r, std::uint64_t, const ReplicationOutcome& outcome) {
            for (const auto& req : outcome.requests) write_trace_row(trace, r, req);
        };
    }

    const auto rows = run_scenario(scenario, plan, base, inspector);
    ComparisonRow agg = aggregate(rows);
    const Manifest manifest = make_manifest(o, base, seed, 1);

    std::ostringstream body;
    if (o.format == OutputFormat::csv) {
        write_replications_csv(body, scenario, rows, aggregate_row(agg));
    } else {
        write_replications_json(body, scenario, rows, manifest, aggregate_row(agg));
    }
    if (o.out_path.empty()) {
        out << body.str();
    } else {
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + o.out_path);
        f << body.str();
    }
    if (!o.trace_path.empty()) {
        std::ofstream f(o.trace_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + o.trace_path);
        f << trace.str();
    }
    return kOk;
}

struct MatrixOptions : CommonOptions {
    std::string out_dir;
    int parallel = 1;
};

inline int cmd_matrix(const MatrixOptions& o, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    const std::uint64_t seed = resolve_seed(o.seed);
    const ConstellationConfig base = base_config(o);
    const auto scenarios = build_matrix();
    const ReplicationPlan plan{o.replications, seed, SimTime::from_hours(o.horizon_hours)};

    const auto runs = run_matrix(scenarios, plan, base, o.parallel);

    fs::create_directories(o.out_dir);
    const std::string ext = o.format == OutputFormat::csv ? ".csv" : ".json";
    Manifest manifest = make_manifest(o, base, seed, scenarios.size());
    for (const auto& run : runs) {
        if (!run.ok()) {
            manifest.failed.emplace_back(run.scenario.id, run.error);
            err << "error: " << run.error << '\n';
            continue;
        }
        std::ofstream f(fs::path(o.out_dir) / (run.scenario.id + ext), std::ios::binary);
        if (o.format == OutputFormat::csv) {
            write_replications_csv(f, run.scenario, run.replications);
        } else {
            write_replications_json(f, run.scenario, run.replications, manifest);
        }
    }

    std::vector<ComparisonRow> rows;
    try {
        rows = comparison_table(runs);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    if (!rows.empty()) {
        std::ofstream f(fs::path(o.out_dir) / ("comparison" + ext), std::ios::binary);
        if (o.format == OutputFormat::csv) {
            write_comparison_csv(f, rows);
        } else {
            f << comparison_json(rows).dump(2) << '\n';
        }
    }
    {
        std::ofstream f(fs::path(o.out_dir) / "manifest.json", std::ios::binary);
        f << manifest_json(manifest).dump(2) << '\n';
    }
    out << "wrote " << (runs.size() - manifest.failed.size()) << " scenario files, comparison" << ext
        << " and manifest.json to " << o.out_dir << '\n';
    return manifest.failed.empty() && !rows.empty() ? kOk : kFailure;
}

inline std::vector<ComparisonRow> read_comparison_json(std::istream& in) {
    const auto doc = nlohmann::json::parse(in);
    if (!doc.is_array() || doc.empty()) throw std::runtime_error("comparison table has no rows");
    std::vector<ComparisonRow> rows;
    for (const auto& j : doc) {
        ComparisonRow r;
        r.scenario_id = j.at("scenario_id").get<std::string>();
        if (!j.at("total_wait_min").is_number()) throw std::runtime_error("missing total_wait_min for " + r.scenario_id);
        r.total_wait_min = j.at("total_wait_min").get<double>();
        auto num = [&](const char* k, double fallback) {
            return j.contains(k) && j[k].is_number() ? j[k].get<double>() : fallback;
        };
        r.mode = j.value("mode", "");
        r.resources = j.value("resources", "");
        r.modulation = j.value("modulation", "");
        r.ci_low_min = num("ci_low_min", r.total_wait_min);
        r.ci_high_min = num("ci_high_min", r.total_wait_min);
        r.gs_processing_share = num("gs_processing_share", 0.0);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct ReportOptions {
    std::string in_path;
    std::string base_id = kBaseScenarioId;
};

inline int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    fs::path path = o.in_path;
    if (fs::is_directory(path)) {
        path = fs::exists(path / "comparison.csv") ? path / "comparison.csv" : path / "comparison.json";
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "error: cannot read " << path.string() << '\n';
        return kFailure;
    }
    try {
        const auto rows = path.extension() == ".json" ? read_comparison_json(in) : read_comparison_csv(in);
        out << render_report(rows, o.base_id);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

struct ValidateOptions {
    std::size_t samples = 100000;
    std::optional<std::uint64_t> seed;
};

inline int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err,
                        const Samplers& samplers = {}) {
    const auto results = validate_distributions(o.samples, resolve_seed(o.seed), samplers);
    bool ok = true;
    for (const auto& r : results) {
        out << fmt::format("{:<4} {:<26} {:<16} {:>12.6g}  in [{:.6g}, {:.6g}]\n", r.passed() ? "ok" : "FAIL",
                           r.distribution, r.statistic, r.value, r.low, r.high);
        if (!r.passed()) {
            ok = false;
            err << "failed: " << r.distribution << ' ' << r.statistic << " = " << r.value << '\n';
        }
    }
    return ok ? kOk : kFailure;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Sensor-to-shooter imaging timeline simulator", "s2s_sim"};
    app.require_subcommand(1);

    const std::map<std::string, ProcessingMode> modes{{"ground", ProcessingMode::ground_station},
                                                      {"onboard", ProcessingMode::onboard},
                                                      {"onboard-sr", ProcessingMode::onboard_sr}};
    const std::map<std::string, ResourceConstraint> constraints{{"all", ResourceConstraint::all},
                                                                {"one-sat", ResourceConstraint::one_satellite},
                                                                {"one-gs", ResourceConstraint::one_ground_station}};
    const std::map<std::string, Modulation> modulations{{"none", Modulation::none},
                                                        {"half-images", Modulation::half_images},
                                                        {"double-processing", Modulation::double_processing},
                                                        {"double-satellites", Modulation::double_satellites}};
    const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv}, {"json", OutputFormat::json}};

    auto add_common = [&](CLI::App* sub, CommonOptions& o) {
        sub->add_option("--config", o.config_path, "key = value scenario configuration")->check(CLI::ExistingFile);
        sub->add_option("--horizon-hours", o.horizon_hours, "simulated hours per replication")
            ->check(CLI::PositiveNumber);
        sub->add_option("--replications", o.replications, "independent replications")->check(CLI::Range(1, 1000000));
        sub->add_option("--seed", o.seed, std::string("master seed (default: $") + kSeedEnv + ", else " +
                                              std::to_string(kDefaultSeed) + ")");
        sub->add_flag("--deterministic", o.deterministic, "every stage at its mean, fixed batch size");
        sub->add_flag("--reproducible", o.reproducible, "omit the manifest timestamp");
        sub->add_option("--format", o.format, "csv or json")->transform(CLI::CheckedTransformer(formats));
    };

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    add_common(run_cmd, run);
    std::string mode_name = "ground", resources_name = "all", modulation_name = "none";
    auto keys = [](const auto& m) {
        std::vector<std::string> out;
        for (const auto& [k, v] : m) out.push_back(k);
        return out;
    };
    run_cmd->add_option("--mode", mode_name, "ground | onboard | onboard-sr")->check(CLI::IsMember(keys(modes)));
    run_cmd->add_option("--resources", resources_name, "all | one-sat | one-gs")
        ->check(CLI::IsMember(keys(constraints)));
    run_cmd->add_option("--modulation", modulation_name, "none | half-images | double-processing | double-satellites")
        ->check(CLI::IsMember(keys(modulations)));
    run_cmd->add_flag("--single-request", run.single_request, "debug: one request per batch");
    run_cmd->add_option("--out", run.out_path, "output file (default: stdout)");
    run_cmd->add_option("--trace", run.trace_path, "write per-request timestamps as CSV");

    MatrixOptions matrix;
    auto* matrix_cmd = app.add_subcommand("matrix", "run all 36 scenarios");
    add_common(matrix_cmd, matrix);
    matrix_cmd->add_option("--out-dir", matrix.out_dir, "results directory")->required();
    matrix_cmd->add_option("--parallel", matrix.parallel, "scenarios run concurrently")->check(CLI::Range(1, 1024));

    ReportOptions report;
    auto* report_cmd = app.add_subcommand("report", "render a comparison table");
    report_cmd->add_option("--in", report.in_path, "matrix output directory or comparison file")->required();
    report_cmd->add_option("--base", report.base_id, "base scenario id");

    ValidateOptions validate;
    auto* validate_cmd = app.add_subcommand("validate", "statistical self-test of the variate generators");
    validate_cmd->add_option("--samples", validate.samples, "draws per distribution")->check(CLI::Range(2, 100000000));
    validate_cmd->add_option("--seed", validate.seed, "master seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    run.mode = modes.at(mode_name);
    run.resources = constraints.at(resources_name);
    run.modulation = modulations.at(modulation_name);

    try {
        if (*run_cmd) return cmd_run(run, out, err);
        if (*matrix_cmd) return cmd_matrix(matrix, out, err);
        if (*report_cmd) return cmd_report(report, out, err);
        if (*validate_cmd) return cmd_validate(validate, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

} // namespace s2s::cli
