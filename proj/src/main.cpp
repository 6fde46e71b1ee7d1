// Command-line front end: sweep generation, config validation, and
// special-function corpus replay. Exit codes: 0 success, 2 config error,
// 3 numerical failure.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uwoc/channel.hpp"
#include "uwoc/cli.hpp"
#include "uwoc/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return out.good();
}

// Applies --seed/--threads on top of the config text so the normalized
// document (and its hash) reflect what actually ran.
int apply_overrides(std::string& text, const std::uint64_t* seed,
                    const int* threads) {
    if (!seed && !threads) return 0;
    nlohmann::json j = nlohmann::json::object();
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    if (!blank) {
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << "config: not valid JSON (" << e.what() << ")\n";
            return kExitConfig;
        }
        if (!j.is_object()) {
            std::cerr << "config: top level must be an object\n";
            return kExitConfig;
        }
    }
    if (seed) j["seed"] = *seed;
    if (threads) j["threads"] = *threads;
    text = j.dump(2);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::uint64_t* seed,
              const int* threads, std::string out_base) {
    std::string text;
    if (!read_file(config_path, text)) {
        std::cerr << "config: cannot open '" << config_path << "'\n";
        return kExitConfig;
    }
    if (const int rc = apply_overrides(text, seed, threads)) return rc;

    std::vector<std::string> errors;
    const auto spec = uwoc::parse_sweep(text, errors);
    if (!spec) {
        for (const auto& e : errors) std::cerr << e << "\n";
        return kExitConfig;
    }

    uwoc::SweepResult result;
    try {
        result = uwoc::run_sweep(*spec);
    } catch (const std::exception& e) {
        std::cerr << "sweep failed: " << e.what() << "\n";
        return kExitNumerical;
    }

    if (out_base.empty()) out_base = uwoc::figure_name(spec->figure);
    if (out_base.size() > 4 &&
        out_base.substr(out_base.size() - 4) == ".csv") {
        out_base.resize(out_base.size() - 4);
    }
    const std::string csv_path = out_base + ".csv";
    const std::string manifest_path = out_base + ".manifest.json";
    if (!write_file(csv_path, result.csv) ||
        !write_file(manifest_path, result.manifest)) {
        std::cerr << "cannot write output under '" << out_base << "'\n";
        return kExitNumerical;
    }

    for (const auto& e : result.errors) std::cerr << "point failed: " << e
                                                  << "\n";
    std::cout << csv_path << ": " << result.rows.size() << " rows, "
              << result.columns.size() << " columns";
    if (!result.errors.empty()) {
        std::cout << " (" << result.errors.size() << " points failed)";
    }
    std::cout << "\n" << manifest_path << " written\n";
    return 0;
}

int cmd_validate(const std::string& config_path, bool print_normalized) {
    std::string text;
    if (!read_file(config_path, text)) {
        std::cerr << "config: cannot open '" << config_path << "'\n";
        return kExitConfig;
    }
    std::vector<std::string> errors;
    const auto spec = uwoc::parse_sweep(text, errors);
    if (!spec) {
        for (const auto& e : errors) std::cerr << e << "\n";
        return kExitConfig;
    }
    std::cout << "valid: figure " << uwoc::figure_name(spec->figure) << ", "
              << spec->axis.points << " axis points\n";
    if (print_normalized) std::cout << spec->normalized_json;
    return 0;
}

int cmd_oracle(const std::string& corpus_path) {
    uwoc::OracleReport report;
    try {
        report = uwoc::run_oracle(corpus_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    for (const auto& f : report.failures) std::cerr << "FAIL " << f << "\n";
    std::cout << "oracle: " << (report.total - report.failed) << "/"
              << report.total << " passed\n";
    return report.failed == 0 ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Underwater optical link performance sweeps "
        "(closed-form, Monte Carlo, and backhaul models)"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_base;
    std::uint64_t seed = 0;
    int threads = 0;

    auto* sweep = app.add_subcommand("sweep", "Run a sweep config to CSV");
    sweep->add_option("config", config_path, "JSON sweep config")
        ->required();
    sweep->add_option("--seed", seed, "Override the config seed");
    sweep->add_option("--threads", threads, "Override the worker count");
    sweep->add_option("--out", out_base,
                      "Output base path (default: the figure name)");

    bool print_normalized = false;
    auto* validate =
        app.add_subcommand("validate", "Check a sweep config file");
    validate->add_option("config", config_path, "JSON sweep config")
        ->required();
    validate->add_flag("--print", print_normalized,
                       "Print the normalized config document");

    std::string corpus_path;
    auto* oracle = app.add_subcommand(
        "oracle", "Replay the special-function corpus and report mismatches");
    oracle->add_option("corpus", corpus_path,
                       "Corpus file (default: packaged copy)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (sweep->parsed()) {
        return cmd_sweep(config_path,
                         sweep->count("--seed") ? &seed : nullptr,
                         sweep->count("--threads") ? &threads : nullptr,
                         out_base);
    }
    if (validate->parsed()) {
        return cmd_validate(config_path, print_normalized);
    }
    if (corpus_path.empty()) {
        corpus_path = uwoc::default_data_dir() + "/meijer_corpus.txt";
    }
    return cmd_oracle(corpus_path);
}
