// Copyright 2026 The esqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end for the entanglement-swapping QKD simulator.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "esqkd/esqkd.hpp"

namespace {

using namespace esqkd;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr const char *kOutputDirEnv = "ESQKD_OUTPUT_DIR";

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

AgreedLabels parse_labels(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        parts.push_back(part);
    }
    if (parts.size() != 3) {
        throw std::invalid_argument("--labels expects three comma-separated labels, e.g. 11,10,10");
    }
    return AgreedLabels{BellLabel::parse(parts[0]), BellLabel::parse(parts[1]), BellLabel::parse(parts[2])};
}

/// Explicit path, else $ESQKD_OUTPUT_DIR/<default_name>, else stdout.
std::optional<std::filesystem::path> resolve_output(const std::string &explicit_path, const std::string &default_name) {
    if (!explicit_path.empty()) {
        return std::filesystem::path(explicit_path);
    }
    if (const char *dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
        return std::filesystem::path(dir) / default_name;
    }
    return std::nullopt;
}

/// Writes to the file, or stdout when there is none. Returns true when
/// stdout was used.
bool write_output(const std::optional<std::filesystem::path> &path, const std::string &content) {
    if (!path) {
        std::cout << content;
        std::cout.flush();
        return true;
    }
    std::ofstream out(*path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path->string() + " for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw IoError("failed writing " + path->string());
    }
    return false;
}

struct RunOptions {
    uint64_t rounds = 0;
    uint64_t seed = 0;
    bool eve = false;
    double test_fraction = 0.0;
    std::string labels = "11,10,10";
    std::string ancilla = "00";
    std::string output;
};

int cmd_run(const RunOptions &opt) {
    SessionConfig cfg;
    cfg.rounds = opt.rounds;
    cfg.seed = opt.seed;
    cfg.eve_enabled = opt.eve;
    cfg.test_fraction = opt.test_fraction;
    cfg.labels = parse_labels(opt.labels);
    cfg.ancilla_label = BellLabel::parse(opt.ancilla);
    cfg.validate();

    Transcript t = run_transcript(cfg);
    auto path = resolve_output(opt.output, "transcript-" + std::to_string(cfg.seed) + ".jsonl");
    bool to_stdout = write_output(path, emit_transcript(t));

    std::ostream &out = to_stdout ? std::cerr : std::cout;
    out << "rounds:            " << cfg.rounds << (cfg.eve_enabled ? " (eavesdropper active)" : "") << "\n";
    out << "key bits:          " << t.rate.key_bits << "\n";
    out << "transmitted qubits:" << " " << t.rate.transmitted_qubits << "\n";
    out << "rate:              " << (t.rate.rate ? format_real(*t.rate.rate) : std::string("n/a")) << " bit/qubit\n";
    out << "pairs tested:      " << t.test.pairs_tested << " (" << t.test.bits_tested << " bits)"
        << (t.test.degenerate ? " [degenerate: no rounds tested]" : "") << "\n";
    out << "mismatches:        " << t.test.mismatches << "\n";
    out << "eve detected:      " << (t.test.eve_detected ? "yes" : "no") << "\n";
    if (!t.test.degenerate) {
        out << "P(detect | attack):" << " " << format_real(scheme_detection_probability(
                                                  static_cast<unsigned>(std::min<uint64_t>(t.test.bits_tested, 1u << 20))))
            << "\n";
    }
    out << "remaining key:     " << 2 * t.test.remaining_key.size() << " bits\n";
    if (path) {
        out << "transcript:        " << path->string() << "\n";
    }
    return kExitOk;
}

int cmd_verify_oracle(bool inject_fault) {
    auto start = std::chrono::steady_clock::now();
    VerificationReport rep;
    if (inject_fault) {
        rep = verify_swap_rule([](BellLabel l, BellLabel r, BellLabel o) {
            BellLabel v = swap_rule(l, r, o);
            return (l == BellLabel(true, false) && r == BellLabel(false, true)) ? v ^ BellLabel(false, true) : v;
        });
    } else {
        rep = verify_swap_rule();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto &f : rep.failures) {
        std::cout << "MISMATCH " << f << "\n";
    }
    std::cout << "table rows reproduced: " << rep.table_rows_matched << "/4\n";
    std::cout << rep.passed << "/" << rep.cases << " cases verified (" << format_real(secs) << " s)\n";
    return rep.ok() ? kExitOk : kExitVerification;
}

std::string curve_json(const std::vector<DetectionPoint> &curve) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &pt : curve) {
        nlohmann::ordered_json j;
        j["N"] = pt.bits;
        j["scheme_prob"] = pt.scheme;
        j["bb84_prob"] = pt.bb84;
        j["empirical"] = pt.empirical ? nlohmann::ordered_json(*pt.empirical) : nlohmann::ordered_json(nullptr);
        j["stderr"] = pt.stderr_estimate ? nlohmann::ordered_json(*pt.stderr_estimate) : nlohmann::ordered_json(nullptr);
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

struct CurveOptions {
    unsigned max_pairs = 0;
    uint64_t sessions = 0;
    uint64_t seed = 0;
    std::string format = "csv";
    std::string output;
};

int cmd_curves(const CurveOptions &opt) {
    auto curve = detection_curve(opt.max_pairs);
    if (opt.sessions > 0) {
        add_empirical(curve, opt.sessions, opt.seed);
    }
    auto path = resolve_output(opt.output, "curves." + opt.format);
    write_output(path, opt.format == "json" ? curve_json(curve) : curve_csv(curve));
    return kExitOk;
}

int cmd_montecarlo(const CurveOptions &opt) {
    auto start = std::chrono::steady_clock::now();
    auto curve = detection_curve(opt.max_pairs);
    bool all_within = true;
    std::ostringstream notes;
    for (auto &pt : curve) {
        auto est = estimate_detection(pt.bits / 2, opt.sessions, RandomStream::derive_seed(opt.seed, pt.bits));
        pt.empirical = est.frequency();
        pt.stderr_estimate = est.stderr_estimate();
        bool ok = est.within_sigmas(3.0);
        all_within = all_within && ok;
        notes << "n=" << est.pairs << " pairs: " << est.detections << "/" << est.sessions << " detected, freq "
              << format_real(est.frequency()) << " vs " << format_real(est.expected()) << " (3 sigma = "
              << format_real(3 * binomial_sigma(est.expected(), est.sessions)) << ") " << (ok ? "ok" : "OUTSIDE")
              << "\n";
    }
    auto path = resolve_output(opt.output, "montecarlo." + opt.format);
    bool to_stdout = write_output(path, opt.format == "json" ? curve_json(curve) : curve_csv(curve));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    (to_stdout ? std::cerr : std::cout) << notes.str() << "elapsed " << format_real(secs) << " s\n";
    return all_within ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Entanglement-swapping QKD simulator"};
    app.require_subcommand(1);

    RunOptions run;
    auto *run_cmd = app.add_subcommand("run", "Run a seeded session and write its transcript");
    run_cmd->add_option("--rounds", run.rounds, "Number of protocol rounds")->required();
    run_cmd->add_option("--seed", run.seed, "Session seed")->required();
    run_cmd->add_flag("--eve", run.eve, "Enable the entanglement-swapping eavesdropper");
    run_cmd->add_option("--test-fraction", run.test_fraction, "Fraction of rounds compared publicly")
        ->check(CLI::Range(0.0, 1.0));
    run_cmd->add_option("--labels", run.labels, "Agreed labels for links/anchor, e.g. 11,10,10");
    run_cmd->add_option("--ancilla", run.ancilla, "Eve's ancilla pair label");
    run_cmd->add_option("-o,--output", run.output, "Transcript path (default: $ESQKD_OUTPUT_DIR or stdout)");

    bool inject_fault = false;
    auto *verify_cmd = app.add_subcommand("verify-oracle", "Check the swap rule against the table and the dense oracle");
    verify_cmd->add_flag("--inject-fault", inject_fault, "Corrupt one swap-rule entry (self-test)")->group("");

    CurveOptions curves;
    auto *curves_cmd = app.add_subcommand("curves", "Emit detection-probability curves");
    curves_cmd->add_option("--max-pairs", curves.max_pairs, "Largest number of tested pairs")
        ->required()
        ->check(CLI::PositiveNumber);
    curves_cmd->add_option("--empirical", curves.sessions, "Monte Carlo sessions per point (0: closed form only)");
    curves_cmd->add_option("--seed", curves.seed, "Seed for the empirical columns");
    curves_cmd->add_option("--format", curves.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    curves_cmd->add_option("-o,--output", curves.output, "Output path");

    CurveOptions mc;
    mc.max_pairs = 4;
    mc.sessions = 10000;
    auto *mc_cmd = app.add_subcommand("montecarlo", "Estimate detection frequencies against the closed form");
    mc_cmd->add_option("--max-pairs", mc.max_pairs, "Largest number of tested pairs")->check(CLI::PositiveNumber);
    mc_cmd->add_option("--sessions", mc.sessions, "Eavesdropped sessions per point")->check(CLI::PositiveNumber);
    mc_cmd->add_option("--seed", mc.seed, "Master seed")->required();
    mc_cmd->add_option("--format", mc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    mc_cmd->add_option("-o,--output", mc.output, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) {
            return cmd_run(run);
        }
        if (*verify_cmd) {
            return cmd_verify_oracle(inject_fault);
        }
        if (*curves_cmd) {
            return cmd_curves(curves);
        }
        if (*mc_cmd) {
            return cmd_montecarlo(mc);
        }
    } catch (const IoError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
