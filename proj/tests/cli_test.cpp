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

// Drives the built command-line tool.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "esqkd/transcript.hpp"

#ifndef ESQKD_CLI_PATH
#error "ESQKD_CLI_PATH must point at the built esqkd binary"
#endif

using namespace esqkd;

namespace {

struct Result {
    int status;
    std::string out;
};

Result run_cli(const std::string &args) {
    std::string cmd = std::string(ESQKD_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE *pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return {-1, ""};
    }
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
        out.append(buf, n);
    }
    int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("esqkd_cli_test_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
    }
    void TearDown() override {
        std::filesystem::remove_all(dir_);
    }
    std::filesystem::path dir_;
};

}  // namespace

TEST_F(Cli, verify_oracle_passes) {
    auto start = std::chrono::steady_clock::now();
    auto r = run_cli("verify-oracle");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ASSERT_EQ(r.status, 0) << r.out;
    ASSERT_NE(r.out.find("64/64 cases verified"), std::string::npos) << r.out;
    ASSERT_NE(r.out.find("table rows reproduced: 4/4"), std::string::npos) << r.out;
    ASSERT_LT(secs, 5.0);
}

TEST_F(Cli, verify_oracle_catches_a_fault) {
    auto r = run_cli("verify-oracle --inject-fault");
    ASSERT_EQ(r.status, 1);
    ASSERT_NE(r.out.find("MISMATCH 10,01"), std::string::npos) << r.out;
}

TEST_F(Cli, run_hundred_rounds) {
    auto path = dir_ / "t.jsonl";
    auto r = run_cli("run --rounds 100 --seed 7 -o " + path.string());
    ASSERT_EQ(r.status, 0);
    Transcript t = parse_transcript(slurp(path));
    ASSERT_EQ(t.rounds.size(), 100u);
    ASSERT_EQ(t.rate.key_bits, 200u);
    ASSERT_EQ(t.rate.rate, 1.0);
    ASSERT_EQ(t.test.mismatches, 0u);
    ASSERT_EQ(2 * t.test.remaining_key.size(), 200u);
}

TEST_F(Cli, run_is_reproducible) {
    auto a = dir_ / "a.jsonl";
    auto b = dir_ / "b.jsonl";
    ASSERT_EQ(run_cli("run --rounds 300 --seed 42 --eve --test-fraction 0.2 -o " + a.string()).status, 0);
    ASSERT_EQ(run_cli("run --rounds 300 --seed 42 --eve --test-fraction 0.2 -o " + b.string()).status, 0);
    ASSERT_EQ(slurp(a), slurp(b));
    ASSERT_FALSE(slurp(a).empty());
}

TEST_F(Cli, run_zero_rounds_to_stdout) {
    auto r = run_cli("run --rounds 0 --seed 7");
    ASSERT_EQ(r.status, 0);
    Transcript t = parse_transcript(r.out);
    ASSERT_TRUE(t.rounds.empty());
    ASSERT_TRUE(t.test.degenerate);
    ASSERT_FALSE(t.rate.rate.has_value());
}

TEST_F(Cli, run_with_eve_is_detected) {
    auto path = dir_ / "eve.jsonl";
    auto r = run_cli("run --rounds 10000 --eve --seed 7 --test-fraction 0.1 -o " + path.string());
    ASSERT_EQ(r.status, 0);
    ASSERT_NE(r.out.find("eve detected:      yes"), std::string::npos) << r.out;
    Transcript t = parse_transcript(slurp(path));
    ASSERT_EQ(t.test.pairs_tested, 1000u);
    ASSERT_TRUE(t.test.eve_detected);
    // Per tested pair a mismatch shows with probability 3/4.
    double f = double(t.test.mismatches) / double(t.test.pairs_tested);
    ASSERT_NEAR(f, 0.75, 3 * std::sqrt(0.75 * 0.25 / 1000));
}

TEST_F(Cli, output_dir_from_environment) {
    std::string cmd = "ESQKD_OUTPUT_DIR=" + dir_.string() + " " + std::string(ESQKD_CLI_PATH) +
                      " run --rounds 3 --seed 5 >/dev/null 2>&1";
    int raw = std::system(cmd.c_str());
    ASSERT_EQ(WEXITSTATUS(raw), 0);
    ASSERT_TRUE(std::filesystem::exists(dir_ / "transcript-5.jsonl"));
}

TEST_F(Cli, curves) {
    auto r = run_cli("curves --max-pairs 1");
    ASSERT_EQ(r.status, 0);
    ASSERT_EQ(r.out, "N,scheme_prob,bb84_prob,empirical,stderr\n2,0.75,0.4375,,\n");
    auto j = run_cli("curves --max-pairs 2 --format json --empirical 200 --seed 3");
    ASSERT_EQ(j.status, 0);
    auto parsed = nlohmann::json::parse(j.out);
    ASSERT_EQ(parsed.size(), 2u);
    ASSERT_TRUE(parsed[1]["empirical"].is_number());
    ASSERT_EQ(run_cli("curves --max-pairs 0").status, 2);
}

TEST_F(Cli, montecarlo) {
    auto r = run_cli("montecarlo --sessions 4000 --max-pairs 3 --seed 11");
    ASSERT_EQ(r.status, 0) << r.out;
    ASSERT_EQ(r.out.substr(0, 40), "N,scheme_prob,bb84_prob,empirical,stderr");
}

TEST_F(Cli, usage_errors) {
    ASSERT_EQ(run_cli("").status, 2);
    ASSERT_EQ(run_cli("frobnicate").status, 2);
    ASSERT_EQ(run_cli("run --rounds 10").status, 2);
    ASSERT_EQ(run_cli("run --rounds 10 --seed 1 --labels 11,10").status, 2);
    ASSERT_EQ(run_cli("run --rounds 10 --seed 1 --labels 11,10,2").status, 2);
    ASSERT_EQ(run_cli("run --rounds 10 --seed 1 --test-fraction 2").status, 2);
    ASSERT_EQ(run_cli("run --rounds 10 --seed 1 --bogus").status, 2);
}

TEST_F(Cli, io_error) {
    auto r = run_cli("run --rounds 1 --seed 1 -o " + (dir_ / "missing" / "x.jsonl").string());
    ASSERT_EQ(r.status, 3);
}
