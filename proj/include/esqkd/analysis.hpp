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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "esqkd/protocol.hpp"
#include "esqkd/random.hpp"

namespace esqkd {

/// Outcome of publicly comparing a random subset of rounds.
struct TestReport {
    uint64_t pairs_tested = 0;
    uint64_t bits_tested = 0;
    uint64_t mismatches = 0;
    bool eve_detected = false;
    /// No round was selected, so the test says nothing.
    bool degenerate = true;
    std::vector<uint64_t> tested_rounds;
    std::vector<BellLabel> remaining_key;
    std::vector<BellLabel> bob_remaining_key;

    bool operator==(const TestReport &) const = default;
};

/// Picks `count` distinct round indices out of `rounds` with the public
/// coin (partial Fisher-Yates), returned sorted.
inline std::vector<uint64_t> select_test_rounds(uint64_t rounds, uint64_t count, RandomStream &coin) {
    if (count > rounds) {
        throw std::invalid_argument("cannot test more rounds than were run");
    }
    std::vector<uint64_t> idx(rounds);
    for (uint64_t i = 0; i < rounds; i++) {
        idx[i] = i;
    }
    for (uint64_t i = 0; i < count; i++) {
        uint64_t j = i + coin.next_below(rounds - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

/// Alice and Bob compare, for each selected round, Alice's secret with the
/// value Bob inferred for it (two bits per round), then drop those rounds
/// from both keys.
inline TestReport eavesdropping_test(std::span<const RoundRecord> rounds, double test_fraction, RandomStream coin) {
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
        throw std::invalid_argument("test fraction must lie in [0, 1]");
    }
    uint64_t count = static_cast<uint64_t>(std::llround(test_fraction * static_cast<double>(rounds.size())));
    TestReport rep;
    rep.tested_rounds = select_test_rounds(rounds.size(), count, coin);
    rep.pairs_tested = count;
    rep.bits_tested = 2 * count;
    rep.degenerate = count == 0;

    size_t next = 0;
    for (size_t i = 0; i < rounds.size(); i++) {
        const RoundRecord &r = rounds[i];
        if (next < rep.tested_rounds.size() && rep.tested_rounds[next] == i) {
            next++;
            if (r.alice_secret != r.bob_inferred_alice) {
                rep.mismatches++;
            }
            continue;
        }
        rep.remaining_key.push_back(r.alice_secret);
        rep.bob_remaining_key.push_back(r.bob_inferred_alice);
    }
    rep.eve_detected = rep.mismatches > 0;
    return rep;
}

/// Probability that comparing N bits (N/2 rounds) exposes the
/// entanglement-swapping attack: 1 - (1/2)^N.
inline double scheme_detection_probability(unsigned bits) {
    if (bits % 2 != 0) {
        throw std::invalid_argument("bits are compared in pairs; N must be even");
    }
    return 1.0 - std::ldexp(1.0, -static_cast<int>(bits));
}

/// BB84 intercept-resend detection probability for N compared bits:
/// 1 - (3/4)^N.
inline double bb84_detection_probability(unsigned bits) {
    return 1.0 - std::pow(0.75, static_cast<double>(bits));
}

struct RateReport {
    uint64_t key_bits = 0;
    uint64_t transmitted_qubits = 0;
    /// Absent when nothing was transmitted.
    std::optional<double> rate;

    static constexpr double kBb84Rate = 0.5;
    static constexpr double kB92Rate = 0.5;
    static constexpr double kE91Rate = 0.25;

    bool operator==(const RateReport &) const = default;
};

/// Key bits per transmitted qubit before any test rounds are discarded.
inline RateReport rate_report(std::span<const RoundRecord> rounds) {
    RateReport rep;
    rep.key_bits = 2 * rounds.size();
    rep.transmitted_qubits = RoundRecord::transmissions * rounds.size();
    if (rep.transmitted_qubits > 0) {
        rep.rate = static_cast<double>(rep.key_bits) / static_cast<double>(rep.transmitted_qubits);
    }
    return rep;
}

inline double binomial_sigma(double p, uint64_t trials) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

struct DetectionEstimate {
    unsigned pairs = 0;
    uint64_t sessions = 0;
    uint64_t detections = 0;

    double frequency() const {
        return sessions == 0 ? 0.0 : static_cast<double>(detections) / static_cast<double>(sessions);
    }
    double expected() const {
        return scheme_detection_probability(2 * pairs);
    }
    /// Standard error of the frequency.
    double stderr_estimate() const {
        double f = frequency();
        return sessions == 0 ? 0.0 : std::sqrt(f * (1.0 - f) / static_cast<double>(sessions));
    }
    /// |frequency - expected| <= k sigma, sigma taken at the expected value.
    bool within_sigmas(double k) const {
        return std::abs(frequency() - expected()) <= k * binomial_sigma(expected(), sessions);
    }
};

/// Seed of Monte Carlo session `i` under `seed`.
inline uint64_t montecarlo_session_seed(uint64_t seed, uint64_t i) {
    return RandomStream::derive_seed(seed, i);
}

/// Runs `sessions` Eve-enabled sessions of 2*pairs rounds each and tests
/// half the rounds, counting sessions in which Eve is caught.
inline DetectionEstimate estimate_detection(unsigned pairs, uint64_t sessions, uint64_t seed,
                                            const AgreedLabels &labels = {}, BellLabel ancilla = {}) {
    if (pairs == 0) {
        throw std::invalid_argument("need at least one tested pair");
    }
    DetectionEstimate est;
    est.pairs = pairs;
    est.sessions = sessions;
    for (uint64_t i = 0; i < sessions; i++) {
        SessionConfig cfg;
        cfg.rounds = 2 * pairs;
        cfg.eve_enabled = true;
        cfg.seed = montecarlo_session_seed(seed, i);
        cfg.test_fraction = 0.5;
        cfg.labels = labels;
        cfg.ancilla_label = ancilla;
        Session s(cfg);
        s.run_all();
        TestReport rep = eavesdropping_test(s.records(), cfg.test_fraction, RandomStream(Session::coin_seed(cfg.seed)));
        if (rep.eve_detected) {
            est.detections++;
        }
    }
    return est;
}

struct DetectionPoint {
    unsigned bits = 0;
    double scheme = 0;
    double bb84 = 0;
    std::optional<double> empirical;
    std::optional<double> stderr_estimate;
};

/// Closed-form curve for 1..max_pairs compared pairs (N = 2, 4, ...).
inline std::vector<DetectionPoint> detection_curve(unsigned max_pairs) {
    if (max_pairs == 0) {
        throw std::invalid_argument("max_pairs must be at least 1");
    }
    std::vector<DetectionPoint> out;
    for (unsigned n = 1; n <= max_pairs; n++) {
        out.push_back({2 * n, scheme_detection_probability(2 * n), bb84_detection_probability(2 * n), {}, {}});
    }
    return out;
}

inline void add_empirical(std::vector<DetectionPoint> &curve, uint64_t sessions, uint64_t seed) {
    for (auto &pt : curve) {
        auto est = estimate_detection(pt.bits / 2, sessions, RandomStream::derive_seed(seed, pt.bits));
        pt.empirical = est.frequency();
        pt.stderr_estimate = est.stderr_estimate();
    }
}

inline std::string format_real(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

/// Columns: N, scheme_prob, bb84_prob, empirical, stderr. Empirical
/// columns are empty when not estimated.
inline std::string curve_csv(const std::vector<DetectionPoint> &curve) {
    std::string out = "N,scheme_prob,bb84_prob,empirical,stderr\n";
    for (const auto &pt : curve) {
        out += std::to_string(pt.bits) + "," + format_real(pt.scheme) + "," + format_real(pt.bb84) + ",";
        out += pt.empirical ? format_real(*pt.empirical) : "";
        out += ",";
        out += pt.stderr_estimate ? format_real(*pt.stderr_estimate) : "";
        out += "\n";
    }
    return out;
}

}  // namespace esqkd
