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

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "esqkd/analysis.hpp"
#include "esqkd/protocol.hpp"

namespace esqkd {

inline constexpr std::string_view kTranscriptFormat = "esqkd-transcript";
inline constexpr int kTranscriptFormatVersion = 1;
inline constexpr std::string_view kGenerator = "esqkd 0.1.0";

/// A completed session: config echo, every round, and the summary.
struct Transcript {
    SessionConfig config;
    uint64_t coin_seed = 0;
    std::vector<RoundRecord> rounds;
    TestReport test;
    RateReport rate;

    bool operator==(const Transcript &) const = default;
};

/// Runs the configured session and its eavesdropping test.
inline Transcript run_transcript(const SessionConfig &cfg) {
    Session s(cfg);
    s.run_all();
    Transcript t;
    t.config = cfg;
    t.coin_seed = Session::coin_seed(cfg.seed);
    t.rounds = s.records();
    t.test = eavesdropping_test(t.rounds, cfg.test_fraction, RandomStream(t.coin_seed));
    t.rate = rate_report(t.rounds);
    return t;
}

namespace transcript_detail {

using json = nlohmann::ordered_json;

inline json label(BellLabel l) {
    return l.str();
}

inline BellLabel label(const json &j) {
    return BellLabel::parse(j.get<std::string>());
}

inline json key(const std::vector<BellLabel> &k) {
    return key_to_bits(k);
}

inline std::vector<BellLabel> key(const json &j) {
    std::string bits = j.get<std::string>();
    if (bits.size() % 2 != 0) {
        throw std::invalid_argument("key bit string has odd length");
    }
    std::vector<BellLabel> out;
    for (size_t i = 0; i < bits.size(); i += 2) {
        out.push_back(BellLabel::parse(std::string_view(bits).substr(i, 2)));
    }
    return out;
}

inline json header(const Transcript &t) {
    const SessionConfig &c = t.config;
    json j;
    j["type"] = "header";
    j["format"] = kTranscriptFormat;
    j["format_version"] = kTranscriptFormatVersion;
    j["generator"] = kGenerator;
    j["config"] = {
        {"rounds", c.rounds},
        {"seed", c.seed},
        {"eve", c.eve_enabled},
        {"test_fraction", c.test_fraction},
        {"labels",
         {{"alice_link", label(c.labels.alice_link)},
          {"alice_anchor", label(c.labels.alice_anchor)},
          {"bob_link", label(c.labels.bob_link)}}},
        {"ancilla", label(c.ancilla_label)},
    };
    j["coin_seed"] = t.coin_seed;
    return j;
}

inline json round(const RoundRecord &r) {
    json j;
    j["type"] = "round";
    j["index"] = r.index;
    json roles = json::array();
    for (QubitId q : r.roles.qubits) {
        roles.push_back(q.value);
    }
    j["roles"] = roles;
    j["sent"] = {r.sent[0].value, r.sent[1].value};
    j["transmissions"] = RoundRecord::transmissions;
    j["alice_secret"] = label(r.alice_secret);
    j["bob_secret"] = label(r.bob_secret);
    j["announcement"] = label(r.announcement);
    j["alice_inferred_bob"] = label(r.alice_inferred_bob);
    j["bob_inferred_alice"] = label(r.bob_inferred_alice);
    j["key_bits"] = label(r.key_bits());
    json corr = json::array();
    for (const auto &c : r.corrections) {
        corr.push_back({{"party", party_name(c.party)}, {"qubit", c.qubit.value}, {"op", std::string(1, pauli_name(c.op))}});
    }
    j["corrections"] = corr;
    json ledger = json::array();
    for (const auto &e : r.ledger) {
        ledger.push_back({{"pair", {e.a.value, e.b.value}},
                          {"label", label(e.label)},
                          {"visibility", visibility_name(e.visibility)},
                          {"notation", bracket_notation(e.label, e.visibility)}});
    }
    j["ledger"] = ledger;
    if (r.eve) {
        const EveRecord &e = *r.eve;
        j["eve"] = {
            {"outbound", label(e.outbound)},
            {"return_check", label(e.return_check)},
            {"splice", label(e.splice)},
            {"anchor_ancilla", label(e.anchor_ancilla)},
            {"inferred_alice", label(e.inferred_alice)},
            {"inferred_bob", label(e.inferred_bob)},
        };
    }
    return j;
}

inline json summary(const Transcript &t) {
    json j;
    j["type"] = "summary";
    json rate;
    rate["key_bits"] = t.rate.key_bits;
    rate["transmitted_qubits"] = t.rate.transmitted_qubits;
    rate["rate"] = t.rate.rate ? json(*t.rate.rate) : json(nullptr);
    rate["reference_rates"] = {
        {"bb84", RateReport::kBb84Rate}, {"b92", RateReport::kB92Rate}, {"e91", RateReport::kE91Rate}};
    j["rate"] = rate;
    json test;
    test["pairs_tested"] = t.test.pairs_tested;
    test["bits_tested"] = t.test.bits_tested;
    test["mismatches"] = t.test.mismatches;
    test["eve_detected"] = t.test.eve_detected;
    test["degenerate"] = t.test.degenerate;
    test["tested_rounds"] = t.test.tested_rounds;
    test["remaining_key"] = key(t.test.remaining_key);
    test["bob_remaining_key"] = key(t.test.bob_remaining_key);
    test["detection_probability_if_attacked"] =
        scheme_detection_probability(static_cast<unsigned>(std::min<uint64_t>(t.test.bits_tested, 1u << 20)));
    j["test"] = test;
    return j;
}

inline void expect_type(const json &j, std::string_view type) {
    if (!j.is_object() || !j.contains("type") || j["type"].get<std::string>() != type) {
        throw std::invalid_argument("expected a '" + std::string(type) + "' record");
    }
}

}  // namespace transcript_detail

/// Line-delimited JSON: a header line, one line per round, a summary line.
inline std::string emit_transcript(const Transcript &t) {
    namespace d = transcript_detail;
    std::string out = d::header(t).dump();
    out += '\n';
    for (const auto &r : t.rounds) {
        out += d::round(r).dump();
        out += '\n';
    }
    out += d::summary(t).dump();
    out += '\n';
    return out;
}

inline Transcript parse_transcript(std::string_view text) {
    namespace d = transcript_detail;
    using json = d::json;
    std::vector<json> lines;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            lines.push_back(json::parse(line));
        }
    }
    if (lines.size() < 2) {
        throw std::invalid_argument("transcript needs a header and a summary");
    }

    Transcript t;
    const json &h = lines.front();
    d::expect_type(h, "header");
    if (h.at("format").get<std::string>() != kTranscriptFormat ||
        h.at("format_version").get<int>() != kTranscriptFormatVersion) {
        throw std::invalid_argument("unsupported transcript format");
    }
    const json &c = h.at("config");
    t.config.rounds = c.at("rounds").get<uint64_t>();
    t.config.seed = c.at("seed").get<uint64_t>();
    t.config.eve_enabled = c.at("eve").get<bool>();
    t.config.test_fraction = c.at("test_fraction").get<double>();
    t.config.labels.alice_link = d::label(c.at("labels").at("alice_link"));
    t.config.labels.alice_anchor = d::label(c.at("labels").at("alice_anchor"));
    t.config.labels.bob_link = d::label(c.at("labels").at("bob_link"));
    t.config.ancilla_label = d::label(c.at("ancilla"));
    t.coin_seed = h.at("coin_seed").get<uint64_t>();

    for (size_t i = 1; i + 1 < lines.size(); i++) {
        const json &j = lines[i];
        d::expect_type(j, "round");
        RoundRecord r;
        r.index = j.at("index").get<uint64_t>();
        const json &roles = j.at("roles");
        if (roles.size() != 6) {
            throw std::invalid_argument("round roles must list six qubits");
        }
        for (size_t k = 0; k < 6; k++) {
            r.roles.qubits[k] = QubitId{roles[k].get<uint32_t>()};
        }
        r.sent = {QubitId{j.at("sent").at(0).get<uint32_t>()}, QubitId{j.at("sent").at(1).get<uint32_t>()}};
        r.alice_secret = d::label(j.at("alice_secret"));
        r.bob_secret = d::label(j.at("bob_secret"));
        r.announcement = d::label(j.at("announcement"));
        r.alice_inferred_bob = d::label(j.at("alice_inferred_bob"));
        r.bob_inferred_alice = d::label(j.at("bob_inferred_alice"));
        for (const auto &cj : j.at("corrections")) {
            r.corrections.push_back({parse_party(cj.at("party").get<std::string>()),
                                     QubitId{cj.at("qubit").get<uint32_t>()},
                                     parse_pauli(cj.at("op").get<std::string>())});
        }
        for (const auto &ej : j.at("ledger")) {
            r.ledger.push_back({QubitId{ej.at("pair").at(0).get<uint32_t>()},
                                QubitId{ej.at("pair").at(1).get<uint32_t>()}, d::label(ej.at("label")),
                                parse_visibility(ej.at("visibility").get<std::string>())});
        }
        if (j.contains("eve")) {
            const json &e = j["eve"];
            r.eve = EveRecord{d::label(e.at("outbound")),       d::label(e.at("return_check")),
                              d::label(e.at("splice")),         d::label(e.at("anchor_ancilla")),
                              d::label(e.at("inferred_alice")), d::label(e.at("inferred_bob"))};
        }
        t.rounds.push_back(std::move(r));
    }

    const json &s = lines.back();
    d::expect_type(s, "summary");
    const json &rate = s.at("rate");
    t.rate.key_bits = rate.at("key_bits").get<uint64_t>();
    t.rate.transmitted_qubits = rate.at("transmitted_qubits").get<uint64_t>();
    if (!rate.at("rate").is_null()) {
        t.rate.rate = rate.at("rate").get<double>();
    }
    const json &test = s.at("test");
    t.test.pairs_tested = test.at("pairs_tested").get<uint64_t>();
    t.test.bits_tested = test.at("bits_tested").get<uint64_t>();
    t.test.mismatches = test.at("mismatches").get<uint64_t>();
    t.test.eve_detected = test.at("eve_detected").get<bool>();
    t.test.degenerate = test.at("degenerate").get<bool>();
    t.test.tested_rounds = test.at("tested_rounds").get<std::vector<uint64_t>>();
    t.test.remaining_key = d::key(test.at("remaining_key"));
    t.test.bob_remaining_key = d::key(test.at("bob_remaining_key"));
    return t;
}

}  // namespace esqkd
