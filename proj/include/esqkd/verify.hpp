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

#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "esqkd/bell.hpp"
#include "esqkd/state_vector.hpp"

namespace esqkd {

/// The published swapping table: row r lists the four initial |ijkl>
/// strings and, as a set, the four possible final |ikjl> strings. Both
/// halves of each row contain the same strings.
inline const std::array<std::array<std::string, 4>, 4> &swap_table_rows() {
    static const std::array<std::array<std::string, 4>, 4> rows{{
        {"0000", "0101", "1010", "1111"},
        {"0001", "0100", "1011", "1110"},
        {"0010", "0111", "1000", "1101"},
        {"0011", "0110", "1001", "1100"},
    }};
    return rows;
}

struct VerificationReport {
    unsigned cases = 0;
    unsigned passed = 0;
    unsigned table_rows_matched = 0;
    std::vector<std::string> failures;

    bool ok() const {
        return failures.empty() && passed == cases && table_rows_matched == 4;
    }
};

/// Checks `rule` against the swapping table (set equality per row) and
/// against the dense oracle for every (left, right, outcome) triple:
/// uniform Born weights and matching post-measurement labels.
template <typename SwapRule>
VerificationReport verify_swap_rule(SwapRule &&rule) {
    VerificationReport rep;

    for (const auto &row : swap_table_rows()) {
        std::set<std::string> expected(row.begin(), row.end());
        bool row_ok = true;
        for (const auto &initial : row) {
            BellLabel left = BellLabel::parse(initial.substr(0, 2));
            BellLabel right = BellLabel::parse(initial.substr(2, 2));
            std::set<std::string> got;
            for (BellLabel o : BellLabel::all()) {
                got.insert(o.str() + rule(left, right, o).str());
            }
            if (got != expected) {
                row_ok = false;
                rep.failures.push_back("table row of " + initial + " not reproduced");
            }
        }
        if (row_ok) {
            rep.table_rows_matched++;
        }
    }

    const QubitId i{1}, j{2}, k{3}, l{4};
    RandomStream unused(0);
    for (BellLabel left : BellLabel::all()) {
        for (BellLabel right : BellLabel::all()) {
            StateVector psi = prepare(PairTable{{i, j, left}, {k, l, right}}, {i, j, k, l});
            for (BellLabel o : BellLabel::all()) {
                rep.cases++;
                std::string tag = left.str() + "," + right.str() + " -> " + o.str();
                auto m = oracle_bsm(psi, i, k, unused, o);
                bool ok = true;
                for (double p : m.probabilities) {
                    if (std::abs(p - 0.25) > 1e-12) {
                        ok = false;
                        rep.failures.push_back(tag + ": Born weight " + std::to_string(p) + " != 1/4");
                        break;
                    }
                }
                if (std::abs(m.state.norm() - 1.0) > 1e-12) {
                    ok = false;
                    rep.failures.push_back(tag + ": post-measurement state not normalized");
                }
                auto measured = bell_label_of(m.state, i, k);
                auto swapped = bell_label_of(m.state, j, l);
                BellLabel predicted = rule(left, right, o);
                if (measured != o) {
                    ok = false;
                    rep.failures.push_back(tag + ": measured pair not in outcome state");
                }
                if (swapped != predicted) {
                    ok = false;
                    rep.failures.push_back(tag + ": oracle gives " + (swapped ? swapped->str() : std::string("no Bell pair")) +
                                           ", rule gives " + predicted.str());
                }
                if (ok) {
                    rep.passed++;
                }
            }
        }
    }
    return rep;
}

inline VerificationReport verify_swap_rule() {
    return verify_swap_rule(swap_rule);
}

}  // namespace esqkd
