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
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "esqkd/random.hpp"

namespace esqkd {

/// One of the four Bell states of a qubit pair (i, j):
///
///     00 : (|00> + |11>) / sqrt2
///     01 : (|00> - |11>) / sqrt2
///     10 : (|01> + |10>) / sqrt2
///     11 : (|01> - |10>) / sqrt2
///
/// The first printed digit is the bit-flip component `x`, the second the
/// phase component `z`. With this encoding entanglement swapping is plain
/// componentwise XOR. States are tracked up to global phase.
class BellLabel {
   public:
    constexpr BellLabel() = default;
    constexpr BellLabel(bool x, bool z) : bits_(static_cast<uint8_t>((x ? 2 : 0) | (z ? 1 : 0))) {
    }

    static constexpr BellLabel from_index(unsigned index) {
        return BellLabel((index & 2) != 0, (index & 1) != 0);
    }

    /// Parses the two-character form "00".."11".
    static BellLabel parse(std::string_view text) {
        if (text.size() != 2 || (text[0] != '0' && text[0] != '1') || (text[1] != '0' && text[1] != '1')) {
            throw std::invalid_argument("Bell label must be one of 00, 01, 10, 11; got '" + std::string(text) + "'");
        }
        return BellLabel(text[0] == '1', text[1] == '1');
    }

    static constexpr std::array<BellLabel, 4> all() {
        return {from_index(0), from_index(1), from_index(2), from_index(3)};
    }

    constexpr bool x() const {
        return (bits_ & 2) != 0;
    }
    constexpr bool z() const {
        return (bits_ & 1) != 0;
    }
    /// 2x + z; also the position in all().
    constexpr unsigned index() const {
        return bits_;
    }

    std::string str() const {
        return {x() ? '1' : '0', z() ? '1' : '0'};
    }

    constexpr BellLabel operator^(BellLabel other) const {
        return from_index(bits_ ^ other.bits_);
    }
    constexpr BellLabel &operator^=(BellLabel other) {
        bits_ ^= other.bits_;
        return *this;
    }
    constexpr auto operator<=>(const BellLabel &) const = default;

   private:
    uint8_t bits_ = 0;
};

inline std::ostream &operator<<(std::ostream &out, BellLabel label) {
    return out << label.str();
}

struct QubitId {
    uint32_t value = 0;

    constexpr auto operator<=>(const QubitId &) const = default;
};

inline std::ostream &operator<<(std::ostream &out, QubitId q) {
    return out << q.value;
}

namespace literals {
constexpr QubitId operator""_q(unsigned long long v) {
    return QubitId{static_cast<uint32_t>(v)};
}
constexpr BellLabel operator""_bell(const char *text, size_t n) {
    if (n != 2 || (text[0] != '0' && text[0] != '1') || (text[1] != '0' && text[1] != '1')) {
        throw std::invalid_argument("bad Bell label literal");
    }
    return BellLabel(text[0] == '1', text[1] == '1');
}
}  // namespace literals

/// Single-qubit Pauli. Acting on either qubit of a Bell pair, X toggles the
/// x bit, Z toggles z and Y toggles both (up to phase).
enum class PauliOp : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

constexpr BellLabel toggle_of(PauliOp op) {
    switch (op) {
        case PauliOp::I:
            return BellLabel(false, false);
        case PauliOp::X:
            return BellLabel(true, false);
        case PauliOp::Z:
            return BellLabel(false, true);
        case PauliOp::Y:
            return BellLabel(true, true);
    }
    return {};
}

constexpr PauliOp pauli_from_toggle(BellLabel toggle) {
    if (toggle.x()) {
        return toggle.z() ? PauliOp::Y : PauliOp::X;
    }
    return toggle.z() ? PauliOp::Z : PauliOp::I;
}

inline char pauli_name(PauliOp op) {
    return "IXZY"[static_cast<unsigned>(op)];
}

inline PauliOp parse_pauli(std::string_view text) {
    if (text == "I") return PauliOp::I;
    if (text == "X") return PauliOp::X;
    if (text == "Z") return PauliOp::Z;
    if (text == "Y") return PauliOp::Y;
    throw std::invalid_argument("unknown Pauli '" + std::string(text) + "'");
}

inline std::ostream &operator<<(std::ostream &out, PauliOp op) {
    return out << pauli_name(op);
}

/// Bell-pair label of (j, l) after a Bell measurement on (i, k) that
/// returned `outcome`, given (i, j) in `left` and (k, l) in `right`.
///
/// Each row of the swapping table conserves the XOR of its four digits,
/// which is all this computes.
constexpr BellLabel swap_rule(BellLabel left, BellLabel right, BellLabel outcome) {
    return left ^ right ^ outcome;
}

/// The Pauli that, applied to one qubit of a pair in `current`, leaves it in
/// `target`.
constexpr PauliOp pauli_correction(BellLabel current, BellLabel target) {
    return pauli_from_toggle(current ^ target);
}

struct BellPair {
    QubitId a;
    QubitId b;
    BellLabel label;

    bool contains(QubitId q) const {
        return a == q || b == q;
    }
    QubitId partner_of(QubitId q) const {
        return a == q ? b : a;
    }
    bool operator==(const BellPair &) const = default;
};

/// The symbolic quantum state: a partition of live qubits into disjoint
/// Bell pairs. Pairs are stored with a < b, sorted by a.
class PairTable {
   public:
    PairTable() = default;
    PairTable(std::initializer_list<BellPair> pairs) {
        for (const auto &p : pairs) {
            add(p.a, p.b, p.label);
        }
    }

    void add(QubitId a, QubitId b, BellLabel label) {
        if (a == b) {
            throw std::invalid_argument("qubit " + std::to_string(a.value) + " cannot pair with itself");
        }
        if (contains(a) || contains(b)) {
            throw std::invalid_argument(
                "qubit already paired: (" + std::to_string(a.value) + "," + std::to_string(b.value) + ")");
        }
        if (b < a) {
            std::swap(a, b);
        }
        BellPair p{a, b, label};
        auto pos = std::lower_bound(pairs_.begin(), pairs_.end(), p, [](const BellPair &u, const BellPair &v) {
            return u.a < v.a;
        });
        pairs_.insert(pos, p);
    }

    bool contains(QubitId q) const {
        return find(q) != pairs_.end();
    }

    const BellPair &pair_of(QubitId q) const {
        auto it = find(q);
        if (it == pairs_.end()) {
            throw std::out_of_range("qubit " + std::to_string(q.value) + " is not in the pair table");
        }
        return *it;
    }

    QubitId partner(QubitId q) const {
        return pair_of(q).partner_of(q);
    }

    bool are_partners(QubitId a, QubitId b) const {
        auto it = find(a);
        return it != pairs_.end() && a != b && it->contains(b);
    }

    /// Label of the pair (a, b); throws unless a and b are partners.
    BellLabel label(QubitId a, QubitId b) const {
        const BellPair &p = pair_of(a);
        if (!p.contains(b) || a == b) {
            throw std::invalid_argument(
                "qubits " + std::to_string(a.value) + " and " + std::to_string(b.value) + " are not partners");
        }
        return p.label;
    }

    void set_label(QubitId q, BellLabel label) {
        mutable_pair_of(q).label = label;
    }

    void toggle(QubitId q, BellLabel mask) {
        mutable_pair_of(q).label ^= mask;
    }

    /// Removes and returns the pair containing q.
    BellPair remove(QubitId q) {
        auto it = find(q);
        if (it == pairs_.end()) {
            throw std::out_of_range("qubit " + std::to_string(q.value) + " is not in the pair table");
        }
        BellPair p = *it;
        pairs_.erase(it);
        return p;
    }

    std::span<const BellPair> pairs() const {
        return pairs_;
    }
    size_t size() const {
        return pairs_.size();
    }
    size_t qubit_count() const {
        return 2 * pairs_.size();
    }

    bool operator==(const PairTable &) const = default;

   private:
    std::vector<BellPair>::const_iterator find(QubitId q) const {
        return std::find_if(pairs_.begin(), pairs_.end(), [q](const BellPair &p) {
            return p.contains(q);
        });
    }
    BellPair &mutable_pair_of(QubitId q) {
        auto it = std::find_if(pairs_.begin(), pairs_.end(), [q](const BellPair &p) {
            return p.contains(q);
        });
        if (it == pairs_.end()) {
            throw std::out_of_range("qubit " + std::to_string(q.value) + " is not in the pair table");
        }
        return *it;
    }

    std::vector<BellPair> pairs_;
};

/// Bell-operator measurement on qubits a and b.
///
/// Partners are in an eigenstate of the measurement: their label is returned
/// and the table is untouched (`forced`, if given, must agree). Otherwise the
/// outcome is uniform over the four labels (or `forced`), (a, b) collapse
/// into the outcome state and their former partners j, l are left in
/// swap_rule(L_aj, L_bl, outcome).
inline BellLabel bsm(PairTable &table, QubitId a, QubitId b, RandomStream &rng,
                     std::optional<BellLabel> forced = std::nullopt) {
    if (a == b) {
        throw std::invalid_argument("Bell measurement needs two distinct qubits");
    }
    const BellPair &pa = table.pair_of(a);
    const BellPair &pb = table.pair_of(b);
    if (pa.contains(b)) {
        if (forced.has_value() && *forced != pa.label) {
            throw std::invalid_argument("forced outcome " + forced->str() + " is impossible: (" +
                                        std::to_string(a.value) + "," + std::to_string(b.value) +
                                        ") is an eigenstate with label " + pa.label.str());
        }
        return pa.label;
    }
    QubitId j = pa.partner_of(a);
    QubitId l = pb.partner_of(b);
    BellLabel left = pa.label;
    BellLabel right = pb.label;
    BellLabel outcome = forced.has_value() ? *forced : BellLabel::from_index(rng.next_two_bits());
    table.remove(a);
    table.remove(b);
    table.add(a, b, outcome);
    table.add(j, l, swap_rule(left, right, outcome));
    return outcome;
}

/// Applies op to qubit q; only the label of q's pair changes.
inline PairTable apply_pauli(PairTable table, QubitId q, PauliOp op) {
    table.toggle(q, toggle_of(op));
    return table;
}

}  // namespace esqkd
