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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "esqkd/bell.hpp"

namespace esqkd {

enum class Party : uint8_t { Alice = 0, Bob = 1, Eve = 2 };

inline std::string_view party_name(Party p) {
    switch (p) {
        case Party::Alice:
            return "alice";
        case Party::Bob:
            return "bob";
        case Party::Eve:
            return "eve";
    }
    return "?";
}

inline Party parse_party(std::string_view text) {
    if (text == "alice") return Party::Alice;
    if (text == "bob") return Party::Bob;
    if (text == "eve") return Party::Eve;
    throw std::invalid_argument("unknown party '" + std::string(text) + "'");
}

/// Who knows the Bell label of a pair.
enum class Visibility : uint8_t {
    Public,
    AliceOnly,
    BobOnly,
    EveOnly,
    AliceAndBob,
    AliceAndEve,
    BobAndEve,
    AllParties,
    Unknown,
};

inline std::string_view visibility_name(Visibility v) {
    switch (v) {
        case Visibility::Public:
            return "public";
        case Visibility::AliceOnly:
            return "alice_only";
        case Visibility::BobOnly:
            return "bob_only";
        case Visibility::EveOnly:
            return "eve_only";
        case Visibility::AliceAndBob:
            return "alice_and_bob";
        case Visibility::AliceAndEve:
            return "alice_and_eve";
        case Visibility::BobAndEve:
            return "bob_and_eve";
        case Visibility::AllParties:
            return "all_parties";
        case Visibility::Unknown:
            return "unknown";
    }
    return "?";
}

inline Visibility parse_visibility(std::string_view text) {
    for (uint8_t i = 0; i <= static_cast<uint8_t>(Visibility::Unknown); i++) {
        auto v = static_cast<Visibility>(i);
        if (visibility_name(v) == text) {
            return v;
        }
    }
    throw std::invalid_argument("unknown visibility '" + std::string(text) + "'");
}

/// Bracket notation for a label: "00" public, (00) Alice, [00] Bob,
/// {00} Eve, |00| nobody, nested brackets for shared knowledge.
inline std::string bracket_notation(BellLabel label, Visibility v) {
    std::string s = label.str();
    switch (v) {
        case Visibility::Public:
            return "\"" + s + "\"";
        case Visibility::AliceOnly:
            return "(" + s + ")";
        case Visibility::BobOnly:
            return "[" + s + "]";
        case Visibility::EveOnly:
            return "{" + s + "}";
        case Visibility::AliceAndBob:
            return "[(" + s + ")]";
        case Visibility::AliceAndEve:
            return "{(" + s + ")}";
        case Visibility::BobAndEve:
            return "{[" + s + "]}";
        case Visibility::AllParties:
            return "{[(" + s + ")]}";
        case Visibility::Unknown:
            return "|" + s + "|";
    }
    return s;
}

/// Thrown when a party acts on a pair label it does not know.
class LedgerViolation : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// Tracks which parties know the label of each live Bell pair.
///
/// The ledger is kept by the simulator, which sees the true state, so a
/// party only becomes a knower when its information is actually correct.
/// A wrong inference (for instance one spoiled by an eavesdropper) is
/// recorded in `misinformed` instead.
class KnowledgeLedger {
   public:
    struct Entry {
        QubitId a;
        QubitId b;
        uint8_t knowers = 0;
        uint8_t misinformed = 0;
        bool is_public = false;

        bool knows(Party p) const {
            return is_public || (knowers & bit(p));
        }
        Visibility visibility() const {
            if (is_public) {
                return Visibility::Public;
            }
            switch (knowers) {
                case 0:
                    return Visibility::Unknown;
                case 1:
                    return Visibility::AliceOnly;
                case 2:
                    return Visibility::BobOnly;
                case 3:
                    return Visibility::AliceAndBob;
                case 4:
                    return Visibility::EveOnly;
                case 5:
                    return Visibility::AliceAndEve;
                case 6:
                    return Visibility::BobAndEve;
                default:
                    return Visibility::AllParties;
            }
        }
        bool operator==(const Entry &) const = default;
    };

    static constexpr uint8_t bit(Party p) {
        return static_cast<uint8_t>(1u << static_cast<unsigned>(p));
    }

    /// Registers a freshly prepared pair.
    void prepare(QubitId a, QubitId b, bool is_public, uint8_t knowers = 0) {
        if (find(a, b) != entries_.end()) {
            throw std::invalid_argument("pair already in ledger");
        }
        Entry e{std::min(a, b), std::max(a, b), knowers, 0, is_public};
        auto pos = std::lower_bound(entries_.begin(), entries_.end(), e, [](const Entry &u, const Entry &v) {
            return u.a < v.a;
        });
        entries_.insert(pos, e);
    }

    /// Bookkeeping for a swap: `measurer` measured (a, b), whose previous
    /// partners were j and l. The measurer learns the outcome; the new (j, l)
    /// pair is known to the measurer only if both parent labels were known.
    void record_swap(Party measurer, QubitId a, QubitId j, QubitId b, QubitId l) {
        const Entry &left = entry(a, j);
        const Entry &right = entry(b, l);
        bool derivable = left.knows(measurer) && right.knows(measurer);
        erase(a, j);
        erase(b, l);
        prepare(a, b, false, bit(measurer));
        prepare(j, l, false, derivable ? bit(measurer) : 0);
    }

    void learn(QubitId a, QubitId b, Party p) {
        mutable_entry(a, b).knowers |= bit(p);
    }

    void announce(QubitId a, QubitId b) {
        mutable_entry(a, b).is_public = true;
    }

    /// A party concludes the pair label is `claimed`; `actual` is the true
    /// label. Returns whether the claim was right.
    bool claim(QubitId a, QubitId b, Party p, BellLabel claimed, BellLabel actual) {
        Entry &e = mutable_entry(a, b);
        if (claimed == actual) {
            e.knowers |= bit(p);
            e.misinformed &= static_cast<uint8_t>(~bit(p));
            return true;
        }
        e.misinformed |= bit(p);
        return false;
    }

    /// Marks the pair as reset to an agreed label known to `holders`.
    void reset(QubitId a, QubitId b, bool is_public, uint8_t holders) {
        Entry &e = mutable_entry(a, b);
        e.is_public = is_public;
        e.knowers = holders;
        e.misinformed = 0;
    }

    bool knows(QubitId a, QubitId b, Party p) const {
        return entry(a, b).knows(p);
    }

    bool is_misinformed(QubitId a, QubitId b, Party p) const {
        return (entry(a, b).misinformed & bit(p)) != 0;
    }

    Visibility visibility(QubitId a, QubitId b) const {
        return entry(a, b).visibility();
    }

    bool contains(QubitId a, QubitId b) const {
        return find(a, b) != entries_.end();
    }

    const Entry &entry(QubitId a, QubitId b) const {
        auto it = find(a, b);
        if (it == entries_.end()) {
            throw std::out_of_range(
                "no ledger entry for pair (" + std::to_string(a.value) + "," + std::to_string(b.value) + ")");
        }
        return *it;
    }

    const std::vector<Entry> &entries() const {
        return entries_;
    }

    bool operator==(const KnowledgeLedger &) const = default;

   private:
    std::vector<Entry>::const_iterator find(QubitId a, QubitId b) const {
        QubitId lo = std::min(a, b);
        QubitId hi = std::max(a, b);
        return std::find_if(entries_.begin(), entries_.end(), [&](const Entry &e) {
            return e.a == lo && e.b == hi;
        });
    }
    Entry &mutable_entry(QubitId a, QubitId b) {
        return const_cast<Entry &>(entry(a, b));
    }
    void erase(QubitId a, QubitId b) {
        entries_.erase(find(a, b));
    }

    std::vector<Entry> entries_;
};

}  // namespace esqkd
