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

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "esqkd/bell.hpp"
#include "esqkd/knowledge.hpp"
#include "esqkd/random.hpp"

namespace esqkd {

enum class Holder : uint8_t { Alice = 0, Bob = 1, Eve = 2, Channel = 3 };

inline Holder holder_of(Party p) {
    return static_cast<Holder>(p);
}

/// Physical location of every qubit.
class Custody {
   public:
    void assign(QubitId q, Holder h) {
        where_[q] = h;
    }

    Holder holder(QubitId q) const {
        auto it = where_.find(q);
        if (it == where_.end()) {
            throw std::out_of_range("qubit " + std::to_string(q.value) + " has no custodian");
        }
        return it->second;
    }

    bool operator==(const Custody &) const = default;

   private:
    std::map<QubitId, Holder> where_;
};

/// A party's access to the shared quantum state. Everything a party does to
/// qubits goes through here: it may only touch qubits it holds, it never
/// reads pair labels directly, and the knowledge ledger is updated as a side
/// effect of each action.
///
/// Outcomes come from `rng` unless the caller passes a forced outcome,
/// which stands in for nature when replaying a scripted round.
class Hands {
   public:
    Hands(Party party, PairTable &pairs, Custody &custody, KnowledgeLedger &ledger, RandomStream &rng)
        : party_(party), pairs_(pairs), custody_(custody), ledger_(ledger), rng_(rng) {
    }

    Party party() const {
        return party_;
    }

    bool holds(QubitId q) const {
        return custody_.holder(q) == holder_of(party_);
    }

    BellLabel measure(QubitId a, QubitId b, std::optional<BellLabel> forced = std::nullopt) {
        require_held(a);
        require_held(b);
        if (pairs_.are_partners(a, b)) {
            BellLabel out = bsm(pairs_, a, b, rng_, forced);
            ledger_.learn(a, b, party_);
            return out;
        }
        QubitId j = pairs_.partner(a);
        QubitId l = pairs_.partner(b);
        BellLabel out = bsm(pairs_, a, b, rng_, forced);
        ledger_.record_swap(party_, a, j, b, l);
        return out;
    }

    /// Publishes the label of a pair the party knows.
    void announce(QubitId a, QubitId b) {
        if (!ledger_.knows(a, b, party_)) {
            throw LedgerViolation(std::string(party_name(party_)) + " cannot announce a label it does not know");
        }
        ledger_.announce(a, b);
    }

    /// Records that the party has concluded the label of (a, b).
    bool conclude(QubitId a, QubitId b, BellLabel label) {
        return ledger_.claim(a, b, party_, label, pairs_.label(a, b));
    }

    /// Rotates the pair containing q from the label the party believes it is
    /// in to `target`. The party must know the current label.
    PauliOp reset_pair(QubitId q, BellLabel believed, BellLabel target, bool target_is_public) {
        require_held(q);
        QubitId partner = pairs_.partner(q);
        if (!ledger_.knows(q, partner, party_)) {
            throw LedgerViolation(std::string(party_name(party_)) + " does not know the label of pair (" +
                                  std::to_string(q.value) + "," + std::to_string(partner.value) + ")");
        }
        if (pairs_.label(q, partner) != believed) {
            throw std::logic_error("ledger says the label is known but the belief is wrong");
        }
        PauliOp op = pauli_correction(believed, target);
        pairs_ = apply_pauli(std::move(pairs_), q, op);
        ledger_.reset(q, partner, target_is_public, KnowledgeLedger::bit(party_));
        return op;
    }

    void send(QubitId q) {
        require_held(q);
        custody_.assign(q, Holder::Channel);
    }

    void receive(QubitId q) {
        if (custody_.holder(q) != Holder::Channel) {
            throw std::logic_error("qubit " + std::to_string(q.value) + " is not in transit");
        }
        custody_.assign(q, holder_of(party_));
    }

   private:
    void require_held(QubitId q) const {
        if (!holds(q)) {
            throw std::logic_error(std::string(party_name(party_)) + " does not hold qubit " + std::to_string(q.value));
        }
    }

    Party party_;
    PairTable &pairs_;
    Custody &custody_;
    KnowledgeLedger &ledger_;
    RandomStream &rng_;
};

}  // namespace esqkd
