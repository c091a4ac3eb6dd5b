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

#include <optional>
#include <stdexcept>

#include "esqkd/bell.hpp"
#include "esqkd/custody.hpp"
#include "esqkd/roles.hpp"

namespace esqkd {

/// Eve's private record for the entanglement-swapping attack.
///
/// She owns an ancilla pair (kept, swap) = (7, 8). Per round she
///   1. intercepts the outbound link qubit and Bell-measures it with 8
///      (outcome `outbound`), so Alice's kept qubit ends up paired with 7;
///   2. intercepts the returned qubit, which by then is paired with 8, and
///      reads that pair without disturbing it (`return_check`);
///   3. Bell-measures (7, 8) (`splice`), reconnecting Alice's anchor qubit
///      with the returned one, and forwards it.
/// From the public announcement she then recovers Alice's secret too.
struct EveState {
    BellLabel ancilla_label{};
    QubitId ancilla_kept{7};
    QubitId ancilla_swap{8};
    bool ancillas_ready = false;

    std::optional<BellLabel> outbound;
    std::optional<BellLabel> return_check;
    std::optional<BellLabel> splice;
    std::optional<BellLabel> inferred_bob;
    std::optional<BellLabel> inferred_alice;
    /// Label Eve reconstructs for (anchor_far, ancilla_kept) once the
    /// announcement is public.
    std::optional<BellLabel> anchor_ancilla;

    void clear_round() {
        outbound.reset();
        return_check.reset();
        splice.reset();
        inferred_bob.reset();
        inferred_alice.reset();
        anchor_ancilla.reset();
    }
};

/// Prepares the ancilla pair in `label`, held by Eve.
inline void eve_prepare_ancillas(PairTable &pairs, Custody &custody, KnowledgeLedger &ledger, EveState &eve,
                                 BellLabel label) {
    eve.ancilla_label = label;
    pairs.add(eve.ancilla_kept, eve.ancilla_swap, label);
    custody.assign(eve.ancilla_kept, Holder::Eve);
    custody.assign(eve.ancilla_swap, Holder::Eve);
    ledger.prepare(eve.ancilla_kept, eve.ancilla_swap, false, KnowledgeLedger::bit(Party::Eve));
    eve.ancillas_ready = true;
}

inline void eve_intercept_outbound(Hands &eve_hands, EveState &eve, QubitId in_transit,
                                   std::optional<BellLabel> forced = std::nullopt) {
    if (!eve.ancillas_ready) {
        throw std::logic_error("Eve's ancillas are not initialized");
    }
    eve_hands.receive(in_transit);
    eve.outbound = eve_hands.measure(in_transit, eve.ancilla_swap, forced);
    eve_hands.send(in_transit);
}

inline void eve_intercept_return(Hands &eve_hands, EveState &eve, QubitId in_transit, const PublicBoard &board,
                                 std::optional<BellLabel> forced_splice = std::nullopt) {
    if (!board.secrets_measured) {
        throw std::logic_error("Eve's return interception requires both secret measurements to be done");
    }
    if (!eve.outbound.has_value()) {
        throw std::logic_error("Eve's return interception requires the outbound interception");
    }
    eve_hands.receive(in_transit);
    // (returned, swap) is already a pair at this point, so this reads it.
    eve.return_check = eve_hands.measure(in_transit, eve.ancilla_swap);
    eve.inferred_bob = *eve.return_check ^ board.labels.bob_link ^ *eve.outbound;
    eve_hands.conclude(board.roles[Role::alice_link_sent], board.roles[Role::bob_link_kept], *eve.inferred_bob);
    eve.splice = eve_hands.measure(eve.ancilla_kept, eve.ancilla_swap, forced_splice);
    eve_hands.send(in_transit);
}

/// Recovers Alice's secret from the announcement. Pure bookkeeping.
inline void eve_finalize(EveState &eve, const PublicBoard &board) {
    if (!board.announcement.has_value()) {
        throw std::logic_error("Eve cannot finalize before the announcement");
    }
    if (!eve.outbound || !eve.return_check || !eve.splice) {
        throw std::logic_error("Eve is missing recorded outcomes");
    }
    BellLabel link_ancilla = board.labels.alice_link ^ eve.ancilla_label ^ *eve.outbound;
    eve.anchor_ancilla = *board.announcement ^ *eve.return_check ^ *eve.splice;
    eve.inferred_alice = *eve.anchor_ancilla ^ board.labels.alice_anchor ^ link_ancilla;
}

/// Restores the ancilla pair to its agreed label after a round.
inline PauliOp eve_reset(Hands &eve_hands, EveState &eve) {
    if (!eve.splice.has_value()) {
        throw std::logic_error("Eve has no ancilla measurement to reset from");
    }
    PauliOp op = eve_hands.reset_pair(eve.ancilla_kept, *eve.splice, eve.ancilla_label, false);
    eve.clear_round();
    return op;
}

}  // namespace esqkd
