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
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "esqkd/adversary.hpp"
#include "esqkd/bell.hpp"
#include "esqkd/custody.hpp"
#include "esqkd/knowledge.hpp"
#include "esqkd/random.hpp"
#include "esqkd/roles.hpp"

namespace esqkd {

struct SessionConfig {
    uint64_t rounds = 0;
    bool eve_enabled = false;
    uint64_t seed = 0;
    /// Fraction of rounds sacrificed to the eavesdropping test.
    double test_fraction = 0.0;
    AgreedLabels labels;
    BellLabel ancilla_label{};

    void validate() const {
        if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
            throw std::invalid_argument("test fraction must lie in [0, 1]");
        }
    }

    /// Number of rounds reserved for testing: test_fraction * rounds,
    /// rounded to nearest.
    uint64_t test_rounds() const {
        validate();
        return static_cast<uint64_t>(std::llround(test_fraction * static_cast<double>(rounds)));
    }

    bool operator==(const SessionConfig &) const = default;
};

/// Forced outcomes for replaying a specific round. Unset entries are drawn.
///
/// The announcement is normally deterministic; forcing it steers the last
/// random measurement before it (Bob's, or Eve's splice when she is
/// active). The joint distribution of the round is unchanged by this
/// choice of which outcome to treat as free.
struct RoundScript {
    std::optional<BellLabel> alice_secret;
    std::optional<BellLabel> bob_secret;
    std::optional<BellLabel> announcement;
    std::optional<BellLabel> eve_outbound;
    std::optional<BellLabel> eve_splice;
};

struct Correction {
    Party party;
    QubitId qubit;
    PauliOp op;

    bool operator==(const Correction &) const = default;
};

struct LedgerSnapshot {
    QubitId a;
    QubitId b;
    BellLabel label;
    Visibility visibility;

    bool operator==(const LedgerSnapshot &) const = default;
};

struct EveRecord {
    BellLabel outbound;
    BellLabel return_check;
    BellLabel splice;
    BellLabel anchor_ancilla;
    BellLabel inferred_alice;
    BellLabel inferred_bob;

    bool operator==(const EveRecord &) const = default;
};

struct RoundRecord {
    uint64_t index = 0;
    RoleMap roles;
    BellLabel alice_secret;
    BellLabel bob_secret;
    BellLabel announcement;
    BellLabel alice_inferred_bob;
    BellLabel bob_inferred_alice;
    /// Qubits carried over the channel, in order (Alice->Bob, Bob->Alice).
    std::array<QubitId, 2> sent{};
    /// Reset rotations applied after the round. Private to each party.
    std::vector<Correction> corrections;
    /// Knowledge of every live pair at the end of the round.
    std::vector<LedgerSnapshot> ledger;
    std::optional<EveRecord> eve;

    static constexpr unsigned transmissions = 2;

    /// Alice's secret result is the key material.
    BellLabel key_bits() const {
        return alice_secret;
    }

    bool operator==(const RoundRecord &) const = default;
};

/// Bob's secret, as Alice reconstructs it from her own secret and the
/// announcement.
constexpr BellLabel infer_bob_secret(BellLabel alice_link, BellLabel alice_anchor, BellLabel bob_link,
                                     BellLabel alice_secret, BellLabel announcement) {
    return alice_link ^ alice_anchor ^ bob_link ^ alice_secret ^ announcement;
}

constexpr BellLabel infer_alice_secret(BellLabel alice_link, BellLabel alice_anchor, BellLabel bob_link,
                                       BellLabel bob_secret, BellLabel announcement) {
    return alice_link ^ alice_anchor ^ bob_link ^ bob_secret ^ announcement;
}

/// All (alice_secret, bob_secret) pairs consistent with the public record,
/// ordered by Alice's value. They are equally likely.
constexpr std::array<std::pair<BellLabel, BellLabel>, 4> eve_public_posterior(BellLabel alice_link,
                                                                              BellLabel alice_anchor,
                                                                              BellLabel bob_link,
                                                                              BellLabel announcement) {
    BellLabel offset = alice_link ^ alice_anchor ^ bob_link ^ announcement;
    std::array<std::pair<BellLabel, BellLabel>, 4> out{};
    for (unsigned i = 0; i < 4; i++) {
        BellLabel a = BellLabel::from_index(i);
        out[i] = {a, a ^ offset};
    }
    return out;
}

/// Points in a round at which an observer sees the state.
enum class RoundStep : uint8_t {
    outbound_delivered,  // link qubit has reached Bob
    alice_measured,      // Alice's secret measurement done
    bob_measured,        // Bob's secret measurement done
    return_delivered,    // returned qubit has reached Alice
    announced,           // Alice's final measurement announced
};

using RoundObserver = std::function<void(RoundStep, const PairTable &, const KnowledgeLedger &)>;

/// Full quantum and bookkeeping state of a session between rounds.
struct ProtocolState {
    PairTable pairs;
    Custody custody;
    KnowledgeLedger ledger;
    RoleMap roles = RoleMap::initial();
    std::optional<EveState> eve;

    static ProtocolState initial(const SessionConfig &cfg) {
        ProtocolState s;
        const RoleMap &r = s.roles;
        auto prepare = [&](Role a, Role b, BellLabel label, Holder holder) {
            s.pairs.add(r[a], r[b], label);
            s.custody.assign(r[a], holder);
            s.custody.assign(r[b], holder);
            s.ledger.prepare(r[a], r[b], true);
        };
        prepare(Role::alice_link_kept, Role::alice_link_sent, cfg.labels.alice_link, Holder::Alice);
        prepare(Role::alice_anchor_near, Role::alice_anchor_far, cfg.labels.alice_anchor, Holder::Alice);
        prepare(Role::bob_link_kept, Role::bob_link_sent, cfg.labels.bob_link, Holder::Bob);
        if (cfg.eve_enabled) {
            s.eve.emplace();
            eve_prepare_ancillas(s.pairs, s.custody, s.ledger, *s.eve, cfg.ancilla_label);
        }
        return s;
    }

    bool operator==(const ProtocolState &) const = default;
};

namespace detail {

inline void require_pair(const ProtocolState &st, Role a, Role b, BellLabel expected, Holder holder) {
    QubitId qa = st.roles[a];
    QubitId qb = st.roles[b];
    if (!st.pairs.are_partners(qa, qb)) {
        throw std::logic_error(
            "malformed protocol state: (" + std::to_string(qa.value) + "," + std::to_string(qb.value) + ") not paired");
    }
    if (st.pairs.label(qa, qb) != expected) {
        throw std::logic_error("malformed protocol state: pair (" + std::to_string(qa.value) + "," +
                               std::to_string(qb.value) + ") is not in its agreed label");
    }
    if (st.custody.holder(qa) != holder || st.custody.holder(qb) != holder) {
        throw std::logic_error("malformed protocol state: pair held by the wrong party");
    }
}

}  // namespace detail

/// One round: Alice sends her link qubit, both parties make their secret
/// Bell measurements, Bob returns his link qubit, Alice measures and
/// announces, and both infer the other's secret. With Eve enabled, she
/// intercepts both transmissions.
inline RoundRecord run_round(ProtocolState &st, const SessionConfig &cfg, RandomStream &rng,
                             const RoundScript &script = {}, uint64_t index = 0,
                             const RoundObserver &observe = nullptr) {
    const RoleMap roles = st.roles;
    const AgreedLabels &labels = cfg.labels;
    detail::require_pair(st, Role::alice_link_kept, Role::alice_link_sent, labels.alice_link, Holder::Alice);
    detail::require_pair(st, Role::alice_anchor_near, Role::alice_anchor_far, labels.alice_anchor, Holder::Alice);
    detail::require_pair(st, Role::bob_link_kept, Role::bob_link_sent, labels.bob_link, Holder::Bob);
    const bool with_eve = cfg.eve_enabled;
    if (with_eve && !st.eve.has_value()) {
        throw std::logic_error("Eve is enabled but has no state");
    }

    const QubitId q1 = roles[Role::alice_link_kept];
    const QubitId q2 = roles[Role::alice_link_sent];
    const QubitId q3 = roles[Role::alice_anchor_near];
    const QubitId q4 = roles[Role::bob_link_kept];
    const QubitId q5 = roles[Role::alice_anchor_far];
    const QubitId q6 = roles[Role::bob_link_sent];

    Hands alice(Party::Alice, st.pairs, st.custody, st.ledger, rng);
    Hands bob(Party::Bob, st.pairs, st.custody, st.ledger, rng);
    Hands eve(Party::Eve, st.pairs, st.custody, st.ledger, rng);
    PublicBoard board{labels, roles, false, std::nullopt};

    auto notify = [&](RoundStep step) {
        if (observe) {
            observe(step, st.pairs, st.ledger);
        }
    };

    RoundRecord rec;
    rec.index = index;
    rec.roles = roles;
    rec.sent = {q2, q6};

    alice.send(q2);
    if (with_eve) {
        eve_intercept_outbound(eve, *st.eve, q2, script.eve_outbound);
    }
    bob.receive(q2);
    notify(RoundStep::outbound_delivered);

    rec.alice_secret = alice.measure(q1, q3, script.alice_secret);
    notify(RoundStep::alice_measured);

    std::optional<BellLabel> bob_forced = script.bob_secret;
    if (!with_eve && script.announcement.has_value()) {
        // (5,6) after Bob's swap is L(2,5) ^ L(4,6) ^ outcome.
        BellLabel steer = st.pairs.label(q2, q5) ^ st.pairs.label(q4, q6) ^ *script.announcement;
        if (bob_forced.has_value() && *bob_forced != steer) {
            throw std::invalid_argument("forced Bob secret and forced announcement are inconsistent");
        }
        bob_forced = steer;
    }
    rec.bob_secret = bob.measure(q2, q4, bob_forced);
    board.secrets_measured = true;
    notify(RoundStep::bob_measured);

    bob.send(q6);
    if (with_eve) {
        std::optional<BellLabel> splice = script.eve_splice;
        if (script.announcement.has_value()) {
            EveState &es = *st.eve;
            BellLabel steer = st.pairs.label(q5, es.ancilla_kept) ^ st.pairs.label(q6, es.ancilla_swap) ^
                              *script.announcement;
            if (splice.has_value() && *splice != steer) {
                throw std::invalid_argument("forced splice and forced announcement are inconsistent");
            }
            splice = steer;
        }
        eve_intercept_return(eve, *st.eve, q6, board, splice);
    }
    alice.receive(q6);
    notify(RoundStep::return_delivered);

    rec.announcement = alice.measure(q5, q6, script.announcement);
    alice.announce(q5, q6);
    board.announcement = rec.announcement;
    notify(RoundStep::announced);

    rec.alice_inferred_bob =
        infer_bob_secret(labels.alice_link, labels.alice_anchor, labels.bob_link, rec.alice_secret, rec.announcement);
    rec.bob_inferred_alice =
        infer_alice_secret(labels.alice_link, labels.alice_anchor, labels.bob_link, rec.bob_secret, rec.announcement);
    alice.conclude(q2, q4, rec.alice_inferred_bob);
    bob.conclude(q1, q3, rec.bob_inferred_alice);

    if (with_eve) {
        EveState &es = *st.eve;
        eve_finalize(es, board);
        eve.conclude(q1, q3, *es.inferred_alice);
        rec.eve = EveRecord{*es.outbound,       *es.return_check,  *es.splice,
                            *es.anchor_ancilla, *es.inferred_alice, *es.inferred_bob};
    }

    for (const auto &e : st.ledger.entries()) {
        rec.ledger.push_back(LedgerSnapshot{e.a, e.b, st.pairs.label(e.a, e.b), e.visibility()});
    }
    return rec;
}

struct ResetResult {
    std::vector<Correction> corrections;
    RoleMap roles;
};

/// Returns each pair to its agreed label and rotates roles for the next
/// round. Each party rotates only pairs it holds and knows the label of,
/// using the label it learned during the round.
inline ResetResult reset_round(ProtocolState &st, const SessionConfig &cfg, const RoundRecord &rec) {
    const RoleMap &r = st.roles;
    const QubitId q1 = r[Role::alice_link_kept];
    const QubitId q4 = r[Role::bob_link_kept];
    const QubitId q5 = r[Role::alice_anchor_far];

    // Reset needs no randomness; the stream is never read.
    RandomStream unused(0);
    Hands alice(Party::Alice, st.pairs, st.custody, st.ledger, unused);
    Hands bob(Party::Bob, st.pairs, st.custody, st.ledger, unused);

    const RoleMap next = r.rotated();
    ResetResult out;
    // (5,6) becomes next round's alice link, (1,3) the anchor, (2,4) bob's link.
    out.corrections.push_back({Party::Alice, q5, alice.reset_pair(q5, rec.announcement, cfg.labels.alice_link, true)});
    out.corrections.push_back({Party::Alice, q1, alice.reset_pair(q1, rec.alice_secret, cfg.labels.alice_anchor, true)});
    out.corrections.push_back({Party::Bob, q4, bob.reset_pair(q4, rec.bob_secret, cfg.labels.bob_link, true)});
    if (st.eve.has_value()) {
        Hands eve(Party::Eve, st.pairs, st.custody, st.ledger, unused);
        QubitId kept = st.eve->ancilla_kept;
        out.corrections.push_back({Party::Eve, kept, eve_reset(eve, *st.eve)});
    }
    st.roles = next;
    out.roles = next;
    return out;
}

/// A sequential session: rounds share the quantum state across resets.
class Session {
   public:
    explicit Session(SessionConfig cfg)
        : cfg_(std::move(cfg)),
          state_(ProtocolState::initial(cfg_)),
          round_streams_(RandomStream::derive_seed(cfg_.seed, kRoundStreams)) {
        cfg_.validate();
    }

    /// Stream index (under the session seed) of the per-round randomness.
    static constexpr uint64_t kRoundStreams = 1;
    /// Stream index of the public coin used to pick test rounds.
    static constexpr uint64_t kCoinStream = 2;

    static uint64_t coin_seed(uint64_t session_seed) {
        return RandomStream::derive_seed(session_seed, kCoinStream);
    }

    /// Runs one round and resets for the next.
    const RoundRecord &step(const RoundScript &script = {}, const RoundObserver &observe = nullptr) {
        uint64_t index = records_.size();
        RandomStream rng = round_streams_.split(index);
        RoundRecord rec = run_round(state_, cfg_, rng, script, index, observe);
        rec.corrections = reset_round(state_, cfg_, rec).corrections;
        records_.push_back(std::move(rec));
        return records_.back();
    }

    void run_all() {
        while (records_.size() < cfg_.rounds) {
            step();
        }
    }

    const SessionConfig &config() const {
        return cfg_;
    }
    const ProtocolState &state() const {
        return state_;
    }
    const std::vector<RoundRecord> &records() const {
        return records_;
    }

    std::vector<BellLabel> alice_key() const {
        std::vector<BellLabel> k;
        for (const auto &r : records_) {
            k.push_back(r.key_bits());
        }
        return k;
    }
    std::vector<BellLabel> bob_key() const {
        std::vector<BellLabel> k;
        for (const auto &r : records_) {
            k.push_back(r.bob_inferred_alice);
        }
        return k;
    }

   private:
    SessionConfig cfg_;
    ProtocolState state_;
    RandomStream round_streams_;
    std::vector<RoundRecord> records_;
};

inline std::string key_to_bits(const std::vector<BellLabel> &key) {
    std::string s;
    s.reserve(2 * key.size());
    for (BellLabel l : key) {
        s += l.str();
    }
    return s;
}

}  // namespace esqkd
