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

#include "esqkd/adversary.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "esqkd/protocol.hpp"

using namespace esqkd;
using namespace esqkd::literals;

namespace {

SessionConfig eve_config(uint64_t rounds, uint64_t seed, BellLabel ancilla = {}) {
    SessionConfig cfg;
    cfg.rounds = rounds;
    cfg.seed = seed;
    cfg.eve_enabled = true;
    cfg.ancilla_label = ancilla;
    return cfg;
}

// The chain from the attack description: Alice gets 11, Bob 00, Eve's
// outbound measurement 00 and her splice 01.
RoundScript reference_chain() {
    RoundScript s;
    s.alice_secret = "11"_bell;
    s.bob_secret = "00"_bell;
    s.eve_outbound = "00"_bell;
    s.eve_splice = "01"_bell;
    return s;
}

// A world with Alice's link pair, Bob's link pair and Eve's ancillas, with
// qubit 2 in transit.
struct World {
    PairTable pairs;
    Custody custody;
    KnowledgeLedger ledger;
    RandomStream rng{0};
    EveState eve;

    World(BellLabel l12, BellLabel l78) {
        pairs.add(1_q, 2_q, l12);
        ledger.prepare(1_q, 2_q, true);
        custody.assign(1_q, Holder::Alice);
        custody.assign(2_q, Holder::Channel);
        eve_prepare_ancillas(pairs, custody, ledger, eve, l78);
    }
    Hands eve_hands() {
        return Hands(Party::Eve, pairs, custody, ledger, rng);
    }
};

}  // namespace

TEST(eve_intercept_outbound, entangles_alice_with_ancilla) {
    World w("11"_bell, "00"_bell);
    Hands h = w.eve_hands();
    eve_intercept_outbound(h, w.eve, 2_q, "00"_bell);
    ASSERT_EQ(w.eve.outbound, "00"_bell);
    ASSERT_EQ(w.pairs.label(1_q, 7_q), "11"_bell);
    ASSERT_EQ(w.pairs.label(2_q, 8_q), "00"_bell);
    ASSERT_EQ(w.custody.holder(2_q), Holder::Channel);
    ASSERT_EQ(w.ledger.visibility(1_q, 7_q), Visibility::EveOnly);

    World z("00"_bell, "00"_bell);
    Hands hz = z.eve_hands();
    eve_intercept_outbound(hz, z.eve, 2_q, "00"_bell);
    ASSERT_EQ(z.pairs.label(1_q, 7_q), "00"_bell);
}

TEST(eve_intercept_outbound, outcome_is_uniform) {
    const int trials = 10000;
    std::array<int, 4> counts{};
    RandomStream rng(31);
    for (int k = 0; k < trials; k++) {
        World w("11"_bell, "00"_bell);
        Hands h(Party::Eve, w.pairs, w.custody, w.ledger, rng);
        eve_intercept_outbound(h, w.eve, 2_q);
        counts[w.eve.outbound->index()]++;
        ASSERT_EQ(w.pairs.label(1_q, 7_q), "11"_bell ^ "00"_bell ^ *w.eve.outbound);
    }
    for (int c : counts) {
        EXPECT_NEAR(c / double(trials), 0.25, 3 * std::sqrt(0.25 * 0.75 / trials));
    }
}

TEST(eve_intercept_outbound, requires_ancillas_and_transit) {
    World w("11"_bell, "00"_bell);
    w.eve.ancillas_ready = false;
    Hands h = w.eve_hands();
    ASSERT_THROW(eve_intercept_outbound(h, w.eve, 2_q), std::logic_error);

    World v("11"_bell, "00"_bell);
    v.custody.assign(2_q, Holder::Alice);
    Hands hv = v.eve_hands();
    ASSERT_THROW(eve_intercept_outbound(hv, v.eve, 2_q), std::logic_error);
}

TEST(eve_intercept_return, refuses_to_run_early) {
    World w("11"_bell, "00"_bell);
    Hands h = w.eve_hands();
    PublicBoard board{AgreedLabels{}, RoleMap::initial(), false, std::nullopt};
    ASSERT_THROW(eve_intercept_return(h, w.eve, 6_q, board), std::logic_error);
    board.secrets_measured = true;
    // Outbound interception never happened.
    ASSERT_THROW(eve_intercept_return(h, w.eve, 6_q, board), std::logic_error);
}

TEST(eve_finalize, worked_chain) {
    EveState eve;
    eve.ancilla_label = "00"_bell;
    eve.outbound = "00"_bell;
    eve.return_check = "10"_bell;
    eve.splice = "01"_bell;
    PublicBoard board{AgreedLabels{}, RoleMap::initial(), true, "01"_bell};
    eve_finalize(eve, board);
    ASSERT_EQ(eve.anchor_ancilla, "10"_bell);
    ASSERT_EQ(eve.inferred_alice, "11"_bell);
}

TEST(eve_finalize, all_zero_chain) {
    EveState eve;
    eve.outbound = eve.return_check = eve.splice = "00"_bell;
    PublicBoard board{AgreedLabels{{}, {}, {}}, RoleMap::initial(), true, "00"_bell};
    eve_finalize(eve, board);
    ASSERT_EQ(eve.inferred_alice, "00"_bell);
}

TEST(eve_finalize, errors) {
    EveState eve;
    PublicBoard board{AgreedLabels{}, RoleMap::initial(), true, std::nullopt};
    ASSERT_THROW(eve_finalize(eve, board), std::logic_error);
    board.announcement = "00"_bell;
    ASSERT_THROW(eve_finalize(eve, board), std::logic_error);
}

TEST(attack, reference_chain_step_by_step) {
    auto cfg = eve_config(1, 0);
    ProtocolState st = ProtocolState::initial(cfg);
    RandomStream rng(0);
    std::vector<std::pair<RoundStep, PairTable>> states;
    std::vector<KnowledgeLedger> ledgers;
    auto rec = run_round(st, cfg, rng, reference_chain(), 0, [&](RoundStep s, const PairTable &t, const KnowledgeLedger &l) {
        states.emplace_back(s, t);
        ledgers.push_back(l);
    });
    ASSERT_EQ(states.size(), 5u);

    const PairTable &after_outbound = states[0].second;
    ASSERT_EQ(after_outbound.label(1_q, 7_q), "11"_bell);
    ASSERT_EQ(after_outbound.label(2_q, 8_q), "00"_bell);
    ASSERT_EQ(ledgers[0].visibility(1_q, 7_q), Visibility::EveOnly);

    const PairTable &after_alice = states[1].second;
    ASSERT_EQ(after_alice.label(5_q, 7_q), "10"_bell);
    ASSERT_EQ(ledgers[1].visibility(5_q, 7_q), Visibility::Unknown);

    const PairTable &after_bob = states[2].second;
    ASSERT_EQ(after_bob.label(6_q, 8_q), "10"_bell);
    ASSERT_EQ(ledgers[2].visibility(6_q, 8_q), Visibility::Unknown);

    const PairTable &after_return = states[3].second;
    ASSERT_EQ(after_return.label(5_q, 6_q), "01"_bell);
    ASSERT_EQ(after_return.label(7_q, 8_q), "01"_bell);
    ASSERT_EQ(ledgers[3].visibility(5_q, 6_q), Visibility::Unknown);
    ASSERT_EQ(ledgers[3].visibility(2_q, 4_q), Visibility::BobAndEve);

    ASSERT_TRUE(rec.eve.has_value());
    ASSERT_EQ(rec.eve->outbound, "00"_bell);
    ASSERT_EQ(rec.eve->return_check, "10"_bell);
    ASSERT_EQ(rec.eve->inferred_bob, "00"_bell);
    ASSERT_EQ(rec.eve->splice, "01"_bell);
    ASSERT_EQ(rec.announcement, "01"_bell);
    ASSERT_EQ(rec.eve->anchor_ancilla, "10"_bell);
    ASSERT_EQ(rec.eve->inferred_alice, "11"_bell);

    // Bob is misled: he believes the key pair is 10, Alice holds 11.
    ASSERT_EQ(rec.key_bits(), "11"_bell);
    ASSERT_EQ(rec.bob_inferred_alice, "10"_bell);
    ASSERT_EQ(st.ledger.visibility(1_q, 3_q), Visibility::AliceAndEve);
    ASSERT_TRUE(st.ledger.is_misinformed(1_q, 3_q, Party::Bob));
    ASSERT_EQ(st.ledger.visibility(2_q, 4_q), Visibility::BobAndEve);
}

TEST(attack, all_zero_chain) {
    auto cfg = eve_config(1, 0);
    cfg.labels = AgreedLabels{{}, {}, {}};
    ProtocolState st = ProtocolState::initial(cfg);
    RandomStream rng(0);
    RoundScript s;
    s.alice_secret = s.bob_secret = s.eve_outbound = s.eve_splice = "00"_bell;
    auto rec = run_round(st, cfg, rng, s);
    ASSERT_EQ(rec.eve->inferred_bob, "00"_bell);
    ASSERT_EQ(rec.announcement, "00"_bell);
    ASSERT_EQ(rec.eve->inferred_alice, "00"_bell);
}

TEST(attack, forced_announcement_steers_the_splice) {
    auto cfg = eve_config(1, 0);
    ProtocolState st = ProtocolState::initial(cfg);
    RandomStream rng(0);
    RoundScript s = reference_chain();
    s.eve_splice.reset();
    s.announcement = "01"_bell;
    auto rec = run_round(st, cfg, rng, s);
    ASSERT_EQ(rec.eve->splice, "01"_bell);

    ProtocolState st2 = ProtocolState::initial(cfg);
    RoundScript bad = reference_chain();
    bad.announcement = "00"_bell;
    ASSERT_THROW(run_round(st2, cfg, rng, bad), std::invalid_argument);
}

TEST(attack, eve_learns_both_secrets_every_round) {
    for (BellLabel ancilla : BellLabel::all()) {
        Session s(eve_config(2500, 40 + ancilla.index(), ancilla));
        s.run_all();
        for (const auto &r : s.records()) {
            ASSERT_EQ(r.eve->inferred_alice, r.alice_secret);
            ASSERT_EQ(r.eve->inferred_bob, r.bob_secret);
        }
    }
}

TEST(attack, disturbance_and_uniform_announcements) {
    const int rounds = 10000;
    Session s(eve_config(rounds, 1234));
    s.run_all();
    int matches = 0;
    std::array<int, 4> announce{};
    for (const auto &r : s.records()) {
        matches += r.bob_inferred_alice == r.alice_secret;
        announce[r.announcement.index()]++;
    }
    double tol = 3 * std::sqrt(0.25 * 0.75 / rounds);
    EXPECT_NEAR(matches / double(rounds), 0.25, tol);
    for (int c : announce) {
        EXPECT_NEAR(c / double(rounds), 0.25, tol);
    }
}

TEST(attack, reset_restores_every_pair_including_ancillas) {
    Session s(eve_config(30, 9, "10"_bell));
    for (int r = 0; r < 30; r++) {
        const auto &rec = s.step();
        ASSERT_EQ(rec.corrections.size(), 4u);
        ASSERT_EQ(rec.corrections[3].party, Party::Eve);
        const auto &st = s.state();
        ASSERT_EQ(st.pairs.size(), 4u);
        ASSERT_EQ(st.pairs.label(7_q, 8_q), "10"_bell);
        ASSERT_EQ(st.pairs.label(st.roles[Role::alice_link_kept], st.roles[Role::alice_link_sent]), "11"_bell);
    }
}
