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
#include <optional>
#include <string_view>

#include "esqkd/bell.hpp"

namespace esqkd {

/// The six protocol positions, numbered as in the original description of
/// the scheme (qubits 1..6 in the first round).
///
///   alice_link   = (1, 2): Alice prepares it and sends qubit 2 to Bob.
///   alice_anchor = (3, 5): stays with Alice.
///   bob_link     = (4, 6): Bob prepares it and sends qubit 6 to Alice.
///
/// Alice measures (1, 3) and (5, 6); Bob measures (2, 4).
enum class Role : uint8_t {
    alice_link_kept = 0,    // 1
    alice_link_sent = 1,    // 2
    alice_anchor_near = 2,  // 3
    bob_link_kept = 3,      // 4
    alice_anchor_far = 4,   // 5
    bob_link_sent = 5,      // 6
};

/// Role -> physical qubit for one round.
struct RoleMap {
    std::array<QubitId, 6> qubits{};

    static constexpr RoleMap initial() {
        return RoleMap{{QubitId{1}, QubitId{2}, QubitId{3}, QubitId{4}, QubitId{5}, QubitId{6}}};
    }

    constexpr QubitId operator[](Role r) const {
        return qubits[static_cast<size_t>(r)];
    }

    /// Roles for the next round. After a round the live pairs are
    /// (1,3) and (5,6) at Alice and (2,4) at Bob. The returned map makes
    /// (5,6) the new alice link with the just-returned qubit as the one to
    /// send, (1,3) the new anchor, and (4,2) the new bob link with the
    /// qubit Bob just received as the one to send back. Qubits 2 and 6 of
    /// the first round therefore carry every transmission of the session.
    constexpr RoleMap rotated() const {
        const auto &o = qubits;
        return RoleMap{{o[4], o[5], o[0], o[3], o[2], o[1]}};
    }

    constexpr bool operator==(const RoleMap &) const = default;
};

/// Publicly agreed Bell labels for the three protocol pairs. Every round
/// starts from these.
struct AgreedLabels {
    BellLabel alice_link{true, true};     // 11
    BellLabel alice_anchor{true, false};  // 10
    BellLabel bob_link{true, false};      // 10

    /// XOR of the three, the public offset relating the two secret results
    /// to the announcement.
    constexpr BellLabel combined() const {
        return alice_link ^ alice_anchor ^ bob_link;
    }

    constexpr bool operator==(const AgreedLabels &) const = default;
};

/// Everything announced in the open during a round. This is the only
/// protocol state the adversary is handed.
struct PublicBoard {
    AgreedLabels labels;
    RoleMap roles;
    bool secrets_measured = false;
    std::optional<BellLabel> announcement;
};

}  // namespace esqkd
