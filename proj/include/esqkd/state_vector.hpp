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
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "esqkd/bell.hpp"
#include "esqkd/random.hpp"

namespace esqkd {

using Amplitude = std::complex<double>;

/// Dense state over at most eight qubits, used to cross-check the symbolic
/// pair algebra.
///
/// Indexing is big-endian in qubit_order: qubit_order[0] is the most
/// significant bit of the amplitude index.
class StateVector {
   public:
    static constexpr size_t kMaxQubits = 8;

    StateVector(std::vector<QubitId> qubit_order, std::vector<Amplitude> amplitudes)
        : order_(std::move(qubit_order)), amps_(std::move(amplitudes)) {
        if (order_.size() > kMaxQubits) {
            throw std::invalid_argument("state vector limited to " + std::to_string(kMaxQubits) + " qubits");
        }
        if (amps_.size() != (size_t{1} << order_.size())) {
            throw std::invalid_argument("amplitude count does not match qubit count");
        }
        for (size_t i = 0; i < order_.size(); i++) {
            for (size_t j = i + 1; j < order_.size(); j++) {
                if (order_[i] == order_[j]) {
                    throw std::invalid_argument("duplicate qubit " + std::to_string(order_[i].value));
                }
            }
        }
    }

    size_t num_qubits() const {
        return order_.size();
    }
    size_t dim() const {
        return amps_.size();
    }
    const std::vector<QubitId> &qubit_order() const {
        return order_;
    }
    const std::vector<Amplitude> &amplitudes() const {
        return amps_;
    }

    size_t position_of(QubitId q) const {
        for (size_t i = 0; i < order_.size(); i++) {
            if (order_[i] == q) {
                return i;
            }
        }
        throw std::out_of_range("qubit " + std::to_string(q.value) + " is not in the state vector");
    }

    /// Bit shift of q inside an amplitude index.
    size_t shift_of(QubitId q) const {
        return order_.size() - 1 - position_of(q);
    }

    double norm() const {
        double total = 0;
        for (const auto &a : amps_) {
            total += std::norm(a);
        }
        return std::sqrt(total);
    }

   private:
    std::vector<QubitId> order_;
    std::vector<Amplitude> amps_;
};

/// Amplitudes of a Bell state in the two-qubit basis |00>, |01>, |10>, |11>.
inline std::array<Amplitude, 4> bell_amplitudes(BellLabel label) {
    const double h = 1.0 / std::sqrt(2.0);
    std::array<Amplitude, 4> v{};
    unsigned first = label.x() ? 1 : 0;   // |0, x>
    unsigned second = label.x() ? 2 : 3;  // |1, not x>
    v[first] = h;
    v[second] = label.z() ? -h : h;
    return v;
}

namespace detail {

/// Calls f(rest, idx) where idx[s] is the amplitude index with the (a, b)
/// bits set to s = 2*bit_a + bit_b and the other bits taken from rest.
template <typename F>
void for_each_pair_block(const StateVector &state, QubitId a, QubitId b, F &&f) {
    if (a == b) {
        throw std::invalid_argument("need two distinct qubits");
    }
    size_t sa = state.shift_of(a);
    size_t sb = state.shift_of(b);
    size_t mask = (size_t{1} << sa) | (size_t{1} << sb);
    for (size_t rest = 0; rest < state.dim(); rest++) {
        if (rest & mask) {
            continue;
        }
        std::array<size_t, 4> idx{};
        for (size_t s = 0; s < 4; s++) {
            idx[s] = rest | ((s >> 1) << sa) | ((s & 1) << sb);
        }
        f(rest, idx);
    }
}

}  // namespace detail

/// Tensor product of the listed Bell pairs, in the given qubit order.
inline StateVector prepare(const PairTable &pairs, std::vector<QubitId> order) {
    if (order.size() != pairs.qubit_count()) {
        throw std::invalid_argument("qubit order must list every paired qubit exactly once");
    }
    if (order.size() > StateVector::kMaxQubits) {
        throw std::invalid_argument("too many qubits for the dense oracle");
    }
    std::vector<Amplitude> amps(size_t{1} << order.size());
    StateVector probe(order, amps);
    for (QubitId q : order) {
        pairs.pair_of(q);
    }
    for (size_t idx = 0; idx < amps.size(); idx++) {
        Amplitude a = 1.0;
        for (const BellPair &p : pairs.pairs()) {
            unsigned s = static_cast<unsigned>(((idx >> probe.shift_of(p.a)) & 1) << 1 | ((idx >> probe.shift_of(p.b)) & 1));
            a *= bell_amplitudes(p.label)[s];
            if (a == 0.0) {
                break;
            }
        }
        amps[idx] = a;
    }
    return StateVector(std::move(order), std::move(amps));
}

/// Qubit order is the pair listing order: (a1, b1, a2, b2, ...).
inline StateVector prepare(const PairTable &pairs) {
    std::vector<QubitId> order;
    for (const BellPair &p : pairs.pairs()) {
        order.push_back(p.a);
        order.push_back(p.b);
    }
    return prepare(pairs, std::move(order));
}

struct OracleMeasurement {
    BellLabel outcome;
    StateVector state;
    std::array<double, 4> probabilities;
};

/// Born-rule Bell measurement on (a, b). Probabilities are indexed by
/// BellLabel::index().
inline OracleMeasurement oracle_bsm(const StateVector &state, QubitId a, QubitId b, RandomStream &rng,
                                    std::optional<BellLabel> forced = std::nullopt) {
    std::array<std::array<Amplitude, 4>, 4> basis{};
    for (BellLabel l : BellLabel::all()) {
        basis[l.index()] = bell_amplitudes(l);
    }

    // Overlap of each Bell state with every (a, b) block.
    std::array<std::vector<Amplitude>, 4> overlaps;
    std::array<double, 4> probs{};
    for (auto &o : overlaps) {
        o.assign(state.dim(), 0.0);
    }
    const auto &amps = state.amplitudes();
    detail::for_each_pair_block(state, a, b, [&](size_t rest, const std::array<size_t, 4> &idx) {
        for (size_t l = 0; l < 4; l++) {
            Amplitude c = 0.0;
            for (size_t s = 0; s < 4; s++) {
                c += std::conj(basis[l][s]) * amps[idx[s]];
            }
            overlaps[l][rest] = c;
            probs[l] += std::norm(c);
        }
    });

    BellLabel outcome;
    if (forced.has_value()) {
        outcome = *forced;
    } else {
        double u = rng.next_unit();
        double acc = 0;
        unsigned pick = 4;
        for (unsigned l = 0; l < 4; l++) {
            acc += probs[l];
            if (u < acc) {
                pick = l;
                break;
            }
        }
        if (pick == 4) {
            for (unsigned l = 4; l-- > 0;) {
                if (probs[l] > 0) {
                    pick = l;
                    break;
                }
            }
        }
        outcome = BellLabel::from_index(pick);
    }
    double p = probs[outcome.index()];
    if (p < 1e-12) {
        throw std::logic_error("sampled zero-probability Bell outcome " + outcome.str());
    }

    std::vector<Amplitude> post(state.dim(), 0.0);
    double scale = 1.0 / std::sqrt(p);
    const auto &bv = basis[outcome.index()];
    const auto &ov = overlaps[outcome.index()];
    detail::for_each_pair_block(state, a, b, [&](size_t rest, const std::array<size_t, 4> &idx) {
        for (size_t s = 0; s < 4; s++) {
            post[idx[s]] = bv[s] * ov[rest] * scale;
        }
    });
    return OracleMeasurement{outcome, StateVector(state.qubit_order(), std::move(post)), probs};
}

/// Label of (a, b) if their reduced state is a Bell state (fidelity within
/// 1e-9 of one); nullopt otherwise.
inline std::optional<BellLabel> bell_label_of(const StateVector &state, QubitId a, QubitId b) {
    std::array<std::array<Amplitude, 4>, 4> rho{};
    const auto &amps = state.amplitudes();
    detail::for_each_pair_block(state, a, b, [&](size_t, const std::array<size_t, 4> &idx) {
        for (size_t i = 0; i < 4; i++) {
            for (size_t j = 0; j < 4; j++) {
                rho[i][j] += amps[idx[i]] * std::conj(amps[idx[j]]);
            }
        }
    });
    for (BellLabel l : BellLabel::all()) {
        auto v = bell_amplitudes(l);
        Amplitude f = 0.0;
        for (size_t i = 0; i < 4; i++) {
            for (size_t j = 0; j < 4; j++) {
                f += std::conj(v[i]) * rho[i][j] * v[j];
            }
        }
        if (std::abs(f - 1.0) <= 1e-9) {
            return l;
        }
    }
    return std::nullopt;
}

inline std::array<Amplitude, 4> pauli_matrix(PauliOp op) {
    using namespace std::complex_literals;
    switch (op) {
        case PauliOp::I:
            return {1.0, 0.0, 0.0, 1.0};
        case PauliOp::X:
            return {0.0, 1.0, 1.0, 0.0};
        case PauliOp::Z:
            return {1.0, 0.0, 0.0, -1.0};
        case PauliOp::Y:
            return {0.0, -1i, 1i, 0.0};
    }
    return {};
}

inline StateVector oracle_apply_pauli(const StateVector &state, QubitId q, PauliOp op) {
    auto m = pauli_matrix(op);
    size_t bit = size_t{1} << state.shift_of(q);
    std::vector<Amplitude> out(state.amplitudes());
    const auto &in = state.amplitudes();
    for (size_t idx = 0; idx < state.dim(); idx++) {
        if (idx & bit) {
            continue;
        }
        Amplitude v0 = in[idx];
        Amplitude v1 = in[idx | bit];
        out[idx] = m[0] * v0 + m[1] * v1;
        out[idx | bit] = m[2] * v0 + m[3] * v1;
    }
    return StateVector(state.qubit_order(), std::move(out));
}

/// Row-major dense operator.
struct DenseMatrix {
    size_t dim = 0;
    std::vector<Amplitude> entries;

    Amplitude &at(size_t r, size_t c) {
        return entries[r * dim + c];
    }
    Amplitude at(size_t r, size_t c) const {
        return entries[r * dim + c];
    }
};

/// The four Bell-basis projectors on (a, b), extended by identity on the
/// other qubits of `order`. Indexed by BellLabel::index().
inline std::array<DenseMatrix, 4> bell_projectors(const std::vector<QubitId> &order, QubitId a, QubitId b) {
    StateVector shape(order, std::vector<Amplitude>(size_t{1} << order.size()));
    std::array<DenseMatrix, 4> out;
    for (BellLabel l : BellLabel::all()) {
        auto v = bell_amplitudes(l);
        DenseMatrix &m = out[l.index()];
        m.dim = shape.dim();
        m.entries.assign(m.dim * m.dim, 0.0);
        detail::for_each_pair_block(shape, a, b, [&](size_t, const std::array<size_t, 4> &idx) {
            for (size_t i = 0; i < 4; i++) {
                for (size_t j = 0; j < 4; j++) {
                    m.at(idx[i], idx[j]) = v[i] * std::conj(v[j]);
                }
            }
        });
    }
    return out;
}

}  // namespace esqkd
