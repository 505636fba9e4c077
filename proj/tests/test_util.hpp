// Copyright 2026 The lrsd-lab Authors
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
#ifndef LRSD_TESTS_TEST_UTIL_HPP
#define LRSD_TESTS_TEST_UTIL_HPP

#include "lrsd/lrsd.hpp"
#include "lrsd/oracle.hpp"
#include "lrsd/pauli.hpp"
#include "lrsd/rng.hpp"

namespace lrsd::testing {

inline PauliString random_pauli(size_t n, Rng &rng, bool hermitian = true) {
    PauliString p(n);
    for (size_t q = 0; q < n; q++) {
        p.set_letter(q, static_cast<Letter>(rng.below(4)));
    }
    p.set_phase(static_cast<uint8_t>(hermitian ? 2 * rng.below(2) : rng.below(4)));
    return p;
}

inline PauliString random_nonidentity_pauli(size_t n, Rng &rng) {
    while (true) {
        PauliString p = random_pauli(n, rng);
        if (!p.is_identity()) {
            return p;
        }
    }
}

/// Dense unitary of a Clifford gate, built column by column.
inline oracle::Mat gate_unitary(size_t n, const CliffordGate &g) {
    Eigen::Index dim = Eigen::Index{1} << n;
    oracle::Mat u(dim, dim);
    for (Eigen::Index b = 0; b < dim; b++) {
        oracle::StateVector v(n);
        v.amplitudes().setZero();
        v.amplitudes()[b] = 1;
        v.apply(g);
        u.col(b) = v.amplitudes();
    }
    return u;
}

inline CliffordGate random_gate(size_t n, Rng &rng) {
    uint32_t a = static_cast<uint32_t>(rng.below(n));
    uint32_t b = static_cast<uint32_t>(rng.below(n - 1));
    if (b >= a) b++;
    switch (rng.below(9)) {
        case 0: return {GateKind::H, a};
        case 1: return {GateKind::S, a};
        case 2: return {GateKind::Sdg, a};
        case 3: return {GateKind::X, a};
        case 4: return {GateKind::Y, a};
        case 5: return {GateKind::Z, a};
        case 6: return {GateKind::CZ, a, b};
        case 7: return {GateKind::CX, a, b};
        default: return CliffordGate::two_qubit_clifford(static_cast<uint16_t>(rng.below(kTwoQubitCliffordCount)), a, b);
    }
}

/// Random Clifford+T+measurement history starting from |+>^n, or from the
/// maximally mixed state when `mixed` is set. Measurements use sampled outcomes.
inline LrsdState random_lrsd(size_t n, Rng &rng, int events, bool mixed = false) {
    LrsdState s = mixed ? LrsdState(StabilizerTableau::maximally_mixed(n)) : LrsdState::plus_state(n);
    for (int e = 0; e < events; e++) {
        double u = rng.uniform();
        if (u < 0.45) {
            s.apply_clifford(random_gate(n, rng));
        } else if (u < 0.8) {
            s.apply_t(rng.below(n));
        } else if (!mixed || rng.coin()) {
            s.measure(PauliString::single(n, rng.below(n), static_cast<Letter>(1 + rng.below(3))), std::nullopt, &rng);
        }
    }
    return s;
}

inline double max_abs_diff(const oracle::Mat &a, const oracle::Mat &b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace lrsd::testing

#endif
