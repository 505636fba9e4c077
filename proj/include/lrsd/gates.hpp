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
#ifndef LRSD_GATES_HPP
#define LRSD_GATES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lrsd/error.hpp"
#include "lrsd/rng.hpp"

namespace lrsd {

enum class GateKind : uint8_t { H, S, Sdg, X, Y, Z, CZ, CX, Clifford2Q };

struct CliffordGate {
    GateKind kind;
    uint32_t q0;
    uint32_t q1 = 0;
    uint16_t index = 0;  // element of the two-qubit Clifford table

    bool two_qubit() const {
        return kind == GateKind::CZ || kind == GateKind::CX || kind == GateKind::Clifford2Q;
    }

    static CliffordGate h(uint32_t q) {
        return {GateKind::H, q};
    }
    static CliffordGate s(uint32_t q) {
        return {GateKind::S, q};
    }
    static CliffordGate cz(uint32_t a, uint32_t b) {
        return {GateKind::CZ, a, b};
    }
    static CliffordGate cx(uint32_t c, uint32_t t) {
        return {GateKind::CX, c, t};
    }
    static CliffordGate two_qubit_clifford(uint16_t index, uint32_t a, uint32_t b) {
        return {GateKind::Clifford2Q, a, b, index};
    }
};

constexpr size_t kTwoQubitCliffordCount = 11520;

namespace detail {

// Generators used to spell out two-qubit Clifford elements.
enum : uint8_t { kH0, kH1, kS0, kS1, kCZ };

// Action of a generator on a 4-bit unsigned Pauli (x0, z0, x1, z1).
inline uint8_t conj_bits(uint8_t gen, uint8_t p) {
    uint8_t x0 = p & 1, z0 = (p >> 1) & 1, x1 = (p >> 2) & 1, z1 = (p >> 3) & 1;
    switch (gen) {
        case kH0: std::swap(x0, z0); break;
        case kH1: std::swap(x1, z1); break;
        case kS0: z0 ^= x0; break;
        case kS1: z1 ^= x1; break;
        case kCZ:
            z0 ^= x1;
            z1 ^= x0;
            break;
    }
    return static_cast<uint8_t>(x0 | (z0 << 1) | (x1 << 2) | (z1 << 3));
}

/// Breadth-first enumeration of Sp(4, F2) with a shortest generator word per
/// element. Element 0 is the identity.
inline const std::vector<std::vector<uint8_t>> &symplectic_words() {
    static const std::vector<std::vector<uint8_t>> words = [] {
        using Images = std::array<uint8_t, 4>;
        auto key = [](const Images &m) { return m[0] | (m[1] << 4) | (m[2] << 8) | (m[3] << 12); };
        std::vector<Images> queue{{1, 2, 4, 8}};
        std::vector<std::vector<uint8_t>> out{{}};
        std::unordered_map<int, size_t> seen{{key(queue[0]), 0}};
        for (size_t head = 0; head < queue.size(); head++) {
            for (uint8_t gen = 0; gen < 5; gen++) {
                Images next;
                for (int k = 0; k < 4; k++) {
                    next[k] = conj_bits(gen, queue[head][k]);
                }
                if (seen.emplace(key(next), queue.size()).second) {
                    queue.push_back(next);
                    std::vector<uint8_t> w = out[head];
                    w.push_back(gen);
                    out.push_back(std::move(w));
                }
            }
        }
        return out;
    }();
    return words;
}

}  // namespace detail

/// Applies two-qubit Clifford element `index` (symplectic part index / 16 from
/// the enumeration, Pauli layer X^a Z^b per qubit from index % 16) to any target
/// exposing the primitive gate methods.
template <typename Target>
void apply_two_qubit_clifford(Target &t, uint16_t index, uint32_t a, uint32_t b) {
    const auto &words = detail::symplectic_words();
    const auto &word = words.at(index / 16);
    for (uint8_t gen : word) {
        switch (gen) {
            case detail::kH0: t.h(a); break;
            case detail::kH1: t.h(b); break;
            case detail::kS0: t.s(a); break;
            case detail::kS1: t.s(b); break;
            case detail::kCZ: t.cz(a, b); break;
        }
    }
    uint16_t layer = index % 16;
    if (layer & 1) {
        t.x(a);
    }
    if (layer & 2) {
        t.z(a);
    }
    if (layer & 4) {
        t.x(b);
    }
    if (layer & 8) {
        t.z(b);
    }
}

template <typename Target>
void apply_gate(Target &t, const CliffordGate &g) {
    switch (g.kind) {
        case GateKind::H: t.h(g.q0); break;
        case GateKind::S: t.s(g.q0); break;
        case GateKind::Sdg: t.sdg(g.q0); break;
        case GateKind::X: t.x(g.q0); break;
        case GateKind::Y: t.y(g.q0); break;
        case GateKind::Z: t.z(g.q0); break;
        case GateKind::CZ: t.cz(g.q0, g.q1); break;
        case GateKind::CX: t.cx(g.q0, g.q1); break;
        case GateKind::Clifford2Q: apply_two_qubit_clifford(t, g.index, g.q0, g.q1); break;
    }
}

inline void check_gate_sites(const CliffordGate &g, size_t n_qubits) {
    if (g.q0 >= n_qubits || (g.two_qubit() && g.q1 >= n_qubits)) {
        fail(ErrorKind::IndexOutOfRange, "gate site outside register");
    }
    if (g.two_qubit() && g.q0 == g.q1) {
        fail(ErrorKind::PreconditionViolated, "two-qubit gate on a single site");
    }
    if (g.kind == GateKind::Clifford2Q && g.index >= kTwoQubitCliffordCount) {
        fail(ErrorKind::IndexOutOfRange, "two-qubit Clifford index " + std::to_string(g.index));
    }
}

inline CliffordGate sample_two_qubit_clifford(Rng &rng, uint32_t a, uint32_t b) {
    return CliffordGate::two_qubit_clifford(static_cast<uint16_t>(rng.below(kTwoQubitCliffordCount)), a, b);
}

}  // namespace lrsd

#endif
