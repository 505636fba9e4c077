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
#include "lrsd/pauli.hpp"

#include <gtest/gtest.h>

#include "lrsd/tableau.hpp"
#include "test_util.hpp"

using namespace lrsd;
using lrsd::testing::random_pauli;

TEST(pauli, symplectic_product_examples) {
    EXPECT_EQ(symplectic_product(PauliString::from_text("XI"), PauliString::from_text("ZI")), 1);
    EXPECT_EQ(symplectic_product(PauliString::from_text("II"), PauliString::from_text("XY")), 0);
    EXPECT_EQ(symplectic_product(PauliString::from_text("YZ"), PauliString::from_text("XX")), 0);
    oracle::Mat a = oracle::pauli_matrix(PauliString::from_text("YZ"));
    oracle::Mat b = oracle::pauli_matrix(PauliString::from_text("XX"));
    EXPECT_LT((a * b - b * a).norm(), 1e-12);
}

TEST(pauli, multiply_examples) {
    PauliString xz = multiply(PauliString::from_text("X"), PauliString::from_text("Z"));
    EXPECT_EQ(xz.phase(), 3);
    EXPECT_EQ(xz.letter(0), Letter::Y);
    EXPECT_EQ(multiply(PauliString::from_text("X"), PauliString::from_text("X")), PauliString::from_text("I"));
    EXPECT_EQ(multiply(PauliString::from_text("XZ"), PauliString::from_text("ZZ")), PauliString::from_text("-iYI"));
}

TEST(pauli, substitute_site_examples) {
    EXPECT_EQ(substitute_site(PauliString::from_text("XX"), 1, Letter::Y), PauliString::from_text("XY"));
    EXPECT_EQ(substitute_site(PauliString::from_text("II"), 0, Letter::Z), PauliString::from_text("ZI"));
    EXPECT_EQ(substitute_site(PauliString::from_text("-YZ"), 0, Letter::I), PauliString::from_text("-IZ"));
    EXPECT_THROW(substitute_site(PauliString::from_text("XX"), 2, Letter::Y), Error);
}

TEST(pauli, length_mismatch_is_an_error) {
    try {
        symplectic_product(PauliString::from_text("X"), PauliString::from_text("XX"));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
    EXPECT_THROW(multiply(PauliString::from_text("X"), PauliString::from_text("XX")), Error);
}

TEST(pauli, text_round_trip) {
    for (const char *text : {"+XYZI", "-iZZ", "+iY", "-I"}) {
        EXPECT_EQ(PauliString::from_text(text).str(), text);
    }
    EXPECT_EQ(PauliString::from_text("XY").str(), "+XY");
    EXPECT_THROW(PauliString::from_text("XQ"), Error);
    EXPECT_THROW(PauliString::from_text("-"), Error);
}

TEST(pauli, products_match_dense_matrices) {
    Rng rng(11);
    for (int trial = 0; trial < 300; trial++) {
        size_t n = 1 + rng.below(4);
        PauliString a = random_pauli(n, rng, false);
        PauliString b = random_pauli(n, rng, false);
        PauliString c = random_pauli(n, rng, false);
        oracle::Mat ma = oracle::pauli_matrix(a), mb = oracle::pauli_matrix(b), mc = oracle::pauli_matrix(c);
        EXPECT_LT((oracle::pauli_matrix(multiply(a, b)) - ma * mb).norm(), 1e-12);
        EXPECT_EQ(multiply(multiply(a, b), c), multiply(a, multiply(b, c)));
        EXPECT_LT((oracle::pauli_matrix(multiply(multiply(a, b), c)) - ma * mb * mc).norm(), 1e-12);
        int s = symplectic_product(a, b);
        EXPECT_EQ(s, symplectic_product(b, a));
        EXPECT_EQ(symplectic_product(a, a), 0);
        PauliString ab = multiply(a, b), ba = multiply(b, a);
        EXPECT_TRUE(ab.same_letters(ba));
        EXPECT_EQ((ab.phase() - ba.phase()) & 3, s ? 2 : 0);
        EXPECT_EQ(s == 1, (ma * mb + mb * ma).norm() < 1e-12);
    }
}

TEST(pauli, wide_strings_cross_word_boundaries) {
    Rng rng(5);
    for (int trial = 0; trial < 50; trial++) {
        size_t n = 60 + rng.below(80);
        PauliString a = random_pauli(n, rng, false), b = random_pauli(n, rng, false);
        // Site-by-site reference for the phase and the commutation parity.
        int phase = a.phase() + b.phase();
        int anti = 0;
        for (size_t q = 0; q < n; q++) {
            Letter la = a.letter(q), lb = b.letter(q);
            if (la == Letter::I || lb == Letter::I || la == lb) continue;
            anti ^= 1;
            bool cyclic = (la == Letter::X && lb == Letter::Y) || (la == Letter::Y && lb == Letter::Z) ||
                          (la == Letter::Z && lb == Letter::X);
            phase += cyclic ? 1 : 3;
        }
        EXPECT_EQ(multiply(a, b).phase(), phase & 3);
        EXPECT_EQ(symplectic_product(a, b), anti);
    }
}

TEST(pauli, conjugation_rules_match_dense_unitaries) {
    Rng rng(3);
    const size_t n = 3;
    for (int trial = 0; trial < 400; trial++) {
        CliffordGate g = lrsd::testing::random_gate(n, rng);
        if (g.kind == GateKind::Clifford2Q) continue;
        PauliString p = random_pauli(n, rng);
        PauliString q = p;
        conjugate(q, g);
        oracle::Mat u = lrsd::testing::gate_unitary(n, g);
        oracle::Mat expected = u * oracle::pauli_matrix(p) * u.adjoint();
        EXPECT_LT((oracle::pauli_matrix(q) - expected).norm(), 1e-12) << p << " gate " << int(g.kind);
    }
}
