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
#include <gtest/gtest.h>

#include <numeric>

#include "lrsd/oracle.hpp"
#include "test_util.hpp"

using namespace lrsd;
using namespace lrsd::testing;

namespace {

constexpr double kR = 0.70710678118654752440;

}  // namespace

TEST(oracle, evolve_examples) {
    oracle::Evolution e = oracle::evolve(1, {oracle::Op::clifford(CliffordGate::h(0))}, false);
    EXPECT_NEAR(std::abs(e.state.amplitudes()[0] - kR), 0, 1e-12);
    EXPECT_NEAR(std::abs(e.state.amplitudes()[1] - kR), 0, 1e-12);

    e = oracle::evolve(1, {oracle::Op::t_gate(0)});
    EXPECT_NEAR(std::abs(e.state.amplitudes()[0] - kR), 0, 1e-12);
    EXPECT_NEAR(std::abs(e.state.amplitudes()[1] - std::polar(kR, M_PI / 4)), 0, 1e-12);

    e = oracle::evolve(2, {oracle::Op::clifford(CliffordGate::cz(0, 1))});
    std::vector<double> want = {0.5, 0.5, 0.5, -0.5};
    for (int b = 0; b < 4; b++) EXPECT_NEAR(std::abs(e.state.amplitudes()[b] - want[b]), 0, 1e-12);

    // Forced measurement records its probability and renormalizes.
    e = oracle::evolve(1, {oracle::Op::t_gate(0), oracle::Op::measure(PauliString::single(1, 0, Letter::X), +1)});
    ASSERT_EQ(e.probabilities.size(), 1u);
    EXPECT_NEAR(e.probabilities[0], std::pow(std::cos(M_PI / 8), 2), 1e-12);
    EXPECT_NEAR(e.state.amplitudes().norm(), 1.0, 1e-12);

    EXPECT_THROW(oracle::evolve(1, {oracle::Op::measure(PauliString::single(1, 0, Letter::X), -1)}), Error);
}

// Y sign, S phase and CZ phase shared by both engines.
TEST(oracle, convention_vectors) {
    oracle::StateVector v(1);
    v.y(0);
    EXPECT_NEAR(std::abs(v.amplitudes()[1] - oracle::cplx(0, 1)), 0, 1e-12);

    LrsdState s = LrsdState::plus_state(1);
    s.s(0);
    oracle::StateVector w = oracle::StateVector::plus(1);
    w.s(0);
    EXPECT_NEAR(w.expectation(PauliString::single(1, 0, Letter::Y)), 1.0, 1e-12);
    EXPECT_NEAR(s.born_probability(PauliString::single(1, 0, Letter::Y)), 1.0, 1e-12);

    LrsdState c = LrsdState::plus_state(2);
    c.cz(0, 1);
    PauliString xz = PauliString::from_text("XZ");
    EXPECT_NEAR(c.born_probability(xz), 1.0, 1e-12);
    oracle::StateVector cv = oracle::evolve(2, {oracle::Op::clifford(CliffordGate::cz(0, 1))}).state;
    EXPECT_NEAR(cv.expectation(xz), 1.0, 1e-12);
    EXPECT_LT(max_abs_diff(oracle::assemble(c), cv.density()), 1e-12);
}

TEST(oracle, exact_nullity_examples) {
    Rng rng(3);
    for (int k = 0; k < 5; k++) {
        size_t n = 2 + rng.below(3);
        oracle::StateVector v = oracle::StateVector::plus(n);
        for (int g = 0; g < 20; g++) v.apply(random_gate(n, rng));
        EXPECT_EQ(oracle::exact_nullity(v), 0);
    }
    EXPECT_EQ(oracle::exact_nullity(oracle::evolve(1, {oracle::Op::t_gate(0)}).state), 1);
    EXPECT_EQ(oracle::exact_nullity(oracle::evolve(2, {oracle::Op::t_gate(0), oracle::Op::t_gate(1)}).state), 2);
    EXPECT_THROW(oracle::exact_nullity(oracle::StateVector::plus(7)), Error);
}

TEST(oracle, bell_distribution_examples) {
    Rng rng(4);
    for (int k = 0; k < 5; k++) {
        size_t n = 2 + rng.below(3);
        oracle::StateVector v = oracle::StateVector::plus(n);
        for (int g = 0; g < 20; g++) v.apply(random_gate(n, rng));
        std::vector<double> p = oracle::bell_distribution(v);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-10);
        // Uniform on 2^n strings: one coset of the stabilizer group.
        size_t support = 0;
        std::vector<uint64_t> members;
        for (uint64_t r = 0; r < p.size(); r++) {
            if (p[r] > 1e-12) {
                EXPECT_NEAR(p[r], std::ldexp(1.0, -int(n)), 1e-10);
                support++;
                members.push_back(r);
            }
        }
        EXPECT_EQ(support, size_t{1} << n);
        // Closed under differences: r1 ^ r2 ^ r3 stays in the support.
        for (int t = 0; t < 20; t++) {
            uint64_t a = members[rng.below(members.size())], b = members[rng.below(members.size())],
                     c = members[rng.below(members.size())];
            EXPECT_GT(p[a ^ b ^ c], 1e-12);
        }
    }
    oracle::StateVector t = oracle::evolve(1, {oracle::Op::t_gate(0)}).state;
    std::vector<double> p = oracle::bell_distribution(t);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-10);
    size_t support = 0;
    for (double v : p) support += v > 1e-12;
    EXPECT_GT(support, 2u);
}

TEST(oracle, compare_fresh_state_is_exact) {
    Rng rng(1);
    for (size_t n : {1, 3, 6}) {
        oracle::CompareReport r = oracle::compare(LrsdState::plus_state(n), oracle::StateVector::plus(n), rng);
        EXPECT_TRUE(r.pass()) << r.str();
        EXPECT_LT(r.density_diff, 1e-15);
        EXPECT_LT(r.probability_diff, 1e-15);
        EXPECT_LT(r.entropy_diff, 1e-12);
    }
}

TEST(oracle, compare_random_circuits) {
    Rng rng(77);
    for (int trial = 0; trial < 12; trial++) {
        size_t n = 2 + rng.below(5);
        auto ops = oracle::random_circuit(n, 4 * n * n, rng);
        LrsdState s = LrsdState::plus_state(n);
        for (const auto &op : ops) oracle::apply_op(s, op);
        oracle::Evolution e = oracle::evolve(n, ops);
        oracle::CompareReport r = oracle::compare(s, e.state, rng);
        EXPECT_TRUE(r.pass()) << "trial " << trial << ": " << r.str();
    }
}

TEST(oracle, compare_flags_corruption) {
    Rng rng(9);
    LrsdState s = LrsdState::plus_state(3);
    s.apply_t(0);
    s.apply_t(1);
    oracle::StateVector v = oracle::evolve(3, {oracle::Op::t_gate(0), oracle::Op::t_gate(1)}).state;
    ASSERT_TRUE(oracle::compare(s, v, rng).pass());

    std::vector<Term> terms = s.terms();
    ASSERT_GT(terms.size(), 1u);
    terms[1].coefficient *= 1.01;
    LrsdState bad = LrsdState::from_parts(s.tableau(), terms);
    oracle::CompareReport r = oracle::compare(bad, v, rng);
    EXPECT_FALSE(r.pass());
    EXPECT_FALSE(r.density_ok());

    // Sign error in CZ conjugation on the symbolic side. A single circuit can
    // hide it (a later Z measurement absorbs the flip), so count detections.
    size_t failures = 0;
    for (int trial = 0; trial < 5; trial++) {
        auto ops = oracle::random_circuit(4, 40, rng);
        LrsdState f = LrsdState::plus_state(4);
        bool ok = true;
        try {
            for (const auto &op : ops) oracle::apply_op(f, op, oracle::Fault::CzSign);
            ok = oracle::compare(f, oracle::evolve(4, ops).state, rng).pass();
        } catch (const Error &) {
            ok = false;  // a forced branch became impossible
        }
        failures += !ok;
    }
    EXPECT_GE(failures, 3u);
}
