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

#include "lrsd/entropy.hpp"
#include "test_util.hpp"

using namespace lrsd;
using namespace lrsd::testing;

namespace {

LrsdState bell_pair() {
    LrsdState s = LrsdState::zero_state(2);
    s.h(0);
    s.cx(0, 1);
    return s;
}

std::vector<size_t> random_region(size_t n, Rng &rng) {
    std::vector<size_t> region;
    for (size_t q = 0; q < n; q++) {
        if (rng.coin()) {
            region.push_back(q);
        }
    }
    std::shuffle(region.begin(), region.end(), rng.engine());
    return region;
}

}  // namespace

TEST(entropy, partial_trace_examples) {
    ReducedState bell = partial_trace(bell_pair(), {1});
    EXPECT_LT(max_abs_diff(bell.rho, DenseMatrix::Identity(2, 2) / 2.0), 1e-12);

    LrsdState prod = LrsdState::zero_state(2);
    prod.h(1);
    ReducedState plus = partial_trace(prod, {1});
    DenseMatrix expect = DenseMatrix::Constant(2, 2, 0.5);
    EXPECT_LT(max_abs_diff(plus.rho, expect), 1e-12);

    LrsdState t_plus = LrsdState::zero_state(2);
    t_plus.h(0);
    t_plus.apply_t(0);
    oracle::StateVector v = oracle::StateVector::zero(2);
    v.h(0);
    v.t(0);
    ReducedState red = partial_trace(t_plus, {0});
    EXPECT_LT(max_abs_diff(red.rho, oracle::partial_trace(v.density(), 2, {0})), 1e-10);
}

TEST(entropy, region_checks) {
    LrsdState s = LrsdState::plus_state(4);
    try {
        partial_trace(s, {0, 1, 2}, 2);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::RegionTooLarge);
    }
    EXPECT_THROW(partial_trace(s, {0, 7}), Error);
    EXPECT_THROW(partial_trace(s, {1, 1}), Error);
    ReducedState empty = partial_trace(s, {});
    EXPECT_NEAR(empty.rho(0, 0).real(), 1.0, 1e-12);
}

TEST(entropy, partial_trace_matches_dense) {
    Rng rng(31);
    for (int trial = 0; trial < 150; trial++) {
        size_t n = 2 + rng.below(5);
        bool mixed = trial % 3 == 0;
        LrsdState s = random_lrsd(n, rng, 40, mixed);
        std::vector<size_t> region = random_region(n, rng);
        ReducedState red = partial_trace(s, region);
        oracle::Mat dense = oracle::partial_trace(oracle::assemble(s), n, region);
        ASSERT_LT(max_abs_diff(red.rho, dense), 1e-10) << "trial " << trial;
        EXPECT_NEAR(red.rho.trace().real(), 1.0, 1e-9);
        EXPECT_LT(max_abs_diff(red.rho, red.rho.adjoint()), 1e-10);
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(red.rho);
        EXPECT_GT(es.eigenvalues().minCoeff(), -1e-9);
    }
}

TEST(entropy, renyi_examples) {
    for (double order : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        EXPECT_NEAR(renyi_entropy(bell_pair(), {0}, order), 1.0, 1e-12);
        EXPECT_NEAR(renyi_entropy(LrsdState::plus_state(3), {0, 2}, order), 0.0, 1e-12);
    }
    EXPECT_THROW(renyi_entropy(bell_pair(), {0}, -1.0), Error);
}

TEST(entropy, renyi_matches_oracle_and_is_monotone) {
    Rng rng(32);
    for (int trial = 0; trial < 40; trial++) {
        const size_t n = 6;
        LrsdState s = random_lrsd(n, rng, 60);
        std::vector<size_t> region = random_region(n, rng);
        oracle::Mat dense = oracle::partial_trace(oracle::assemble(s), n, region);
        double previous = 1e300;
        for (double order : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
            double value = renyi_entropy(s, region, order);
            if (order >= 1.0) {
                EXPECT_NEAR(value, oracle::renyi_entropy(dense, order), 1e-8);
            }
            EXPECT_LE(value, previous + 1e-9);
            previous = value;
        }
    }
}

TEST(entropy, purity_commuting_examples) {
    Rng rng(33);
    StabilizerTableau ghz = StabilizerTableau::zero_state(4);
    ghz.h(0);
    for (size_t q = 1; q < 4; q++) {
        ghz.cx(0, q);
    }
    EXPECT_NEAR(purity_commuting(LrsdState(ghz), {0, 1}), std::pow(2.0, -stabilizer_entropy(ghz, {0, 1})), 1e-12);

    LrsdState two = LrsdState::plus_state(4);
    two.cz(0, 1);
    two.cz(1, 2);
    two.apply_t(2);
    two.cz(2, 3);
    ASSERT_GE(two.n_terms(), 2u);
    oracle::Mat dense = oracle::partial_trace(oracle::assemble(two), 4, {0, 3});
    EXPECT_NEAR(purity_commuting(two, {0, 3}), (dense * dense).trace().real(), 1e-10);

    LrsdState bad = LrsdState::from_parts(StabilizerTableau::zero_state(2),
                                          {{1.0, PauliString(2)}, {0.1, PauliString::from_text("XI")}});
    try {
        purity_commuting(bad, {0});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolated);
    }
}

TEST(entropy, purity_commuting_matches_dense_path) {
    Rng rng(34);
    for (int trial = 0; trial < 60; trial++) {
        size_t n = 2 + rng.below(5);
        LrsdState s = random_lrsd(n, rng, 40, trial % 2 == 0);
        std::vector<size_t> region = random_region(n, rng);
        DenseMatrix rho = partial_trace(s, region).rho;
        EXPECT_NEAR(purity_commuting(s, region), (rho * rho).trace().real(), 1e-10) << "trial " << trial;
    }
}

TEST(entropy, ancilla_entropy_examples) {
    EXPECT_NEAR(ancilla_entropy(bell_pair(), 1), 1.0, 1e-12);
    LrsdState purified = bell_pair();
    purified.measure(PauliString::from_text("ZI"), 1, nullptr);
    EXPECT_NEAR(ancilla_entropy(purified, 1), 0.0, 1e-12);

    Rng rng(35);
    const size_t n = 16;
    LrsdState s = LrsdState::zero_state(n);
    s.h(0);
    s.cx(0, n - 1);
    for (int k = 0; k < 200; k++) {
        auto [a, b] = rng.distinct_pair(n - 1);
        s.apply_clifford(sample_two_qubit_clifford(rng, a, b));
    }
    double by_rank = stabilizer_entropy(s.tableau(), {n - 1});
    EXPECT_NEAR(ancilla_entropy(s, n - 1), by_rank, 1e-12);
    EXPECT_NEAR(renyi_entropy(s, {n - 1}, 1.0), by_rank, 1e-10);
}

TEST(entropy, max_min_examples) {
    EXPECT_EQ(max_min_entropy(StabilizerTableau::plus_state(6), 1.0), 0.0);
    for (size_t n : {2u, 5u, 8u}) {
        StabilizerTableau ghz = StabilizerTableau::zero_state(n);
        ghz.h(0);
        for (size_t q = 1; q < n; q++) {
            ghz.cx(0, q);
        }
        EXPECT_EQ(max_min_entropy(ghz, 2.0), 1.0);
    }
}

TEST(entropy, max_min_matches_brute_force) {
    Rng rng(36);
    for (int trial = 0; trial < 60; trial++) {
        size_t n = 2 + rng.below(9);
        StabilizerTableau t = StabilizerTableau::plus_state(n);
        for (int k = 0; k < 30; k++) {
            if (rng.uniform() < 0.2) {
                t.measure(PauliString::single(n, rng.below(n), Letter::Z), std::nullopt, &rng);
            } else {
                t.apply(random_gate(n, rng));
            }
        }
        auto parts = clusters(to_graph_state(t).graph);
        double brute = 0;
        for (const auto &c : parts) {
            size_t half = c.size() / 2;
            double best = static_cast<double>(half);
            for (uint64_t mask = 0; mask < (uint64_t{1} << c.size()); mask++) {
                if (static_cast<size_t>(std::popcount(mask)) != half) continue;
                std::vector<size_t> region;
                for (size_t i = 0; i < c.size(); i++) {
                    if (mask >> i & 1) region.push_back(c[i]);
                }
                best = std::min(best, stabilizer_entropy(t, region));
            }
            brute = std::max(brute, best);
        }
        double value = max_min_entropy(t, parts, 1.0);
        EXPECT_EQ(value, brute);
        EXPECT_LE(value, static_cast<double>(n_max(parts)) / 2.0);
    }
}

TEST(entropy, sampled_minimization_agrees_with_exhaustive) {
    Rng rng(37);
    for (int trial = 0; trial < 30; trial++) {
        size_t n = 4 + rng.below(7);
        StabilizerTableau t = StabilizerTableau::plus_state(n);
        for (int k = 0; k < 40; k++) {
            t.apply(random_gate(n, rng));
        }
        Graph g = to_graph_state(t).graph;
        std::vector<size_t> all(n);
        std::iota(all.begin(), all.end(), size_t{0});
        Rng a(1), b(2);
        EXPECT_EQ(min_bipartition_entropy(g, all, a, false), min_bipartition_entropy(g, all, b, true));
    }
    // Above the exhaustive limit only the bound is checkable.
    const size_t n = 30;
    StabilizerTableau t = StabilizerTableau::plus_state(n);
    for (int k = 0; k < 400; k++) {
        auto [x, y] = rng.distinct_pair(n);
        t.apply(sample_two_qubit_clifford(rng, x, y));
    }
    double value = max_min_entropy(t, 1.0, 9);
    EXPECT_LE(value, 15.0);
    EXPECT_GE(value, 10.0);
}
