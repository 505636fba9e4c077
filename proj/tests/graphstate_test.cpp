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
#include "lrsd/graphstate.hpp"
#include "test_util.hpp"

using namespace lrsd;
using namespace lrsd::testing;

namespace {

StabilizerTableau random_clustered_state(size_t n, Rng &rng, int steps, double p_measure) {
    StabilizerTableau t = StabilizerTableau::plus_state(n);
    for (int k = 0; k < steps; k++) {
        if (rng.uniform() < p_measure) {
            PauliString p = PauliString::single(n, rng.below(n), rng.coin() ? Letter::X : Letter::Z);
            t.measure(p, std::nullopt, &rng);
        } else {
            t.apply(random_gate(n, rng));
        }
    }
    return t;
}

void expect_graph_equivalent(const StabilizerTableau &t, const GraphForm &form) {
    StabilizerTableau moved = t;
    for (const CliffordGate &g : form.local_cliffords) {
        EXPECT_NE(g.two_qubit(), true);
        moved.apply(g);
    }
    const size_t n = t.n_qubits();
    for (size_t a = 0; a < n; a++) {
        PauliString g = PauliString::single(n, a, Letter::X);
        for (size_t b : form.graph.neighbors(a)) {
            g.set_letter(b, Letter::Z);
        }
        Membership m = moved.membership(g);
        ASSERT_EQ(m.kind, MembershipKind::InGroup);
        EXPECT_EQ(m.sign, 1);
    }
}

}  // namespace

TEST(graphstate, spec_examples) {
    GraphForm plus = to_graph_state(StabilizerTableau::plus_state(5));
    EXPECT_EQ(plus.graph.n_edges(), 0u);
    EXPECT_TRUE(plus.local_cliffords.empty());
    EXPECT_EQ(n_max(clusters(plus.graph)), 1u);

    StabilizerTableau chain = StabilizerTableau::plus_state(6);
    for (size_t q = 0; q + 1 < 6; q++) {
        chain.cz(q, q + 1);
    }
    GraphForm path = to_graph_state(chain);
    EXPECT_EQ(path.graph.n_edges(), 5u);
    for (size_t q = 0; q + 1 < 6; q++) {
        EXPECT_TRUE(path.graph.adjacent(q, q + 1));
    }
    EXPECT_EQ(n_max(clusters(path.graph)), 6u);
    EXPECT_EQ(path.graph.edge_list(), "6 5\n0 1\n1 2\n2 3\n3 4\n4 5\n");

    Graph triangles(6);
    for (size_t base : {0u, 3u}) {
        triangles.add_edge(base, base + 1);
        triangles.add_edge(base + 1, base + 2);
        triangles.add_edge(base, base + 2);
    }
    auto parts = clusters(triangles);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[0], (std::vector<size_t>{0, 1, 2}));
    EXPECT_EQ(parts[1], (std::vector<size_t>{3, 4, 5}));
    EXPECT_EQ(n_max(parts), 3u);
}

TEST(graphstate, errors) {
    StabilizerTableau mixed = StabilizerTableau::maximally_mixed(3);
    try {
        to_graph_state(mixed);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::MixedState);
    }
    LrsdState s = LrsdState::plus_state(2);
    s.apply_t(0);
    try {
        to_graph_state(s);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonStabilizer);
    }
    EXPECT_NO_THROW(to_graph_state(LrsdState::zero_state(3)));
}

TEST(graphstate, random_states_reach_canonical_form) {
    Rng rng(5);
    for (int trial = 0; trial < 200; trial++) {
        size_t n = 2 + rng.below(11);
        StabilizerTableau t = random_clustered_state(n, rng, static_cast<int>(rng.below(60)), rng.uniform() * 0.5);
        GraphForm form = to_graph_state(t);
        expect_graph_equivalent(t, form);
        // Deterministic output.
        GraphForm again = to_graph_state(t);
        EXPECT_EQ(again.graph.edge_list(), form.graph.edge_list());
    }
}

TEST(graphstate, clusters_carry_no_entanglement_between_them) {
    Rng rng(6);
    for (int trial = 0; trial < 100; trial++) {
        size_t n = 2 + rng.below(11);
        StabilizerTableau t = random_clustered_state(n, rng, 40, 0.4);
        GraphForm form = to_graph_state(t);
        auto parts = clusters(form.graph);
        std::vector<size_t> region;
        for (const auto &c : parts) {
            if (rng.coin()) {
                region.insert(region.end(), c.begin(), c.end());
            }
        }
        EXPECT_DOUBLE_EQ(stabilizer_entropy(t, region), 0.0);
        // Membership is invariant under the local reduction gates.
        StabilizerTableau moved = t;
        for (const CliffordGate &g : form.local_cliffords) {
            moved.apply(g);
        }
        EXPECT_EQ(clusters(to_graph_state(moved).graph), parts);
    }
}

TEST(graphstate, union_find) {
    UnionFind uf(6);
    uf.unite(0, 4);
    uf.unite(4, 5);
    uf.unite(1, 2);
    EXPECT_EQ(uf.find(5), uf.find(0));
    EXPECT_EQ(uf.find(1), uf.find(2));
    EXPECT_NE(uf.find(3), uf.find(0));
    EXPECT_NE(uf.find(1), uf.find(0));
}
