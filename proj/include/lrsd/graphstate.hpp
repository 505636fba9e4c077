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
#ifndef LRSD_GRAPHSTATE_HPP
#define LRSD_GRAPHSTATE_HPP

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lrsd/error.hpp"
#include "lrsd/f2.hpp"
#include "lrsd/lrsd.hpp"
#include "lrsd/tableau.hpp"

namespace lrsd {

/// Simple undirected graph with bit-packed adjacency rows.
class Graph {
   public:
    Graph() = default;
    explicit Graph(size_t n) : n_(n), rows_(n, BitRow((n + 63) / 64, 0)) {
    }

    size_t n_vertices() const {
        return n_;
    }
    bool adjacent(size_t a, size_t b) const {
        return bit_get(rows_[a], b);
    }
    void add_edge(size_t a, size_t b) {
        if (a == b) {
            fail(ErrorKind::PreconditionViolated, "self-loop");
        }
        bit_set(rows_[a], b);
        bit_set(rows_[b], a);
    }
    const BitRow &row(size_t a) const {
        return rows_[a];
    }
    std::vector<size_t> neighbors(size_t a) const {
        std::vector<size_t> out;
        for (size_t b = 0; b < n_; b++) {
            if (adjacent(a, b)) {
                out.push_back(b);
            }
        }
        return out;
    }
    size_t n_edges() const {
        size_t e = 0;
        for (const BitRow &r : rows_) {
            for (uint64_t w : r) {
                e += std::popcount(w);
            }
        }
        return e / 2;
    }

    /// "n_vertices n_edges" header followed by one "a b" line per edge (a < b).
    std::string edge_list() const {
        std::ostringstream out;
        out << n_ << ' ' << n_edges() << '\n';
        for (size_t a = 0; a < n_; a++) {
            for (size_t b = a + 1; b < n_; b++) {
                if (adjacent(a, b)) {
                    out << a << ' ' << b << '\n';
                }
            }
        }
        return out.str();
    }

   private:
    size_t n_ = 0;
    std::vector<BitRow> rows_;
};

class UnionFind {
   public:
    explicit UnionFind(size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), size_t{0});
    }
    size_t find(size_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (size_[a] < size_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        size_[a] += size_[b];
    }

   private:
    std::vector<size_t> parent_;
    std::vector<size_t> size_;
};

/// Connected components, each sorted, ordered by smallest member.
inline std::vector<std::vector<size_t>> clusters(const Graph &g) {
    UnionFind uf(g.n_vertices());
    for (size_t a = 0; a < g.n_vertices(); a++) {
        for (size_t b = a + 1; b < g.n_vertices(); b++) {
            if (g.adjacent(a, b)) {
                uf.unite(a, b);
            }
        }
    }
    std::vector<std::vector<size_t>> by_root(g.n_vertices());
    for (size_t a = 0; a < g.n_vertices(); a++) {
        by_root[uf.find(a)].push_back(a);
    }
    std::vector<std::vector<size_t>> out;
    for (auto &c : by_root) {
        if (!c.empty()) {
            out.push_back(std::move(c));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.front() < b.front(); });
    return out;
}

inline size_t n_max(const std::vector<std::vector<size_t>> &partition) {
    size_t best = 0;
    for (const auto &c : partition) {
        best = std::max(best, c.size());
    }
    return best;
}

struct GraphForm {
    Graph graph;
    /// Local gates that map the input state onto the graph state |G>.
    std::vector<CliffordGate> local_cliffords;
};

/// Local-Clifford reduction of a pure stabilizer state to a graph state.
inline GraphForm to_graph_state(const StabilizerTableau &t) {
    if (!t.is_pure()) {
        fail(ErrorKind::MixedState, "graph form needs a pure state");
    }
    const size_t n = t.n_qubits();
    std::vector<PauliString> rows = t.stabilizers();
    GraphForm out{Graph(n), {}};

    // Pass 1: row-reduce the X block; columns without a pivot get a Hadamard.
    size_t next = 0;
    std::vector<bool> pivoted(n, false);
    auto eliminate_x = [&](size_t col) {
        size_t piv = SIZE_MAX;
        for (size_t i = next; i < n; i++) {
            if (rows[i].x(col)) {
                piv = i;
                break;
            }
        }
        if (piv == SIZE_MAX) {
            return false;
        }
        std::swap(rows[next], rows[piv]);
        for (size_t i = 0; i < n; i++) {
            if (i != next && rows[i].x(col)) {
                rows[i] *= rows[next];
            }
        }
        next++;
        return true;
    };
    for (size_t col = 0; col < n; col++) {
        pivoted[col] = eliminate_x(col);
    }
    for (size_t col = 0; col < n; col++) {
        if (!pivoted[col]) {
            out.local_cliffords.push_back(CliffordGate::h(static_cast<uint32_t>(col)));
            for (PauliString &r : rows) {
                r.conjugate_h(col);
            }
        }
    }
    // Pass 2: the X block now has full rank; reduce it to the identity with
    // row i pivoting on column i.
    next = 0;
    for (size_t col = 0; col < n; col++) {
        if (!eliminate_x(col)) {
            fail(ErrorKind::PreconditionViolated, "X block is rank deficient after Hadamards");
        }
    }
    for (size_t q = 0; q < n; q++) {
        if (rows[q].z(q)) {
            out.local_cliffords.push_back({GateKind::Sdg, static_cast<uint32_t>(q)});
            for (PauliString &r : rows) {
                r.conjugate_sdg(q);
            }
        }
    }
    for (size_t q = 0; q < n; q++) {
        if (rows[q].phase() != 0) {
            out.local_cliffords.push_back({GateKind::Z, static_cast<uint32_t>(q)});
            for (PauliString &r : rows) {
                r.conjugate_z(q);
            }
        }
    }
    for (size_t a = 0; a < n; a++) {
        for (size_t b = a + 1; b < n; b++) {
            if (rows[a].z(b) != rows[b].z(a)) {
                fail(ErrorKind::PreconditionViolated, "graph adjacency is not symmetric");
            }
            if (rows[a].z(b)) {
                out.graph.add_edge(a, b);
            }
        }
    }
    // Final verification against the canonical generators X_i Z_N(i).
    for (size_t a = 0; a < n; a++) {
        PauliString expected = PauliString::single(n, a, Letter::X);
        for (size_t b : out.graph.neighbors(a)) {
            expected.set_letter(b, Letter::Z);
        }
        if (rows[a] != expected) {
            fail(ErrorKind::PreconditionViolated, "graph canonical form verification failed at row " + std::to_string(a));
        }
    }
    return out;
}

inline GraphForm to_graph_state(const LrsdState &s) {
    if (s.n_terms() != 1 || !s.terms()[0].pauli.is_identity()) {
        fail(ErrorKind::NonStabilizer, "graph form exists only for stabilizer states");
    }
    return to_graph_state(s.tableau());
}

}  // namespace lrsd

#endif
