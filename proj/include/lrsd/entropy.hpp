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
#ifndef LRSD_ENTROPY_HPP
#define LRSD_ENTROPY_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "lrsd/error.hpp"
#include "lrsd/f2.hpp"
#include "lrsd/graphstate.hpp"
#include "lrsd/lrsd.hpp"
#include "lrsd/rng.hpp"
#include "lrsd/tableau.hpp"

namespace lrsd {

using DenseMatrix = Eigen::MatrixXcd;

inline constexpr size_t kDefaultRegionCap = 14;

struct ReducedState {
    std::vector<size_t> region;  // region[k] is bit k of the dense basis index
    DenseMatrix rho;
};

namespace detail {

inline void check_region(size_t n, const std::vector<size_t> &region, size_t cap) {
    if (region.size() > cap) {
        fail(ErrorKind::RegionTooLarge,
             "region of " + std::to_string(region.size()) + " qubits exceeds cap " + std::to_string(cap));
    }
    std::vector<bool> seen(n, false);
    for (size_t q : region) {
        if (q >= n) {
            fail(ErrorKind::IndexOutOfRange, "region qubit " + std::to_string(q) + " out of range");
        }
        if (seen[q]) {
            fail(ErrorKind::PreconditionViolated, "duplicate qubit in region");
        }
        seen[q] = true;
    }
}

/// Left-multiplies m by the Pauli string restricted to the region.
/// Bits outside the region must be identity.
inline DenseMatrix apply_region_pauli(const PauliString &p, const std::vector<size_t> &region, const DenseMatrix &m,
                                      std::complex<double> scale) {
    uint64_t xm = 0, zm = 0;
    for (size_t k = 0; k < region.size(); k++) {
        xm |= uint64_t{p.x(region[k])} << k;
        zm |= uint64_t{p.z(region[k])} << k;
    }
    std::complex<double> base = scale * i_power(p.phase() + std::popcount(xm & zm));
    DenseMatrix out(m.rows(), m.cols());
    for (Eigen::Index b = 0; b < m.rows(); b++) {
        double s = (std::popcount(zm & static_cast<uint64_t>(b)) & 1) ? -1.0 : 1.0;
        out.row(static_cast<Eigen::Index>(static_cast<uint64_t>(b) ^ xm)) = (base * s) * m.row(b);
    }
    return out;
}

}  // namespace detail

/// Traces out every qubit outside , one column at a time. The
/// stabilizer generators are reduced on the traced column (at most two keep a
/// non-identity letter there); each logical string absorbs whichever product
/// of those generators clears the column, or drops out when none does.
inline ReducedState partial_trace(const LrsdState &s, const std::vector<size_t> &region,
                                  size_t cap = kDefaultRegionCap) {
    const size_t n = s.n_qubits();
    detail::check_region(n, region, cap);
    std::vector<bool> keep(n, false);
    for (size_t q : region) {
        keep[q] = true;
    }
    std::vector<PauliString> gens = s.tableau().stabilizers();
    std::vector<Term> terms = s.terms();

    for (size_t q = 0; q < n; q++) {
        if (keep[q]) {
            continue;
        }
        auto take_pivot = [&](auto pred) -> std::optional<PauliString> {
            for (size_t i = 0; i < gens.size(); i++) {
                if (pred(gens[i].letter(q))) {
                    PauliString g = gens[i];
                    gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(i));
                    return g;
                }
            }
            return std::nullopt;
        };
        std::optional<PauliString> g1 = take_pivot([](Letter a) { return a != Letter::I; });
        std::optional<PauliString> g2;
        if (g1) {
            Letter a = g1->letter(q);
            g2 = take_pivot([a](Letter b) { return b != Letter::I && b != a; });
            for (PauliString &g : gens) {
                Letter b = g.letter(q);
                if (b == Letter::I) {
                    continue;
                }
                if (b == a) {
                    g *= *g1;
                } else if (b == g2->letter(q)) {
                    g *= *g2;
                } else {
                    g *= *g1;
                    g *= *g2;
                }
            }
        }
        std::vector<Term> next;
        next.reserve(terms.size());
        for (Term &t : terms) {
            Letter b = t.pauli.letter(q);
            if (b != Letter::I) {
                if (!g1) {
                    continue;
                }
                if (b == g1->letter(q)) {
                    t.pauli *= *g1;
                } else if (!g2) {
                    continue;
                } else if (b == g2->letter(q)) {
                    t.pauli *= *g2;
                } else {
                    t.pauli *= *g1;
                    t.pauli *= *g2;
                }
            }
            next.push_back(std::move(t));
        }
        terms = std::move(next);
    }

    // rho_A = 2^{-|A|} (sum_l lambda_l sigma_l) (sum over the surviving group).
    Eigen::Index dim = Eigen::Index{1} << region.size();
    DenseMatrix group = DenseMatrix::Identity(dim, dim);
    for (const PauliString &g : gens) {
        group += detail::apply_region_pauli(g, region, group, 1.0);
    }
    DenseMatrix rho = DenseMatrix::Zero(dim, dim);
    for (const Term &t : terms) {
        rho += detail::apply_region_pauli(t.pauli, region, group, t.coefficient);
    }
    rho /= static_cast<double>(dim);
    return {region, std::move(rho)};
}

/// Renyi entropy in bits of a density matrix; order 1 is von Neumann.
inline double renyi_entropy(const DenseMatrix &rho, double order) {
    if (!(order >= 0)) {
        fail(ErrorKind::PreconditionViolated, "Renyi order must be non-negative");
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho, Eigen::EigenvaluesOnly);
    const auto &ev = es.eigenvalues();
    if (order == 0.0) {
        double rank = 0;
        for (Eigen::Index k = 0; k < ev.size(); k++) {
            rank += ev[k] >= 1e-12 ? 1 : 0;
        }
        return std::log2(rank);
    }
    double acc = 0;
    for (Eigen::Index k = 0; k < ev.size(); k++) {
        double p = ev[k];
        if (p < 1e-12) {
            continue;
        }
        acc += order == 1.0 ? -p * std::log2(p) : std::pow(p, order);
    }
    return order == 1.0 ? acc : std::log2(acc) / (1.0 - order);
}

inline double renyi_entropy(const LrsdState &s, const std::vector<size_t> &region, double order,
                            size_t cap = kDefaultRegionCap) {
    return renyi_entropy(partial_trace(s, region, cap).rho, order);
}

/// Generators of the subgroup of <gens> supported inside the region.
inline std::vector<PauliString> subgroup_on(const std::vector<PauliString> &gens, const std::vector<size_t> &region) {
    if (gens.empty()) {
        return {};
    }
    const size_t n = gens[0].n_qubits();
    std::vector<bool> in_a(n, false);
    for (size_t q : region) {
        in_a[q] = true;
    }
    std::vector<PauliString> rows = gens;
    size_t next = 0;
    for (size_t q = 0; q < n; q++) {
        if (in_a[q]) {
            continue;
        }
        for (int bit = 0; bit < 2; bit++) {
            auto has = [&](const PauliString &p) { return bit == 0 ? p.x(q) : p.z(q); };
            size_t piv = SIZE_MAX;
            for (size_t i = next; i < rows.size(); i++) {
                if (has(rows[i])) {
                    piv = i;
                    break;
                }
            }
            if (piv == SIZE_MAX) {
                continue;
            }
            std::swap(rows[next], rows[piv]);
            for (size_t i = next + 1; i < rows.size(); i++) {
                if (has(rows[i])) {
                    rows[i] *= rows[next];
                }
            }
            next++;
        }
    }
    return {rows.begin() + static_cast<std::ptrdiff_t>(next), rows.end()};
}

/// tr(rho_A^2) when every logical string commutes with the stabilizer group.
/// Each term sigma rho_S splits into +-(projected stabilizer state), so rho is
/// a signed mixture of stabilizer states whose pairwise reduced overlaps are
/// 2^{c - |A|} or zero.
inline double purity_commuting(const LrsdState &s, const std::vector<size_t> &region) {
    detail::check_region(s.n_qubits(), region, s.n_qubits());
    const StabilizerTableau &t = s.tableau();
    struct Piece {
        std::complex<double> weight;
        std::vector<PauliString> reduced;
    };
    std::vector<Piece> pieces;
    for (const Term &term : s.terms()) {
        for (const PauliString &g : t.stabilizers()) {
            if (anticommutes(term.pauli, g)) {
                fail(ErrorKind::PreconditionViolated, "logical string anticommutes with a stabilizer");
            }
        }
        PauliString sigma = term.pauli;
        std::complex<double> w = term.coefficient * i_power(sigma.phase());
        sigma.set_phase(0);
        if (sigma.is_identity()) {
            pieces.push_back({w, subgroup_on(t.stabilizers(), region)});
            continue;
        }
        Membership mem = t.membership(sigma);
        if (mem.kind == MembershipKind::InGroup) {
            pieces.push_back({w * static_cast<double>(mem.sign), subgroup_on(t.stabilizers(), region)});
            continue;
        }
        for (int outcome : {+1, -1}) {
            StabilizerTableau projected = t;
            MeasureResult r = projected.measure(sigma, outcome, nullptr);
            pieces.push_back({w * (outcome * r.probability), subgroup_on(projected.stabilizers(), region)});
        }
    }
    const size_t n = s.n_qubits();
    const int size_a = static_cast<int>(region.size());
    std::complex<double> acc = 0;
    for (size_t i = 0; i < pieces.size(); i++) {
        for (size_t j = i; j < pieces.size(); j++) {
            GroupIntersection gi = intersect_groups(n, pieces[i].reduced, pieces[j].reduced);
            if (gi.sign_conflict) {
                continue;
            }
            double overlap = std::ldexp(1.0, static_cast<int>(gi.dimension) - size_a);
            acc += (i == j ? 1.0 : 2.0) * pieces[i].weight * pieces[j].weight * overlap;
        }
    }
    return acc.real();
}

/// Von Neumann entropy between one qubit and the rest.
inline double ancilla_entropy(const LrsdState &s, size_t ancilla) {
    if (s.n_terms() == 1 && s.terms()[0].pauli.is_identity()) {
        return stabilizer_entropy(s.tableau(), {ancilla});
    }
    return renyi_entropy(s, {ancilla}, 1.0);
}

namespace detail {

/// Cut rank of the adjacency matrix between A (a_mask) and the rest of the cluster.
inline size_t cut_rank(const Graph &g, const std::vector<size_t> &members, uint64_t a_mask) {
    std::vector<uint64_t> rows;
    for (size_t i = 0; i < members.size(); i++) {
        if (!(a_mask >> i & 1)) {
            continue;
        }
        uint64_t row = 0;
        for (size_t j = 0; j < members.size(); j++) {
            if (!(a_mask >> j & 1) && g.adjacent(members[i], members[j])) {
                row |= uint64_t{1} << j;
            }
        }
        rows.push_back(row);
    }
    return rank_u64(std::move(rows));
}

inline size_t cut_rank_wide(const Graph &g, const std::vector<size_t> &members, const std::vector<bool> &in_a) {
    std::vector<BitRow> rows;
    size_t words = (members.size() + 63) / 64;
    for (size_t i = 0; i < members.size(); i++) {
        if (!in_a[i]) {
            continue;
        }
        BitRow row(words, 0);
        for (size_t j = 0; j < members.size(); j++) {
            if (!in_a[j] && g.adjacent(members[i], members[j])) {
                bit_set(row, j);
            }
        }
        rows.push_back(std::move(row));
    }
    return rank_rows(rows);
}

}  // namespace detail

inline constexpr size_t kExhaustiveClusterLimit = 20;
inline constexpr size_t kSampledBipartitions = 512;

/// Minimum entropy over balanced bipartitions (|A| = floor(|C|/2)) of one
/// cluster of a graph state. Exhaustive up to the limit, sampled above it
/// (or always, with force_sampled).
inline double min_bipartition_entropy(const Graph &g, const std::vector<size_t> &members, Rng &rng,
                                      bool force_sampled = false) {
    const size_t m = members.size();
    const size_t half = m / 2;
    if (half == 0) {
        return 0.0;
    }
    size_t best = half;
    if (m <= kExhaustiveClusterLimit && !force_sampled) {
        // Gosper's hack over half-size subsets; for even m, fixing member 0
        // in A visits each unordered bipartition once.
        uint64_t mask = (uint64_t{1} << half) - 1;
        const uint64_t limit = uint64_t{1} << m;
        while (mask < limit) {
            if (m % 2 == 1 || (mask & 1)) {
                best = std::min(best, detail::cut_rank(g, members, mask));
                if (best == 0) {
                    break;
                }
            }
            uint64_t c = mask & -mask;
            uint64_t r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
        return static_cast<double>(best);
    }
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t trial = 0; trial < kSampledBipartitions && best > 0; trial++) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        std::vector<bool> in_a(m, false);
        for (size_t k = 0; k < half; k++) {
            in_a[order[k]] = true;
        }
        best = std::min(best, detail::cut_rank_wide(g, members, in_a));
    }
    return static_cast<double>(best);
}

/// max over clusters of the min balanced-bipartition entropy. Stabilizer
/// states have a flat entanglement spectrum, so the Renyi order does not
/// change the value; the graph form preserves entropies because it differs
/// from the input only by local gates.
inline double max_min_entropy(const StabilizerTableau &t, const std::vector<std::vector<size_t>> &partition,
                              double order, uint64_t seed = 0) {
    if (!(order >= 0)) {
        fail(ErrorKind::PreconditionViolated, "Renyi order must be non-negative");
    }
    GraphForm form = to_graph_state(t);
    Rng rng(seed);
    double best = 0;
    for (const auto &c : partition) {
        best = std::max(best, min_bipartition_entropy(form.graph, c, rng));
    }
    return best;
}

inline double max_min_entropy(const StabilizerTableau &t, double order, uint64_t seed = 0) {
    GraphForm form = to_graph_state(t);
    return max_min_entropy(t, clusters(form.graph), order, seed);
}

}  // namespace lrsd

#endif
