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
#ifndef LRSD_TABLEAU_HPP
#define LRSD_TABLEAU_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lrsd/error.hpp"
#include "lrsd/f2.hpp"
#include "lrsd/gates.hpp"
#include "lrsd/pauli.hpp"
#include "lrsd/rng.hpp"

namespace lrsd {

namespace detail {

struct PauliConjugator {
    PauliString &p;
    void h(size_t q) { p.conjugate_h(q); }
    void s(size_t q) { p.conjugate_s(q); }
    void sdg(size_t q) { p.conjugate_sdg(q); }
    void x(size_t q) { p.conjugate_x(q); }
    void y(size_t q) { p.conjugate_y(q); }
    void z(size_t q) { p.conjugate_z(q); }
    void cz(size_t a, size_t b) { p.conjugate_cz(a, b); }
    void cx(size_t c, size_t t) { p.conjugate_cx(c, t); }
};

}  // namespace detail

/// p <- g p g^dagger.
inline void conjugate(PauliString &p, const CliffordGate &g) {
    detail::PauliConjugator c{p};
    apply_gate(c, g);
}

enum class MembershipKind { InGroup, CommutesOutside, Anticommutes };

struct Membership {
    MembershipKind kind;
    int sign = 0;  // eigenvalue of P on the state when kind == InGroup
};

struct MeasureResult {
    int outcome;
    double probability;
    int branch;  // 1: random with pivot stabilizer, 2: deterministic, 3: random via logical
};

/// Mixed stabilizer state with r stabilizer/destabilizer pairs and L - r
/// explicit logical pairs.
class StabilizerTableau {
   public:
    StabilizerTableau() = default;

    static StabilizerTableau maximally_mixed(size_t n) {
        StabilizerTableau t;
        t.n_ = n;
        for (size_t q = 0; q < n; q++) {
            t.logical_x_.push_back(PauliString::single(n, q, Letter::X));
            t.logical_z_.push_back(PauliString::single(n, q, Letter::Z));
        }
        return t;
    }

    static StabilizerTableau zero_state(size_t n) {
        StabilizerTableau t;
        t.n_ = n;
        for (size_t q = 0; q < n; q++) {
            t.stabilizers_.push_back(PauliString::single(n, q, Letter::Z));
            t.destabilizers_.push_back(PauliString::single(n, q, Letter::X));
        }
        return t;
    }

    static StabilizerTableau plus_state(size_t n) {
        StabilizerTableau t = zero_state(n);
        for (size_t q = 0; q < n; q++) {
            t.h(q);
        }
        return t;
    }

    /// Builds the state stabilized by the given commuting, independent,
    /// Hermitian generators (signs included). Remaining freedom becomes logical
    /// pairs.
    static StabilizerTableau from_generators(size_t n, const std::vector<PauliString> &generators) {
        StabilizerTableau t = maximally_mixed(n);
        for (const PauliString &g : generators) {
            if (g.n_qubits() != n || !g.is_hermitian()) {
                fail(ErrorKind::PreconditionViolated, "generator " + g.str() + " is not a Hermitian " +
                                                          std::to_string(n) + "-qubit string");
            }
            Membership m = t.membership(g);
            if (m.kind != MembershipKind::CommutesOutside) {
                fail(ErrorKind::PreconditionViolated, "generator " + g.str() + " is dependent or anticommuting");
            }
            t.measure(g, +1, nullptr);
        }
        return t;
    }

    /// Assembles a tableau from explicit rows without checks (checkpoint loading).
    static StabilizerTableau from_rows(size_t n, std::vector<PauliString> stabilizers,
                                       std::vector<PauliString> destabilizers, std::vector<PauliString> logical_x,
                                       std::vector<PauliString> logical_z) {
        StabilizerTableau t;
        t.n_ = n;
        t.stabilizers_ = std::move(stabilizers);
        t.destabilizers_ = std::move(destabilizers);
        t.logical_x_ = std::move(logical_x);
        t.logical_z_ = std::move(logical_z);
        return t;
    }

    size_t n_qubits() const {
        return n_;
    }
    size_t rank() const {
        return stabilizers_.size();
    }
    bool is_pure() const {
        return stabilizers_.size() == n_;
    }
    const std::vector<PauliString> &stabilizers() const {
        return stabilizers_;
    }
    const std::vector<PauliString> &destabilizers() const {
        return destabilizers_;
    }
    const std::vector<PauliString> &logical_x() const {
        return logical_x_;
    }
    const std::vector<PauliString> &logical_z() const {
        return logical_z_;
    }

    template <typename F>
    void for_each_row(F &&f) {
        for (auto &p : stabilizers_) f(p);
        for (auto &p : destabilizers_) f(p);
        for (auto &p : logical_x_) f(p);
        for (auto &p : logical_z_) f(p);
    }

    void h(size_t q) {
        for_each_row([q](PauliString &p) { p.conjugate_h(q); });
    }
    void s(size_t q) {
        for_each_row([q](PauliString &p) { p.conjugate_s(q); });
    }
    void sdg(size_t q) {
        for_each_row([q](PauliString &p) { p.conjugate_sdg(q); });
    }
    void x(size_t q) {
        for_each_row([q](PauliString &p) { p.conjugate_x(q); });
    }
    void y(size_t q) {
        for_each_row([q](PauliString &p) { p.conjugate_y(q); });
    }
    void z(size_t q) {
        for_each_row([q](PauliString &p) { p.conjugate_z(q); });
    }
    void cz(size_t a, size_t b) {
        for_each_row([a, b](PauliString &p) { p.conjugate_cz(a, b); });
    }
    void cx(size_t c, size_t t) {
        for_each_row([c, t](PauliString &p) { p.conjugate_cx(c, t); });
    }

    void apply(const CliffordGate &g) {
        check_gate_sites(g, n_);
        apply_gate(*this, g);
    }

    Membership membership(const PauliString &p) const {
        check_operand(p);
        for (const PauliString &g : stabilizers_) {
            if (anticommutes(g, p)) {
                return {MembershipKind::Anticommutes};
            }
        }
        PauliString product(n_);
        for (size_t i = 0; i < stabilizers_.size(); i++) {
            if (anticommutes(destabilizers_[i], p)) {
                product *= stabilizers_[i];
            }
        }
        if (!product.same_letters(p)) {
            return {MembershipKind::CommutesOutside};
        }
        // product = (+-1) * letters(P) and P = (+-1) * letters(P).
        return {MembershipKind::InGroup, product.phase() == p.phase() ? +1 : -1};
    }

    /// tr(P rho_S) for Hermitian P: +-1 when P is in the group up to sign, else 0.
    double expectation(const PauliString &p) const {
        Membership m = membership(p);
        return m.kind == MembershipKind::InGroup ? m.sign : 0.0;
    }

    /// Projective measurement of Hermitian P. With `forced` the named branch is
    /// taken; otherwise `rng` decides random outcomes.
    MeasureResult measure(const PauliString &p, std::optional<int> forced, Rng *rng) {
        check_operand(p);
        if (forced && *forced != 1 && *forced != -1) {
            fail(ErrorKind::PreconditionViolated, "forced outcome must be +1 or -1");
        }
        size_t pivot = SIZE_MAX;
        for (size_t i = 0; i < stabilizers_.size(); i++) {
            if (anticommutes(stabilizers_[i], p)) {
                pivot = i;
                break;
            }
        }
        if (pivot != SIZE_MAX) {
            int outcome = pick_outcome(forced, rng);
            const PauliString g = stabilizers_[pivot];
            for (size_t i = pivot + 1; i < stabilizers_.size(); i++) {
                if (anticommutes(stabilizers_[i], p)) {
                    stabilizers_[i] *= g;
                }
            }
            for (size_t i = 0; i < destabilizers_.size(); i++) {
                if (i != pivot && anticommutes(destabilizers_[i], p)) {
                    destabilizers_[i] *= g;
                }
            }
            for (auto *block : {&logical_x_, &logical_z_}) {
                for (PauliString &l : *block) {
                    if (anticommutes(l, p)) {
                        l *= g;
                    }
                }
            }
            destabilizers_[pivot] = g;
            stabilizers_[pivot] = signed_copy(p, outcome);
            return {outcome, 0.5, 1};
        }

        Membership m = membership(p);
        if (m.kind == MembershipKind::InGroup) {
            if (forced && *forced != m.sign) {
                fail(ErrorKind::ForcedImpossible, "outcome " + std::to_string(*forced) + " of " + p.str() +
                                                      " has probability 0");
            }
            return {m.sign, 1.0, 2};
        }

        // P commutes with the group but anticommutes with some logical.
        size_t n_logical = logical_x_.size();
        size_t pair = SIZE_MAX;
        bool on_x = true;
        for (size_t a = 0; a < n_logical && pair == SIZE_MAX; a++) {
            if (anticommutes(logical_x_[a], p)) {
                pair = a;
            }
        }
        if (pair == SIZE_MAX) {
            on_x = false;
            for (size_t a = 0; a < n_logical && pair == SIZE_MAX; a++) {
                if (anticommutes(logical_z_[a], p)) {
                    pair = a;
                }
            }
        }
        int outcome = pick_outcome(forced, rng);
        const PauliString chosen = on_x ? logical_x_[pair] : logical_z_[pair];
        for (size_t a = 0; a < n_logical; a++) {
            if (a == pair) {
                continue;
            }
            if (anticommutes(logical_x_[a], p)) {
                logical_x_[a] *= chosen;
            }
            if (anticommutes(logical_z_[a], p)) {
                logical_z_[a] *= chosen;
            }
        }
        for (PauliString &d : destabilizers_) {
            if (anticommutes(d, p)) {
                d *= chosen;
            }
        }
        logical_x_.erase(logical_x_.begin() + static_cast<std::ptrdiff_t>(pair));
        logical_z_.erase(logical_z_.begin() + static_cast<std::ptrdiff_t>(pair));
        stabilizers_.push_back(signed_copy(p, outcome));
        destabilizers_.push_back(chosen);
        return {outcome, 0.5, 3};
    }

    /// Splits rho_S = (1 + Pbar) rho_S^P, where Pbar is a stabilizer
    /// anticommuting with P and rho_S^P is the (normalized) state of the
    /// subgroup commuting with P. The tableau becomes rho_S^P with (P, Pbar)
    /// appended as a logical pair. Returns Pbar with its sign.
    PauliString decompose(const PauliString &p) {
        check_operand(p);
        size_t pivot = SIZE_MAX;
        for (size_t i = 0; i < stabilizers_.size(); i++) {
            if (anticommutes(stabilizers_[i], p)) {
                pivot = i;
                break;
            }
        }
        if (pivot == SIZE_MAX) {
            fail(ErrorKind::NotAnticommuting, p.str() + " commutes with every stabilizer");
        }
        const PauliString g = stabilizers_[pivot];
        for (size_t i = pivot + 1; i < stabilizers_.size(); i++) {
            if (anticommutes(stabilizers_[i], p)) {
                stabilizers_[i] *= g;
            }
        }
        for (size_t i = 0; i < destabilizers_.size(); i++) {
            if (i != pivot && anticommutes(destabilizers_[i], p)) {
                destabilizers_[i] *= g;
            }
        }
        for (auto *block : {&logical_x_, &logical_z_}) {
            for (PauliString &l : *block) {
                if (anticommutes(l, p)) {
                    l *= g;
                }
            }
        }
        stabilizers_.erase(stabilizers_.begin() + static_cast<std::ptrdiff_t>(pivot));
        destabilizers_.erase(destabilizers_.begin() + static_cast<std::ptrdiff_t>(pivot));
        PauliString lx = p;
        lx.set_phase(0);
        logical_x_.push_back(std::move(lx));
        logical_z_.push_back(g);
        return g;
    }

    /// Throws PreconditionViolated describing the first broken invariant.
    void validate() const {
        auto bad = [](const std::string &what) { fail(ErrorKind::PreconditionViolated, "tableau: " + what); };
        size_t r = stabilizers_.size();
        if (destabilizers_.size() != r || logical_x_.size() != n_ - r || logical_z_.size() != n_ - r) {
            bad("block sizes inconsistent");
        }
        std::vector<const PauliString *> all;
        for (const auto *block : {&stabilizers_, &destabilizers_, &logical_x_, &logical_z_}) {
            for (const PauliString &p : *block) {
                if (p.n_qubits() != n_) {
                    bad("row length");
                }
                if (!p.is_hermitian()) {
                    bad("non-Hermitian row " + p.str());
                }
                all.push_back(&p);
            }
        }
        // Rows are ordered g_0..g_{r-1}, d_0..d_{r-1}, lx_0.., lz_0..; the only
        // anticommuting pairs are (g_i, d_i) and (lx_a, lz_a).
        size_t m = n_ - r;
        auto partner = [&](size_t k) -> size_t {
            if (k < r) return k + r;
            if (k < 2 * r) return k - r;
            if (k < 2 * r + m) return k + m;
            return k - m;
        };
        for (size_t a = 0; a < all.size(); a++) {
            for (size_t b = a + 1; b < all.size(); b++) {
                bool expect = partner(a) == b;
                if (anticommutes(*all[a], *all[b]) != expect) {
                    bad("commutation between rows " + std::to_string(a) + " and " + std::to_string(b));
                }
            }
        }
        // Independence of all 2L rows implies independence of the stabilizers.
        std::vector<BitRow> rows;
        for (const PauliString *p : all) {
            rows.push_back(p->raw_words());
        }
        if (rank_rows(rows) != 2 * n_) {
            bad("rows are dependent");
        }
    }

   private:
    static int pick_outcome(std::optional<int> forced, Rng *rng) {
        if (forced) {
            return *forced;
        }
        if (!rng) {
            fail(ErrorKind::PreconditionViolated, "random measurement without a generator");
        }
        return rng->coin() ? -1 : +1;
    }

    static PauliString signed_copy(const PauliString &p, int outcome) {
        PauliString r = p;
        if (outcome < 0) {
            r.add_phase(2);
        }
        return r;
    }

    void check_operand(const PauliString &p) const {
        if (p.n_qubits() != n_) {
            fail(ErrorKind::LengthMismatch, "operand " + p.str() + " on " + std::to_string(n_) + " qubits");
        }
        if (!p.is_hermitian()) {
            fail(ErrorKind::PreconditionViolated, "operand " + p.str() + " is not Hermitian");
        }
    }

    size_t n_ = 0;
    std::vector<PauliString> stabilizers_;
    std::vector<PauliString> destabilizers_;
    std::vector<PauliString> logical_x_;
    std::vector<PauliString> logical_z_;
};

/// Result of comparing two stabilizer groups element-wise.
struct GroupIntersection {
    size_t dimension;    // dimension of the common unsigned subgroup
    bool sign_conflict;  // some shared element appears with opposite signs
};

inline GroupIntersection intersect_groups(size_t n, const std::vector<PauliString> &a,
                                          const std::vector<PauliString> &b) {
    size_t na = a.size(), nb = b.size();
    size_t tag_words = (na + nb + 63) / 64;
    struct Row {
        PauliString p;
        BitRow tag;
    };
    std::vector<Row> rows;
    for (size_t i = 0; i < na + nb; i++) {
        Row r{i < na ? a[i] : b[i - na], BitRow(tag_words, 0)};
        bit_set(r.tag, i);
        rows.push_back(std::move(r));
    }
    // Gaussian elimination on the symplectic part, carrying combination tags.
    size_t next = 0;
    for (size_t col = 0; col < 2 * n && next < rows.size(); col++) {
        auto has = [&](const PauliString &p) { return col < n ? p.x(col) : p.z(col - n); };
        size_t piv = SIZE_MAX;
        for (size_t i = next; i < rows.size(); i++) {
            if (has(rows[i].p)) {
                piv = i;
                break;
            }
        }
        if (piv == SIZE_MAX) {
            continue;
        }
        std::swap(rows[next], rows[piv]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (i != next && has(rows[i].p)) {
                rows[i].p *= rows[next].p;
                bit_xor(rows[i].tag, rows[next].tag);
            }
        }
        next++;
    }
    GroupIntersection out{rows.size() - next, false};
    for (size_t i = next; i < rows.size(); i++) {
        // Relation prod_{A part} = prod_{B part} up to sign; compare signs.
        PauliString pa(n), pb(n);
        for (size_t k = 0; k < na + nb; k++) {
            if (bit_get(rows[i].tag, k)) {
                if (k < na) {
                    pa *= a[k];
                } else {
                    pb *= b[k - na];
                }
            }
        }
        if (pa.phase() != pb.phase()) {
            out.sign_conflict = true;
        }
    }
    return out;
}

/// tr(rho_a rho_b) for two (possibly mixed) stabilizer states.
inline double overlap_trace(const StabilizerTableau &a, const StabilizerTableau &b) {
    GroupIntersection gi = intersect_groups(a.n_qubits(), a.stabilizers(), b.stabilizers());
    if (gi.sign_conflict) {
        return 0.0;
    }
    return std::ldexp(1.0, static_cast<int>(gi.dimension) - static_cast<int>(a.n_qubits()));
}

/// |<psi_a|psi_b>| for pure stabilizer states: 0 on a sign conflict, otherwise
/// 2^{-(L - c)/2} with c the dimension of the shared group.
inline double inner_product_magnitude(const StabilizerTableau &a, const StabilizerTableau &b) {
    if (!a.is_pure() || !b.is_pure()) {
        fail(ErrorKind::MixedState, "inner product needs pure states");
    }
    if (a.n_qubits() != b.n_qubits()) {
        fail(ErrorKind::LengthMismatch, "inner product of different register sizes");
    }
    GroupIntersection gi = intersect_groups(a.n_qubits(), a.stabilizers(), b.stabilizers());
    if (gi.sign_conflict) {
        return 0.0;
    }
    if (gi.dimension >= a.n_qubits()) {
        return 1.0;
    }
    return std::pow(2.0, -0.5 * static_cast<double>(a.n_qubits() - gi.dimension));
}

/// Rank of the generators restricted to the given qubits (both x and z bits).
inline size_t restricted_rank(const std::vector<PauliString> &generators, const std::vector<size_t> &sites) {
    size_t bits = 2 * sites.size();
    std::vector<BitRow> rows;
    rows.reserve(generators.size());
    for (const PauliString &g : generators) {
        BitRow row((bits + 63) / 64, 0);
        for (size_t k = 0; k < sites.size(); k++) {
            if (g.x(sites[k])) bit_set(row, 2 * k);
            if (g.z(sites[k])) bit_set(row, 2 * k + 1);
        }
        rows.push_back(std::move(row));
    }
    return rank_rows(rows);
}

/// Von Neumann (and every Renyi) entropy in bits of region A for a stabilizer
/// state: |A| - dim S_A with dim S_A = r - rank(G restricted to the complement).
inline double stabilizer_entropy(const StabilizerTableau &t, const std::vector<size_t> &region) {
    std::vector<bool> in_a(t.n_qubits(), false);
    for (size_t q : region) {
        in_a.at(q) = true;
    }
    std::vector<size_t> complement;
    for (size_t q = 0; q < t.n_qubits(); q++) {
        if (!in_a[q]) {
            complement.push_back(q);
        }
    }
    size_t dim_a = t.rank() - restricted_rank(t.stabilizers(), complement);
    return static_cast<double>(region.size()) - static_cast<double>(dim_a);
}

}  // namespace lrsd

#endif
