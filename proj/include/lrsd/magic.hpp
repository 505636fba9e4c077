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
#ifndef LRSD_MAGIC_HPP
#define LRSD_MAGIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lrsd/error.hpp"
#include "lrsd/f2.hpp"
#include "lrsd/lrsd.hpp"
#include "lrsd/pauli.hpp"
#include "lrsd/rng.hpp"
#include "lrsd/tableau.hpp"

namespace lrsd {

/// T^N = T^a S^b Z^c.
struct TPowerSplit {
    uint64_t a;
    uint64_t b;
    uint64_t c;
};

inline TPowerSplit split_t_power(uint64_t n) {
    return {n % 2, (n % 4) / 2, n / 4};
}

/// Post-T-layer state written as isotropic generators times k triplets
/// (I + g)/2, (I - g)/2, (I + h)/2 with weights 1/2, (1 - sqrt2)/2, sqrt2/2.
struct BellForm {
    size_t n = 0;
    std::vector<size_t> t_sites;  // qubits with a residual T, one per PSS pair
    std::vector<PauliString> isotropic;
    std::vector<PauliString> pss_g;
    std::vector<PauliString> pss_h;
    /// Shift between sampling from |psi>|psi*> and |psi>|psi>.
    PauliString r0;

    size_t k() const {
        return t_sites.size();
    }

    static constexpr double alpha1 = 0.5;
    static double alpha2() {
        return (1.0 - std::sqrt(2.0)) / 2.0;
    }
    static double alpha3() {
        return std::sqrt(2.0) / 2.0;
    }

    void validate() const {
        for (size_t i = 0; i < isotropic.size(); i++) {
            for (size_t j = 0; j < isotropic.size(); j++) {
                if (anticommutes(isotropic[i], isotropic[j])) fail(ErrorKind::PreconditionViolated, "isotropic pair anticommutes");
            }
            for (size_t j = 0; j < k(); j++) {
                if (anticommutes(isotropic[i], pss_g[j]) || anticommutes(isotropic[i], pss_h[j])) {
                    fail(ErrorKind::PreconditionViolated, "isotropic generator anticommutes with a PSS");
                }
            }
        }
        for (size_t i = 0; i < k(); i++) {
            for (size_t j = 0; j < k(); j++) {
                bool expect = i == j;
                if (anticommutes(pss_g[i], pss_g[j]) || anticommutes(pss_h[i], pss_h[j]) ||
                    anticommutes(pss_g[i], pss_h[j]) != expect) {
                    fail(ErrorKind::PreconditionViolated, "PSS commutation structure broken");
                }
            }
        }
    }
};

namespace detail {

/// Solves <q, g_j> = rhs_j (symplectic form) for a Pauli q; the g_j must be
/// independent.
inline PauliString solve_symplectic(size_t n, const std::vector<PauliString> &gens, const std::vector<bool> &rhs) {
    // Unknown layout: bits [0, n) are q.x, [n, 2n) are q.z; bit 2n is the rhs.
    const size_t width = 2 * n + 1;
    std::vector<BitRow> rows;
    for (size_t j = 0; j < gens.size(); j++) {
        BitRow r((width + 63) / 64, 0);
        for (size_t i = 0; i < n; i++) {
            if (gens[j].z(i)) bit_set(r, i);
            if (gens[j].x(i)) bit_set(r, n + i);
        }
        if (rhs[j]) bit_set(r, 2 * n);
        rows.push_back(std::move(r));
    }
    std::vector<size_t> pivots;
    size_t next = 0;
    for (size_t col = 0; col < 2 * n && next < rows.size(); col++) {
        size_t piv = SIZE_MAX;
        for (size_t i = next; i < rows.size(); i++) {
            if (bit_get(rows[i], col)) {
                piv = i;
                break;
            }
        }
        if (piv == SIZE_MAX) continue;
        std::swap(rows[next], rows[piv]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (i != next && bit_get(rows[i], col)) bit_xor(rows[i], rows[next]);
        }
        pivots.push_back(col);
        next++;
    }
    if (next != rows.size()) {
        fail(ErrorKind::PreconditionViolated, "generators are dependent");
    }
    PauliString q(n);
    for (size_t i = 0; i < pivots.size(); i++) {
        if (!bit_get(rows[i], 2 * n)) continue;
        if (pivots[i] < n) {
            q.set_x(pivots[i], true);
        } else {
            q.set_z(pivots[i] - n, true);
        }
    }
    return q;
}

inline size_t y_count(const PauliString &p) {
    size_t c = 0;
    for (size_t k = 0; k < p.n_words(); k++) {
        c += static_cast<size_t>(std::popcount(p.xs()[k] & p.zs()[k]));
    }
    return c;
}

}  // namespace detail

/// A Pauli R with R|psi> proportional to |psi*>. With phi the Clifford part
/// and K the residual T sites: Q maps phi to phi* when Q anticommutes exactly
/// with the generators carrying an odd number of Y letters (those flip sign
/// under conjugation). Since X T X is T^dagger up to phase, any R in the coset
/// Q S whose X part covers K also maps T^K phi to its conjugate; the PSS g_q
/// are the only generators with X on q, so they fix the coverage.
inline PauliString compute_r0(const BellForm &f) {
    std::vector<PauliString> gens = f.isotropic;
    gens.insert(gens.end(), f.pss_g.begin(), f.pss_g.end());
    std::vector<bool> rhs;
    for (const PauliString &g : gens) {
        rhs.push_back(detail::y_count(g) % 2 == 1);
    }
    PauliString r = detail::solve_symplectic(f.n, gens, rhs);
    for (size_t j = 0; j < f.k(); j++) {
        if (!r.x(f.t_sites[j])) {
            r *= f.pss_g[j];
        }
    }
    r.set_phase(0);
    return r;
}

/// Canonical Bell form of T^{N_1} x ... x T^{N_L} |phi> for a pure stabilizer
/// state phi. Even parts of each power are applied as S^b Z^c; a T column with
/// no X support at all acts as a phase and is dropped.
inline BellForm build_bell_form(const StabilizerTableau &t, const std::vector<uint64_t> &t_counts) {
    if (!t.is_pure()) {
        fail(ErrorKind::MixedStateUnsupported, "Bell form needs a pure Clifford state");
    }
    const size_t n = t.n_qubits();
    if (t_counts.size() != n) {
        fail(ErrorKind::LengthMismatch, "one T count per qubit expected");
    }
    StabilizerTableau phi = t;
    std::vector<size_t> sites;
    for (size_t q = 0; q < n; q++) {
        TPowerSplit split = split_t_power(t_counts[q]);
        if (split.b) phi.s(q);
        if (split.c % 2) phi.z(q);
        if (split.a) sites.push_back(q);
    }
    std::vector<PauliString> rows = phi.stabilizers();
    BellForm f;
    f.n = n;
    size_t next = 0;
    for (size_t q : sites) {
        size_t piv = SIZE_MAX;
        bool any = false;
        for (size_t i = 0; i < rows.size(); i++) {
            if (rows[i].x(q)) {
                any = true;
                if (i >= next && piv == SIZE_MAX) piv = i;
            }
        }
        if (!any) {
            continue;  // +-Z_q stabilizes phi
        }
        if (piv == SIZE_MAX) {
            fail(ErrorKind::UnsupportedStructure, "T columns are linearly dependent in the X block");
        }
        std::swap(rows[next], rows[piv]);
        for (size_t i = 0; i < rows.size(); i++) {
            if (i != next && rows[i].x(q)) rows[i] *= rows[next];
        }
        f.t_sites.push_back(q);
        next++;
    }
    for (size_t j = 0; j < next; j++) {
        PauliString g = rows[j];
        PauliString h = multiply(g, PauliString::single(n, f.t_sites[j], Letter::Z));
        h.add_phase(1);
        f.pss_g.push_back(std::move(g));
        f.pss_h.push_back(std::move(h));
    }
    f.isotropic.assign(rows.begin() + static_cast<std::ptrdiff_t>(next), rows.end());
    f.r0 = compute_r0(f);
    return f;
}

/// One Bell sample from |psi> x |psi*>, phase dropped.
inline PauliString bell_sample_conj(const BellForm &f, Rng &rng) {
    PauliString out(f.n);
    for (const PauliString &g : f.isotropic) {
        if (rng.coin()) out *= g;
    }
    const size_t k = f.k();
    size_t m = 0;
    for (size_t j = 0; j < k; j++) {
        m += rng.coin() ? 1 : 0;
    }
    std::vector<size_t> pairs(k);
    std::iota(pairs.begin(), pairs.end(), size_t{0});
    for (size_t j = 0; j < m; j++) {
        size_t pick = j + static_cast<size_t>(rng.below(k - j));
        std::swap(pairs[j], pairs[pick]);
        out *= rng.coin() ? f.pss_g[pairs[j]] : f.pss_h[pairs[j]];
    }
    out.set_phase(0);
    return out;
}

/// One Bell sample from |psi> x |psi>.
inline PauliString bell_sample(const BellForm &f, Rng &rng) {
    PauliString out = bell_sample_conj(f, rng);
    out *= f.r0;
    out.set_phase(0);
    return out;
}

/// Bit row r = (x | z) of a Pauli string.
inline BitRow pauli_bits(const PauliString &p) {
    const size_t n = p.n_qubits();
    BitRow r((2 * n + 63) / 64, 0);
    for (size_t q = 0; q < n; q++) {
        if (p.x(q)) bit_set(r, q);
        if (p.z(q)) bit_set(r, n + q);
    }
    return r;
}

/// Hex dump "x:z" of a sample, most significant qubit first.
inline std::string sample_hex(const PauliString &p) {
    auto dump = [&](bool z_part) {
        const size_t n = p.n_qubits();
        std::string s;
        for (size_t nib = (n + 3) / 4; nib-- > 0;) {
            int v = 0;
            for (size_t b = 0; b < 4; b++) {
                size_t q = 4 * nib + b;
                if (q < n && (z_part ? p.z(q) : p.x(q))) v |= 1 << b;
            }
            s.push_back("0123456789abcdef"[v]);
        }
        return s;
    };
    return dump(false) + ":" + dump(true);
}

/// Distinct Bell samples with multiplicities and an online rank of their
/// differences, optionally seeded with a known base space.
class BellSampleSet {
   public:
    explicit BellSampleSet(size_t n) : n_(n), basis_(2 * n) {
    }

    /// Inserts generators whose span the differences are known to contain.
    void add_base(const std::vector<PauliString> &base) {
        for (const PauliString &g : base) {
            basis_.insert(pauli_bits(g));
        }
        has_base_ = true;
    }

    void add(const PauliString &sample) {
        steps_++;
        std::string key = sample_hex(sample);
        auto [it, fresh] = counts_.try_emplace(key, 0);
        it->second++;
        if (!fresh) {
            return;
        }
        samples_.push_back(sample);
        BitRow bits = pauli_bits(sample);
        if (samples_.size() == 1) {
            first_ = bits;
            return;
        }
        bit_xor(bits, first_);
        basis_.insert(std::move(bits));
    }

    size_t n_qubits() const {
        return n_;
    }
    size_t steps() const {
        return steps_;
    }
    size_t n_distinct() const {
        return samples_.size();
    }
    const std::vector<PauliString> &samples() const {
        return samples_;
    }
    size_t count(const PauliString &sample) const {
        auto it = counts_.find(sample_hex(sample));
        return it == counts_.end() ? 0 : it->second;
    }
    /// rank of span{sigma_i + sigma_j} (plus the base, when set).
    size_t difference_rank() const {
        return basis_.rank();
    }
    bool has_base() const {
        return has_base_;
    }

    std::string dump() const {
        std::ostringstream out;
        for (const PauliString &s : samples_) {
            out << sample_hex(s) << ' ' << count(s) << '\n';
        }
        return out.str();
    }

   private:
    size_t n_;
    IncrementalBasis basis_;
    BitRow first_;
    std::vector<PauliString> samples_;
    std::unordered_map<std::string, size_t> counts_;
    size_t steps_ = 0;
    bool has_base_ = false;
};

/// M = G' - L, floored at zero while the difference span is still small.
inline int estimate_nullity(const BellSampleSet &samples) {
    long g = static_cast<long>(samples.difference_rank());
    return static_cast<int>(std::max(0L, g - static_cast<long>(samples.n_qubits())));
}

/// The L Lagrangian generators (isotropic and PSS g) contained in every
/// difference span.
inline std::vector<PauliString> bell_base(const BellForm &f) {
    std::vector<PauliString> base = f.isotropic;
    base.insert(base.end(), f.pss_g.begin(), f.pss_g.end());
    return base;
}

struct ConvergencePolicy {
    size_t window;
    size_t tau_max;

    static ConvergencePolicy for_size(size_t n) {
        return {std::max<size_t>(4, n / 8), 2 * n};
    }
};

struct NullityEstimate {
    int nullity;
    size_t steps;
    size_t distinct;
    std::vector<int> trace;  // M after each step
};

/// Samples until M has not changed for `window` consecutive steps, or
/// tau_max steps have been taken.
inline NullityEstimate sample_until_converged(const BellForm &f, Rng &rng, ConvergencePolicy policy,
                                              bool use_base = true) {
    if (policy.window < 1) {
        fail(ErrorKind::PreconditionViolated, "convergence window must be positive");
    }
    BellSampleSet set(f.n);
    if (use_base) {
        set.add_base(bell_base(f));
    }
    NullityEstimate out{0, 0, 0, {}};
    size_t stable = 0;
    int last = -1;
    while (out.steps < policy.tau_max) {
        set.add(bell_sample(f, rng));
        out.steps++;
        int m = estimate_nullity(set);
        out.trace.push_back(m);
        stable = m == last ? stable + 1 : 0;
        last = m;
        if (stable >= policy.window && (use_base || set.difference_rank() >= f.n)) {
            break;
        }
    }
    out.nullity = last < 0 ? 0 : last;
    out.distinct = set.n_distinct();
    return out;
}

/// Draws until `tau` distinct samples have been collected. trace[i] is M
/// after the (i+1)-th distinct sample. Raw draws are capped so a state with
/// fewer than `tau` distinct samples cannot stall.
inline NullityEstimate sample_distinct(const BellForm &f, Rng &rng, size_t tau, bool use_base = true) {
    BellSampleSet set(f.n);
    if (use_base) {
        set.add_base(bell_base(f));
    }
    NullityEstimate out{0, 0, 0, {}};
    const size_t cap = 64 * tau + 1024;
    while (set.n_distinct() < tau && out.steps < cap) {
        size_t before = set.n_distinct();
        set.add(bell_sample(f, rng));
        out.steps++;
        if (set.n_distinct() > before) {
            out.trace.push_back(estimate_nullity(set));
        }
    }
    out.nullity = out.trace.empty() ? 0 : out.trace.back();
    out.distinct = set.n_distinct();
    return out;
}

/// Nullity of a pure LRSD state read off its canonical terms: the Paulis with
/// |<P>| = 1 are the stabilizers times the logical strings with |lambda| = 1.
inline int lrsd_nullity(const LrsdState &s, double tol = 1e-9) {
    if (std::abs(s.trace() - 1.0) > 1e-9) {
        fail(ErrorKind::PreconditionViolated, "state is not normalized");
    }
    size_t unit = 0;
    for (const Term &t : s.terms()) {
        if (std::abs(std::abs(t.coefficient) - 1.0) < tol) unit++;
    }
    if (unit == 0 || (unit & (unit - 1)) != 0) {
        fail(ErrorKind::PreconditionViolated, "unit-weight strings do not form a group");
    }
    long m = static_cast<long>(s.n_qubits()) - static_cast<long>(s.tableau().rank()) - std::countr_zero(unit);
    if (m < 0) {
        fail(ErrorKind::MixedState, "nullity needs a pure state");
    }
    return static_cast<int>(m);
}

}  // namespace lrsd

#endif
