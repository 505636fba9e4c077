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
#ifndef LRSD_LRSD_HPP
#define LRSD_LRSD_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "lrsd/error.hpp"
#include "lrsd/pauli.hpp"
#include "lrsd/rng.hpp"
#include "lrsd/tableau.hpp"

namespace lrsd {

using cplx = std::complex<double>;

inline cplx i_power(int k) {
    switch (k & 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

/// Coefficients of T sigma T^dagger = c1 sigma + c2 (i sigma Z) for a string
/// sigma anticommuting with Z on the T site.
struct TGateConstants {
    static double alpha() {
        return std::cos(M_PI / 8);
    }
    static cplx beta() {
        return {0.0, -std::sin(M_PI / 8)};
    }
    static double c1() {
        return (alpha() * alpha() + beta() * beta()).real();
    }
    static double c2() {
        return (2.0 * cplx(0, 1) * alpha() * beta()).real();
    }
};

/// tr(M rho_S) for an arbitrary (possibly non-Hermitian) Pauli string M.
inline cplx stabilizer_trace(const StabilizerTableau &t, PauliString m) {
    int k = m.phase();
    if (m.is_identity()) {
        return i_power(k);
    }
    m.set_phase(0);
    Membership mem = t.membership(m);
    if (mem.kind != MembershipKind::InGroup) {
        return 0.0;
    }
    return i_power(k) * static_cast<double>(mem.sign);
}

struct Term {
    cplx coefficient;
    PauliString pauli;
};

enum class TGateCase { I, II, III, IV };

struct MeasurementOutcome {
    int outcome;
    double probability;
};

/// rho = sum_l lambda_l sigma_l rho_S.
///
/// After every non-Clifford event the terms are kept canonical: each sigma_l
/// commutes with every stabilizer and destabilizer, carries phase 0, and is
/// unique. In that form lambda_l = tr(sigma_l rho) and the trace is the
/// coefficient of the identity.
class LrsdState {
   public:
    LrsdState() = default;
    explicit LrsdState(StabilizerTableau tableau) : tableau_(std::move(tableau)) {
        terms_.push_back({1.0, PauliString(tableau_.n_qubits())});
    }

    static LrsdState plus_state(size_t n) {
        return LrsdState(StabilizerTableau::plus_state(n));
    }
    static LrsdState zero_state(size_t n) {
        return LrsdState(StabilizerTableau::zero_state(n));
    }
    /// Raw assembly without canonicalization.
    static LrsdState from_parts(StabilizerTableau tableau, std::vector<Term> terms, double cutoff = 0.0) {
        LrsdState s;
        s.tableau_ = std::move(tableau);
        s.terms_ = std::move(terms);
        s.cutoff_ = cutoff;
        return s;
    }

    size_t n_qubits() const {
        return tableau_.n_qubits();
    }
    const StabilizerTableau &tableau() const {
        return tableau_;
    }
    const std::vector<Term> &terms() const {
        return terms_;
    }
    size_t n_terms() const {
        return terms_.size();
    }
    double cutoff() const {
        return cutoff_;
    }
    void set_cutoff(double eps) {
        if (!(eps >= 0)) {
            fail(ErrorKind::PreconditionViolated, "cutoff must be non-negative");
        }
        cutoff_ = eps;
    }

    /// Number of reals needed to specify the state: tableau plus term table.
    size_t entry_count() const {
        size_t l = n_qubits();
        return (2 * l + 1) * (2 * l + 1) + terms_.size() * l + terms_.size();
    }

    void h(size_t q) {
        tableau_.h(q);
        for_terms([q](PauliString &p) { p.conjugate_h(q); });
    }
    void s(size_t q) {
        tableau_.s(q);
        for_terms([q](PauliString &p) { p.conjugate_s(q); });
    }
    void sdg(size_t q) {
        tableau_.sdg(q);
        for_terms([q](PauliString &p) { p.conjugate_sdg(q); });
    }
    void x(size_t q) {
        tableau_.x(q);
        for_terms([q](PauliString &p) { p.conjugate_x(q); });
    }
    void y(size_t q) {
        tableau_.y(q);
        for_terms([q](PauliString &p) { p.conjugate_y(q); });
    }
    void z(size_t q) {
        tableau_.z(q);
        for_terms([q](PauliString &p) { p.conjugate_z(q); });
    }
    void cz(size_t a, size_t b) {
        tableau_.cz(a, b);
        for_terms([a, b](PauliString &p) { p.conjugate_cz(a, b); });
    }
    void cx(size_t c, size_t t) {
        tableau_.cx(c, t);
        for_terms([c, t](PauliString &p) { p.conjugate_cx(c, t); });
    }
    void apply_clifford(const CliffordGate &g) {
        check_gate_sites(g, n_qubits());
        apply_gate(*this, g);
    }

    TGateCase apply_t(size_t site) {
        if (site >= n_qubits()) {
            fail(ErrorKind::IndexOutOfRange, "T site outside register");
        }
        PauliString p = PauliString::single(n_qubits(), site, Letter::Z);
        bool hits_group = false;
        for (const PauliString &g : tableau_.stabilizers()) {
            if (g.x(site)) {
                hits_group = true;
                break;
            }
        }
        bool hits_terms = std::any_of(terms_.begin(), terms_.end(), [site](const Term &t) { return t.pauli.x(site); });
        const double c1 = TGateConstants::c1(), c2 = TGateConstants::c2();

        if (!hits_group) {
            if (!hits_terms) {
                // Z_site commutes with rho: either it lies in the group or it
                // acts only through logicals that every term leaves alone.
                return TGateCase::I;
            }
            std::vector<Term> next;
            next.reserve(terms_.size() * 2);
            for (Term &t : terms_) {
                if (!t.pauli.x(site)) {
                    next.push_back(std::move(t));
                    continue;
                }
                PauliString partner = t.pauli;
                partner *= p;
                partner.add_phase(1);
                next.push_back({t.coefficient * c2, std::move(partner)});
                next.push_back({t.coefficient * c1, std::move(t.pauli)});
            }
            terms_ = std::move(next);
            canonicalize();
            return TGateCase::III;
        }

        PauliString pbar = tableau_.decompose(p);
        PauliString pbar_z = pbar;
        pbar_z *= p;
        pbar_z.add_phase(1);
        std::vector<Term> next;
        next.reserve(terms_.size() * 3);
        for (Term &t : terms_) {
            if (t.pauli.x(site)) {
                t.pauli *= pbar;
            }
            next.push_back({t.coefficient * c1, multiply(t.pauli, pbar)});
            next.push_back({t.coefficient * c2, multiply(t.pauli, pbar_z)});
            next.push_back(std::move(t));
        }
        terms_ = std::move(next);
        canonicalize();
        return hits_terms ? TGateCase::IV : TGateCase::II;
    }

    /// Probability of outcome +1 when measuring Hermitian P.
    double born_probability(const PauliString &p) const {
        return born_probability(p, tableau_.membership(p));
    }

    /// Same, with the membership of P in the stabilizer group precomputed.
    double born_probability(const PauliString &p, const Membership &m) const {
        double p_plus_s = m.kind == MembershipKind::InGroup ? (m.sign > 0 ? 1.0 : 0.0) : 0.5;
        // The conditioned tableau is only needed for commuting non-identity terms.
        std::optional<StabilizerTableau> conditioned;
        cplx total = 0;
        for (const Term &t : terms_) {
            if (!anticommutes(t.pauli, p)) {
                // sigma = (projector onto +1) - (projector onto -1); its
                // expectation after conditioning on P = +1.
                if (p_plus_s > 0) {
                    if (t.pauli.is_identity()) {
                        total += t.coefficient * p_plus_s * i_power(t.pauli.phase());
                        continue;
                    }
                    if (!conditioned) {
                        conditioned = tableau_;
                        if (m.kind != MembershipKind::InGroup) conditioned->measure(p, +1, nullptr);
                    }
                    total += t.coefficient * p_plus_s * stabilizer_trace(*conditioned, t.pauli);
                }
            } else {
                total += t.coefficient * 0.5 *
                         (stabilizer_trace(tableau_, t.pauli) + stabilizer_trace(tableau_, multiply(p, t.pauli)));
            }
        }
        double prob = total.real() / trace();
        return std::clamp(prob, 0.0, 1.0);
    }

    MeasurementOutcome measure(const PauliString &p, std::optional<int> forced, Rng *rng) {
        Membership m = tableau_.membership(p);
        double p_plus = born_probability(p, m);
        int outcome;
        if (forced) {
            outcome = *forced;
        } else {
            if (!rng) {
                fail(ErrorKind::PreconditionViolated, "random measurement without a generator");
            }
            outcome = rng->uniform() < p_plus ? +1 : -1;
        }
        double prob = outcome > 0 ? p_plus : 1.0 - p_plus;
        if (prob < 1e-12) {
            fail(ErrorKind::ZeroProbabilityBranch, "outcome " + std::to_string(outcome) + " of " + p.str());
        }
        if (m.kind == MembershipKind::InGroup) {
            return {outcome, prob};
        }
        bool any_anti = std::any_of(terms_.begin(), terms_.end(), [&](const Term &t) { return anticommutes(t.pauli, p); });
        if (m.kind == MembershipKind::CommutesOutside) {
            std::erase_if(terms_, [&](const Term &t) { return anticommutes(t.pauli, p); });
        } else if (any_anti) {
            PauliString pbar = tableau_.decompose(p);
            for (Term &t : terms_) {
                if (anticommutes(t.pauli, p)) {
                    t.pauli *= pbar;
                }
            }
        }
        tableau_.measure(p, outcome, nullptr);
        canonicalize();
        normalize();
        return {outcome, prob};
    }

    /// Drops |lambda| <= eps, merges, renormalizes.
    void truncate(double eps) {
        if (!(eps >= 0)) {
            fail(ErrorKind::PreconditionViolated, "truncation threshold must be non-negative");
        }
        std::erase_if(terms_, [eps](const Term &t) { return std::abs(t.coefficient) <= eps; });
        if (terms_.empty()) {
            fail(ErrorKind::InvalidTrajectory, "truncation removed every term");
        }
        canonicalize();
        normalize();
    }

    /// tr(Q rho) for a Pauli string Q.
    cplx expectation(const PauliString &q) const {
        cplx acc = 0;
        for (const Term &t : terms_) {
            acc += t.coefficient * stabilizer_trace(tableau_, multiply(q, t.pauli));
        }
        return acc;
    }

    double trace() const {
        return expectation(PauliString(n_qubits())).real();
    }

    /// Reduces every term modulo the stabilizer group, folds phases into the
    /// coefficients, merges duplicates and drops numerical zeros.
    void canonicalize() {
        const auto &gs = tableau_.stabilizers();
        const auto &ds = tableau_.destabilizers();
        for (Term &t : terms_) {
            for (size_t i = 0; i < gs.size(); i++) {
                if (anticommutes(t.pauli, ds[i])) {
                    t.pauli *= gs[i];
                }
            }
            t.coefficient *= i_power(t.pauli.phase());
            t.pauli.set_phase(0);
        }
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term &a, const Term &b) { return a.pauli.letters_less(b.pauli); });
        std::vector<Term> merged;
        merged.reserve(terms_.size());
        for (Term &t : terms_) {
            if (!merged.empty() && merged.back().pauli.same_letters(t.pauli)) {
                merged.back().coefficient += t.coefficient;
            } else {
                merged.push_back(std::move(t));
            }
        }
        // Canonical coefficients are Pauli expectation values of a Hermitian
        // operator, hence real.
        std::erase_if(merged, [](Term &t) {
            t.coefficient = t.coefficient.real();
            return std::abs(t.coefficient) < 1e-14;
        });
        if (merged.empty()) {
            fail(ErrorKind::InvalidTrajectory, "every term vanished");
        }
        terms_ = std::move(merged);
    }

   private:
    template <typename F>
    void for_terms(F &&f) {
        for (Term &t : terms_) {
            f(t.pauli);
        }
    }

    void normalize() {
        // Terms are canonical here, so the trace is the identity coefficient
        // (the first entry in sorted order when present).
        double tr = terms_.front().pauli.is_identity() ? terms_.front().coefficient.real() : 0.0;
        if (!(std::abs(tr) > 1e-300)) {
            fail(ErrorKind::InvalidTrajectory, "state has zero trace");
        }
        for (Term &t : terms_) {
            t.coefficient /= tr;
        }
    }

    StabilizerTableau tableau_;
    std::vector<Term> terms_;
    double cutoff_ = 0.0;
};

}  // namespace lrsd

#endif
