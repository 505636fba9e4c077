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
#ifndef LRSD_ORACLE_HPP
#define LRSD_ORACLE_HPP

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lrsd/entropy.hpp"
#include "lrsd/error.hpp"
#include "lrsd/rng.hpp"
#include "lrsd/lrsd.hpp"
#include "lrsd/pauli.hpp"
#include "lrsd/tableau.hpp"

/// Dense reference implementation used to check the symbolic engine at small
/// sizes. Qubit q is bit q of the basis-state index.
namespace lrsd::oracle {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

constexpr size_t kMaxQubits = 12;

inline cplx i_pow(int k) {
    switch (k & 3) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

inline uint64_t x_mask(const PauliString &p) {
    return p.xs()[0];
}
inline uint64_t z_mask(const PauliString &p) {
    return p.zs()[0];
}

inline void check_size(size_t n) {
    if (n > kMaxQubits) {
        fail(ErrorKind::TooLarge, "dense oracle limited to " + std::to_string(kMaxQubits) + " qubits");
    }
}

/// out = P in, for a state vector or each column of a matrix.
inline Vec apply_pauli(const PauliString &p, const Vec &in) {
    uint64_t xm = x_mask(p), zm = z_mask(p);
    cplx base = i_pow(p.phase() + std::popcount(xm & zm));
    Vec out(in.size());
    for (uint64_t b = 0; b < static_cast<uint64_t>(in.size()); b++) {
        double s = (std::popcount(zm & b) & 1) ? -1.0 : 1.0;
        out[static_cast<Eigen::Index>(b ^ xm)] = base * s * in[static_cast<Eigen::Index>(b)];
    }
    return out;
}

inline Mat apply_pauli_left(const PauliString &p, const Mat &m) {
    Mat out(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); c++) {
        out.col(c) = apply_pauli(p, m.col(c));
    }
    return out;
}

inline Mat pauli_matrix(const PauliString &p) {
    check_size(p.n_qubits());
    Eigen::Index dim = Eigen::Index{1} << p.n_qubits();
    return apply_pauli_left(p, Mat::Identity(dim, dim));
}

/// rho_S = 2^{-(L-r)} prod_i (1 + g_i)/2.
inline Mat stabilizer_density(const StabilizerTableau &t) {
    check_size(t.n_qubits());
    Eigen::Index dim = Eigen::Index{1} << t.n_qubits();
    Mat m = Mat::Identity(dim, dim);
    for (const PauliString &g : t.stabilizers()) {
        m = 0.5 * (m + apply_pauli_left(g, m));
    }
    return m / std::ldexp(1.0, static_cast<int>(t.n_qubits() - t.rank()));
}

/// Dense rho = (sum_l lambda_l sigma_l) rho_S.
inline Mat assemble(const LrsdState &s) {
    check_size(s.n_qubits());
    Eigen::Index dim = Eigen::Index{1} << s.n_qubits();
    Mat sum = Mat::Zero(dim, dim);
    for (const Term &t : s.terms()) {
        uint64_t xm = x_mask(t.pauli), zm = z_mask(t.pauli);
        cplx base = t.coefficient * i_pow(t.pauli.phase() + std::popcount(xm & zm));
        for (uint64_t b = 0; b < static_cast<uint64_t>(dim); b++) {
            double sign = (std::popcount(zm & b) & 1) ? -1.0 : 1.0;
            sum(static_cast<Eigen::Index>(b ^ xm), static_cast<Eigen::Index>(b)) += base * sign;
        }
    }
    return sum * stabilizer_density(s.tableau());
}

class StateVector {
   public:
    explicit StateVector(size_t n) : n_(n), amp_(Vec::Zero(Eigen::Index{1} << n)) {
        check_size(n);
        amp_[0] = 1;
    }

    static StateVector zero(size_t n) {
        return StateVector(n);
    }
    static StateVector plus(size_t n) {
        StateVector v(n);
        v.amp_.setConstant(std::pow(2.0, -0.5 * static_cast<double>(n)));
        return v;
    }
    /// Some state vector stabilized by a pure tableau.
    static StateVector from_tableau(const StabilizerTableau &t) {
        if (!t.is_pure()) {
            fail(ErrorKind::MixedState, "state vector of a mixed tableau");
        }
        StateVector v(t.n_qubits());
        Vec seed = Vec::Zero(v.amp_.size());
        for (Eigen::Index b = 0; b < seed.size(); b++) {
            seed.setZero();
            seed[b] = 1;
            for (const PauliString &g : t.stabilizers()) {
                seed = 0.5 * (seed + apply_pauli(g, seed));
            }
            if (seed.norm() > 1e-6) {
                break;
            }
        }
        v.amp_ = seed / seed.norm();
        return v;
    }

    size_t n_qubits() const {
        return n_;
    }
    const Vec &amplitudes() const {
        return amp_;
    }
    Vec &amplitudes() {
        return amp_;
    }

    void apply_1q(size_t q, const Eigen::Matrix2cd &u) {
        Eigen::Index bit = Eigen::Index{1} << q;
        for (Eigen::Index b = 0; b < amp_.size(); b++) {
            if (b & bit) {
                continue;
            }
            cplx a0 = amp_[b], a1 = amp_[b | bit];
            amp_[b] = u(0, 0) * a0 + u(0, 1) * a1;
            amp_[b | bit] = u(1, 0) * a0 + u(1, 1) * a1;
        }
    }
    void h(size_t q) {
        double r = 1 / std::sqrt(2.0);
        Eigen::Matrix2cd u;
        u << r, r, r, -r;
        apply_1q(q, u);
    }
    void phase(size_t q, cplx w) {
        Eigen::Index bit = Eigen::Index{1} << q;
        for (Eigen::Index b = 0; b < amp_.size(); b++) {
            if (b & bit) {
                amp_[b] *= w;
            }
        }
    }
    void s(size_t q) {
        phase(q, {0, 1});
    }
    void sdg(size_t q) {
        phase(q, {0, -1});
    }
    void t(size_t q) {
        phase(q, std::polar(1.0, M_PI / 4));
    }
    void tdg(size_t q) {
        phase(q, std::polar(1.0, -M_PI / 4));
    }
    void z(size_t q) {
        phase(q, -1);
    }
    void x(size_t q) {
        Eigen::Matrix2cd u;
        u << 0, 1, 1, 0;
        apply_1q(q, u);
    }
    void y(size_t q) {
        Eigen::Matrix2cd u;
        u << 0, cplx(0, -1), cplx(0, 1), 0;
        apply_1q(q, u);
    }
    void cz(size_t a, size_t b) {
        Eigen::Index m = (Eigen::Index{1} << a) | (Eigen::Index{1} << b);
        for (Eigen::Index k = 0; k < amp_.size(); k++) {
            if ((k & m) == m) {
                amp_[k] = -amp_[k];
            }
        }
    }
    void cx(size_t c, size_t t) {
        Eigen::Index cb = Eigen::Index{1} << c, tb = Eigen::Index{1} << t;
        for (Eigen::Index k = 0; k < amp_.size(); k++) {
            if ((k & cb) && !(k & tb)) {
                std::swap(amp_[k], amp_[k | tb]);
            }
        }
    }
    void apply(const CliffordGate &g) {
        apply_gate(*this, g);
    }
    void apply_pauli_op(const PauliString &p) {
        amp_ = lrsd::oracle::apply_pauli(p, amp_);
    }

    double expectation(const PauliString &p) const {
        return amp_.dot(lrsd::oracle::apply_pauli(p, amp_)).real();
    }
    /// Probability of eigenvalue `outcome` when measuring Hermitian P.
    double probability(const PauliString &p, int outcome) const {
        return 0.5 * (1.0 + outcome * expectation(p));
    }
    /// Projects onto the `outcome` eigenspace; returns its probability.
    double project(const PauliString &p, int outcome) {
        double prob = probability(p, outcome);
        if (prob < 1e-12) {
            fail(ErrorKind::ZeroProbabilityBranch, "dense projection onto a null branch");
        }
        amp_ = 0.5 * (amp_ + static_cast<double>(outcome) * lrsd::oracle::apply_pauli(p, amp_));
        amp_ /= std::sqrt(prob);
        return prob;
    }

    Mat density() const {
        return amp_ * amp_.adjoint();
    }

   private:
    size_t n_;
    Vec amp_;
};

/// Reduced density matrix on `keep` (ordered; keep[k] becomes bit k).
inline Mat partial_trace(const Mat &rho, size_t n, const std::vector<size_t> &keep) {
    std::vector<size_t> traced;
    std::vector<bool> kept(n, false);
    for (size_t q : keep) {
        kept.at(q) = true;
    }
    for (size_t q = 0; q < n; q++) {
        if (!kept[q]) {
            traced.push_back(q);
        }
    }
    Eigen::Index dk = Eigen::Index{1} << keep.size();
    Eigen::Index dt = Eigen::Index{1} << traced.size();
    auto compose = [&](Eigen::Index a, Eigen::Index e) {
        Eigen::Index idx = 0;
        for (size_t k = 0; k < keep.size(); k++) {
            if (a >> k & 1) idx |= Eigen::Index{1} << keep[k];
        }
        for (size_t k = 0; k < traced.size(); k++) {
            if (e >> k & 1) idx |= Eigen::Index{1} << traced[k];
        }
        return idx;
    };
    Mat out = Mat::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; a++) {
        for (Eigen::Index b = 0; b < dk; b++) {
            cplx acc = 0;
            for (Eigen::Index e = 0; e < dt; e++) {
                acc += rho(compose(a, e), compose(b, e));
            }
            out(a, b) = acc;
        }
    }
    return out;
}

/// Renyi entropy in bits; order 1 is the von Neumann entropy.
inline double renyi_entropy(const Mat &rho, double order) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
    double acc = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); k++) {
        double ev = es.eigenvalues()[k];
        if (ev < 1e-12) {
            continue;
        }
        if (order == 1.0) {
            acc -= ev * std::log2(ev);
        } else if (order == 0.0) {
            acc += 1;
        } else {
            acc += std::pow(ev, order);
        }
    }
    if (order == 1.0) {
        return acc;
    }
    if (order == 0.0) {
        return std::log2(acc);
    }
    return std::log2(acc) / (1.0 - order);
}

/// Pauli string with x bits `xm` and z bits `zm`, phase 0.
inline PauliString pauli_from_masks(size_t n, uint64_t xm, uint64_t zm) {
    PauliString p(n);
    p.xs()[0] = xm;
    p.zs()[0] = zm;
    return p;
}

/// L - log2 #{P : |<psi|P|psi>| = 1}, by enumerating all 4^L strings.
inline int exact_nullity(const StateVector &v) {
    size_t n = v.n_qubits();
    if (n > 6) {
        fail(ErrorKind::TooLarge, "exact nullity enumerates 4^L strings; L <= 6");
    }
    uint64_t count = 0;
    for (uint64_t xm = 0; xm < (uint64_t{1} << n); xm++) {
        for (uint64_t zm = 0; zm < (uint64_t{1} << n); zm++) {
            if (std::abs(std::abs(v.expectation(pauli_from_masks(n, xm, zm))) - 1.0) < 1e-9) {
                count++;
            }
        }
    }
    return static_cast<int>(n) - std::countr_zero(count);
}

/// p(r) = 2^{-L} |<psi|sigma_r|psi*>|^2 indexed by x | (z << L).
inline std::vector<double> bell_distribution(const StateVector &v) {
    size_t n = v.n_qubits();
    if (n > 6) {
        fail(ErrorKind::TooLarge, "Bell distribution enumerates 4^L strings; L <= 6");
    }
    Vec conj = v.amplitudes().conjugate();
    std::vector<double> out(uint64_t{1} << (2 * n));
    for (uint64_t xm = 0; xm < (uint64_t{1} << n); xm++) {
        for (uint64_t zm = 0; zm < (uint64_t{1} << n); zm++) {
            cplx a = v.amplitudes().dot(apply_pauli(pauli_from_masks(n, xm, zm), conj));
            out[xm | (zm << n)] = std::norm(a) / std::ldexp(1.0, static_cast<int>(n));
        }
    }
    return out;
}

/// One event of a verification circuit. Measurements carry their outcome so
/// both engines follow the same branch.
struct Op {
    enum class Kind { Clifford, T, Measure };
    Kind kind = Kind::Clifford;
    CliffordGate gate{GateKind::H, 0};
    uint32_t q = 0;
    PauliString pauli{1};
    int outcome = +1;

    static Op clifford(CliffordGate g) {
        Op o;
        o.kind = Kind::Clifford;
        o.gate = g;
        return o;
    }
    static Op t_gate(uint32_t q) {
        Op o;
        o.kind = Kind::T;
        o.q = q;
        return o;
    }
    static Op measure(PauliString p, int outcome) {
        Op o;
        o.kind = Kind::Measure;
        o.pauli = std::move(p);
        o.outcome = outcome;
        return o;
    }
};

struct Evolution {
    StateVector state;
    std::vector<double> probabilities;  // one per measurement, in order
};

/// Exact evolution from |+>^n (or |0>^n). Projective branches are renormalized.
inline Evolution evolve(size_t n, const std::vector<Op> &ops, bool plus = true) {
    Evolution out{plus ? StateVector::plus(n) : StateVector::zero(n), {}};
    for (const Op &op : ops) {
        switch (op.kind) {
            case Op::Kind::Clifford: out.state.apply(op.gate); break;
            case Op::Kind::T: out.state.t(op.q); break;
            case Op::Kind::Measure: out.probabilities.push_back(out.state.project(op.pauli, op.outcome)); break;
        }
    }
    return out;
}

/// Fault to inject into the symbolic side of a comparison.
enum class Fault { None, CzSign };

/// Applies one op to the symbolic engine. With Fault::CzSign every CZ also
/// flips the sign of X on its first qubit, i.e. a sign error in CZ conjugation.
/// Returns the branch probability for measurements, 1 otherwise.
inline double apply_op(LrsdState &s, const Op &op, Fault fault = Fault::None) {
    switch (op.kind) {
        case Op::Kind::Clifford:
            s.apply_clifford(op.gate);
            if (fault == Fault::CzSign && op.gate.kind == GateKind::CZ) s.z(op.gate.q0);
            return 1.0;
        case Op::Kind::T: s.apply_t(op.q); return 1.0;
        case Op::Kind::Measure: return s.measure(op.pauli, op.outcome, nullptr).probability;
    }
    return 1.0;
}

/// Random mixed CZ / two-qubit Clifford / T / single-qubit measurement
/// circuit of `depth` events on |+>^n. Outcomes are drawn from the dense
/// state so every forced branch has nonzero probability.
inline std::vector<Op> random_circuit(size_t n, size_t depth, Rng &rng, double p_clifford = 0.4,
                                      double p_t = 0.3) {
    check_size(n);
    if (n < 2) fail(ErrorKind::PreconditionViolated, "random circuits need at least two qubits");
    StateVector v = StateVector::plus(n);
    std::vector<Op> ops;
    ops.reserve(depth);
    for (size_t e = 0; e < depth; e++) {
        double u = rng.uniform();
        if (u < p_clifford) {
            auto [a, b] = rng.distinct_pair(static_cast<uint32_t>(n));
            CliffordGate g = rng.coin() ? CliffordGate::cz(a, b)
                                        : CliffordGate::two_qubit_clifford(
                                              static_cast<uint16_t>(rng.below(kTwoQubitCliffordCount)), a, b);
            v.apply(g);
            ops.push_back(Op::clifford(g));
        } else if (u < p_clifford + p_t) {
            uint32_t q = static_cast<uint32_t>(rng.below(n));
            v.t(q);
            ops.push_back(Op::t_gate(q));
        } else {
            PauliString p = PauliString::single(n, rng.below(n), static_cast<Letter>(1 + rng.below(3)));
            double p_plus = v.probability(p, +1);
            int outcome = rng.uniform() < p_plus ? +1 : -1;
            if ((outcome > 0 ? p_plus : 1 - p_plus) < 1e-9) outcome = -outcome;
            v.project(p, outcome);
            ops.push_back(Op::measure(std::move(p), outcome));
        }
    }
    return ops;
}

struct Tolerances {
    double density = 1e-9;
    double probability = 1e-10;
    double entropy = 1e-8;
};

struct CompareReport {
    double density_diff = 0;
    double trace_error = 0;
    double probability_diff = 0;
    double entropy_diff = 0;
    Tolerances tol;
    bool density_ok() const {
        return density_diff <= tol.density && trace_error <= tol.density;
    }
    bool probability_ok() const {
        return probability_diff <= tol.probability;
    }
    bool entropy_ok() const {
        return entropy_diff <= tol.entropy;
    }
    bool pass() const {
        return density_ok() && probability_ok() && entropy_ok();
    }
    std::string str() const {
        std::ostringstream o;
        o << (pass() ? "pass" : "FAIL") << " density=" << density_diff << " trace=" << trace_error
          << " born=" << probability_diff << " entropy=" << entropy_diff;
        return o.str();
    }
};

/// Entrywise density difference, Born probabilities on `n_paulis` random
/// strings, and Renyi entropies of orders 1, 2, 3 on the first half of the
/// qubits and on a random region.
inline CompareReport compare(const LrsdState &s, const StateVector &v, Rng &rng, Tolerances tol = {},
                             size_t n_paulis = 32) {
    size_t n = s.n_qubits();
    if (n != v.n_qubits()) fail(ErrorKind::LengthMismatch, "compare: qubit counts differ");
    if (n > 8) fail(ErrorKind::TooLarge, "compare is limited to L <= 8");
    CompareReport r;
    r.tol = tol;
    Mat rho = assemble(s), ref = v.density();
    r.density_diff = (rho - ref).cwiseAbs().maxCoeff();
    r.trace_error = std::abs(rho.trace() - cplx(1, 0));

    for (size_t k = 0; k < n_paulis; k++) {
        PauliString p(n);
        do {
            p = pauli_from_masks(n, rng.below(uint64_t{1} << n), rng.below(uint64_t{1} << n));
        } while (p.is_identity());
        r.probability_diff = std::max(r.probability_diff, std::abs(s.born_probability(p) - v.probability(p, +1)));
    }

    std::vector<std::vector<size_t>> regions;
    std::vector<size_t> half;
    for (size_t q = 0; q < n / 2; q++) half.push_back(q);
    regions.push_back(half);
    std::vector<size_t> rnd;
    for (size_t q = 0; q < n; q++)
        if (rng.coin()) rnd.push_back(q);
    if (!rnd.empty() && rnd.size() < n) regions.push_back(rnd);
    for (const auto &region : regions) {
        if (region.empty()) continue;
        Mat ref_a = partial_trace(ref, n, region);
        for (double order : {1.0, 2.0, 3.0}) {
            double a = lrsd::renyi_entropy(s, region, order);
            double b = renyi_entropy(ref_a, order);
            r.entropy_diff = std::max(r.entropy_diff, std::abs(a - b));
        }
    }
    return r;
}

}  // namespace lrsd::oracle

#endif
