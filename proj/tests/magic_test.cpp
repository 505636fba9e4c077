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

#include <boost/math/special_functions/gamma.hpp>
#include <map>

#include "lrsd/magic.hpp"
#include "test_util.hpp"

using namespace lrsd;
using namespace lrsd::testing;

namespace {

/// Random graph state on n qubits.
StabilizerTableau random_graph_state(size_t n, Rng &rng, double p_edge = 0.5) {
    StabilizerTableau t = StabilizerTableau::plus_state(n);
    for (size_t a = 0; a < n; a++) {
        for (size_t b = a + 1; b < n; b++) {
            if (rng.uniform() < p_edge) t.cz(a, b);
        }
    }
    return t;
}

oracle::StateVector t_layer_state(const StabilizerTableau &t, const std::vector<uint64_t> &counts) {
    oracle::StateVector v = oracle::StateVector::from_tableau(t);
    for (size_t q = 0; q < counts.size(); q++) {
        for (uint64_t k = 0; k < counts[q]; k++) v.t(q);
    }
    return v;
}

oracle::Mat bell_form_density(const BellForm &f) {
    Eigen::Index dim = Eigen::Index{1} << f.n;
    oracle::Mat id = oracle::Mat::Identity(dim, dim);
    oracle::Mat rho = id;
    for (const PauliString &g : f.isotropic) {
        rho = rho * (id + oracle::pauli_matrix(g)) / 2.0;
    }
    for (size_t j = 0; j < f.k(); j++) {
        oracle::Mat g = oracle::pauli_matrix(f.pss_g[j]);
        oracle::Mat h = oracle::pauli_matrix(f.pss_h[j]);
        rho = rho * (BellForm::alpha1 * (id + g) / 2.0 + BellForm::alpha2() * (id - g) / 2.0 +
                     BellForm::alpha3() * (id + h) / 2.0);
    }
    return rho;
}

uint64_t bell_index(const PauliString &p) {
    return oracle::x_mask(p) | (oracle::z_mask(p) << p.n_qubits());
}

std::vector<uint64_t> random_counts(size_t n, Rng &rng) {
    std::vector<uint64_t> counts(n);
    for (auto &c : counts) c = rng.below(10);
    return counts;
}

}  // namespace

TEST(magic, t_power_split) {
    auto check = [](uint64_t n, uint64_t a, uint64_t b, uint64_t c) {
        TPowerSplit s = split_t_power(n);
        EXPECT_EQ(s.a, a);
        EXPECT_EQ(s.b, b);
        EXPECT_EQ(s.c, c);
    };
    check(5, 1, 0, 1);
    check(7, 1, 1, 1);
    check(4, 0, 0, 1);
    check(0, 0, 0, 0);
    check(2, 0, 1, 0);
}

TEST(magic, bell_form_examples) {
    BellForm even = build_bell_form(StabilizerTableau::plus_state(3), {2, 4, 6});
    EXPECT_EQ(even.k(), 0u);
    EXPECT_EQ(even.isotropic.size(), 3u);

    BellForm one = build_bell_form(StabilizerTableau::plus_state(1), {1});
    ASSERT_EQ(one.k(), 1u);
    EXPECT_EQ(one.pss_g[0], PauliString::from_text("X"));
    EXPECT_EQ(one.pss_h[0], PauliString::from_text("Y"));
    oracle::StateVector v = oracle::StateVector::plus(1);
    v.t(0);
    EXPECT_LT(max_abs_diff(bell_form_density(one), v.density()), 1e-12);

    // T on a Z eigenstate is a phase.
    BellForm trivial = build_bell_form(StabilizerTableau::zero_state(2), {1, 3});
    EXPECT_EQ(trivial.k(), 0u);

    EXPECT_THROW(build_bell_form(StabilizerTableau::maximally_mixed(2), {1, 0}), Error);
    EXPECT_THROW(build_bell_form(StabilizerTableau::plus_state(2), {1}), Error);
    StabilizerTableau bell = StabilizerTableau::zero_state(2);
    bell.h(0);
    bell.cx(0, 1);
    try {
        build_bell_form(bell, {1, 1});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedStructure);
    }
}

TEST(magic, bell_form_density_matches_statevector) {
    Rng rng(41);
    int unsupported = 0;
    for (int trial = 0; trial < 150; trial++) {
        size_t n = 1 + rng.below(5);
        StabilizerTableau t = random_graph_state(n, rng);
        if (trial % 2 == 1 && n >= 2) {
            for (int k = 0; k < 10; k++) t.apply(random_gate(n, rng));
        }
        std::vector<uint64_t> counts = random_counts(n, rng);
        BellForm f;
        try {
            f = build_bell_form(t, counts);
        } catch (const Error &e) {
            ASSERT_EQ(e.kind(), ErrorKind::UnsupportedStructure);
            ASSERT_EQ(trial % 2, 1) << "graph states always have full X rank";
            unsupported++;
            continue;
        }
        f.validate();
        EXPECT_EQ(f.isotropic.size() + f.k(), n);
        oracle::StateVector v = t_layer_state(t, counts);
        ASSERT_LT(max_abs_diff(bell_form_density(f), v.density()), 1e-10) << "trial " << trial;
        EXPECT_EQ(oracle::exact_nullity(v), static_cast<int>(f.k()));
    }
    EXPECT_LT(unsupported, 75);
}

TEST(magic, r0_examples) {
    BellForm real = build_bell_form(random_graph_state(4, *std::make_unique<Rng>(3)), {0, 0, 0, 0});
    EXPECT_TRUE(real.r0.is_identity());

    StabilizerTableau plus_y = StabilizerTableau::plus_state(1);
    plus_y.s(0);
    BellForm f = build_bell_form(plus_y, {0});
    EXPECT_TRUE(f.r0 == PauliString::from_text("Z") || f.r0 == PauliString::from_text("X"));
    oracle::StateVector v = oracle::StateVector::from_tableau(plus_y);
    oracle::Vec moved = oracle::apply_pauli(f.r0, v.amplitudes());
    EXPECT_NEAR(std::abs(moved.dot(v.amplitudes().conjugate())), 1.0, 1e-12);
}

TEST(magic, shifted_sampling_reproduces_bell_distribution) {
    Rng rng(42);
    for (int trial = 0; trial < 60; trial++) {
        size_t n = 1 + rng.below(3);
        StabilizerTableau t = random_graph_state(n, rng);
        for (size_t q = 0; q < n; q++) {
            if (rng.coin()) t.s(q);
        }
        std::vector<uint64_t> counts = random_counts(n, rng);
        BellForm f = build_bell_form(t, counts);
        oracle::StateVector v = t_layer_state(t, counts);
        std::vector<double> p = oracle::bell_distribution(v);
        // p(r) = 2^-L |<psi| sigma_{r + r0} |psi>|^2 for every r.
        for (uint64_t r = 0; r < p.size(); r++) {
            PauliString sigma = oracle::pauli_from_masks(n, r & ((1u << n) - 1), r >> n);
            sigma *= f.r0;
            sigma.set_phase(0);
            double direct = std::pow(v.expectation(sigma), 2) / std::ldexp(1.0, static_cast<int>(n));
            ASSERT_NEAR(p[r], direct, 1e-12) << "trial " << trial << " r " << r;
        }
        // Empirical frequencies against the dense distribution.
        const int draws = 4000;
        std::map<uint64_t, int> freq;
        for (int d = 0; d < draws; d++) {
            uint64_t r = bell_index(bell_sample(f, rng));
            ASSERT_GT(p[r], 1e-12) << "sample outside the support";
            freq[r]++;
        }
        double chi2 = 0;
        int bins = 0;
        for (uint64_t r = 0; r < p.size(); r++) {
            if (p[r] < 1e-12) continue;
            double e = p[r] * draws;
            chi2 += (freq[r] - e) * (freq[r] - e) / e;
            bins++;
        }
        if (bins > 1) {
            double pv = boost::math::gamma_q((bins - 1) / 2.0, chi2 / 2.0);
            EXPECT_GT(pv, 1e-4) << "trial " << trial;
        }
    }
}

TEST(magic, pss_count_is_binomial) {
    Rng rng(43);
    StabilizerTableau t = StabilizerTableau::plus_state(6);
    BellForm f = build_bell_form(t, {1, 1, 1, 1, 1, 1});
    ASSERT_EQ(f.k(), 6u);
    const int draws = 20000;
    std::vector<int> hist(7, 0);
    for (int d = 0; d < draws; d++) {
        PauliString s = bell_sample_conj(f, rng);
        hist[s.weight()]++;  // each chosen pair contributes X or Y on its own qubit
    }
    double chi2 = 0;
    for (int m = 0; m <= 6; m++) {
        double e = draws * std::tgamma(7) / (std::tgamma(m + 1) * std::tgamma(7 - m)) / 64.0;
        chi2 += (hist[m] - e) * (hist[m] - e) / e;
    }
    EXPECT_GT(boost::math::gamma_q(3.0, chi2 / 2.0), 1e-3);

    BellForm two = build_bell_form(StabilizerTableau::plus_state(2), {1, 1});
    std::vector<int> m_hist(3, 0);
    for (int d = 0; d < 8000; d++) m_hist[bell_sample_conj(two, rng).weight()]++;
    EXPECT_NEAR(m_hist[1] / 8000.0, 0.5, 0.03);
    EXPECT_NEAR(m_hist[0] / 8000.0, 0.25, 0.03);
    EXPECT_NEAR(m_hist[2] / 8000.0, 0.25, 0.03);
}

TEST(magic, nullity_examples) {
    Rng rng(44);
    // Stabilizer state: M = 0 with or without the base.
    BellForm stab = build_bell_form(random_graph_state(5, rng), {0, 2, 0, 4, 0});
    for (bool base : {true, false}) {
        NullityEstimate e = sample_until_converged(stab, rng, ConvergencePolicy::for_size(5), base);
        EXPECT_EQ(e.nullity, 0);
    }
    NullityEstimate first = sample_until_converged(stab, rng, ConvergencePolicy::for_size(5), true);
    EXPECT_EQ(first.steps, 5u);

    // Exhaustive support of T|+> and (T|+>)^2.
    for (size_t n : {1u, 2u}) {
        StabilizerTableau t = StabilizerTableau::plus_state(n);
        std::vector<uint64_t> counts(n, 1);
        oracle::StateVector v = t_layer_state(t, counts);
        std::vector<double> p = oracle::bell_distribution(v);
        BellSampleSet set(n);
        for (uint64_t r = 0; r < p.size(); r++) {
            if (p[r] > 1e-12) set.add(oracle::pauli_from_masks(n, r & ((1u << n) - 1), r >> n));
        }
        EXPECT_EQ(estimate_nullity(set), static_cast<int>(n));
        EXPECT_EQ(oracle::exact_nullity(v), static_cast<int>(n));
    }
    BellSampleSet one(3);
    one.add(PauliString::from_text("XYZ"));
    one.add(PauliString::from_text("XYZ"));
    EXPECT_EQ(estimate_nullity(one), 0);
    EXPECT_EQ(one.n_distinct(), 1u);
    EXPECT_EQ(one.count(PauliString::from_text("XYZ")), 2u);
    EXPECT_EQ(one.dump(), "3:6 2\n");
}

TEST(magic, monte_carlo_matches_exhaustive_nullity) {
    Rng rng(45);
    int hits = 0, trials = 0;
    for (int trial = 0; trial < 120; trial++) {
        size_t n = 2 + rng.below(5);
        StabilizerTableau t = random_graph_state(n, rng, 0.4);
        std::vector<uint64_t> counts = random_counts(n, rng);
        BellForm f = build_bell_form(t, counts);
        int exact = oracle::exact_nullity(t_layer_state(t, counts));
        NullityEstimate e = sample_until_converged(f, rng, {1000, 12 * n}, true);
        for (size_t k = 1; k < e.trace.size(); k++) {
            EXPECT_GE(e.trace[k], e.trace[k - 1]);
        }
        EXPECT_LE(e.nullity, static_cast<int>(f.k()));
        hits += e.nullity == exact;
        trials++;
    }
    EXPECT_GE(hits, trials - 3);
}

TEST(magic, lrsd_nullity_matches_oracle) {
    Rng rng(46);
    for (int trial = 0; trial < 80; trial++) {
        size_t n = 2 + rng.below(4);
        LrsdState s = random_lrsd(n, rng, 30);
        oracle::StateVector v(n);
        // Recover the pure state from the dense density matrix.
        oracle::Mat rho = oracle::assemble(s);
        Eigen::SelfAdjointEigenSolver<oracle::Mat> es(rho);
        v.amplitudes() = es.eigenvectors().col(es.eigenvectors().cols() - 1);
        EXPECT_EQ(lrsd_nullity(s), oracle::exact_nullity(v)) << "trial " << trial;
    }
}

TEST(magic, hex_dump) {
    EXPECT_EQ(sample_hex(PauliString::from_text("XIZYI")), "09:0c");
    EXPECT_EQ(sample_hex(PauliString::from_text("I")), "0:0");
}
