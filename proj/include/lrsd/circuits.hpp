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
#ifndef LRSD_CIRCUITS_HPP
#define LRSD_CIRCUITS_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lrsd/entropy.hpp"
#include "lrsd/error.hpp"
#include "lrsd/gates.hpp"
#include "lrsd/graphstate.hpp"
#include "lrsd/lrsd.hpp"
#include "lrsd/magic.hpp"
#include "lrsd/rng.hpp"

namespace lrsd {

enum class Model { ZBasisMagic, XBasisPurification, CliffordCluster };

/// How the T stage is drawn each step: one Bernoulli(p_T) followed by one
/// random qubit, or an independent Bernoulli(p_T) per qubit.
enum class TMode { Single, PerQubit };

inline const char *model_name(Model m) {
    switch (m) {
        case Model::ZBasisMagic: return "z-basis-magic";
        case Model::XBasisPurification: return "x-basis-purification";
        case Model::CliffordCluster: return "clifford-cluster";
    }
    return "?";
}

inline Model parse_model(const std::string &s) {
    if (s == "z-basis-magic") return Model::ZBasisMagic;
    if (s == "x-basis-purification") return Model::XBasisPurification;
    if (s == "clifford-cluster") return Model::CliffordCluster;
    fail(ErrorKind::InvalidConfig, "unknown model '" + s + "'");
}

struct CircuitConfig {
    size_t L = 8;
    double eta = 0.0;
    double beta = 1.0;
    double p_m = 0.5;
    double p_xz = 0.0;  // probability of an X-basis measurement, given one
    uint64_t t_final = 0;  // 0 selects 2 L^2
    double epsilon = 0.0;
    Model model = Model::CliffordCluster;
    uint64_t seed = 1;
    size_t n_traj = 1;
    TMode t_mode = TMode::Single;
    uint64_t record_every = 0;  // 0 selects L
    /// z-basis-magic: also evolve the LRSD with T applied in place.
    bool track_terms = false;
    /// x-basis-purification: stop once the ancilla is pure (S_Q stays 0).
    bool stop_when_pure = false;
    /// Compute S_mm at the end (Clifford states only).
    bool max_min = false;
    bool log_events = false;

    double p_t() const {
        return eta == 0.0 ? 0.0 : eta / std::pow(static_cast<double>(L), beta);
    }
    uint64_t steps() const {
        return t_final ? t_final : 2 * static_cast<uint64_t>(L) * L;
    }
    uint64_t cadence() const {
        return record_every ? record_every : L;
    }

    void validate() const {
        auto prob = [](double p, const char *name) {
            if (!(p >= 0.0 && p <= 1.0)) {
                fail(ErrorKind::InvalidConfig, std::string(name) + " must lie in [0, 1]");
            }
        };
        if (L < 2) fail(ErrorKind::InvalidConfig, "L must be at least 2");
        prob(p_m, "p_m");
        prob(p_xz, "p_xz");
        prob(p_t(), "p_T = eta / L^beta");
        if (!(epsilon >= 0.0)) fail(ErrorKind::InvalidConfig, "epsilon must be non-negative");
        if (n_traj < 1) fail(ErrorKind::InvalidConfig, "n_traj must be positive");
        if (model == Model::ZBasisMagic && p_xz != 0.0) {
            fail(ErrorKind::InvalidConfig, "z-basis-magic needs p_xz = 0");
        }
        if (model == Model::CliffordCluster && p_t() != 0.0) {
            fail(ErrorKind::InvalidConfig, "clifford-cluster needs p_T = 0");
        }
    }

    nlohmann::json to_json() const {
        return {{"L", L},
                {"eta", eta},
                {"beta", beta},
                {"p_m", p_m},
                {"p_xz", p_xz},
                {"t_final", steps()},
                {"epsilon", epsilon},
                {"model", model_name(model)},
                {"seed", seed},
                {"n_traj", n_traj},
                {"t_mode", t_mode == TMode::Single ? "single" : "per_qubit"},
                {"record_every", cadence()},
                {"track_terms", track_terms},
                {"stop_when_pure", stop_when_pure},
                {"max_min", max_min}};
    }

    static CircuitConfig from_json(const nlohmann::json &j) {
        static const std::vector<std::string> known = {
            "L",      "eta",    "beta",         "p_m",         "p_xz",           "t_final",  "epsilon",   "model",
            "seed",   "n_traj", "t_mode",       "record_every", "track_terms",   "stop_when_pure", "max_min", "log_events"};
        if (!j.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
                fail(ErrorKind::InvalidConfig, "unknown config key '" + it.key() + "'");
            }
        }
        CircuitConfig c;
        try {
            c.L = j.value("L", c.L);
            c.eta = j.value("eta", c.eta);
            c.beta = j.value("beta", c.beta);
            c.p_m = j.value("p_m", c.p_m);
            c.p_xz = j.value("p_xz", c.p_xz);
            c.t_final = j.value("t_final", c.t_final);
            c.epsilon = j.value("epsilon", c.epsilon);
            c.model = parse_model(j.value("model", std::string(model_name(c.model))));
            c.seed = j.value("seed", c.seed);
            c.n_traj = j.value("n_traj", c.n_traj);
            std::string mode = j.value("t_mode", std::string("single"));
            if (mode == "single") {
                c.t_mode = TMode::Single;
            } else if (mode == "per_qubit") {
                c.t_mode = TMode::PerQubit;
            } else {
                fail(ErrorKind::InvalidConfig, "t_mode must be single or per_qubit");
            }
            c.record_every = j.value("record_every", c.record_every);
            c.track_terms = j.value("track_terms", c.track_terms);
            c.stop_when_pure = j.value("stop_when_pure", c.stop_when_pure);
            c.max_min = j.value("max_min", c.max_min);
            c.log_events = j.value("log_events", c.log_events);
        } catch (const nlohmann::json::exception &e) {
            fail(ErrorKind::InvalidConfig, e.what());
        }
        c.validate();
        return c;
    }

    /// FNV-1a over the canonical JSON echo.
    std::string hash() const {
        std::string s = to_json().dump();
        uint64_t h = 1469598103934665603ull;
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        std::ostringstream out;
        out << std::hex << std::setw(16) << std::setfill('0') << h;
        return out.str();
    }
};

/// Per-qubit counts of T gates commuted to the end of a Z-basis circuit.
struct TLedger {
    std::vector<uint64_t> counts;

    explicit TLedger(size_t n = 0) : counts(n, 0) {
    }
    uint64_t residual() const {
        uint64_t k = 0;
        for (uint64_t c : counts) k += c % 2;
        return k;
    }
};

enum class EventKind { CZ, T, MeasureX, MeasureZ, Clifford2Q };

struct Event {
    uint64_t t;
    EventKind kind;
    uint32_t q0;
    uint32_t q1 = 0;
    int outcome = 0;
};

/// A T gate bumps N_i; a Z measurement on i clears it, since the gates before
/// it only add a phase to the projected branch.
inline void absorb_t_gates(const CircuitConfig &cfg, TLedger &ledger, const Event &e) {
    if (cfg.model != Model::ZBasisMagic) {
        fail(ErrorKind::WrongModel, "T absorption needs the z-basis-magic model");
    }
    switch (e.kind) {
        case EventKind::T: ledger.counts.at(e.q0)++; break;
        case EventKind::MeasureZ: ledger.counts.at(e.q0) = 0; break;
        case EventKind::MeasureX: fail(ErrorKind::WrongModel, "X measurement in the z-basis-magic model");
        default: break;
    }
}

/// Mutable per-trajectory state. `state` is the main engine; in the Z-basis
/// model it stays Clifford (T gates go to the ledger) and `shadow`, when
/// present, carries the same circuit with T applied in place.
struct TrajectoryState {
    LrsdState state;
    TLedger ledger;
    std::optional<LrsdState> shadow;
    size_t system = 0;  // qubits 0..system-1 take part in the dynamics
    std::optional<size_t> ancilla;
    uint64_t t = 0;
    std::vector<Event> events;
};

inline TrajectoryState initial_state(const CircuitConfig &cfg) {
    TrajectoryState ts{LrsdState::plus_state(cfg.L), TLedger(cfg.L), std::nullopt, cfg.L, std::nullopt, 0, {}};
    ts.state.set_cutoff(cfg.epsilon);
    if (cfg.model == Model::ZBasisMagic && cfg.track_terms) {
        ts.shadow = ts.state;
    }
    return ts;
}

namespace detail {

inline void record(const CircuitConfig &cfg, TrajectoryState &ts, const Event &e) {
    if (cfg.log_events) ts.events.push_back(e);
}

inline void apply_t_event(const CircuitConfig &cfg, TrajectoryState &ts, uint32_t q) {
    Event e{ts.t, EventKind::T, q};
    if (cfg.model == Model::ZBasisMagic) {
        absorb_t_gates(cfg, ts.ledger, e);
        if (ts.shadow) ts.shadow->apply_t(q);
    } else {
        ts.state.apply_t(q);
    }
    record(cfg, ts, e);
}

}  // namespace detail

/// One time step. Draw order from the stream: CZ coin, CZ pair; T coin(s),
/// T qubit; measurement coin, qubit, basis, outcome.
inline void step(const CircuitConfig &cfg, TrajectoryState &ts, Rng &rng) {
    const uint32_t n = static_cast<uint32_t>(ts.system);
    if (rng.coin()) {
        auto [a, b] = rng.distinct_pair(n);
        ts.state.cz(a, b);
        if (ts.shadow) ts.shadow->cz(a, b);
        detail::record(cfg, ts, {ts.t, EventKind::CZ, a, b});
    }
    const double p_t = cfg.p_t();
    if (p_t > 0) {
        if (cfg.t_mode == TMode::Single) {
            if (rng.bernoulli(p_t)) {
                detail::apply_t_event(cfg, ts, static_cast<uint32_t>(rng.below(n)));
            }
        } else {
            for (uint32_t q = 0; q < n; q++) {
                if (rng.bernoulli(p_t)) detail::apply_t_event(cfg, ts, q);
            }
        }
    }
    if (rng.bernoulli(cfg.p_m)) {
        uint32_t q = static_cast<uint32_t>(rng.below(n));
        bool x_basis = rng.bernoulli(cfg.p_xz);
        const size_t total = ts.state.n_qubits();
        PauliString p = PauliString::single(total, q, x_basis ? Letter::X : Letter::Z);
        MeasurementOutcome m = ts.state.measure(p, std::nullopt, &rng);
        if (ts.shadow) {
            // Z outcomes have the same law with or without the diagonal T gates.
            ts.shadow->measure(p, m.outcome, nullptr);
        }
        Event e{ts.t, x_basis ? EventKind::MeasureX : EventKind::MeasureZ, q, 0, m.outcome};
        if (cfg.model == Model::ZBasisMagic) absorb_t_gates(cfg, ts.ledger, e);
        if (!x_basis) {
            // Rotate |+-z> to |+x>.
            if (m.outcome < 0) {
                ts.state.x(q);
                if (ts.shadow) ts.shadow->x(q);
            }
            ts.state.h(q);
            if (ts.shadow) ts.shadow->h(q);
        }
        detail::record(cfg, ts, e);
    }
    ts.t++;
}

inline size_t scrambling_gate_count(size_t L) {
    return static_cast<size_t>(std::ceil(std::sqrt(10.0) * static_cast<double>(L)));
}

/// |+>^L system plus an ancilla (index L) sharing a Bell pair with a random
/// system qubit, followed by ceil(sqrt(10) L) random two-qubit Cliffords on
/// random system pairs.
inline TrajectoryState prepare_purification(const CircuitConfig &cfg, Rng &rng) {
    if (cfg.model != Model::XBasisPurification) {
        fail(ErrorKind::WrongModel, "purification setup needs the x-basis-purification model");
    }
    const size_t n = cfg.L;
    StabilizerTableau t = StabilizerTableau::plus_state(n + 1);
    t.h(n);  // ancilla to |0>
    uint32_t partner = static_cast<uint32_t>(rng.below(n));
    t.cx(partner, n);
    for (size_t k = 0; k < scrambling_gate_count(n); k++) {
        auto [a, b] = rng.distinct_pair(static_cast<uint32_t>(n));
        t.apply(sample_two_qubit_clifford(rng, a, b));
    }
    TrajectoryState ts{LrsdState(std::move(t)), TLedger(n), std::nullopt, n, n, 0, {}};
    ts.state.set_cutoff(cfg.epsilon);
    return ts;
}

struct Sample {
    uint64_t t;
    double s_q;  // NaN outside the purification model
    size_t n_terms;
    size_t entries;
};

struct TrajectoryRecord {
    size_t index = 0;
    uint64_t seed = 0;
    std::vector<Sample> samples;
    int n_max = -1;
    double s_mm = std::numeric_limits<double>::quiet_NaN();
    int nullity = -1;        // Bell-sampled, z-basis-magic
    int nullity_terms = -1;  // read off the in-place LRSD, when tracked
    uint64_t residual_t = 0;
    size_t bell_steps = 0;
    std::optional<uint64_t> purified_at;
    bool discarded = false;
    std::string error;
    std::vector<Event> events;
};

namespace detail {

inline Sample observe(const TrajectoryState &ts) {
    const LrsdState &s = ts.shadow ? *ts.shadow : ts.state;
    double s_q = ts.ancilla ? ancilla_entropy(ts.state, *ts.ancilla) : std::numeric_limits<double>::quiet_NaN();
    return {ts.t, s_q, s.n_terms(), s.entry_count()};
}

inline bool is_clifford(const LrsdState &s) {
    return s.n_terms() == 1 && s.terms()[0].pauli.is_identity();
}

}  // namespace detail

/// Runs one trajectory with stream derive_seed(cfg.seed, index).
inline TrajectoryRecord run_trajectory(const CircuitConfig &cfg, size_t index) {
    cfg.validate();
    TrajectoryRecord rec;
    rec.index = index;
    rec.seed = derive_seed(cfg.seed, index);
    Rng rng(rec.seed);
    try {
        TrajectoryState ts =
            cfg.model == Model::XBasisPurification ? prepare_purification(cfg, rng) : initial_state(cfg);
        const uint64_t total = cfg.steps();
        const uint64_t cadence = cfg.cadence();
        rec.samples.push_back(detail::observe(ts));
        while (ts.t < total) {
            step(cfg, ts, rng);
            if (ts.t % cadence == 0 || ts.t == total) {
                rec.samples.push_back(detail::observe(ts));
                if (ts.ancilla && cfg.stop_when_pure && rec.samples.back().s_q < 1e-12) {
                    rec.purified_at = ts.t;
                    break;
                }
            }
        }
        if (detail::is_clifford(ts.state)) {
            StabilizerTableau system_part = ts.state.tableau();
            if (!ts.ancilla) {
                GraphForm form = to_graph_state(system_part);
                auto parts = clusters(form.graph);
                rec.n_max = static_cast<int>(n_max(parts));
                if (cfg.max_min) rec.s_mm = max_min_entropy(system_part, parts, 1.0, rec.seed);
            }
        }
        if (cfg.model == Model::ZBasisMagic) {
            rec.residual_t = ts.ledger.residual();
            BellForm f = build_bell_form(ts.state.tableau(), ts.ledger.counts);
            NullityEstimate e = sample_until_converged(f, rng, ConvergencePolicy::for_size(cfg.L));
            rec.nullity = e.nullity;
            rec.bell_steps = e.steps;
            if (ts.shadow) rec.nullity_terms = lrsd_nullity(*ts.shadow);
        }
        rec.events = std::move(ts.events);
    } catch (const Error &e) {
        rec.discarded = true;
        rec.error = std::string(e.what());
    }
    return rec;
}

/// Runs n_traj trajectories on a worker pool; output is ordered by index and
/// independent of the thread count.
inline std::vector<TrajectoryRecord> run_ensemble(const CircuitConfig &cfg, size_t threads = 1,
                                                  size_t first_index = 0) {
    cfg.validate();
    std::vector<TrajectoryRecord> out(cfg.n_traj);
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < cfg.n_traj; i = next++) {
            out[i] = run_trajectory(cfg, first_index + i);
        }
    };
    threads = std::max<size_t>(1, std::min(threads, cfg.n_traj));
    if (threads == 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (size_t k = 0; k < threads; k++) pool.emplace_back(worker);
    for (auto &th : pool) th.join();
    return out;
}

}  // namespace lrsd

#endif
