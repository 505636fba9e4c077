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

#include <sstream>

#include "lrsd/io.hpp"
#include "lrsd/plot.hpp"
#include "test_util.hpp"

using namespace lrsd;
using namespace lrsd::testing;

namespace {

ErrorKind kind_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.kind();
    }
    return ErrorKind::ParseError;
}

CircuitConfig small_purification() {
    CircuitConfig c;
    c.L = 6;
    c.model = Model::XBasisPurification;
    c.p_m = 0.3;
    c.p_xz = 1.0;
    c.eta = 2.0;
    c.beta = 2.0;
    c.n_traj = 4;
    c.seed = 99;
    return c;
}

}  // namespace

TEST(io, checkpoint_round_trip) {
    Rng rng(8);
    for (int trial = 0; trial < 10; trial++) {
        size_t n = 2 + rng.below(4);
        LrsdState s = random_lrsd(n, rng, 40, trial % 2 == 1);
        std::string text = io::checkpoint(s).dump();
        LrsdState back = io::restore(io::json::parse(text));
        ASSERT_EQ(back.n_terms(), s.n_terms());
        for (size_t k = 0; k < s.n_terms(); k++) {
            EXPECT_EQ(back.terms()[k].coefficient, s.terms()[k].coefficient);
            EXPECT_EQ(back.terms()[k].pauli, s.terms()[k].pauli);
        }
        EXPECT_EQ(max_abs_diff(oracle::assemble(back), oracle::assemble(s)), 0.0);
        EXPECT_EQ(io::checkpoint(back).dump(), text);
    }
}

TEST(io, checkpoint_rejects_foreign_input) {
    io::json j = io::checkpoint(LrsdState::plus_state(2));
    j["version"] = 99;
    EXPECT_EQ(kind_of([&] { io::restore(j); }), ErrorKind::SchemaMismatch);
    j = io::checkpoint(LrsdState::plus_state(2));
    j["tableau"]["stabilizers"][0] = "10|00|5";
    EXPECT_EQ(kind_of([&] { io::restore(j); }), ErrorKind::ParseError);
    j = io::checkpoint(LrsdState::plus_state(2));
    j["tableau"]["stabilizers"][0] = "01|00|0";  // duplicate generator
    EXPECT_THROW(io::restore(j), Error);
}

TEST(io, records_csv_round_trip_and_determinism) {
    CircuitConfig cfg = small_purification();
    auto recs = run_ensemble(cfg, 1);
    std::ostringstream a, b;
    io::write_records_csv(a, cfg, recs);
    io::write_records_csv(b, cfg, run_ensemble(cfg, 2));
    EXPECT_EQ(a.str(), b.str());

    std::istringstream in(a.str());
    io::CsvTable t = io::read_records_csv(in);
    EXPECT_EQ(t.config_hash, cfg.hash());
    size_t expected = 0;
    for (const auto &r : recs) expected += r.samples.size();
    ASSERT_EQ(t.rows.size(), expected);
    EXPECT_EQ(t.rows[0].traj, 0u);
    EXPECT_EQ(t.rows[0].t, recs[0].samples[0].t);
    EXPECT_EQ(t.rows[0].s_q, recs[0].samples[0].s_q);

    SeriesEnsemble s = io::sq_series(t, cfg);
    EXPECT_EQ(s.L, cfg.L);
    EXPECT_EQ(s.count[0], cfg.n_traj);
}

TEST(io, records_csv_schema_errors) {
    CircuitConfig cfg = small_purification();
    std::ostringstream a;
    io::write_records_csv(a, cfg, run_ensemble(cfg, 1));
    std::string good = a.str();

    std::istringstream empty("");
    EXPECT_EQ(kind_of([&] { io::read_records_csv(empty); }), ErrorKind::SchemaMismatch);

    std::string truncated = good.substr(0, good.rfind("# rows="));
    std::istringstream tr(truncated);
    EXPECT_EQ(kind_of([&] { io::read_records_csv(tr); }), ErrorKind::SchemaMismatch);

    std::string tampered = good;
    size_t row = tampered.find('\n', tampered.find(io::kCsvColumns)) + 1;
    tampered[row] = tampered[row] == '0' ? '1' : '0';
    std::istringstream tp(tampered);
    EXPECT_EQ(kind_of([&] { io::read_records_csv(tp); }), ErrorKind::SchemaMismatch);

    std::string wrong_cols = good;
    wrong_cols.replace(wrong_cols.find("S_Q"), 3, "S_X");
    std::istringstream wc(wrong_cols);
    EXPECT_EQ(kind_of([&] { io::read_records_csv(wc); }), ErrorKind::SchemaMismatch);
}

TEST(io, fmt_double_round_trips) {
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5}) EXPECT_EQ(std::strtod(io::fmt_double(v).c_str(), nullptr), v);
    EXPECT_EQ(io::fmt_double(std::nan("")), "nan");
}

TEST(plot, svg_is_deterministic_and_digested) {
    plot::Figure f;
    f.title = "decay";
    f.x_label = "t";
    f.y_label = "S_Q";
    f.log_y = true;
    plot::Series s{"L=8", {0, 8, 16, 24}, {1, 0.5, 0.25, 0.125}, {0.01, 0.01, 0.01, 0.01}, false};
    plot::Series fit{"fit", {0, 24}, {1, 0.125}, {}, true};
    f.series = {s, fit};
    std::string a = plot::render_svg(f), b = plot::render_svg(f);
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("data-digest: " + plot::data_digest(f)), std::string::npos);
    EXPECT_NE(a.find("stroke-dasharray"), std::string::npos);

    std::string before = plot::data_digest(f);
    f.series[0].y[1] = 0.51;
    EXPECT_NE(plot::data_digest(f), before);
    EXPECT_NE(plot::render_svg(f), a);

    plot::Figure empty;
    EXPECT_EQ(kind_of([&] { plot::render_svg(empty); }), ErrorKind::SchemaMismatch);
}

TEST(io, table_round_trip_and_schema_errors) {
    io::Table t{{"L", "y", "err"}, {{8, 1.5, 0.1}, {16, 2.25, 0.05}}};
    std::ostringstream out;
    io::write_table(out, t);
    std::istringstream in(out.str());
    io::Table back = io::read_table(in);
    EXPECT_EQ(back.columns, t.columns);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(back.col("y"), (std::vector<double>{1.5, 2.25}));
    for (const std::string &bad : {std::string(""), std::string("L,y\n8,1\n"),
                                  std::string(io::kTableMagic) + "\nL,y\n8\n",
                                  std::string(io::kTableMagic) + "\nL,y\n"}) {
        std::istringstream s(bad);
        try {
            io::read_table(s);
            ADD_FAILURE() << "accepted: " << bad;
        } catch (const Error &e) {
            EXPECT_EQ(e.kind(), ErrorKind::SchemaMismatch);
        }
    }
}
