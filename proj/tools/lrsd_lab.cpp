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
// lrsd_lab: run ensembles, fit, collapse, verify and plot.
//
// Exit codes: 0 ok, 1 failure (verification or runtime), 2 usage.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrsd/analysis.hpp"
#include "lrsd/circuits.hpp"
#include "lrsd/experiments.hpp"
#include "lrsd/io.hpp"
#include "lrsd/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lrsd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Common {
    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed;
    std::optional<size_t> threads;
    std::optional<double> epsilon;
    std::vector<std::string> sets;
    std::vector<std::string> grid;
};

size_t resolve_threads(const Common &c) {
    if (c.threads) return std::max<size_t>(1, *c.threads);
    if (const char *env = std::getenv("LRSD_LAB_THREADS")) {
        char *end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0' || v == 0) {
            fail(ErrorKind::InvalidConfig, "LRSD_LAB_THREADS must be a positive integer");
        }
        return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

json parse_value(const std::string &text) {
    try {
        return json::parse(text);
    } catch (const json::exception &) {
        return text;
    }
}

std::pair<std::string, std::string> split_assignment(const std::string &s) {
    size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::InvalidConfig, "expected KEY=VALUE, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidConfig, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        fail(ErrorKind::InvalidConfig, path + ": " + e.what());
    }
}

/// defaults <- config file <- --set <- --seed/--epsilon.
json config_json(const Common &c, json defaults = json::object()) {
    json j = std::move(defaults);
    if (!c.config_path.empty()) {
        json file = read_json_file(c.config_path);
        if (!file.is_object()) fail(ErrorKind::InvalidConfig, "config must be a JSON object");
        j.update(file);
    }
    for (const std::string &s : c.sets) {
        auto [k, v] = split_assignment(s);
        j[k] = parse_value(v);
    }
    if (c.seed) j["seed"] = *c.seed;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    return j;
}

CircuitConfig make_config(const Common &c, json defaults, std::optional<Model> need = std::nullopt) {
    CircuitConfig cfg = CircuitConfig::from_json(config_json(c, std::move(defaults)));
    if (need && cfg.model != *need) {
        fail(ErrorKind::InvalidConfig, std::string("this command needs model ") + model_name(*need));
    }
    return cfg;
}

void write_text(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(ErrorKind::InvalidConfig, "cannot write '" + path.string() + "'");
        out << text;
    }
    fs::rename(tmp, path);
}

std::string records_csv(const CircuitConfig &cfg, const std::vector<TrajectoryRecord> &recs) {
    std::ostringstream out;
    io::write_records_csv(out, cfg, recs);
    return out.str();
}

/// Writes <stem>.csv and <stem>.json under `dir`.
void write_records(const fs::path &dir, const std::string &stem, const CircuitConfig &cfg,
                   const std::vector<TrajectoryRecord> &recs) {
    write_text(dir / (stem + ".csv"), records_csv(cfg, recs));
    write_text(dir / (stem + ".json"), io::records_summary(cfg, recs).dump(2) + "\n");
}

struct MeanSem {
    double mean = 0, sem = 0;
    size_t n = 0;
};

MeanSem mean_sem(const std::vector<double> &v) {
    MeanSem m;
    m.n = v.size();
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= double(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.sem = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
    }
    return m;
}

json stat_json(const std::vector<double> &v) {
    MeanSem m = mean_sem(v);
    return {{"mean", m.mean}, {"sem", m.sem}, {"n", m.n}};
}

/// Ensemble averages of the per-trajectory scalars.
json aggregate(const CircuitConfig &cfg, const std::vector<TrajectoryRecord> &recs) {
    std::vector<double> n_max, s_mm, nullity, nullity_terms, residual, terms, entries, purified;
    size_t discarded = 0;
    for (const auto &r : recs) {
        if (r.discarded) {
            discarded++;
            continue;
        }
        if (r.n_max >= 0) n_max.push_back(r.n_max);
        if (!std::isnan(r.s_mm)) s_mm.push_back(r.s_mm);
        if (r.nullity >= 0) nullity.push_back(r.nullity);
        if (r.nullity_terms >= 0) nullity_terms.push_back(r.nullity_terms);
        if (cfg.model == Model::ZBasisMagic) residual.push_back(double(r.residual_t));
        if (!r.samples.empty()) {
            terms.push_back(double(r.samples.back().n_terms));
            entries.push_back(double(r.samples.back().entries));
        }
        if (r.purified_at) purified.push_back(double(*r.purified_at));
    }
    json j = {{"config", cfg.to_json()}, {"config_hash", cfg.hash()}, {"discarded", discarded}};
    auto put = [&](const char *key, const std::vector<double> &v) {
        if (!v.empty()) j[key] = stat_json(v);
    };
    put("n_max", n_max);
    put("s_mm", s_mm);
    put("nullity", nullity);
    put("nullity_terms", nullity_terms);
    put("residual_t", residual);
    put("final_terms", terms);
    put("final_entries", entries);
    put("purified_at", purified);
    return j;
}

SeriesEnsemble series_of(const CircuitConfig &cfg, const std::vector<TrajectoryRecord> &recs) {
    std::istringstream in(records_csv(cfg, recs));
    return io::sq_series(io::read_records_csv(in), cfg);
}

json decay_json(const DecayFit &f) {
    return {{"tau", f.tau}, {"tau_err", f.tau_err}, {"amplitude", f.amplitude},
            {"r2", f.r2},   {"first", f.first},     {"last", f.last}};
}

json fit_json(const FitResult &f) {
    return {{"model", fit_model_name(f.model)}, {"a", f.a}, {"b", f.b},     {"gamma", f.gamma},
            {"chi2", f.chi2},                   {"dof", f.dof}, {"chi2_dof", f.chi2_dof}, {"r2", f.r2}};
}

void emit(const Common &c, const std::string &file, const json &j) {
    std::cout << j.dump(2) << "\n";
    if (!c.out_dir.empty()) write_text(fs::path(c.out_dir) / file, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_run(const Common &c, json defaults, std::optional<Model> need, const std::string &stem) {
    CircuitConfig cfg = make_config(c, std::move(defaults), need);
    auto recs = run_ensemble(cfg, resolve_threads(c));
    json j = aggregate(cfg, recs);
    if (cfg.model == Model::XBasisPurification) {
        try {
            j["decay"] = decay_json(fit_decay(series_of(cfg, recs)));
        } catch (const Error &e) {
            j["decay"] = {{"error", std::string(e.what())}};
        }
    }
    if (!c.out_dir.empty()) write_records(c.out_dir, stem, cfg, recs);
    emit(c, stem + "-aggregate.json", j);
    return kExitOk;
}

struct GridAxis {
    std::string key;
    std::vector<json> values;
};

std::vector<GridAxis> parse_grid(const std::vector<std::string> &specs) {
    std::vector<GridAxis> axes;
    for (const std::string &s : specs) {
        auto [key, list] = split_assignment(s);
        GridAxis a{key, {}};
        std::stringstream ss(list);
        for (std::string v; std::getline(ss, v, ',');) {
            if (v.empty()) fail(ErrorKind::InvalidConfig, "empty grid value for " + key);
            a.values.push_back(parse_value(v));
        }
        if (a.values.empty()) fail(ErrorKind::InvalidConfig, "grid axis " + key + " has no values");
        for (const auto &b : axes) {
            if (b.key == key) fail(ErrorKind::InvalidConfig, "grid axis " + key + " given twice");
        }
        axes.push_back(std::move(a));
    }
    return axes;
}

/// A point is reusable when its CSV parses, carries the same config hash and
/// its summary is present.
bool point_complete(const fs::path &csv, const fs::path &summary, const std::string &hash, json &summary_out) {
    if (!fs::exists(csv) || !fs::exists(summary)) return false;
    try {
        std::ifstream in(csv);
        io::CsvTable t = io::read_records_csv(in);
        if (t.config_hash != hash) return false;
        std::ifstream sin(summary);
        summary_out = json::parse(sin);
        return summary_out.value("config_hash", std::string()) == hash;
    } catch (const std::exception &) {
        return false;
    }
}

int cmd_sweep(const Common &c) {
    if (c.out_dir.empty()) fail(ErrorKind::InvalidConfig, "sweep needs --out");
    std::vector<GridAxis> axes = parse_grid(c.grid);
    json base = config_json(c);
    size_t threads = resolve_threads(c);

    size_t total = 1;
    for (const auto &a : axes) total *= a.values.size();
    json points = json::array();
    size_t computed = 0, resumed = 0;
    for (size_t k = 0; k < total; k++) {
        json cj = base, values = json::object();
        size_t rest = k;
        for (size_t a = axes.size(); a-- > 0;) {
            const json &v = axes[a].values[rest % axes[a].values.size()];
            rest /= axes[a].values.size();
            cj[axes[a].key] = v;
            values[axes[a].key] = v;
        }
        CircuitConfig cfg = CircuitConfig::from_json(cj);
        std::string stem = "point-" + cfg.hash();
        fs::path csv = fs::path(c.out_dir) / (stem + ".csv"), summary = fs::path(c.out_dir) / (stem + ".json");
        json sj;
        if (point_complete(csv, summary, cfg.hash(), sj)) {
            resumed++;
            std::cerr << "resume " << stem << "\n";
        } else {
            auto recs = run_ensemble(cfg, threads);
            write_records(c.out_dir, stem, cfg, recs);
            sj = io::records_summary(cfg, recs);
            computed++;
            std::cerr << "computed " << stem << "\n";
        }
        json discarded = json::array();
        for (const auto &t : sj["trajectories"]) {
            if (t.value("discarded", false)) discarded.push_back({{"index", t["index"]}, {"error", t["error"]}});
        }
        points.push_back({{"values", values},
                          {"config", cfg.to_json()},
                          {"config_hash", cfg.hash()},
                          {"csv", stem + ".csv"},
                          {"summary", stem + ".json"},
                          {"discarded", discarded}});
    }
    json grid = json::object();
    for (const auto &a : axes) grid[a.key] = a.values;
    json manifest = {{"format", "lrsd-sweep"}, {"version", 1}, {"base", base}, {"grid", grid}, {"points", points}};
    write_text(fs::path(c.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "points=" << total << " computed=" << computed << " resumed=" << resumed << "\n";
    return kExitOk;
}

io::Table read_table_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::SchemaMismatch, "cannot open '" + path + "'");
    return io::read_table(in);
}

io::CsvTable read_records_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::SchemaMismatch, "cannot open '" + path + "'");
    return io::read_records_csv(in);
}

/// Config for a records CSV: --config/--set if given, else the sibling summary.
CircuitConfig config_for_records(const Common &c, const std::string &csv) {
    if (!c.config_path.empty() || !c.sets.empty()) return make_config(c, json::object());
    fs::path summary = fs::path(csv).replace_extension(".json");
    if (!fs::exists(summary)) {
        fail(ErrorKind::SchemaMismatch, "no summary next to '" + csv + "'; pass --config");
    }
    std::ifstream in(summary);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        fail(ErrorKind::SchemaMismatch, summary.string() + ": " + e.what());
    }
    if (j.value("format", std::string()) != "lrsd-summary") fail(ErrorKind::SchemaMismatch, "not a summary file");
    json cfg = j["config"];
    return CircuitConfig::from_json(cfg);
}

int cmd_fit(const Common &c, const std::string &kind, const std::vector<std::string> &inputs,
            const std::string &y_col, const std::string &err_col) {
    if (inputs.empty()) fail(ErrorKind::SchemaMismatch, "fit needs --input");
    if (kind == "decay") {
        json out = json::array();
        for (const std::string &path : inputs) {
            CircuitConfig cfg = config_for_records(c, path);
            io::CsvTable t = read_records_file(path);
            if (t.config_hash != cfg.hash()) fail(ErrorKind::SchemaMismatch, path + ": config hash differs");
            DecayFit f = fit_decay(io::sq_series(t, cfg));
            json j = decay_json(f);
            j["input"] = path;
            j["L"] = cfg.L;
            j["p_m"] = cfg.p_m;
            out.push_back(j);
        }
        emit(c, "fit-decay.json", out);
        return kExitOk;
    }
    if (kind == "scaling") {
        io::Table t = read_table_file(inputs.front());
        std::vector<double> err = t.has(err_col) ? t.col(err_col) : std::vector<double>{};
        ScalingFits f = fit_scaling(t.col("L"), t.col(y_col), err);
        json j = {{"best", fit_model_name(f.best)},
                  {"power", fit_json(f.power)},
                  {"area", fit_json(f.area)},
                  {"log", fit_json(f.log)}};
        emit(c, "fit-scaling.json", j);
        return kExitOk;
    }
    fail(ErrorKind::InvalidConfig, "fit kind must be decay or scaling");
}

std::pair<double, double> parse_range(const std::string &s, std::pair<double, double> dflt) {
    if (s.empty()) return dflt;
    double lo, hi;
    char comma;
    std::istringstream in(s);
    if (!(in >> lo >> comma >> hi) || comma != ',' || !(lo < hi)) {
        fail(ErrorKind::InvalidConfig, "range must be LO,HI with LO < HI");
    }
    return {lo, hi};
}

std::vector<CollapsePoint> collapse_points(const io::Table &t) {
    std::vector<CollapsePoint> pts;
    auto L = t.col("L"), x = t.col("x"), y = t.col("y");
    for (size_t i = 0; i < L.size(); i++) pts.push_back({L[i], x[i], y[i]});
    return pts;
}

int cmd_collapse(const Common &c, const std::string &input, const std::string &xr, const std::string &ar,
                 const std::string &br) {
    if (input.empty()) fail(ErrorKind::SchemaMismatch, "collapse needs --input");
    std::vector<CollapsePoint> pts = collapse_points(read_table_file(input));
    CollapseBounds b;
    std::tie(b.x_c_lo, b.x_c_hi) = parse_range(xr, {b.x_c_lo, b.x_c_hi});
    std::tie(b.a_lo, b.a_hi) = parse_range(ar, {b.a_lo, b.a_hi});
    std::tie(b.b_lo, b.b_hi) = parse_range(br, {b.b_lo, b.b_hi});
    CollapseParams start{(b.x_c_lo + b.x_c_hi) / 2, (b.a_lo + b.a_hi) / 2, (b.b_lo + b.b_hi) / 2};
    CollapseResult r = collapse(pts, start, b);
    emit(c, "collapse.json",
         {{"x_c", r.params.x_c}, {"a", r.params.a}, {"b", r.params.b}, {"quality", r.quality}});
    return kExitOk;
}

int cmd_verify(const Common &c, const std::string &level, const std::string &inject) {
    experiments::Level lv;
    if (level == "fast") lv = experiments::Level::Fast;
    else if (level == "full") lv = experiments::Level::Full;
    else fail(ErrorKind::InvalidConfig, "--level must be fast or full");
    oracle::Fault fault;
    if (inject == "none") fault = oracle::Fault::None;
    else if (inject == "cz-sign") fault = oracle::Fault::CzSign;
    else fail(ErrorKind::InvalidConfig, "--inject must be none or cz-sign");
    auto checks = experiments::verify(lv, c.seed.value_or(20260101), fault, resolve_threads(c));
    bool ok = true;
    json report = json::array();
    for (const auto &k : checks) {
        std::cout << (k.pass ? "PASS " : "FAIL ") << k.name << "  " << k.detail << "\n";
        ok = ok && k.pass;
        report.push_back({{"name", k.name}, {"pass", k.pass}, {"detail", k.detail}});
    }
    if (!c.out_dir.empty()) write_text(fs::path(c.out_dir) / "verify.json", report.dump(2) + "\n");
    std::cout << (ok ? "verify: pass" : "verify: FAIL") << "\n";
    return ok ? kExitOk : kExitFail;
}

std::string fmt_label(const char *name, double v) {
    return std::string(name) + "=" + io::fmt_double(v);
}

/// Groups table rows into one series per L, sorted by x.
std::vector<plot::Series> series_by_L(const io::Table &t, const std::string &xc, const std::string &yc) {
    std::map<double, std::vector<std::array<double, 3>>> by;
    auto L = t.col("L"), x = t.col(xc), y = t.col(yc);
    std::vector<double> e = t.has("err") ? t.col("err") : std::vector<double>(L.size(), 0.0);
    for (size_t i = 0; i < L.size(); i++) by[L[i]].push_back({x[i], y[i], e[i]});
    std::vector<plot::Series> out;
    for (auto &[l, rows] : by) {
        std::sort(rows.begin(), rows.end());
        plot::Series s;
        s.label = fmt_label("L", l);
        for (const auto &r : rows) {
            s.x.push_back(r[0]);
            s.y.push_back(r[1]);
            s.err.push_back(r[2]);
        }
        out.push_back(std::move(s));
    }
    return out;
}

int cmd_plot(const Common &c, const std::string &kind, const std::vector<std::string> &inputs,
             const std::string &output, const std::string &params, bool ref_2l) {
    if (inputs.empty()) fail(ErrorKind::SchemaMismatch, "plot needs at least one --input");
    plot::Figure fig;
    if (kind == "decay") {
        fig.title = "S_Q(t)";
        fig.x_label = "t";
        fig.y_label = "S_Q";
        fig.log_y = true;
        for (const std::string &path : inputs) {
            CircuitConfig cfg = config_for_records(c, path);
            SeriesEnsemble s = io::sq_series(read_records_file(path), cfg);
            plot::Series data;
            data.label = fmt_label("L", double(cfg.L)) + " " + fmt_label("p_m", cfg.p_m);
            for (size_t i = 0; i < s.t.size(); i++) {
                if (!(s.mean[i] > 0)) continue;  // log axis
                data.x.push_back(s.t[i]);
                data.y.push_back(s.mean[i]);
                data.err.push_back(s.sem[i]);
            }
            fig.series.push_back(data);
            try {
                DecayFit f = fit_decay(s);
                plot::Series line;
                line.label = "fit tau=" + io::fmt_double(std::round(f.tau * 100) / 100);
                line.dashed = true;
                for (size_t i = f.first; i <= f.last; i++) {
                    line.x.push_back(s.t[i]);
                    line.y.push_back(f.amplitude * std::exp(-s.t[i] / f.tau));
                }
                fig.series.push_back(line);
            } catch (const Error &) {
                // No valid window: plot the data alone.
            }
        }
    } else if (kind == "crossing") {
        io::Table t = read_table_file(inputs.front());
        fig.title = "crossing";
        fig.x_label = "x";
        fig.y_label = "y";
        fig.series = series_by_L(t, "x", "y");
    } else if (kind == "collapse") {
        io::Table t = read_table_file(inputs.front());
        double xc = 0, a = 1, b = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(params);
        if (params.empty() || !(in >> xc >> c1 >> a >> c2 >> b) || c1 != ',' || c2 != ',') {
            fail(ErrorKind::InvalidConfig, "collapse plot needs --params X_C,A,B");
        }
        fig.title = "collapse x_c=" + io::fmt_double(xc) + " a=" + io::fmt_double(a) + " b=" + io::fmt_double(b);
        fig.x_label = "(x - x_c) L^a";
        fig.y_label = "y L^-b";
        fig.series = series_by_L(t, "x", "y");
        for (auto &s : fig.series) {
            double L = std::stod(s.label.substr(2));
            for (size_t i = 0; i < s.x.size(); i++) {
                s.x[i] = (s.x[i] - xc) * std::pow(L, a);
                s.y[i] *= std::pow(L, -b);
                s.err[i] *= std::pow(L, -b);
            }
        }
    } else if (kind == "scaling") {
        io::Table t = read_table_file(inputs.front());
        fig.title = "scaling";
        fig.x_label = "L";
        fig.y_label = "y";
        fig.log_x = true;
        fig.log_y = true;
        auto L = t.col("L"), y = t.col("y");
        std::vector<double> err = t.has("err") ? t.col("err") : std::vector<double>(L.size(), 0.0);
        plot::Series data{"data", L, y, err, false};
        fig.series.push_back(data);
        try {
            ScalingFits f = fit_scaling(L, y, t.has("err") ? err : std::vector<double>{});
            plot::Series line;
            line.label = std::string("fit ") + fit_model_name(f.best);
            line.dashed = true;
            for (double l : L) {
                line.x.push_back(l);
                line.y.push_back(f.chosen().eval(l));
            }
            fig.series.push_back(line);
        } catch (const Error &) {
            // Too few sizes to classify.
        }
        if (ref_2l) {
            plot::Series ref;
            ref.label = "2^L";
            ref.dashed = true;
            for (double l : L) {
                ref.x.push_back(l);
                ref.y.push_back(std::ldexp(1.0, int(l)));
            }
            fig.series.push_back(ref);
        }
    } else {
        fail(ErrorKind::InvalidConfig, "plot kind must be decay, crossing, collapse or scaling");
    }
    std::string svg = plot::render_svg(fig);
    fs::path target = !output.empty() ? fs::path(output)
                      : !c.out_dir.empty() ? fs::path(c.out_dir) / (kind + ".svg")
                                           : fs::path();
    if (target.empty()) {
        std::cout << svg;
    } else {
        write_text(target, svg);
        std::cerr << "wrote " << target.string() << "\n";
    }
    return kExitOk;
}

bool usage_kind(ErrorKind k) {
    return k == ErrorKind::InvalidConfig || k == ErrorKind::SchemaMismatch || k == ErrorKind::ParseError;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"lrsd_lab: monitored near-Clifford circuits with the LRSD simulator"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--config", c.config_path, "circuit config JSON");
    app.add_option("--out", c.out_dir, "output directory");
    app.add_option("--seed", c.seed, "master seed");
    app.add_option("--threads", c.threads, "worker threads (fallback: LRSD_LAB_THREADS, then all cores)");
    app.add_option("--epsilon", c.epsilon, "coefficient truncation threshold");
    app.add_option("--set", c.sets, "config override KEY=VALUE (repeatable)");
    app.add_option("--grid", c.grid, "sweep axis KEY=V1,V2,... (repeatable)");

    auto sub = [&](const char *name, const char *help) {
        CLI::App *s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    CLI::App *simulate = sub("simulate", "run an ensemble for one config");
    CLI::App *sweep = sub("sweep", "run a grid of configs, resumable");
    CLI::App *purification = sub("purification", "x-basis purification ensemble and S_Q decay fit");
    CLI::App *magic = sub("magic", "z-basis magic ensemble: Bell-sampled nullity");
    CLI::App *cluster = sub("cluster", "Clifford cluster ensemble: n_max and S_mm");

    CLI::App *fit = sub("fit", "decay fit of records, or scaling fit of an L,y table");
    std::string fit_kind = "scaling", y_col = "y", err_col = "err";
    std::vector<std::string> fit_inputs;
    fit->add_option("--kind", fit_kind, "decay | scaling");
    fit->add_option("--input", fit_inputs, "records CSV (decay) or table (scaling)");
    fit->add_option("--column", y_col, "table column to fit");
    fit->add_option("--err-column", err_col, "table column with standard errors");

    CLI::App *coll = sub("collapse", "finite-size collapse of an L,x,y table");
    std::string coll_input, xr, ar, br;
    coll->add_option("--input", coll_input, "table with columns L,x,y");
    coll->add_option("--x-c", xr, "search range LO,HI for x_c");
    coll->add_option("--a", ar, "search range LO,HI for the x exponent");
    coll->add_option("--b", br, "search range LO,HI for the y exponent");

    CLI::App *verify = sub("verify", "oracle, nullity and invariant suites");
    std::string level = "fast", inject = "none";
    verify->add_option("--level", level, "fast | full");
    verify->add_option("--inject", inject, "none | cz-sign (negative control)");

    CLI::App *plot = sub("plot", "deterministic SVG plots");
    std::string plot_kind, plot_output, plot_params;
    std::vector<std::string> plot_inputs;
    bool ref_2l = false;
    plot->add_option("--kind", plot_kind, "decay | crossing | collapse | scaling")->required();
    plot->add_option("--input", plot_inputs, "records CSVs (decay) or a table");
    plot->add_option("--output", plot_output, "SVG path (default <out>/<kind>.svg, else stdout)");
    plot->add_option("--params", plot_params, "collapse parameters X_C,A,B");
    plot->add_flag("--reference-2L", ref_2l, "scaling: add a dashed 2^L line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_run(c, json::object(), std::nullopt, "records");
        if (*purification) {
            return cmd_run(c, {{"model", "x-basis-purification"}, {"p_xz", 1.0}}, Model::XBasisPurification,
                           "purification");
        }
        if (*magic) return cmd_run(c, {{"model", "z-basis-magic"}}, Model::ZBasisMagic, "magic");
        if (*cluster) {
            return cmd_run(c, {{"model", "clifford-cluster"}, {"max_min", true}}, Model::CliffordCluster, "cluster");
        }
        if (*sweep) return cmd_sweep(c);
        if (*fit) return cmd_fit(c, fit_kind, fit_inputs, y_col, err_col);
        if (*coll) return cmd_collapse(c, coll_input, xr, ar, br);
        if (*verify) return cmd_verify(c, level, inject);
        if (*plot) return cmd_plot(c, plot_kind, plot_inputs, plot_output, plot_params, ref_2l);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_kind(e.kind()) ? kExitUsage : kExitFail;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
