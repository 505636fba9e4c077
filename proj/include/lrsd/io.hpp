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
#ifndef LRSD_IO_HPP
#define LRSD_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrsd/analysis.hpp"
#include "lrsd/circuits.hpp"
#include "lrsd/error.hpp"
#include "lrsd/lrsd.hpp"
#include "lrsd/tableau.hpp"

namespace lrsd::io {

using nlohmann::json;

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char *kCsvMagic = "# lrsd-lab records v1";
inline constexpr const char *kCsvColumns = "traj,t,S_Q,n_terms,entries";

inline uint64_t fnv1a(const std::string &s, uint64_t h = 1469598103934665603ull) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(uint64_t h) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

/// Shortest round-trip text for a double; "nan" for NaN.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    for (int prec = 6; prec <= 17; prec++) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

// ---- checkpoints -----------------------------------------------------------

/// "xbits|zbits|phase" with qubit 0 first.
inline std::string row_text(const PauliString &p) {
    std::string x, z;
    for (size_t q = 0; q < p.n_qubits(); q++) {
        Letter l = p.letter(q);
        x.push_back((l == Letter::X || l == Letter::Y) ? '1' : '0');
        z.push_back((l == Letter::Z || l == Letter::Y) ? '1' : '0');
    }
    return x + "|" + z + "|" + std::to_string(int(p.phase()));
}

inline PauliString parse_row(const std::string &text, size_t n) {
    size_t a = text.find('|'), b = text.rfind('|');
    if (a == std::string::npos || a == b || a != n || b != 2 * n + 1 || b + 2 != text.size())
        fail(ErrorKind::ParseError, "bad checkpoint row '" + text + "'");
    PauliString p(n);
    for (size_t q = 0; q < n; q++) {
        char xc = text[q], zc = text[n + 1 + q];
        if ((xc != '0' && xc != '1') || (zc != '0' && zc != '1'))
            fail(ErrorKind::ParseError, "bad bit in checkpoint row '" + text + "'");
        int code = (xc == '1' ? 1 : 0) | (zc == '1' ? 2 : 0);
        p.set_letter(q, static_cast<Letter>(code));
    }
    char ph = text.back();
    if (ph < '0' || ph > '3') fail(ErrorKind::ParseError, "bad phase in checkpoint row '" + text + "'");
    p.set_phase(static_cast<uint8_t>(ph - '0'));
    return p;
}

inline json tableau_to_json(const StabilizerTableau &t) {
    auto rows = [](const std::vector<PauliString> &v) {
        json a = json::array();
        for (const auto &p : v) a.push_back(row_text(p));
        return a;
    };
    return {{"n", t.n_qubits()},
            {"stabilizers", rows(t.stabilizers())},
            {"destabilizers", rows(t.destabilizers())},
            {"logical_x", rows(t.logical_x())},
            {"logical_z", rows(t.logical_z())}};
}

inline StabilizerTableau tableau_from_json(const json &j) {
    try {
        size_t n = j.at("n").get<size_t>();
        auto rows = [&](const char *key) {
            std::vector<PauliString> out;
            for (const auto &r : j.at(key)) out.push_back(parse_row(r.get<std::string>(), n));
            return out;
        };
        StabilizerTableau t =
            StabilizerTableau::from_rows(n, rows("stabilizers"), rows("destabilizers"), rows("logical_x"), rows("logical_z"));
        t.validate();
        return t;
    } catch (const json::exception &e) {
        fail(ErrorKind::ParseError, std::string("tableau checkpoint: ") + e.what());
    }
}

inline json checkpoint(const LrsdState &s) {
    json terms = json::array();
    for (const Term &t : s.terms())
        terms.push_back({{"re", t.coefficient.real()}, {"im", t.coefficient.imag()}, {"pauli", row_text(t.pauli)}});
    return {{"format", "lrsd-checkpoint"},
            {"version", kCheckpointVersion},
            {"cutoff", s.cutoff()},
            {"tableau", tableau_to_json(s.tableau())},
            {"terms", terms}};
}

inline LrsdState restore(const json &j) {
    try {
        if (j.at("format") != "lrsd-checkpoint") fail(ErrorKind::SchemaMismatch, "not an lrsd checkpoint");
        if (j.at("version").get<int>() != kCheckpointVersion)
            fail(ErrorKind::SchemaMismatch, "unsupported checkpoint version");
        StabilizerTableau t = tableau_from_json(j.at("tableau"));
        std::vector<Term> terms;
        for (const auto &e : j.at("terms"))
            terms.push_back({cplx(e.at("re").get<double>(), e.at("im").get<double>()),
                             parse_row(e.at("pauli").get<std::string>(), t.n_qubits())});
        return LrsdState::from_parts(std::move(t), std::move(terms), j.at("cutoff").get<double>());
    } catch (const json::exception &e) {
        fail(ErrorKind::ParseError, std::string("checkpoint: ") + e.what());
    }
}

// ---- trajectory records ----------------------------------------------------

struct CsvRow {
    size_t traj = 0;
    uint64_t t = 0;
    double s_q = 0;
    size_t n_terms = 0;
    size_t entries = 0;
};

struct CsvTable {
    std::string config_hash;
    std::vector<CsvRow> rows;
};

/// Versioned header comment, column line, one row per sample, and a footer
/// with the row count and a digest of the body so truncated files are caught.
inline void write_records_csv(std::ostream &out, const CircuitConfig &cfg, const std::vector<TrajectoryRecord> &records) {
    std::string body;
    size_t n = 0;
    for (const auto &r : records) {
        if (r.discarded) continue;
        for (const auto &s : r.samples) {
            body += std::to_string(r.index) + "," + std::to_string(s.t) + "," + fmt_double(s.s_q) + "," +
                    std::to_string(s.n_terms) + "," + std::to_string(s.entries) + "\n";
            n++;
        }
    }
    out << kCsvMagic << " config=" << cfg.hash() << "\n" << kCsvColumns << "\n" << body;
    out << "# rows=" << n << " digest=" << hex64(fnv1a(body)) << "\n";
}

inline CsvTable read_records_csv(std::istream &in) {
    auto bad = [](const std::string &why) { fail(ErrorKind::SchemaMismatch, "records CSV: " + why); };
    std::string line;
    if (!std::getline(in, line)) bad("empty input");
    std::string magic = kCsvMagic;
    if (line.rfind(magic, 0) != 0) bad("missing version header");
    CsvTable table;
    size_t c = line.find("config=");
    if (c != std::string::npos) table.config_hash = line.substr(c + 7);
    if (!std::getline(in, line) || line != kCsvColumns) bad("column line differs from '" + std::string(kCsvColumns) + "'");
    std::string body;
    bool footer = false;
    while (std::getline(in, line)) {
        if (line.rfind("# rows=", 0) == 0) {
            size_t rows = 0;
            char digest[17] = {0};
            if (std::sscanf(line.c_str(), "# rows=%zu digest=%16s", &rows, digest) != 2) bad("malformed footer");
            if (rows != table.rows.size()) bad("row count does not match footer");
            if (hex64(fnv1a(body)) != digest) bad("digest mismatch");
            footer = true;
            break;
        }
        CsvRow r;
        char sq[64];
        if (std::sscanf(line.c_str(), "%zu,%lu,%63[^,],%zu,%zu", &r.traj, &r.t, sq, &r.n_terms, &r.entries) != 5)
            bad("malformed row '" + line + "'");
        r.s_q = std::string(sq) == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::strtod(sq, nullptr);
        table.rows.push_back(r);
        body += line + "\n";
    }
    if (!footer) bad("missing footer (truncated file)");
    return table;
}

/// Per-trajectory scalars, in index order.
inline json records_summary(const CircuitConfig &cfg, const std::vector<TrajectoryRecord> &records) {
    json trajs = json::array();
    size_t discarded = 0;
    for (const auto &r : records) {
        json o = {{"index", r.index}, {"seed", r.seed}, {"discarded", r.discarded}};
        if (r.discarded) {
            discarded++;
            o["error"] = r.error;
        } else {
            if (r.n_max >= 0) o["n_max"] = r.n_max;
            if (!std::isnan(r.s_mm)) o["s_mm"] = r.s_mm;
            if (r.nullity >= 0) o["nullity"] = r.nullity;
            if (r.nullity_terms >= 0) o["nullity_terms"] = r.nullity_terms;
            o["residual_t"] = r.residual_t;
            if (r.bell_steps) o["bell_steps"] = r.bell_steps;
            if (r.purified_at) o["purified_at"] = *r.purified_at;
            if (!r.samples.empty()) {
                o["final_terms"] = r.samples.back().n_terms;
                o["final_entries"] = r.samples.back().entries;
            }
        }
        trajs.push_back(o);
    }
    return {{"format", "lrsd-summary"}, {"version", 1},         {"config", cfg.to_json()},
            {"config_hash", cfg.hash()}, {"discarded", discarded}, {"trajectories", trajs}};
}

/// Mean and standard error of S_Q per recorded time, from CSV rows.
inline SeriesEnsemble sq_series(const CsvTable &table, const CircuitConfig &cfg) {
    std::vector<uint64_t> times;
    for (const auto &r : table.rows) times.push_back(r.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::map<size_t, std::vector<double>> by_traj;
    for (const auto &r : table.rows) {
        auto &row = by_traj[r.traj];
        if (row.empty()) row.assign(times.size(), std::numeric_limits<double>::quiet_NaN());
        row[size_t(std::lower_bound(times.begin(), times.end(), r.t) - times.begin())] = r.s_q;
    }
    // A trajectory that stopped early once pure stays at zero afterwards.
    std::vector<std::vector<double>> rows;
    for (auto &[k, row] : by_traj) {
        (void)k;
        bool seen = false;
        for (size_t i = row.size(); i-- > 0;) {
            if (!std::isnan(row[i])) seen = true;
            else if (!seen && cfg.stop_when_pure) row[i] = 0.0;
        }
        rows.push_back(row);
    }
    SeriesEnsemble s;
    s.L = cfg.L;
    s.p_m = cfg.p_m;
    s.eta = cfg.eta;
    s.beta = cfg.beta;
    accumulate_series(s, std::vector<double>(times.begin(), times.end()), rows);
    return s;
}

// Small numeric tables (fit inputs, crossing and collapse data, fit outputs).

inline constexpr const char *kTableMagic = "# lrsd-lab table v1";

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    bool has(const std::string &name) const {
        return std::find(columns.begin(), columns.end(), name) != columns.end();
    }
    std::vector<double> col(const std::string &name) const {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) fail(ErrorKind::SchemaMismatch, "table has no column '" + name + "'");
        size_t k = static_cast<size_t>(it - columns.begin());
        std::vector<double> out;
        for (const auto &r : rows) out.push_back(r[k]);
        return out;
    }
};

inline void write_table(std::ostream &out, const Table &t) {
    out << kTableMagic << "\n";
    for (size_t k = 0; k < t.columns.size(); k++) out << (k ? "," : "") << t.columns[k];
    out << "\n";
    for (const auto &r : t.rows) {
        for (size_t k = 0; k < r.size(); k++) out << (k ? "," : "") << fmt_double(r[k]);
        out << "\n";
    }
}

inline Table read_table(std::istream &in) {
    auto bad = [](const std::string &why) { fail(ErrorKind::SchemaMismatch, "table: " + why); };
    std::string line;
    if (!std::getline(in, line)) bad("empty input");
    if (line != kTableMagic) bad("missing version header");
    if (!std::getline(in, line) || line.empty()) bad("missing column line");
    Table t;
    std::stringstream header(line);
    for (std::string c; std::getline(header, c, ',');) t.columns.push_back(c);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) {
            char *end = nullptr;
            double v = c == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::strtod(c.c_str(), &end);
            if (c != "nan" && (end == c.c_str() || *end != '\0')) bad("malformed value '" + c + "'");
            row.push_back(v);
        }
        if (row.size() != t.columns.size()) bad("row width differs from the column line");
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty()) bad("no rows");
    return t;
}

}  // namespace lrsd::io

#endif
