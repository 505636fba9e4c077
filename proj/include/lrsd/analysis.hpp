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
#ifndef LRSD_ANALYSIS_HPP
#define LRSD_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "lrsd/error.hpp"

namespace lrsd {

/// Upper tail of the chi-square distribution.
inline double chi_square_p_value(double chi2, double dof) {
    if (dof <= 0) fail(ErrorKind::PreconditionViolated, "chi-square needs dof > 0");
    if (chi2 <= 0) return 1.0;
    return boost::math::gamma_q(dof / 2, chi2 / 2);
}

/// Mean and standard error of a time series over trajectories, keyed by the
/// circuit parameters that produced it.
struct SeriesEnsemble {
    size_t L = 0;
    double p_m = 0, eta = 0, beta = 0;
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> sem;
    std::vector<size_t> count;
};

/// Accumulates rows of equal length. NaN entries are skipped.
inline void accumulate_series(SeriesEnsemble &out, const std::vector<double> &t,
                              const std::vector<std::vector<double>> &rows) {
    out.t = t;
    size_t n = t.size();
    out.mean.assign(n, 0);
    out.sem.assign(n, 0);
    out.count.assign(n, 0);
    std::vector<double> m2(n, 0);
    for (const auto &row : rows) {
        if (row.size() != n) fail(ErrorKind::LengthMismatch, "series row length differs from time axis");
        for (size_t i = 0; i < n; i++) {
            if (std::isnan(row[i])) continue;
            // Welford
            size_t c = ++out.count[i];
            double d = row[i] - out.mean[i];
            out.mean[i] += d / c;
            m2[i] += d * (row[i] - out.mean[i]);
        }
    }
    for (size_t i = 0; i < n; i++) {
        size_t c = out.count[i];
        out.sem[i] = c > 1 ? std::sqrt(m2[i] / (c - 1) / c) : 0.0;
        if (c == 0) out.mean[i] = std::numeric_limits<double>::quiet_NaN();
    }
}

struct DecayFit {
    double tau = 0;
    double tau_err = 0;  // from the residual scatter of log S in the window
    double amplitude = 0;
    double r2 = 0;
    size_t first = 0;  // window, inclusive indices into the series
    size_t last = 0;
};

/// Fits S(t) = A exp(-t / tau) by least squares on log S over every window
/// [t_i, t_f] with t_f - t_i >= L^2 / 8 whose end point has relative error
/// below 0.35, and keeps the window with the largest R^2.
inline DecayFit fit_decay(const std::vector<double> &t, const std::vector<double> &mean,
                          const std::vector<double> &sem, size_t L, double max_rel_err = 0.35) {
    size_t n = t.size();
    if (mean.size() != n || (!sem.empty() && sem.size() != n))
        fail(ErrorKind::LengthMismatch, "fit_decay series lengths differ");
    double min_span = double(L) * double(L) / 8.0;
    if (n < 3 || t.back() - t.front() < min_span) fail(ErrorKind::NoValidWindow, "series shorter than L^2/8");

    // Prefix sums over x = t, y = log S. Points with S <= 0 poison the window.
    std::vector<double> sx(n + 1, 0), sy(n + 1, 0), sxx(n + 1, 0), sxy(n + 1, 0), syy(n + 1, 0);
    std::vector<size_t> bad(n + 1, 0);
    for (size_t i = 0; i < n; i++) {
        bool ok = mean[i] > 0 && std::isfinite(mean[i]);
        double x = t[i], y = ok ? std::log(mean[i]) : 0.0;
        sx[i + 1] = sx[i] + x;
        sy[i + 1] = sy[i] + y;
        sxx[i + 1] = sxx[i] + x * x;
        sxy[i + 1] = sxy[i] + x * y;
        syy[i + 1] = syy[i] + y * y;
        bad[i + 1] = bad[i] + (ok ? 0 : 1);
    }

    DecayFit best;
    bool found = false;
    for (size_t f = 2; f < n; f++) {
        if (!(mean[f] > 0)) continue;
        if (!sem.empty() && !(sem[f] / mean[f] < max_rel_err)) continue;
        for (size_t i = 0; i + 2 <= f; i++) {
            if (t[f] - t[i] < min_span) break;
            if (bad[f + 1] != bad[i]) continue;
            double m = double(f - i + 1);
            // Center before forming the normal equations; raw sums lose digits.
            double mx = (sx[f + 1] - sx[i]) / m, my = (sy[f + 1] - sy[i]) / m;
            double cxx = (sxx[f + 1] - sxx[i]) - m * mx * mx;
            double cxy = (sxy[f + 1] - sxy[i]) - m * mx * my;
            double cyy = (syy[f + 1] - syy[i]) - m * my * my;
            if (cxx <= 0) continue;
            double slope = cxy / cxx;
            if (!(slope < 0)) continue;
            double r2 = cyy <= 1e-300 ? 1.0 : std::min(1.0, cxy * cxy / (cxx * cyy));
            if (!found || r2 > best.r2) {
                found = true;
                best.r2 = r2;
                best.tau = -1.0 / slope;
                best.amplitude = std::exp(my - slope * mx);
                best.first = i;
                best.last = f;
            }
        }
    }
    if (!found) fail(ErrorKind::NoValidWindow, "no window satisfies the span and error cuts");

    // Refit the chosen window directly so the reported tau does not carry
    // prefix-sum cancellation.
    double mx = 0, my = 0;
    size_t m = best.last - best.first + 1;
    for (size_t k = best.first; k <= best.last; k++) {
        mx += t[k];
        my += std::log(mean[k]);
    }
    mx /= m;
    my /= m;
    double cxx = 0, cxy = 0, cyy = 0;
    for (size_t k = best.first; k <= best.last; k++) {
        double dx = t[k] - mx, dy = std::log(mean[k]) - my;
        cxx += dx * dx;
        cxy += dx * dy;
        cyy += dy * dy;
    }
    double slope = cxy / cxx;
    best.tau = -1.0 / slope;
    best.amplitude = std::exp(my - slope * mx);
    best.r2 = cyy <= 1e-300 ? 1.0 : std::min(1.0, cxy * cxy / (cxx * cyy));
    if (m > 2) {
        double rss = std::max(0.0, cyy - slope * cxy);
        double se_slope = std::sqrt(rss / double(m - 2) / cxx);
        best.tau_err = best.tau * best.tau * se_slope;
    }
    return best;
}

inline DecayFit fit_decay(const SeriesEnsemble &s) {
    return fit_decay(s.t, s.mean, s.sem, s.L);
}

enum class FitModel { ExpDecay, Power, Area, Log };

inline const char *fit_model_name(FitModel m) {
    switch (m) {
        case FitModel::ExpDecay: return "exp-decay";
        case FitModel::Power: return "power";
        case FitModel::Area: return "area";
        case FitModel::Log: return "log";
    }
    return "?";
}

struct FitResult {
    FitModel model = FitModel::Power;
    double a = 0, b = 0, gamma = 0;
    double chi2 = 0;
    size_t dof = 0;
    double chi2_dof = 0;
    double r2 = 0;
    double eval(double L) const {
        return model == FitModel::Log ? a + b * std::log(L) : a + b * std::pow(L, gamma);
    }
};

struct ScalingFits {
    FitResult power, area, log;
    FitModel best = FitModel::Area;
    const FitResult &chosen() const {
        return best == FitModel::Power ? power : best == FitModel::Area ? area : log;
    }
};

namespace detail {

struct Linear2 {
    double a = 0, b = 0, chi2 = std::numeric_limits<double>::infinity();
    bool ok = false;
};

// Weighted least squares for y = a + b f.
inline Linear2 wls2(const std::vector<double> &f, const std::vector<double> &y, const std::vector<double> &w) {
    double s = 0, sf = 0, sy = 0;
    for (size_t i = 0; i < y.size(); i++) {
        s += w[i];
        sf += w[i] * f[i];
        sy += w[i] * y[i];
    }
    double mf = sf / s, my = sy / s;
    double cff = 0, cfy = 0;
    for (size_t i = 0; i < y.size(); i++) {
        cff += w[i] * (f[i] - mf) * (f[i] - mf);
        cfy += w[i] * (f[i] - mf) * (y[i] - my);
    }
    Linear2 r;
    double scale = 0;
    for (size_t i = 0; i < y.size(); i++) scale = std::max(scale, std::abs(f[i]));
    if (cff <= 1e-24 * std::max(1.0, scale * scale) * s) {
        // f is constant over the data; the model reduces to a constant.
        r.a = my;
        r.b = 0;
    } else {
        r.b = cfy / cff;
        r.a = my - r.b * mf;
    }
    r.chi2 = 0;
    for (size_t i = 0; i < y.size(); i++) {
        double d = y[i] - r.a - r.b * f[i];
        r.chi2 += w[i] * d * d;
    }
    r.ok = std::isfinite(r.chi2);
    return r;
}

inline double r_squared(const std::vector<double> &y, const std::vector<double> &w, double chi2) {
    double s = 0, sy = 0;
    for (size_t i = 0; i < y.size(); i++) {
        s += w[i];
        sy += w[i] * y[i];
    }
    double my = sy / s, tot = 0;
    for (size_t i = 0; i < y.size(); i++) tot += w[i] * (y[i] - my) * (y[i] - my);
    return tot <= 0 ? 1.0 : 1.0 - chi2 / tot;
}

// a + b L^gamma with gamma restricted to [lo, hi]; a and b are profiled out.
inline FitResult fit_power_family(FitModel tag, const std::vector<double> &L, const std::vector<double> &y,
                                  const std::vector<double> &w, double lo, double hi) {
    auto chi2_at = [&](double g) {
        std::vector<double> f(L.size());
        for (size_t i = 0; i < L.size(); i++) f[i] = std::pow(L[i], g);
        return wls2(f, y, w);
    };
    // Multi-start: a fixed set of seeds plus a uniform scan, then Brent on the
    // bracket around the best candidate.
    std::vector<double> starts = {-1, -0.5, -0.25, 0.25, 0.5, 1, 2};
    for (int k = 0; k <= 80; k++) starts.push_back(lo + (hi - lo) * k / 80.0);
    std::sort(starts.begin(), starts.end());
    double best_g = std::numeric_limits<double>::quiet_NaN(), best_c = std::numeric_limits<double>::infinity();
    std::vector<double> grid;
    for (double g : starts)
        if (g >= lo && g <= hi) grid.push_back(g);
    for (double g : grid) {
        double c = chi2_at(g).chi2;
        if (c < best_c) {
            best_c = c;
            best_g = g;
        }
    }
    auto it = std::lower_bound(grid.begin(), grid.end(), best_g);
    double left = it == grid.begin() ? lo : *(it - 1);
    double right = (it + 1) == grid.end() ? hi : *(it + 1);
    auto r = boost::math::tools::brent_find_minima([&](double g) { return chi2_at(g).chi2; }, left, right, 52);
    if (r.second < best_c) best_g = r.first;

    Linear2 lin = chi2_at(best_g);
    FitResult out;
    out.model = tag;
    out.gamma = best_g;
    out.a = lin.a;
    out.b = lin.b;
    out.chi2 = lin.chi2;
    out.dof = L.size() - 3;
    out.chi2_dof = out.chi2 / out.dof;
    out.r2 = r_squared(y, w, out.chi2);
    return out;
}

}  // namespace detail

/// Bounds on gamma for the two power-law families. Both stay clear of zero:
/// with gamma -> 0 and b ~ 1/gamma, a + b L^gamma imitates a logarithm.
inline constexpr double kPowerGammaMin = 0.05;
inline constexpr double kPowerGammaMax = 4.0;
inline constexpr double kAreaGammaMin = -4.0;
inline constexpr double kAreaGammaMax = -0.05;

/// Fits power (gamma > 0), area (gamma <= 0) and logarithmic growth and picks
/// the smallest chi^2/dof, with b > 0 required for power and log. Ties go to
/// the slower-growing family.
/// Errors <= 0 anywhere fall back to unit weights.
inline ScalingFits fit_scaling(const std::vector<double> &L, const std::vector<double> &y,
                               const std::vector<double> &err) {
    if (L.size() != y.size() || (!err.empty() && err.size() != y.size()))
        fail(ErrorKind::LengthMismatch, "fit_scaling input lengths differ");
    std::vector<double> sorted = L;
    std::sort(sorted.begin(), sorted.end());
    if (std::unique(sorted.begin(), sorted.end()) - sorted.begin() < 4)
        fail(ErrorKind::DegenerateFit, "fit_scaling needs at least four distinct sizes");
    for (double l : L)
        if (!(l > 0)) fail(ErrorKind::DegenerateFit, "system sizes must be positive");

    std::vector<double> w(y.size(), 1.0);
    bool weighted = !err.empty() && std::all_of(err.begin(), err.end(), [](double e) { return e > 0; });
    if (weighted)
        for (size_t i = 0; i < y.size(); i++) w[i] = 1.0 / (err[i] * err[i]);

    ScalingFits fits;
    fits.power = detail::fit_power_family(FitModel::Power, L, y, w, kPowerGammaMin, kPowerGammaMax);
    fits.area = detail::fit_power_family(FitModel::Area, L, y, w, kAreaGammaMin, kAreaGammaMax);

    std::vector<double> lnL(L.size());
    for (size_t i = 0; i < L.size(); i++) lnL[i] = std::log(L[i]);
    detail::Linear2 lin = detail::wls2(lnL, y, w);
    fits.log.model = FitModel::Log;
    fits.log.a = lin.a;
    fits.log.b = lin.b;
    fits.log.chi2 = lin.chi2;
    fits.log.dof = L.size() - 2;
    fits.log.chi2_dof = lin.chi2 / fits.log.dof;
    fits.log.r2 = detail::r_squared(y, w, lin.chi2);

    for (auto *f : {&fits.power, &fits.area, &fits.log})
        if (!std::isfinite(f->a) || !std::isfinite(f->b) || !std::isfinite(f->chi2))
            fail(ErrorKind::DegenerateFit, std::string("non-finite ") + fit_model_name(f->model) + " fit");

    // Power and log describe growth, so they only compete with b > 0; a
    // decreasing fit falls back to area. Preference order on ties: area, log, power.
    double tol = 1e-9;
    auto beats = [&](const FitResult &x, const FitResult &y) {
        return x.b > 0 && x.chi2_dof < y.chi2_dof - tol * std::max(1.0, std::abs(y.chi2_dof));
    };
    const FitResult *best = &fits.area;
    if (beats(fits.log, *best)) best = &fits.log;
    if (beats(fits.power, *best)) best = &fits.power;
    fits.best = best->model;
    return fits;
}

/// Linear interpolation of the first sign change of y - level on x.
/// Returns NaN when there is none.
inline double interpolate_level(const std::vector<double> &x, const std::vector<double> &y, double level,
                                size_t from = 0, bool forward = true) {
    size_t n = x.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    auto hit = [&](size_t i, size_t j) -> double {
        double a = y[i] - level, b = y[j] - level;
        if (a == 0) return x[i];
        if (b == 0) return x[j];
        if ((a < 0) == (b < 0)) return std::numeric_limits<double>::quiet_NaN();
        return x[i] + (x[j] - x[i]) * a / (a - b);
    };
    if (forward) {
        for (size_t i = from; i + 1 < n; i++) {
            double r = hit(i, i + 1);
            if (!std::isnan(r)) return r;
        }
    } else {
        for (size_t j = std::min(from, n - 1); j >= 1; j--) {
            double r = hit(j - 1, j);
            if (!std::isnan(r)) return r;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

struct TransitionEstimate {
    double x_c = 0;
    double sigma_a = 0;
    double sigma_b = 0;
    double sigma = 0;
    double x_minus = 0, x_plus = 0;
    std::vector<double> ln_f;
};

namespace detail {

inline double locate_once(const std::vector<double> &x, const std::vector<double> &e_ext,
                          const std::vector<double> &e_area, TransitionEstimate &out) {
    size_t n = x.size();
    if (e_ext.size() != n || e_area.size() != n) fail(ErrorKind::LengthMismatch, "transition curves differ in length");
    out.ln_f.assign(n, 0);
    for (size_t i = 0; i < n; i++) {
        if (!(e_ext[i] > 0) || !(e_area[i] > 0))
            fail(ErrorKind::DegenerateFit, "chi^2/dof must be positive to form ln F");
        out.ln_f[i] = std::log(e_ext[i] / e_area[i]);
    }
    double xc = interpolate_level(x, out.ln_f, 0.0);
    if (std::isnan(xc)) fail(ErrorKind::NoCrossing, "ln F never changes sign");
    return xc;
}

}  // namespace detail

/// F = E_ext / E_area, the ratio of extensive-fit to area-fit chi^2/dof on a
/// common grid. x_c is where ln F = 0; sigma_A is half the distance between
/// the nearest ln F = +1 and ln F = -1 crossings around it (clamped to the grid
/// when a level is never reached). sigma_B compares against the same estimate
/// with the largest system size excluded, when that data is supplied.
inline TransitionEstimate locate_transition(const std::vector<double> &x, const std::vector<double> &e_ext,
                                            const std::vector<double> &e_area,
                                            const std::vector<double> &e_ext_drop = {},
                                            const std::vector<double> &e_area_drop = {}) {
    if (x.size() < 2) fail(ErrorKind::NoCrossing, "need at least two grid points");
    if (!std::is_sorted(x.begin(), x.end())) fail(ErrorKind::PreconditionViolated, "grid must be ascending");
    TransitionEstimate out;
    out.x_c = detail::locate_once(x, e_ext, e_area, out);

    size_t k = size_t(std::upper_bound(x.begin(), x.end(), out.x_c) - x.begin());
    k = std::min(std::max<size_t>(k, 1), x.size() - 1);
    // Walk outward from the crossing to the nearest +-1 level on each side.
    std::vector<double> lvl_hits;
    for (double level : {-1.0, 1.0}) {
        double lft = interpolate_level(x, out.ln_f, level, k - 1, false);
        double rgt = interpolate_level(x, out.ln_f, level, k - 1, true);
        lvl_hits.push_back(std::isnan(lft) ? rgt : std::isnan(rgt) ? lft
                           : (out.x_c - lft <= rgt - out.x_c ? lft : rgt));
    }
    double lo = lvl_hits[0], hi = lvl_hits[1];
    if (std::isnan(lo)) lo = out.ln_f.front() < out.ln_f.back() ? x.front() : x.back();
    if (std::isnan(hi)) hi = out.ln_f.front() < out.ln_f.back() ? x.back() : x.front();
    out.x_minus = std::min(lo, hi);
    out.x_plus = std::max(lo, hi);
    out.sigma_a = (out.x_plus - out.x_minus) / 2;

    if (!e_ext_drop.empty()) {
        TransitionEstimate tmp;
        double xd = detail::locate_once(x, e_ext_drop, e_area_drop, tmp);
        out.sigma_b = std::abs(out.x_c - xd);
    }
    out.sigma = std::hypot(out.sigma_a, out.sigma_b);
    return out;
}

struct Curve {
    double L = 0;
    std::vector<double> x;
    std::vector<double> y;
};

struct CrossingEstimate {
    double x_c = 0;
    double sigma = 0;
    std::vector<double> pairwise;
};

namespace detail {

inline double interp(const std::vector<double> &x, const std::vector<double> &y, double q) {
    auto it = std::lower_bound(x.begin(), x.end(), q);
    if (it == x.end()) return y.back();
    size_t j = size_t(it - x.begin());
    if (x[j] == q || j == 0) return y[j];
    double f = (q - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + f * (y[j] - y[j - 1]);
}

}  // namespace detail

/// Pairwise intersections of the curves on their overlapping range. When a
/// pair crosses more than once the sharpest crossing is kept.
inline CrossingEstimate crossing(const std::vector<Curve> &curves) {
    if (curves.size() < 2) fail(ErrorKind::PreconditionViolated, "crossing needs at least two curves");
    for (const auto &c : curves) {
        if (c.x.size() != c.y.size() || c.x.size() < 2)
            fail(ErrorKind::LengthMismatch, "curve needs matching x, y with >= 2 points");
        if (!std::is_sorted(c.x.begin(), c.x.end())) fail(ErrorKind::PreconditionViolated, "curve x must ascend");
    }
    CrossingEstimate out;
    for (size_t i = 0; i < curves.size(); i++) {
        for (size_t j = i + 1; j < curves.size(); j++) {
            const Curve &a = curves[i], &b = curves[j];
            double lo = std::max(a.x.front(), b.x.front()), hi = std::min(a.x.back(), b.x.back());
            if (!(lo < hi)) continue;
            std::vector<double> grid;
            for (const auto *c : {&a, &b})
                for (double v : c->x)
                    if (v >= lo && v <= hi) grid.push_back(v);
            std::sort(grid.begin(), grid.end());
            grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
            std::vector<double> d(grid.size());
            for (size_t k = 0; k < grid.size(); k++)
                d[k] = detail::interp(a.x, a.y, grid[k]) - detail::interp(b.x, b.y, grid[k]);
            double best = std::numeric_limits<double>::quiet_NaN(), jump = -1;
            for (size_t k = 0; k + 1 < grid.size(); k++) {
                double u = d[k], v = d[k + 1];
                double at;
                if (u == 0 && v == 0) continue;
                if (u == 0) at = grid[k];
                else if (v == 0) at = grid[k + 1];
                else if ((u < 0) != (v < 0)) at = grid[k] + (grid[k + 1] - grid[k]) * u / (u - v);
                else continue;
                double s = std::abs(u - v);
                if (s > jump) {
                    jump = s;
                    best = at;
                }
            }
            if (!std::isnan(best)) out.pairwise.push_back(best);
        }
    }
    if (out.pairwise.empty()) fail(ErrorKind::NoCrossing, "no pair of curves intersects");
    double m = std::accumulate(out.pairwise.begin(), out.pairwise.end(), 0.0) / out.pairwise.size();
    double v = 0;
    for (double p : out.pairwise) v += (p - m) * (p - m);
    out.x_c = m;
    out.sigma = out.pairwise.size() > 1 ? std::sqrt(v / (out.pairwise.size() - 1)) : 0.0;
    return out;
}

struct InflectionEstimate {
    double x_c = 0;
    double slope = 0;  // d y / d ln L at x_c
    std::vector<double> curvature;
    std::vector<double> slopes;
};

/// For each control value x_k, fits y = a + b ln L + c (ln L)^2 across sizes.
/// The inflection is where c changes sign; the slope b is interpolated there.
/// Pass y = ln tau for algebraic growth tau ~ L^z, or y = S for S ~ ln L.
inline InflectionEstimate inflection(const std::vector<double> &x, const std::vector<double> &L,
                                     const std::vector<std::vector<double>> &y) {
    if (L.size() < 3) fail(ErrorKind::PreconditionViolated, "inflection needs at least three sizes");
    if (y.size() != x.size()) fail(ErrorKind::LengthMismatch, "one row of y per control value");
    InflectionEstimate out;
    Eigen::MatrixXd A(L.size(), 3);
    for (size_t i = 0; i < L.size(); i++) {
        double u = std::log(L[i]);
        A(long(i), 0) = 1;
        A(long(i), 1) = u;
        A(long(i), 2) = u * u;
    }
    // Center u to decouple slope from curvature at the middle of the range.
    double uc = A.col(1).mean();
    for (long i = 0; i < A.rows(); i++) {
        double u = A(i, 1) - uc;
        A(i, 1) = u;
        A(i, 2) = u * u;
    }
    auto qr = A.colPivHouseholderQr();
    if (qr.rank() < 3) fail(ErrorKind::DegenerateFit, "sizes do not span a quadratic in ln L");
    for (const auto &row : y) {
        if (row.size() != L.size()) fail(ErrorKind::LengthMismatch, "row length differs from sizes");
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(row.data(), long(row.size()));
        Eigen::VectorXd c = qr.solve(b);
        out.slopes.push_back(c(1));
        out.curvature.push_back(c(2));
    }
    out.x_c = interpolate_level(x, out.curvature, 0.0);
    if (std::isnan(out.x_c)) fail(ErrorKind::NoCrossing, "curvature in ln L never changes sign");
    out.slope = detail::interp(x, out.slopes, out.x_c);
    return out;
}

/// One observation for a finite-size collapse.
struct CollapsePoint {
    double L = 0;
    double x = 0;
    double y = 0;
};

/// X = (x - x_c) L^a, Y = y L^-b. For purification a = z / nu and b = z.
struct CollapseParams {
    double x_c = 0;
    double a = 1;
    double b = 0;
};

struct CollapseBounds {
    double x_c_lo = 0, x_c_hi = 1;
    double a_lo = 0.1, a_hi = 4;
    double b_lo = 0, b_hi = 1;
    bool fit_x_c = true, fit_a = true, fit_b = true;
};

struct CollapseResult {
    CollapseParams params;
    double quality = 0;
};

inline constexpr size_t kCollapseWindow = 7;

/// Mean squared deviation from a local quadratic master curve, normalized by
/// the variance of the rescaled data. Each point is compared against a fit to
/// its kCollapseWindow nearest neighbors from other sizes; points outside the
/// span of those neighbors do not vote. If fewer than a third of the points
/// vote the collapse is rejected with an infinite quality.
inline double collapse_quality(const std::vector<CollapsePoint> &pts, const CollapseParams &p) {
    size_t n = pts.size();
    std::vector<double> X(n), Y(n);
    double my = 0;
    for (size_t i = 0; i < n; i++) {
        X[i] = (pts[i].x - p.x_c) * std::pow(pts[i].L, p.a);
        Y[i] = pts[i].y * std::pow(pts[i].L, -p.b);
        my += Y[i];
    }
    my /= n;
    double var = 0;
    for (double v : Y) var += (v - my) * (v - my);
    var /= n;
    if (!(var > 0)) return std::numeric_limits<double>::infinity();

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return X[i] < X[j]; });
    std::vector<size_t> rank(n);
    for (size_t r = 0; r < n; r++) rank[order[r]] = r;

    double sum = 0;
    size_t voters = 0;
    std::vector<size_t> nb;
    for (size_t i = 0; i < n; i++) {
        nb.clear();
        // Merge outward in sorted order, skipping same-size points.
        long lo = long(rank[i]) - 1, hi = long(rank[i]) + 1;
        while (nb.size() < kCollapseWindow && (lo >= 0 || hi < long(n))) {
            bool take_lo;
            if (lo < 0) take_lo = false;
            else if (hi >= long(n)) take_lo = true;
            else take_lo = X[i] - X[order[lo]] <= X[order[hi]] - X[i];
            size_t j = take_lo ? order[lo--] : order[hi++];
            if (pts[j].L != pts[i].L) nb.push_back(j);
        }
        if (nb.size() < 3) continue;
        double xmin = X[nb[0]], xmax = X[nb[0]];
        for (size_t j : nb) {
            xmin = std::min(xmin, X[j]);
            xmax = std::max(xmax, X[j]);
        }
        if (X[i] < xmin || X[i] > xmax || !(xmax > xmin)) continue;
        Eigen::MatrixXd A(long(nb.size()), 3);
        Eigen::VectorXd rhs(long(nb.size()));
        double h = xmax - xmin;
        for (size_t k = 0; k < nb.size(); k++) {
            double u = (X[nb[k]] - X[i]) / h;
            A(long(k), 0) = 1;
            A(long(k), 1) = u;
            A(long(k), 2) = u * u;
            rhs(long(k)) = Y[nb[k]];
        }
        Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
        double d = Y[i] - c(0);
        sum += d * d;
        voters++;
    }
    if (voters * 3 < n) return std::numeric_limits<double>::infinity();
    return sum / voters / var;
}

/// Grid search over the free parameters followed by rounds of coordinate-wise
/// Brent refinement inside the bounds.
inline CollapseResult collapse(const std::vector<CollapsePoint> &pts, CollapseParams start,
                               const CollapseBounds &bounds, size_t grid = 9, size_t rounds = 4) {
    {
        std::vector<double> sizes;
        for (const auto &p : pts) sizes.push_back(p.L);
        std::sort(sizes.begin(), sizes.end());
        if (std::unique(sizes.begin(), sizes.end()) - sizes.begin() < 3)
            fail(ErrorKind::PreconditionViolated, "collapse needs at least three system sizes");
    }
    struct Axis {
        double *v;
        double lo, hi;
        bool free;
    };
    CollapseParams cur = start;
    std::vector<Axis> axes = {{&cur.x_c, bounds.x_c_lo, bounds.x_c_hi, bounds.fit_x_c},
                              {&cur.a, bounds.a_lo, bounds.a_hi, bounds.fit_a},
                              {&cur.b, bounds.b_lo, bounds.b_hi, bounds.fit_b}};
    std::vector<Axis *> free_axes;
    for (auto &ax : axes)
        if (ax.free) free_axes.push_back(&ax);

    CollapseParams best = cur;
    double best_q = collapse_quality(pts, cur);
    if (!free_axes.empty() && grid > 1) {
        size_t total = 1;
        for (size_t k = 0; k < free_axes.size(); k++) total *= grid;
        for (size_t idx = 0; idx < total; idx++) {
            size_t r = idx;
            for (auto *ax : free_axes) {
                size_t g = r % grid;
                r /= grid;
                *ax->v = ax->lo + (ax->hi - ax->lo) * double(g) / double(grid - 1);
            }
            double q = collapse_quality(pts, cur);
            if (q < best_q) {
                best_q = q;
                best = cur;
            }
        }
    }
    cur = best;
    for (size_t round = 0; round < rounds; round++) {
        double step_scale = 1.0 / double(std::max<size_t>(grid - 1, 1)) / double(1u << round);
        for (auto *ax : free_axes) {
            double span = (ax->hi - ax->lo) * step_scale;
            double lo = std::max(ax->lo, *ax->v - span), hi = std::min(ax->hi, *ax->v + span);
            double keep = *ax->v;
            auto f = [&](double v) {
                *ax->v = v;
                return collapse_quality(pts, cur);
            };
            auto r = boost::math::tools::brent_find_minima(f, lo, hi, 40);
            if (r.second < best_q) {
                best_q = r.second;
                *ax->v = r.first;
            } else {
                *ax->v = keep;
            }
        }
    }
    return {cur, best_q};
}

}  // namespace lrsd

#endif
