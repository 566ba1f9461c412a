/*
   Copyright 2025 The asdr authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Closed-form predictions and bounds for Ekedahl-Oort types of double covers.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "derham.hpp"
#include "dieudonne.hpp"
#include "errors.hpp"
#include "tower.hpp"

namespace asdr {

// ---------------------------------------------------------------- small integer helpers

namespace eo_detail {

inline int floor_log2(int n) {
    int r = -1;
    while (n > 0) {
        n >>= 1;
        ++r;
    }
    return r;
}

/// ceil(log2 n) for n >= 1, and 0 for n <= 1.
inline int ceil_log2(int n) {
    int r = 0;
    while ((1 << r) < n) ++r;
    return r;
}

inline int v2(int n) {
    int k = 0;
    while (n > 0 && n % 2 == 0) {
        n /= 2;
        ++k;
    }
    return k;
}

inline int ceil_div(int a, int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

}  // namespace eo_detail

// ---------------------------------------------------------------- phi

/// phi(d, w): n_1 acts first; a leading complement maps x to d - 1 - x.
inline int phi(int d, const Word& w) {
    if (d < 1 || d % 2 == 0) throw std::invalid_argument("phi needs an odd positive d");
    w.validate();
    int x = d - 1;
    for (std::size_t b = 0; b < w.exps.size(); ++b) {
        if (b) x = d - 1 - x;
        x >>= w.exps[b];
    }
    return w.leading_perp ? d - 1 - x : x;
}

/// The word V w: one more V on the outermost block, or a new block after a leading complement.
inline Word prepend_V(const Word& w) {
    Word v = w;
    if (v.leading_perp) {
        v.leading_perp = false;
        v.exps.push_back(1);
    } else {
        v.exps.back() += 1;
    }
    return v;
}

// ---------------------------------------------------------------- ramification data

struct RamificationData {
    int g_X = 0;
    int f_X = 0;
    std::vector<int> breaks;             ///< odd d_i >= 1, one per branch point
    std::vector<int> a_X{0};             ///< a_X^r for r = 0 .. stabilization
    std::optional<int> tango;            ///< Tango number n(X), if known

    int l_X() const { return g_X - f_X; }
    int m() const { return int(breaks.size()); }
    int f_Y() const { return 2 * f_X - 1 + m(); }
    int g_Y() const {
        int s = 0;
        for (int d : breaks) s += (d + 1) / 2;
        return 2 * g_X - 1 + s;
    }
    int l_Y() const { return g_Y() - f_Y(); }
    int break_sum() const {
        int s = 0;
        for (int d : breaks) s += d + 1;
        return s;
    }
    /// a_X^r, constant past stabilization.
    int a(int r) const { return r < int(a_X.size()) ? a_X[r] : a_X.back(); }
    /// The degree-branch predicate sum (d_i + 1) > 4 g_X - 4.
    bool large_break_sum() const { return break_sum() > 4 * g_X - 4; }

    void validate() const {
        if (g_X < 0 || f_X < 0 || f_X > g_X) throw ConfigError("need 0 <= f_X <= g_X");
        if (breaks.empty()) throw ConfigError("a double cover needs at least one branch point");
        for (int d : breaks)
            if (d < 1 || d % 2 == 0) throw ConfigError("breaks must be odd and positive");
        if (a_X.empty() || a_X[0] != 0) throw ConfigError("a_X must start with a^0 = 0");
        for (std::size_t r = 1; r < a_X.size(); ++r)
            if (a_X[r] < a_X[r - 1] || a_X[r] > l_X()) throw ConfigError("a_X must be nondecreasing and at most l_X");
        if (tango && *tango < 0) throw ConfigError("Tango number is nonnegative");
    }
};

/// Reads off the data of the last level Y -> Y truncated by one level.
inline RamificationData ramification_data(const TowerCurve& Y, std::optional<int> tango = std::nullopt) {
    const int r = Y.depth();
    if (r < 1) throw HypothesisViolation("ramification data needs a tower of depth >= 1");
    RamificationData rd;
    rd.g_X = Y.genus_at(r - 1);
    rd.f_X = Y.prank_at(r - 1);
    rd.breaks.clear();
    for (int q : branch_places(Y)) rd.breaks.push_back(Y.top()[q].breaks.back());
    if (rd.g_X > 0) {
        TowerCurve X = Y.truncate(r - 1);
        DeRhamSpace H(X);
        const auto& M = H.module();
        rd.a_X = higher_a_numbers(restrict_map(M.V, M.H0()));
    }
    rd.tango = tango;
    rd.validate();
    return rd;
}

inline int phi_total(const RamificationData& rd, const Word& w) {
    int s = 0;
    for (int d : rd.breaks) s += phi(d, w);
    return s;
}

// ---------------------------------------------------------------- ordinary base

/// Final type from its canonical points, filling each gap flat or with slope one.
inline FinalType fill_final_type(int g, const std::map<int, int>& points) {
    ensure(points.count(0) && points.at(0) == 0 && points.count(2 * g) && points.at(2 * g) == g,
           "canonical points include both ends");
    FinalType ft;
    ft.nu.assign(2 * g + 1, 0);
    auto it = points.begin();
    for (auto nx = std::next(it); nx != points.end(); it = nx++) {
        const int a = it->first, b = nx->first, na = it->second, nb = nx->second;
        if (nb == na) {
            for (int l = a; l <= b; ++l) ft.nu[l] = na;
        } else if (nb - na == b - a) {
            for (int l = a; l <= b; ++l) ft.nu[l] = na + (l - a);
        } else {
            throw InterpolationGap("canonical points (" + std::to_string(a) + "," + std::to_string(na) + ") and (" +
                                   std::to_string(b) + "," + std::to_string(nb) + ") admit no unique fill");
        }
    }
    ft.validate();
    return ft;
}

/// Closure of the break vector (d_i - 1) under x -> floor(x/2) and x -> d - 1 - x, componentwise.
inline std::set<std::vector<int>> phi_orbit(const std::vector<int>& breaks) {
    std::vector<int> start;
    for (int d : breaks) start.push_back(d - 1);
    std::set<std::vector<int>> seen{start};
    std::vector<std::vector<int>> todo{start};
    while (!todo.empty()) {
        auto x = todo.back();
        todo.pop_back();
        auto v = x, p = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
            v[i] = x[i] / 2;
            p[i] = breaks[i] - 1 - x[i];
        }
        for (auto& y : {v, p})
            if (seen.insert(y).second) todo.push_back(y);
    }
    return seen;
}

/// nu_{f+phi(w)} = f + sum floor(phi(d_i,w)/2) on every canonical point, filled in between.
inline FinalType ordinary_closed_form(int f_Y, const std::vector<int>& breaks) {
    int g = f_Y;
    for (int d : breaks) g += (d - 1) / 2;
    std::map<int, int> pts;
    for (int l = 0; l <= f_Y; ++l) pts[l] = l;
    for (const auto& x : phi_orbit(breaks)) {
        int s = 0, h = 0;
        for (int xi : x) {
            s += xi;
            h += xi / 2;
        }
        auto [it, fresh] = pts.emplace(f_Y + s, f_Y + h);
        ensure(fresh || it->second == f_Y + h, "canonical points are consistent");
    }
    pts[2 * g] = g;
    return fill_final_type(g, pts);
}

struct OrdinaryPrediction {
    std::string description;  ///< e.g. "M_ord^2 ⊕ W_7"
    DieudonneModule module;
    FinalType synthesized;    ///< final type of the synthesized module
    FinalType closed_form;    ///< from the phi recursion alone
};

/// Synthesizes M_ord^{f_Y} + sum W_{d_i} over GF(2) and checks the closed form against it.
inline OrdinaryPrediction predict_ordinary(const RamificationData& rd) {
    rd.validate();
    if (rd.l_X() != 0) throw HypothesisViolation("ordinary prediction needs an ordinary base (l_X = 0)");
    const Field& K = Field::get(1);
    OrdinaryPrediction out;
    std::optional<DieudonneModule> M;
    auto add = [&](const DieudonneModule& N) { M = M ? direct_sum(*M, N) : N; };
    if (rd.f_Y() > 0) {
        add(modules::ordinary_power(K, rd.f_Y()));
        out.description = rd.f_Y() == 1 ? "M_ord" : "M_ord^" + std::to_string(rd.f_Y());
    }
    for (int d : rd.breaks) {
        if (d == 1) continue;
        DieudonneModule W = modules::branch_module(K, d);
        // each local summand has final type floor(l/2)
        auto ft = final_type(W).first_g();
        for (std::size_t l = 0; l < ft.size(); ++l) ensure(ft[l] == int(l + 1) / 2, "branch summand type");
        add(W);
        out.description += (out.description.empty() ? "" : " ⊕ ") + std::string("W_") + std::to_string(d);
    }
    if (!M) throw HypothesisViolation("cover of genus 0 has no Dieudonne module");
    M->check();
    out.module = *M;
    out.synthesized = final_type(*M);
    out.closed_form = ordinary_closed_form(rd.f_Y(), rd.breaks);
    if (!(out.synthesized == out.closed_form))
        throw std::logic_error("ordinary closed form " + out.closed_form.str() + " disagrees with synthesized " +
                               out.synthesized.str());
    return out;
}

// ---------------------------------------------------------------- supersingular elliptic base

/// Full final type from its first g entries by duality nu_{2g-i} = nu_i + g - i.
inline FinalType final_type_from_first_g(const std::vector<int>& first) {
    const int g = int(first.size());
    FinalType ft;
    ft.nu.assign(2 * g + 1, 0);
    for (int i = 1; i <= g; ++i) ft.nu[i] = first[i - 1];
    for (int i = 0; i < g; ++i) ft.nu[2 * g - i] = ft.nu[i] + g - i;
    ft.validate();
    return ft;
}

/// One branch point with break d = 2^n + 1 over the supersingular elliptic curve.
inline FinalType predict_2n1(int d) {
    if (d < 3 || eo_detail::v2(d - 1) != eo_detail::floor_log2(d - 1))
        throw HypothesisViolation("d = " + std::to_string(d) + " is not of the form 2^n + 1");
    std::vector<int> nu{0, 1};
    for (int i = 1; i <= (d - 1) / 2; ++i) nu.push_back(i / 2 + 2);
    return final_type_from_first_g(nu);
}

/// {r_{d-1} + 1} together with [v2(d-1), r_{d-1}).
inline std::vector<int> admissible_mu(int d) {
    if (d < 3 || d % 2 == 0) throw HypothesisViolation("need an odd break d >= 3");
    const int r = eo_detail::floor_log2(d - 1);
    std::vector<int> out{r + 1};
    for (int mu = eo_detail::v2(d - 1); mu < r; ++mu) out.push_back(mu);
    return out;
}

/// iota(M_delta) + u(r_delta + 1) + u(mu), trimmed like dieudonne v_type.
inline std::vector<int> predict_vtype_ss(int d, int mu) {
    auto adm = admissible_mu(d);
    if (std::find(adm.begin(), adm.end(), mu) == adm.end())
        throw HypothesisViolation("mu = " + std::to_string(mu) + " is not admissible for d = " + std::to_string(d));
    const int delta = (d - 1) / 2;
    const int rd = eo_detail::floor_log2(delta);
    const int len = std::max(rd + 3, mu + 2) + 1;
    std::vector<int> c(len, 0);
    for (int i = 0; i < len; ++i) {
        c[i] += delta >> std::min(i, 30);
        if (i <= rd + 1) c[i] += 1;
        if (i <= mu) c[i] += 1;
    }
    std::vector<int> out{c[0]};
    for (int i = 1; i < len && c[i] != c[i - 1]; ++i) out.push_back(c[i]);
    return out;
}

/// Coordinates of psi dx modulo R_delta and the resulting mu.
struct SsTail {
    int d = 0;
    std::vector<Elem> c;    ///< c[i] for 0 <= i <= d - 1; only delta < i matter
    int mu = 0;
    std::vector<int> admissible;
};

/// V-order of the local basis element with principal part t'^(-i-1) dt'.
inline int ord_V_local(int i) {
    const int k = eo_detail::v2(i);
    return (i >> k) == 1 ? k + 2 : k + 1;
}

/// c_i = Res(t'^i psi' dx) in the normalized branch coordinate t', where psi' = lc t'^-d.
inline SsTail mu_from_tail(const TowerCurve& Y) {
    const int r = Y.depth();
    if (r < 1 || Y.genus_at(r - 1) != 1 || Y.prank_at(r - 1) != 0)
        throw HypothesisViolation("the base must be the supersingular elliptic curve");
    auto br = branch_places(Y);
    if (br.size() != 1) throw HypothesisViolation("the cover must be branched at exactly one point");
    const Place& Q = Y.top()[br[0]];
    const int d = Q.breaks.back();
    if (d < 3) throw HypothesisViolation("need break d >= 3");
    TowerCurve X = Y.truncate(r - 1);
    const Field& K = Y.field();
    const int target = 4 * d + 8;
    const BranchCoordinates bc = branch_coordinates(Y, X, Q, target);
    const LaurentSeries dx = X.expand(X.algebra().x(), Q.parent, target).derivative();
    // psi' dx = lc t'^-d dx
    const LaurentSeries gt = Q.gloc.empty() ? LaurentSeries::zero(K) : Q.gloc.to_series();
    const LaurentSeries psi = X.expand(Y.algebra().psi()[r - 1], Q.parent, target) + gt.square() + gt;
    SsTail out;
    out.d = d;
    out.c.assign(d, 0);
    LaurentSeries base = psi * dx;
    for (int i = 0; i < d; ++i) {
        LaurentSeries s = bc.t_base.pow(i, target) * base;
        if (s.known_upto() < 0) throw PrecisionExhausted("residue of psi dx not determined");
        out.c[i] = s.coeff(-1);
    }
    ensure(out.c[d - 1] != 0, "leading coordinate of psi dx is nonzero");
    int best = 0;
    for (int i = (d - 1) / 2 + 1; i <= d - 1; ++i)
        if (out.c[i]) best = std::max(best, ord_V_local(i));
    out.mu = best - 1;
    out.admissible = admissible_mu(d);
    ensure(std::find(out.admissible.begin(), out.admissible.end(), out.mu) != out.admissible.end(),
           "mu from the tail is admissible");
    return out;
}

inline int codim_stratum_ss(int d, int mu) {
    auto adm = admissible_mu(d);
    if (std::find(adm.begin(), adm.end(), mu) == adm.end())
        throw HypothesisViolation("mu = " + std::to_string(mu) + " is not admissible for d = " + std::to_string(d));
    if (mu == adm.front()) return 0;
    return ((d - 1) >> (mu + 1)) - ((d - 1) >> (mu + 2));
}

/// sum over the first g entries of (i - nu_i).
inline int codim_eo(const FinalType& ft) {
    ft.validate();
    int s = 0;
    for (int i = 1; i <= ft.genus(); ++i) s += i - ft.nu[i];
    return s;
}

// ---------------------------------------------------------------- bounds for a non-ordinary base

struct Interval {
    int lo = 0;
    int hi = 0;
    bool contains(int v) const { return lo <= v && v <= hi; }
    bool empty() const { return lo > hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct BoundsReport {
    Word word;
    int phi = 0;
    int t = 0;  ///< number of complements
    int r = 0;  ///< outermost V power
    int L1 = 0, L2 = 0, L3 = 0;
    int L_raw = 0, U_raw = 0;
    int L = 0, U = 0;  ///< clamped to [0, 2 l_Y]
    /// nu_{f_Y + n} for some n in [L, U] lies in this interval (bounds of V w).
    Interval rectangle_nu;
};

namespace eo_detail {

inline BoundsReport bounds_core(const RamificationData& rd, const Word& w) {
    w.validate();
    if (w.leading_perp) throw std::invalid_argument("bounds need a simple word ending in V: " + w.str());
    if (w.perps() < 1) throw std::invalid_argument("bounds need a word with at least one ⊥: " + w.str());
    BoundsReport b;
    b.word = w;
    b.t = w.perps();
    b.phi = phi_total(rd, w);
    b.r = w.exps.back();
    const Word wp{false, std::vector<int>(w.exps.begin(), w.exps.end() - 1)};
    const int lX = rd.l_X(), t = b.t;
    int ddeg = 0;
    for (int d : rd.breaks) ddeg += ((d + 1) / 2) >> std::min(b.r, 30);
    b.L1 = (rd.tango && ddeg >= *rd.tango) ? lX : lX - rd.a(b.r);
    b.L2 = rd.large_break_sum() ? b.phi - t * lX : b.phi - (3 * t / 2) * lX;
    int half = 0;
    for (int d : rd.breaks) half += eo_detail::ceil_div(phi(d, wp), 2);
    b.L3 = (b.r == 1 && half >= rd.g_X) ? lX : lX - rd.a(b.r);
    b.L_raw = b.L1 + b.L2 + b.L3;
    b.U_raw = rd.large_break_sum() ? b.phi + (t + 2) * lX : b.phi + eo_detail::ceil_div(3 * t + 4, 2) * lX;
    b.L = std::max(b.L_raw, 0);
    b.U = std::min(b.U_raw, 2 * rd.l_Y());
    ensure(b.L <= b.U, "lower bound does not exceed upper bound");
    return b;
}

}  // namespace eo_detail

/// L and U for a simple word V^r ⊥ w' with r >= 1; a leading complement is outside the bounds' scope.
inline BoundsReport bounds(const RamificationData& rd, const Word& w) {
    rd.validate();
    BoundsReport b = eo_detail::bounds_core(rd, w);
    // bounds of V w give the final-type rectangle
    BoundsReport bv = eo_detail::bounds_core(rd, prepend_V(w));
    b.rectangle_nu = {rd.f_Y() + bv.L, rd.f_Y() + bv.U};
    return b;
}

/// Index l = f_Y + phi(w) + 2 l_X and the interval for nu_l, for w = V^{n_s} ⊥ ... ⊥ V^{n_1}.
struct WordInterval {
    int index = 0;
    int center = 0;
    int radius = 0;
    Interval raw;
};

inline WordInterval word_interval(const RamificationData& rd, const Word& w) {
    rd.validate();
    w.validate();
    if (w.leading_perp) throw std::invalid_argument("final-type interval needs a word without a leading ⊥");
    const int s = w.blocks(), lX = rd.l_X();
    WordInterval out;
    out.index = rd.f_Y() + phi_total(rd, w) + 2 * lX;
    out.center = rd.f_Y() + phi_total(rd, prepend_V(w)) + lX;
    out.radius = rd.large_break_sum() ? (s + 1) * lX : eo_detail::ceil_div(3 * s + 2, 2) * lX;
    out.raw = {out.center - out.radius, out.center + out.radius};
    return out;
}

/// Per-index intervals for nu_0 .. nu_{g_Y}.
struct FinalTypeBounds {
    std::vector<Interval> raw;     ///< theorem intervals only (unconstrained entries are [0, l])
    std::vector<Interval> tight;   ///< after structural constraints and propagation
};

/// Propagates nu_0 = 0, monotonicity and unit steps through a list of intervals.
inline void propagate_steps(std::vector<Interval>& iv) {
    const int n = int(iv.size());
    iv[0] = {std::max(iv[0].lo, 0), std::min(iv[0].hi, 0)};
    for (int l = 1; l < n; ++l) {
        iv[l].lo = std::max(iv[l].lo, iv[l - 1].lo);
        iv[l].hi = std::min(iv[l].hi, iv[l - 1].hi + 1);
    }
    for (int l = n - 2; l >= 0; --l) {
        iv[l].lo = std::max(iv[l].lo, iv[l + 1].lo - 1);
        iv[l].hi = std::min(iv[l].hi, iv[l + 1].hi);
    }
}

inline void apply_structure(const RamificationData& rd, std::vector<Interval>& iv) {
    const int f = rd.f_Y();
    for (int l = 0; l < int(iv.size()); ++l) {
        if (l <= f)
            iv[l] = {std::max(iv[l].lo, l), std::min(iv[l].hi, l)};
        else
            iv[l] = {std::max(iv[l].lo, f), std::min(iv[l].hi, l - 1)};
    }
    propagate_steps(iv);
}

/// Intersects the word intervals over words with at most max_perp complements and exponents <= max_exp.
inline FinalTypeBounds final_type_bounds(const RamificationData& rd, int max_perp = 3, int max_exp = 0) {
    rd.validate();
    const int g = rd.g_Y();
    if (max_exp <= 0) {
        int dmax = *std::max_element(rd.breaks.begin(), rd.breaks.end());
        max_exp = eo_detail::floor_log2(std::max(dmax - 1, 1)) + 1;
    }
    FinalTypeBounds out;
    out.raw.resize(g + 1);
    for (int l = 0; l <= g; ++l) out.raw[l] = {0, l};
    for (const Word& w : enumerate_words(max_perp, max_exp)) {
        if (w.leading_perp) continue;
        WordInterval wi = word_interval(rd, w);
        if (wi.index < 0 || wi.index > g) continue;
        auto& iv = out.raw[wi.index];
        iv = {std::max(iv.lo, wi.raw.lo), std::min(iv.hi, wi.raw.hi)};
    }
    out.tight = out.raw;
    apply_structure(rd, out.tight);
    return out;
}

/// Interval for nu_l of a one-point cover from the logarithmic bound.
inline Interval one_point_bounds(const RamificationData& rd, int l) {
    rd.validate();
    if (rd.m() != 1) throw HypothesisViolation("one-point bounds need exactly one branch point");
    const int f = rd.f_Y(), lX = rd.l_X(), d = rd.breaks[0];
    if (l < 1 || l > rd.g_Y()) throw std::invalid_argument("index outside 1..g_Y");
    if (l <= f) return {l, l};
    if (l < f + 2 * lX) return {f, l - 1};
    const int cl = eo_detail::ceil_log2(d - 1);
    const int radius = d <= 4 * rd.g_X - 5 ? (3 * cl * lX) / 2 : cl * lX;
    const int center = f + (l - f) / 2;
    return {center - radius, center + radius};
}

/// Minimal-⊥ word w without leading ⊥ and phi(d, w) = m, by breadth-first search over values.
inline Word word_for_target(int d, int m) {
    if (d < 1 || d % 2 == 0) throw std::invalid_argument("need an odd positive d");
    if (m < 0 || m > (d - 1) / 2) throw std::invalid_argument("target outside [0, (d-1)/2]");
    // parent[x] = (previous value or -1, exponent of the newest block)
    std::map<int, std::pair<int, int>> parent;
    std::vector<int> layer;
    for (int n = 1;; ++n) {
        int x = (d - 1) >> std::min(n, 30);
        if (!parent.count(x)) {
            parent[x] = {-1, n};
            layer.push_back(x);
        }
        if (x == 0) break;
    }
    while (!parent.count(m) && !layer.empty()) {
        std::vector<int> next;
        for (int x : layer)
            for (int n = 1;; ++n) {
                int y = (d - 1 - x) >> std::min(n, 30);
                if (!parent.count(y)) {
                    parent[y] = {x, n};
                    next.push_back(y);
                }
                if (y == 0) break;
            }
        layer = std::move(next);
    }
    if (!parent.count(m)) throw std::logic_error("no word reaches phi = " + std::to_string(m));
    Word w;
    for (int x = m; x != -1; x = parent[x].first) w.exps.push_back(parent[x].second);
    std::reverse(w.exps.begin(), w.exps.end());
    ensure(phi(d, w) == m, "witness word evaluates to its target");
    return w;
}

}  // namespace asdr
