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

#include <algorithm>
#include <climits>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "gf2m.hpp"

namespace asdr {

/// known_upto of an exact (finitely supported) series.
inline constexpr int kExact = 1 << 28;

inline int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
inline int ceil_div(int a, int b) { return -floor_div(-a, b); }
inline int cap_known(long long k) { return int(std::min<long long>(k, kExact)); }

/// Truncated Laurent series sum c_e u^e + O(u^known_upto).
/// Stored densely from the valuation to the last nonzero coefficient; coefficients
/// above the stored range and below known_upto are zero.
class LaurentSeries {
public:
    LaurentSeries() = default;

    LaurentSeries(const Field& F, int val, Vec coef, int known) : F_(&F), val_(val), c_(std::move(coef)), k_(known) {
        normalize();
    }

    static LaurentSeries zero(const Field& F, int known = kExact) { return LaurentSeries(F, known, {}, known); }
    static LaurentSeries constant(const Field& F, Elem c, int known = kExact) { return monomial(F, c, 0, known); }
    static LaurentSeries monomial(const Field& F, Elem c, int e, int known = kExact) {
        return LaurentSeries(F, e, Vec{c}, known);
    }

    const Field& field() const { return *F_; }
    bool has_field() const { return F_ != nullptr; }
    /// Lowest possibly nonzero exponent; equals known_upto for a series zero within precision.
    int valuation() const { return val_; }
    int known_upto() const { return k_; }
    bool is_zero() const { return c_.empty(); }
    bool is_exact() const { return k_ >= kExact; }
    /// Last stored exponent + 1.
    int stored_end() const { return val_ + int(c_.size()); }
    Elem leading() const { return c_.empty() ? 0 : c_[0]; }

    Elem coeff(int e) const {
        if (e >= k_) throw PrecisionExhausted("coefficient u^" + std::to_string(e) + " beyond known_upto " + std::to_string(k_));
        if (e < val_ || e >= stored_end()) return 0;
        return c_[e - val_];
    }
    /// Coefficient assuming e is known (no check).
    Elem raw(int e) const { return (e < val_ || e >= stored_end()) ? 0 : c_[e - val_]; }

    LaurentSeries truncated(int known) const {
        if (known >= k_) return *this;
        Vec c;
        for (int e = val_; e < std::min(known, stored_end()); ++e) c.push_back(raw(e));
        return LaurentSeries(*F_, val_, std::move(c), known);
    }

    /// Principal part, exponents < 0.
    LaurentSeries principal() const {
        Vec c;
        for (int e = val_; e < std::min(0, stored_end()); ++e) c.push_back(raw(e));
        if (k_ < 0) throw PrecisionExhausted("principal part not fully known");
        return LaurentSeries(*F_, val_, std::move(c), kExact);
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
        a.check(b);
        const int k = std::min(a.k_, b.k_);
        if (a.c_.empty()) return b.truncated(k);
        if (b.c_.empty()) return a.truncated(k);
        const int lo = std::min(a.val_, b.val_);
        const int hi = std::min(k, std::max(a.stored_end(), b.stored_end()));
        Vec c;
        for (int e = lo; e < hi; ++e) c.push_back(a.raw(e) ^ b.raw(e));
        return LaurentSeries(*a.F_, lo, std::move(c), k);
    }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + b; }
    LaurentSeries& operator+=(const LaurentSeries& b) { return *this = *this + b; }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        a.check(b);
        const long long ra = (long long)a.k_ - a.val_, rb = (long long)b.k_ - b.val_;
        const int v = a.val_ + b.val_;
        const int k = cap_known(v + std::min(ra, rb));
        const int hi = std::min<long long>(k, (long long)a.stored_end() + b.stored_end() - 1);
        Vec c(std::max(0, hi - v), 0);
        const Field& F = *a.F_;
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            Elem x = a.c_[i];
            if (!x) continue;
            for (std::size_t j = 0; j < b.c_.size() && int(i + j) < hi - v; ++j)
                if (b.c_[j]) c[i + j] ^= F.mul(x, b.c_[j]);
        }
        return LaurentSeries(F, v, std::move(c), k);
    }
    LaurentSeries& operator*=(const LaurentSeries& b) { return *this = *this * b; }

    LaurentSeries scaled(Elem s) const {
        if (s == 0) return zero(*F_, k_);
        Vec c(c_);
        for (auto& e : c) e = F_->mul(e, s);
        return LaurentSeries(*F_, val_, std::move(c), k_);
    }

    /// u^s * this.
    LaurentSeries shifted(int s) const { return LaurentSeries(*F_, val_ + s, c_, is_exact() ? kExact : k_ + s); }

    /// Frobenius: sum c_e^2 u^(2e), precision doubles.
    LaurentSeries square() const {
        Vec c(c_.empty() ? 0 : 2 * c_.size() - 1, 0);
        for (std::size_t i = 0; i < c_.size(); ++i) c[2 * i] = F_->sqr(c_[i]);
        return LaurentSeries(*F_, 2 * val_, std::move(c), cap_known(2LL * k_));
    }

    /// Multiplicative inverse; rel_cap bounds the relative precision of exact non-monomial inputs.
    LaurentSeries inverse(int rel_cap = -1) const {
        if (c_.empty()) throw PrecisionExhausted("inverse of a series that is zero within precision");
        long long r = (long long)k_ - val_;
        if (c_.size() == 1 && is_exact()) return LaurentSeries(*F_, -val_, Vec{F_->inv(c_[0])}, kExact);
        if (is_exact()) {
            if (rel_cap < 0) throw PrecisionExhausted("inverse of an exact series needs a precision cap");
            r = rel_cap;
        } else if (rel_cap >= 0) {
            r = std::min<long long>(r, rel_cap);
        }
        const int n = int(r);
        Vec out(n, 0);
        const Elem inv0 = F_->inv(c_[0]);
        for (int i = 0; i < n; ++i) {
            Elem s = (i == 0) ? 1 : 0;
            for (int j = 1; j <= i && j < int(c_.size()); ++j)
                if (c_[j] && out[i - j]) s ^= F_->mul(c_[j], out[i - j]);
            out[i] = F_->mul(s, inv0);
        }
        return LaurentSeries(*F_, -val_, std::move(out), -val_ + n);
    }

    /// Integer power (negative via inverse).
    LaurentSeries pow(int n, int rel_cap = -1) const {
        if (n < 0) return inverse(rel_cap).pow(-n);
        LaurentSeries r = constant(*F_, 1), b = *this;
        while (n) {
            if (n & 1) r = r * b;
            n >>= 1;
            if (n) b = b * b;
        }
        return r;
    }

    /// d/du.
    LaurentSeries derivative() const {
        Vec c;
        const int lo = val_ - 1;
        for (int e = val_; e < stored_end(); ++e) c.push_back((e & 1) ? raw(e) : 0);
        return LaurentSeries(*F_, lo, std::move(c), is_exact() ? kExact : k_ - 1);
    }

    /// Square root; all known odd-exponent coefficients must vanish.
    LaurentSeries sqrt() const {
        for (int e = val_; e < stored_end(); ++e)
            if ((e & 1) && raw(e)) throw OddExponentInSqrt("sqrt of series with odd exponent " + std::to_string(e));
        const int v = c_.empty() ? ceil_div(k_, 2) : floor_div(val_, 2);
        Vec c;
        for (int e = v; 2 * e < stored_end(); ++e) c.push_back(F_->sqrt(raw(2 * e)));
        return LaurentSeries(*F_, v, std::move(c), is_exact() ? kExact : ceil_div(k_, 2));
    }

    /// this(g(u)); g must have valuation >= 1.
    LaurentSeries compose(const LaurentSeries& g) const {
        check(g);
        if (g.c_.empty() || g.val_ < 1) throw std::invalid_argument("compose requires inner valuation >= 1");
        const long long vg = g.val_, rg = (long long)g.k_ - g.val_;
        if (c_.empty()) return zero(*F_, is_exact() ? kExact : cap_known(k_ * vg));
        const long long inf = kExact;
        long long K = std::min(is_exact() ? inf : (long long)k_ * vg, g.is_exact() ? inf : (long long)val_ * vg + rg);
        K = std::min(K, inf);
        const bool exact = K >= inf;
        if (exact && val_ < 0 && g.c_.size() > 1)
            throw PrecisionExhausted("exact composition with a pole needs finite precision");
        const int rel = exact ? kExact : int(K - (long long)val_ * vg);
        auto cut = [&](const LaurentSeries& s) { return exact ? s : s.truncated(rel); };
        // Horner on the unit part; result = g^val * h(g).
        LaurentSeries acc = constant(*F_, c_.back());
        for (int i = int(c_.size()) - 2; i >= 0; --i) {
            acc = cut(acc * g);
            if (c_[i]) acc = acc + constant(*F_, c_[i]);
        }
        LaurentSeries gp = g.pow(val_, exact ? -1 : rel);
        LaurentSeries r = gp * acc;
        return exact ? r : r.truncated(int(K));
    }

    friend bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
        return a.k_ == b.k_ && a.val_ == b.val_ && a.c_ == b.c_;
    }

    /// Equal on the common known range.
    bool agrees_with(const LaurentSeries& o) const { return (*this + o).is_zero(); }

    /// "c_v*u^v + ... + O(u^k)" with hex coefficients.
    std::string str() const {
        std::ostringstream os;
        bool first = true;
        for (int e = val_; e < stored_end(); ++e) {
            Elem c = raw(e);
            if (!c) continue;
            if (!first) os << " + ";
            os << std::hex << "0x" << c << std::dec << "*u^" << e;
            first = false;
        }
        if (!is_exact()) os << (first ? "" : " + ") << "O(u^" << k_ << ")";
        else if (first) os << "0";
        return os.str();
    }

private:
    void normalize() {
        if (k_ > kExact) k_ = kExact;
        if (int(c_.size()) > k_ - val_) c_.resize(std::max(0, k_ - val_));
        std::size_t lead = 0;
        while (lead < c_.size() && c_[lead] == 0) ++lead;
        if (lead == c_.size()) {
            c_.clear();
            val_ = k_;
            return;
        }
        if (lead) {
            c_.erase(c_.begin(), c_.begin() + lead);
            val_ += int(lead);
        }
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    void check(const LaurentSeries& o) const {
        if (!(F_->spec() == o.F_->spec())) throw std::invalid_argument("mismatched FieldSpec");
    }

    const Field* F_ = nullptr;
    int val_ = kExact;
    Vec c_;
    int k_ = kExact;
};

/// f du.
struct LocalDifferential {
    LaurentSeries f;
};

/// Element of K_Q / O_Q: finitely many strictly negative exponents.
class TailClass {
public:
    TailClass() = default;
    explicit TailClass(const Field& F) : F_(&F) {}
    TailClass(const Field& F, std::map<int, Elem> t) : F_(&F) {
        for (auto [e, c] : t) set(e, c);
    }

    static TailClass from_series(const LaurentSeries& s) {
        TailClass t(s.field());
        if (s.known_upto() < 0) throw PrecisionExhausted("tail not fully known");
        for (int e = s.valuation(); e < std::min(0, s.stored_end()); ++e) t.set(e, s.raw(e));
        return t;
    }

    const Field& field() const { return *F_; }
    const std::map<int, Elem>& terms() const { return t_; }
    bool empty() const { return t_.empty(); }
    /// Order of the pole, 0 if empty.
    int pole_order() const { return t_.empty() ? 0 : -t_.begin()->first; }
    int lowest() const { return t_.empty() ? 0 : t_.begin()->first; }
    Elem get(int e) const {
        auto it = t_.find(e);
        return it == t_.end() ? 0 : it->second;
    }
    void set(int e, Elem c) {
        if (e >= 0) throw std::invalid_argument("tail exponents must be negative");
        if (c) t_[e] = c;
        else t_.erase(e);
    }
    void add(int e, Elem c) { set(e, get(e) ^ c); }

    TailClass operator+(const TailClass& o) const {
        TailClass r = *this;
        if (!r.F_) r.F_ = o.F_;
        for (auto [e, c] : o.t_) r.add(e, c);
        return r;
    }
    TailClass scaled(Elem s) const {
        TailClass r(*F_);
        for (auto [e, c] : t_) r.set(e, F_->mul(c, s));
        return r;
    }
    TailClass square() const {
        TailClass r(*F_);
        for (auto [e, c] : t_) r.set(2 * e, F_->sqr(c));
        return r;
    }
    LaurentSeries to_series() const {
        if (t_.empty()) return LaurentSeries::zero(*F_);
        const int lo = t_.begin()->first;
        Vec c(-lo, 0);
        for (auto [e, v] : t_) c[e - lo] = v;
        return LaurentSeries(*F_, lo, std::move(c), kExact);
    }
    friend bool operator==(const TailClass& a, const TailClass& b) { return a.t_ == b.t_; }

private:
    const Field* F_ = nullptr;
    std::map<int, Elem> t_;
};

inline Elem residue(const LocalDifferential& w) { return w.f.coeff(-1); }

/// sum a_n u^n du -> sum_{n odd} sqrt(a_n) u^((n-1)/2) du.
inline LocalDifferential cartier_local(const LocalDifferential& w) {
    const LaurentSeries& f = w.f;
    const Field& F = f.field();
    const int known = f.is_exact() ? kExact : ceil_div(f.known_upto() - 1, 2);
    if (f.is_zero()) return {LaurentSeries::zero(F, known)};
    const int lo = floor_div(f.valuation() - 1, 2);
    Vec c;
    for (int j = lo; 2 * j + 1 < f.stored_end(); ++j) c.push_back(F.sqrt(f.raw(2 * j + 1)));
    return {LaurentSeries(F, lo, std::move(c), known)};
}

/// Canonical antiderivative of the principal part of a second-kind local differential.
inline TailClass integrate_tail(const LocalDifferential& w) {
    const LaurentSeries& f = w.f;
    if (f.known_upto() < 0) throw PrecisionExhausted("principal part of differential not fully known");
    TailClass t(f.field());
    for (int e = f.valuation(); e < std::min(0, f.stored_end()); ++e) {
        Elem c = f.raw(e);
        if (!c) continue;
        if (e & 1) throw NotSecondKind("term u^" + std::to_string(e) + " du has no local antiderivative");
        t.set(e + 1, c);
    }
    return t;
}

/// d(tail) as a local differential body.
inline LaurentSeries tail_derivative(const TailClass& t) { return t.to_series().derivative(); }

/// (reduced, g) with reduced = t + g^2 + g of odd pole order or empty.
inline std::pair<TailClass, TailClass> reduce_as_tail(const TailClass& t) {
    TailClass red = t, g(t.field());
    const Field& F = t.field();
    while (!red.empty() && (red.lowest() % 2 == 0)) {
        const int e = red.lowest();
        const Elem r = F.sqrt(red.get(e));
        red.add(e, red.get(e));
        red.add(e / 2, r);
        g.add(e / 2, r);
    }
    return {red, g};
}

/// y with y^2 + y = f, y(0) = seed, to min(target, known(f)).
inline LaurentSeries solve_artin_schreier(const LaurentSeries& f, Elem seed, int target) {
    const Field& F = f.field();
    if (f.valuation() < 0 && !f.is_zero()) throw std::invalid_argument("solve_artin_schreier needs valuation >= 0");
    const Elem f0 = f.coeff(0);
    if ((F.sqr(seed) ^ seed) != f0) throw NoRoot("seed is not a root of c^2 + c = f(0)");
    const int known = std::min(target, f.known_upto());
    if (known <= 0) throw PrecisionExhausted("artin-schreier solve has no known coefficients");
    LaurentSeries y = LaurentSeries::constant(F, seed);
    // residual valuation doubles per step.
    for (long long acc = 1; acc < known; acc *= 2) y = (y.square() + f).truncated(known);
    y = (y.square() + f).truncated(known);
    return y.truncated(known);
}

/// Both roots c of c^2 + c = b; NoRoot if none.
inline std::pair<Elem, Elem> as_seeds(const Field& F, Elem b) {
    auto c = F.solve_as(b);
    if (!c) throw NoRoot("c^2 + c = b has no root in " + F.spec().str());
    return {*c, *c ^ 1};
}

}  // namespace asdr
