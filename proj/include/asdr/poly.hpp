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
#include <utility>
#include <vector>

#include "errors.hpp"
#include "gf2m.hpp"
#include "laurent.hpp"

namespace asdr {

/// Univariate polynomial over GF(2^m), c[i] the coefficient of x^i, no trailing zeros.
struct Poly {
    Vec c;

    Poly() = default;
    explicit Poly(Vec coef) : c(std::move(coef)) { trim(); }
    static Poly constant(Elem a) { return Poly(Vec{a}); }
    static Poly monomial(Elem a, int e) {
        Vec v(e + 1, 0);
        v[e] = a;
        return Poly(v);
    }
    /// x + a
    static Poly linear(Elem a) { return Poly(Vec{a, 1}); }

    int deg() const { return int(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }
    bool is_one() const { return c.size() == 1 && c[0] == 1; }
    Elem lead() const { return c.empty() ? 0 : c.back(); }
    Elem at(int i) const { return i < int(c.size()) ? c[i] : 0; }
    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    friend bool operator==(const Poly&, const Poly&) = default;
    friend bool operator<(const Poly& a, const Poly& b) { return a.c < b.c; }
};

namespace poly {

inline Poly add(const Poly& a, const Poly& b) {
    Vec r(std::max(a.c.size(), b.c.size()), 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) r[i] ^= a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) r[i] ^= b.c[i];
    return Poly(r);
}

inline Poly scale(const Field& F, const Poly& a, Elem s) {
    Vec r(a.c);
    for (auto& e : r) e = F.mul(e, s);
    return Poly(r);
}

inline Poly mul(const Field& F, const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Vec r(a.c.size() + b.c.size() - 1, 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            if (b.c[j]) r[i + j] ^= F.mul(a.c[i], b.c[j]);
    }
    return Poly(r);
}

inline std::pair<Poly, Poly> divmod(const Field& F, const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (a.deg() < b.deg()) return {Poly(), a};
    Vec r(a.c), q(a.c.size() - b.c.size() + 1, 0);
    const Elem il = F.inv(b.lead());
    for (int i = a.deg(); i >= b.deg(); --i) {
        Elem t = r[i];
        if (!t) continue;
        t = F.mul(t, il);
        q[i - b.deg()] = t;
        for (int j = 0; j <= b.deg(); ++j)
            if (b.c[j]) r[i - b.deg() + j] ^= F.mul(t, b.c[j]);
    }
    return {Poly(q), Poly(r)};
}

inline Poly mod(const Field& F, const Poly& a, const Poly& b) { return divmod(F, a, b).second; }

inline Poly monic(const Field& F, const Poly& a) { return a.is_zero() ? a : scale(F, a, F.inv(a.lead())); }

inline Poly gcd(const Field& F, Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = mod(F, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(F, a);
}

inline Poly pow(const Field& F, Poly a, int e) {
    Poly r = Poly::constant(1);
    while (e > 0) {
        if (e & 1) r = mul(F, r, a);
        e >>= 1;
        if (e) a = mul(F, a, a);
    }
    return r;
}

inline Poly derivative(const Poly& a) {
    Vec r;
    for (int i = 1; i <= a.deg(); ++i) r.push_back((i & 1) ? a.c[i] : 0);
    return Poly(r);
}

inline Elem eval(const Field& F, const Poly& a, Elem x) {
    Elem r = 0;
    for (int i = a.deg(); i >= 0; --i) r = F.mul(r, x) ^ a.c[i];
    return r;
}

/// Entrywise map of coefficients.
template <class Fn>
inline Poly map_coeffs(const Poly& a, Fn fn) {
    Vec r(a.c);
    for (auto& e : r) e = fn(e);
    return Poly(r);
}

/// a(x(u)) by Horner.
inline LaurentSeries eval_series(const Field& F, const Poly& a, const LaurentSeries& x) {
    if (a.is_zero()) return LaurentSeries::zero(F);
    LaurentSeries r = LaurentSeries::constant(F, a.lead());
    for (int i = a.deg() - 1; i >= 0; --i) {
        r = r * x;
        if (a.c[i]) r = r + LaurentSeries::constant(F, a.c[i]);
    }
    return r;
}

/// Distinct roots in the working field, ascending.
inline std::vector<Elem> roots(const Field& F, const Poly& p) {
    std::vector<Elem> out;
    if (p.deg() < 1) return out;
    Poly f = monic(F, p);
    // g = gcd(f, x^(2^m) - x)
    Poly r = mod(F, Poly::monomial(1, 1), f);
    for (int i = 0; i < F.m(); ++i) r = mod(F, mul(F, r, r), f);
    Poly g = gcd(F, f, add(r, Poly::monomial(1, 1)));
    std::vector<Poly> stack{g};
    while (!stack.empty()) {
        Poly h = stack.back();
        stack.pop_back();
        if (h.deg() < 1) continue;
        if (h.deg() == 1) {
            out.push_back(F.div(h.c[0], h.c[1]));
            continue;
        }
        bool split = false;
        for (int j = 0; j < F.m() && !split; ++j) {
            // Tr(a x) mod h separates roots with distinct traces of a*root.
            Poly ax = mod(F, Poly::monomial(Elem(1) << j, 1), h), t = ax;
            for (int i = 1; i < F.m(); ++i) {
                ax = mod(F, mul(F, ax, ax), h);
                t = add(t, ax);
            }
            Poly d = gcd(F, h, t);
            if (d.deg() >= 1 && d.deg() < h.deg()) {
                stack.push_back(d);
                stack.push_back(divmod(F, h, d).first);
                split = true;
            }
        }
        ensure(split, "root splitting");
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace poly

/// num/den with gcd 1 and monic den.
struct RatFun {
    Poly num;
    Poly den = Poly::constant(1);

    RatFun() = default;
    RatFun(Poly n) : num(std::move(n)) {}
    RatFun(const Field& F, Poly n, Poly d) : num(std::move(n)), den(std::move(d)) { normalize(F); }

    bool is_zero() const { return num.is_zero(); }
    bool is_poly() const { return den.is_one(); }

    void normalize(const Field& F) {
        if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
        if (num.is_zero()) {
            den = Poly::constant(1);
            return;
        }
        if (!den.is_one()) {
            Poly g = poly::gcd(F, num, den);
            if (g.deg() > 0) {
                num = poly::divmod(F, num, g).first;
                den = poly::divmod(F, den, g).first;
            }
        }
        Elem l = den.lead();
        if (l != 1) {
            Elem il = F.inv(l);
            num = poly::scale(F, num, il);
            den = poly::scale(F, den, il);
        }
    }

    friend bool operator==(const RatFun&, const RatFun&) = default;
};

namespace ratfun {

inline RatFun add(const Field& F, const RatFun& a, const RatFun& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den == b.den) return RatFun(F, poly::add(a.num, b.num), a.den);
    Poly n = poly::add(poly::mul(F, a.num, b.den), poly::mul(F, b.num, a.den));
    return RatFun(F, n, poly::mul(F, a.den, b.den));
}

inline RatFun mul(const Field& F, const RatFun& a, const RatFun& b) {
    if (a.is_zero() || b.is_zero()) return RatFun();
    if (a.is_poly() && b.is_poly()) return RatFun(poly::mul(F, a.num, b.num));
    return RatFun(F, poly::mul(F, a.num, b.num), poly::mul(F, a.den, b.den));
}

inline RatFun scale(const Field& F, const RatFun& a, Elem s) {
    if (s == 0) return RatFun();
    RatFun r = a;
    r.num = poly::scale(F, a.num, s);
    return r;
}

inline RatFun inv(const Field& F, const RatFun& a) {
    if (a.is_zero()) throw std::domain_error("inverse of zero rational function");
    return RatFun(F, a.den, a.num);
}

inline RatFun derivative(const Field& F, const RatFun& a) {
    if (a.is_zero()) return a;
    Poly n = poly::add(poly::mul(F, poly::derivative(a.num), a.den), poly::mul(F, a.num, poly::derivative(a.den)));
    return RatFun(F, n, poly::mul(F, a.den, a.den));
}

/// Expansion given the series of x; the inverse of den is capped at rel_cap relative terms.
inline LaurentSeries eval_series(const Field& F, const RatFun& a, const LaurentSeries& x, int rel_cap) {
    if (a.is_zero()) return LaurentSeries::zero(F);
    LaurentSeries n = poly::eval_series(F, a.num, x);
    if (a.is_poly()) return n;
    return n * poly::eval_series(F, a.den, x).inverse(rel_cap);
}

}  // namespace ratfun

}  // namespace asdr
