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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "gf2m.hpp"
#include "laurent.hpp"
#include "poly.hpp"

namespace asdr {

/// Element of k(x)[z_1..z_r]: coefficient c[mask] multiplies prod_{bit i of mask} z_{i+1}.
struct FunctionElement {
    std::vector<RatFun> c;

    FunctionElement() : c(1) {}
    explicit FunctionElement(int level) : c(std::size_t(1) << level) {}
    static FunctionElement from(RatFun r, int level = 0) {
        FunctionElement f(level);
        f.c[0] = std::move(r);
        return f;
    }

    int level() const { return __builtin_ctzll(c.size()); }
    bool is_zero() const {
        for (const auto& r : c)
            if (!r.is_zero()) return false;
        return true;
    }
    /// Highest generator actually present.
    int effective_level() const {
        for (int l = level(); l > 0; --l)
            for (std::size_t m = std::size_t(1) << (l - 1); m < c.size(); ++m)
                if ((m >> (l - 1)) & 1)
                    if (!c[m].is_zero()) return l;
        return 0;
    }
    FunctionElement lifted(int lv) const {
        if (lv < level()) throw std::invalid_argument("cannot lower level of a function element");
        FunctionElement f(lv);
        for (std::size_t i = 0; i < c.size(); ++i) f.c[i] = c[i];
        return f;
    }
    /// Drop unused top generators.
    FunctionElement lowered(int lv) const {
        if (effective_level() > lv) throw std::invalid_argument("element depends on a higher generator");
        FunctionElement f(lv);
        for (std::size_t i = 0; i < f.c.size(); ++i) f.c[i] = c[i];
        return f;
    }
    friend bool operator==(const FunctionElement& a, const FunctionElement& b) {
        int l = std::max(a.level(), b.level());
        return a.lifted(l).c == b.lifted(l).c;
    }
};

/// Arithmetic in the tower k(x)[z_1..z_r], z_i^2 + z_i = psi_i.
class TowerAlgebra {
public:
    TowerAlgebra() = default;
    TowerAlgebra(const Field& F, std::vector<FunctionElement> psi) : F_(&F) {
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (psi[i].effective_level() > int(i))
                throw std::invalid_argument("psi_" + std::to_string(i + 1) + " uses generator z_" +
                                            std::to_string(psi[i].effective_level()));
            psi_.push_back(psi[i].lowered(int(i)));
        }
    }

    const Field& field() const { return *F_; }
    int depth() const { return int(psi_.size()); }
    const std::vector<FunctionElement>& psi() const { return psi_; }

    FunctionElement x() const { return FunctionElement::from(RatFun(Poly::monomial(1, 1))); }
    FunctionElement constant(Elem a) const { return FunctionElement::from(RatFun(Poly::constant(a))); }
    /// z_i, 1-based.
    FunctionElement z(int i) const {
        FunctionElement f(i);
        f.c[std::size_t(1) << (i - 1)] = RatFun(Poly::constant(1));
        return f;
    }

    FunctionElement add(const FunctionElement& a, const FunctionElement& b) const {
        int l = std::max(a.level(), b.level());
        FunctionElement r = a.lifted(l);
        FunctionElement bb = b.lifted(l);
        for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = ratfun::add(*F_, r.c[i], bb.c[i]);
        return r;
    }

    FunctionElement scale(const FunctionElement& a, Elem s) const {
        FunctionElement r = a;
        for (auto& e : r.c) e = ratfun::scale(*F_, e, s);
        return r;
    }

    FunctionElement mul_ratfun(const FunctionElement& a, const RatFun& q) const {
        FunctionElement r = a;
        for (auto& e : r.c) e = ratfun::mul(*F_, e, q);
        return r;
    }

    FunctionElement mul(const FunctionElement& a, const FunctionElement& b) const {
        int l = std::max(a.level(), b.level());
        FunctionElement r(l);
        r.c = mul_rec(a.lifted(l).c, b.lifted(l).c, l);
        return r;
    }

    FunctionElement sqr(const FunctionElement& a) const { return mul(a, a); }

    FunctionElement pow(const FunctionElement& a, int e) const {
        if (e < 0) return pow(inv(a), -e);
        FunctionElement r = constant(1), b = a;
        while (e) {
            if (e & 1) r = mul(r, b);
            e >>= 1;
            if (e) b = mul(b, b);
        }
        return r;
    }

    /// Inverse via the conjugate a0 + a1 + a1 z of a0 + a1 z.
    FunctionElement inv(const FunctionElement& a) const {
        const int l = a.effective_level();
        if (l == 0) {
            if (a.c[0].is_zero()) throw std::domain_error("inverse of zero function");
            return FunctionElement::from(ratfun::inv(*F_, a.c[0]));
        }
        auto [a0, a1] = halves(a.lowered(l).c, l);
        std::vector<RatFun> s0 = vadd(a0, a1);
        std::vector<RatFun> n = vadd(mul_rec(a0, s0, l - 1), mul_rec(mul_rec(a1, a1, l - 1), psi_[l - 1].c, l - 1));
        FunctionElement N(l - 1);
        N.c = n;
        FunctionElement Ni = inv(N).lifted(l - 1);
        FunctionElement conj(l);
        for (std::size_t i = 0; i < s0.size(); ++i) {
            conj.c[i] = s0[i];
            conj.c[i + s0.size()] = a1[i];
        }
        return mul(conj, Ni);
    }

    /// d f / d x, using dz_i = d psi_i.
    FunctionElement d_dx(const FunctionElement& f) const {
        const int l = f.effective_level();
        if (l == 0) return FunctionElement::from(ratfun::derivative(*F_, f.c[0]));
        auto [f0, f1] = halves(f.lowered(l).c, l);
        FunctionElement a(l - 1), b(l - 1);
        a.c = f0;
        b.c = f1;
        FunctionElement da = d_dx(a), db = d_dx(b), dz = d_dx(psi_[l - 1]);
        return add(add(da.lifted(l), mul(db.lifted(l), z(l))), mul(b, dz).lifted(l));
    }

private:
    using Coeffs = std::vector<RatFun>;

    static std::pair<Coeffs, Coeffs> halves(const Coeffs& a, int l) {
        std::size_t h = std::size_t(1) << (l - 1);
        return {Coeffs(a.begin(), a.begin() + h), Coeffs(a.begin() + h, a.end())};
    }
    Coeffs vadd(const Coeffs& a, const Coeffs& b) const {
        Coeffs r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = ratfun::add(*F_, a[i], b[i]);
        return r;
    }
    static bool vzero(const Coeffs& a) {
        for (const auto& r : a)
            if (!r.is_zero()) return false;
        return true;
    }

    /// (a0 + a1 z)(b0 + b1 z) = a0b0 + a1b1 psi + ((a0+a1)(b0+b1) + a0b0) z.
    Coeffs mul_rec(const Coeffs& a, const Coeffs& b, int l) const {
        if (l == 0) return {ratfun::mul(*F_, a[0], b[0])};
        auto [a0, a1] = halves(a, l);
        auto [b0, b1] = halves(b, l);
        Coeffs lo, hi;
        const bool za1 = vzero(a1), zb1 = vzero(b1);
        if (za1 && zb1) {
            lo = mul_rec(a0, b0, l - 1);
            hi = Coeffs(a0.size());
        } else if (za1) {
            lo = mul_rec(a0, b0, l - 1);
            hi = mul_rec(a0, b1, l - 1);
        } else if (zb1) {
            lo = mul_rec(a0, b0, l - 1);
            hi = mul_rec(a1, b0, l - 1);
        } else {
            Coeffs p0 = mul_rec(a0, b0, l - 1), p1 = mul_rec(a1, b1, l - 1);
            Coeffs s = mul_rec(vadd(a0, a1), vadd(b0, b1), l - 1);
            lo = vadd(p0, mul_rec(p1, psi_[l - 1].c, l - 1));
            hi = vadd(s, p0);
        }
        Coeffs r = lo;
        r.insert(r.end(), hi.begin(), hi.end());
        return r;
    }

    const Field* F_ = nullptr;
    std::vector<FunctionElement> psi_;
};

/// Point of P^1: infinity or a rational x-value.
struct BadPoint {
    bool inf = false;
    Elem a = 0;
    friend bool operator==(const BadPoint&, const BadPoint&) = default;
    friend bool operator<(const BadPoint& p, const BadPoint& q) {
        if (p.inf != q.inf) return p.inf;
        return p.a < q.a;
    }
    std::string str() const { return inf ? std::string("inf") : "0x" + [&] {
        std::ostringstream os;
        os << std::hex << a;
        return os.str();
    }(); }
};

/// Place of the tower over a bad point, parametrized by its uniformizer u.
struct Place {
    enum class Kind { Base, Split, Ramified };
    int level = 0;
    int index = 0;
    int parent = -1;
    std::vector<int> children;
    BadPoint base;
    Kind kind = Kind::Base;
    int d = 0;                      ///< break of this level, odd, 0 if split
    TailClass gloc;                 ///< z = z' + gloc, in the parent's uniformizer
    LaurentSeries u_parent;         ///< parent's uniformizer as a series in u
    LaurentSeries x;                ///< x(u)
    std::vector<LaurentSeries> z;   ///< z_1(u) .. z_level(u)
    int e = 1;                      ///< ramification index over P^1
    std::vector<int> breaks;        ///< per level 1..level
    std::vector<LaurentSeries> zmono;  ///< prod of z's per mask
};

struct Divisor {
    std::map<int, int> mult;  ///< top-level place index -> multiplicity
    int degree() const {
        int s = 0;
        for (auto [q, m] : mult) s += m;
        return s;
    }
    int at(int q) const {
        auto it = mult.find(q);
        return it == mult.end() ? 0 : it->second;
    }
};

/// f dx.
struct DifferentialElement {
    FunctionElement f;
};

/// Basis of a Riemann-Roch space with expansions at every top place.
struct RRSpace {
    std::vector<FunctionElement> basis;
    std::vector<std::vector<LaurentSeries>> exp;  ///< exp[b][q]
};

inline constexpr int kPrecisionCap = 1 << 16;

class TowerCurve {
public:
    TowerCurve(const Field& F, std::vector<FunctionElement> psi, std::vector<Elem> extra_bad = {})
        : alg_(F, std::move(psi)), extra_(std::move(extra_bad)) {
        collect_bad_points();
        build(32);
        compute_invariants();
    }

    const Field& field() const { return alg_.field(); }
    const TowerAlgebra& algebra() const { return alg_; }
    int depth() const { return alg_.depth(); }
    const std::vector<BadPoint>& bad_points() const { return bad_; }
    const std::vector<Elem>& extra_bad() const { return extra_; }

    /// First r levels, same bad locus.
    TowerCurve truncate(int r) const {
        std::vector<FunctionElement> psi(alg_.psi().begin(), alg_.psi().begin() + r);
        std::vector<Elem> extra;
        for (const auto& b : bad_)
            if (!b.inf) extra.push_back(b.a);
        return TowerCurve(field(), psi, extra);
    }

    int genus() const { return genus_.back(); }
    int prank() const { return prank_.back(); }
    int local_rank() const { return genus() - prank(); }
    int genus_at(int level) const { return genus_[level]; }
    int prank_at(int level) const { return prank_[level]; }

    int precision() const { return prec_; }
    const std::vector<Place>& places(int level) const { return tree_[level]; }
    const std::vector<Place>& top() const { return tree_.back(); }
    int num_top() const { return int(tree_.back().size()); }

    /// Top places over a bad point.
    std::vector<int> places_over(const BadPoint& b) const {
        std::vector<int> out;
        for (const auto& q : top())
            if (q.base == b) out.push_back(q.index);
        if (out.empty()) throw UnsupportedDivisor("point " + b.str() + " is not in the bad locus");
        return out;
    }

    /// Break at a top place for a level, 0 if unramified.
    int ramification_break(int place, int level) const { return top()[place].breaks[level - 1]; }

    void refine(int P) const {
        if (P > kPrecisionCap) throw PrecisionExhausted("place precision cap 2^16 reached");
        if (P > prec_) build(P);
    }

    /// Expansion at a top place with known_upto >= target, re-expanding as needed.
    LaurentSeries expand(const FunctionElement& f, int place, int target) const {
        for (;;) {
            LaurentSeries s = expand_at(top()[place], f);
            if (s.known_upto() >= target) return s;
            refine(2 * prec_);
        }
    }

    LocalDifferential expand_diff(const DifferentialElement& w, int place, int target) const {
        for (;;) {
            const Place& Q = top()[place];
            LaurentSeries s = expand_at(Q, w.f) * Q.x.derivative();
            if (s.known_upto() >= target) return {s};
            refine(2 * prec_);
        }
    }

    int valuation(const FunctionElement& f, int place) const {
        if (f.is_zero()) throw std::invalid_argument("valuation of zero");
        for (int t = 8;; t *= 2) {
            LaurentSeries s = expand(f, place, t);
            if (!s.is_zero()) return s.valuation();
            if (t > kPrecisionCap) throw PrecisionExhausted("function vanishes to enormous order");
        }
    }

    /// v_Q(dx) for a top place.
    int dx_valuation(int place) const {
        for (;;) {
            LaurentSeries dx = top()[place].x.derivative();
            if (!dx.is_zero()) return dx.valuation();
            refine(2 * prec_);
        }
    }

    Divisor div_dx() const {
        Divisor D;
        for (int q = 0; q < num_top(); ++q) D.mult[q] = dx_valuation(q);
        return D;
    }

    /// Basis of L(D); expansions known to at least target at every top place.
    RRSpace riemann_roch(const Divisor& D, int target) const;
    /// Basis h of {h dx in Gamma(Omega^1(D))}; expansions are of h*x'(u), known to target.
    RRSpace differentials(const Divisor& D, int target) const;

    DifferentialElement cartier_global(const DifferentialElement& w) const;
    /// Tr: w0 + w1 z_r -> w1 (result on the level r-1 tower).
    DifferentialElement trace(const DifferentialElement& w) const {
        const int r = depth();
        if (r < 1) throw std::invalid_argument("trace needs a level");
        FunctionElement f = w.f.lifted(r);
        FunctionElement out(r - 1);
        std::size_t h = std::size_t(1) << (r - 1);
        for (std::size_t i = 0; i < h; ++i) out.c[i] = f.c[i + h];
        return {out};
    }

    /// Denominators of f vanish only over the bad locus.
    bool denominators_on_bad_locus(const FunctionElement& f) const {
        for (const auto& r : f.c) {
            Poly d = r.den;
            for (const auto& b : bad_) {
                if (b.inf) continue;
                for (;;) {
                    auto [q, rem] = poly::divmod(field(), d, Poly::linear(b.a));
                    if (!rem.is_zero() || d.deg() < 1) break;
                    d = q;
                }
            }
            if (d.deg() > 0) return false;
        }
        return true;
    }

private:
    void collect_bad_points() {
        const Field& F = field();
        std::vector<BadPoint> b{BadPoint{true, 0}};
        auto add_root = [&](Elem a) {
            BadPoint p{false, a};
            if (std::find(b.begin(), b.end(), p) == b.end()) b.push_back(p);
        };
        for (Elem a : extra_) {
            if (!F.valid(a)) throw std::invalid_argument("bad x-value outside the field");
            add_root(a);
        }
        for (const auto& psi : alg_.psi())
            for (const auto& r : psi.c) {
                if (r.den.deg() < 1) continue;
                auto rs = poly::roots(F, r.den);
                Poly rest = r.den;
                for (Elem a : rs) {
                    add_root(a);
                    for (;;) {
                        auto [q, rem] = poly::divmod(F, rest, Poly::linear(a));
                        if (!rem.is_zero()) break;
                        rest = q;
                    }
                }
                if (rest.deg() > 0)
                    throw FieldTooSmall("a denominator has roots outside " + F.spec().str(), 0);
            }
        std::sort(b.begin(), b.end());
        bad_ = b;
    }

    LaurentSeries expand_at(const Place& P, const FunctionElement& f) const {
        const Field& F = field();
        if (f.effective_level() > P.level) throw std::invalid_argument("element above the place's level");
        LaurentSeries s = LaurentSeries::zero(F);
        const std::size_t n = std::min(f.c.size(), std::size_t(1) << P.level);
        for (std::size_t m = 0; m < n; ++m) {
            if (f.c[m].is_zero()) continue;
            LaurentSeries t = ratfun::eval_series(F, f.c[m], P.x, prec_);
            if (m) t = t * P.zmono[m];
            s = s + t;
        }
        return s;
    }

    static void fill_zmono(Place& P) {
        const Field& F = P.x.field();
        P.zmono.assign(std::size_t(1) << P.level, LaurentSeries::constant(F, 1));
        for (std::size_t m = 1; m < P.zmono.size(); ++m) {
            int i = __builtin_ctzll(m);
            P.zmono[m] = P.zmono[m & (m - 1)] * P.z[i];
        }
    }

    /// u = s(U) solving c U^2 + sqrt(c) U s^((d+1)/2) + s h(s) = 0, h = u^d psi'(u).
    LaurentSeries newton_uniformizer(const LaurentSeries& h, int d, int target) const {
        const Field& F = field();
        const Elem c = h.coeff(0), rc = F.sqrt(c);
        const LaurentSeries U = LaurentSeries::monomial(F, 1, 1);
        const LaurentSeries hd = h.derivative();
        const int half = (d + 1) / 2;
        auto residual = [&](const LaurentSeries& s, LaurentSeries* dG) {
            LaurentSeries hs = h.compose(s);
            LaurentSeries sp = s.pow(half - 1);
            LaurentSeries G = U.square().scaled(c) + (U * sp * s).scaled(rc) + s * hs;
            if (dG) {
                LaurentSeries der = hs + s * hd.compose(s);
                if (half & 1) der = der + (U * sp).scaled(rc);
                *dG = der;
            }
            return G;
        };
        auto poly_upto = [&](const LaurentSeries& s, int k) {
            Vec co;
            for (int e = s.valuation(); e < std::min(k, s.stored_end()); ++e) co.push_back(s.raw(e));
            return LaurentSeries(F, s.valuation(), co, k);
        };
        LaurentSeries s = LaurentSeries::monomial(F, 1, 2, 3);
        int prec = 3;
        for (int it = 0;; ++it) {
            if (it > 400) throw PrecisionExhausted("newton iteration for a ramified place did not settle");
            const int next = std::min(target, 2 * prec);
            s = poly_upto(s, next);
            LaurentSeries dG;
            LaurentSeries G = residual(s, &dG);
            const int kn = std::min(next, G.known_upto());
            LaurentSeries delta = (G * dG.inverse()).truncated(kn);
            s = poly_upto(s + delta, kn);
            const bool stuck = kn <= prec;
            prec = kn;
            if (delta.is_zero() && (kn >= target || stuck)) break;
        }
        LaurentSeries G = residual(s, nullptr);
        ensure(G.is_zero(), "newton residual vanishes");
        return s.truncated(std::min(s.known_upto(), G.known_upto()));
    }

    void build(int P) const {
        const Field& F = field();
        prec_ = P;
        tree_.assign(depth() + 1, {});
        for (const auto& b : bad_) {
            Place p;
            p.index = int(tree_[0].size());
            p.base = b;
            p.x = b.inf ? LaurentSeries::monomial(F, 1, -1) : LaurentSeries(F, 0, Vec{b.a, 1}, kExact);
            p.u_parent = LaurentSeries::monomial(F, 1, 1);
            fill_zmono(p);
            tree_[0].push_back(std::move(p));
        }
        for (int l = 1; l <= depth(); ++l) {
            for (auto& par : tree_[l - 1]) {
                LaurentSeries psi = expand_at(par, alg_.psi()[l - 1]);
                psi = psi.truncated(psi.valuation() + P);
                if (psi.known_upto() < 1) throw PrecisionExhausted("psi expansion has no constant term");
                auto [red, g] = reduce_as_tail(TailClass::from_series(psi));
                LaurentSeries gs = g.to_series();
                LaurentSeries psir = psi + gs.square() + gs;
                Place base;
                base.level = l;
                base.parent = par.index;
                base.base = par.base;
                base.gloc = g;
                base.breaks = par.breaks;
                if (red.empty()) {
                    auto c = F.solve_as(psir.coeff(0));
                    if (!c)
                        throw FieldTooSmall("a place over " + par.base.str() + " is inert at level " +
                                                std::to_string(l) + " over " + F.spec().str(),
                                            0);
                    for (Elem seed : {*c, *c ^ Elem(1)}) {
                        Place q = base;
                        q.kind = Place::Kind::Split;
                        q.e = par.e;
                        q.breaks.push_back(0);
                        q.u_parent = LaurentSeries::monomial(F, 1, 1);
                        q.x = par.x;
                        q.z = par.z;
                        q.z.push_back(solve_artin_schreier(psir, seed, psir.known_upto()) + gs);
                        q.index = int(tree_[l].size());
                        par.children.push_back(q.index);
                        fill_zmono(q);
                        tree_[l].push_back(std::move(q));
                    }
                } else {
                    const int d = red.pole_order();
                    ensure(d % 2 == 1, "reduced break is odd");
                    LaurentSeries h = psir.shifted(d);
                    const int target = std::min(2 * h.known_upto() + 2, 2 * P + 4);
                    LaurentSeries s = newton_uniformizer(h, d, target);
                    Place q = base;
                    q.kind = Place::Kind::Ramified;
                    q.d = d;
                    q.e = 2 * par.e;
                    q.breaks.push_back(d);
                    q.u_parent = s;
                    q.x = par.x.compose(s);
                    for (const auto& zi : par.z) q.z.push_back(zi.compose(s));
                    const Elem rc = F.sqrt(psir.coeff(-d));
                    LaurentSeries zp = (LaurentSeries::monomial(F, rc, 1) * s.pow(-(d + 1) / 2));
                    q.z.push_back(g.empty() ? zp : zp + gs.compose(s));
                    q.index = int(tree_[l].size());
                    par.children.push_back(q.index);
                    fill_zmono(q);
                    tree_[l].push_back(std::move(q));
                }
            }
        }
    }

    void compute_invariants() {
        genus_ = {0};
        prank_ = {0};
        for (int l = 1; l <= depth(); ++l) {
            int sum = 0, m = 0;
            for (const auto& q : tree_[l])
                if (q.kind == Place::Kind::Ramified) {
                    sum += (q.d + 1) / 2;
                    ++m;
                }
            if (m == 0) throw ConfigError("level " + std::to_string(l) + " is unramified over the bad locus");
            genus_.push_back(2 * genus_.back() - 1 + sum);
            prank_.push_back(2 * prank_.back() - 1 + m);
        }
    }

    TowerAlgebra alg_;
    std::vector<Elem> extra_;
    std::vector<BadPoint> bad_;
    std::vector<int> genus_, prank_;
    mutable int prec_ = 0;
    mutable std::vector<std::vector<Place>> tree_;
};

// ---------------------------------------------------------------- Riemann-Roch

namespace detail {

/// Pole bounds on (c0, c1) for f = c0 + c1 z_l from bounds G at level-l places.
inline std::pair<std::vector<int>, std::vector<int>> split_bounds(const std::vector<Place>& lower,
                                                                  const std::vector<Place>& upper,
                                                                  const std::vector<int>& G) {
    std::vector<int> G0(lower.size()), G1(lower.size());
    for (const auto& P : lower) {
        const Place& q = upper[P.children[0]];
        const int k = q.gloc.pole_order();
        if (q.kind == Place::Kind::Ramified) {
            const int gq = G[q.index];
            G1[P.index] = floor_div(gq - q.d, 2);
            G0[P.index] = floor_div(gq, 2);
            if (!q.gloc.empty()) G0[P.index] = std::max(G0[P.index], G1[P.index] + k);
        } else {
            const int g1 = std::max(G[P.children[0]], G[P.children[1]]);
            G1[P.index] = g1;
            G0[P.index] = g1 + std::max(0, k);
        }
    }
    return {G0, G1};
}

}  // namespace detail

inline RRSpace TowerCurve::riemann_roch(const Divisor& D, int target) const {
    const Field& F = field();
    const int r = depth();
    for (auto [q, m] : D.mult)
        if (q < 0 || q >= num_top()) throw UnsupportedDivisor("divisor support off the bad locus");
    std::vector<int> G(num_top(), 0);
    for (auto [q, m] : D.mult) G[q] = m;

    // per-mask divisor on P^1 (indexed by bad point)
    std::vector<std::pair<unsigned, std::vector<int>>> cur{{0u, G}};
    for (int l = r; l >= 1; --l) {
        std::vector<std::pair<unsigned, std::vector<int>>> nxt;
        for (const auto& [mask, g] : cur) {
            auto [g0, g1] = detail::split_bounds(tree_[l - 1], tree_[l], g);
            nxt.push_back({mask, g0});
            nxt.push_back({mask | (1u << (l - 1)), g1});
        }
        cur = std::move(nxt);
    }

    struct Cand {
        unsigned mask;
        int i;
        std::size_t group;
    };
    struct Group {
        unsigned mask;
        std::vector<int> b;
        int top;
    };
    std::vector<Group> groups;
    std::vector<Cand> cands;
    for (const auto& [mask, b] : cur) {
        int total = 0;
        for (int v : b) total += v;
        if (total < 0) continue;
        groups.push_back({mask, b, total});
        for (int i = 0; i <= total; ++i) cands.push_back({mask, i, groups.size() - 1});
    }

    for (;;) {
        const int nt = num_top();
        std::vector<std::vector<LaurentSeries>> cexp(cands.size(), std::vector<LaurentSeries>(nt));
        bool short_prec = false;
        for (int q = 0; q < nt && !short_prec; ++q) {
            const Place& Q = top()[q];
            const int need = std::max(target, -G[q]);
            std::vector<LaurentSeries> inv_lin(bad_.size());
            for (std::size_t j = 0; j < bad_.size(); ++j)
                if (!bad_[j].inf)
                    inv_lin[j] = (Q.x + LaurentSeries::constant(F, bad_[j].a)).inverse(prec_);
            std::size_t ci = 0;
            for (const auto& grp : groups) {
                LaurentSeries base = Q.zmono[grp.mask];
                for (std::size_t j = 0; j < bad_.size(); ++j) {
                    if (bad_[j].inf || grp.b[j] == 0) continue;
                    base = base * inv_lin[j].pow(grp.b[j], prec_);
                }
                LaurentSeries cur_s = base;
                for (int i = 0; i <= grp.top; ++i) {
                    if (i) cur_s = cur_s * Q.x;
                    if (cur_s.known_upto() < need) short_prec = true;
                    cexp[ci++][q] = cur_s;
                }
            }
        }
        if (short_prec) {
            refine(2 * prec_);
            continue;
        }
        // constraints: coefficients below -G[q] vanish
        std::vector<Vec> rows;
        for (int q = 0; q < nt; ++q) {
            int lo = -G[q];
            for (const auto& ce : cexp) lo = std::min(lo, ce[q].valuation());
            for (int e = lo; e < -G[q]; ++e) {
                Vec row(cands.size());
                for (std::size_t c = 0; c < cands.size(); ++c) row[c] = cexp[c][q].coeff(e);
                if (!is_zero(row)) rows.push_back(std::move(row));
            }
        }
        std::vector<Vec> ker;
        if (rows.empty()) {
            for (std::size_t c = 0; c < cands.size(); ++c) ker.push_back(unit_vec(int(cands.size()), int(c)));
        } else {
            ker = Matrix::from_rows(F, int(cands.size()), rows).kernel();
        }
        RRSpace out;
        for (const auto& kv : ker) {
            FunctionElement f(r);
            std::vector<Vec> numer(groups.size());
            for (std::size_t c = 0; c < cands.size(); ++c) {
                if (!kv[c]) continue;
                auto& nv = numer[cands[c].group];
                if (int(nv.size()) <= cands[c].i) nv.resize(cands[c].i + 1, 0);
                nv[cands[c].i] ^= kv[c];
            }
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                if (numer[gi].empty()) continue;
                Poly num(numer[gi]), den = Poly::constant(1);
                for (std::size_t j = 0; j < bad_.size(); ++j) {
                    if (bad_[j].inf) continue;
                    int bj = groups[gi].b[j];
                    if (bj > 0) den = poly::mul(F, den, poly::pow(F, Poly::linear(bad_[j].a), bj));
                    if (bj < 0) num = poly::mul(F, num, poly::pow(F, Poly::linear(bad_[j].a), -bj));
                }
                RatFun rf(F, num, den);
                f.c[groups[gi].mask] = ratfun::add(F, f.c[groups[gi].mask], rf);
            }
            std::vector<LaurentSeries> ex(nt);
            for (int q = 0; q < nt; ++q) {
                LaurentSeries s = LaurentSeries::zero(F);
                for (std::size_t c = 0; c < cands.size(); ++c)
                    if (kv[c]) s = s + cexp[c][q].scaled(kv[c]);
                ex[q] = s;
            }
            out.basis.push_back(std::move(f));
            out.exp.push_back(std::move(ex));
        }
        if (D.degree() > 2 * genus() - 2 && int(out.basis.size()) != D.degree() + 1 - genus())
            throw DimensionMismatch("Riemann-Roch dimension " + std::to_string(out.basis.size()) + " != deg+1-g = " +
                                    std::to_string(D.degree() + 1 - genus()));
        return out;
    }
}

inline RRSpace TowerCurve::differentials(const Divisor& D, int target) const {
    for (;;) {
        Divisor E = D;
        std::vector<int> vdx(num_top());
        for (int q = 0; q < num_top(); ++q) {
            vdx[q] = dx_valuation(q);
            E.mult[q] = D.at(q) + vdx[q];
        }
        const int P0 = prec_;
        RRSpace h = riemann_roch(E, target - *std::min_element(vdx.begin(), vdx.end()));
        if (prec_ != P0) continue;  // re-expanded: recompute v(dx) consistently
        bool ok = true;
        for (auto& row : h.exp)
            for (int q = 0; q < num_top(); ++q) {
                row[q] = row[q] * top()[q].x.derivative();
                if (row[q].known_upto() < target) ok = false;
            }
        if (ok) return h;
        refine(2 * prec_);
    }
}

/// h = A^2 + B^2 x with A, B in the same tower level.
namespace detail {

inline std::pair<FunctionElement, FunctionElement> square_split(const TowerAlgebra& T, const FunctionElement& h, int l) {
    const Field& F = T.field();
    if (l == 0) {
        const RatFun& q = h.c[0];
        if (q.is_zero()) return {FunctionElement(), FunctionElement()};
        // N/D = N D / D^2; split N D into even and odd parts.
        Poly nd = poly::mul(F, q.num, q.den);
        Vec ev, od;
        for (int i = 0; i <= nd.deg(); ++i) {
            Elem s = F.sqrt(nd.c[i]);
            if (i % 2 == 0) {
                ev.resize(i / 2 + 1, 0);
                ev[i / 2] = s;
            } else {
                od.resize(i / 2 + 1, 0);
                od[i / 2] = s;
            }
        }
        return {FunctionElement::from(RatFun(F, Poly(ev), q.den)), FunctionElement::from(RatFun(F, Poly(od), q.den))};
    }
    FunctionElement hl = h.lifted(l);
    const std::size_t half = std::size_t(1) << (l - 1);
    FunctionElement h0(l - 1), h1(l - 1);
    for (std::size_t i = 0; i < half; ++i) {
        h0.c[i] = hl.c[i];
        h1.c[i] = hl.c[i + half];
    }
    // h1 z = h1 z^2 + h1 psi
    auto [p, q] = square_split(T, h1, l - 1);
    auto [a, b] = square_split(T, T.add(h0, T.mul(h1, T.psi()[l - 1])), l - 1);
    FunctionElement zl = T.z(l);
    return {T.add(a.lifted(l), T.mul(p, zl)), T.add(b.lifted(l), T.mul(q, zl))};
}

}  // namespace detail

inline DifferentialElement TowerCurve::cartier_global(const DifferentialElement& w) const {
    auto [a, b] = detail::square_split(alg_, w.f.lifted(depth()), depth());
    return {b.lifted(depth())};
}

}  // namespace asdr
