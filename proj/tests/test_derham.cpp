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

#include <catch_amalgamated.hpp>

#include "asdr/curve_config.hpp"
#include "asdr/derham.hpp"
#include "oracles.hpp"

using namespace asdr;

namespace {

TowerCurve curve(const std::string& text) { return build_curve(parse_curve_config(text)); }

const std::string kE = "field auto\ny = x^3\n";
const std::string kBreak7a = "field auto\ny = x^3\nz = x^2*y\n";
const std::string kBreak7b = "field auto\ny = x^3\nz = (x^2+x+1)*y\n";
const std::string kGenus9b = "field auto\ny = x^7+x\nz = (y+x^5+x^4+x^3)/(x+1)^7\n";
const std::string kGenus9d = "field auto\ny = x^7+x\nz = y\n";
const std::string kTwoBranch = "field auto\ny = 1/x^3 + x^5\n";
const std::string kOrdCover = "field auto\ny = x + 1/x\nz = x^2*y + 1/x\n";

Vec random_vec(const Field& F, oracle::Rng& rng, int n) { return rng.vec(F, n); }

bool in_span(const Field& F, int n, const std::vector<Vec>& gens, const Vec& v) {
    return Subspace::span(F, n, gens).contains(v);
}

}  // namespace

TEST_CASE("de Rham space: dimensions", "[derham]") {
    TowerCurve P1(Field::get(1), {});
    CHECK(DeRhamSpace(P1).dim() == 0);
    TowerCurve P1b(Field::get(2), {}, {0, 1});
    CHECK(DeRhamSpace(P1b, 4).dim() == 0);
    CHECK(DeRhamSpace(curve(kE), 3).dim() == 2);
    CHECK(DeRhamSpace(curve("field auto\ny = x^5\n")).dim() == 4);
    for (const auto& t : {kBreak7a, kGenus9b, kTwoBranch, kOrdCover}) {
        TowerCurve C = curve(t);
        DeRhamSpace H(C);
        CHECK(H.dim() == 2 * C.genus());
        CHECK(H.module().H0().dim() == C.genus());
        CHECK(H.module().F.kernel().dim() == C.genus());
    }
}

TEST_CASE("de Rham space: classes on the supersingular elliptic curve", "[derham]") {
    TowerCurve E = curve(kE);
    DeRhamSpace H(E);
    const TowerAlgebra& T = E.algebra();
    CHECK(is_zero(H.class_of(H.exact(T.x()))));
    CHECK(is_zero(H.class_of(H.exact(T.mul(T.x(), T.z(1))))));
    CHECK(is_zero(H.class_of(EnhancedDifferential{{FunctionElement(1)}, {}})));
    Vec b1 = H.class_of({{T.constant(1).lifted(1)}, {}});
    CHECK(!is_zero(b1));
    FunctionElement yx = T.mul(T.z(1), T.inv(T.x()));
    EnhancedDifferential beta2{{T.x().lifted(1)}, {{0, TailClass::from_series(E.expand(yx, 0, 1))}}};
    Vec b2 = H.class_of(beta2);
    CHECK(H.apply_V(b2) == b1);
    CHECK(is_zero(H.apply_V(b1)));
    CHECK(H.pairing(b1, b2) == 1);
    CHECK(H.pairing(b1, b1) == 0);
    CHECK(nilpotent_part(H, b2) == b2);
    CHECK(final_type(H.module()).first_g() == std::vector<int>{0});
}

TEST_CASE("de Rham space: F, V and the pairing on random vectors", "[derham]") {
    oracle::Rng rng(7);
    for (const auto& t : {kBreak7b, kGenus9b, kOrdCover}) {
        TowerCurve C = curve(t);
        DeRhamSpace H(C);
        const Field& K = C.field();
        for (int i = 0; i < C.genus(); ++i) CHECK(is_zero(H.apply_F(unit_vec(H.dim(), i))));
        for (int k = 0; k < 50; ++k) {
            Vec x = random_vec(K, rng, H.dim()), y = random_vec(K, rng, H.dim());
            CHECK(K.sqr(H.pairing(H.apply_V(x), y)) == H.pairing(x, H.apply_F(y)));
            CHECK(is_zero(H.apply_F(H.apply_V(x))));
            CHECK(is_zero(H.apply_V(H.apply_F(x))));
            CHECK(H.pairing(x, x) == 0);
            CHECK(H.pairing_ambient(H.representative(x), H.representative(y)) == H.pairing(x, y));
        }
        for (const auto& b : H.basis()) CHECK(H.residue_sum(b) == 0);
    }
}

TEST_CASE("de Rham space: pairing and classes ignore coboundary changes", "[derham]") {
    oracle::Rng rng(13);
    TowerCurve C = curve(kGenus9b);
    DeRhamSpace H(C);
    const Field& K = C.field();
    Divisor D;
    for (int q = 0; q < C.num_top(); ++q) D.mult[q] = H.n();
    RRSpace L = C.riemann_roch(D, H.target() + 1);
    auto cob = [&](const Vec& coef) {
        std::vector<LaurentSeries> df(C.num_top());
        std::vector<TailClass> pp(C.num_top(), TailClass(K));
        for (int q = 0; q < C.num_top(); ++q) {
            LaurentSeries f = LaurentSeries::zero(K);
            for (std::size_t b = 0; b < L.basis.size(); ++b)
                if (coef[b]) f = f + L.exp[b][q].scaled(coef[b]);
            df[q] = f.derivative();
            pp[q] = TailClass::from_series(f);
        }
        return H.ambient_from_local(df, pp);
    };
    for (int k = 0; k < 10; ++k) {
        Vec c1 = cob(rng.vec(K, int(L.basis.size()))), c2 = cob(rng.vec(K, int(L.basis.size())));
        CHECK(H.is_cocycle(c1));
        CHECK(is_zero(H.reduce(c1)));
        Vec x = random_vec(K, rng, H.dim()), y = random_vec(K, rng, H.dim());
        Vec rx = vec_add(H.representative(x), c1), ry = vec_add(H.representative(y), c2);
        CHECK(H.reduce(rx) == x);
        CHECK(H.pairing_ambient(rx, ry) == H.pairing(x, y));
    }
    // exact classes of global functions vanish
    for (int k = 0; k < 5; ++k) {
        FunctionElement f(C.depth());
        for (std::size_t b = 0; b < L.basis.size(); ++b)
            if (rng.uniform(0, 1)) f = C.algebra().add(f, L.basis[b]);
        CHECK(is_zero(H.class_of(H.exact(f))));
    }
}

TEST_CASE("de Rham space: V agrees with the global Cartier operator", "[derham]") {
    for (const auto& t : {kBreak7a, kGenus9b}) {
        TowerCurve C = curve(t);
        DeRhamSpace H(C);
        for (int i = 0; i < H.dim(); ++i) {
            const Vec& b = H.basis()[i];
            auto tails = H.tails_of(b);
            bool empty = true;
            for (const auto& tc : tails) empty = empty && tc.empty();
            if (!empty) continue;
            DifferentialElement w{H.omega_global(b)};
            Vec v = H.class_of({C.cartier_global(w), {}});
            CHECK(v == H.apply_V(unit_vec(H.dim(), i)));
        }
    }
}

TEST_CASE("de Rham space: final type does not depend on n", "[derham]") {
    for (const auto& t : {kBreak7a, kBreak7b, kGenus9d, kTwoBranch}) {
        TowerCurve C = curve(t);
        DeRhamSpace H(C);
        DeRhamSpace H2(C, H.n() + 2);
        CHECK(final_type(H.module()) == final_type(H2.module()));
    }
}

TEST_CASE("nilpotent part and Fitting dimensions", "[derham][fitting]") {
    TowerCurve C = curve(kOrdCover);
    DeRhamSpace H(C);
    Fitting f = fitting(H.module());
    const int lX = 0;
    int sum = 0;
    for (int q : branch_places(C)) sum += C.top()[q].breaks.back() - 1;
    CHECK(f.L.dim() == 2 * C.local_rank());
    CHECK(f.L.dim() == 4 * lX + sum);
    CHECK(f.U.dim() == C.prank());
}

TEST_CASE("pullback to a cover commutes with F and V and kills the pairing", "[derham][pullback]") {
    oracle::Rng rng(19);
    for (const auto& t : {kBreak7a, kGenus9b, kOrdCover}) {
        TowerCurve Y = curve(t);
        TowerCurve X = Y.truncate(Y.depth() - 1);
        DeRhamSpace HX(X), HY(Y);
        const Field& K = Y.field();
        CHECK(is_zero(pullback_class(HX, HY, Vec(HX.dim(), 0))));
        for (int k = 0; k < 6; ++k) {
            Vec a = rng.vec(K, HX.dim()), b = rng.vec(K, HX.dim());
            Vec pa = pullback_class(HX, HY, a), pb = pullback_class(HX, HY, b);
            CHECK(pullback_class(HX, HY, HX.apply_V(a)) == HY.apply_V(pa));
            CHECK(pullback_class(HX, HY, HX.apply_F(a)) == HY.apply_F(pa));
            CHECK(HY.pairing(pa, pb) == 0);
        }
        // regular classes pull back to regular classes
        Subspace H0Y = HY.module().H0();
        for (int i = 0; i < X.genus(); ++i) CHECK(H0Y.contains(pullback_class(HX, HY, unit_vec(HX.dim(), i))));
    }
}

TEST_CASE("omega_ij: orders, pairing table and V recursion", "[derham][omega]") {
    for (const auto& t : {kBreak7a, kBreak7b, kGenus9b, kGenus9d, kTwoBranch, kOrdCover}) {
        TowerCurve Y = curve(t);
        TowerCurve X = Y.truncate(Y.depth() - 1);
        DeRhamSpace HX(X), HY(Y);
        const Field& K = Y.field();
        auto br = branch_places(Y);
        std::vector<std::vector<Vec>> wt(br.size() + 1);
        std::vector<int> ds(br.size() + 1);
        for (std::size_t i = 1; i <= br.size(); ++i) {
            const int d = Y.top()[br[i - 1]].breaks.back();
            ds[i] = d;
            wt[i].push_back({});
            for (int j = 1; j <= d - 1; ++j) {
                EnhancedDifferential e = build_omega_ij(Y, int(i), j);
                CHECK(e.tails.empty() == (j <= (d - 1) / 2));
                Vec c = HY.class_of(e);
                if (j <= (d - 1) / 2) CHECK(HY.module().H0().contains(c));
                wt[i].push_back(nilpotent_part(HY, c));
            }
        }
        // pullbacks of regular base differentials, projected
        std::vector<Vec> base0;
        for (int k = 0; k < X.genus(); ++k) base0.push_back(nilpotent_part(HY, pullback_class(HX, HY, unit_vec(HX.dim(), k))));
        std::vector<Vec> base1;
        for (int k = 0; k < HX.dim(); ++k) base1.push_back(pullback_class(HX, HY, unit_vec(HX.dim(), k)));
        for (std::size_t i = 1; i < wt.size(); ++i)
            for (int j = 1; j <= (ds[i] - 1) / 2; ++j) {
                for (std::size_t i2 = 1; i2 < wt.size(); ++i2)
                    for (int j2 = 1; j2 <= ds[i2] - 1; ++j2) {
                        Elem expect = (i == i2 && j + j2 == ds[i]) ? 1 : 0;
                        INFO(t << " i=" << i << " j=" << j << " i'=" << i2 << " j'=" << j2);
                        CHECK(HY.pairing(wt[i][j], wt[i2][j2]) == expect);
                    }
                for (const auto& p : base0) CHECK(HY.pairing(wt[i][j], p) == 0);
            }
        for (std::size_t i = 1; i < wt.size(); ++i)
            for (int j = 1; j <= ds[i] - 1; ++j) {
                for (const auto& p : base1)
                    if (X.genus() == 0 || 0 == 0) {
                        // M_0 pairs trivially with W
                        if (HY.module().H0().contains(p)) CHECK(HY.pairing(wt[i][j], p) == 0);
                    }
                Vec v = HY.apply_V(wt[i][j]);
                if (j % 2 == 0) {
                    std::vector<Vec> g = base0;
                    CHECK(!in_span(K, HY.dim(), g, wt[i][j / 2]) );
                    g.push_back(wt[i][j / 2]);
                    CHECK(in_span(K, HY.dim(), g, v));
                    CHECK(!in_span(K, HY.dim(), base0, v));
                } else {
                    CHECK(in_span(K, HY.dim(), base0, v));
                }
            }
    }
}
