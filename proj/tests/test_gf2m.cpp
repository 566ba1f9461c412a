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

#include "asdr/gf2m.hpp"
#include "oracles.hpp"

using namespace asdr;

TEST_CASE("modulus table is irreducible") {
    for (int m = 1; m <= 32; ++m) {
        CHECK(gf2x::degree(kModulusTable[m]) == m);
        CHECK(gf2x::irreducible(kModulusTable[m]));
        if (m <= 20) CHECK(oracle::trial_irreducible(kModulusTable[m]));
    }
    CHECK_FALSE(gf2x::irreducible(0x5));   // t^2 + 1
    CHECK_FALSE(gf2x::irreducible(0x15));  // (t^2+t+1)^2
    CHECK_THROWS_AS(Field::get(FieldSpec{4, 0x15}), std::invalid_argument);
}

TEST_CASE("spec strings") {
    CHECK(Field::get(2).spec().str() == "GF(2^2)/7");
    CHECK(Field::get(8).spec().str() == "GF(2^8)/11b");
}

TEST_CASE("small field identities") {
    const Field& F2 = Field::get(1);
    CHECK(F2.sqrt(1) == 1);
    const Field& F4 = Field::get(2);
    const Elem g = 2;
    CHECK(F4.mul(g, g) == 3);
    CHECK(F4.sqrt(g) == 3);
    CHECK(F4.sqr(3) == g);
    FieldElement a(F4, g);
    CHECK((a * a).bits() == 3);
    CHECK(a.inv_frobenius().frobenius() == a);
    CHECK_THROWS_AS(a + FieldElement(Field::get(3), 1), std::invalid_argument);
    CHECK_THROWS_AS(FieldElement(F4, 0).inv(), std::domain_error);
}

TEST_CASE("multiplication matches schoolbook oracle") {
    oracle::Rng rng(1);
    for (int m = 1; m <= 32; ++m) {
        const Field& F = Field::get(m);
        const auto mod = F.spec().modulus;
        if (m <= 6) {
            for (Elem a = 0; a < F.order(); ++a)
                for (Elem b = 0; b < F.order(); ++b) REQUIRE(F.mul(a, b) == oracle::naive_mul(a, b, mod, m));
        } else {
            for (int t = 0; t < 2000; ++t) {
                Elem a = rng.elem(F), b = rng.elem(F);
                REQUIRE(F.mul(a, b) == oracle::naive_mul(a, b, mod, m));
            }
        }
    }
}

TEST_CASE("frobenius and inverse frobenius are mutually inverse") {
    oracle::Rng rng(2);
    for (int m = 1; m <= 32; ++m) {
        const Field& F = Field::get(m);
        auto check = [&](Elem a) {
            REQUIRE(F.sqr(F.sqrt(a)) == a);
            REQUIRE(F.sqrt(F.sqr(a)) == a);
            REQUIRE(F.frob(a, -1) == F.sqrt(a));
            REQUIRE(F.frob(a, m) == a);
        };
        if (m <= 8)
            for (Elem a = 0; a < F.order(); ++a) check(a);
        else
            for (int t = 0; t < 500; ++t) check(rng.elem(F));
    }
}

TEST_CASE("inverse and artin-schreier roots") {
    oracle::Rng rng(3);
    for (int m : {1, 2, 3, 5, 8, 13, 17, 24, 32}) {
        const Field& F = Field::get(m);
        for (int t = 0; t < 300; ++t) {
            Elem a = rng.nonzero(F);
            REQUIRE(F.mul(a, F.inv(a)) == 1);
            Elem b = rng.elem(F);
            auto c = F.solve_as(b);
            REQUIRE(c.has_value() == (F.trace(b) == 0));
            if (c) REQUIRE((F.sqr(*c) ^ *c) == b);
        }
    }
}

TEST_CASE("subspace examples") {
    const Field& F4 = Field::get(2);
    SemilinearMap zero{Matrix(F4, 3, 3), 0};
    CHECK(zero.kernel().dim() == 3);
    SemilinearMap id{Matrix::identity(F4, 3), 1};
    CHECK(id.image() == Subspace::full(F4, 3));
    Matrix g(F4, 1, 1);
    g.at(0, 0) = 2;
    SemilinearMap T{g, 1};
    int roots = 0;
    for (Elem x = 0; x < 4; ++x)
        if (T.apply({x})[0] == 0) ++roots;
    CHECK(roots == 1);
    CHECK(T.kernel().dim() == 0);
}

TEST_CASE("symplectic complement examples") {
    const Field& F2 = Field::get(1);
    Matrix G(F2, 2, 2);
    G.at(0, 1) = G.at(1, 0) = 1;
    CHECK(symplectic_complement(Subspace::zero(F2, 2), G) == Subspace::full(F2, 2));
    CHECK(symplectic_complement(Subspace::full(F2, 2), G).dim() == 0);
    auto e1 = Subspace::span(F2, 2, {{1, 0}});
    CHECK(symplectic_complement(e1, G) == e1);
    Matrix bad(F2, 2, 2);
    CHECK_THROWS_AS(symplectic_complement(e1, bad), std::invalid_argument);
}

TEST_CASE("dimension formula for sum and intersection") {
    oracle::Rng rng(4);
    for (int m : {1, 2, 4}) {
        const Field& F = Field::get(m);
        for (int t = 0; t < 100; ++t) {
            int n = rng.uniform(1, 9);
            std::vector<Vec> a, b;
            for (int i = rng.uniform(0, n); i > 0; --i) a.push_back(rng.vec(F, n));
            for (int i = rng.uniform(0, n); i > 0; --i) b.push_back(rng.vec(F, n));
            // force overlap sometimes
            if (!a.empty() && !b.empty() && t % 3 == 0) b[0] = a[0];
            auto A = Subspace::span(F, n, a), B = Subspace::span(F, n, b);
            auto S = A + B, I = A.intersect(B);
            REQUIRE(S.dim() + I.dim() == A.dim() + B.dim());
            REQUIRE(I.subset_of(A));
            REQUIRE(I.subset_of(B));
            REQUIRE(A.subset_of(S));
        }
    }
}

TEST_CASE("double complement under random symplectic forms") {
    oracle::Rng rng(5);
    for (int m : {1, 2, 3}) {
        const Field& F = Field::get(m);
        for (int t = 0; t < 40; ++t) {
            int g = rng.uniform(1, 5);
            auto G = oracle::random_symplectic_gram(F, g, rng);
            std::vector<Vec> w;
            for (int i = rng.uniform(0, 2 * g); i > 0; --i) w.push_back(rng.vec(F, 2 * g));
            auto W = Subspace::span(F, 2 * g, w);
            auto Wp = symplectic_complement(W, G);
            REQUIRE(Wp.dim() == 2 * g - W.dim());
            REQUIRE(symplectic_complement(Wp, G) == W);
        }
    }
}

TEST_CASE("semilinear maps") {
    oracle::Rng rng(6);
    for (int m : {2, 3, 5}) {
        const Field& F = Field::get(m);
        for (int t = 0; t < 50; ++t) {
            int n = rng.uniform(1, 6);
            for (int tw : {-1, 0, 1}) {
                SemilinearMap T{rng.matrix(F, n, n), tw};
                if (t % 2)
                    for (int j = 0; j < n; ++j) T.A.at(0, j) = 0;
                Vec v = rng.vec(F, n);
                Elem c = rng.elem(F);
                REQUIRE(T.apply(vec_scale(F, c, v)) == vec_scale(F, F.frob(c, tw), T.apply(v)));
                auto K = T.kernel();
                REQUIRE(K.dim() == n - T.A.rank());
                for (const auto& k : K.basis()) REQUIRE(is_zero(T.apply(k)));
                REQUIRE(T.image().dim() == T.A.rank());
                auto W = Subspace::span(F, n, {rng.vec(F, n)});
                auto P = T.preimage(W);
                for (const auto& p : P.basis()) REQUIRE(W.contains(T.apply(p)));
                REQUIRE(P.dim() == K.dim() + T.image().intersect(W).dim());
            }
        }
    }
}

TEST_CASE("matrix solve and inverse") {
    oracle::Rng rng(7);
    const Field& F = Field::get(4);
    for (int t = 0; t < 50; ++t) {
        int n = rng.uniform(1, 7);
        auto A = rng.invertible(F, n);
        auto Ai = A.inverse();
        REQUIRE(A * Ai == Matrix::identity(F, n));
        Vec b = rng.vec(F, n);
        auto x = A.solve(b);
        REQUIRE(x.has_value());
        REQUIRE(A * *x == b);
    }
}
