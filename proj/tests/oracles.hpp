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

// Independent reference implementations and generators for the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "asdr/gf2m.hpp"
#include "asdr/poly.hpp"

namespace oracle {

using asdr::Elem;

/// Schoolbook GF(2)[t] product reduced by the modulus, bit by bit.
inline Elem naive_mul(Elem a, Elem b, std::uint64_t modulus, int m) {
    std::uint64_t prod = 0;
    for (int i = 0; i < m; ++i)
        if ((a >> i) & 1) prod ^= std::uint64_t(b) << i;
    for (int d = 2 * m - 2; d >= m; --d)
        if ((prod >> d) & 1) prod ^= modulus << (d - m);
    return Elem(prod);
}

/// Trial division by every polynomial of degree 1..m/2.
inline bool trial_irreducible(std::uint64_t p) {
    const int m = asdr::gf2x::degree(p);
    for (int d = 1; 2 * d <= m; ++d)
        for (std::uint64_t q = std::uint64_t(1) << d; q < (std::uint64_t(2) << d); ++q) {
            std::uint64_t r = p;
            while (asdr::gf2x::degree(r) >= d) r ^= q << (asdr::gf2x::degree(r) - d);
            if (r == 0) return false;
        }
    return true;
}

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    std::uint64_t next() { return g(); }
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
    Elem elem(const asdr::Field& F) {
        return F.m() == 32 ? Elem(g()) : Elem(g() & ((std::uint64_t(1) << F.m()) - 1));
    }
    Elem nonzero(const asdr::Field& F) {
        Elem e;
        do e = elem(F);
        while (e == 0);
        return e;
    }
    asdr::Vec vec(const asdr::Field& F, int n) {
        asdr::Vec v(n);
        for (auto& e : v) e = elem(F);
        return v;
    }
    asdr::Matrix matrix(const asdr::Field& F, int r, int c) {
        asdr::Matrix M(F, r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) M.at(i, j) = elem(F);
        return M;
    }
    asdr::Matrix invertible(const asdr::Field& F, int n) {
        for (;;) {
            auto M = matrix(F, n, n);
            if (M.rank() == n) return M;
        }
    }
};

/// P^T J P with J the standard alternating form; nondegenerate for invertible P.
inline asdr::Matrix random_symplectic_gram(const asdr::Field& F, int g, Rng& rng) {
    asdr::Matrix J(F, 2 * g, 2 * g);
    for (int i = 0; i < g; ++i) J.at(i, g + i) = J.at(g + i, i) = 1;
    auto P = rng.invertible(F, 2 * g);
    return P.transpose() * J * P;
}


/// Roots by exhaustive evaluation.
inline std::vector<asdr::Elem> brute_roots(const asdr::Field& F, const asdr::Poly& p) {
    std::vector<asdr::Elem> r;
    for (std::uint64_t a = 0; a < F.order(); ++a)
        if (asdr::poly::eval(F, p, asdr::Elem(a)) == 0) r.push_back(asdr::Elem(a));
    return r;
}

/// dim L(n Q) on a one-point tower from the pole orders w_0 of x and w_i of z_i (pairwise distinct
/// valuations of the monomials x^a z^mask make the count exact).
inline int monomial_count(const std::vector<int>& w, int n) {
    int count = 0;
    const int r = int(w.size()) - 1;
    for (unsigned mask = 0; mask < (1u << r); ++mask) {
        int base = 0;
        for (int i = 0; i < r; ++i)
            if ((mask >> i) & 1) base += w[i + 1];
        if (base > n) continue;
        count += (n - base) / w[0] + 1;
    }
    return count;
}

}  // namespace oracle
