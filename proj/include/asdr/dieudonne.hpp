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

#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gf2m.hpp"

namespace asdr {

/// Polarized mod-2 Dieudonne module: F sigma-linear, V sigma^-1-linear, alternating Gram.
struct DieudonneModule {
    SemilinearMap F;
    SemilinearMap V;
    Matrix gram;

    const Field& field() const { return gram.field(); }
    int dim() const { return gram.rows(); }
    int genus() const { return dim() / 2; }

    Subspace full() const { return Subspace::full(field(), dim()); }
    Subspace H0() const { return V.image(); }
    Elem pair(const Vec& x, const Vec& y) const { return dot(field(), x, gram * y); }

    /// Named structural identities; throws std::logic_error naming the first failure.
    void check() const {
        const Field& K = field();
        const int n = dim();
        auto fail = [](const std::string& what) { throw std::logic_error("Dieudonne invariant failed: " + what); };
        if (n % 2) fail("odd dimension");
        if (F.twist != 1 || V.twist != -1) fail("F/V twists");
        if (F.dim_in() != n || F.dim_out() != n || V.dim_in() != n || V.dim_out() != n) fail("F/V shapes");
        for (int i = 0; i < n; ++i) {
            Vec e = unit_vec(n, i);
            if (!is_zero(F.apply(V.apply(e)))) fail("FV = 0");
            if (!is_zero(V.apply(F.apply(e)))) fail("VF = 0");
        }
        if (!is_alternating(gram)) fail("Gram alternating");
        if (gram.rank() != n) fail("Gram nondegenerate");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec x = unit_vec(n, i), y = unit_vec(n, j);
                if (K.sqr(pair(V.apply(x), y)) != pair(x, F.apply(y))) fail("<Vx,y>^2 = <x,Fy>");
            }
        Subspace kF = F.kernel(), iV = V.image();
        if (!(kF == iV)) fail("ker F = im V");
        if (kF.dim() != n / 2) fail("dim ker F = g");
    }
};

inline DieudonneModule conjugate(const DieudonneModule& M, const Matrix& P) {
    Matrix Pi = P.inverse();
    return {SemilinearMap{Pi * M.F.A * P.twisted(1), 1}, SemilinearMap{Pi * M.V.A * P.twisted(-1), -1},
            P.transpose() * M.gram * P};
}

inline Matrix block_diag(const Matrix& A, const Matrix& B) {
    Matrix C(A.field(), A.rows() + B.rows(), A.cols() + B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) C.at(i, j) = A(i, j);
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j) C.at(A.rows() + i, A.cols() + j) = B(i, j);
    return C;
}

inline DieudonneModule direct_sum(const DieudonneModule& a, const DieudonneModule& b) {
    return {SemilinearMap{block_diag(a.F.A, b.F.A), 1}, SemilinearMap{block_diag(a.V.A, b.V.A), -1},
            block_diag(a.gram, b.gram)};
}

namespace modules {

/// V e_U = e_U, F e_Z = e_Z, <e_U, e_Z> = 1.
inline DieudonneModule ordinary(const Field& K) {
    Matrix F(K, 2, 2), V(K, 2, 2), G(K, 2, 2);
    V.at(0, 0) = 1;
    F.at(1, 1) = 1;
    G.at(0, 1) = G.at(1, 0) = 1;
    return {{F, 1}, {V, -1}, G};
}

/// V e1 = F e1 = e2.
inline DieudonneModule supersingular(const Field& K) {
    Matrix F(K, 2, 2), V(K, 2, 2), G(K, 2, 2);
    V.at(1, 0) = 1;
    F.at(1, 0) = 1;
    G.at(0, 1) = G.at(1, 0) = 1;
    return {{F, 1}, {V, -1}, G};
}

inline DieudonneModule ordinary_power(const Field& K, int k) {
    if (k < 1) throw std::invalid_argument("ordinary_power needs k >= 1");
    DieudonneModule M = ordinary(K);
    for (int i = 1; i < k; ++i) M = direct_sum(M, ordinary(K));
    return M;
}

/// Basis w_1..w_{d-1}: V w_j = w_{j/2} (j even), F w_j = w_{2j-d} (2j > d), <w_j, w_j'> = [j + j' = d].
inline DieudonneModule branch_module(const Field& K, int d) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("branch_module needs odd d >= 3");
    const int n = d - 1;
    Matrix F(K, n, n), V(K, n, n), G(K, n, n);
    for (int j = 1; j <= n; ++j) {
        if (j % 2 == 0) V.at(j / 2 - 1, j - 1) = 1;
        if (2 * j > d) F.at(2 * j - d - 1, j - 1) = 1;
        G.at(j - 1, d - j - 1) = 1;
    }
    return {{F, 1}, {V, -1}, G};
}

}  // namespace modules

// ---------------------------------------------------------------- Fitting decomposition

struct Fitting {
    Subspace U;  ///< V bijective
    Subspace Z;  ///< F bijective
    Subspace L;  ///< F and V nilpotent
};

inline Subspace iterate_image(const SemilinearMap& T, int times) {
    Subspace W = Subspace::full(T.field(), T.dim_in());
    for (int i = 0; i < times; ++i) {
        Subspace next = T.image(W);
        if (next == W) break;
        W = next;
    }
    return W;
}

inline Subspace iterate_kernel(const SemilinearMap& T, int times) {
    Subspace W = Subspace::zero(T.field(), T.dim_in());
    for (int i = 0; i < times; ++i) {
        Subspace next = T.preimage(W);
        if (next == W) break;
        W = next;
    }
    return W;
}

inline Fitting fitting(const DieudonneModule& M) {
    const int n = M.dim();
    Subspace U = iterate_image(M.V, n + 1);
    Subspace R = iterate_kernel(M.V, n + 1);
    Subspace Z = iterate_image(M.F, n + 1);
    Subspace L = R.intersect(iterate_kernel(M.F, n + 1));
    ensure(U.dim() == Z.dim(), "fitting: dim U = dim Z");
    ensure(U.dim() + Z.dim() + L.dim() == n, "fitting: U + Z + L spans");
    ensure((U + Z + L).dim() == n, "fitting: direct sum");
    Subspace UZ = U + Z;
    for (const auto& l : L.basis())
        for (const auto& w : UZ.basis()) ensure(M.pair(l, w) == 0, "fitting: L orthogonal to U + Z");
    if (U.dim()) {
        Matrix P(M.field(), U.dim(), Z.dim());
        for (int i = 0; i < U.dim(); ++i)
            for (int j = 0; j < Z.dim(); ++j) P.at(i, j) = M.pair(U.basis()[i], Z.basis()[j]);
        ensure(P.rank() == U.dim(), "fitting: U x Z perfect");
    }
    return {U, Z, L};
}

/// Matrix of the projection onto L along U + Z.
inline Matrix nilpotent_projector(const DieudonneModule& M, const Fitting& f) {
    const int n = M.dim();
    std::vector<Vec> cols;
    for (const auto* W : {&f.U, &f.Z, &f.L})
        for (const auto& b : W->basis()) cols.push_back(b);
    Matrix B = Matrix::from_columns(M.field(), n, cols);
    Matrix Bi = B.inverse();
    Matrix Pr(M.field(), n, n);
    const int off = f.U.dim() + f.Z.dim();
    for (int i = off; i < n; ++i) Pr.at(i, i) = 1;
    return B * Pr * Bi;
}

// ---------------------------------------------------------------- words

/// V^{n_t} perp ... perp V^{n_1}, optionally preceded by a perp; exps = {n_1, ..., n_t}.
struct Word {
    bool leading_perp = false;
    std::vector<int> exps;

    int perps() const { return int(exps.size()) - 1 + (leading_perp ? 1 : 0); }
    int blocks() const { return int(exps.size()); }
    void validate() const {
        if (exps.empty()) throw MalformedWord("word has no V block");
        for (int e : exps)
            if (e < 1) throw MalformedWord("word exponents must be positive");
    }
    std::string str() const {
        std::string s = leading_perp ? "⊥" : "";
        for (int i = int(exps.size()) - 1; i >= 0; --i) {
            s += exps[i] == 1 ? "V" : "V^" + std::to_string(exps[i]);
            if (i) s += "⊥";
        }
        return s;
    }
    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;
};

/// Parses e.g. "V^2⊥V", "perp V", "V^3 _|_ V"; "⊥", "_|_", "perp" and "P" denote the complement.
inline Word parse_word(const std::string& text) {
    std::vector<std::string> toks;
    std::string s;
    for (std::size_t i = 0; i < text.size();) {
        if (text.compare(i, 3, "⊥") == 0) {
            toks.push_back("P");
            i += 3;
        } else if (text.compare(i, 3, "_|_") == 0) {
            toks.push_back("P");
            i += 3;
        } else if (text.compare(i, 4, "perp") == 0) {
            toks.push_back("P");
            i += 4;
        } else if (text[i] == 'P') {
            toks.push_back("P");
            ++i;
        } else if (text[i] == 'V') {
            std::size_t j = i + 1;
            int e = 1;
            if (j < text.size() && text[j] == '^') {
                std::size_t k = j + 1;
                while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
                if (k == j + 1) throw MalformedWord("missing exponent in '" + text + "'");
                e = std::stoi(text.substr(j + 1, k - j - 1));
                j = k;
            }
            toks.push_back("V" + std::to_string(e));
            i = j;
        } else if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '.' || text[i] == '*') {
            ++i;
        } else {
            throw MalformedWord("unexpected character in word '" + text + "'");
        }
    }
    Word w;
    // merge adjacent V powers, read right to left
    std::vector<int> blocks;
    bool last_perp = true;
    for (auto it = toks.rbegin(); it != toks.rend(); ++it) {
        if (*it == "P") {
            if (last_perp) throw MalformedWord("word must end with V and not repeat ⊥: '" + text + "'");
            last_perp = true;
        } else {
            int e = std::stoi(it->substr(1));
            if (last_perp)
                blocks.push_back(e);
            else
                blocks.back() += e;
            last_perp = false;
        }
    }
    if (blocks.empty()) throw MalformedWord("empty word");
    w.exps = blocks;
    w.leading_perp = !toks.empty() && toks.front() == "P";
    return w;
}

inline Subspace apply_word(const DieudonneModule& M, const Word& w, const Subspace& start) {
    w.validate();
    Subspace W = start;
    for (std::size_t b = 0; b < w.exps.size(); ++b) {
        if (b) W = perp(W, M.gram);
        for (int k = 0; k < w.exps[b]; ++k) W = M.V.image(W);
    }
    if (w.leading_perp) W = perp(W, M.gram);
    return W;
}

/// Simple words with at most max_perp complements and exponents in [1, max_exp].
inline std::vector<Word> enumerate_words(int max_perp, int max_exp) {
    std::vector<Word> out;
    std::vector<std::vector<int>> layer{{}};
    for (int blocks = 1; blocks <= max_perp + 1; ++blocks) {
        std::vector<std::vector<int>> next;
        for (const auto& p : layer)
            for (int e = 1; e <= max_exp; ++e) {
                auto q = p;
                q.push_back(e);
                next.push_back(q);
            }
        for (const auto& q : next) {
            out.push_back(Word{false, q});
            if (blocks <= max_perp) out.push_back(Word{true, q});
        }
        layer = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------- filtrations and final types

std::vector<Subspace> canonical_filtration(const DieudonneModule& M);

namespace detail {

/// Closure of a set of subspaces under V-images and complements, bounded.
inline std::set<Subspace> close_set(const DieudonneModule& M, std::set<Subspace> S) {
    std::deque<Subspace> q(S.begin(), S.end());
    const std::size_t bound = 2 * std::size_t(M.dim()) * M.dim() + 4;
    std::size_t steps = 0;
    while (!q.empty()) {
        Subspace W = q.front();
        q.pop_front();
        for (Subspace X : {M.V.image(W), perp(W, M.gram)})
            if (S.insert(X).second) q.push_back(X);
        if (++steps > bound * 4) throw NotAChain("filtration closure exceeded its iteration bound");
    }
    return S;
}

inline bool is_chain(const std::vector<Subspace>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i - 1].dim() == v[i].dim() || !v[i - 1].subset_of(v[i])) return false;
    return true;
}

inline std::vector<Subspace> sorted_by_dim(const std::set<Subspace>& S) {
    std::vector<Subspace> v(S.begin(), S.end());
    std::stable_sort(v.begin(), v.end(), [](const Subspace& a, const Subspace& b) { return a.dim() < b.dim(); });
    return v;
}

}  // namespace detail

inline std::vector<Subspace> canonical_filtration(const DieudonneModule& M) {
    auto S = detail::close_set(M, {Subspace::zero(M.field(), M.dim()), M.full()});
    auto v = detail::sorted_by_dim(S);
    if (!detail::is_chain(v)) throw NotAChain("canonical filtration is not totally ordered");
    return v;
}

/// nu_0 .. nu_{2g}; the printed type is nu_1 .. nu_g.
struct FinalType {
    std::vector<int> nu;

    int genus() const { return (int(nu.size()) - 1) / 2; }
    std::vector<int> first_g() const { return std::vector<int>(nu.begin() + 1, nu.begin() + 1 + genus()); }
    int prank() const {
        int f = 0;
        for (int l = 1; l <= genus(); ++l)
            if (nu[l] == l) f = l;
        return f;
    }
    std::string str() const {
        std::string s = "[";
        auto v = first_g();
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + "]";
    }
    void validate() const {
        for (std::size_t l = 1; l < nu.size(); ++l) {
            ensure(nu[l] >= nu[l - 1] && nu[l] <= nu[l - 1] + 1, "final type steps are 0 or 1");
            ensure(nu[l] <= int(l), "final type nu_l <= l");
        }
    }
    friend bool operator==(const FinalType&, const FinalType&) = default;
};

inline FinalType type_from_flag(const DieudonneModule& M, const std::vector<Subspace>& flag) {
    FinalType t;
    t.nu.assign(M.dim() + 1, 0);
    for (const auto& W : flag) t.nu[W.dim()] = M.V.image(W).dim();
    t.validate();
    return t;
}

/// Completes a chain to a full flag stable under V and perp by greedy one-dimensional extensions.
inline std::vector<Subspace> refine_to_final_filtration(const DieudonneModule& M, std::vector<Subspace> chain) {
    const Field& K = M.field();
    for (;;) {
        std::size_t gap = chain.size();
        for (std::size_t i = 1; i < chain.size(); ++i)
            if (chain[i].dim() - chain[i - 1].dim() >= 2) {
                gap = i;
                break;
            }
        if (gap == chain.size()) return chain;
        const Subspace& A = chain[gap - 1];
        const Subspace& B = chain[gap];
        // candidate vectors: B mod A, all of them for small quotients, basis combinations otherwise
        std::vector<Vec> reps;
        for (const auto& b : B.basis())
            if (!A.contains(b)) reps.push_back(A.reduce(b));
        Subspace Q = Subspace::span(K, M.dim(), reps);
        std::vector<Vec> cands;
        const auto& qb = Q.basis();
        const std::uint64_t q = K.order();
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < qb.size() && total <= 4096; ++i) total *= q;
        if (total <= 4096) {
            for (std::uint64_t code = 1; code < total; ++code) {
                Vec v(M.dim(), 0);
                std::uint64_t c = code;
                for (const auto& b : qb) {
                    vec_axpy(K, Elem(c % q), b, v);
                    c /= q;
                }
                cands.push_back(v);
            }
        } else {
            for (std::size_t i = 0; i < qb.size(); ++i) {
                cands.push_back(qb[i]);
                for (std::size_t j = i + 1; j < qb.size(); ++j) cands.push_back(vec_add(qb[i], qb[j]));
            }
        }
        bool done = false;
        for (const auto& v : cands) {
            Subspace W = A + Subspace::span(K, M.dim(), {v});
            std::set<Subspace> S(chain.begin(), chain.end());
            S.insert(W);
            auto closed = detail::sorted_by_dim(detail::close_set(M, S));
            if (detail::is_chain(closed)) {
                chain = closed;
                done = true;
                break;
            }
        }
        if (!done) throw NotAChain("no refinement of the filtration keeps it a chain");
    }
}

/// Final type by interpolation across the canonical filtration; falls back to refinement on a gap.
inline FinalType final_type(const DieudonneModule& M, bool force_refinement = false) {
    auto chain = canonical_filtration(M);
    if (!force_refinement) {
        FinalType t;
        t.nu.assign(M.dim() + 1, 0);
        bool gap = false;
        std::vector<int> vd;
        for (const auto& W : chain) vd.push_back(M.V.image(W).dim());
        for (std::size_t k = 1; k < chain.size() && !gap; ++k) {
            const int i = chain[k - 1].dim(), j = chain[k].dim();
            const int vi = vd[k - 1], vj = vd[k];
            for (int l = i; l <= j; ++l) {
                if (vj == vi)
                    t.nu[l] = vi;
                else if (vj - vi == j - i)
                    t.nu[l] = vi + (l - i);
                else
                    gap = true;
            }
        }
        if (!gap) {
            t.validate();
            return t;
        }
    }
    return type_from_flag(M, refine_to_final_filtration(M, chain));
}

// ---------------------------------------------------------------- k[V]-modules

/// V restricted to an invariant subspace, in the coordinates of W's basis.
inline SemilinearMap restrict_map(const SemilinearMap& T, const Subspace& W) {
    const Field& K = T.field();
    const auto& B = W.basis();
    Matrix Bm = Matrix::from_columns(K, T.dim_out(), B);
    std::vector<Vec> cols;
    for (const auto& b : B) {
        auto c = Bm.solve(T.apply(b));
        if (!c) throw std::invalid_argument("subspace is not invariant");
        cols.push_back(*c);
    }
    if (B.empty()) return {Matrix(K, 0, 0), T.twist};
    return {Matrix::from_columns(K, int(B.size()), cols), T.twist};
}

/// c_i = dim V^i(M) up to and including the first stable value.
inline std::vector<int> v_type(const SemilinearMap& V) {
    std::vector<int> c;
    Subspace W = Subspace::full(V.field(), V.dim_in());
    c.push_back(W.dim());
    for (;;) {
        Subspace next = V.image(W);
        if (next.dim() == W.dim()) break;
        c.push_back(next.dim());
        W = next;
    }
    return c;
}

struct KVDecomposition {
    std::map<int, int> b;  ///< exponent i -> multiplicity of k[V]/(V^i)
    int p = 0;             ///< multiplicity of k[V]/(V - 1)
    std::string str() const {
        std::string s;
        for (auto it = b.rbegin(); it != b.rend(); ++it) {
            if (!it->second) continue;
            if (!s.empty()) s += " ⊕ ";
            std::string piece = "k[V]/(V" + (it->first == 1 ? std::string() : "^" + std::to_string(it->first)) + ")";
            s += it->second == 1 ? piece : "(" + piece + ")^" + std::to_string(it->second);
        }
        if (p) {
            if (!s.empty()) s += " ⊕ ";
            s += p == 1 ? "k[V]/(V-1)" : "(k[V]/(V-1))^" + std::to_string(p);
        }
        return s.empty() ? "0" : s;
    }
    friend bool operator==(const KVDecomposition&, const KVDecomposition&) = default;
};

/// a^r = dim ker V^r for r = 0 .. stabilization.
inline std::vector<int> higher_a_numbers(const SemilinearMap& V) {
    auto c = v_type(V);
    std::vector<int> a;
    for (int ci : c) a.push_back(c[0] - ci);
    return a;
}

/// b_r from second differences of a^r; the stable rank is the V-bijective part.
inline KVDecomposition kv_decomposition(const SemilinearMap& V) {
    auto a = higher_a_numbers(V);
    auto c = v_type(V);
    KVDecomposition d;
    auto ar = [&](int r) { return r < int(a.size()) ? a[r] : a.back(); };
    for (int r = 1; r < int(a.size()); ++r) {
        int br = (ar(r) - ar(r - 1)) - (ar(r + 1) - ar(r));
        if (br) d.b[r] = br;
    }
    d.p = c.back();
    return d;
}

inline std::string v_type_str(const std::vector<int>& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
    return s + ",…)";
}

/// V v_i = v_{floor(i/2)} on v_1..v_n, v_0 = 0.
inline SemilinearMap mn_model(const Field& K, int n) {
    Matrix A(K, n, n);
    for (int i = 2; i <= n; ++i) A.at(i / 2 - 1, i - 1) = 1;
    return {A, -1};
}

}  // namespace asdr
