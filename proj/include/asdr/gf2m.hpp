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

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace asdr {

using Elem = std::uint32_t;
using Vec = std::vector<Elem>;

/// Canonical modulus per degree: lowest weight, then smallest value.
inline constexpr std::array<std::uint64_t, 33> kModulusTable = {
    0x0,        0x3,        0x7,        0xb,        0x13,        0x25,       0x43,
    0x83,       0x11b,      0x203,      0x409,      0x805,       0x1009,     0x201b,
    0x4021,     0x8003,     0x1002b,    0x20009,    0x40009,     0x80027,    0x100009,
    0x200005,   0x400003,   0x800021,   0x100001b,  0x2000009,   0x400001b,  0x8000027,
    0x10000003, 0x20000005, 0x40000003, 0x80000009, 0x10000008d};

namespace gf2x {

inline int degree(std::uint64_t p) { return p == 0 ? -1 : 63 - __builtin_clzll(p); }

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    const int m = degree(p);
    std::uint64_t r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if ((a >> m) & 1) a ^= p;
    }
    return r;
}

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
    while (b) {
        while (a && degree(a) >= degree(b)) a ^= b << (degree(a) - degree(b));
        std::swap(a, b);
    }
    return a;
}

/// Rabin irreducibility test over GF(2).
inline bool irreducible(std::uint64_t p) {
    const int m = degree(p);
    if (m < 1) return false;
    if (m == 1) return true;
    auto pow_x = [&](int k) {
        std::uint64_t r = 2;
        for (int i = 0; i < k; ++i) r = mulmod(r, r, p);
        return r;
    };
    if (pow_x(m) != 2) return false;
    for (int q = 2; q <= m; ++q) {
        if (m % q) continue;
        bool prime = true;
        for (int r = 2; r * r <= q; ++r)
            if (q % r == 0) prime = false;
        if (!prime) continue;
        if (gcd(pow_x(m / q) ^ 2, p) != 1) return false;
    }
    return true;
}

}  // namespace gf2x

struct FieldSpec {
    int m = 1;
    std::uint64_t modulus = 0x3;

    static FieldSpec canonical(int m) {
        if (m < 1 || m > 32) throw std::invalid_argument("field degree must be in [1,32]");
        return FieldSpec{m, kModulusTable[m]};
    }

    /// "GF(2^m)/<modulus hex>"
    std::string str() const {
        std::ostringstream os;
        os << "GF(2^" << m << ")/" << std::hex << modulus;
        return os.str();
    }

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
    friend auto operator<=>(const FieldSpec&, const FieldSpec&) = default;
};

/// GF(2^m); elements are residues bit-packed in the low m bits.
class Field {
public:
    static const Field& get(int m) { return get(FieldSpec::canonical(m)); }

    static const Field& get(const FieldSpec& s) {
        static std::mutex mu;
        static std::map<FieldSpec, std::unique_ptr<Field>> registry;
        std::lock_guard<std::mutex> lock(mu);
        auto it = registry.find(s);
        if (it != registry.end()) return *it->second;
        if (s.m < 1 || s.m > 32 || gf2x::degree(s.modulus) != s.m || !gf2x::irreducible(s.modulus))
            throw std::invalid_argument("modulus is not an irreducible polynomial of degree m: " + s.str());
        auto* f = new Field(s);
        registry.emplace(s, std::unique_ptr<Field>(f));
        return *f;
    }

    const FieldSpec& spec() const { return spec_; }
    int m() const { return spec_.m; }
    std::uint64_t order() const { return std::uint64_t(1) << spec_.m; }
    bool valid(Elem a) const { return spec_.m == 32 || a < (Elem(1) << spec_.m); }

    static Elem add(Elem a, Elem b) { return a ^ b; }

    Elem mul(Elem a, Elem b) const {
        if (a == 0 || b == 0) return 0;
        if (!exp_.empty()) return exp_[log_[a] + log_[b]];
        return slow_mul(a, b);
    }

    Elem sqr(Elem a) const { return mul(a, a); }

    Elem inv(Elem a) const {
        if (a == 0) throw std::domain_error("division by zero in " + spec_.str());
        if (!exp_.empty()) return exp_[(order() - 1 - log_[a]) % (order() - 1)];
        return pow(a, order() - 2);
    }

    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

    Elem pow(Elem a, std::uint64_t e) const {
        Elem r = 1;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    /// Unique square root, a^(2^(m-1)).
    Elem sqrt(Elem a) const {
        if (a == 0) return 0;
        if (!exp_.empty()) {
            const std::uint64_t q = order() - 1;
            std::uint64_t k = log_[a];
            return exp_[(k % 2 == 0) ? k / 2 : (k + q) / 2];
        }
        for (int i = 0; i + 1 < spec_.m; ++i) a = sqr(a);
        return a;
    }

    /// a^(2^k) for any integer k; negative k applies inverse Frobenius.
    Elem frob(Elem a, int k) const {
        int kk = ((k % spec_.m) + spec_.m) % spec_.m;
        for (int i = 0; i < kk; ++i) a = sqr(a);
        return a;
    }

    /// Absolute trace to GF(2).
    int trace(Elem a) const {
        Elem t = 0, x = a;
        for (int i = 0; i < spec_.m; ++i) {
            t ^= x;
            x = sqr(x);
        }
        return int(t & 1);
    }

    /// Smaller root of c^2 + c = b, if any; the other root is c ^ 1.
    std::optional<Elem> solve_as(Elem b) const {
        const int m = spec_.m;
        // columns: images of basis vectors under c -> c^2 + c (GF(2)-linear).
        std::vector<Elem> rows(m, 0);
        for (int j = 0; j < m; ++j) {
            Elem e = Elem(1) << j;
            Elem img = sqr(e) ^ e;
            for (int i = 0; i < m; ++i)
                if ((img >> i) & 1) rows[i] |= Elem(1) << j;
        }
        std::vector<Elem> rhs(m);
        for (int i = 0; i < m; ++i) rhs[i] = (b >> i) & 1;
        std::vector<int> pivcol;
        int r = 0;
        for (int c = 0; c < m && r < m; ++c) {
            int p = -1;
            for (int i = r; i < m; ++i)
                if ((rows[i] >> c) & 1) { p = i; break; }
            if (p < 0) continue;
            std::swap(rows[p], rows[r]);
            std::swap(rhs[p], rhs[r]);
            for (int i = 0; i < m; ++i)
                if (i != r && ((rows[i] >> c) & 1)) {
                    rows[i] ^= rows[r];
                    rhs[i] ^= rhs[r];
                }
            pivcol.push_back(c);
            ++r;
        }
        for (int i = r; i < m; ++i)
            if (rhs[i]) return std::nullopt;
        Elem c = 0;
        for (int i = 0; i < r; ++i)
            if (rhs[i]) c |= Elem(1) << pivcol[i];
        return std::min(c, c ^ Elem(1));
    }

    Elem slow_mul(Elem a, Elem b) const {
        std::uint64_t r = 0, aa = a;
        for (Elem bb = b; bb; bb >>= 1, aa <<= 1)
            if (bb & 1) r ^= aa;
        const int m = spec_.m;
        for (int i = 2 * m - 2; i >= m; --i)
            if ((r >> i) & 1) r ^= spec_.modulus << (i - m);
        return Elem(r);
    }

private:
    explicit Field(const FieldSpec& s) : spec_(s) {
        if (s.m <= 16) build_tables();
    }

    void build_tables() {
        const std::uint64_t q = order() - 1;
        if (q == 1) {
            exp_ = {1, 1};
            log_ = {0, 0};
            return;
        }
        // find a primitive element by orbit length.
        for (Elem g = 2; g < order(); ++g) {
            Elem x = 1;
            std::uint64_t len = 0;
            do {
                x = slow_mul(x, g);
                ++len;
            } while (x != 1 && len <= q);
            if (len != q) continue;
            exp_.assign(2 * q, 0);
            log_.assign(order(), 0);
            x = 1;
            for (std::uint64_t i = 0; i < q; ++i) {
                exp_[i] = exp_[i + q] = x;
                log_[x] = std::uint32_t(i);
                x = slow_mul(x, g);
            }
            return;
        }
    }

    FieldSpec spec_;
    std::vector<Elem> exp_;
    std::vector<std::uint32_t> log_;
};

/// Checked scalar: carries its field, rejects mixing.
class FieldElement {
public:
    FieldElement(const Field& F, Elem bits) : F_(&F), v_(bits) {
        if (!F.valid(bits)) throw std::invalid_argument("element out of range for " + F.spec().str());
    }
    const Field& field() const { return *F_; }
    Elem bits() const { return v_; }
    bool is_zero() const { return v_ == 0; }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return FieldElement(*a.F_, a.v_ ^ b.v_);
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) { return a + b; }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return FieldElement(*a.F_, a.F_->mul(a.v_, b.v_));
    }
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
        a.check(b);
        return FieldElement(*a.F_, a.F_->div(a.v_, b.v_));
    }
    FieldElement inv() const { return FieldElement(*F_, F_->inv(v_)); }
    FieldElement frobenius() const { return FieldElement(*F_, F_->sqr(v_)); }
    FieldElement inv_frobenius() const { return FieldElement(*F_, F_->sqrt(v_)); }
    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.F_->spec() == b.F_->spec() && a.v_ == b.v_;
    }

private:
    void check(const FieldElement& o) const {
        if (!(F_->spec() == o.F_->spec())) throw std::invalid_argument("mismatched FieldSpec");
    }
    const Field* F_;
    Elem v_;
};

// ---------------------------------------------------------------- vectors

inline Vec vec_add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    Vec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] ^= b[i];
    return r;
}

inline void vec_axpy(const Field& F, Elem c, const Vec& x, Vec& y) {
    if (c == 0) return;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (x[i]) y[i] ^= F.mul(c, x[i]);
}

inline Vec vec_scale(const Field& F, Elem c, const Vec& x) {
    Vec r(x.size(), 0);
    vec_axpy(F, c, x, r);
    return r;
}

inline Elem dot(const Field& F, const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    Elem s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] && b[i]) s ^= F.mul(a[i], b[i]);
    return s;
}

/// Entrywise sigma^k.
inline Vec twist(const Field& F, const Vec& v, int k) {
    if (k == 0) return v;
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = F.frob(v[i], k);
    return r;
}

inline bool is_zero(const Vec& v) {
    for (Elem e : v)
        if (e) return false;
    return true;
}

inline Vec unit_vec(int n, int i) {
    Vec v(n, 0);
    v[i] = 1;
    return v;
}

// ---------------------------------------------------------------- matrices

class Matrix {
public:
    Matrix() = default;
    Matrix(const Field& F, int rows, int cols) : F_(&F), r_(rows), c_(cols), a_(std::size_t(rows) * cols, 0) {}

    static Matrix identity(const Field& F, int n) {
        Matrix I(F, n, n);
        for (int i = 0; i < n; ++i) I.at(i, i) = 1;
        return I;
    }

    static Matrix from_rows(const Field& F, int cols, const std::vector<Vec>& rows) {
        Matrix M(F, int(rows.size()), cols);
        for (int i = 0; i < M.r_; ++i) {
            if (int(rows[i].size()) != cols) throw std::invalid_argument("dimension mismatch");
            for (int j = 0; j < cols; ++j) M.at(i, j) = rows[i][j];
        }
        return M;
    }

    static Matrix from_columns(const Field& F, int rows, const std::vector<Vec>& cols) {
        Matrix M(F, rows, int(cols.size()));
        for (int j = 0; j < M.c_; ++j) {
            if (int(cols[j].size()) != rows) throw std::invalid_argument("dimension mismatch");
            for (int i = 0; i < rows; ++i) M.at(i, j) = cols[j][i];
        }
        return M;
    }

    const Field& field() const { return *F_; }
    int rows() const { return r_; }
    int cols() const { return c_; }
    Elem& at(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
    Elem operator()(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

    Vec row(int i) const { return Vec(a_.begin() + std::size_t(i) * c_, a_.begin() + std::size_t(i + 1) * c_); }
    Vec col(int j) const {
        Vec v(r_);
        for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
        return v;
    }
    std::vector<Vec> row_list() const {
        std::vector<Vec> out;
        for (int i = 0; i < r_; ++i) out.push_back(row(i));
        return out;
    }

    Matrix operator*(const Matrix& B) const {
        if (c_ != B.r_) throw std::invalid_argument("dimension mismatch");
        Matrix C(*F_, r_, B.c_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < c_; ++k) {
                Elem a = (*this)(i, k);
                if (!a) continue;
                for (int j = 0; j < B.c_; ++j)
                    if (B(k, j)) C.at(i, j) ^= F_->mul(a, B(k, j));
            }
        return C;
    }

    Vec operator*(const Vec& v) const {
        if (int(v.size()) != c_) throw std::invalid_argument("dimension mismatch");
        Vec r(r_, 0);
        for (int i = 0; i < r_; ++i) {
            Elem s = 0;
            for (int j = 0; j < c_; ++j)
                if (v[j] && (*this)(i, j)) s ^= F_->mul((*this)(i, j), v[j]);
            r[i] = s;
        }
        return r;
    }

    Matrix operator+(const Matrix& B) const {
        if (r_ != B.r_ || c_ != B.c_) throw std::invalid_argument("dimension mismatch");
        Matrix C(*this);
        for (std::size_t i = 0; i < a_.size(); ++i) C.a_[i] ^= B.a_[i];
        return C;
    }

    Matrix transpose() const {
        Matrix T(*F_, c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) T.at(j, i) = (*this)(i, j);
        return T;
    }

    /// Entrywise sigma^k.
    Matrix twisted(int k) const {
        Matrix T(*this);
        if (k != 0)
            for (auto& e : T.a_) e = F_->frob(e, k);
        return T;
    }

    bool is_zero() const {
        for (Elem e : a_)
            if (e) return false;
        return true;
    }

    friend bool operator==(const Matrix& A, const Matrix& B) {
        return A.r_ == B.r_ && A.c_ == B.c_ && A.a_ == B.a_;
    }

    /// In-place reduced row echelon form; returns pivot columns.
    std::vector<int> rref() {
        std::vector<int> piv;
        int r = 0;
        for (int c = 0; c < c_ && r < r_; ++c) {
            int p = -1;
            for (int i = r; i < r_; ++i)
                if ((*this)(i, c)) { p = i; break; }
            if (p < 0) continue;
            if (p != r)
                for (int j = 0; j < c_; ++j) std::swap(at(p, j), at(r, j));
            Elem s = F_->inv((*this)(r, c));
            for (int j = c; j < c_; ++j) at(r, j) = F_->mul(at(r, j), s);
            for (int i = 0; i < r_; ++i) {
                if (i == r) continue;
                Elem f = (*this)(i, c);
                if (!f) continue;
                for (int j = c; j < c_; ++j)
                    if ((*this)(r, j)) at(i, j) ^= F_->mul(f, (*this)(r, j));
            }
            piv.push_back(c);
            ++r;
        }
        return piv;
    }

    int rank() const {
        Matrix T(*this);
        return int(T.rref().size());
    }

    /// Basis of the right kernel {x : A x = 0}.
    std::vector<Vec> kernel() const {
        Matrix T(*this);
        auto piv = T.rref();
        std::vector<bool> is_piv(c_, false);
        for (int p : piv) is_piv[p] = true;
        std::vector<Vec> out;
        for (int f = 0; f < c_; ++f) {
            if (is_piv[f]) continue;
            Vec x(c_, 0);
            x[f] = 1;
            for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = T(int(i), f);
            out.push_back(std::move(x));
        }
        return out;
    }

    /// Some x with A x = b, if consistent.
    std::optional<Vec> solve(const Vec& b) const {
        if (int(b.size()) != r_) throw std::invalid_argument("dimension mismatch");
        Matrix Aug(*F_, r_, c_ + 1);
        for (int i = 0; i < r_; ++i) {
            for (int j = 0; j < c_; ++j) Aug.at(i, j) = (*this)(i, j);
            Aug.at(i, c_) = b[i];
        }
        auto piv = Aug.rref();
        if (!piv.empty() && piv.back() == c_) return std::nullopt;
        Vec x(c_, 0);
        for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = Aug(int(i), c_);
        return x;
    }

    Matrix inverse() const {
        if (r_ != c_) throw std::invalid_argument("inverse of non-square matrix");
        Matrix Aug(*F_, r_, 2 * c_);
        for (int i = 0; i < r_; ++i) {
            for (int j = 0; j < c_; ++j) Aug.at(i, j) = (*this)(i, j);
            Aug.at(i, c_ + i) = 1;
        }
        auto piv = Aug.rref();
        if (int(piv.size()) < r_ || piv[r_ - 1] >= c_) throw std::domain_error("singular matrix");
        Matrix Inv(*F_, r_, c_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) Inv.at(i, j) = Aug(i, c_ + j);
        return Inv;
    }

private:
    const Field* F_ = nullptr;
    int r_ = 0, c_ = 0;
    std::vector<Elem> a_;
};

// ---------------------------------------------------------------- subspaces

/// Subspace of F^n held as its reduced row echelon basis (canonical).
class Subspace {
public:
    Subspace() = default;

    static Subspace span(const Field& F, int n, const std::vector<Vec>& vs) {
        Subspace S;
        S.F_ = &F;
        S.n_ = n;
        if (vs.empty()) return S;
        Matrix M = Matrix::from_rows(F, n, vs);
        auto piv = M.rref();
        for (std::size_t i = 0; i < piv.size(); ++i) S.rows_.push_back(M.row(int(i)));
        S.piv_ = piv;
        return S;
    }
    static Subspace zero(const Field& F, int n) { return span(F, n, {}); }
    static Subspace full(const Field& F, int n) {
        std::vector<Vec> vs;
        for (int i = 0; i < n; ++i) vs.push_back(unit_vec(n, i));
        return span(F, n, vs);
    }

    const Field& field() const { return *F_; }
    int ambient() const { return n_; }
    int dim() const { return int(rows_.size()); }
    const std::vector<Vec>& basis() const { return rows_; }

    /// Reduce v against the echelon basis.
    Vec reduce(Vec v) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            Elem c = v[piv_[i]];
            if (c) vec_axpy(*F_, c, rows_[i], v);
        }
        return v;
    }

    bool contains(const Vec& v) const {
        if (int(v.size()) != n_) throw std::invalid_argument("dimension mismatch");
        return asdr::is_zero(reduce(v));
    }

    bool subset_of(const Subspace& o) const {
        check(o);
        for (const auto& r : rows_)
            if (!o.contains(r)) return false;
        return true;
    }

    Subspace operator+(const Subspace& o) const {
        check(o);
        std::vector<Vec> vs = rows_;
        vs.insert(vs.end(), o.rows_.begin(), o.rows_.end());
        return span(*F_, n_, vs);
    }

    /// {x : b . x = 0 for all basis b} under the standard dot product.
    Subspace annihilator() const {
        if (rows_.empty()) return full(*F_, n_);
        return span(*F_, n_, Matrix::from_rows(*F_, n_, rows_).kernel());
    }

    Subspace intersect(const Subspace& o) const {
        check(o);
        return (annihilator() + o.annihilator()).annihilator();
    }

    friend bool operator==(const Subspace& a, const Subspace& b) { return a.n_ == b.n_ && a.rows_ == b.rows_; }
    friend bool operator<(const Subspace& a, const Subspace& b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        return a.rows_ < b.rows_;
    }

private:
    void check(const Subspace& o) const {
        if (n_ != o.n_) throw std::invalid_argument("dimension mismatch");
    }
    const Field* F_ = nullptr;
    int n_ = 0;
    std::vector<Vec> rows_;
    std::vector<int> piv_;
};

/// x -> A * sigma^twist(x).
struct SemilinearMap {
    Matrix A;
    int twist = 0;

    const Field& field() const { return A.field(); }
    int dim_in() const { return A.cols(); }
    int dim_out() const { return A.rows(); }

    Vec apply(const Vec& v) const { return A * asdr::twist(A.field(), v, twist); }

    /// Column span of A applied to W; twisting coordinates preserves spans.
    Subspace image(const Subspace& W) const {
        std::vector<Vec> out;
        for (const auto& w : W.basis()) out.push_back(apply(w));
        return Subspace::span(A.field(), A.rows(), out);
    }
    Subspace image() const { return image(Subspace::full(A.field(), A.cols())); }

    /// sigma^(-twist) applied to a basis of ker A.
    Subspace kernel() const {
        std::vector<Vec> ks = A.kernel();
        for (auto& k : ks) k = asdr::twist(A.field(), k, -twist);
        return Subspace::span(A.field(), A.cols(), ks);
    }

    /// {x : T x in W}.
    Subspace preimage(const Subspace& W) const {
        auto ann = W.annihilator().basis();
        if (ann.empty()) return Subspace::full(A.field(), A.cols());
        Matrix P = Matrix::from_rows(A.field(), A.rows(), ann) * A;
        return SemilinearMap{P, twist}.kernel();
    }

    /// B o this.
    SemilinearMap then(const SemilinearMap& B) const { return {B.A * A.twisted(B.twist), twist + B.twist}; }
};

/// {x : x^T G w = 0 for all w in W}, no validation of G.
inline Subspace perp(const Subspace& W, const Matrix& G) {
    std::vector<Vec> rows;
    Matrix Gt = G.transpose();
    for (const auto& w : W.basis()) rows.push_back(Gt * w);
    return Subspace::span(G.field(), G.cols(), rows).annihilator();
}

inline bool is_alternating(const Matrix& G) {
    if (G.rows() != G.cols()) return false;
    for (int i = 0; i < G.rows(); ++i) {
        if (G(i, i)) return false;
        for (int j = 0; j < i; ++j)
            if (G(i, j) != G(j, i)) return false;
    }
    return true;
}

inline Subspace symplectic_complement(const Subspace& W, const Matrix& G) {
    if (!is_alternating(G)) throw std::invalid_argument("Gram matrix is not alternating");
    if (G.rank() != G.rows()) throw std::invalid_argument("degenerate Gram matrix");
    if (W.ambient() != G.rows()) throw std::invalid_argument("dimension mismatch");
    return perp(W, G);
}

}  // namespace asdr
