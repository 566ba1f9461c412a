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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dieudonne.hpp"
#include "errors.hpp"
#include "gf2m.hpp"
#include "laurent.hpp"
#include "tower.hpp"

namespace asdr {

/// omega regular off the bad locus, with a principal-part tail at each listed top place.
struct EnhancedDifferential {
    DifferentialElement omega;
    std::map<int, TailClass> tails;
};

namespace detail {

/// Solves a^T R = w for rows R (independent), via a pivot submatrix.
class RowSolver {
public:
    RowSolver() = default;
    RowSolver(const Field& F, std::vector<Vec> rows, int width) : F_(&F), rows_(std::move(rows)), width_(width) {
        if (rows_.empty()) return;
        Matrix M = Matrix::from_rows(F, width, rows_);
        Matrix R = M;
        piv_ = R.rref();
        if (int(piv_.size()) != int(rows_.size())) throw DimensionMismatch("row solver: dependent rows");
        Matrix S(F, int(rows_.size()), int(rows_.size()));
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t k = 0; k < piv_.size(); ++k) S.at(int(i), int(k)) = rows_[i][piv_[k]];
        inv_ = S.transpose().inverse();
    }

    std::size_t size() const { return rows_.size(); }

    /// nullopt when w is not in the row span.
    std::optional<Vec> solve(const Vec& w) const {
        if (rows_.empty()) return is_zero(w) ? std::optional<Vec>(Vec{}) : std::nullopt;
        Vec wp(piv_.size());
        for (std::size_t k = 0; k < piv_.size(); ++k) wp[k] = w[piv_[k]];
        Vec a = inv_ * wp;
        Vec back(width_, 0);
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (a[i]) vec_axpy(*F_, a[i], rows_[i], back);
        if (back != w) return std::nullopt;
        return a;
    }

private:
    const Field* F_ = nullptr;
    std::vector<Vec> rows_;
    int width_ = 0;
    std::vector<int> piv_;
    Matrix inv_;
};

inline Matrix operator_matrix(const Field& F, int n, const std::vector<Vec>& cols) {
    if (cols.empty()) return Matrix(F, n, 0);
    return Matrix::from_columns(F, n, cols);
}

}  // namespace detail

/// H^1_dR of a tower curve: enhanced differentials with tails of pole order <= N = 2n on all bad places,
/// modulo (df, pp f) for f in L(N D); basis drawn from pole order <= n, regular differentials first.
class DeRhamSpace {
public:
    explicit DeRhamSpace(const TowerCurve& C, int n = 0) : C_(C) { build(n); }

    const TowerCurve& curve() const { return C_; }
    const Field& field() const { return C_.field(); }
    int genus() const { return C_.genus(); }
    int dim() const { return 2 * genus(); }
    int n() const { return n_; }
    int bound() const { return N_; }
    int ambient_dim() const { return nb_ + ns_ * N_; }
    /// Representatives of the basis classes; the first g are regular with empty tails.
    const std::vector<Vec>& basis() const { return basis_; }
    const DieudonneModule& module() const { return mod_; }
    const RRSpace& omega_basis() const { return omega_; }
    int target() const { return T_; }

    // ------------------------------------------------ ambient coordinates

    int tail_index(int q, int e) const { return nb_ + q * N_ + (e + N_); }

    std::vector<LaurentSeries> omega_expansions(const Vec& v) const {
        std::vector<LaurentSeries> out(ns_, LaurentSeries::zero(field()));
        for (int q = 0; q < ns_; ++q) {
            LaurentSeries s = LaurentSeries::zero(field(), T_);
            for (int b = 0; b < nb_; ++b)
                if (v[b]) s = s + omega_.exp[b][q].scaled(v[b]);
            out[q] = s.truncated(T_);
        }
        return out;
    }

    std::vector<TailClass> tails_of(const Vec& v) const {
        std::vector<TailClass> out(ns_, TailClass(field()));
        for (int q = 0; q < ns_; ++q)
            for (int e = -N_; e < 0; ++e)
                if (Elem c = v[tail_index(q, e)]) out[q].set(e, c);
        return out;
    }

    FunctionElement omega_global(const Vec& v) const {
        const TowerAlgebra& T = C_.algebra();
        FunctionElement f(C_.depth());
        for (int b = 0; b < nb_; ++b)
            if (v[b]) f = T.add(f, T.scale(omega_.basis[b], v[b]));
        return f;
    }

    /// Ambient vector from local data; throws PoleBoundExceeded beyond the bounds.
    Vec ambient_from_local(const std::vector<LaurentSeries>& w, const std::vector<TailClass>& t) const {
        Vec row(nrows_, 0);
        int off = 0;
        for (int q = 0; q < ns_; ++q) {
            const int lo = -(N_ + 1);
            if (!w[q].is_zero() && w[q].valuation() < lo)
                throw PoleBoundExceeded("differential pole order exceeds the space bound; rebuild with larger n");
            for (int e = lo; e < M_; ++e) row[off++] = w[q].coeff(e);
        }
        auto a = omega_solver_.solve(row);
        if (!a) throw PoleBoundExceeded("differential is not in the space of bounded pole order");
        Vec v(ambient_dim(), 0);
        for (int b = 0; b < nb_; ++b) v[b] = (*a)[b];
        for (int q = 0; q < ns_; ++q) {
            if (t[q].empty()) continue;
            if (t[q].pole_order() > N_) throw PoleBoundExceeded("tail pole order exceeds the space bound");
            for (int e = t[q].lowest(); e < 0; ++e) v[tail_index(q, e)] = t[q].get(e);
        }
        return v;
    }

    bool is_cocycle(const Vec& v) const {
        for (const auto& r : cocycle_rows_)
            if (dot(field(), r, v)) return false;
        return true;
    }

    /// Class coordinates of a cocycle.
    Vec reduce(const Vec& v) const {
        if (!is_cocycle(v)) throw NotSecondKind("ambient vector is not a cocycle");
        auto c = reducer_.solve(v);
        if (!c) throw std::logic_error("cocycle outside basis + coboundaries");
        return Vec(c->begin(), c->begin() + dim());
    }

    Vec representative(const Vec& cls) const {
        Vec v(ambient_dim(), 0);
        for (int i = 0; i < dim(); ++i)
            if (cls[i]) vec_axpy(field(), cls[i], basis_[i], v);
        return v;
    }

    Vec class_of(const EnhancedDifferential& e) const {
        if (!C_.denominators_on_bad_locus(e.omega.f))
            throw UnsupportedDivisor("differential has poles off the bad locus");
        std::vector<LaurentSeries> w(ns_);
        for (int q = 0; q < ns_; ++q) w[q] = C_.expand_diff(e.omega, q, T_).f;
        std::vector<TailClass> t(ns_, TailClass(field()));
        for (const auto& [q, tc] : e.tails) {
            if (q < 0 || q >= ns_) throw UnsupportedDivisor("tail at an unknown place");
            t[q] = tc;
        }
        return reduce(ambient_from_local(w, t));
    }

    /// (df, pp f) for a function with poles on the bad locus.
    EnhancedDifferential exact(const FunctionElement& f) const {
        EnhancedDifferential e{{C_.algebra().d_dx(f).lifted(C_.depth())}, {}};
        for (int q = 0; q < ns_; ++q) {
            TailClass t = TailClass::from_series(C_.expand(f, q, 1));
            if (!t.empty()) e.tails[q] = t;
        }
        return e;
    }

    Vec apply_F(const Vec& cls) const { return mod_.F.apply(cls); }
    Vec apply_V(const Vec& cls) const { return mod_.V.apply(cls); }
    Elem pairing(const Vec& a, const Vec& b) const { return mod_.pair(a, b); }

    /// Residue formula on ambient representatives.
    Elem pairing_ambient(const Vec& x, const Vec& y) const {
        auto wx = omega_expansions(x), wy = omega_expansions(y);
        auto tx = tails_of(x), ty = tails_of(y);
        Elem s = 0;
        for (int q = 0; q < ns_; ++q) {
            LaurentSeries f = tx[q].to_series(), g = ty[q].to_series();
            LaurentSeries term = g * wx[q] + f * wy[q] + g * f.derivative();
            s ^= term.coeff(-1);
        }
        return s;
    }

    /// Sum of residues of the omega part over all bad places.
    Elem residue_sum(const Vec& v) const {
        Elem s = 0;
        for (const auto& w : omega_expansions(v)) s ^= w.coeff(-1);
        return s;
    }

private:
    void build(int n_req) {
        const Field& K = field();
        const int g = genus();
        ns_ = C_.num_top();
        int n0 = 1;
        while (n0 * ns_ <= std::max(2 * g - 2, 0)) ++n0;
        int head = 0;
        for (const auto& q : C_.top())
            for (int d : q.breaks) head = std::max(head, d ? d + 1 : 0);
        if (n_req) {
            if (n_req < n0) throw std::invalid_argument("n too small: need deg(nD) > max(2g-2, 0)");
            n_ = n_req;
        } else {
            n_ = n0 + head;
        }
        N_ = 2 * n_;
        M_ = 2 * g + 1;
        T_ = std::max(2 * M_ + 2, N_ + 2);

        Divisor DN1, DN;
        for (int q = 0; q < ns_; ++q) {
            DN1.mult[q] = N_ + 1;
            DN.mult[q] = N_;
        }
        omega_ = C_.differentials(DN1, T_);
        nb_ = int(omega_.basis.size());
        nrows_ = ns_ * (N_ + 1 + M_);

        auto local_row = [&](const std::vector<LaurentSeries>& w) {
            Vec row(nrows_, 0);
            int off = 0;
            for (int q = 0; q < ns_; ++q)
                for (int e = -(N_ + 1); e < M_; ++e) row[off++] = w[q].coeff(e);
            return row;
        };
        std::vector<Vec> erows;
        for (int b = 0; b < nb_; ++b) erows.push_back(local_row(omega_.exp[b]));
        omega_solver_ = detail::RowSolver(K, erows, nrows_);

        const int A = ambient_dim();
        // cocycle conditions: omega - d(tail) regular
        cocycle_rows_.clear();
        for (int q = 0; q < ns_; ++q)
            for (int e = -(N_ + 1); e <= -1; ++e) {
                Vec r(A, 0);
                for (int b = 0; b < nb_; ++b) r[b] = omega_.exp[b][q].coeff(e);
                if (e % 2 == 0) r[tail_index(q, e + 1)] ^= 1;
                if (!is_zero(r)) cocycle_rows_.push_back(r);
            }
        Subspace Z = Subspace::span(K, A, cocycle_rows_).annihilator();

        // coboundaries
        RRSpace LN = C_.riemann_roch(DN, T_ + 1);
        std::vector<Vec> cob;
        for (std::size_t f = 0; f < LN.basis.size(); ++f) {
            std::vector<LaurentSeries> df(ns_);
            std::vector<TailClass> pp(ns_, TailClass(K));
            for (int q = 0; q < ns_; ++q) {
                df[q] = LN.exp[f][q].derivative();
                pp[q] = TailClass::from_series(LN.exp[f][q]);
            }
            cob.push_back(ambient_from_local(df, pp));
        }
        Subspace B = Subspace::span(K, A, cob);
        if (Z.dim() - B.dim() != 2 * g)
            throw DimensionMismatch("cocycles minus coboundaries = " + std::to_string(Z.dim() - B.dim()) +
                                    ", expected 2g = " + std::to_string(2 * g));
        for (const auto& b : B.basis()) ensure(is_cocycle(b), "coboundaries are cocycles");

        // regular differentials with empty tails
        std::vector<Vec> reg_rows;
        for (int q = 0; q < ns_; ++q)
            for (int e = -(N_ + 1); e < 0; ++e) {
                Vec r(nb_, 0);
                for (int b = 0; b < nb_; ++b) r[b] = omega_.exp[b][q].coeff(e);
                if (!is_zero(r)) reg_rows.push_back(r);
            }
        std::vector<Vec> reg = reg_rows.empty() ? Subspace::full(K, nb_).basis()
                                                : Subspace::span(K, nb_, reg_rows).annihilator().basis();
        if (int(reg.size()) != g) throw DimensionMismatch("regular differentials: dim != g");
        basis_.clear();
        Subspace acc = B;
        for (auto r : reg) {
            r.resize(A, 0);
            if (acc.contains(r)) throw DimensionMismatch("regular differential is a coboundary");
            acc = acc + Subspace::span(K, A, {r});
            basis_.push_back(r);
        }
        // cocycles of pole order <= n, tails <= n
        std::vector<Vec> zn_rows = cocycle_rows_;
        for (int q = 0; q < ns_; ++q) {
            for (int e = -(N_ + 1); e < -(n_ + 1); ++e) {
                Vec r(A, 0);
                for (int b = 0; b < nb_; ++b) r[b] = omega_.exp[b][q].coeff(e);
                if (!is_zero(r)) zn_rows.push_back(r);
            }
            for (int e = -N_; e < -n_; ++e) zn_rows.push_back(unit_vec(A, tail_index(q, e)));
        }
        Subspace Zn = Subspace::span(K, A, zn_rows).annihilator();
        for (const auto& z : Zn.basis()) {
            if (int(basis_.size()) == 2 * g) break;
            if (acc.contains(z)) continue;
            acc = acc + Subspace::span(K, A, {z});
            basis_.push_back(z);
        }
        if (int(basis_.size()) != 2 * g) throw DimensionMismatch("pole order n does not span H^1");

        std::vector<Vec> red_rows = basis_;
        for (const auto& b : B.basis()) red_rows.push_back(b);
        reducer_ = detail::RowSolver(K, red_rows, A);

        // F, V, Gram
        std::vector<Vec> Fc, Vc;
        for (const auto& h : basis_) {
            auto t = tails_of(h);
            for (auto& tc : t) tc = tc.square();
            std::vector<LaurentSeries> zero(ns_, LaurentSeries::zero(K));
            Fc.push_back(reduce(ambient_from_local(zero, t)));
            auto w = omega_expansions(h);
            for (auto& s : w) s = cartier_local({s}).f;
            Vc.push_back(reduce(ambient_from_local(w, std::vector<TailClass>(ns_, TailClass(K)))));
        }
        Matrix G(K, 2 * g, 2 * g);
        for (int i = 0; i < 2 * g; ++i)
            for (int j = 0; j < 2 * g; ++j) G.at(i, j) = pairing_ambient(basis_[i], basis_[j]);
        mod_ = DieudonneModule{{detail::operator_matrix(K, 2 * g, Fc), 1}, {detail::operator_matrix(K, 2 * g, Vc), -1}, G};
        mod_.check();
    }

    TowerCurve C_;
    int ns_ = 0, n_ = 0, N_ = 0, M_ = 0, T_ = 0, nb_ = 0, nrows_ = 0;
    RRSpace omega_;
    detail::RowSolver omega_solver_, reducer_;
    std::vector<Vec> cocycle_rows_;
    std::vector<Vec> basis_;
    DieudonneModule mod_;
};

/// Pull a class on X = Y truncated one level back to Y.
inline Vec pullback_class(const DeRhamSpace& X, const DeRhamSpace& Y, const Vec& cls) {
    const TowerCurve& CX = X.curve();
    const TowerCurve& CY = Y.curve();
    const int r = CY.depth();
    if (CX.depth() != r - 1 || CX.num_top() != int(CY.places(r - 1).size()))
        throw std::invalid_argument("pullback needs X to be Y truncated by one level");
    Vec rep = X.representative(cls);
    DifferentialElement w{X.omega_global(rep).lifted(r)};
    auto tX = X.tails_of(rep);
    for (int P = 0; P < CX.num_top(); ++P)
        ensure(CX.top()[P].base == CY.places(r - 1)[P].base, "truncated place order matches");
    for (;;) {
        std::vector<LaurentSeries> wy(CY.num_top());
        std::vector<TailClass> ty(CY.num_top(), TailClass(CY.field()));
        bool short_prec = false;
        for (int q = 0; q < CY.num_top(); ++q) {
            const Place& Q = CY.top()[q];
            wy[q] = CY.expand_diff(w, q, Y.target()).f;
            if (tX[Q.parent].empty()) continue;
            LaurentSeries t = tX[Q.parent].to_series().compose(Q.u_parent);
            if (t.known_upto() < 0) {
                short_prec = true;
                break;
            }
            ty[q] = TailClass::from_series(t);
        }
        if (short_prec) {
            CY.refine(2 * CY.precision());
            continue;
        }
        return Y.reduce(Y.ambient_from_local(wy, ty));
    }
}

/// Top places of Y ramified at the last level, in index order.
inline std::vector<int> branch_places(const TowerCurve& Y) {
    std::vector<int> out;
    for (const auto& q : Y.top())
        if (q.breaks.back() != 0) out.push_back(q.index);
    return out;
}

/// Local coordinates at a branch place Q in which psi' = c^2 t'^-d exactly on the base and
/// u' = z' t'^((d+1)/2) / c upstairs, so that t' = u'^2 + u' t'^((d+1)/2) / c.
struct BranchCoordinates {
    LaurentSeries t_base;  ///< t' as a series in the base uniformizer t
    LaurentSeries t_up;    ///< t' as a series in U
    LaurentSeries u_up;    ///< u' as a series in U
};

inline BranchCoordinates branch_coordinates(const TowerCurve& Y, const TowerCurve& X, const Place& Q, int target) {
    if (Q.kind != Place::Kind::Ramified) throw std::invalid_argument("branch coordinates need a ramified place");
    const Field& K = Y.field();
    const int r = Y.depth(), d = Q.d;
    const LaurentSeries gt = Q.gloc.empty() ? LaurentSeries::zero(K) : Q.gloc.to_series();
    LaurentSeries psi = X.expand(Y.algebra().psi()[r - 1], Q.parent, target) + gt.square() + gt;
    ensure(!psi.is_zero() && psi.valuation() == -d, "reduced potential has a pole of order d");
    const Elem lc = psi.leading();
    // w^d = B with B = t^-d lc / psi'
    const LaurentSeries B = psi.shifted(d).scaled(K.inv(lc)).inverse(target);
    LaurentSeries w = LaurentSeries::constant(K, 1, std::min(B.known_upto(), target));
    for (int it = 0; it < 64; ++it) {
        LaurentSeries err = w.pow(d) + B;
        if (err.is_zero()) break;
        w = w + err * w.pow(d - 1).inverse(target);
    }
    BranchCoordinates bc;
    bc.t_base = w.shifted(1);
    bc.t_up = bc.t_base.compose(Q.u_parent);
    const LaurentSeries zp = Q.gloc.empty() ? Q.z.back() : Q.z.back() + gt.compose(Q.u_parent);
    bc.u_up = (zp * bc.t_up.pow((d + 1) / 2)).scaled(K.inv(K.sqrt(lc)));
    ensure(bc.u_up.valuation() == 1, "normalized branch coordinate is a uniformizer");
    ensure((bc.u_up.square() + (bc.u_up * bc.t_up.pow((d + 1) / 2)).scaled(K.inv(K.sqrt(lc))) + bc.t_up).is_zero(),
           "normalized branch coordinates satisfy their relation");
    return bc;
}

/// Pullback of a differential on X with principal part t'^{-j-1} dt' at the i-th branch point, normalized to
/// be monic in u' at Q_i, with tail u'^(d-2j) attached when its order there is negative.
inline EnhancedDifferential build_omega_ij(const TowerCurve& Y, int i, int j) {
    const int r = Y.depth();
    const Field& K = Y.field();
    auto br = branch_places(Y);
    if (i < 1 || i > int(br.size())) throw std::invalid_argument("branch index out of range");
    const Place& Q = Y.top()[br[i - 1]];
    const int d = Q.breaks.back();
    if (j < 1 || j > d - 1) throw std::invalid_argument("need 1 <= j <= d_i - 1");
    TowerCurve X = Y.truncate(r - 1);
    const int P = Q.parent;
    Divisor D;
    D.mult[P] = j + 1;
    RRSpace W = X.differentials(D, 2);
    // principal part exactly t'^{-j-1} dt' at P
    std::vector<Vec> rows;
    Vec rhs;
    const BranchCoordinates bc = branch_coordinates(Y, X, Q, 4 * d + 4 * j + 8);
    const LaurentSeries& phi = bc.t_base;
    const LaurentSeries target = phi.pow(-j - 1, phi.known_upto()) * phi.derivative();
    for (int k = 1; k <= j + 1; ++k) {
        Vec row;
        for (const auto& ex : W.exp) row.push_back(ex[P].coeff(-k));
        rows.push_back(row);
        rhs.push_back(target.coeff(-k));
    }
    auto sol = Matrix::from_rows(K, int(W.basis.size()), rows).solve(rhs);
    ensure(sol.has_value(), "differential with a single prescribed pole exists");
    FunctionElement h(r - 1);
    for (std::size_t b = 0; b < W.basis.size(); ++b)
        if ((*sol)[b]) h = X.algebra().add(h, X.algebra().scale(W.basis[b], (*sol)[b]));
    DifferentialElement w{h.lifted(r)};
    const int ord = -2 * j + d - 1;
    LaurentSeries loc = Y.expand_diff(w, Q.index, ord + 1).f;
    ensure(!loc.is_zero() && loc.valuation() == ord, "order of omega_ij at Q_i");
    // monic in u': U = u'/a + ..., so the leading coefficient in u' is lead * a^-(ord+1)
    const Elem a = bc.u_up.leading();
    Elem lead = loc.leading();
    for (int k = 0; k < ord + 1; ++k) lead = K.mul(lead, K.inv(a));
    for (int k = 0; k < -(ord + 1); ++k) lead = K.mul(lead, a);
    w.f = Y.algebra().scale(w.f, K.inv(lead));
    EnhancedDifferential e{w, {}};
    if (ord < 0) {
        LaurentSeries tail = bc.u_up.pow(-2 * j + d, bc.u_up.known_upto());
        if (tail.known_upto() < 0) throw PrecisionExhausted("tail of omega_ij not fully known");
        e.tails[Q.index] = TailClass::from_series(tail);
    }
    return e;
}

/// Projection of a class onto the F- and V-nilpotent summand.
inline Vec nilpotent_part(const DeRhamSpace& S, const Vec& cls) {
    const auto& M = S.module();
    return nilpotent_projector(M, fitting(M)) * cls;
}

}  // namespace asdr
