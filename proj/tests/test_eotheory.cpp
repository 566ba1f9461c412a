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

#include <functional>

#include "asdr/curve_config.hpp"
#include "asdr/eotheory.hpp"
#include "oracles.hpp"

using namespace asdr;

namespace {

TowerCurve curve(const std::string& text) { return build_curve(parse_curve_config(text)); }

const std::string kBreak7a = "field auto\ny = x^3\nz = x^2*y\n";
const std::string kBreak7b = "field auto\ny = x^3\nz = (x^2+x+1)*y\n";

RamificationData ordinary_data(int g_X, std::vector<int> breaks) {
    RamificationData rd;
    rd.g_X = rd.f_X = g_X;
    rd.breaks = std::move(breaks);
    return rd;
}

RamificationData ss_elliptic(std::vector<int> breaks) {
    RamificationData rd;
    rd.g_X = 1;
    rd.f_X = 0;
    rd.breaks = std::move(breaks);
    rd.a_X = {0, 1};
    return rd;
}

/// phi by direct simulation of the pole bound of a single local summand: dim w(W_d) on the model module.
int phi_by_module(int d, const Word& w) {
    const Field& K = Field::get(1);
    DieudonneModule W = modules::branch_module(K, d);
    return apply_word(W, w, W.full()).dim();
}

/// Minimal number of ⊥'s reaching each m, by exhaustive enumeration of words.
std::vector<int> min_perps_exhaustive(int d, int max_perp, int max_exp) {
    std::vector<int> best((d - 1) / 2 + 1, -1);
    for (const Word& w : enumerate_words(max_perp, max_exp)) {
        if (w.leading_perp) continue;
        int m = phi(d, w);
        if (m > (d - 1) / 2) continue;
        if (best[m] < 0 || w.perps() < best[m]) best[m] = w.perps();
    }
    return best;
}

/// All multisets of odd breaks with sum (d+1)/2 <= budget.
void for_each_break_list(int budget, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int min_d, int left) {
        if (!cur.empty()) f(cur);
        for (int d = min_d; (d + 1) / 2 <= left; d += 2) {
            cur.push_back(d);
            rec(d, left - (d + 1) / 2);
            cur.pop_back();
        }
    };
    rec(1, budget);
}

}  // namespace

TEST_CASE("phi: worked examples and the leading complement rule", "[eotheory][phi]") {
    CHECK(phi(7, parse_word("V")) == 3);
    CHECK(phi(7, parse_word("V⊥V")) == 1);
    CHECK(phi(15, parse_word("⊥V^2")) == 11);
    CHECK(phi(1, parse_word("V^3")) == 0);
    CHECK_THROWS_AS(phi(7, Word{false, {}}), MalformedWord);
    CHECK_THROWS_AS(phi(7, Word{false, {0}}), MalformedWord);
    CHECK_THROWS_AS(phi(8, parse_word("V")), std::invalid_argument);
    for (int d = 1; d <= 33; d += 2)
        for (const Word& w : enumerate_words(3, 4)) {
            int p = phi(d, w);
            CHECK(p >= 0);
            CHECK(p <= d - 1);
            if (w.leading_perp) CHECK(p == d - 1 - phi(d, Word{false, w.exps}));
            CHECK(phi(d, prepend_V(w)) == p / 2);
        }
}

TEST_CASE("phi equals the word dimension on the local model module", "[eotheory][phi]") {
    for (int d = 3; d <= 25; d += 2)
        for (const Word& w : enumerate_words(3, 4)) CHECK(phi(d, w) == phi_by_module(d, w));
}

TEST_CASE("ordinary base: worked examples", "[eotheory][ordinary]") {
    auto p = predict_ordinary(ordinary_data(0, {9}));
    CHECK(p.closed_form.first_g() == std::vector<int>{0, 1, 1, 2});
    CHECK(p.description == "W_9");
    auto q = predict_ordinary(ordinary_data(0, {1, 1}));
    CHECK(q.closed_form.first_g() == std::vector<int>{1});
    // frozen from dieudonne.final_type on M_ord^2 + W_7
    auto r = predict_ordinary(ordinary_data(1, {7}));
    CHECK(r.description == "M_ord^2 ⊕ W_7");
    CHECK(r.synthesized.first_g() == std::vector<int>{1, 2, 2, 3, 3});
    CHECK_THROWS_AS(predict_ordinary(ss_elliptic({7})), HypothesisViolation);
}

TEST_CASE("ordinary base: closed form equals the synthesized module", "[eotheory][ordinary]") {
    int cases = 0;
    for (int g_X = 0; g_X <= 1; ++g_X)
        for_each_break_list(12, [&](const std::vector<int>& br) {
            RamificationData rd = ordinary_data(g_X, br);
            if (rd.g_Y() < 1 || rd.g_Y() > 12) return;
            const Field& K = Field::get(1);
            std::optional<DieudonneModule> M;
            if (rd.f_Y() > 0) M = modules::ordinary_power(K, rd.f_Y());
            for (int d : br)
                if (d > 1) M = M ? direct_sum(*M, modules::branch_module(K, d)) : modules::branch_module(K, d);
            CHECK(ordinary_closed_form(rd.f_Y(), br) == final_type(*M));
            ++cases;
        });
    CHECK(cases > 50);
}

TEST_CASE("ordinary base: word dimensions follow phi", "[eotheory][ordinary]") {
    for (auto br : std::vector<std::vector<int>>{{7}, {3, 5}, {1, 9}, {5, 5, 3}}) {
        RamificationData rd = ordinary_data(1, br);
        auto p = predict_ordinary(rd);
        for (const Word& w : enumerate_words(3, 4)) {
            int n = apply_word(p.module, w, p.module.full()).dim();
            CHECK(n == rd.f_Y() + phi_total(rd, w));
            CHECK(p.closed_form.nu[n] == rd.f_Y() + phi_total(rd, prepend_V(w)));
            auto b = (w.perps() >= 1 && !w.leading_perp) ? std::optional(bounds(rd, w)) : std::nullopt;
            if (b) {
                CHECK(b->L == b->phi);
                CHECK(b->U == b->phi);
            }
        }
    }
}

TEST_CASE("ordinary base: codimension of the one-point stratum", "[eotheory][codim]") {
    CHECK(codim_eo(final_type_from_first_g({1, 2, 3, 4})) == 0);
    CHECK(codim_eo(final_type_from_first_g({0, 1, 1, 2})) == 6);
    for (int g_X = 0; g_X <= 2; ++g_X)
        for (int d = 3; d <= 41; d += 2) {
            auto ft = ordinary_closed_form(ordinary_data(g_X, {d}).f_Y(), {d});
            int c = codim_eo(ft);
            int ceil_sum = 0;
            for (int i = 1; i <= (d - 1) / 2; ++i) ceil_sum += (i + 1) / 2;
            CHECK(c == ceil_sum);
            CHECK(16 * c >= (d - 1) * (d + 1));
        }
}

TEST_CASE("supersingular base: 2^n+1 pattern", "[eotheory][ss]") {
    CHECK(predict_2n1(3).first_g() == std::vector<int>{0, 1, 2});
    CHECK(predict_2n1(5).first_g() == std::vector<int>{0, 1, 2, 3});
    CHECK(predict_2n1(9).first_g() == std::vector<int>{0, 1, 2, 3, 3, 4});
    CHECK(predict_2n1(17).first_g() == std::vector<int>{0, 1, 2, 3, 3, 4, 4, 5, 5, 6});
    for (int n = 1; n <= 6; ++n) CHECK(predict_2n1((1 << n) + 1).genus() == ((1 << n) + 4) / 2);
    CHECK_THROWS_AS(predict_2n1(7), HypothesisViolation);
    CHECK_THROWS_AS(predict_2n1(15), HypothesisViolation);
}

TEST_CASE("supersingular base: V-types and strata", "[eotheory][ss]") {
    CHECK(admissible_mu(7) == std::vector<int>{3, 1});
    CHECK(predict_vtype_ss(7, 3) == std::vector<int>{5, 3, 2, 1, 0});
    CHECK(predict_vtype_ss(7, 1) == std::vector<int>{5, 3, 1, 0});
    CHECK_THROWS_AS(predict_vtype_ss(7, 2), HypothesisViolation);
    CHECK(codim_stratum_ss(7, 1) == 1);
    CHECK(codim_stratum_ss(7, 3) == 0);
    for (int d = 3; d <= 65; d += 2)
        for (int mu : admissible_mu(d)) {
            auto c = predict_vtype_ss(d, mu);
            CHECK(c[0] == (d + 3) / 2);
            CHECK(c.back() == 0);
            for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i] < c[i - 1]);
            CHECK(codim_stratum_ss(d, mu) >= 0);
        }
}

TEST_CASE("supersingular base: mu from the tail matches the measured V-type", "[eotheory][ss]") {
    for (const auto& t : {kBreak7a, kBreak7b, std::string("field auto\ny = x^3\nz = x^4*y + x^3\n"),
                          std::string("field auto\ny = x^3\nz = x^5*y + x*y + x\n")}) {
        TowerCurve Y = curve(t);
        SsTail s = mu_from_tail(Y);
        DeRhamSpace H(Y);
        const auto& M = H.module();
        CHECK(v_type(restrict_map(M.V, M.H0())) == predict_vtype_ss(s.d, s.mu));
    }
    CHECK(mu_from_tail(curve(kBreak7a)).mu != mu_from_tail(curve(kBreak7b)).mu);
}

TEST_CASE("ramification data from a tower", "[eotheory][data]") {
    RamificationData rd = ramification_data(curve(kBreak7a));
    CHECK(rd.g_X == 1);
    CHECK(rd.f_X == 0);
    CHECK(rd.breaks == std::vector<int>{7});
    CHECK(rd.a(1) == 1);
    CHECK(rd.g_Y() == 5);
    CHECK(rd.f_Y() == 0);
    RamificationData p1 = ramification_data(curve("field auto\ny = 1/x + 1/(x+1) + x^3\n"));
    CHECK(p1.l_X() == 0);
    CHECK(p1.breaks.size() == 3);
}

TEST_CASE("bounds: supersingular elliptic base, d = 15", "[eotheory][bounds]") {
    RamificationData rd = ss_elliptic({15});
    BoundsReport b = bounds(rd, parse_word("V⊥V"));
    CHECK(b.phi == 3);
    CHECK(b.t == 1);
    CHECK(b.L1 == 0);
    CHECK(b.L2 == 2);
    CHECK(b.L3 == 1);
    CHECK(b.L == 3);
    CHECK(b.U == 6);
    CHECK_THROWS_AS(bounds(rd, parse_word("V^2")), std::invalid_argument);
    CHECK_THROWS_AS(bounds(rd, parse_word("⊥V^2")), std::invalid_argument);
    rd.tango = 0;
    CHECK(bounds(rd, parse_word("V⊥V")).L1 == 1);
    for (int d = 3; d <= 31; d += 2)
        for (const Word& w : enumerate_words(3, 4)) {
            if (w.perps() < 1 || w.leading_perp) continue;
            BoundsReport r = bounds(ss_elliptic({d}), w);
            CHECK(r.L <= r.U);
        }
}

TEST_CASE("bounds contain the measured word dimensions and final types", "[eotheory][bounds]") {
    for (const auto& t : {kBreak7a, kBreak7b}) {
        TowerCurve Y = curve(t);
        RamificationData rd = ramification_data(Y);
        DeRhamSpace H(Y);
        const auto& M = H.module();
        FinalType ft = final_type(M);
        for (const Word& w : enumerate_words(3, 4)) {
            if (w.perps() < 1 || w.leading_perp) continue;
            BoundsReport b = bounds(rd, w);
            int n = apply_word(M, w, M.full()).dim() - rd.f_Y();
            CHECK(b.L <= n);
            CHECK(n <= b.U);
        }
        auto fb = final_type_bounds(rd);
        for (int l = 0; l <= rd.g_Y(); ++l) {
            CHECK(fb.tight[l].contains(ft.nu[l]));
            if (l >= 1) CHECK(one_point_bounds(rd, l).contains(ft.nu[l]));
        }
    }
}

TEST_CASE("one-point bounds: d = 15 over the supersingular elliptic curve", "[eotheory][bounds]") {
    RamificationData rd = ss_elliptic({15});
    for (int l = 2; l <= rd.g_Y(); ++l) CHECK(one_point_bounds(rd, l) == Interval{l / 2 - 4, l / 2 + 4});
    CHECK(one_point_bounds(rd, 1) == Interval{0, 0});
    for (auto first : {std::vector<int>{0, 1, 2, 2, 3, 4, 4, 4, 5}, std::vector<int>{0, 1, 2, 2, 3, 3, 3, 4, 5}}) {
        FinalType ft = final_type_from_first_g(first);
        auto fb = final_type_bounds(rd);
        for (int l = 1; l <= 9; ++l) {
            CHECK(one_point_bounds(rd, l).contains(ft.nu[l]));
            CHECK(fb.tight[l].contains(ft.nu[l]));
        }
    }
}

TEST_CASE("word_for_target: witnesses with few complements", "[eotheory][words]") {
    for (int d = 3; d <= 41; d += 2) {
        CHECK(word_for_target(d, (d - 1) / 2) == Word{false, {1}});
        auto best = min_perps_exhaustive(d, 4, 6);
        for (int m = 0; m <= (d - 1) / 2; ++m) {
            Word w = word_for_target(d, m);
            CHECK(phi(d, w) == m);
            CHECK(w.perps() == best[m]);
        }
    }
    for (int d = 3; d <= 201; d += 2) {
        const int bound = eo_detail::ceil_log2((d - 1) / 2);
        for (int m = 0; m <= (d - 1) / 2; ++m) CHECK(word_for_target(d, m).perps() <= bound);
    }
    CHECK_THROWS_AS(word_for_target(15, 8), std::invalid_argument);
}
