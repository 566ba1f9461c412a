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

// Command implementations of the asdr tool, callable in-process.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "asdr/curve_config.hpp"
#include "asdr/derham.hpp"
#include "asdr/dieudonne.hpp"
#include "asdr/eotheory.hpp"

namespace asdr::cli {

using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kMismatch = 1, kUsage = 2, kNumeric = 3 };

enum class Format { Human, Jsonl };

struct RunConfig {
    std::string config_path;
    std::string command;
    std::optional<int> field;
    std::optional<int> n;
    Format format = Format::Human;
    std::uint64_t seed = 1;
    std::string out_path;
    bool dump_module = false;
    bool quick = false;
    // verify/search
    std::string mode;
    std::optional<int> d;
    int count = 0;
    int threads = 0;
    int max_perp = 2;
    int max_exp = 3;
};

// ---------------------------------------------------------------- formatting helpers

inline std::string join(const std::vector<int>& v, const std::string& sep = ",") {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
    return s;
}

inline std::string hex(Elem a) {
    std::ostringstream os;
    os << "0x" << std::hex << a;
    return os.str();
}

inline std::string matrix_str(const Matrix& M) {
    std::ostringstream os;
    for (int i = 0; i < M.rows(); ++i) {
        os << "  [";
        for (int j = 0; j < M.cols(); ++j) os << (j ? " " : "") << std::hex << M(i, j) << std::dec;
        os << "]\n";
    }
    return os.str();
}

inline json matrix_json(const Matrix& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------- curve invariants

struct CurveReport {
    int field_m = 0;
    int genus = 0;
    int prank = 0;
    int local_rank = 0;
    int n = 0;
    std::vector<json> branches;  ///< {level, place, breaks}
    std::vector<int> a_numbers;
    std::vector<int> vtype;
    std::string kv;
    FinalType final_type;
    std::optional<DieudonneModule> module;
};

inline CurveReport analyze(const TowerCurve& C, std::optional<int> n, bool keep_module) {
    CurveReport r;
    r.field_m = C.field().m();
    r.genus = C.genus();
    r.prank = C.prank();
    r.local_rank = C.local_rank();
    for (const auto& q : C.top()) {
        bool ram = false;
        for (int b : q.breaks) ram = ram || b;
        if (ram) r.branches.push_back(json{{"place", q.index}, {"over", q.base.str()}, {"breaks", q.breaks}});
    }
    if (r.genus == 0) {
        r.final_type.nu = {0};
        return r;
    }
    DeRhamSpace H(C, n.value_or(0));
    r.n = H.n();
    const auto& M = H.module();
    SemilinearMap V0 = restrict_map(M.V, M.H0());
    r.a_numbers = higher_a_numbers(V0);
    r.vtype = v_type(V0);
    r.kv = kv_decomposition(V0).str();
    r.final_type = final_type(M);
    if (keep_module) r.module = M;
    return r;
}

inline json report_json(const CurveReport& r) {
    json j{{"field", r.field_m},
           {"genus", r.genus},
           {"prank", r.prank},
           {"local_rank", r.local_rank},
           {"n", r.n},
           {"branches", r.branches},
           {"a_numbers", r.a_numbers},
           {"vtype", r.vtype},
           {"kv", r.kv},
           {"final_type", r.final_type.first_g()}};
    if (r.module) j["module"] = {{"F", matrix_json(r.module->F.A)}, {"V", matrix_json(r.module->V.A)}, {"gram", matrix_json(r.module->gram)}};
    return j;
}

inline void print_report(std::ostream& os, const CurveReport& r) {
    os << "field       GF(2^" << r.field_m << ")\n";
    os << "genus       " << r.genus << "\n";
    os << "p-rank      " << r.prank << "\n";
    os << "local rank  " << r.local_rank << "\n";
    for (const auto& b : r.branches)
        os << "branch      place " << b["place"].get<int>() << " over " << b["over"].get<std::string>() << ", breaks "
           << join(b["breaks"].get<std::vector<int>>()) << "\n";
    if (r.genus == 0) return;
    os << "n           " << r.n << "\n";
    os << "a^r         " << join(r.a_numbers) << "\n";
    os << "V-type      " << v_type_str(r.vtype) << "\n";
    os << "k[V]        " << r.kv << "\n";
    os << "final type  " << r.final_type.str() << "\n";
    if (r.module) {
        os << "F\n" << matrix_str(r.module->F.A) << "V\n" << matrix_str(r.module->V.A) << "Gram\n" << matrix_str(r.module->gram);
    }
}

inline TowerCurve load_curve(const RunConfig& rc) {
    return build_curve(load_curve_config(rc.config_path), rc.field);
}

// ---------------------------------------------------------------- cover sampling

/// A double cover of a one-level base branched only at infinity, as a config text.
struct CoverSample {
    std::vector<Elem> coeffs;
    std::string psi;
    std::string config;
};

/// Samples psi = c x^((d-D)/2) y + sum c_a x^a y + sum c'_a x^a over the reduced parameters,
/// where D is the break of the base at infinity; only odd pole orders below d and x^a with odd a < D appear.
class CoverSampler {
public:
    CoverSampler(const CurveConfig& base, int d, int m) : base_(base), d_(d), m_(m) {
        if (base.levels.size() != 1) throw HypothesisViolation("search needs a one-level base curve");
        TowerCurve X = build_curve(base, m);
        const auto& bad = X.bad_points();
        if (bad.size() != 1 || !bad[0].inf) throw HypothesisViolation("search needs a base branched only at infinity");
        D_ = X.top()[0].breaks.back();
        if (d < D_ || d % 2 == 0) throw HypothesisViolation("d must be odd and at least the base break " + std::to_string(D_));
        y_ = base.names[0];
        z_ = y_ == "z" ? "w" : "z";
        terms_.push_back(mono((d - D_) / 2, true));
        for (int a = 0; 2 * a + D_ < d; ++a) terms_.push_back(mono(a, true));
        for (int a = 1; a < D_ && 2 * a < d; a += 2) terms_.push_back(mono(a, false));
    }

    int field() const { return m_; }
    int dimension() const { return int(terms_.size()); }

    CoverSample sample(std::uint64_t seed, std::uint64_t index) const {
        std::seed_seq ss{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index), std::uint32_t(index >> 32)};
        std::mt19937_64 g(ss);
        const std::uint64_t mask = m_ >= 32 ? 0xffffffffULL : ((std::uint64_t(1) << m_) - 1);
        CoverSample s;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            Elem c = Elem(g() & mask);
            while (i == 0 && c == 0) c = Elem(g() & mask);
            s.coeffs.push_back(c);
        }
        s.psi = expression(s.coeffs);
        s.config = config_text(s.psi);
        return s;
    }

    std::string expression(const std::vector<Elem>& coeffs) const {
        std::string e;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (!coeffs[i]) continue;
            e += (e.empty() ? "" : " + ") + (coeffs[i] == 1 ? "" : hex(coeffs[i]) + "*") + terms_[i];
        }
        return e;
    }

    std::string config_text(const std::string& psi) const {
        std::string t = "field " + std::to_string(m_) + "\n";
        if (base_.modulus && base_.m && *base_.m == m_) t += "modulus " + hex(Elem(*base_.modulus)) + "\n";
        std::istringstream in(base_.source);
        std::string line;
        while (std::getline(in, line)) {
            auto s = line.substr(0, line.find('#'));
            auto k = s.find_first_not_of(" \t");
            if (k == std::string::npos) continue;
            if (s.compare(k, 5, "field") == 0 || s.compare(k, 7, "modulus") == 0) continue;
            t += s.substr(k) + "\n";
        }
        return t + z_ + " = " + psi + "\n";
    }

private:
    std::string mono(int a, bool with_y) const {
        std::string s = a == 0 ? "" : (a == 1 ? "x" : "x^" + std::to_string(a));
        if (with_y) s += (s.empty() ? "" : "*") + y_;
        return s.empty() ? "1" : s;
    }

    CurveConfig base_;
    int d_, m_, D_ = 0;
    std::string y_, z_;
    std::vector<std::string> terms_;
};

struct SearchRecord {
    std::uint64_t index = 0;
    CoverSample sample;
    CurveReport report;
    std::string error;
};

/// Runs count samples over a thread pool; results come back in index order.
inline std::vector<SearchRecord> run_samples(const CoverSampler& S, std::uint64_t seed, int count, int threads,
                                             const std::function<void(SearchRecord&, const TowerCurve&)>& extra = {}) {
    std::vector<SearchRecord> out(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < count;) {
            SearchRecord& r = out[i];
            r.index = std::uint64_t(i);
            r.sample = S.sample(seed, r.index);
            try {
                TowerCurve Y = build_curve(parse_curve_config(r.sample.config));
                r.report = analyze(Y, std::nullopt, false);
                if (extra) extra(r, Y);
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
    };
    int nt = threads > 0 ? threads : int(std::max(1u, std::thread::hardware_concurrency()));
    nt = std::min(nt, std::max(count, 1));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

/// Distinct final types with counts, most frequent first (ties by type string).
inline std::vector<std::pair<std::string, int>> frequency_table(const std::vector<SearchRecord>& recs) {
    std::map<std::string, int> cnt;
    for (const auto& r : recs)
        if (r.error.empty()) ++cnt[r.report.final_type.str()];
    std::vector<std::pair<std::string, int>> v(cnt.begin(), cnt.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return v;
}

inline json record_json(const SearchRecord& r, std::uint64_t seed, int d) {
    json j{{"index", r.index}, {"seed", seed}, {"d", d}, {"coeffs", r.sample.coeffs}, {"psi", r.sample.psi},
           {"config", r.sample.config}};
    if (!r.error.empty()) {
        j["error"] = r.error;
        return j;
    }
    j["genus"] = r.report.genus;
    j["vtype"] = r.report.vtype;
    j["kv"] = r.report.kv;
    j["final_type"] = r.report.final_type.first_g();
    return j;
}

/// Smallest multiple of the config's field degree that is at least 4.
inline int default_search_field(const CurveConfig& base) {
    const int m = base.m.value_or(1);
    return (4 + m - 1) / m * m;
}

// ---------------------------------------------------------------- commands

inline int cmd_compute(const RunConfig& rc, std::ostream& os) {
    TowerCurve C = load_curve(rc);
    CurveReport r = analyze(C, rc.n, rc.dump_module);
    if (rc.format == Format::Jsonl)
        os << report_json(r).dump() << "\n";
    else
        print_report(os, r);
    return kOk;
}

inline void print_bounds_table(std::ostream& os, const RunConfig& rc, const RamificationData& rd) {
    std::vector<Word> words;
    for (const Word& w : enumerate_words(rc.max_perp, rc.max_exp))
        if (!w.leading_perp && w.perps() >= 1) words.push_back(w);
    if (rc.format == Format::Jsonl) {
        for (const Word& w : words) {
            auto b = bounds(rd, w);
            os << json{{"d", rd.breaks}, {"word", w.str()}, {"phi", b.phi}, {"L", b.L}, {"U", b.U}}.dump() << "\n";
        }
        return;
    }
    os << std::left << std::setw(14) << "word" << std::right << std::setw(5) << "phi" << std::setw(5) << "L1"
       << std::setw(5) << "L2" << std::setw(5) << "L3" << std::setw(5) << "L" << std::setw(5) << "U" << "\n";
    for (const Word& w : words) {
        auto b = bounds(rd, w);
        // setw counts bytes, and ⊥ is three bytes wide
        std::string ws = w.str();
        int width = 14 + 2 * w.perps();
        os << std::left << std::setw(width) << ws << std::right << std::setw(5) << b.phi << std::setw(5) << b.L1
           << std::setw(5) << b.L2 << std::setw(5) << b.L3 << std::setw(5) << b.L << std::setw(5) << b.U << "\n";
    }
}

inline bool is_ss_elliptic_one_point(const RamificationData& rd) { return rd.g_X == 1 && rd.f_X == 0 && rd.m() == 1; }

inline bool is_2n1(int d) { return d >= 3 && ((d - 1) & (d - 2)) == 0; }

inline int cmd_predict(const RunConfig& rc, std::ostream& os) {
    TowerCurve Y = load_curve(rc);
    RamificationData rd = ramification_data(Y);
    json j{{"g_X", rd.g_X}, {"f_X", rd.f_X}, {"l_X", rd.l_X()}, {"breaks", rd.breaks}, {"a_X", rd.a_X},
           {"g_Y", rd.g_Y()}, {"f_Y", rd.f_Y()}};
    if (rd.l_X() == 0) {
        auto p = predict_ordinary(rd);
        j["module"] = p.description;
        j["final_type"] = p.closed_form.first_g();
        j["codim_eo"] = codim_eo(p.closed_form);
    }
    if (is_ss_elliptic_one_point(rd) && rd.breaks[0] >= 3) {
        SsTail s = mu_from_tail(Y);
        j["mu"] = s.mu;
        j["admissible_mu"] = s.admissible;
        j["vtype"] = predict_vtype_ss(s.d, s.mu);
        j["codim_stratum"] = codim_stratum_ss(s.d, s.mu);
        if (is_2n1(s.d)) j["final_type"] = predict_2n1(s.d).first_g();
    }
    json iv = json::array();
    if (rd.l_X() > 0) {
        auto fb = final_type_bounds(rd);
        for (int l = 1; l <= rd.g_Y(); ++l) {
            json e{{"l", l}, {"raw", {fb.raw[l].lo, fb.raw[l].hi}}, {"tight", {fb.tight[l].lo, fb.tight[l].hi}}};
            if (rd.m() == 1) {
                auto ob = one_point_bounds(rd, l);
                e["one_point"] = {ob.lo, ob.hi};
            }
            iv.push_back(e);
        }
        j["intervals"] = iv;
    }
    if (rc.format == Format::Jsonl) {
        os << j.dump() << "\n";
        if (rd.l_X() > 0) print_bounds_table(os, rc, rd);
        return kOk;
    }
    os << "base        g_X=" << rd.g_X << " f_X=" << rd.f_X << " l_X=" << rd.l_X() << " a_X=" << join(rd.a_X) << "\n";
    os << "breaks      " << join(rd.breaks) << "\n";
    os << "cover       g_Y=" << rd.g_Y() << " f_Y=" << rd.f_Y() << "\n";
    if (j.contains("module")) os << "module      " << j["module"].get<std::string>() << "\n";
    if (j.contains("mu"))
        os << "mu          " << j["mu"].get<int>() << " (admissible " << join(j["admissible_mu"].get<std::vector<int>>())
           << ")\nV-type      " << v_type_str(j["vtype"].get<std::vector<int>>()) << "\ncodim       "
           << j["codim_stratum"].get<int>() << "\n";
    if (j.contains("final_type")) os << "final type  [" << join(j["final_type"].get<std::vector<int>>()) << "]\n";
    if (rd.l_X() > 0) {
        os << std::setw(4) << "l" << std::setw(12) << "raw" << std::setw(12) << "tight" << (rd.m() == 1 ? "   one-point" : "") << "\n";
        for (const auto& e : iv) {
            auto cell = [](const json& p) { return "[" + std::to_string(p[0].get<int>()) + "," + std::to_string(p[1].get<int>()) + "]"; };
            os << std::setw(4) << e["l"].get<int>() << std::setw(12) << cell(e["raw"]) << std::setw(12) << cell(e["tight"]);
            if (e.contains("one_point")) os << std::setw(12) << cell(e["one_point"]);
            os << "\n";
        }
        print_bounds_table(os, rc, rd);
    }
    return kOk;
}

struct VerifyOutcome {
    bool pass = true;
    std::vector<std::string> lines;
    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
    }
};

/// Verifies one cover against the mode's prediction; throws HypothesisViolation if the mode does not apply.
inline void verify_cover(const TowerCurve& Y, const std::string& mode, VerifyOutcome& out, const std::string& tag) {
    RamificationData rd = ramification_data(Y);
    CurveReport r = analyze(Y, std::nullopt, true);
    const DieudonneModule& M = *r.module;
    if (mode == "ordinary") {
        if (rd.l_X() != 0) throw HypothesisViolation("ordinary mode needs an ordinary base");
        auto p = predict_ordinary(rd);
        out.check(p.closed_form == r.final_type,
                  tag + "final type " + r.final_type.str() + " predicted " + p.closed_form.str());
    } else if (mode == "2n1") {
        if (!is_ss_elliptic_one_point(rd)) throw HypothesisViolation("2n1 mode needs a one-point cover of a supersingular elliptic curve");
        FinalType p = predict_2n1(rd.breaks[0]);
        out.check(p == r.final_type, tag + "final type " + r.final_type.str() + " predicted " + p.str());
    } else if (mode == "ss-vtype") {
        if (!is_ss_elliptic_one_point(rd)) throw HypothesisViolation("ss-vtype mode needs a one-point cover of a supersingular elliptic curve");
        SsTail s = mu_from_tail(Y);
        auto p = predict_vtype_ss(s.d, s.mu);
        out.check(p == r.vtype, tag + "V-type " + v_type_str(r.vtype) + " predicted " + v_type_str(p) + " (mu " +
                                    std::to_string(s.mu) + ")");
    } else if (mode == "bounds") {
        int bad = 0, total = 0;
        for (const Word& w : enumerate_words(3, 4)) {
            if (w.leading_perp || w.perps() < 1) continue;
            auto b = bounds(rd, w);
            int n = apply_word(M, w, M.full()).dim() - rd.f_Y();
            ++total;
            if (n < b.L || n > b.U) ++bad;
        }
        out.check(bad == 0, tag + "word dimensions inside [L, U]: " + std::to_string(total - bad) + "/" + std::to_string(total));
        auto fb = final_type_bounds(rd);
        int outside = 0;
        for (int l = 1; l <= rd.g_Y(); ++l) {
            if (!fb.tight[l].contains(r.final_type.nu[l])) ++outside;
            if (rd.m() == 1 && !one_point_bounds(rd, l).contains(r.final_type.nu[l])) ++outside;
        }
        out.check(outside == 0, tag + "final type " + r.final_type.str() + " inside the final-type intervals");
    } else {
        throw std::invalid_argument("unknown verify mode '" + mode + "'");
    }
}

inline int cmd_verify(const RunConfig& rc, std::ostream& os) {
    VerifyOutcome out;
    if (rc.count > 0) {
        if (!rc.d) throw std::invalid_argument("--count needs --d");
        CurveConfig base = load_curve_config(rc.config_path);
        CoverSampler S(base, *rc.d, rc.field.value_or(default_search_field(base)));
        std::vector<VerifyOutcome> per(rc.count);
        auto recs = run_samples(S, rc.seed, rc.count, rc.threads, [&](SearchRecord& r, const TowerCurve& Y) {
            verify_cover(Y, rc.mode, per[r.index], "#" + std::to_string(r.index) + " ");
        });
        std::vector<std::string> types;
        for (const auto& r : recs) {
            // a failed hypothesis check or pipeline error on any sample is reported as such
            if (!r.error.empty()) throw HypothesisViolation("sample " + std::to_string(r.index) + ": " + r.error);
            for (const auto& l : per[r.index].lines) out.lines.push_back(l);
            out.pass = out.pass && per[r.index].pass;
            types.push_back(r.report.final_type.str());
        }
        if (rc.mode == "2n1") {
            bool same = std::all_of(types.begin(), types.end(), [&](const std::string& t) { return t == types.front(); });
            out.check(same, "all samples share one final type");
        }
    } else {
        verify_cover(load_curve(rc), rc.mode, out, "");
    }
    if (rc.format == Format::Jsonl) {
        os << json{{"mode", rc.mode}, {"pass", out.pass}, {"checks", out.lines}, {"seed", rc.seed}}.dump() << "\n";
    } else {
        for (const auto& l : out.lines) os << l << "\n";
        os << (out.pass ? "PASS" : "FAIL") << "\n";
    }
    return out.pass ? kOk : kMismatch;
}

inline int cmd_search(const RunConfig& rc, std::ostream& os) {
    if (!rc.d) throw std::invalid_argument("search needs --d");
    if (rc.count < 1) throw std::invalid_argument("search needs --count >= 1");
    CurveConfig base = load_curve_config(rc.config_path);
    CoverSampler S(base, *rc.d, rc.field.value_or(default_search_field(base)));
    auto recs = run_samples(S, rc.seed, rc.count, rc.threads);
    auto table = frequency_table(recs);
    if (rc.format == Format::Jsonl) {
        for (const auto& r : recs) os << record_json(r, rc.seed, *rc.d).dump() << "\n";
        json summary = json::array();
        for (const auto& [t, c] : table) summary.push_back({{"final_type", t}, {"count", c}});
        os << json{{"summary", summary}, {"seed", rc.seed}, {"count", rc.count}, {"field", S.field()}}.dump() << "\n";
        return kOk;
    }
    os << "search  d=" << *rc.d << " count=" << rc.count << " seed=" << rc.seed << " field=GF(2^" << S.field() << ")\n";
    int errors = 0;
    for (const auto& r : recs) errors += !r.error.empty();
    if (errors) os << "errors  " << errors << "\n";
    std::size_t w = 10;
    for (const auto& [t, c] : table) w = std::max(w, t.size());
    os << std::left << std::setw(int(w) + 2) << "final type" << std::right << std::setw(7) << "count" << "\n";
    for (const auto& [t, c] : table) os << std::left << std::setw(int(w) + 2) << t << std::right << std::setw(7) << c << "\n";
    return kOk;
}

// ---------------------------------------------------------------- selftest

struct SelfTest {
    std::string name;
    bool quick;
    std::function<void()> run;  ///< throws on failure
};

inline void expect(bool ok, const std::string& what) {
    if (!ok) throw std::logic_error(what);
}

inline std::vector<SelfTest> selftests() {
    auto ft_of = [](const std::string& text) {
        return final_type(DeRhamSpace(build_curve(parse_curve_config(text))).module()).first_g();
    };
    std::vector<SelfTest> t;
    t.push_back({"modulus table irreducible", true, [] {
                     for (int m = 1; m <= 32; ++m) expect(gf2x::irreducible(FieldSpec::canonical(m).modulus), "GF(2^" + std::to_string(m) + ")");
                 }});
    t.push_back({"field axioms on GF(2^8)", true, [] {
                     const Field& F = Field::get(8);
                     for (Elem a = 1; a < 256; ++a) expect(F.mul(a, F.inv(a)) == 1, "inverse");
                 }});
    t.push_back({"supersingular elliptic curve is supersingular", true, [ft_of] {
                     expect(ft_of("field auto\ny = x^3\n") == std::vector<int>{0}, "final type [0]");
                 }});
    t.push_back({"break-7 covers of the supersingular curve", true, [ft_of] {
                     expect(ft_of("field auto\ny = x^3\nz = x^2*y\n") == std::vector<int>{0, 1, 1, 2, 3}, "x^2 y");
                     expect(ft_of("field auto\ny = x^3\nz = (x^2+x+1)*y\n") == std::vector<int>{0, 1, 2, 2, 3}, "(x^2+x+1) y");
                 }});
    t.push_back({"Dieudonne identities on a genus-5 cover", true, [] {
                     DeRhamSpace H(build_curve(parse_curve_config("field auto\ny = x^3\nz = x^2*y\n")));
                     H.module().check();
                 }});
    t.push_back({"phi examples", true, [] {
                     expect(phi(7, parse_word("V")) == 3 && phi(7, parse_word("V⊥V")) == 1 && phi(15, parse_word("⊥V^2")) == 11, "phi");
                 }});
    t.push_back({"ordinary closed form", true, [] {
                     for (int d = 3; d <= 21; d += 2) {
                         RamificationData rd;
                         rd.breaks = {d};
                         predict_ordinary(rd);
                     }
                 }});
    t.push_back({"word witnesses", true, [] {
                     for (int d = 3; d <= 101; d += 2)
                         for (int m = 0; m <= (d - 1) / 2; ++m)
                             expect(word_for_target(d, m).perps() <= eo_detail::ceil_log2((d - 1) / 2), "d=" + std::to_string(d));
                 }});
    t.push_back({"genus-9 cover of the genus-3 curve", false, [ft_of] {
                     expect(ft_of("field auto\ny = x^7+x\nz = y\n") == std::vector<int>{0, 1, 1, 2, 2, 3, 4, 4, 5}, "z^2+z=y");
                 }});
    t.push_back({"2^n+1 pattern at d=9", false, [ft_of] {
                     expect(ft_of("field auto\ny = x^3\nz = x^3*y\n") == predict_2n1(9).first_g(), "x^3 y");
                 }});
    return t;
}

inline int cmd_selftest(const RunConfig& rc, std::ostream& os) {
    bool ok = true;
    for (const auto& t : selftests()) {
        if (rc.quick && !t.quick) continue;
        auto t0 = std::chrono::steady_clock::now();
        std::string err;
        try {
            t.run();
        } catch (const std::exception& e) {
            err = e.what();
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ok = ok && err.empty();
        os << (err.empty() ? "ok    " : "FAIL  ") << t.name;
        if (!err.empty()) os << ": " << err;
        os << std::fixed << std::setprecision(2) << " (" << s << " s)\n";
    }
    os << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kOk : kMismatch;
}

/// Maps exceptions to exit codes around a command.
inline int run_command(const RunConfig& rc, std::ostream& os, std::ostream& err) {
    try {
        if (rc.command == "compute") return cmd_compute(rc, os);
        if (rc.command == "predict") return cmd_predict(rc, os);
        if (rc.command == "verify") return cmd_verify(rc, os);
        if (rc.command == "search") return cmd_search(rc, os);
        if (rc.command == "selftest") return cmd_selftest(rc, os);
        err << "error: unknown command '" << rc.command << "'\n";
        return kUsage;
    } catch (const FieldTooSmall& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const PrecisionExhausted& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violated: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace asdr::cli
