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

#include <cctype>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gf2m.hpp"
#include "tower.hpp"

namespace asdr {

/// Expression tree in x and earlier level variables; constants are field elements.
struct Expr {
    enum class Op { Const, Var, Add, Mul, Div, Pow } op = Op::Const;
    Elem value = 0;  ///< Const
    int var = 0;     ///< Var: 0 is x, i is z_i
    int exponent = 0;
    std::shared_ptr<Expr> a, b;

    static std::shared_ptr<Expr> make(Op o, std::shared_ptr<Expr> l = {}, std::shared_ptr<Expr> r = {}) {
        auto e = std::make_shared<Expr>();
        e->op = o;
        e->a = std::move(l);
        e->b = std::move(r);
        return e;
    }
};
using ExprPtr = std::shared_ptr<Expr>;

/// Parsed curve description; field-independent until instantiated.
struct CurveConfig {
    std::optional<int> m;  ///< nullopt for auto
    std::optional<std::uint64_t> modulus;
    std::vector<std::string> names;  ///< level variable names, z_1 first
    std::vector<ExprPtr> levels;
    std::vector<Elem> extra_bad;
    std::string source;

    int max_constant_bits() const;
};

namespace config_detail {

class ExprParser {
public:
    ExprParser(const std::string& s, const std::vector<std::string>& names, int line)
        : s_(s), names_(names), line_(line) {}

    ExprPtr parse() {
        ExprPtr e = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line_) + ": " + msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    ExprPtr sum() {
        ExprPtr e = product();
        for (;;) {
            if (eat('+') || eat('-'))
                e = Expr::make(Expr::Op::Add, e, product());
            else
                return e;
        }
    }
    ExprPtr product() {
        ExprPtr e = power();
        for (;;) {
            if (eat('*'))
                e = Expr::make(Expr::Op::Mul, e, power());
            else if (eat('/'))
                e = Expr::make(Expr::Op::Div, e, power());
            else
                return e;
        }
    }
    ExprPtr power() {
        ExprPtr e = atom();
        if (eat('^')) {
            skip();
            bool neg = eat('-');
            skip();
            std::size_t st = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (st == pos_) fail("exponent must be a decimal integer");
            ExprPtr p = Expr::make(Expr::Op::Pow, e);
            p->exponent = std::stoi(s_.substr(st, pos_ - st)) * (neg ? -1 : 1);
            return p;
        }
        return e;
    }
    ExprPtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        if (eat('(')) {
            ExprPtr e = sum();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t st = pos_;
            std::uint64_t v = 0;
            if (c == '0' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X')) {
                pos_ += 2;
                st = pos_;
                while (pos_ < s_.size() && std::isxdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                if (st == pos_) fail("empty hex constant");
                v = std::stoull(s_.substr(st, pos_ - st), nullptr, 16);
            } else {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                v = std::stoull(s_.substr(st, pos_ - st));
            }
            if (v > 0xffffffffULL) fail("constant too large");
            ExprPtr e = Expr::make(Expr::Op::Const);
            e->value = Elem(v);
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t st = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(st, pos_ - st);
            ExprPtr e = Expr::make(Expr::Op::Var);
            if (id == "x") {
                e->var = 0;
                return e;
            }
            for (std::size_t i = 0; i < names_.size(); ++i)
                if (names_[i] == id) {
                    e->var = int(i) + 1;
                    return e;
                }
            fail("unknown variable '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string s_;
    const std::vector<std::string>& names_;
    int line_;
    std::size_t pos_ = 0;
};

inline int max_bits(const ExprPtr& e) {
    if (!e) return 0;
    int b = std::max(max_bits(e->a), max_bits(e->b));
    if (e->op == Expr::Op::Const) b = std::max(b, e->value ? 32 - __builtin_clz(e->value) : 0);
    return b;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

}  // namespace config_detail

inline int CurveConfig::max_constant_bits() const {
    int b = 0;
    for (const auto& e : levels) b = std::max(b, config_detail::max_bits(e));
    for (Elem a : extra_bad) b = std::max(b, a ? 32 - __builtin_clz(a) : 0);
    return b;
}

/// Lines: "field auto|m", "modulus 0x..", "<name> = <expr>", "bad <const>"; '#' starts a comment.
inline CurveConfig parse_curve_config(const std::string& text) {
    CurveConfig cfg;
    cfg.source = text;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto h = raw.find('#'); h != std::string::npos) raw = raw.substr(0, h);
        std::string s = config_detail::trim(raw);
        if (s.empty()) continue;
        auto err = [&](const std::string& m) { throw ConfigError("line " + std::to_string(line) + ": " + m); };
        if (auto eq = s.find('='); eq != std::string::npos) {
            std::string name = config_detail::trim(s.substr(0, eq));
            if (name.rfind("level ", 0) == 0) name = config_detail::trim(name.substr(6));
            if (name.empty() || name == "x" || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
                err("bad level variable name '" + name + "'");
            for (char c : name)
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) err("bad level variable name '" + name + "'");
            for (const auto& n : cfg.names)
                if (n == name) err("level variable '" + name + "' defined twice");
            config_detail::ExprParser p(s.substr(eq + 1), cfg.names, line);
            cfg.levels.push_back(p.parse());
            cfg.names.push_back(name);
            continue;
        }
        std::istringstream ws(s);
        std::string key, val, extra;
        ws >> key >> val;
        if (ws >> extra) err("trailing text '" + extra + "'");
        if (val.empty()) err("missing value for '" + key + "'");
        auto number = [&](const std::string& v) -> std::uint64_t {
            try {
                std::size_t used = 0;
                std::uint64_t r = (v.rfind("0x", 0) == 0 || v.rfind("0X", 0) == 0) ? std::stoull(v.substr(2), &used, 16)
                                                                                   : std::stoull(v, &used, 10);
                if (used != v.size() - ((v.rfind("0x", 0) == 0 || v.rfind("0X", 0) == 0) ? 2 : 0)) throw std::invalid_argument(v);
                return r;
            } catch (const std::logic_error&) {
                err("bad number '" + v + "'");
            }
            return 0;
        };
        if (key == "field") {
            if (val == "auto")
                cfg.m.reset();
            else {
                std::uint64_t m = number(val);
                if (m < 1 || m > 32) err("field degree must be in 1..32");
                cfg.m = int(m);
            }
        } else if (key == "modulus") {
            cfg.modulus = number(val);
        } else if (key == "bad") {
            std::uint64_t a = number(val);
            if (a > 0xffffffffULL) err("bad x-value too large");
            cfg.extra_bad.push_back(Elem(a));
        } else {
            err("unknown directive '" + key + "'");
        }
    }
    if (cfg.levels.empty()) throw ConfigError("config defines no levels");
    if (cfg.modulus && !cfg.m) throw ConfigError("modulus given without a field degree");
    if (!cfg.m && cfg.max_constant_bits() > 1)
        throw ConfigError("field auto allows only the constants 0 and 1");
    return cfg;
}

inline CurveConfig load_curve_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_curve_config(ss.str());
}

namespace config_detail {

inline FunctionElement eval(const TowerAlgebra& T, const ExprPtr& e, const std::function<Elem(Elem)>& embed) {
    using Op = Expr::Op;
    switch (e->op) {
        case Op::Const: return T.constant(embed(e->value));
        case Op::Var: return e->var == 0 ? T.x() : T.z(e->var);
        case Op::Add: return T.add(eval(T, e->a, embed), eval(T, e->b, embed));
        case Op::Mul: return T.mul(eval(T, e->a, embed), eval(T, e->b, embed));
        case Op::Div: {
            FunctionElement d = eval(T, e->b, embed);
            if (d.is_zero()) throw ConfigError("division by zero in level expression");
            return T.mul(eval(T, e->a, embed), T.inv(d));
        }
        case Op::Pow: {
            FunctionElement b = eval(T, e->a, embed);
            if (e->exponent < 0 && b.is_zero()) throw ConfigError("negative power of zero");
            return T.pow(b, e->exponent);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace config_detail

/// Embedding of the config's own field into F (identity when equal).
inline std::function<Elem(Elem)> config_embedding(const CurveConfig& cfg, const Field& F) {
    if (!cfg.m) return [](Elem a) { return a; };
    FieldSpec own = cfg.modulus ? FieldSpec{*cfg.m, *cfg.modulus} : FieldSpec::canonical(*cfg.m);
    if (own == F.spec()) return [&F](Elem a) {
        if (!F.valid(a)) throw ConfigError("constant outside " + F.spec().str());
        return a;
    };
    if (F.m() % own.m != 0) throw std::invalid_argument("target field does not contain the config field");
    const Field& S = Field::get(own);
    Vec mc;
    for (int i = 0; i <= own.m; ++i) mc.push_back(Elem((own.modulus >> i) & 1));
    auto rs = poly::roots(F, Poly(mc));
    ensure(!rs.empty(), "config modulus has a root in the extension");
    const Elem beta = rs.front();
    Vec pw(own.m);
    pw[0] = 1;
    for (int i = 1; i < own.m; ++i) pw[i] = F.mul(pw[i - 1], beta);
    return [pw, &S](Elem a) {
        if (!S.valid(a)) throw ConfigError("constant outside " + S.spec().str());
        Elem r = 0;
        for (std::size_t i = 0; i < pw.size(); ++i)
            if ((a >> i) & 1) r ^= pw[i];
        return r;
    };
}

inline TowerCurve instantiate(const CurveConfig& cfg, const Field& F) {
    auto embed = config_embedding(cfg, F);
    std::vector<FunctionElement> psi;
    for (const auto& e : cfg.levels) {
        TowerAlgebra T(F, psi);
        psi.push_back(config_detail::eval(T, e, embed).lifted(int(psi.size())));
    }
    std::vector<Elem> bad;
    for (Elem a : cfg.extra_bad) bad.push_back(embed(a));
    return TowerCurve(F, psi, bad);
}

/// Smallest admissible field: m itself or its multiples (auto: 1, 2, ...), up to 32.
inline int minimal_field_degree(const CurveConfig& cfg, int start = 0) {
    const int base = cfg.m.value_or(1);
    for (int m = std::max(base, start); m <= 32; m += base) {
        if (m % base) continue;
        try {
            const Field& F = (cfg.m && m == *cfg.m && cfg.modulus) ? Field::get(FieldSpec{m, *cfg.modulus}) : Field::get(m);
            (void)instantiate(cfg, F);
            return m;
        } catch (const FieldTooSmall&) {
        }
    }
    throw FieldTooSmall("no field GF(2^m) with m <= 32 makes the bad locus split", 0);
}

/// Instantiate over the config's field; FieldTooSmall carries the minimal admissible m.
inline TowerCurve build_curve(const CurveConfig& cfg, std::optional<int> field_override = std::nullopt) {
    std::optional<int> m = field_override ? field_override : cfg.m;
    if (!m) m = minimal_field_degree(cfg);
    const Field& F = (cfg.m && *m == *cfg.m && cfg.modulus) ? Field::get(FieldSpec{*m, *cfg.modulus}) : Field::get(*m);
    try {
        return instantiate(cfg, F);
    } catch (const FieldTooSmall& e) {
        int sug = 0;
        try {
            sug = minimal_field_degree(cfg, *m + 1);
        } catch (const FieldTooSmall&) {
        }
        throw FieldTooSmall(std::string(e.what()) + (sug ? "; try --field " + std::to_string(sug) : ""), sug);
    }
}

}  // namespace asdr
