#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "group.hpp"
#include "laurent.hpp"

namespace robba {

using json = nlohmann::json;

inline Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw std::invalid_argument("expected an integer or a string \"a/b\"");
}

inline json rational_to_json(const Rational& r) {
    if (r.den() == 1) return r.num();
    return r.str();
}

inline json policy_to_json(const TruncationPolicy& pol) {
    return {{"N", pol.N}, {"mlo", pol.mlo}, {"mhi", pol.mhi}, {"A", pol.A}, {"T", rational_to_json(pol.T)},
            {"eref", rational_to_json(pol.eref)}};
}

/// Fields present in j override base.
inline TruncationPolicy policy_from_json(const json& j, TruncationPolicy base) {
    if (j.contains("N")) base.N = j.at("N").get<int>();
    if (j.contains("mlo")) base.mlo = j.at("mlo").get<int>();
    if (j.contains("mhi")) base.mhi = j.at("mhi").get<int>();
    if (j.contains("A")) base.A = j.at("A").get<int>();
    if (j.contains("T")) base.T = rational_from_json(j.at("T"));
    if (j.contains("eref")) base.eref = rational_from_json(j.at("eref"));
    return base;
}

inline json ledger_to_json(const ErrorLedger& led) {
    auto prof = [](const DegreeProfile& p) {
        json a = json::array();
        for (auto [m, v] : p) a.push_back({m, v});
        return a;
    };
    return {{"inside", prof(led.inside())}, {"outside", prof(led.outside())}};
}

inline ErrorLedger ledger_from_json(const json& j) {
    ErrorLedger led;
    if (j.contains("inside"))
        for (const auto& e : j.at("inside")) led.add_inside(e.at(0).get<int>(), e.at(1).get<int>());
    if (j.contains("outside"))
        for (const auto& e : j.at("outside")) led.add_outside(e.at(0).get<int>(), e.at(1).get<int>());
    return led;
}

/// {"d":3,"terms":[{"alpha":[2,-1,0],"val":1,"unit":3}],"prec":{...}}; terms
/// may carry "digits" (relative precision, default N).
inline LaurentSeries series_from_json(const json& j, const TruncationPolicy& base) {
    const int d = j.at("d").get<int>();
    if (d < 1) throw std::invalid_argument("series dimension must be positive");
    TruncationPolicy pol = j.contains("prec") ? policy_from_json(j.at("prec"), base) : base;
    if (j.contains("p") && j.at("p").get<int>() != pol.p)
        throw std::invalid_argument("series file is over p = " + std::to_string(j.at("p").get<int>()));
    pol.validate();
    LaurentSeries::TermMap raw;
    for (const auto& t : j.at("terms")) {
        auto v = t.at("alpha").get<std::vector<int>>();
        if (static_cast<int>(v.size()) != d) throw std::invalid_argument("term exponent of wrong length");
        Monomial a(v.begin(), v.end());
        int digits = t.contains("digits") ? t.at("digits").get<int>() : pol.N;
        BigInt u(t.at("unit").is_string() ? t.at("unit").get<std::string>() : std::to_string(t.at("unit").get<std::int64_t>()));
        PadicScalar c = PadicScalar::from_int(pol.p, u, digits);
        if (c.is_zero()) throw std::invalid_argument("term with zero unit at " + monomial_str(a));
        if (c.valuation() != 0) throw std::invalid_argument("unit divisible by p at " + monomial_str(a));
        c = c * PadicScalar::make(pol.p, t.at("val").get<int>(), digits, 1);
        if (!raw.emplace(a, c).second) throw std::invalid_argument("repeated exponent " + monomial_str(a));
    }
    ErrorLedger led = j.contains("ledger") ? ledger_from_json(j.at("ledger")) : ErrorLedger{};
    return LaurentSeries::from_terms(d, pol, raw, led);
}

inline json series_to_json(const LaurentSeries& x) {
    json terms = json::array();
    for (const auto& [a, c] : x.ordered_terms())
        terms.push_back({{"alpha", std::vector<int>(a.begin(), a.end())},
                         {"val", c.valuation()},
                         {"unit", c.unit()},
                         {"digits", c.relative_precision()}});
    return {{"d", x.dim()}, {"p", x.p()}, {"terms", terms}, {"prec", policy_to_json(x.policy())},
            {"ledger", ledger_to_json(x.ledger())}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

/// {"name":..., "p":5, "dim":3, "coords":[[{"c":1,"pexp":0,"x":[1,0,0],"y":[0,0,0]}, ...], ...]}
inline GroupChart chart_from_json(const json& j, int p) {
    const int d = j.at("dim").get<int>();
    if (j.contains("p") && j.at("p").get<int>() != p)
        throw ChartError("law file is for p = " + std::to_string(j.at("p").get<int>()));
    PolynomialLaw law{d, {}};
    for (const auto& poly : j.at("coords")) {
        std::vector<LawTerm> terms;
        for (const auto& t : poly)
            terms.push_back(law_term(d, t.at("c").get<std::int64_t>(), t.value("pexp", 0),
                                     t.value("x", std::vector<int>{}), t.value("y", std::vector<int>{})));
        law.coords.push_back(std::move(terms));
    }
    GroupChart chart(j.value("name", std::string("custom")), p, std::move(law));
    chart.self_test();
    return chart;
}

/// "abelian:<d>", "heisenberg" or a law file "file:<path>".
inline GroupChart chart_from_selector(const std::string& sel, int p) {
    if (sel == "heisenberg") return heisenberg_chart(p);
    if (sel.rfind("abelian:", 0) == 0) {
        int d = 0;
        try {
            d = std::stoi(sel.substr(8));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad group selector '" + sel + "'");
        }
        if (d < 1) throw std::invalid_argument("abelian group needs d >= 1");
        return abelian_chart(d, p);
    }
    if (sel.rfind("file:", 0) == 0) return chart_from_json(read_json_file(sel.substr(5)), p);
    throw std::invalid_argument("unknown group '" + sel + "' (use abelian:<d>, heisenberg or file:<path>)");
}

}  // namespace robba
