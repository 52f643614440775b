#include <cstdlib>
#include <iostream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <robba/duality.hpp>
#include <robba/io.hpp>
#include <robba/microloc.hpp>
#include <robba/rewriter.hpp>
#include <robba/sampling.hpp>

using namespace robba;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Config {
    std::string group = "heisenberg";
    int p = 3;
    int N = 8;
    std::string window = "-6,6";
    int A = 8;
    std::string thresh = "8";
    std::vector<std::string> rho;
    std::uint64_t seed = 1;
};

std::vector<int> parse_ints(const std::string& text, const std::string& flag) {
    std::vector<int> r;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            r.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(flag + ": '" + text + "' is not a comma-separated integer list");
        }
    }
    return r;
}

Rational parse_rational(const std::string& text, const std::string& flag) {
    try {
        return Rational::parse(text);
    } catch (const std::exception&) {
        throw UsageError(flag + ": '" + text + "' is not a rational a/b");
    }
}

TruncationPolicy make_policy(const Config& c) {
    TruncationPolicy pol;
    pol.p = c.p;
    pol.N = c.N;
    auto w = parse_ints(c.window, "--window");
    if (w.size() != 2) throw UsageError("--window: expected lo,hi");
    pol.mlo = w[0];
    pol.mhi = w[1];
    pol.A = c.A;
    pol.T = parse_rational(c.thresh, "--thresh");
    try {
        pol.validate();
    } catch (const std::exception& e) {
        throw UsageError(std::string("--p/--prec/--window/--cap/--thresh: ") + e.what());
    }
    return pol;
}

std::vector<RadiusExponent> make_radii(const Config& c) {
    std::vector<RadiusExponent> r;
    for (const auto& s : c.rho) {
        try {
            r.emplace_back(Rational::parse(s));
        } catch (const std::exception& e) {
            throw UsageError("--rho: '" + s + "' " + e.what());
        }
    }
    if (r.empty()) r.emplace_back(Rational(1, 2));
    return r;
}

GroupChart make_chart(const Config& c) {
    try {
        return chart_from_selector(c.group, c.p);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--group: ") + e.what());
    }
}

/// "b1^2*b2^-1", "1" or "2,-1,0".
Monomial parse_monomial(const std::string& text, int d, const std::string& flag) {
    Monomial a(d, 0);
    if (text == "1") return a;
    if (text.find('b') == std::string::npos) {
        auto v = parse_ints(text, flag);
        if (static_cast<int>(v.size()) != d) throw UsageError(flag + ": expected " + std::to_string(d) + " exponents");
        return Monomial(v.begin(), v.end());
    }
    std::stringstream ss(text);
    std::string f;
    while (std::getline(ss, f, '*')) {
        try {
            if (f.empty() || f[0] != 'b') throw std::invalid_argument(f);
            auto caret = f.find('^');
            int i = std::stoi(f.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
            int e = caret == std::string::npos ? 1 : std::stoi(f.substr(caret + 1));
            if (i < 1 || i > d) throw std::invalid_argument(f);
            a[i - 1] += e;
        } catch (const std::exception&) {
            throw UsageError(flag + ": cannot read '" + f + "' in '" + text + "'");
        }
    }
    return a;
}

/// "p^-2" or an exponent e, meaning p^-e.
NormValue parse_eps(const std::string& text) {
    if (text.rfind("p^", 0) == 0) return NormValue::from_exponent(-parse_rational(text.substr(2), "--eps"));
    return NormValue::from_exponent(parse_rational(text, "--eps"));
}

LaurentSeries load_series(const std::string& path, const TruncationPolicy& pol) {
    try {
        return series_from_json(read_json_file(path), pol);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

/// A series file, optionally {"s": [[...], ...], "a": series} for s^-1 a.
Fraction load_fraction(const std::string& path, const TruncationPolicy& pol) {
    json j = read_json_file(path);
    try {
        if (!j.contains("a")) return {{}, series_from_json(j, pol)};
        SWord s;
        for (const auto& g : j.value("s", json::array())) {
            auto v = g.get<std::vector<int>>();
            s.emplace_back(v.begin(), v.end());
        }
        return {s, series_from_json(j.at("a"), pol)};
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

json norm_json(const NormValue& n, const char* provenance) {
    json r{{"norm", n.str()}, {"provenance", provenance}};
    r["exponent"] = n.is_zero() ? json(nullptr) : json(n.exponent().str());
    return r;
}

json certified_json(const CertifiedNorm& n) {
    return {{"value", norm_json(n.value, "computed")},
            {"uncertainty", norm_json(n.uncertainty, "certified-upper-bound")},
            {"upper", norm_json(n.upper(), "certified-upper-bound")},
            {"certified", n.certified()}};
}

json padic_json(const PadicScalar& c) {
    json r{{"value", c.str()}, {"provenance", "computed"}};
    r["known_mod"] = c.is_exact_zero() ? json("exact") : json("p^" + std::to_string(c.absolute_precision()));
    return r;
}

json config_json(const Config& c, const TruncationPolicy& pol) {
    return {{"group", c.group}, {"p", pol.p}, {"prec", policy_to_json(pol)}, {"seed", c.seed}, {"rho", c.rho}};
}

void emit(const json& j) { std::cout << j.dump() << '\n'; }

std::vector<std::pair<LaurentSeries, LaurentSeries>> sample_pairs(Rng& rng, int d, const TruncationPolicy& pol,
                                                                  int n) {
    std::vector<std::pair<LaurentSeries, LaurentSeries>> r;
    for (int k = 0; k < n; ++k) {
        LaurentSeries x = random_series(rng, d, pol, {});
        LaurentSeries y = random_series(rng, d, pol, {});
        r.emplace_back(std::move(x), std::move(y));
    }
    return r;
}

/// The algebra with every configured norm and gamma-hat measured on samples.
NormedAlgebra make_algebra(const Multiplier& m, const std::vector<RadiusExponent>& radii, std::uint64_t seed,
                           int samples) {
    Rng rng(seed);
    auto pairs = sample_pairs(rng, m.dim(), m.policy(), samples);
    NormValue g = NormValue::zero();
    for (const auto& r : radii) g = max(g, qa_gamma_estimate(m, r, pairs).gamma_hat);
    if (g.is_zero()) g = NormValue::from_exponent(Rational(1));
    return NormedAlgebra(m, radii, g);
}

// ---- subcommands ----

int cmd_mul(const Config& c, const std::string& fx, const std::string& fy, bool trace) {
    TruncationPolicy pol = make_policy(c);
    Multiplier m(make_chart(c), pol);
    LaurentSeries x = load_series(fx, pol), y = load_series(fy, pol);
    emit({{"product", series_to_json(m.series_product(x, y))}});
    if (trace) {
        std::vector<PotentialRecord> rec;
        m.set_trace(&rec);
        for (const auto& [a, ca] : x.terms())
            for (const auto& [b, cb] : y.terms())
                m.expand_worklist(a, b, pol.T - Rational((ca * cb).valuation()));
        m.set_trace(nullptr);
        std::size_t bad = 0;
        for (const auto& r : rec) bad += !r.ok();
        emit({{"trace", {{"swaps", rec.size()}, {"potential_violations", bad}}}});
        if (bad) return 2;
    }
    return 0;
}

int cmd_oracle_mul(const Config& c, const std::string& fx, const std::string& fy) {
    TruncationPolicy pol = make_policy(c);
    LaurentSeries x = load_series(fx, pol), y = load_series(fy, pol);
    emit({{"product", series_to_json(mul_commutative(x, y))}});
    return 0;
}

int cmd_pair(const Config& c, const std::string& fx, const std::string& fy) {
    TruncationPolicy pol = make_policy(c);
    Multiplier m(make_chart(c), pol);
    LaurentSeries x = load_series(fx, pol), y = load_series(fy, pol);
    emit({{"pairing", padic_json(pairing(m, x, y))}, {"config", config_json(c, pol)}});
    return 0;
}

int cmd_dualbasis(const Config& c, const std::string& alpha_s, int target, int grid_cap, const std::string& grid_deg) {
    TruncationPolicy pol = make_policy(c);
    Multiplier m(make_chart(c), pol);
    Monomial alpha = parse_monomial(alpha_s, m.dim(), "--alpha");
    auto gd = parse_ints(grid_deg, "--grid-deg");
    if (gd.size() != 2) throw UsageError("--grid-deg: expected lo,hi");
    if (target < 1 || target > pol.N) throw UsageError("--defect-target: must lie in 1..N");
    if (!pol.representable(-alpha)) throw UsageError("--alpha: b^-alpha lies outside the window");
    PairingTable P(m, target);
    DualBasisElement f = dual_basis(P, alpha, monomial_grid(m.dim(), grid_cap, gd[0], gd[1]), target);
    json norms = json::array();
    bool equal = true;
    for (const auto& r : make_radii(c)) {
        NormValue nf = f.series.norm_rho(r);
        NormValue nb = NormValue::from_exponent(Rational(-degree(alpha)) * r.value());
        equal = equal && nf == nb;
        norms.push_back({{"rho", r.value().str()}, {"f", norm_json(nf, "computed")}, {"b^-alpha", norm_json(nb, "computed")}});
    }
    json skipped = json::array();
    for (const auto& g : f.skipped) skipped.push_back(std::vector<int>(g.begin(), g.end()));
    emit({{"alpha", std::vector<int>(alpha.begin(), alpha.end())},
          {"status", status_str(f.status)},
          {"defect", norm_json(NormValue::from_exponent(Rational(f.achieved)), "certified-upper-bound")},
          {"target", target},
          {"grid", f.grid.size()},
          {"skipped", skipped},
          {"corrections", f.corrections},
          {"norms", norms},
          {"series", series_to_json(f.series)}});
    return f.status == DualStatus::converged && equal ? 0 : 2;
}

int cmd_lattice(const Config& c, const std::string& f0, const std::string& fx) {
    TruncationPolicy pol = make_policy(c);
    emit({{"member", lattice_member(load_series(f0, pol), load_series(fx, pol))}});
    return 0;
}

GradedMonomial parse_graded(const std::string& text, int p, int d, const std::string& flag) {
    GradedMonomial u{p, 1, 0, Monomial(d, 0)};
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        u.alpha = parse_monomial(text, d, flag);
        return u;
    }
    auto second = text.find(':', colon + 1);
    if (second == std::string::npos) throw UsageError(flag + ": expected c:k:alpha or alpha");
    try {
        u.c = ((std::stoi(text.substr(0, colon)) % p) + p) % p;
        u.x0 = std::stoi(text.substr(colon + 1, second - colon - 1));
    } catch (const std::exception&) {
        throw UsageError(flag + ": cannot read '" + text + "'");
    }
    u.alpha = parse_monomial(text.substr(second + 1), d, flag);
    return u;
}

int cmd_gradedmul(const Config& c, int d, const std::string& us, const std::string& vs) {
    GradedMonomial u = parse_graded(us, c.p, d, "--u"), v = parse_graded(vs, c.p, d, "--v");
    emit({{"u", graded_str(u)}, {"v", graded_str(v)}, {"product", graded_str(graded_mul(u, v))}});
    return 0;
}

int cmd_unitdecomp(const Config& c, const std::string& xs, int D) {
    PadicScalar x;
    try {
        x = parse_padic(xs, c.p, max_precision(c.p));
    } catch (const std::exception& e) {
        throw UsageError(std::string("--x: ") + e.what());
    }
    UnitDecomposition r = unit_decompose(x, D, c.N);
    emit({{"m", r.m},
          {"unit", series_to_json(r.u)},
          {"sup_norm", norm_json(sup_norm(r.u), "computed")}});
    return sup_norm(r.u) == NormValue::one() ? 0 : 2;
}

int cmd_ore(const Config& c, const std::string& ss, const std::string& as, const std::string& eps_s, int samples) {
    TruncationPolicy pol = make_policy(c);
    Multiplier m(make_chart(c), pol);
    NormedAlgebra A = make_algebra(m, make_radii(c), c.seed, samples);
    SWord s{parse_monomial(ss, m.dim(), "--s")};
    for (int x : s[0])
        if (x < 0) throw UsageError("--s: elements of S have nonnegative exponents");
    LaurentSeries a = as.size() > 5 && as.substr(as.size() - 5) == ".json"
                          ? load_series(as, pol)
                          : LaurentSeries::monomial(m.dim(), pol, parse_monomial(as, m.dim(), "--a"),
                                                    PadicScalar::one(pol.p, pol.N));
    NormValue eps = parse_eps(eps_s);
    OreResult o = ore_approx(A, eps, s, a);
    json norms = json::array();
    for (std::size_t i = 0; i < A.norms(); ++i)
        norms.push_back({{"rho", A.radius(i).value().str()},
                         {"residual", certified_json(o.residual[i])},
                         {"target", norm_json(o.target[i], "computed")},
                         {"eps_achieved", norm_json(o.eps_achieved[i], "certified-upper-bound")},
                         {"sb", certified_json(o.sb_norm[i])},
                         {"at", norm_json(o.at_norm[i], "computed")}});
    bool ok = o.residual_ok() && (!(eps < NormValue::one()) || o.norms_equal());
    emit({{"ell", o.ell},
          {"t", sword_str(o.t)},
          {"status", status_str(o.status)},
          {"gamma_hat", norm_json(A.gamma(), "computed")},
          {"norms", norms},
          {"postconditions", ok},
          {"b", series_to_json(o.b)}});
    return ok ? 0 : 2;
}

int cmd_dupper(const Config& c, const std::string& fx, const std::string& fy, int budget, int samples) {
    TruncationPolicy pol = make_policy(c);
    Multiplier m(make_chart(c), pol);
    NormedAlgebra A = make_algebra(m, make_radii(c), c.seed, samples);
    DUpper d = d_upper(A, load_fraction(fx, pol), load_fraction(fy, pol), budget);
    json per = json::array();
    for (std::size_t i = 0; i < d.per_norm.size(); ++i)
        per.push_back({{"rho", A.radius(i).value().str()}, {"d", norm_json(d.per_norm[i], "certified-upper-bound")}});
    emit({{"bound", norm_json(d.bound, "certified-upper-bound")}, {"per_norm", per}, {"candidates", d.candidates}});
    return 0;
}

int cmd_qacheck(const Config& c, int samples) {
    TruncationPolicy pol = make_policy(c);
    Multiplier m(make_chart(c), pol);
    Rng rng(c.seed);
    auto pairs = sample_pairs(rng, m.dim(), pol, samples);
    int rc = 0;
    for (const auto& r : make_radii(c)) {
        try {
            QaEstimate q = qa_gamma_estimate(m, r, pairs);
            emit({{"rho", r.value().str()},
                  {"gamma_hat", norm_json(q.gamma_hat, "computed")},
                  {"gamma_bound", norm_json(q.certified_bound, "certified-upper-bound")},
                  {"evaluated", q.evaluated},
                  {"worst", q.worst}});
        } catch (const QuasiAbelianViolation& e) {
            emit({{"rho", r.value().str()}, {"violation", e.what()}});
            rc = 2;
        }
    }
    return rc;
}

int cmd_norm(const Config& c, const std::string& fx) {
    TruncationPolicy pol = make_policy(c);
    LaurentSeries x = load_series(fx, pol);
    for (const auto& r : make_radii(c)) {
        CertifiedNorm n = x.certified_norm(r.value());
        emit({{"rho", r.value().str()}, {"norm", certified_json(n)}});
    }
    return 0;
}

int cmd_commutator(const Config& c, int i, int j) {
    TruncationPolicy pol = make_policy(c);
    GroupChart chart = make_chart(c);
    if (!(1 <= j && j < i && i <= chart.dim())) throw UsageError("--i/--j: need 1 <= j < i <= d");
    emit({{"commutator", series_to_json(commutator_series(chart, i, j, pol))}});
    return 0;
}

// ---- selftest ----

struct Suite {
    int failed = 0;
    int run = 0;
    void report(const std::string& name, bool ok, json detail = json::object()) {
        ++run;
        failed += !ok;
        detail["check"] = name;
        detail["ok"] = ok;
        emit(detail);
    }
};

/// Same stored digits wherever both sides certify them.
bool agree_certified(const LaurentSeries& x, const LaurentSeries& y) {
    std::set<Monomial> keys;
    for (const auto& [a, _] : x.terms()) keys.insert(a);
    for (const auto& [a, _] : y.terms()) keys.insert(a);
    for (const auto& a : keys) {
        if (!x.policy().representable(a)) continue;
        PadicScalar u = x.certified_coefficient(a), v = y.certified_coefficient(a);
        int k = std::min(u.absolute_precision(), v.absolute_precision());
        if (!u.congruent(v, k)) return false;
    }
    return true;
}

int cmd_selftest(const Config& c, int samples) {
    TruncationPolicy pol = make_policy(c);
    GroupChart chart = make_chart(c);
    Multiplier m(chart, pol);
    const int d = m.dim(), p = pol.p;
    const RadiusExponent rref(pol.eref);
    Rng rng(c.seed);
    Suite s;
    emit({{"config", config_json(c, pol)}});

    try {
        chart.self_test(c.seed);
        s.report("chart-law", true);
    } catch (const std::exception& e) {
        s.report("chart-law", false, {{"error", e.what()}});
    }

    bool abelian = true;
    for (int k = 1; k <= d; ++k) abelian = abelian && m.central(k);
    if (abelian) {
        bool ok = true;
        for (const auto& [x, y] : sample_pairs(rng, d, pol, samples)) ok = ok && m.series_product(x, y) == mul_commutative(x, y);
        s.report("commutative-oracle", ok, {{"pairs", samples}});
    }

    {
        bool ok = true;
        for (int k = 0; k < samples; ++k) {
            std::vector<BigInt> x(d), y(d);
            for (auto& v : x) v = uniform_int(rng, 0, p * p);
            for (auto& v : y) v = uniform_int(rng, 0, p * p);
            LaurentSeries lhs = dirac_expand(chart, chart.law_int(x, y), pol);
            LaurentSeries rhs = m.series_product(dirac_expand(chart, x, pol), dirac_expand(chart, y, pol));
            ok = ok && agree_certified(lhs, rhs);
        }
        s.report("group-law", ok, {{"pairs", samples}});
    }

    {
        int bad = 0, uncertified = 0, total = 0;
        for (const auto& a : monomial_grid(d, 1, -2, 2))
            for (const auto& b : monomial_grid(d, 1, -2, 2)) {
                if (b == -a) continue;
                int S = degree(a) + degree(b);
                int need = std::max(S, 0) + (S == 0 ? 1 : 0);
                PadicScalar v = monomial_pairing(m, a, b, Rational(need + 1));
                ++total;
                if (!v.is_zero() && v.valuation() < need) ++bad;
                else if (v.absolute_precision() < need) ++uncertified;
            }
        s.report("pairing-bounds", bad == 0, {{"entries", total}, {"violations", bad}, {"uncertified", uncertified}});
    }

    {
        const int target = std::min(3, pol.N);
        Monomial alpha(d, 0);
        alpha[0] = 1;
        if (d >= 2) alpha[1] = 1;
        PairingTable P(m, target);
        DualBasisElement f = dual_basis(P, alpha, monomial_grid(d, 1, -2, 2), target);
        bool ok = f.status == DualStatus::converged;
        for (const auto& r : make_radii(c))
            ok = ok && f.series.norm_rho(r) == NormValue::from_exponent(Rational(-degree(alpha)) * r.value());
        s.report("dual-basis", ok, {{"alpha", monomial_str(alpha)}, {"defect_exponent", f.achieved}});
    }

    NormValue gamma = NormValue::zero();
    {
        auto pairs = sample_pairs(rng, d, pol, samples);
        bool ok = true;
        try {
            QaEstimate q = qa_gamma_estimate(m, rref, pairs);
            gamma = q.gamma_hat;
            ok = abelian ? q.gamma_hat.is_zero() : q.gamma_hat <= NormValue::from_exponent(Rational(1, 2));
            s.report("quasi-abelian", ok, {{"gamma_hat", norm_json(q.gamma_hat, "computed")}});
        } catch (const QuasiAbelianViolation& e) {
            s.report("quasi-abelian", false, {{"error", e.what()}});
        }
    }

    {
        bool ok = true;
        NormedAlgebra A(m, make_radii(c), gamma.is_zero() ? NormValue::from_exponent(Rational(1)) : gamma);
        for (int k = 0; k < std::max(1, samples / 4); ++k) {
            Monomial g(d, 0);
            g[uniform_int(rng, 0, d - 1)] = 1;
            SWord sw{g};
            LaurentSeries a = random_series(rng, d, pol, {1, 1, -2, 1, 0, 1});
            OreResult o = ore_approx(A, NormValue::from_exponent(Rational(1)), sw, a);
            ok = ok && o.residual_ok() && o.norms_equal();
        }
        s.report("ore-postconditions", ok);
    }

    {
        bool ok = true;
        for (const auto& [x, y] : sample_pairs(rng, d, pol, samples)) {
            LaurentSeries xy = m.series_product(x, y);
            for (const auto& r : make_radii(c)) {
                CertifiedNorm n = xy.certified_norm(r.value());
                if (n.certified()) ok = ok && n.value == x.norm_rho(r) * y.norm_rho(r);
            }
        }
        s.report("norm-multiplicativity", ok);
    }

    {
        bool ok = graded_mul({p, 1, 0, parse_monomial("b1*b2^-2", std::max(d, 2), "")},
                             {p, 1, 0, parse_monomial("b1^2", std::max(d, 2), "")})
                      .is_zero();
        s.report("graded-sign-rule", ok);
    }

    {
        const int D = std::min(pol.mhi, 4);
        UnitDecomposition r = unit_decompose(PadicScalar::from_int(p, 2 * p, max_precision(p)), D, pol.N);
        s.report("unit-decomposition", r.m == 1 && sup_norm(r.u) == NormValue::one());
    }

    emit({{"selftest", s.failed ? "fail" : "pass"}, {"checks", s.run}, {"failed", s.failed}});
    return s.failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robba: truncated generalized Robba rings of uniform pro-p groups"};
    app.require_subcommand(1);
    app.fallthrough();
    Config c;
    app.add_option("--group", c.group, "abelian:<d>, heisenberg or file:<law.json>");
    app.add_option("--p", c.p, "prime");
    app.add_option("--prec", c.N, "coefficient digits N");
    app.add_option("--window", c.window, "degree window lo,hi");
    app.add_option("--cap", c.A, "per-coordinate cap A");
    app.add_option("--thresh", c.thresh, "drop threshold T (rational)");
    app.add_option("--rho", c.rho, "radius p^(-a/b), repeatable")->take_all();
    app.add_option("--seed", c.seed, "random seed");

    std::string fx, fy, alpha = "1,1,0", u, v, xs, ss = "b1", as = "b2", eps = "p^-2", grid_deg = "-3,3";
    int target = 3, grid_cap = 2, budget = 8, samples = 100, dim = 3, degD = 6, ci = 2, cj = 1;
    bool trace = false;
    std::map<std::string, std::function<int()>> run;

    auto two_files = [&](CLI::App* sc) {
        sc->add_option("x", fx, "first series (JSON)")->required();
        sc->add_option("y", fy, "second series (JSON)")->required();
    };
    auto* mul = app.add_subcommand("mul", "noncommutative product");
    two_files(mul);
    mul->add_flag("--trace-potential", trace, "rerun with the worklist rewriter and check the potential");
    run["mul"] = [&] { return cmd_mul(c, fx, fy, trace); };
    auto* omul = app.add_subcommand("oracle-mul", "commutative product");
    two_files(omul);
    run["oracle-mul"] = [&] { return cmd_oracle_mul(c, fx, fy); };
    auto* pair = app.add_subcommand("pair", "constant-term pairing");
    two_files(pair);
    run["pair"] = [&] { return cmd_pair(c, fx, fy); };
    auto* db = app.add_subcommand("dualbasis", "dual basis element f^(alpha)");
    db->add_option("--alpha", alpha);
    db->add_option("--defect-target", target);
    db->add_option("--grid-cap", grid_cap);
    db->add_option("--grid-deg", grid_deg);
    run["dualbasis"] = [&] { return cmd_dualbasis(c, alpha, target, grid_cap, grid_deg); };
    auto* lat = app.add_subcommand("lattice", "membership in L_x0");
    lat->add_option("x0", fx)->required();
    lat->add_option("x", fy)->required();
    run["lattice"] = [&] { return cmd_lattice(c, fx, fy); };
    auto* gm = app.add_subcommand("gradedmul", "product in the graded ring");
    gm->add_option("--u", u, "c:k:alpha or alpha")->required();
    gm->add_option("--v", v, "c:k:alpha or alpha")->required();
    gm->add_option("--dim", dim);
    run["gradedmul"] = [&] { return cmd_gradedmul(c, dim, u, v); };
    auto* ud = app.add_subcommand("unitdecomp", "(1+Z)^x - 1 = ((1+Z)^(p^m) - 1) u");
    ud->add_option("--x", xs, "p-adic literal")->required();
    ud->add_option("--degree", degD);
    run["unitdecomp"] = [&] { return cmd_unitdecomp(c, xs, degD); };
    auto* ore = app.add_subcommand("ore", "approximate Ore pair");
    ore->add_option("--s", ss);
    ore->add_option("--a", as, "monomial or series file");
    ore->add_option("--eps", eps);
    ore->add_option("--samples", samples, "pairs used for gamma-hat");
    run["ore"] = [&] { return cmd_ore(c, ss, as, eps, samples); };
    auto* du = app.add_subcommand("dupper", "upper bound on the microlocal distance");
    two_files(du);
    du->add_option("--budget", budget);
    du->add_option("--samples", samples, "pairs used for gamma-hat");
    run["dupper"] = [&] { return cmd_dupper(c, fx, fy, budget, samples); };
    auto* qa = app.add_subcommand("qacheck", "empirical quasi-abelian constant");
    qa->add_option("--samples", samples);
    run["qacheck"] = [&] { return cmd_qacheck(c, samples); };
    auto* st = app.add_subcommand("selftest", "invariant suite");
    st->add_option("--samples", samples);
    run["selftest"] = [&] { return cmd_selftest(c, samples); };
    auto* nm = app.add_subcommand("norm", "norms of a series");
    nm->add_option("x", fx)->required();
    run["norm"] = [&] { return cmd_norm(c, fx); };
    auto* cm = app.add_subcommand("commutator", "b_i b_j - b_j b_i");
    cm->add_option("--i", ci);
    cm->add_option("--j", cj);
    run["commutator"] = [&] { return cmd_commutator(c, ci, cj); };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    if (samples < 1) {
        std::cerr << "--samples: must be positive\n";
        return 1;
    }
    try {
        return run.at(app.get_subcommands().front()->get_name())();
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return 1;
    } catch (const QuasiAbelianViolation& e) {
        std::cerr << "bound violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
