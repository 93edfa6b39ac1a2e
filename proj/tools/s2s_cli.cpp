#include "run_config.hpp"
#include "verify.hpp"

#include "s2s/arith.hpp"
#include "s2s/correlation.hpp"
#include "s2s/params.hpp"
#include "s2s/report.hpp"
#include "s2s/rho.hpp"
#include "s2s/sieve.hpp"
#include "s2s/singular.hpp"
#include "s2s/tuples.hpp"
#include "s2s/two_squares.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <regex>
#include <set>

namespace s2s {
namespace {

struct OptSpec {
    const char* name;
    const char* def;  // "" means no default
    const char* help;
    bool flag = false;
};

const std::vector<OptSpec> kSieveOpts = {
    {"x", "1e6", "range end x"},
    {"q", "1", "modulus q"},
    {"a1", "1", "a~1 (reduced class mod q)"},
    {"a2", "1", "a~2 (reduced class mod q)"},
    {"theta1", "0.02", "v = x^theta1"},
    {"theta2", "0.03", "R = x^(theta2/2)"},
    {"eta", "1", "D0 = eta sqrt(log x)"},
    {"xi", "0.01", "S(xi) threshold"},
    {"M", "1", "number of bins"},
    {"M1", "1", "bins built on a~1"},
    {"k", "1", "forms per bin"},
    {"allow-general-q", "", "admit even or non-squarefree q", true},
    {"exploratory", "", "drop the theta/xi theorem constraints", true},
};

struct CommandSpec {
    std::string name;
    std::string help;
    std::vector<OptSpec> opts;
};

std::vector<OptSpec> with_sieve(std::vector<OptSpec> extra) {
    std::vector<OptSpec> v = kSieveOpts;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
}

const std::vector<CommandSpec>& commands() {
    static const std::vector<CommandSpec> c = {
        {"count", "N(x; q, a) for one class pattern",
         {{"x", "1e6", "range end"}, {"q", "1", "modulus"}, {"pattern", "", "comma-separated classes mod q"},
          {"allow-general-q", "", "admit even or non-squarefree q", true}}},
        {"distribution", "counts for every class pattern of length M",
         {{"x", "1e6", "range end"}, {"q", "1", "modulus"}, {"M", "2", "pattern length"},
          {"allow-general-q", "", "admit even or non-squarefree q", true}}},
        {"enumerate", "members of E in [lo, x]",
         {{"lo", "1", "range start"}, {"x", "1e6", "range end (inclusive)"},
          {"method", "both", "lattice, factorization or both"}, {"list", "", "include the members", true}}},
        {"constants", "A and V by truncated Euler products", {{"cutoff", "1e6", "prime cutoff"}}},
        {"functionals", "L_K, L_K;m, L_K;m1,m2 by quadrature",
         {{"K", "1", "dimension"}, {"tol", "1e-10", "quadrature tolerance"}}},
        {"weights", "Selberg weight table over D_K", with_sieve({{"max-pool", "3", "pool truncation"}})},
        {"rho", "r2(n), t(n), rho(n)",
         {{"n", "", "argument"}, {"x", "1e6", "x for v = x^theta1"}, {"theta1", "0.05", "v exponent"},
          {"v", "0", "explicit v (overrides x, theta1)"}}},
        {"xz-sums", "X(v; Q), Z1, Z2 against their main terms",
         {{"v", "1e4", "cut v"}, {"Q", "1", "modulus Q"}, {"skip-z", "", "only X", true}}},
        {"corr", "direct correlation sums",
         {{"kind", "ap", "ap, pair, second-moment, gamma or hooley"},
          {"x", "1e6", "range end"},
          {"r", "1", "modulus r"},
          {"alpha", "1", "class alpha mod r"},
          {"d", "1", "divisor d"},
          {"h", "4", "shift h"},
          {"c1", "1", "c1"},
          {"c2", "1", "c2"},
          {"q1", "1", "q1 (hooley)"},
          {"truncation", "100000", "t-sum truncation"}}},
        {"s-sums", "empirical S1..S6 against predictions",
         with_sieve({{"b", "", "comma-separated b_i (b_1 = 3)"},
                     {"max-pool", "3", "pool truncation"},
                     {"m", "0", "form index for S2/S4/S5"},
                     {"m1", "0", "first form for S3"},
                     {"m2", "1", "second form for S3"},
                     {"shift-b", "0", "b in q n + b for S6 (0 = auto)"},
                     {"max-terms", "5e7", "loop budget"}})},
        {"gallagher", "average of the singular-series ratio over the b-grid",
         with_sieve({{"sample-limit", "20000", "grid points before sampling"},
                     {"a-table", "", "emit the A(r) table instead", true},
                     {"K", "2", "K for the A(r) table"},
                     {"r", "5,7,11,35", "r values for the A(r) table"},
                     {"convention", "free", "free, anchored or literal"}})},
        {"admissible", "count of nu0-admissible tuples against its prediction",
         with_sieve({{"sample-limit", "20000", "grid points before sampling"}})},
        {"verify", "invariant suites",
         {{"suite", "all", "arith, two-squares, rho, weights, correlations, singular or all"},
          {"quick", "", "reduced sizes", true},
          {"inject-fault", "", "corrupt a table (weights)"}}},
    };
    return c;
}

const CommandSpec* find_command(const std::string& name) {
    for (auto& c : commands())
        if (c.name == name) return &c;
    return nullptr;
}

// ---- numeric parsing ----

// Exact integer from decimal or scientific notation; "1.5e3" -> 1500, "1.5" fails.
uint64_t parse_u64(const std::string& key, const std::string& s) {
    static const std::regex re(R"(^\+?([0-9]+)(?:\.([0-9]*))?(?:[eE]\+?([0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw ValidationError("--" + key + ": not a non-negative integer: '" + s + "'");
    std::string digits = m[1].str() + m[2].str();
    long exp10 = m[3].matched ? std::stol(m[3].str()) : 0;
    exp10 -= static_cast<long>(m[2].str().size());
    if (exp10 > 40) throw ValidationError("--" + key + ": out of range: '" + s + "'");
    BigInt v(digits.empty() ? "0" : digits);
    if (exp10 >= 0) {
        BigInt p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exp10));
        v *= p;
    } else {
        BigInt p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(-exp10));
        if (v % p != 0) throw ValidationError("--" + key + ": not an integer: '" + s + "'");
        v /= p;
    }
    if (v > BigInt(std::to_string(UINT64_MAX))) throw ValidationError("--" + key + ": out of range: '" + s + "'");
    return std::stoull(v.get_str());
}

int64_t parse_i64(const std::string& key, const std::string& s) {
    if (!s.empty() && s[0] == '-') {
        uint64_t v = parse_u64(key, s.substr(1));
        if (v > static_cast<uint64_t>(INT64_MAX)) throw ValidationError("--" + key + ": out of range");
        return -static_cast<int64_t>(v);
    }
    uint64_t v = parse_u64(key, s);
    if (v > static_cast<uint64_t>(INT64_MAX)) throw ValidationError("--" + key + ": out of range");
    return static_cast<int64_t>(v);
}

double parse_real(const std::string& key, const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw ValidationError("--" + key + ": not a finite number: '" + s + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

class Params {
public:
    Params(const CommandSpec& spec, const RunConfig& cfg) : spec_(spec), cfg_(cfg) {
        for (auto& [k, v] : cfg.parameters) {
            bool known = false;
            for (auto& o : spec.opts) known |= (k == o.name);
            if (!known) throw ValidationError("unknown parameter '" + k + "' for " + spec.name);
        }
    }

    bool has(const std::string& key) const {
        auto it = cfg_.parameters.find(key);
        return it != cfg_.parameters.end() && !it->second.empty();
    }
    std::string str(const std::string& key) const {
        auto it = cfg_.parameters.find(key);
        if (it != cfg_.parameters.end()) return it->second;
        for (auto& o : spec_.opts)
            if (key == o.name) return o.def;
        throw std::logic_error("undeclared parameter " + key);
    }
    std::string required(const std::string& key) const {
        std::string s = str(key);
        if (s.empty()) throw ValidationError("--" + key + " is required for " + spec_.name);
        return s;
    }
    uint64_t u64(const std::string& key) const { return parse_u64(key, required(key)); }
    unsigned u32(const std::string& key) const {
        uint64_t v = u64(key);
        if (v > 1000000) throw ValidationError("--" + key + ": too large");
        return static_cast<unsigned>(v);
    }
    int64_t i64(const std::string& key) const { return parse_i64(key, required(key)); }
    double real(const std::string& key) const { return parse_real(key, required(key)); }
    bool flag(const std::string& key) const {
        std::string s = str(key);
        if (s.empty() || s == "false" || s == "0") return false;
        if (s == "true" || s == "1") return true;
        throw ValidationError("--" + key + ": expected true or false");
    }
    std::vector<uint64_t> u64_list(const std::string& key) const {
        std::vector<uint64_t> out;
        for (auto& s : split_list(required(key))) out.push_back(parse_u64(key, s));
        return out;
    }
    std::vector<int64_t> i64_list(const std::string& key) const {
        std::vector<int64_t> out;
        for (auto& s : split_list(required(key))) out.push_back(parse_i64(key, s));
        return out;
    }

    SieveParams sieve() const {
        SieveParams P;
        // Real, since the singular-series averages run far past 64 bits.
        P.x = real("x");
        if (!std::isfinite(P.x) || P.x < 2) throw ValidationError("--x must be a finite number >= 2");
        P.q = u64("q");
        P.a_tilde1 = u64("a1");
        P.a_tilde2 = u64("a2");
        P.theta1 = real("theta1");
        P.theta2 = real("theta2");
        P.eta = real("eta");
        P.xi = real("xi");
        P.M = u32("M");
        P.M1 = u32("M1");
        P.k = u32("k");
        P.allow_general_q = flag("allow-general-q");
        P.exploratory = flag("exploratory");
        return P;
    }

private:
    const CommandSpec& spec_;
    const RunConfig& cfg_;
};

void check_q(uint64_t q, bool allow_general) {
    if (q == 0) throw ValidationError("q must be positive");
    if (allow_general) return;
    if (q % 2 == 0) throw ValidationError("q must be odd (use --allow-general-q to override)");
    if (!trial_factorize(q).squarefree())
        throw ValidationError("q must be squarefree (use --allow-general-q to override)");
}

Json echo_parameters(const CommandSpec& spec, const RunConfig& cfg) {
    Json j = Json::object();
    for (auto& o : spec.opts) {
        auto it = cfg.parameters.find(o.name);
        std::string v = it != cfg.parameters.end() ? it->second : std::string(o.def);
        if (o.flag) j[o.name] = (v == "true" || v == "1");
        else j[o.name] = v;
    }
    return j;
}

// Provenance for commands without a full sieve bundle: whatever derives.
Json provenance_for(const SieveParams& P) {
    try {
        return provenance_json(P, derived_params(P));
    } catch (const ValidationError& e) {
        Json j;
        j["params"] = params_json(P);
        j["derived"] = nullptr;
        j["reason"] = e.what();
        return j;
    }
}

Json rational_json(const Rational& r) { return r.get_str(); }

struct Output {
    Json json;
    std::string csv;  // used when non-empty and format = csv
};

// ---- commands ----

Output cmd_count(const Params& p) {
    const uint64_t x = p.u64("x"), q = p.u64("q");
    check_q(q, p.flag("allow-general-q"));
    PatternSpec spec{q, p.u64_list("pattern")};
    if (spec.classes.empty()) throw ValidationError("--pattern must list at least one class");
    for (uint64_t a : spec.classes)
        if (a >= q) throw ValidationError("pattern classes must lie in [0, q)");
    const uint64_t c = count_patterns(x, spec);
    SieveParams P;
    P.x = static_cast<double>(x);
    P.q = q;
    P.allow_general_q = true;
    Output o;
    o.json["x"] = x;
    o.json["q"] = q;
    o.json["pattern"] = spec.classes;
    o.json["label"] = pattern_label(spec.classes);
    o.json["count"] = c;
    o.json["provenance"] = provenance_for(P);
    return o;
}

Output cmd_distribution(const Params& p) {
    const uint64_t x = p.u64("x"), q = p.u64("q");
    const unsigned M = p.u32("M");
    check_q(q, p.flag("allow-general-q"));
    if (M == 0) throw ValidationError("M must be positive");
    PatternTable t = pattern_distribution(x, q, M);
    Output o;
    o.csv = pattern_csv(t);
    Json counts = Json::object();
    std::vector<uint64_t> cls(M, 0);
    for (std::size_t code = 0; code < t.counts.size(); ++code) {
        uint64_t c = code;
        for (unsigned i = M; i-- > 0;) {
            cls[i] = c % q;
            c /= q;
        }
        if (t.counts[code]) counts[pattern_label(cls)] = t.counts[code];
    }
    SieveParams P;
    P.x = static_cast<double>(x);
    P.q = q;
    P.allow_general_q = true;
    o.json["x"] = x;
    o.json["q"] = q;
    o.json["M"] = M;
    o.json["counts"] = counts;
    o.json["provenance"] = provenance_for(P);
    return o;
}

Output cmd_enumerate(const Params& p) {
    const uint64_t lo = p.u64("lo"), hi = p.u64("x");
    if (lo > hi) throw ValidationError("lo must not exceed x");
    if (hi == UINT64_MAX) throw ValidationError("x out of range");
    const std::string method = p.str("method");
    if (method != "lattice" && method != "factorization" && method != "both")
        throw ValidationError("--method must be lattice, factorization or both");
    Output o;
    o.json["lo"] = lo;
    o.json["x"] = hi;
    o.json["method"] = method;
    auto emit = [&](const TwoSquaresRange& r) {
        o.json["count"] = r.count();
        if (p.flag("list")) o.json["members"] = r.members();
        std::string csv = "n\n";
        r.for_each([&](uint64_t n) { csv += std::to_string(n) + "\n"; });
        o.csv = csv;
    };
    if (method == "both") {
        TwoSquaresRange a = enumerate_E(lo, hi + 1, EMethod::lattice);
        TwoSquaresRange b = enumerate_E(lo, hi + 1, EMethod::factorization);
        emit(a);
        o.json["methods_agree"] = a.same_membership(b);
        if (!a.same_membership(b)) throw NumericalError("lattice and factorization membership differ");
    } else {
        emit(enumerate_E(lo, hi + 1, method == "lattice" ? EMethod::lattice : EMethod::factorization));
    }
    return o;
}

Output cmd_constants(const Params& p) {
    const uint64_t cutoff = p.u64("cutoff");
    if (cutoff < 100) throw ValidationError("--cutoff must be at least 100");
    EulerProductResult A = landau_ramanujan_A(cutoff), V = constant_V(cutoff);
    Output o;
    o.json["cutoff"] = cutoff;
    o.json["A"] = {{"value", number_json(A.value)},
                   {"form1", number_json(A.form1)},
                   {"form3", number_json(A.form3)},
                   {"form_gap", number_json(std::abs(A.form1 - A.form3))},
                   {"tail_bound", number_json(A.tail_bound)}};
    o.json["V"] = {{"value", number_json(V.value)}, {"tail_bound", number_json(V.tail_bound)}};
    o.csv = "constant,cutoff,value,tail_bound\n";
    o.csv += "A," + std::to_string(cutoff) + "," + number_json(A.value).dump() + "," +
             number_json(A.tail_bound).dump() + "\n";
    o.csv += "V," + std::to_string(cutoff) + "," + number_json(V.value).dump() + "," +
             number_json(V.tail_bound).dump() + "\n";
    return o;
}

Output cmd_functionals(const Params& p) {
    const unsigned K = p.u32("K");
    const double tol = p.real("tol");
    if (K == 0 || K > 8) throw ValidationError("--K must lie in 1..8");
    if (!(tol > 0)) throw ValidationError("--tol must be positive");
    Output o;
    o.json["K"] = K;
    double vals[3] = {0, 0, 0};
    const std::pair<const char*, LVariant> vs[3] = {
        {"plain", LVariant::plain}, {"single", LVariant::single}, {"double", LVariant::dbl}};
    for (int i = 0; i < 3; ++i) {
        // The two-form functional needs two coordinates.
        if (vs[i].second == LVariant::dbl && K < 2) {
            o.json[vs[i].first] = nullptr;
            continue;
        }
        QuadratureResult q = functional_L(K, vs[i].second, tol);
        double closed = functional_L_closed(K, vs[i].second);
        vals[i] = q.value;
        o.json[vs[i].first] = {{"quadrature", number_json(q.value)},
                               {"closed_form", number_json(closed)},
                               {"residual", number_json(std::abs(q.value - closed))},
                               {"achieved_tol", number_json(q.achieved_tol)},
                               {"nodes", q.nodes}};
    }
    const double pi = std::numbers::pi, sk = std::sqrt(static_cast<double>(K));
    o.json["ratios"] = {{"single_over_plain", number_json(vals[1] / vals[0])},
                        {"single_over_plain_predicted", number_json(pi * pi / ((pi + 2) * sk))},
                        {"double_over_plain", K >= 2 ? number_json(vals[2] / vals[0]) : Json(nullptr)},
                        {"double_over_plain_predicted", number_json(std::pow(pi * pi / (pi + 2), 2) / K)}};
    return o;
}

Output cmd_weights(const Params& p) {
    SieveParams P = p.sieve();
    DerivedParams d = derived_params(P);
    std::vector<uint64_t> pool = prime_pool(P, d, p.u64("max-pool"));
    DKSpace space = build_DK_space(P.K(), pool, d.log_R);
    WeightTable t = build_weight_table(space);
    LambdaBoundReport lb = lambda_bound(t, std::log(d.D0));
    Output o;
    o.csv = t.to_csv();
    o.json["K"] = P.K();
    o.json["pool"] = pool;
    o.json["size"] = t.space.tuples.size();
    o.json["exact"] = t.exact;
    o.json["lambda_1"] = number_json(t.lambda.empty() ? 0.0 : t.lambda[0]);
    o.json["max_abs_lambda"] = number_json(lb.max_abs_lambda);
    o.json["bound_scale"] = number_json(lb.scale);
    o.json["measured_C"] = number_json(lb.measured_C);
    if (t.exact) {
        o.json["round_trip_exact"] = (y_from_lambda(t.space, t.lambda_exact) == t.y_exact);
    }
    o.json["provenance"] = provenance_json(P, d);
    return o;
}

Output cmd_rho(const Params& p) {
    const uint64_t n = p.u64("n");
    if (n == 0) throw ValidationError("--n must be positive");
    RhoParams rp;
    rp.x = static_cast<double>(p.u64("x"));
    rp.theta1 = p.real("theta1");
    rp.v_override = p.real("v");
    rp.check();
    Factorization f = trial_factorize(n);
    Output o;
    Json fac = Json::array();
    for (auto& [pr, e] : f.factors) fac.push_back({pr, e});
    o.json["n"] = n;
    o.json["factorization"] = fac;
    o.json["v"] = number_json(rp.v());
    o.json["r2"] = r2(f);
    o.json["t"] = number_json(t_of_n(f, rp));
    o.json["rho"] = number_json(rho(f, rp));
    return o;
}

Output cmd_xz(const Params& p) {
    const double v = p.real("v");
    const uint64_t Q = p.u64("Q");
    if (!(v >= 2)) throw ValidationError("--v must be at least 2");
    if (Q == 0) throw ValidationError("--Q must be positive");
    XSumReport X = X_sum(v, Q);
    Output o;
    o.json["v"] = number_json(v);
    o.json["Q"] = Q;
    o.json["hypothesis_ok"] = X.hypothesis_ok;
    o.json["X"] = {{"direct", number_json(X.direct)},
                   {"predicted", number_json(X.predicted)},
                   {"ratio", number_json(X.direct / X.predicted)},
                   {"terms", X.terms}};
    if (!p.flag("skip-z")) {
        ZSumReport Z = Z_sums(v, Q);
        o.json["Z1"] = {{"direct", number_json(Z.Z1_direct)},
                        {"predicted", number_json(Z.Z1_predicted)},
                        {"ratio", number_json(Z.Z1_direct / Z.Z1_predicted)}};
        o.json["Z2"] = {{"direct", number_json(Z.Z2_direct)},
                        {"predicted", number_json(Z.Z2_predicted)},
                        {"ratio", number_json(Z.Z2_direct / Z.Z2_predicted)}};
        o.json["support"] = Z.support;
    }
    return o;
}

Output cmd_corr(const Params& p) {
    const std::string kind = p.str("kind");
    Output o;
    if (kind == "ap") {
        o.json["report"] = report_json(sum_r2_in_ap(p.u64("x"), p.u64("r"), p.u64("alpha"), p.u64("d")));
    } else if (kind == "pair") {
        o.json["report"] = report_json(sum_r2_pair(p.u64("x"), p.u64("r"), p.u64("alpha"), p.i64("h"), p.u64("c1"),
                                                   p.u64("c2"), p.u64("truncation")));
    } else if (kind == "second-moment") {
        o.json["report"] = report_json(sum_r2_squared(p.u64("x"), p.u64("r"), p.u64("alpha"), p.u64("d")));
    } else if (kind == "gamma") {
        GammaInputs g{p.i64("h"), p.u64("c1"), p.u64("c2"), p.u64("r"), p.u64("truncation")};
        if (g.c1 == 0 || g.c2 == 0 || g.r == 0) throw ValidationError("c1, c2, r must be positive");
        o.json["gamma"] = number_json(gamma_factor(g));
        o.json["tail_bound"] = number_json(gamma_tail_bound(g));
    } else if (kind == "hooley") {
        const uint64_t h = p.u64("h"), q1 = p.u64("q1"), T = p.u64("truncation");
        if (h == 0 || q1 == 0 || T == 0) throw ValidationError("h, q1, truncation must be positive");
        HooleyProduct hp = hooley_t_product(h, q1, T);
        o.json["h"] = h;
        o.json["q1"] = q1;
        o.json["partial_sum"] = number_json(hp.partial_sum);
        o.json["closed_product"] = number_json(hp.closed_product);
        o.json["gap"] = number_json(std::abs(hp.partial_sum - hp.closed_product));
    } else {
        throw ValidationError("--kind must be ap, pair, second-moment, gamma or hooley");
    }
    o.json["kind"] = kind;
    return o;
}

Output cmd_s_sums(const Params& p) {
    SSumConfig c;
    c.params = p.sieve();
    DerivedParams d = derived_params(c.params);
    c.b = p.i64_list("b");
    c.max_pool = p.u64("max-pool");
    c.m = p.u32("m");
    c.m1 = p.u32("m1");
    c.m2 = p.u32("m2");
    c.shift_b = p.u64("shift-b");
    c.max_terms = p.u64("max-terms");
    if (c.b.size() != c.params.K()) throw ValidationError("--b must list K = M k values");
    SSumResult r = empirical_S_all(c);
    Output o;
    o.json["nu0"] = r.nu0;
    o.json["nu1"] = r.nu1;
    o.json["shift_b"] = r.shift_b;
    o.json["pool"] = r.pool;
    o.json["lambda_1"] = number_json(r.lambda1);
    Json arr = Json::array();
    std::string csv = "name,kind,empirical,predicted,ratio,terms\n";
    for (auto& s : r.S) {
        arr.push_back(report_json(s));
        csv += s.name + "," + s.kind + "," + number_json(s.empirical).dump() + "," + number_json(s.predicted).dump() +
               "," + number_json(s.ratio).dump() + "," + std::to_string(s.terms) + "\n";
    }
    o.csv = csv;
    o.json["sums"] = arr;
    o.json["provenance"] = provenance_json(c.params, d);
    return o;
}

Output cmd_gallagher(const Params& p, uint64_t seed) {
    Output o;
    if (p.flag("a-table")) {
        const unsigned K = p.u32("K");
        AConvention conv = a_convention_from_name(p.str("convention"));
        std::vector<uint64_t> rs = p.u64_list("r");
        o.csv = A_r_csv(rs, K, conv);
        Json rows = Json::array();
        for (uint64_t r : rs) rows.push_back({{"r", r}, {"value", rational_json(A_r_identity(r, K, conv))}});
        o.json["K"] = K;
        o.json["convention"] = a_convention_name(conv);
        o.json["A_r"] = rows;
        return o;
    }
    SieveParams P = p.sieve();
    DerivedParams d = derived_params(P);
    o.json["report"] = report_json(gallagher_average(P, p.u64("sample-limit"), seed));
    o.json["provenance"] = provenance_json(P, d);
    return o;
}

Output cmd_admissible(const Params& p, uint64_t seed) {
    SieveParams P = p.sieve();
    DerivedParams d = derived_params(P);
    Output o;
    o.json["report"] = report_json(count_admissible_tuples(P, p.u64("sample-limit"), seed));
    o.json["provenance"] = provenance_json(P, d);
    return o;
}

void write_out(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.output);
    if (!f) throw ResourceError("cannot open output file " + cfg.output);
    f << text;
    if (!f) throw ResourceError("write failed: " + cfg.output);
}

int run(const RunConfig& cfg) {
    const CommandSpec* spec = find_command(cfg.command);
    if (!spec) {
        std::cerr << "s2s: unknown command '" << cfg.command << "'\n";
        return 64;
    }
    if (cfg.format != "json" && cfg.format != "csv") throw ValidationError("--format must be json or csv");
    Params p(*spec, cfg);

    if (cfg.command == "verify") {
        const std::string suite = p.str("suite");
        std::ostringstream log;
        int rc = run_verify(suite, p.flag("quick"), p.str("inject-fault"), log);
        write_out(cfg, log.str());
        return rc;
    }

    const auto t0 = std::chrono::steady_clock::now();
    Output out;
    const std::string& c = cfg.command;
    if (c == "count") out = cmd_count(p);
    else if (c == "distribution") out = cmd_distribution(p);
    else if (c == "enumerate") out = cmd_enumerate(p);
    else if (c == "constants") out = cmd_constants(p);
    else if (c == "functionals") out = cmd_functionals(p);
    else if (c == "weights") out = cmd_weights(p);
    else if (c == "rho") out = cmd_rho(p);
    else if (c == "xz-sums") out = cmd_xz(p);
    else if (c == "corr") out = cmd_corr(p);
    else if (c == "s-sums") out = cmd_s_sums(p);
    else if (c == "gallagher") out = cmd_gallagher(p, cfg.seed);
    else if (c == "admissible") out = cmd_admissible(p, cfg.seed);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();

    if (cfg.format == "csv") {
        if (out.csv.empty()) throw ValidationError("--format csv is only available for tabular outputs");
        write_out(cfg, out.csv);
        return 0;
    }
    Json j;
    j["schema"] = kSchemaVersion;
    j["command"] = cfg.command;
    j["seed"] = cfg.seed;
    j["parameters"] = echo_parameters(*spec, cfg);
    for (auto& [k, v] : out.json.items()) j[k] = v;
    j["runtime_ms"] = ms;
    write_out(cfg, j.dump(2) + "\n");
    return 0;
}

int guarded_run(const RunConfig& cfg) {
    try {
        return run(cfg);
    } catch (const ValidationError& e) {
        std::cerr << "s2s: validation error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "s2s: domain error: " << e.what() << "\n";
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "s2s: parameter error: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "s2s: range error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "s2s: resource error: " << e.what() << "\n";
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "s2s: resource error: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "s2s: error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace
}  // namespace s2s

int main(int argc, char** argv) {
    using namespace s2s;
    CLI::App app{"Sums of two squares in progressions: experiment runner"};
    app.require_subcommand(0, 1);

    std::string config_path, save_path, output, format;
    uint64_t seed = 0;
    unsigned threads = 0;
    app.add_option("--config", config_path, "load a RunConfig file");
    app.add_option("--save-config", save_path, "write the effective RunConfig and exit");
    app.add_option("--output", output, "report path (default stdout)");
    app.add_option("--format", format, "json or csv");
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--threads", threads, "worker count (0 = hardware)");

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, CLI::App*> subs;
    std::set<std::string> flag_names;
    for (auto& c : commands()) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->set_help_flag("--help", "print this help and exit");
        subs[c.name] = sub;
        for (auto& o : c.opts) {
            const std::string name = o.name;
            if (o.flag) {
                sub->add_flag("--" + name, flags[c.name][name], o.help);
            } else if (c.name == "verify" && name == "suite") {
                sub->add_option("suite", values[c.name][name], o.help);
            } else {
                auto* opt = sub->add_option("--" + name, values[c.name][name], o.help);
                if (*o.def) opt->default_str(o.def);
            }
        }
        // Global options are accepted after the subcommand as well.
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "s2s: cannot read config " << config_path << "\n";
            return 2;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        try {
            cfg = from_text(ss.str());
        } catch (const ValidationError& e) {
            std::cerr << "s2s: validation error: " << e.what() << "\n";
            return 2;
        }
    }

    std::string chosen;
    for (auto& [name, sub] : subs)
        if (sub->parsed()) chosen = name;
    if (chosen.empty() && cfg.command.empty()) {
        std::cerr << app.help();
        return 64;
    }
    if (!chosen.empty()) {
        if (!cfg.command.empty() && cfg.command != chosen) cfg.parameters.clear();
        cfg.command = chosen;
        const CLI::App* sub = subs[chosen];
        for (auto& [k, v] : values[chosen]) {
            const CLI::Option* opt = k == "suite" ? sub->get_option("suite") : sub->get_option("--" + k);
            if (opt->count() > 0) cfg.parameters[k] = v;
        }
        for (auto& [k, v] : flags[chosen])
            if (sub->get_option("--" + k)->count() > 0) cfg.parameters[k] = v ? "true" : "false";
    }
    if (app.get_option("--seed")->count() > 0) cfg.seed = seed;
    if (!output.empty()) cfg.output = output;
    if (!format.empty()) cfg.format = format;
    set_thread_count(threads);

    if (!save_path.empty()) {
        std::ofstream f(save_path);
        if (!f) {
            std::cerr << "s2s: cannot write " << save_path << "\n";
            return 3;
        }
        f << to_text(cfg);
        return 0;
    }
    return guarded_run(cfg);
}
