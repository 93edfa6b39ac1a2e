#include "s2s/rho.hpp"

#include "s2s/two_squares.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace s2s {

double RhoParams::v() const { return v_override > 0 ? v_override : std::pow(x, theta1); }
double RhoParams::log_v() const { return std::log(v()); }

void RhoParams::check() const {
    if (!(v() >= 2)) throw ValidationError("rho needs v = x^theta1 >= 2");
}

RhoParams rho_params_from_v(double v) {
    RhoParams p;
    p.v_override = v;
    p.x = v;
    p.theta1 = 1;
    return p;
}

double t_of_n(const Factorization& f, const RhoParams& params) {
    params.check();
    const double v = params.v(), lv = std::log(v);
    std::vector<uint64_t> ps;
    for (auto& [p, e] : f.factors)
        if (p % 4 == 1 && static_cast<double>(p) <= v) ps.push_back(p);
    CompensatedSum s;
    // Depth-first over squarefree a built from ps, a <= v.
    struct Frame {
        std::size_t next;
        double a;
        double inv_g2;
        int mu;
    };
    std::vector<Frame> stack{{0, 1.0, 1.0, 1}};
    while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        s.add(fr.mu * fr.inv_g2 * (1.0 - std::log(fr.a) / lv));
        for (std::size_t i = fr.next; i < ps.size(); ++i) {
            double a = fr.a * static_cast<double>(ps[i]);
            if (a > v) break;
            double p = static_cast<double>(ps[i]);
            stack.push_back({i + 1, a, fr.inv_g2 / (2.0 - 1.0 / p), -fr.mu});
        }
    }
    return s.value();
}

double rho(const Factorization& f, const RhoParams& params) {
    uint64_t r = r2(f);
    if (r == 0) return 0.0;
    return static_cast<double>(r) * t_of_n(f, params);
}

namespace {

void check_Q(uint64_t Q) {
    if (Q == 0) throw DomainError("Q must be positive");
    Factorization f = trial_factorize(Q);
    if (!f.squarefree()) throw DomainError("Q must be squarefree");
    for (auto& [p, e] : f.factors)
        if (p % 4 != 1) throw DomainError("every prime of Q must be 1 mod 4");
}

bool hypothesis_holds(double v, uint64_t Q) {
    // Read with the standard choice theta1 = 1/20, so log x = 20 log v.
    double bound = std::pow(std::log(20.0 * std::log(v)), 3.0);
    for (auto& [p, e] : trial_factorize(Q).factors)
        if (static_cast<double>(p) > bound) return false;
    return true;
}

struct Support {
    uint64_t a;
    int mu;
};

// Squarefree a <= v with every prime 1 mod 4 and (a, Q) = 1, ascending.
std::vector<Support> one_mod_four_support(uint64_t v, uint64_t Q) {
    std::vector<uint64_t> ps;
    for (uint64_t p : primes_up_to(v))
        if (p % 4 == 1 && Q % p != 0) ps.push_back(p);
    std::vector<Support> out;
    std::vector<std::pair<std::size_t, Support>> stack{{0, {1, 1}}};
    while (!stack.empty()) {
        auto [next, s] = stack.back();
        stack.pop_back();
        out.push_back(s);
        for (std::size_t i = next; i < ps.size(); ++i) {
            if (s.a * ps[i] > v) break;
            stack.push_back({i + 1, {s.a * ps[i], -s.mu}});
        }
    }
    std::sort(out.begin(), out.end(), [](const Support& x, const Support& y) { return x.a < y.a; });
    return out;
}

double q_factor(uint64_t Q) {
    // g7(Q) / (phi(Q) g1(Q)) with g1(p) = 1 - 1/p for p = 1 mod 4.
    double r = 1;
    for (auto& [p, e] : trial_factorize(Q).factors) {
        double P = static_cast<double>(p);
        r *= (P + 1) / ((P - 1) * (1 - 1 / P));
    }
    return r;
}

}  // namespace

XSumReport X_sum(double v, uint64_t Q) {
    check_Q(Q);
    if (!(v >= 2)) throw ValidationError("X_sum needs v >= 2");
    XSumReport r;
    const uint64_t V = static_cast<uint64_t>(std::floor(v));
    CompensatedSum s;
    for (const Support& a : one_mod_four_support(V, Q)) {
        double ad = static_cast<double>(a.a);
        s.add(a.mu / ad * std::log(v / ad));
        ++r.terms;
    }
    r.direct = s.value();
    double g1Q = 1;
    for (auto& [p, e] : trial_factorize(Q).factors) g1Q *= 1 - 1.0 / static_cast<double>(p);
    r.predicted = 8 * landau_A() * std::sqrt(std::log(v)) / (std::numbers::pi * g1Q);
    r.hypothesis_ok = hypothesis_holds(v, Q);
    return r;
}

ZSumReport Z_sums(double v, uint64_t Q, uint64_t pair_budget) {
    check_Q(Q);
    if (!(v >= 2)) throw ValidationError("Z_sums needs v >= 2");
    const uint64_t V = static_cast<uint64_t>(std::floor(v));
    std::vector<Support> sup = one_mod_four_support(V, Q);
    const uint64_t n = sup.size();
    if (n * n > pair_budget)
        throw ResourceError("Z-sum double loop of " + std::to_string(n * n) + " pairs exceeds budget");

    // Per-element data, plus a lookup by value for the gcd.
    std::vector<double> g4(n), inv_g2(n), g6s(n), lg(n);
    std::vector<int32_t> index(V + 1, -1);
    for (uint64_t i = 0; i < n; ++i) {
        index[sup[i].a] = static_cast<int32_t>(i);
        Factorization f = trial_factorize(sup[i].a);
        g4[i] = 1;
        inv_g2[i] = 1;
        g6s[i] = 0;
        for (auto& [p, e] : f.factors) {
            double P = static_cast<double>(p);
            g4[i] *= (4 * P * P - 3 * P + 1) / (P * (P + 1));
            inv_g2[i] /= 2 - 1 / P;
            g6s[i] += additive_local(Mult::g6_additive, p);
        }
        lg[i] = std::log(v / static_cast<double>(sup[i].a));
    }

    const std::size_t chunks = std::min<std::size_t>(n, 256);
    std::vector<CompensatedSum> z1(chunks), z2(chunks);
    parallel_chunks(chunks, [&](std::size_t c) {
        for (uint64_t i = c; i < n; i += chunks) {
            const uint64_t a = sup[i].a;
            for (uint64_t j = 0; j < n; ++j) {
                const uint64_t b = sup[j].a;
                const uint64_t g = std::gcd(a, b);
                const int32_t gi = index[g];
                const double lcm = static_cast<double>(a / g) * static_cast<double>(b);
                const double term = sup[i].mu * sup[j].mu * (g4[i] * g4[j] / g4[gi]) * inv_g2[i] *
                                    inv_g2[j] / lcm * lg[i] * lg[j];
                z1[c].add(term);
                z2[c].add(term * (g6s[i] + g6s[j] - g6s[gi]));
            }
        }
    });
    CompensatedSum s1, s2;
    for (std::size_t c = 0; c < chunks; ++c) {
        s1.merge(z1[c]);
        s2.merge(z2[c]);
    }
    ZSumReport r;
    r.support = n;
    r.Z1_direct = s1.value();
    r.Z2_direct = s2.value();
    const double lv = std::log(v), A = landau_A();
    const double prod = v_product_excluding(Q);
    const double qf = q_factor(Q);
    r.Z1_predicted = 8 * A * qf * std::sqrt(lv) * prod;
    r.Z2_predicted = -4 * A * qf * std::pow(lv, 1.5) * prod;
    r.hypothesis_ok = hypothesis_holds(v, Q);
    return r;
}

}  // namespace s2s
