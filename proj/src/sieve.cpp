#include "s2s/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>

namespace s2s {

namespace {

// Per-tuple bookkeeping shared by the Moebius transforms.
struct TupleInfo {
    std::vector<uint8_t> used;  // pool index -> coordinate + 1, 0 when unused
    long double log_prod = 0;
    uint64_t prod = 1;
    uint64_t phi = 1;
    unsigned omega = 0;
};

std::vector<TupleInfo> tuple_info(const DKSpace& sp) {
    std::vector<TupleInfo> info(sp.tuples.size());
    for (std::size_t t = 0; t < sp.tuples.size(); ++t) {
        TupleInfo& in = info[t];
        in.used.assign(sp.pool.size(), 0);
        for (unsigned c = 0; c < sp.K; ++c) {
            uint64_t v = sp.tuples[t][c];
            for (std::size_t j = 0; j < sp.pool.size() && v > 1; ++j)
                if (v % sp.pool[j] == 0) {
                    v /= sp.pool[j];
                    in.used[j] = static_cast<uint8_t>(c + 1);
                    in.log_prod += std::log(static_cast<long double>(sp.pool[j]));
                    in.prod *= sp.pool[j];
                    in.phi *= sp.pool[j] - 1;
                    ++in.omega;
                }
        }
    }
    return info;
}

// Calls fn(index) for every r in D_K with d | r (coordinatewise), d included.
template <class Fn>
void for_each_extension(const DKSpace& sp, const TupleInfo& info, const DTuple& d, Fn&& fn) {
    const long double logR = sp.log_R;
    DTuple cur = d;
    std::function<void(std::size_t, long double)> rec = [&](std::size_t j, long double lp) {
        while (j < sp.pool.size() && info.used[j]) ++j;
        if (j == sp.pool.size() || lp + std::log(static_cast<long double>(sp.pool[j])) >= logR) {
            // Larger primes do not fit either: this is a leaf.
            std::size_t idx = sp.find(cur);
            if (idx != DKSpace::npos) fn(idx);
            return;
        }
        rec(j + 1, lp);
        const uint64_t p = sp.pool[j];
        const long double lq = lp + std::log(static_cast<long double>(p));
        for (unsigned c = 0; c < sp.K; ++c) {
            cur[c] *= p;
            rec(j + 1, lq);
            cur[c] /= p;
        }
    };
    rec(0, info.log_prod);
}

template <class T>
std::vector<T> lambda_from_y_impl(const DKSpace& sp, const std::vector<T>& y) {
    if (y.size() != sp.tuples.size()) throw ValidationError("y vector does not match D_K");
    auto info = tuple_info(sp);
    std::vector<T> lam(sp.tuples.size());
    parallel_chunks(sp.tuples.size(), [&](std::size_t t) {
        T acc = 0;
        for_each_extension(sp, info[t], sp.tuples[t], [&](std::size_t r) {
            acc += y[r] / T(static_cast<double>(info[r].phi));
        });
        T coef = T(static_cast<double>(info[t].prod));
        if (info[t].omega % 2) coef = -coef;
        lam[t] = coef * acc;
    });
    return lam;
}

}  // namespace

std::vector<uint64_t> prime_pool(const SieveParams& P, const DerivedParams& d, std::size_t max_primes) {
    std::vector<uint64_t> out;
    const uint64_t hi = static_cast<uint64_t>(std::floor(d.R));
    for (uint64_t p : primes_up_to(hi)) {
        if (out.size() >= max_primes) break;
        if (p % 4 != 3 || static_cast<double>(p) <= d.D0 || P.q % p == 0) continue;
        out.push_back(p);
    }
    return out;
}

std::size_t DKSpace::find(const DTuple& d) const {
    auto it = index.find(d);
    return it == index.end() ? npos : it->second;
}

DKSpace build_DK_space(unsigned K, const std::vector<uint64_t>& pool, double log_R, uint64_t cap) {
    if (K == 0) throw ValidationError("K must be positive");
    DKSpace sp;
    sp.K = K;
    sp.pool = pool;
    std::sort(sp.pool.begin(), sp.pool.end());
    for (uint64_t p : sp.pool)
        if (p % 4 != 3) throw ValidationError("pool primes must be 3 mod 4");
    sp.log_R = log_R;
    DTuple cur(K, 1);
    std::function<void(std::size_t, long double)> rec = [&](std::size_t j, long double lp) {
        if (j == sp.pool.size() || lp + std::log(static_cast<long double>(sp.pool[j])) >= log_R) {
            if (sp.tuples.size() >= cap)
                throw ResourceError("D_K enumeration exceeds the cap of " + std::to_string(cap) + " tuples");
            sp.index.emplace(cur, sp.tuples.size());
            sp.tuples.push_back(cur);
            return;
        }
        rec(j + 1, lp);
        const uint64_t p = sp.pool[j];
        const long double lq = lp + std::log(static_cast<long double>(p));
        for (unsigned c = 0; c < K; ++c) {
            cur[c] *= p;
            rec(j + 1, lq);
            cur[c] /= p;
        }
    };
    rec(0, 0.0L);
    return sp;
}

double g_of_t(double t) { return t <= 1.0 ? 1.0 / (1.0 + t) : 0.0; }

double F_eval(const std::vector<double>& t) {
    const double K = static_cast<double>(t.size());
    double v = 1.0;
    for (double ti : t) {
        v *= g_of_t(K * ti);
        if (v == 0.0) break;
    }
    return v;
}

double y_of(const DTuple& r, double log_R) {
    std::vector<double> t(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) t[i] = std::log(static_cast<double>(r[i])) / log_R;
    return F_eval(t);
}

std::vector<Rational> lambda_from_y(const DKSpace& sp, const std::vector<Rational>& y) {
    if (y.size() != sp.tuples.size()) throw ValidationError("y vector does not match D_K");
    auto info = tuple_info(sp);
    std::vector<Rational> lam(sp.tuples.size());
    for (std::size_t t = 0; t < sp.tuples.size(); ++t) {
        Rational acc(0);
        for_each_extension(sp, info[t], sp.tuples[t], [&](std::size_t r) {
            acc += y[r] / Rational(static_cast<unsigned long>(info[r].phi));
        });
        Rational coef(static_cast<unsigned long>(info[t].prod));
        if (info[t].omega % 2) coef = -coef;
        lam[t] = coef * acc;
    }
    return lam;
}

std::vector<double> lambda_from_y(const DKSpace& sp, const std::vector<double>& y) {
    return lambda_from_y_impl<double>(sp, y);
}

std::vector<Rational> y_from_lambda(const DKSpace& sp, const std::vector<Rational>& lambda) {
    if (lambda.size() != sp.tuples.size()) throw ValidationError("lambda vector does not match D_K");
    auto info = tuple_info(sp);
    std::vector<Rational> y(sp.tuples.size());
    for (std::size_t t = 0; t < sp.tuples.size(); ++t) {
        Rational acc(0);
        for_each_extension(sp, info[t], sp.tuples[t], [&](std::size_t d) {
            acc += lambda[d] / Rational(static_cast<unsigned long>(info[d].prod));
        });
        Rational coef(static_cast<unsigned long>(info[t].phi));
        if (info[t].omega % 2) coef = -coef;
        y[t] = coef * acc;
    }
    return y;
}

WeightTable build_weight_table(const DKSpace& space) {
    WeightTable wt;
    wt.space = space;
    const std::size_t n = space.tuples.size();
    wt.y.resize(n);
    for (std::size_t t = 0; t < n; ++t) wt.y[t] = y_of(space.tuples[t], space.log_R);
    wt.exact = space.pool.size() <= kExactPoolLimit;
    if (wt.exact) {
        wt.y_exact.resize(n);
        for (std::size_t t = 0; t < n; ++t) wt.y_exact[t] = to_rational(wt.y[t]);
        wt.lambda_exact = lambda_from_y(space, wt.y_exact);
        wt.lambda.resize(n);
        for (std::size_t t = 0; t < n; ++t) wt.lambda[t] = wt.lambda_exact[t].get_d();
    } else {
        wt.lambda = lambda_from_y(space, wt.y);
    }
    return wt;
}

double WeightTable::lambda_of(const DTuple& d) const {
    std::size_t i = space.find(d);
    return i == DKSpace::npos ? 0.0 : lambda[i];
}

double WeightTable::max_abs_lambda() const {
    double m = 0;
    for (double l : lambda) m = std::max(m, std::abs(l));
    return m;
}

std::string WeightTable::to_csv() const {
    std::ostringstream out;
    out.precision(17);
    for (unsigned i = 1; i <= space.K; ++i) out << 'd' << i << ',';
    out << "lambda,y\n";
    for (std::size_t t = 0; t < space.tuples.size(); ++t) {
        for (uint64_t v : space.tuples[t]) out << v << ',';
        out << lambda[t] << ',' << y[t] << '\n';
    }
    return out.str();
}

double w_n_root(uint64_t n, const LinearFormTuple& t, const WeightTable& table) {
    const DKSpace& sp = table.space;
    if (t.K() != sp.K) throw ValidationError("tuple and weight table disagree on K");
    // For each pool prime, the forms it divides at n.
    std::vector<std::pair<uint64_t, std::vector<unsigned>>> hits;
    for (uint64_t p : sp.pool) {
        std::vector<unsigned> forms;
        for (unsigned i = 0; i < sp.K; ++i) {
            const unsigned __int128 v = static_cast<unsigned __int128>(t.q) * n +
                                        static_cast<unsigned __int128>(t.offset(i));
            if (v % p == 0) forms.push_back(i);
        }
        if (!forms.empty()) hits.emplace_back(p, std::move(forms));
    }
    double sum = 0;
    DTuple cur(sp.K, 1);
    std::function<void(std::size_t, long double)> rec = [&](std::size_t j, long double lp) {
        if (j == hits.size()) {
            sum += table.lambda_of(cur);
            return;
        }
        rec(j + 1, lp);
        const uint64_t p = hits[j].first;
        const long double lq = lp + std::log(static_cast<long double>(p));
        if (lq >= sp.log_R) return;
        for (unsigned i : hits[j].second) {
            cur[i] *= p;
            rec(j + 1, lq);
            cur[i] /= p;
        }
    };
    rec(0, 0.0L);
    return sum;
}

double w_n(uint64_t n, const LinearFormTuple& t, const WeightTable& table) {
    double s = w_n_root(n, t, table);
    return s * s;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

void gauss_legendre(unsigned n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0);
    w.assign(n, 0);
    auto legendre = [n](double z, double& dp) {
        double p0 = 1, p1 = 0;
        for (unsigned k = 1; k <= n; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1);
        return p0;
    };
    for (unsigned i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double dz = legendre(z, dp) / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        legendre(z, dp);
        x[i] = z;
        w[i] = 2.0 / ((1 - z * z) * dp * dp);
    }
}

// After t = u^2 each axis reads 2 du; F vanishes for u > 1/sqrt(K), so the
// panel is [0, 1/sqrt(K)] and the integrand is smooth there.
double tensor_L(unsigned K, LVariant variant, unsigned n) {
    std::vector<double> gx, gw;
    gauss_legendre(n, gx, gw);
    const double half = 0.5 / std::sqrt(static_cast<double>(K));
    std::vector<double> node(n), weight(n);
    for (unsigned i = 0; i < n; ++i) {
        double u = half * (gx[i] + 1.0);
        node[i] = u * u;
        weight[i] = 2.0 * half * gw[i];
    }
    const unsigned inner = variant == LVariant::plain ? 0 : (variant == LVariant::single ? 1 : 2);
    if (inner > K) throw ParameterError("functional needs K >= number of inner variables");
    const unsigned outer = K - inner;
    std::vector<double> t(K, 0.0);
    std::vector<unsigned> idx(outer, 0);
    CompensatedSum total;
    for (;;) {
        double wout = 1.0;
        for (unsigned a = 0; a < outer; ++a) {
            t[inner + a] = node[idx[a]];
            wout *= weight[idx[a]];
        }
        double val;
        if (inner == 0) {
            double f = F_eval(t);
            val = f * f;
        } else if (inner == 1) {
            double s = 0;
            for (unsigned j = 0; j < n; ++j) {
                t[0] = node[j];
                s += weight[j] * F_eval(t);
            }
            val = s * s;
        } else {
            double s = 0;
            for (unsigned j = 0; j < n; ++j)
                for (unsigned l = 0; l < n; ++l) {
                    t[0] = node[j];
                    t[1] = node[l];
                    s += weight[j] * weight[l] * F_eval(t);
                }
            val = s * s;
        }
        total.add(wout * val);
        unsigned a = 0;
        while (a < outer && ++idx[a] == n) idx[a++] = 0;
        if (a == outer) break;
    }
    return total.value();
}

}  // namespace

QuadratureResult functional_L(unsigned K, LVariant variant, double tol) {
    if (K == 0) throw ParameterError("K must be positive");
    if (variant == LVariant::dbl && K < 2) throw ParameterError("double functional needs K >= 2");
    QuadratureResult r;
    double prev = tensor_L(K, variant, 4);
    for (unsigned n : {6u, 8u, 12u, 16u, 20u, 24u}) {
        double cur = tensor_L(K, variant, n);
        double diff = std::abs(cur - prev);
        r.value = cur;
        r.achieved_tol = diff;
        r.nodes = n;
        if (diff <= tol * std::max(1.0, std::abs(cur))) return r;
        prev = cur;
    }
    throw NumericalError("quadrature did not reach tolerance; achieved " + std::to_string(r.achieved_tol));
}

double functional_L_closed(unsigned K, LVariant variant) {
    const double k = static_cast<double>(K);
    const double plain1 = (std::numbers::pi + 2) / (4 * std::sqrt(k));
    const double single1 = std::numbers::pi / (2 * std::sqrt(k));
    switch (variant) {
        case LVariant::plain: return std::pow(plain1, k);
        case LVariant::single: return single1 * single1 * std::pow(plain1, k - 1);
        case LVariant::dbl:
            if (K < 2) throw ParameterError("double functional needs K >= 2");
            return std::pow(single1, 4) * std::pow(plain1, k - 2);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Checks on y and lambda
// ---------------------------------------------------------------------------

PerturbationReport y_perturbation_check(const DTuple& r, const DTuple& s, double log_R) {
    PerturbationReport rep;
    if (r.size() != s.size() || r.empty()) return rep;
    const double K = static_cast<double>(r.size());
    rep.y_r = y_of(r, log_R);
    rep.y_s = y_of(s, log_R);
    std::vector<std::size_t> diff;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] != s[i]) diff.push_back(i);
    uint64_t prod_r = 1, prod_s = 1;
    for (std::size_t i = 0; i < r.size(); ++i) {
        prod_r *= r[i];
        prod_s *= s[i];
    }
    double weight;
    if (diff.size() <= 1 && (diff.empty() || s[diff[0]] % r[diff[0]] == 0)) {
        rep.part = 1;
        rep.A = diff.empty() ? 1.0 : static_cast<double>(s[diff[0]] / r[diff[0]]);
        weight = rep.y_r;
    } else if (prod_r == prod_s) {
        rep.part = 2;
        uint64_t common = 1;
        for (std::size_t i = 0; i < r.size(); ++i) common *= std::gcd(r[i], s[i]);
        rep.A = static_cast<double>(prod_r / common);
        weight = rep.y_r + rep.y_s;
    } else {
        return rep;
    }
    rep.applicable = true;
    const double scale = K * std::log(rep.A) / log_R * weight;
    const double dev = std::abs(rep.y_s - rep.y_r);
    rep.measured_C = dev == 0 ? 0.0 : (scale > 0 ? dev / scale : std::numeric_limits<double>::infinity());
    return rep;
}

DecouplingReport decoupling_check(unsigned K, const std::vector<uint64_t>& pool, double log_R) {
    DKSpace sp = build_DK_space(K, pool, log_R);
    auto info = tuple_info(sp);
    CompensatedSum coupled;
    for (std::size_t t = 0; t < sp.tuples.size(); ++t)
        coupled.add(y_of(sp.tuples[t], log_R) / static_cast<double>(info[t].phi));
    // One-dimensional: squarefree products n of pool primes with g(K log n / log R) > 0.
    DKSpace one = build_DK_space(1, pool, log_R / K * (1 + 1e-12));
    auto info1 = tuple_info(one);
    CompensatedSum single;
    for (std::size_t t = 0; t < one.tuples.size(); ++t) {
        double tn = std::log(static_cast<double>(one.tuples[t][0])) / log_R;
        single.add(g_of_t(K * tn) / static_cast<double>(info1[t].phi));
    }
    DecouplingReport rep;
    rep.coupled = coupled.value();
    rep.decoupled = std::pow(single.value(), K);
    rep.relative_gap = (rep.decoupled - rep.coupled) / rep.coupled;
    return rep;
}

LambdaBoundReport lambda_bound(const WeightTable& table, double log_D0) {
    LambdaBoundReport rep;
    rep.max_abs_lambda = table.max_abs_lambda();
    rep.scale = std::pow(table.log_R() / log_D0, table.space.K / 2.0);
    rep.measured_C = rep.max_abs_lambda / rep.scale;
    return rep;
}

// ---------------------------------------------------------------------------
// Tilde weights
// ---------------------------------------------------------------------------

namespace {

// Calls fn(index) for each support element that is a multiple of v.
template <class Fn>
void for_each_multiple(const TildeWeights& tw, uint64_t v, Fn&& fn) {
    std::function<void(std::size_t, uint64_t)> rec = [&](std::size_t j, uint64_t cur) {
        for (; j < tw.primes.size() && v % tw.primes[j] == 0; ++j) {
        }
        if (j == tw.primes.size() || static_cast<double>(cur) * static_cast<double>(tw.primes[j]) >= tw.X) {
            auto it = tw.index.find(cur);
            if (it != tw.index.end()) fn(it->second);
            return;
        }
        rec(j + 1, cur);
        rec(j + 1, cur * tw.primes[j]);
    };
    rec(0, v);
}

uint64_t phi_sqf(uint64_t v, const std::vector<uint64_t>& primes) {
    uint64_t r = 1;
    for (uint64_t p : primes)
        if (v % p == 0) r *= p - 1;
    return r;
}

int mu_sqf(uint64_t v, const std::vector<uint64_t>& primes) {
    int r = 1;
    for (uint64_t p : primes)
        if (v % p == 0) r = -r;
    return r;
}

}  // namespace

TildeWeights build_tilde_weights(const std::vector<uint64_t>& primes_in, double X, uint64_t cap) {
    TildeWeights tw;
    tw.X = X;
    tw.primes = primes_in;
    std::sort(tw.primes.begin(), tw.primes.end());
    std::function<void(std::size_t, uint64_t)> rec = [&](std::size_t j, uint64_t cur) {
        if (tw.support.size() >= cap) throw ResourceError("tilde support exceeds cap of " + std::to_string(cap));
        tw.support.push_back(cur);
        for (std::size_t i = j; i < tw.primes.size(); ++i) {
            if (static_cast<double>(cur) * static_cast<double>(tw.primes[i]) >= X) break;
            rec(i + 1, cur * tw.primes[i]);
        }
    };
    if (X > 1) rec(0, 1);
    std::sort(tw.support.begin(), tw.support.end());
    for (std::size_t i = 0; i < tw.support.size(); ++i) tw.index.emplace(tw.support[i], i);
    std::vector<Rational> ones(tw.support.size(), Rational(1));
    tw.exact = tw.primes.size() <= kTildeExactLimit;
    if (tw.exact) {
        tw.lambda_exact = tilde_lambda_from_y(tw, ones);
        for (auto& l : tw.lambda_exact) tw.lambda.push_back(l.get_d());
    } else {
        tw.lambda.resize(tw.support.size());
        for (std::size_t i = 0; i < tw.support.size(); ++i) {
            const uint64_t d0 = tw.support[i];
            CompensatedSum s;
            for_each_multiple(tw, d0, [&](std::size_t r) {
                s.add(1.0 / static_cast<double>(phi_sqf(tw.support[r], tw.primes)));
            });
            const double dd = static_cast<double>(d0);
            tw.lambda[i] = mu_sqf(d0, tw.primes) * dd * dd / static_cast<double>(phi_sqf(d0, tw.primes)) * s.value();
        }
    }
    tw.lambda1 = tw.support.empty() ? 0.0 : tw.lambda[0];
    return tw;
}

TildeWeights build_tilde_weights(const SieveParams& P, uint64_t cap) {
    DerivedParams d = derived_params(P);
    const double X = std::pow(P.x, P.xi);
    std::vector<uint64_t> primes;
    for (uint64_t p : primes_up_to(static_cast<uint64_t>(std::ceil(X))))
        if (p % 4 == 3 && static_cast<double>(p) > d.D0 && static_cast<double>(p) < X && d.q3 % p != 0)
            primes.push_back(p);
    TildeWeights tw = build_tilde_weights(primes, X, cap);
    tw.xi = P.xi;
    return tw;
}

std::vector<Rational> tilde_lambda_from_y(const TildeWeights& tw, const std::vector<Rational>& y) {
    std::vector<Rational> lam(tw.support.size());
    for (std::size_t i = 0; i < tw.support.size(); ++i) {
        const uint64_t d0 = tw.support[i];
        Rational acc(0);
        for_each_multiple(tw, d0, [&](std::size_t r) {
            acc += y[r] / Rational(static_cast<unsigned long>(phi_sqf(tw.support[r], tw.primes)));
        });
        Rational dd(static_cast<unsigned long>(d0));
        lam[i] = Rational(mu_sqf(d0, tw.primes)) * dd * dd /
                 Rational(static_cast<unsigned long>(phi_sqf(d0, tw.primes))) * acc;
    }
    return lam;
}

std::vector<Rational> tilde_y_from_lambda(const TildeWeights& tw, const std::vector<Rational>& lambda) {
    std::vector<Rational> y(tw.support.size());
    for (std::size_t i = 0; i < tw.support.size(); ++i) {
        const uint64_t r0 = tw.support[i];
        Rational acc(0);
        for_each_multiple(tw, r0, [&](std::size_t d) {
            const uint64_t d0 = tw.support[d];
            Rational dd(static_cast<unsigned long>(d0));
            acc += lambda[d] * Rational(static_cast<unsigned long>(phi_sqf(d0, tw.primes))) / (dd * dd);
        });
        y[i] = Rational(mu_sqf(r0, tw.primes)) * Rational(static_cast<unsigned long>(phi_sqf(r0, tw.primes))) * acc;
    }
    return y;
}

double TildeWeights::lambda_of(uint64_t d0) const {
    auto it = index.find(d0);
    return it == index.end() ? 0.0 : lambda[it->second];
}

double mu_plus(uint64_t f, const TildeWeights& tw) {
    std::vector<uint64_t> ps;
    for (auto& [p, e] : trial_factorize(f).factors) {
        if (e > 1) return 0.0;
        ps.push_back(p);
    }
    double s = 0;
    // Each prime of f goes to d0 only, e0 only, or both.
    std::function<void(std::size_t, uint64_t, uint64_t)> rec = [&](std::size_t j, uint64_t d0, uint64_t e0) {
        if (j == ps.size()) {
            s += tw.lambda_of(d0) * tw.lambda_of(e0);
            return;
        }
        rec(j + 1, d0 * ps[j], e0);
        rec(j + 1, d0, e0 * ps[j]);
        rec(j + 1, d0 * ps[j], e0 * ps[j]);
    };
    rec(0, 1, 1);
    return s / (tw.lambda1 * tw.lambda1);
}

namespace {

std::vector<uint64_t> exact_sieve_primes(uint64_t m, const TildeWeights& tw) {
    std::vector<uint64_t> out;
    for (uint64_t p : tw.primes)
        if (m % p == 0 && (m / p) % p != 0) out.push_back(p);
    return out;
}

}  // namespace

double selberg_form(uint64_t m, const TildeWeights& tw) {
    auto ps = exact_sieve_primes(m, tw);
    double s = 0;
    for (uint64_t mask = 0; mask < (uint64_t(1) << ps.size()); ++mask) {
        uint64_t d0 = 1;
        for (std::size_t j = 0; j < ps.size(); ++j)
            if (mask >> j & 1) d0 *= ps[j];
        s += tw.lambda_of(d0);
    }
    return s * s / (tw.lambda1 * tw.lambda1);
}

double selberg_form_mu_plus(uint64_t m, const TildeWeights& tw) {
    auto ps = exact_sieve_primes(m, tw);
    double s = 0;
    for (uint64_t mask = 0; mask < (uint64_t(1) << ps.size()); ++mask) {
        uint64_t f = 1;
        for (std::size_t j = 0; j < ps.size(); ++j)
            if (mask >> j & 1) f *= ps[j];
        s += mu_plus(f, tw);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Local factors
// ---------------------------------------------------------------------------

namespace {

// Position of p among the coordinates (-1 when absent).
int slot_of(uint64_t p, const std::vector<uint64_t>& v, int base) {
    int pos = -1;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] % p == 0) {
            if (pos >= 0) throw DomainError("prime divides two coordinates of one tuple");
            if ((v[i] / p) % p == 0) throw DomainError("tuple coordinates must be squarefree");
            pos = static_cast<int>(i) + base;
        }
    return pos;
}

}  // namespace

Rational sigma_local(SigmaVariant variant, uint64_t p, const SigmaInputs& in) {
    const Rational P(static_cast<unsigned long>(p));
    if (in.r.size() != in.s.size()) throw DomainError("r and s must have equal length");
    switch (variant) {
        case SigmaVariant::S5T: {
            int iu = slot_of(p, in.r, 0), iv = slot_of(p, in.s, 0);
            if (iu >= 0 && iu == iv) return P - 1;
            if (iu >= 0 || iv >= 0) return Rational(0);
            return Rational(1);
        }
        case SigmaVariant::S5main: {
            if (in.m >= in.r.size()) throw DomainError("m out of range");
            if (in.sieve_prime == 0) throw DomainError("S5main needs the sieve prime");
            if (p == in.sieve_prime) {
                bool pr = in.r[in.m] % p == 0, ps = in.s[in.m] % p == 0;
                if (pr && ps) return (P - 1) * (P - 1);
                if (pr || ps) return -(P - 1);
                return Rational(1);
            }
            int ir = slot_of(p, in.r, 0), is = slot_of(p, in.s, 0);
            if (ir >= 0 && ir == is) return P - 1;
            if (ir >= 0 && is >= 0) return Rational(-1);
            if (ir >= 0 || is >= 0) return Rational(0);
            return Rational(1);
        }
        case SigmaVariant::S6: {
            std::vector<uint64_t> R{in.r0}, S{in.s0};
            R.insert(R.end(), in.r.begin(), in.r.end());
            S.insert(S.end(), in.s.begin(), in.s.end());
            int ir = slot_of(p, R, 0), is = slot_of(p, S, 0);
            if (ir >= 1 && ir == is) return P - 1;
            if (ir == 0 && is == 0) return P * P / (P - 1) - 1;
            if (ir >= 0 && is >= 0) return Rational(-1);
            if (ir >= 0 || is >= 0) return Rational(0);
            return Rational(1);
        }
    }
    throw DomainError("unknown sigma variant");
}

Rational sigma_bruteforce(SigmaVariant variant, uint64_t p, const SigmaInputs& in, bool respect_support) {
    if (in.r.size() != in.s.size()) throw DomainError("r and s must have equal length");
    const bool s6 = variant == SigmaVariant::S6;
    // Slots: S6 uses slot 0 for r0/s0 and 1..K for the tuple; others 0..K-1.
    std::vector<uint64_t> R, S;
    if (s6) {
        R.push_back(in.r0);
        S.push_back(in.s0);
    }
    R.insert(R.end(), in.r.begin(), in.r.end());
    S.insert(S.end(), in.s.begin(), in.s.end());
    const unsigned n = static_cast<unsigned>(R.size());
    for (unsigned i = 0; i < n; ++i)
        if ((R[i] % p == 0 && (R[i] / p) % p == 0) || (S[i] % p == 0 && (S[i] / p) % p == 0))
            throw DomainError("tuple coordinates must be squarefree");
    const Rational P(static_cast<unsigned long>(p));
    const Rational g_p = 1 / P - 1 / (P * P);

    Rational total(0);
    std::vector<uint64_t> d(n, 1), e(n, 1);
    // Every choice of d_i | (r_i, p), e_i | (s_i, p).
    const unsigned bits = 2 * n;
    for (uint64_t mask = 0; mask < (uint64_t(1) << bits); ++mask) {
        bool ok = true;
        unsigned dcount = 0, ecount = 0;
        for (unsigned i = 0; i < n && ok; ++i) {
            d[i] = (mask >> i & 1) ? p : 1;
            e[i] = (mask >> (n + i) & 1) ? p : 1;
            if (d[i] == p && R[i] % p != 0) ok = false;
            if (e[i] == p && S[i] % p != 0) ok = false;
            dcount += d[i] == p;
            ecount += e[i] == p;
        }
        if (!ok) continue;
        // d, e each lie in D_K: a prime sits in at most one coordinate.
        if (dcount > 1 || ecount > 1) continue;
        if (variant == SigmaVariant::S5main && p == in.sieve_prime) {
            for (unsigned i = 0; i < n; ++i)
                if (i != in.m && (d[i] != 1 || e[i] != 1)) ok = false;
            if (!ok) continue;
        }
        if (s6 || (variant == SigmaVariant::S5main && respect_support)) {
            // [d_i, e_i] pairwise coprime.
            unsigned touched = 0;
            for (unsigned i = 0; i < n; ++i) touched += (d[i] == p || e[i] == p);
            if (touched > 1) continue;
        }
        Rational term(1);
        switch (variant) {
            case SigmaVariant::S5T: {
                for (unsigned i = 0; i < n; ++i) {
                    const uint64_t l = std::max(d[i], e[i]);
                    term *= Rational(static_cast<unsigned long>(d[i] * e[i])) / Rational(static_cast<unsigned long>(l));
                }
                if ((dcount + ecount) % 2) term = -term;
                break;
            }
            case SigmaVariant::S5main: {
                const Rational sp(static_cast<unsigned long>(in.sieve_prime));
                Rational denom(1);
                for (unsigned i = 0; i < n; ++i) {
                    uint64_t l = std::max(d[i], e[i]);
                    if (i == in.m) {
                        // [d_m, e_m, p]
                        uint64_t L = std::lcm(l, in.sieve_prime);
                        denom *= Rational(static_cast<unsigned long>(L));
                    } else {
                        denom *= Rational(static_cast<unsigned long>(l));
                    }
                }
                Rational de(1);
                for (unsigned i = 0; i < n; ++i) de *= Rational(static_cast<unsigned long>(d[i] * e[i]));
                term = de * sp / denom;
                if ((dcount + ecount) % 2) term = -term;
                break;
            }
            case SigmaVariant::S6: {
                const bool d0 = d[0] == p, e0 = e[0] == p;
                Rational num(1), den(1);
                if (d0) {
                    num *= P * P;
                    den *= P - 1;
                }
                if (e0) {
                    num *= P * P;
                    den *= P - 1;
                }
                if (d0 || e0) num *= g_p;
                for (unsigned i = 1; i < n; ++i) {
                    num *= Rational(static_cast<unsigned long>(d[i] * e[i]));
                    den *= Rational(static_cast<unsigned long>(std::max(d[i], e[i])));
                }
                term = num / den;
                if ((dcount + ecount) % 2) term = -term;
                break;
            }
        }
        total += term;
    }
    return total;
}

std::vector<SigmaInputs> sigma_case_configurations(SigmaVariant variant, uint64_t p, unsigned K, uint64_t other) {
    if (other == p) throw DomainError("other must differ from p");
    const bool s6 = variant == SigmaVariant::S6;
    const int n = static_cast<int>(K) + (s6 ? 1 : 0);
    std::vector<SigmaInputs> out;
    for (int ir = -1; ir < n; ++ir)
        for (int is = -1; is < n; ++is) {
            std::vector<uint64_t> R(n, 1), S(n, 1);
            if (ir >= 0) R[ir] = p;
            if (is >= 0) S[is] = p;
            R[n - 1] *= other;
            S[0] *= other;
            SigmaInputs in;
            if (s6) {
                in.r0 = R[0];
                in.s0 = S[0];
                in.r.assign(R.begin() + 1, R.end());
                in.s.assign(S.begin() + 1, S.end());
                out.push_back(in);
                continue;
            }
            in.r = R;
            in.s = S;
            if (variant == SigmaVariant::S5T) {
                out.push_back(in);
                continue;
            }
            for (unsigned m = 0; m < K; ++m)
                for (uint64_t sp : {p, other}) {
                    in.m = m;
                    in.sieve_prime = sp;
                    out.push_back(in);
                }
        }
    return out;
}

double phi_omega_star(const Factorization& f, unsigned K) {
    double r = static_cast<double>(f.n);
    for (auto& [p, e] : f.factors) {
        if (p <= K + 1) throw DomainError("phi_omega_star needs every prime above K+1");
        r *= 1.0 - static_cast<double>(K + 1) / static_cast<double>(p);
    }
    return r;
}

}  // namespace s2s
