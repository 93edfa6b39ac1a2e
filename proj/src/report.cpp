#include "s2s/report.hpp"

#include <cmath>

namespace s2s {

Json number_json(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

Json report_json(const ExperimentReport& r, bool include_runtime) {
    Json j;
    j["name"] = r.name;
    Json params = Json::object();
    for (auto& [k, v] : r.params) params[k] = v;
    j["params"] = params;
    j["empirical"] = number_json(r.empirical);
    j["predicted"] = number_json(r.predicted);
    j["ratio"] = number_json(r.ratio);
    j["terms"] = r.terms;
    j["kind"] = r.kind;
    if (!r.extra.empty()) {
        Json extra = Json::object();
        for (auto& [k, v] : r.extra) extra[k] = number_json(v);
        j["extra"] = extra;
    }
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    if (include_runtime) j["runtime_ms"] = r.runtime_ms;
    return j;
}

Json params_json(const SieveParams& p) {
    Json j;
    j["x"] = p.x;
    j["q"] = p.q;
    j["a_tilde1"] = p.a_tilde1;
    j["a_tilde2"] = p.a_tilde2;
    j["theta1"] = p.theta1;
    j["theta2"] = p.theta2;
    j["eta"] = p.eta;
    j["M"] = p.M;
    j["M1"] = p.M1;
    j["k"] = p.k;
    j["K"] = p.K();
    j["xi"] = p.xi;
    j["allow_general_q"] = p.allow_general_q;
    j["exploratory"] = p.exploratory;
    return j;
}

Json provenance_json(const SieveParams& p, const DerivedParams& d) {
    Json j;
    j["params"] = params_json(p);
    j["D0"] = number_json(d.D0);
    if (d.W) j["W"] = *d.W;
    else j["W"] = nullptr;
    j["W_primes"] = d.W_primes;
    j["log_W"] = number_json(d.log_W);
    j["R"] = number_json(d.R);
    j["log_R"] = number_json(d.log_R);
    j["v"] = number_json(d.v);
    j["log_v"] = number_json(d.log_v);
    j["q1"] = d.q1;
    j["q3"] = d.q3;
    j["phi_ratio_q3W"] = number_json(d.phi_ratio_q3W);
    j["A"] = number_json(d.A);
    j["B"] = number_json(d.B);
    return j;
}

}  // namespace s2s
