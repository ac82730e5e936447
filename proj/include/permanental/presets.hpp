#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permanental/calibration_table.hpp"
#include "permanental/envelope.hpp"
#include "permanental/errors.hpp"
#include "permanental/functions.hpp"
#include "permanental/kernels.hpp"
#include "permanental/rng.hpp"

namespace permanental {

// Built-in run configurations, one or more per acceptance criterion. The
// presets/ directory holds the same objects as files (checked by a test).
inline const std::map<std::string, nlohmann::json>& preset_registry() {
  using nlohmann::json;
  static const std::map<std::string, json> reg = [] {
    std::map<std::string, json> m;
    const std::uint64_t seed = default_seed;
    const json bm = KernelSpec::brownian_hit0(ScalarFn::zero()).to_json();

    auto lt = [&](double alpha, json kernel, std::vector<double> pts) {
      return json{{"command", "verify-lt"},
                  {"seed", seed},
                  {"n_rep", 100000},
                  {"spec", {{"alpha", alpha}, {"kernel", kernel}, {"points", pts}}}};
    };
    std::vector<double> dyadic, sixths;
    for (int j = 1; j <= 8; ++j) dyadic.push_back(j / 8.0);
    for (int j = 1; j <= 6; ++j) sixths.push_back(j / 6.0);
    m["bm-halfint"] = lt(0.5, bm, dyadic);
    m["bm-alpha1"] = lt(1.0, bm, dyadic);
    m["fbmq-halfint"] = lt(0.5, KernelSpec::fbmq(0.5, 0.0).to_json(), sixths);
    // (a, b, gamma) = (1, 1, 0.5) and (4, 1, 1.5); matrix [[b, gamma], [gamma, a]]
    const std::vector<std::pair<std::string, json>> pairs = {{"k1", json{{1.0, 0.5}, {0.5, 1.0}}},
                                                             {"k2", json{{1.0, 1.5}, {1.5, 4.0}}}};
    for (double alpha : {0.5, 0.7, 1.3})
      for (const auto& [tag, mat] : pairs) {
        char name[32];
        std::snprintf(name, sizeof name, "biv-a%02d-%s", static_cast<int>(std::lround(alpha * 10)), tag.c_str());
        m[name] = json{{"command", "verify-lt"}, {"seed", seed}, {"n_rep", 100000},
                       {"spec", {{"alpha", alpha}, {"matrix", mat}}}};
      }

    m["density-coherence"] = {{"command", "audit"},
                              {"audit", "density"},
                              {"seed", seed},
                              {"n_rep", 1000000},
                              {"bins", 20},
                              {"cases", json::array({{{"alpha", 0.5}, {"b", 1.0}, {"a", 1.0}, {"gamma", 0.5}},
                                                     {{"alpha", 0.7}, {"b", 1.0}, {"a", 4.0}, {"gamma", 1.5}},
                                                     {{"alpha", 1.3}, {"b", 2.0}, {"a", 1.0}, {"gamma", 1.0}}})}};

    m["tail-stress"] = {{"command", "verify-tail"},
                        {"stress", true},
                        {"seed", seed},
                        {"n_rep", 1000000},
                        {"alphas", {0.5, 0.7, 1.0, 1.3}},
                        {"lambda", {1.0, 1.5, 2.0, 2.5, 3.0}},
                        {"slope_min_ratio", 0.9}};

    m["orlicz-grid"] = {{"command", "audit"},
                        {"audit", "orlicz"},
                        {"grid", json::array({{1, 0}, {1, 1}, {2, 0}, {2, 2}, {5, 0.5}, {5, 3}, {10, 1}, {10, 4},
                                              {100, 0}, {100, 2}})}};

    m["closed-form-inverses"] = {{"command", "audit"}, {"audit", "inverses"}, {"seed", seed}, {"n_random", 36},
                                 {"max_n", 12},        {"theta", 2.0},        {"theta_n", 12}};

    // lambda_j = 2^{-j}, p_j = q_j = lambda_j
    const json seq42 =
        KernelSpec::discrete_seq(SeqFn::geometric(1.0, 0.5), SeqFn::one_minus(SeqFn::geometric(1.0, 0.5)),
                                 SeqFn::one_minus(SeqFn::geometric(1.0, 0.5)))
            .to_json();
    m["mmatrix-example"] = {{"command", "audit"},
                            {"audit", "mmatrix"},
                            {"kernel", seq42},
                            {"max_m", 12},
                            {"counterexample", json{{1.0, 2.0}, {2.0, 1.0}}}};

    m["rebirth-4state"] = {{"command", "rebirth"},
                           {"seed", seed},
                           {"n_rep", 100000},
                           {"generator", json{{-3.0, 1.0, 1.0, 0.5},
                                              {1.0, -2.5, 0.5, 0.5},
                                              {0.5, 1.0, -3.0, 1.0},
                                              {0.5, 0.5, 1.0, -2.5}}},
                           {"mu", {0.3, 0.0, 0.2, 0.1}},
                           {"horizon", 1e6}};

    m["lil-bm"] = {{"command", "modulus"},
                   {"seed", seed},
                   {"n_rep", 200},
                   {"modulus",
                    {{"kind", "lil"}, {"alpha", 0.5}, {"kernel", bm}, {"blocks", 32}, {"per_block", 32},
                     {"k_min", 10}, {"k_max", 20}, {"corridor", {0.6, 1.2}}, {"check_last", 3}}}};

    // sigma(s,t) = (2C)^{1/2} |s-t|^{1/4} for FBMQ gamma = 1/2, beta = 0
    const double c_fb = c_gamma_beta(0.5, 0.0);
    m["local-fbmq"] = {{"command", "modulus"},
                       {"seed", seed},
                       {"n_rep", 200},
                       {"modulus",
                        {{"kind", "local"}, {"alpha", 0.5}, {"kernel", KernelSpec::fbmq(0.5, 0.0).to_json()},
                         {"phi", EnvelopeFn::power(std::sqrt(2.0 * c_fb), 0.25).to_json()}, {"t0", 1.0},
                         {"blocks", 24}, {"per_block", 16}, {"k_min", 10}, {"k_max", 20},
                         {"corridor", {0.0, 1.25}}, {"check_last", 3}}}};

    m["uniform-bm"] = {{"command", "modulus"},
                       {"seed", seed},
                       {"n_rep", 200},
                       {"modulus",
                        {{"kind", "uniform"}, {"alpha", 0.5}, {"kernel", bm},
                         {"phi", EnvelopeFn::power(1.0, 0.5).to_json()}, {"grid", 1024}, {"k_min", 3},
                         {"k_max", 10}, {"corridor", {0.0, 1.25}}, {"check_last", 3}}}};

    m["growth-expkilled"] = {{"command", "modulus"},
                             {"seed", seed},
                             {"n_rep", 200},
                             {"modulus",
                              {{"kind", "growth"}, {"alpha", 0.5},
                               {"kernel", KernelSpec::exp_killed(1.0, ScalarFn::exponential(1.0, -1.0)).to_json()},
                               {"horizons", {100.0, 1000.0, 10000.0}}, {"spacing", 1.0}, {"corridor", {0.5, 1.3}}}}};

    const SeqFn seq_f = SeqFn::one_minus(SeqFn::geometric(1.0, 0.5));
    m["sequence-discrete"] = {
        {"command", "modulus"},
        {"seed", seed},
        {"n_rep", 200},
        {"modulus",
         {{"kind", "sequence"}, {"alpha", 0.5},
          {"kernel", KernelSpec::discrete_seq(SeqFn::power(1.0, 2.0), seq_f, seq_f).to_json()}, {"k_min", 3},
          {"k_max", 7}, {"corridor", {0.0, 1.25}}, {"check_last", 3}}}};

    m["coupling-cuberoot"] = {{"command", "coupling"},
                              {"seed", seed},
                              {"n_rep", 100000},
                              {"f", ScalarFn::power(1.0, 1.0 / 3.0).to_json()},
                              {"alpha", 0.7},
                              {"t_grid", {1e-2, 1e-4, 1e-6}}};

    const auto& cal = shipped_calibration();
    m["calibrate-table"] = {{"command", "calibrate"},
                            {"seed", cal.seed},
                            {"n_rep", cal.n_rep},
                            {"alphas", {0.5, 0.7, 1.0, 1.3}},
                            {"safety", cal.safety},
                            {"generated_at", cal.generated_at}};

    m["kernel-audit-fbmq-skewed"] = {
        {"command", "audit"},
        {"audit", "kernel"},
        {"spec", {{"alpha", 0.5}, {"kernel", KernelSpec::fbmq(0.5, 0.5).to_json()},
                  {"points", {-1.0, -0.5, -0.1, 0.1, 0.25, 0.5, 1.0, 2.0}}}}};

    std::vector<double> geo;
    for (int j = 1; j <= 6; ++j) geo.push_back(std::pow(16.0, j));
    m["lower-bound-fbmq"] = {{"command", "audit"},
                             {"audit", "lower-bound"},
                             {"spec", {{"alpha", 0.5}, {"kernel", KernelSpec::fbmq(0.5, 0.0).to_json()}, {"points", geo}}}};
    return m;
  }();
  return reg;
}

inline nlohmann::json preset(const std::string& name) {
  const auto& reg = preset_registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw usage_error("unknown preset '" + name + "'");
  return it->second;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> v;
  for (const auto& [k, _] : preset_registry()) v.push_back(k);
  return v;
}

}  // namespace permanental
