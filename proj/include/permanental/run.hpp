#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "permanental/experiments.hpp"
#include "permanental/io.hpp"
#include "permanental/presets.hpp"

#ifndef PERMANENTAL_VERSION
#define PERMANENTAL_VERSION "0.0.0"
#endif

namespace permanental {

inline const char* version() { return PERMANENTAL_VERSION; }

struct RunOutput {
  ExperimentReport report;
  nlohmann::json document;                      // report plus version, command, seed, config hash
  std::optional<nlohmann::json> calibration;    // calibrate only
  std::optional<SampleBatch> batch;             // sample only
};

namespace detail {

inline PairKernel pair_from_json(const nlohmann::json& j) {
  return PairKernel::from_values(j.at("b").get<double>(), j.at("a").get<double>(), j.at("gamma").get<double>());
}

inline ExperimentReport run_audit(const nlohmann::json& c, std::uint64_t seed, std::size_t n_rep, unsigned workers) {
  const std::string kind = c.at("audit").get<std::string>();
  if (kind == "orlicz") {
    std::vector<std::pair<double, double>> grid;
    for (const auto& g : c.at("grid")) grid.emplace_back(g.at(0).get<double>(), g.at(1).get<double>());
    return orlicz_audit(grid);
  }
  if (kind == "inverses")
    return inverse_audit(c.value("n_random", 36), c.value("max_n", 12), c.value("theta", 2.0), c.value("theta_n", 12),
                         seed);
  if (kind == "mmatrix")
    return mmatrix_audit(KernelSpec::from_json(c.at("kernel")), c.value("max_m", 12),
                         matrix_from_json(c.at("counterexample")));
  if (kind == "density") {
    std::vector<DensityCase> cases;
    for (const auto& d : c.at("cases")) cases.push_back({pair_from_json(d), d.at("alpha").get<double>()});
    return density_coherence(cases, n_rep, seed, workers, c.value("bins", 20));
  }
  if (kind == "kernel") return kernel_audit(PermanentalSpec::from_json(c.at("spec")));
  if (kind == "lower-bound") {
    const auto spec = PermanentalSpec::from_json(c.at("spec"));
    const auto lb = lower_bound_conditions(kernel_matrix(normalize(spec.kernel), spec.points));
    ExperimentReport r;
    r.experiment_id = "lower_bound_conditions";
    r.spec = spec.to_json();
    r.summary = lb.to_json();
    r.summary["note"] = "no smallness threshold is applied; interpretation is left to the caller";
    return r;
  }
  throw usage_error("unknown audit '" + kind + "'");
}

}  // namespace detail

// Executes one configuration. `cfg` must contain "command"; seed and n_rep
// default to the documented constants. Results do not depend on `workers`.
inline RunOutput run_config(const nlohmann::json& cfg, unsigned workers = 1) {
  if (!cfg.is_object() || !cfg.contains("command")) throw usage_error("config needs a \"command\" field");
  const std::string cmd = cfg.at("command").get<std::string>();
  const std::uint64_t seed = cfg.value("seed", default_seed);
  const std::size_t n_rep = cfg.value("n_rep", std::size_t{100000});
  if (n_rep == 0) throw usage_error("n_rep must be positive");
  RunOutput out;
  auto& r = out.report;
  try {
    if (cmd == "verify-lt") {
      const auto spec = PermanentalSpec::from_json(cfg.at("spec"));
      const auto grid = cfg.contains("s_grid") ? cfg.at("s_grid").get<std::vector<std::vector<double>>>()
                                               : default_s_grid(spec);
      r = verify_laplace(spec, grid, n_rep, seed, workers);
    } else if (cmd == "verify-tail") {
      const auto lambdas = cfg.value("lambda", std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
      if (cfg.value("stress", false)) {
        r = tail_stress_experiment(cfg.at("alphas").get<std::vector<double>>(), lambdas, n_rep, seed, workers,
                                   cfg.value("slope_min_ratio", 0.9));
      } else {
        std::optional<double> c;
        if (cfg.contains("C_alpha")) c = cfg.at("C_alpha").get<double>();
        r = verify_tail(detail::pair_from_json(cfg.at("pair")), cfg.at("alpha").get<double>(), lambdas, n_rep, seed,
                        workers, c, cfg.value("check_slope", true));
      }
    } else if (cmd == "modulus") {
      r = modulus_experiment(ModulusConfig::from_json(cfg.at("modulus")), n_rep, seed, workers);
    } else if (cmd == "rebirth") {
      Matrix u;
      if (cfg.contains("generator")) u = inverse(-matrix_from_json(cfg.at("generator")));
      else u = matrix_from_json(cfg.at("green_matrix"));
      r = rebirth_green_experiment(u, cfg.at("mu").get<std::vector<double>>(), n_rep,
                                   cfg.value("horizon", std::numeric_limits<double>::infinity()), seed, workers);
    } else if (cmd == "coupling") {
      r = coupling_ratio_experiment(ScalarFn::from_json(cfg.at("f")), cfg.at("alpha").get<double>(),
                                    cfg.at("t_grid").get<std::vector<double>>(), n_rep, seed, workers,
                                    cfg.value("check_precondition", true));
    } else if (cmd == "calibrate") {
      const auto t = calibrate_tail_constant(cfg.at("alphas").get<std::vector<double>>(), n_rep, seed, workers,
                                             cfg.value("safety", 1.5), cfg.value("generated_at", std::string("unspecified")));
      r.experiment_id = "calibrate";
      r.seed = seed;
      r.n_rep = n_rep;
      r.columns = {"alpha", "C_alpha", "max_ratio"};
      for (const auto& e : t.entries) r.rows.push_back({e.alpha, e.c_alpha, e.max_ratio});
      out.calibration = t.to_json();
      r.summary = *out.calibration;
    } else if (cmd == "sample") {
      const auto spec = PermanentalSpec::from_json(cfg.at("spec"));
      const auto mode = cfg.value("mode", std::string("joint")) == "pairwise" ? PathMode::pairwise : PathMode::joint;
      out.batch = sample_path_grid(spec, n_rep, seed, workers, mode);
      r.experiment_id = "sample";
      r.spec = spec.to_json();
      r.seed = seed;
      r.n_rep = n_rep;
      r.summary = {{"sampler", sampler_name(out.batch->sampler)}, {"n_points", out.batch->n_points()}};
    } else if (cmd == "audit") {
      r = detail::run_audit(cfg, seed, n_rep, workers);
      r.seed = seed;
    } else {
      throw usage_error("unknown command '" + cmd + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw usage_error(std::string("config: ") + e.what());
  }
  out.document = r.to_json();
  out.document["version"] = version();
  out.document["command"] = cmd;
  out.document["config"] = cfg;
  out.document["config_hash"] = config_hash(cfg);
  return out;
}

}  // namespace permanental
