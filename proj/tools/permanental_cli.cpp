// permanental: command-line front end for the experiments and presets.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "permanental/run.hpp"

namespace fs = std::filesystem;
using namespace permanental;

namespace {

enum Exit { ok = 0, experiment_failed = 1, usage = 2, capability = 3 };

struct Common {
  std::string preset, config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_rep;
  std::string out = "reports";
  std::string format = "json";
  unsigned workers = 1;
};

void add_common(CLI::App* sub, Common& c, bool sample) {
  sub->add_option("--preset", c.preset, "built-in configuration name");
  sub->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "64-bit seed (default " + std::to_string(default_seed) + ")");
  sub->add_option("--n-rep", c.n_rep, "number of replicates");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  if (sample)
    sub->add_option("--format", c.format, "csv, json or bin")->check(CLI::IsMember({"csv", "json", "bin"}));
  else
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--workers", c.workers, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));
}

nlohmann::json load_config(const std::string& cmd, const Common& c) {
  if (c.preset.empty() == c.config.empty()) throw usage_error("give exactly one of --preset or --config");
  nlohmann::json cfg;
  if (!c.preset.empty()) {
    cfg = preset(c.preset);
  } else {
    try {
      cfg = nlohmann::json::parse(read_text_file(c.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw usage_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.contains("command")) cfg["command"] = cmd;
  }
  if (cfg.value("command", std::string()) != cmd)
    throw usage_error("configuration is for '" + cfg.value("command", std::string("?")) + "', not '" + cmd + "'");
  if (c.seed) cfg["seed"] = *c.seed;
  if (c.n_rep) cfg["n_rep"] = *c.n_rep;
  return cfg;
}

int run_command(const std::string& cmd, const Common& c) {
  const auto cfg = load_config(cmd, c);
  const std::string base = c.preset.empty() ? fs::path(c.config).stem().string() : c.preset;
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = run_config(cfg, c.workers);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path dir(c.out);

  if (out.batch) {
    const auto& b = *out.batch;
    if (c.format == "bin") write_text_file(dir / (base + ".bin"), batch_to_binary(b));
    else if (c.format == "csv") write_text_file(dir / (base + ".csv"), batch_to_csv(b));
    else {
      auto j = batch_to_json(b);
      j["version"] = version();
      j["config_hash"] = config_hash(cfg);
      write_text_file(dir / (base + ".json"), j.dump(2) + "\n");
    }
    std::printf("sampled %zu x %zu with %s -> %s\n", b.n_rep, b.n_points(), sampler_name(b.sampler).c_str(),
                dir.string().c_str());
    return ok;
  }

  write_text_file(dir / (base + ".json"), out.document.dump(2) + "\n");
  if (c.format == "csv") write_text_file(dir / (base + ".csv"), out.report.to_csv());
  if (out.calibration) write_text_file(dir / "calibration_table.json", out.calibration->dump(2) + "\n");
  for (const auto& v : out.report.verdicts)
    std::printf("%s %s: %.6g %s %.6g\n", v.pass ? "PASS" : "FAIL", v.criterion.c_str(), v.observed, v.relation.c_str(),
                v.tolerance);
  std::printf("%s %s seed=%llu hash=%s (%.1fs) -> %s\n", out.report.pass() ? "PASS" : "FAIL", base.c_str(),
              static_cast<unsigned long long>(out.report.seed), config_hash(cfg).c_str(), secs,
              (dir / (base + ".json")).string().c_str());
  return out.report.pass() ? ok : experiment_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permanental process experiments"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-presets", list, "print built-in preset names");
  std::string show;
  app.add_option("--show-preset", show, "print a preset as JSON (usable with --config)");
  app.set_version_flag("--version", std::string(version()));

  // kernel-eval
  auto* ke = app.add_subcommand("kernel-eval", "evaluate u(s,t) for a kernel family");
  std::string family = "fbmq", kernel_file;
  double g = 0.5, beta = 0.0, rho = 1.0, lambda = 1.0, s = 0.0, t = 0.0;
  int digits = 6;
  ke->add_option("--family", family, "fbmq, levy_exp_killed, exp_killed or brownian_hit0")
      ->check(CLI::IsMember({"fbmq", "levy_exp_killed", "exp_killed", "brownian_hit0"}));
  ke->add_option("--kernel", kernel_file, "kernel JSON file instead of --family")->check(CLI::ExistingFile);
  ke->add_option("--gamma", g);
  ke->add_option("--beta", beta);
  ke->add_option("--rho", rho);
  ke->add_option("--lambda", lambda);
  ke->add_option("--s", s)->required();
  ke->add_option("--t", t)->required();
  ke->add_option("--digits", digits)->check(CLI::Range(1, 17));

  const char* commands[] = {"sample", "verify-lt", "verify-tail", "modulus", "rebirth", "coupling", "calibrate", "audit"};
  std::map<std::string, Common> opts;
  std::map<std::string, CLI::App*> subs;
  for (const char* name : commands) {
    subs[name] = app.add_subcommand(name, std::string("run ") + name);
    add_common(subs[name], opts[name], std::string(name) == "sample");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }

  try {
    if (list) {
      for (const auto& n : preset_names()) std::printf("%-26s %s\n", n.c_str(), preset(n).at("command").get<std::string>().c_str());
      return ok;
    }
    if (!show.empty()) {
      std::printf("%s\n", preset(show).dump(2).c_str());
      return ok;
    }
    if (ke->parsed()) {
      KernelSpec k = KernelSpec::fbmq(0.5, 0.0);
      if (!kernel_file.empty()) k = KernelSpec::from_json(nlohmann::json::parse(read_text_file(kernel_file)));
      else if (family == "fbmq") k = KernelSpec::fbmq(g, beta);
      else if (family == "levy_exp_killed") k = KernelSpec::levy_exp_killed(rho, g, beta);
      else if (family == "exp_killed") k = KernelSpec::exp_killed(lambda, ScalarFn::zero());
      else k = KernelSpec::brownian_hit0(ScalarFn::zero());
      std::printf("%.*g\n", digits, k.eval(s, t));
      return ok;
    }
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return run_command(name, opts[name]);
    std::cout << app.help();
    return usage;
  } catch (const capability_error& e) {
    std::fprintf(stderr, "capability error: %s\n", e.what());
    return capability;
  } catch (const usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return usage;
  } catch (const parameter_error& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return usage;
  } catch (const domain_error& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return usage;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return usage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return experiment_failed;
  }
}
