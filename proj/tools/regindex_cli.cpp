// Command-line surface of the index-theorem toolkit: hypothesis checks,
// equilibrium enumeration, and the full homotopy-trace verification run.
//
// Exit codes: 0 = success / verified, 1 = domain failure (reported
// verdict), 2 = usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "regindex/fixtures.hpp"
#include "regindex/verifier.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct CliOptions {
  std::string config;
  std::uint64_t seed = 1;
  double epsilon = 1e-2;
  double tol = 1e-11;
  std::string out = ".";
  int jobs = 1;
  std::string format = "both";
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

regindex::ExcessDemandModel load_model(const std::string& config) {
  if (config.empty()) throw ConfigError("--config is required");
  if (!fs::exists(config)) {
    if (regindex::fixtures::is_builtin(config)) {
      return regindex::fixtures::builtin_model(config);
    }
    throw ConfigError("config is neither a file nor a built-in name: " +
                      config);
  }
  std::ifstream in(config);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "version" && key != "economy") {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (!j.contains("version") || j.at("version") != 1) {
    throw ConfigError("config requires \"version\": 1");
  }
  if (!j.contains("economy")) throw ConfigError("config requires \"economy\"");
  const json& economy = j.at("economy");
  if (economy.is_string()) {
    const std::string name = economy.get<std::string>();
    if (!regindex::fixtures::is_builtin(name)) {
      throw ConfigError("unknown built-in economy: " + name);
    }
    return regindex::fixtures::builtin_model(name);
  }
  try {
    return regindex::build_ces_economy(
        regindex::fixtures::economy_spec_from_json(economy));
  } catch (const regindex::InvalidSpec& e) {
    throw ConfigError(std::string("invalid economy spec: ") + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

regindex::VerifierConfig make_verifier_config(const CliOptions& opt) {
  regindex::VerifierConfig cfg;
  cfg.seed = opt.seed;
  cfg.solver.seed = opt.seed;
  cfg.solver.newton_tol = opt.tol;
  cfg.epsilon_start = opt.epsilon;
  return cfg;
}

int cmd_check(const CliOptions& opt) {
  const regindex::ExcessDemandModel model = load_model(opt.config);
  const regindex::VerificationReport report =
      regindex::verify_hypotheses(model, opt.seed);
  ordered_json j;
  j["model"] = model.label;
  j["seed"] = opt.seed;
  j["walras_max_residual"] = report.walras_max_residual;
  j["walras_ok"] = report.walras_ok;
  j["homogeneity_max_residual"] = report.homogeneity_max_residual;
  j["homogeneity_ok"] = report.homogeneity_ok;
  j["lower_bound_estimate"] = report.lower_bound_estimate;
  j["lower_bound_ok"] = report.lower_bound_ok;
  j["boundary_blowup_ok"] = report.blowup_ok;
  j["boundary_blowup_vacuous"] = report.blowup.vacuous;
  j["note"] = "boundary checks are sampled, not exhaustive";
  j["passed"] = report.passed();
  write_file(fs::path(opt.out) / "check_report.json", j.dump(2) + "\n");
  std::cout << (report.passed() ? "hypotheses: pass" : "hypotheses: FAIL")
            << "\n";
  return report.passed() ? 0 : 1;
}

int cmd_solve(const CliOptions& opt) {
  const regindex::ExcessDemandModel model = load_model(opt.config);
  regindex::SolverConfig cfg;
  cfg.seed = opt.seed;
  cfg.newton_tol = opt.tol;
  std::vector<regindex::EquilibriumRecord> equilibria;
  try {
    equilibria = regindex::find_equilibria(model, 1e-3, cfg);
  } catch (const regindex::NonRegularEquilibrium& e) {
    ordered_json j;
    j["model"] = model.label;
    j["verdict"] = "non_regular";
    j["detail"] = e.what();
    write_file(fs::path(opt.out) / "equilibria.json", j.dump(2) + "\n");
    std::cerr << "non_regular: " << e.what() << "\n";
    return 1;
  }

  if (opt.format == "csv" || opt.format == "both") {
    std::string csv;
    for (int i = 1; i <= model.dimension; ++i) {
      csv += (i > 1 ? "," : "") + std::string("p_") + std::to_string(i);
    }
    csv += ",residual,g,index\n";
    for (const auto& rec : equilibria) {
      for (int i = 0; i < model.dimension; ++i) {
        if (i) csv += ",";
        csv += format_double(rec.price.coords()(i));
      }
      csv += "," + format_double(rec.residual) + "," +
             format_double(rec.g_value) + "," + std::to_string(rec.index) +
             "\n";
    }
    write_file(fs::path(opt.out) / "equilibria.csv", csv);
  }
  if (opt.format == "json" || opt.format == "both") {
    ordered_json j;
    j["model"] = model.label;
    j["seed"] = opt.seed;
    ordered_json rows = ordered_json::array();
    int index_sum = 0;
    for (const auto& rec : equilibria) {
      ordered_json rj;
      ordered_json p = ordered_json::array();
      for (int i = 0; i < model.dimension; ++i) p.push_back(rec.price.coords()(i));
      rj["p"] = std::move(p);
      rj["residual"] = rec.residual;
      rj["g"] = rec.g_value;
      rj["index"] = rec.index;
      rows.push_back(std::move(rj));
      index_sum += rec.index;
    }
    j["equilibria"] = std::move(rows);
    j["count"] = equilibria.size();
    j["index_sum"] = index_sum;
    write_file(fs::path(opt.out) / "equilibria.json", j.dump(2) + "\n");
  }
  std::cout << "equilibria: " << equilibria.size() << "\n";
  return 0;
}

int cmd_trace(const CliOptions& opt) {
  const regindex::ExcessDemandModel model = load_model(opt.config);
  const regindex::TheoremReport report =
      regindex::run_theorem_check(model, make_verifier_config(opt));
  if (opt.format == "csv" || opt.format == "both") {
    std::ostringstream csv;
    regindex::write_trace_csv(csv, report.components);
    write_file(fs::path(opt.out) / "trace.csv", csv.str());
  }
  if (opt.format == "json" || opt.format == "both") {
    write_file(fs::path(opt.out) / "trace_summary.json",
               regindex::trace_summary_json(report).dump(2) + "\n");
    write_file(fs::path(opt.out) / "theorem_report.json",
               regindex::report_json(report).dump(2) + "\n");
  }
  std::cout << regindex::report_text(report);
  return report.verdict == regindex::Verdict::verified ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"index-theorem toolkit for excess-demand fields on the "
               "positive price sphere"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config,
                    "JSON config path or built-in economy name")
        ->required();
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--epsilon", opt.epsilon, "starting truncation epsilon");
    sub->add_option("--tol", opt.tol, "Newton residual tolerance");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--jobs", opt.jobs, "upper bound on worker threads");
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "both"}));
  };

  CLI::App* check = app.add_subcommand("check", "hypothesis checks (i)-(iii)");
  CLI::App* solve = app.add_subcommand("solve", "enumerate equilibria + indices");
  CLI::App* trace = app.add_subcommand("trace", "full homotopy verification");
  add_common(check);
  add_common(solve);
  add_common(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return cmd_check(opt);
    if (solve->parsed()) return cmd_solve(opt);
    if (trace->parsed()) return cmd_trace(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
