// qasat: generation, simulation and analysis runs with reproducible manifests.
//
// Exit codes: 0 success, 1 replay mismatch or internal error, 2 bad input,
// 3 resource or generation budget exceeded, 4 convergence failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "commands.hpp"

using namespace qasat;
using namespace qasat::cli;

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string utc_stamp(const char* format) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, format, &tm);
  return buf;
}

json input_hashes(const std::vector<fs::path>& inputs) {
  json out = json::array();
  for (const auto& p : inputs) out.push_back({{"path", p.string()}, {"sha256", sha256_hex(io::read_text(p))}});
  return out;
}

struct RunRecord {
  fs::path dir;
  json manifest;
};

// Writes runs/<timestamp>-<hash>/ with manifest.json, results.json and the run's
// own files, plus any shared tree files under `root`.
RunRecord persist(const fs::path& root, const std::string& command, const json& params, const Output& out) {
  json manifest = {{"schema", io::kSchema},
                   {"artifact_version", QASAT_VERSION},
                   {"command", command},
                   {"parameters", params},
                   {"seed", params.value("seed", std::uint64_t{0})},
                   {"inputs", input_hashes(out.inputs)}};
  const std::string hash = sha256_hex(manifest.dump()).substr(0, 12);
  manifest["created"] = utc_stamp("%Y-%m-%dT%H:%M:%SZ");

  fs::path dir = root / "runs" / (utc_stamp("%Y%m%dT%H%M%SZ") + "-" + hash);
  for (int i = 2; fs::exists(dir); ++i) dir = root / "runs" / (utc_stamp("%Y%m%dT%H%M%SZ") + "-" + hash + "-" + std::to_string(i));

  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  json results = {{"schema", io::kSchema}, {"manifest", manifest}, {"warnings", out.warnings}, {"payload", out.payload}};
  io::write_text(dir / "results.json", results.dump(2) + "\n");
  for (const auto& [name, text] : out.run_files) io::write_text(dir / name, text);
  for (const auto& [name, text] : out.tree_files) io::write_text(root / name, text);
  return {dir, manifest};
}

int execute(const fs::path& root, const std::string& command, const json& params) {
  const Output out = dispatch(command, params);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  const auto rec = persist(root, command, params, out);
  std::cout << out.payload.dump(2) << "\n" << "run: " << rec.dir.string() << "\n";
  return 0;
}

// Re-runs a stored manifest and compares payload and run files byte for byte.
int replay(const fs::path& root, const fs::path& run_dir) {
  const auto manifest = io::parse_json(io::read_text(run_dir / "manifest.json"), "manifest");
  const auto stored = io::parse_json(io::read_text(run_dir / "results.json"), "results");
  const auto command = manifest.at("command").get<std::string>();
  const auto& params = manifest.at("parameters");
  std::vector<std::string> mismatches;
  for (const auto& in : manifest.at("inputs")) {
    const fs::path p = in.at("path").get<std::string>();
    if (!fs::exists(p) || sha256_hex(io::read_text(p)) != in.at("sha256").get<std::string>())
      mismatches.push_back("input changed: " + p.string());
  }
  const Output out = dispatch(command, params);
  if (out.payload.dump() != stored.at("payload").dump()) mismatches.push_back("payload differs");
  for (const auto& [name, text] : out.run_files)
    if (!fs::exists(run_dir / name) || io::read_text(run_dir / name) != text) mismatches.push_back(name + " differs");

  Output report;
  report.payload = {{"replayed", run_dir.string()}, {"command", command}, {"identical", mismatches.empty()},
                    {"mismatches", mismatches}};
  report.inputs = {run_dir / "manifest.json"};
  const auto rec = persist(root, "replay", {{"run", run_dir.string()}}, report);
  std::cout << report.payload.dump(2) << "\n" << "run: " << rec.dir.string() << "\n";
  return mismatches.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum annealing of 2-SAT problems: state-vector simulation and analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  app.add_option("--out", out_dir, "Root directory for runs/ and ensembles/")->capture_default_str();
  app.add_option("--seed", seed, "Root seed for generation")->capture_default_str();

  // shared simulation flags
  std::string problem, targets = "auto", schedule, init, grid;
  double ta = 100.0, tau = 0.02, sr = 0.7, tw = 0.0;
  bool no_gate = false;
  int levels = 8, trace = 0;
  auto problem_opts = [&](CLI::App* sub) {
    sub->add_option("--problem", problem, "Fixture name (1, 3, 230) or problem file (.json, .cnf)")->required();
    sub->add_option("--schedule", schedule, "Schedule CSV with columns s,A,B (default linear)");
  };
  auto sim_opts = [&](CLI::App* sub) {
    sub->add_option("--ta", ta, "Annealing time T_A")->capture_default_str();
    sub->add_option("--tau", tau, "Initial Trotter step")->capture_default_str();
    sub->add_option("--targets", targets, "Comma-separated bit strings, or auto for all solutions")->capture_default_str();
    sub->add_flag("--no-gate", no_gate, "Run once at --tau without the step-size convergence gate");
  };

  int n = 6, c = 1, count = 10;
  std::vector<int> degeneracies{1, 2, 4};
  auto* gen = app.add_subcommand("gen", "Generate a satisfiable 2-SAT ensemble bucketed by solution count");
  gen->add_option("--n", n, "Number of variables")->capture_default_str();
  gen->add_option("--c", c, "Clause offset, M = N + c")->capture_default_str();
  gen->add_option("--degeneracies", degeneracies, "Solution counts to collect")->delimiter(',')->capture_default_str();
  gen->add_option("--count", count, "Problems per bucket")->capture_default_str();

  auto* anneal = app.add_subcommand("anneal", "Standard forward anneal");
  problem_opts(anneal);
  sim_opts(anneal);

  auto* reverse = app.add_subcommand("reverse", "Reverse anneal from a classical state");
  problem_opts(reverse);
  sim_opts(reverse);
  reverse->add_option("--init", init, "Initial bit string, or 1-based solution number")->required();
  reverse->add_option("--sr", sr, "Reversal point s_r")->capture_default_str();
  reverse->add_option("--tw", tw, "Waiting time at s_r")->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "Instantaneous spectrum along s, optional overlap trace");
  problem_opts(spectrum);
  spectrum->add_option("--levels", levels, "Number of lowest levels")->capture_default_str();
  grid = "0:1:51";
  spectrum->add_option("--grid", grid, "s grid as start:stop:count or a comma list")->capture_default_str();
  spectrum->add_option("--trace", trace, "Overlap samples along an anneal (0 disables)")->capture_default_str();
  spectrum->add_option("--ta", ta, "Annealing time for the trace")->capture_default_str();
  spectrum->add_option("--tau", tau, "Trotter step for the trace")->capture_default_str();
  spectrum->add_option("--init", init, "Trace a reverse anneal from this state instead");
  spectrum->add_option("--sr", sr, "Reversal point for the trace")->capture_default_str();
  spectrum->add_option("--tw", tw, "Waiting time for the trace")->capture_default_str();

  auto* perturb = app.add_subcommand("perturb", "First-order degenerate perturbation prediction");
  perturb->add_option("--problem", problem, "Fixture name or problem file")->required();
  perturb->add_option("--targets", targets, "Ground states in order, or auto")->capture_default_str();

  std::string scan_grid = "1:3000:44";
  auto* scan = app.add_subcommand("scan", "1-p over a log-spaced annealing-time grid with two-regime fit");
  problem_opts(scan);
  scan->add_option("--grid", scan_grid, "T_A grid as start:stop:count (log-spaced) or a comma list")->capture_default_str();
  scan->add_option("--tau", tau, "Step cap; each point uses min(tau, T_A/50)")->capture_default_str();
  scan->add_option("--targets", targets, "Comma-separated bit strings, or auto")->capture_default_str();

  auto* fit = app.add_subcommand("fit", "Equilibrium and scaling fits");
  fit->require_subcommand(1);
  std::vector<std::string> counts, fit_problems;
  std::string records, input, statistic = "median";
  double alpha = 1.0;
  auto* fit_beta = fit->add_subcommand("beta", "Fit beta of the equilibrium model to measured success");
  fit_beta->add_option("--counts", counts, "Sample counts CSV (bitstring,count) with optional <file>.json sidecar");
  fit_beta->add_option("--problem", fit_problems, "Problem for each counts file, in the same order");
  fit_beta->add_option("--alpha", alpha, "Problem Hamiltonian rescaling used on the annealer")->capture_default_str();
  fit_beta->add_option("--records", records, "CSV of g0,g1,delta_e,p instead of counts files");
  auto* fit_chain = fit->add_subcommand("chain", "Fit beta of the truncated chain partition sum");
  fit_chain->add_option("--records", records, "CSV of n,delta_e,p")->required();
  auto* fit_scaling = fit->add_subcommand("scaling", "Exponential scaling exponent of a statistic versus N");
  fit_scaling->add_option("--input", input, "CSV of N,value (one row per instance)")->required();
  fit_scaling->add_option("--statistic", statistic, "median or mean")->capture_default_str();

  std::string run_dir;
  auto* rep = app.add_subcommand("replay", "Re-run a stored manifest and compare results byte for byte");
  rep->add_option("run", run_dir, "Run directory containing manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const fs::path root(out_dir);
    if (*rep) return replay(root, run_dir);
    std::string command;
    json params;
    if (*gen) {
      command = "gen";
      params = {{"n", n}, {"c", c}, {"degeneracies", degeneracies}, {"count", count}, {"seed", seed}};
    } else if (*anneal || *reverse) {
      command = *anneal ? "anneal" : "reverse";
      params = {{"problem", problem}, {"schedule", schedule}, {"ta", ta}, {"tau", tau}, {"targets", targets},
                {"gate", !no_gate}};
      if (*reverse) {
        params["init"] = init;
        params["sr"] = sr;
        params["tw"] = tw;
      }
    } else if (*spectrum) {
      command = "spectrum";
      params = {{"problem", problem}, {"schedule", schedule}, {"levels", levels}, {"grid", grid}, {"trace", trace},
                {"ta", ta}, {"tau", tau}, {"init", init}, {"sr", sr}, {"tw", tw}};
    } else if (*perturb) {
      command = "perturb";
      params = {{"problem", problem}, {"targets", targets}};
    } else if (*scan) {
      command = "scan";
      params = {{"problem", problem}, {"schedule", schedule}, {"grid", scan_grid}, {"tau", tau}, {"targets", targets}};
    } else if (*fit_beta) {
      command = "fit beta";
      if (!records.empty())
        params = {{"records", records}};
      else
        params = {{"counts", counts}, {"problems", fit_problems}, {"alpha", alpha}};
    } else if (*fit_chain) {
      command = "fit chain";
      params = {{"records", records}};
    } else if (*fit_scaling) {
      command = "fit scaling";
      params = {{"input", input}, {"statistic", statistic}};
    }
    return execute(root, command, params);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << " (achieved " << e.achieved() << ")\n";
    return 4;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
