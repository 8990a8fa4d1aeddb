#pragma once

// Command implementations for the qasat tool. Every command maps a parameter
// object to a deterministic payload plus files; the driver in qasat.cpp adds
// the manifest, timestamps and the on-disk layout.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qasat/io.hpp"
#include "qasat/qasat.hpp"

namespace qasat::cli {

using io::json;
namespace fs = std::filesystem;

struct Output {
  json payload = json::object();
  std::map<std::string, std::string> run_files;   // relative to the run directory
  std::map<std::string, std::string> tree_files;  // relative to --out
  std::vector<std::string> warnings;
  std::vector<fs::path> inputs;  // files whose hashes go into the manifest
};

// ---------------------------------------------------------------- parsing helpers

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// "a:b:n" gives n points from a to b (log-spaced if `log`), otherwise a comma list.
inline std::vector<double> parse_grid(const std::string& spec, bool log) {
  std::vector<double> out;
  const auto parts = split(spec, ':');
  if (parts.size() == 3) {
    const double a = io::parse_double(parts[0], "grid start");
    const double b = io::parse_double(parts[1], "grid stop");
    const double n = io::parse_double(parts[2], "grid count");
    if (n < 2 || n != std::floor(n)) throw InputError("grid count must be an integer >= 2");
    if (log && !(a > 0.0 && b > 0.0)) throw InputError("log-spaced grid needs positive bounds");
    for (int i = 0; i < static_cast<int>(n); ++i) {
      const double f = i / (n - 1.0);
      out.push_back(log ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a));
    }
  } else {
    for (const auto& item : split(spec, ',')) out.push_back(io::parse_double(item, "grid value"));
  }
  if (out.empty()) throw InputError("empty grid: " + spec);
  return out;
}

struct LoadedProblem {
  TwoSatProblem problem;
  std::string reference;
  std::vector<BasisState> conventional;  // fixtures only: psi_0^1 .. psi_0^4 in conventional order
};

/// A fixture name ("1", "3", "230") or a problem file (JSON or DIMACS).
inline LoadedProblem load_problem_ref(const std::string& ref, Output& out) {
  for (const auto& name : fixtures::names())
    if (ref == name) {
      auto fx = fixtures::by_name(name);
      return {std::move(fx.problem), "fixture:" + name, std::move(fx.ground_states)};
    }
  const fs::path path(ref);
  if (!fs::exists(path)) throw InputError("no fixture or file named " + ref);
  out.inputs.push_back(path);
  return {io::load_problem(path), ref, {}};
}

inline Schedule load_schedule(const json& params, Output& out) {
  const auto file = params.value("schedule", std::string{});
  if (file.empty()) return Schedule::linear();
  out.inputs.push_back(file);
  return io::schedule_from_csv(io::read_text(file));
}

/// Satisfying assignments, in the conventional order for fixtures.
inline std::vector<BasisState> solutions_of(const LoadedProblem& lp) {
  return lp.conventional.empty() ? enumerate_solutions(lp.problem) : lp.conventional;
}

/// Explicit comma-separated bit strings, or "auto" for every satisfying assignment.
inline std::vector<BasisState> resolve_targets(const LoadedProblem& lp, const std::string& spec) {
  const TwoSatProblem& p = lp.problem;
  std::vector<BasisState> targets;
  if (spec.empty() || spec == "auto") {
    targets = solutions_of(lp);
    if (targets.empty()) throw InputError("problem " + p.label + " is unsatisfiable; pass --targets explicitly");
    return targets;
  }
  for (const auto& bits : split(spec, ',')) {
    targets.push_back(BitString::parse(bits));
    if (targets.back().size() != p.n_vars) throw InputError("target " + bits + " has the wrong length");
  }
  return targets;
}

inline json gate_json(const GatedResult& g) {
  return {{"tau", g.tau}, {"max_change", g.max_change}, {"converged", g.converged}};
}

// ---------------------------------------------------------------- gen

inline Output cmd_gen(const json& params) {
  Output out;
  GenerationConfig cfg;
  cfg.n_vars = params.at("n").get<int>();
  cfg.clause_offset_c = params.at("c").get<int>();
  cfg.seed = params.at("seed").get<std::uint64_t>();
  cfg.target_degeneracies.clear();
  for (int d : params.at("degeneracies").get<std::vector<int>>()) {
    if (d < 1) throw InputError("degeneracies must be positive");
    cfg.target_degeneracies.insert(d);
  }
  const int count = params.at("count").get<int>();
  const Ensemble e = generate_ensemble(cfg, count);

  double mu = 0.0;
  for (int c : e.satisfiable_counts) mu += c;
  mu /= static_cast<double>(e.candidates);
  const double expected = expected_degeneracy(2, cfg.n_clauses(), cfg.n_vars);

  json buckets = json::object();
  const std::string base = "ensembles/" + std::to_string(cfg.n_vars) + "/";
  for (const auto& [d, problems] : e.buckets) {
    const auto stats = degeneracy_stats(problems);
    json files = json::array();
    for (std::size_t i = 0; i < problems.size(); ++i) {
      TwoSatProblem p = problems[i];
      p.label = "n" + std::to_string(cfg.n_vars) + "-g" + std::to_string(d) + "-c" + p.label;
      json doc = {{"schema", io::kSchema}};
      doc.update(io::to_json(p));
      doc["ground_states"] = io::bits_json(enumerate_solutions(p));
      doc["fes_degeneracy"] = stats.fes_degeneracies[i];
      const std::string rel = base + std::to_string(d) + "/" + p.label + ".json";
      out.tree_files[rel] = doc.dump(2) + "\n";
      files.push_back(rel);
    }
    buckets[std::to_string(d)] = {{"count", problems.size()},
                                  {"fes_degeneracy_mean", stats.fes_degeneracy_mean},
                                  {"files", files}};
  }
  out.payload = {{"n_vars", cfg.n_vars},
                 {"n_clauses", cfg.n_clauses()},
                 {"candidates", e.candidates},
                 {"satisfiable", e.satisfiable},
                 {"mean_mu", mu},
                 {"expected_mu", expected},
                 {"mu_ratio", mu / expected},
                 {"buckets", buckets}};
  out.tree_files[base + "stats.json"] = out.payload.dump(2) + "\n";
  return out;
}

// ---------------------------------------------------------------- anneal / reverse

inline Output cmd_anneal(const json& params) {
  Output out;
  const auto lp = load_problem_ref(params.at("problem").get<std::string>(), out);
  const auto targets = resolve_targets(lp, params.value("targets", std::string("auto")));
  AnnealSpec spec{map_2sat(lp.problem), load_schedule(params, out), params.at("ta").get<double>(),
                  params.at("tau").get<double>()};
  spec.validate();
  const bool gate = params.value("gate", true);
  GatedResult g;
  if (gate) {
    g = run_standard_gated(spec, targets);
  } else {
    g.result = measure_probabilities(run_standard(spec), targets);
    g.result.protocol = "standard";
    g.result.T_A = spec.T_A;
    g.result.tau = g.tau = spec.tau;
  }
  const auto t = tts_result(std::min(1.0, g.result.total_success), spec.T_A);
  out.payload = {{"problem", lp.reference}, {"result", io::to_json(g.result)}, {"tts99", io::number(t.tts)}};
  if (gate) out.payload["gate"] = gate_json(g);
  out.payload["comparable"] = gate && g.converged;
  if (!(gate && g.converged)) out.warnings.push_back("step size not converged; result is not comparable across step sizes");
  return out;
}

inline BasisState resolve_init(const LoadedProblem& lp, const std::string& spec, Output& out) {
  const TwoSatProblem& p = lp.problem;
  const auto sols = solutions_of(lp);
  BasisState init;
  if (spec.find_first_not_of("0123456789") == std::string::npos && static_cast<int>(spec.size()) != p.n_vars) {
    const auto k = std::stoul(spec);  // 1-based index into the solution list
    if (k < 1 || k > sols.size()) throw InputError("--init index " + spec + " is not a solution number");
    return sols[k - 1];
  }
  init = BitString::parse(spec);
  if (init.size() != p.n_vars) throw InputError("--init has the wrong length");
  if (std::find(sols.begin(), sols.end(), init) == sols.end())
    out.warnings.push_back("initial state " + init.str() + " is not a solution of the problem");
  return init;
}

inline Output cmd_reverse(const json& params) {
  Output out;
  const auto lp = load_problem_ref(params.at("problem").get<std::string>(), out);
  const auto targets = resolve_targets(lp, params.value("targets", std::string("auto")));
  ReverseAnnealSpec spec{{map_2sat(lp.problem), load_schedule(params, out), params.at("ta").get<double>(),
                          params.at("tau").get<double>()},
                         params.at("sr").get<double>(),
                         params.at("tw").get<double>(),
                         resolve_init(lp, params.at("init").get<std::string>(), out)};
  spec.validate();
  const bool gate = params.value("gate", true);
  GatedResult g;
  if (gate) {
    g = run_reverse_gated(spec, targets);
  } else {
    g.result = measure_probabilities(run_reverse(spec), targets);
    g.result.protocol = "reverse";
    g.result.T_A = spec.base.T_A;
    g.result.tau = g.tau = spec.base.tau;
  }
  out.payload = {{"problem", lp.reference},
                 {"initial", spec.initial.str()},
                 {"s_r", spec.s_r},
                 {"T_W", spec.T_W},
                 {"result", io::to_json(g.result)}};
  if (gate) out.payload["gate"] = gate_json(g);
  out.payload["comparable"] = gate && g.converged;
  if (!(gate && g.converged)) out.warnings.push_back("step size not converged; result is not comparable across step sizes");
  return out;
}

// ---------------------------------------------------------------- spectrum

inline Output cmd_spectrum(const json& params) {
  Output out;
  const auto lp = load_problem_ref(params.at("problem").get<std::string>(), out);
  const auto model = map_2sat(lp.problem);
  const auto schedule = load_schedule(params, out);
  const int k = params.at("levels").get<int>();
  const auto grid = parse_grid(params.at("grid").get<std::string>(), false);
  const auto hist = energy_histogram(model);
  const int g0 = static_cast<int>(hist.ground_degeneracy());
  const EigenOptions eig;
  const auto slices = spectrum_scan(model, schedule, grid, k, eig);
  out.run_files["spectrum.csv"] = io::spectrum_csv(slices);

  json payload = {{"problem", lp.reference}, {"levels", k}, {"points", grid.size()}};
  if (hist.levels.size() > 1) {
    // gap between the ground state and the first level outside the ground manifold
    const auto gap = min_gap(model, schedule, 1, g0 + 1, grid, 1e-6, eig);
    payload["min_gap"] = {{"levels", {1, g0 + 1}}, {"s", gap.s_star}, {"gap", gap.gap}};
  }
  const int samples = params.value("trace", 0);
  if (samples > 0) {
    AnnealSpec spec{model, schedule, params.at("ta").get<double>(), params.at("tau").get<double>()};
    const auto init = params.value("init", std::string{});
    const auto trace = init.empty() ? overlap_trace(spec, k, samples, eig)
                                    : overlap_trace(ReverseAnnealSpec{spec, params.at("sr").get<double>(),
                                                                      params.at("tw").get<double>(),
                                                                      resolve_init(lp, init, out)},
                                                    k, samples, eig);
    out.run_files["overlaps.csv"] = io::overlap_csv(trace);
    payload["trace_samples"] = trace.samples.size();
  }
  out.payload = payload;
  return out;
}

// ---------------------------------------------------------------- perturb

inline Output cmd_perturb(const json& params) {
  Output out;
  const auto lp = load_problem_ref(params.at("problem").get<std::string>(), out);
  const auto gs = resolve_targets(lp, params.value("targets", std::string("auto")));
  const auto v = build_perturbation_matrix(gs);
  const auto pred = predict_sampling(v);
  out.payload = {{"problem", lp.reference}, {"perturbation", io::to_json(v, pred)}};
  if (pred.degenerate_ground) out.warnings.push_back("ground level of the perturbation is degenerate");
  return out;
}

// ---------------------------------------------------------------- scan

inline Output cmd_scan(const json& params) {
  Output out;
  const auto lp = load_problem_ref(params.at("problem").get<std::string>(), out);
  const auto targets = resolve_targets(lp, params.value("targets", std::string("auto")));
  const auto grid = parse_grid(params.at("grid").get<std::string>(), true);
  const auto scan = transition_scan(map_2sat(lp.problem), targets, load_schedule(params, out), grid,
                                    capped_tau(params.at("tau").get<double>()));
  std::vector<double> x, y, fit;
  for (std::size_t i = 0; i < scan.records.size(); ++i) {
    const auto& r = scan.records[i];
    x.push_back(r.T_A);
    y.push_back(r.one_minus_p);
    if (scan.split == 0)
      fit.push_back(std::nan(""));
    else if (i < scan.split)
      fit.push_back(std::exp(scan.exp_intercept - scan.rate * r.T_A));
    else
      fit.push_back(std::exp(scan.power_intercept) * std::pow(r.T_A, scan.power_exponent));
  }
  out.run_files["scan.csv"] = io::fit_csv(x, y, fit);
  out.payload = {{"problem", lp.reference}, {"scan", io::to_json(scan)}};
  if (scan.split == 0) out.warnings.push_back("too few points for the two-regime fit");
  return out;
}

// ---------------------------------------------------------------- fit

inline std::vector<std::vector<std::string>> read_table(const fs::path& path, std::size_t columns, Output& out) {
  out.inputs.push_back(path);
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(io::read_text(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = io::split_csv_line(line);
    if (cells.size() != columns)
      throw InputError(path.string() + ": expected " + std::to_string(columns) + " columns: " + line);
    const bool header = first && !std::isdigit(static_cast<unsigned char>(cells[0].front())) && cells[0].front() != '-' &&
                        cells[0].front() != '.';
    first = false;
    if (!header) rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw InputError(path.string() + " has no data rows");
  return rows;
}

inline Output cmd_fit_beta(const json& params) {
  Output out;
  std::vector<EquilibriumRecord> recs;
  json used = json::array();
  if (params.contains("records")) {
    for (const auto& row : read_table(params.at("records").get<std::string>(), 4, out))
      recs.push_back({static_cast<int>(io::parse_double(row[0], "g0")), static_cast<int>(io::parse_double(row[1], "g1")),
                      io::parse_double(row[2], "delta_e"), io::parse_double(row[3], "p")});
  } else {
    const auto counts = params.at("counts").get<std::vector<std::string>>();
    const auto problems = params.at("problems").get<std::vector<std::string>>();
    if (counts.size() != problems.size() || counts.empty())
      throw InputError("fit beta needs one --problem per --counts file");
    const double alpha = params.at("alpha").get<double>();
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const auto lp = load_problem_ref(problems[i], out);
      const auto hist = energy_histogram(rescale(map_2sat(lp.problem), alpha));
      if (hist.ground_energy() != 0.0) throw InputError(problems[i] + " is unsatisfiable");
      out.inputs.push_back(counts[i]);
      const auto sampled = counts_to_sampling(io::load_sample_counts(counts[i]), solutions_of(lp));
      recs.push_back({static_cast<int>(hist.ground_degeneracy()), static_cast<int>(hist.first_excited_degeneracy()),
                      hist.gap(), sampled.total_success});
    }
  }
  const auto fit = fit_beta(recs);
  std::vector<double> x, y, yf;
  for (const auto& r : recs) {
    used.push_back({{"g0", r.g0}, {"g1", r.g1}, {"delta_e", r.delta_e}, {"p", r.p}});
    x.push_back(static_cast<double>(x.size()));
    y.push_back(1.0 / r.p);
    yf.push_back(1.0 / equilibrium_p0({r.g0, r.g1, r.delta_e, fit.beta}));
  }
  out.run_files["fit.csv"] = io::fit_csv(x, y, yf);
  out.payload = {{"records", used},
                 {"beta", fit.beta},
                 {"temperature_mK", fit.temperature * 1e3},
                 {"residual", fit.residual}};
  return out;
}

inline Output cmd_fit_chain(const json& params) {
  Output out;
  std::vector<ChainRecord> recs;
  for (const auto& row : read_table(params.at("records").get<std::string>(), 3, out))
    recs.push_back({static_cast<int>(io::parse_double(row[0], "n")), io::parse_double(row[1], "delta_e"),
                    io::parse_double(row[2], "p")});
  const auto fit = fit_beta_chain(recs);
  std::vector<double> x, y, yf;
  for (const auto& r : recs) {
    x.push_back(r.n);
    y.push_back(1.0 / r.p);
    yf.push_back(chain_inverse_p(r.n, r.delta_e, fit.beta));
  }
  out.run_files["fit.csv"] = io::fit_csv(x, y, yf);
  out.payload = {{"beta", fit.beta}, {"temperature_mK", fit.temperature * 1e3}, {"residual", fit.residual}};
  return out;
}

/// Rows of (N, value); several values per N are aggregated first.
inline Output cmd_fit_scaling(const json& params) {
  Output out;
  std::map<int, std::vector<double>> groups;
  for (const auto& row : read_table(params.at("input").get<std::string>(), 2, out))
    groups[static_cast<int>(io::parse_double(row[0], "N"))].push_back(io::parse_double(row[1], "value"));
  const auto stat = params.at("statistic").get<std::string>();
  if (stat != "median" && stat != "mean") throw InputError("--statistic must be median or mean");
  const auto s = stat == "median" ? Statistic::median : Statistic::mean;
  const auto fit = fit_scaling_exponent(aggregate_ensemble(groups, s), s);
  std::vector<double> x, y, yf;
  for (auto [n, v] : fit.points) {
    x.push_back(n);
    y.push_back(v);
    yf.push_back(fit.predict(n));
  }
  out.run_files["fit.csv"] = io::fit_csv(x, y, yf);
  out.payload = {{"fit", io::to_json(fit)}};
  return out;
}

inline Output dispatch(const std::string& command, const json& params) {
  if (command == "gen") return cmd_gen(params);
  if (command == "anneal") return cmd_anneal(params);
  if (command == "reverse") return cmd_reverse(params);
  if (command == "spectrum") return cmd_spectrum(params);
  if (command == "perturb") return cmd_perturb(params);
  if (command == "scan") return cmd_scan(params);
  if (command == "fit beta") return cmd_fit_beta(params);
  if (command == "fit chain") return cmd_fit_chain(params);
  if (command == "fit scaling") return cmd_fit_scaling(params);
  throw InputError("unknown command in manifest: " + command);
}

}  // namespace qasat::cli
