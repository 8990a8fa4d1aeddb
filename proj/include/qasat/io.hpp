#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bits.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "ising.hpp"
#include "metrics.hpp"
#include "perturb.hpp"
#include "sat2.hpp"
#include "schedule.hpp"
#include "spectra.hpp"

namespace qasat::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "qasat/1";

// ---------------------------------------------------------------- files

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << text;
  if (!out) throw ResourceError("write failed for " + path.string());
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + what + ": " + e.what());
  }
}

/// Numbers that JSON cannot carry (inf, nan) are written as strings.
inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

// ---------------------------------------------------------------- problems

inline json to_json(const TwoSatProblem& p) {
  json clauses = json::array();
  for (const Clause& c : p.clauses) clauses.push_back({c.first.to_signed(), c.second.to_signed()});
  return {{"n_vars", p.n_vars}, {"clauses", clauses}, {"label", p.label}};
}

inline TwoSatProblem problem_from_json(const json& j) {
  try {
    TwoSatProblem p;
    p.n_vars = j.at("n_vars").get<int>();
    for (const auto& c : j.at("clauses")) {
      if (!c.is_array() || c.size() != 2) throw InputError("each clause needs exactly two literals");
      p.clauses.push_back({Literal::from_signed(c[0].get<int>()), Literal::from_signed(c[1].get<int>())});
    }
    p.label = j.value("label", std::string{});
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed problem JSON: ") + e.what());
  }
}

inline std::string to_dimacs(const TwoSatProblem& p) {
  std::ostringstream out;
  if (!p.label.empty()) out << "c label " << p.label << '\n';
  out << "p cnf " << p.n_vars << ' ' << p.clauses.size() << '\n';
  for (const Clause& c : p.clauses) out << c.first.to_signed() << ' ' << c.second.to_signed() << " 0\n";
  return out.str();
}

/// DIMACS CNF restricted to two literals per clause.
inline TwoSatProblem problem_from_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  TwoSatProblem p;
  long declared = -1;
  std::vector<int> pending;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "c") {
      std::string key;
      if (ls >> key && key == "label") ls >> p.label;
      continue;
    }
    if (head == "p") {
      std::string fmt;
      if (!(ls >> fmt >> p.n_vars >> declared) || fmt != "cnf") throw InputError("malformed DIMACS header");
      continue;
    }
    if (declared < 0) throw InputError("DIMACS clause before header");
    std::istringstream cs(line);
    long lit;
    while (cs >> lit) {
      if (lit == 0) {
        if (pending.size() != 2) throw InputError("DIMACS clause without exactly two literals");
        p.clauses.push_back({Literal::from_signed(pending[0]), Literal::from_signed(pending[1])});
        pending.clear();
      } else {
        pending.push_back(static_cast<int>(lit));
      }
    }
    if (!cs.eof()) throw InputError("unparsable DIMACS line: " + line);
  }
  if (declared < 0) throw InputError("missing DIMACS header");
  if (!pending.empty()) throw InputError("unterminated DIMACS clause");
  if (static_cast<long>(p.clauses.size()) != declared) throw InputError("DIMACS clause count mismatch");
  p.validate();
  return p;
}

inline TwoSatProblem load_problem(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto ext = path.extension().string();
  if (ext == ".cnf" || ext == ".dimacs") return problem_from_dimacs(text);
  return problem_from_json(parse_json(text, path.string()));
}

// ---------------------------------------------------------------- Ising

/// Couplings are listed with 1-based spin numbers, like the variables.
inline json to_json(const IsingModel& m) {
  json j = json::array();
  for (const auto& [ij, v] : m.j) j.push_back({ij.first + 1, ij.second + 1, v});
  return {{"n", m.n_spins}, {"h", m.h}, {"j", j}, {"offset", m.offset}};
}

inline IsingModel ising_from_json(const json& js) {
  try {
    IsingModel m(js.at("n").get<int>());
    const auto h = js.at("h").get<std::vector<double>>();
    if (h.size() != static_cast<std::size_t>(m.n_spins)) throw InputError("field vector length mismatch");
    m.h = h;
    for (const auto& e : js.value("j", json::array())) m.add_coupling(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1, e.at(2).get<double>());
    m.offset = js.value("offset", 0.0);
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed Ising JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- CSV

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("not a number in " + what + ": '" + s + "'");
  }
}

/// Rows of "s,A,B"; a non-numeric first row is taken as a header.
inline Schedule schedule_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<SchedulePoint> pts;
  bool first = true;
  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    if (cells.empty() || (cells.size() == 1 && cells[0].empty())) continue;
    if (cells.size() != 3) throw InputError("schedule rows need three columns: " + line);
    if (first && !cells[0].empty() && !std::isdigit(static_cast<unsigned char>(cells[0][0])) && cells[0][0] != '.') {
      first = false;
      continue;
    }
    first = false;
    pts.push_back({parse_double(cells[0], "schedule"), parse_double(cells[1], "schedule"),
                   parse_double(cells[2], "schedule")});
  }
  return Schedule::tabulated(std::move(pts));
}

inline std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return o.str();
}

inline std::string spectrum_csv(const std::vector<SpectrumSlice>& slices) {
  std::ostringstream out;
  const std::size_t k = slices.empty() ? 0 : slices.front().eigenvalues.size();
  out << "s";
  for (std::size_t m = 1; m <= k; ++m) out << ",E" << m;
  out << '\n';
  for (const auto& sl : slices) {
    out << fmt(sl.s);
    for (double e : sl.eigenvalues) out << ',' << fmt(e);
    out << '\n';
  }
  return out.str();
}

/// One row per sample and eigenstate; `cluster` numbers the degenerate group.
inline std::string overlap_csv(const OverlapTrace& trace) {
  std::ostringstream out;
  out << "t,s,level,energy,overlap,cluster,cluster_overlap\n";
  for (const auto& smp : trace.samples) {
    for (std::size_t c = 0; c < smp.clusters.size(); ++c) {
      const auto& cl = smp.clusters[c];
      for (int m = cl.first_level; m < cl.first_level + cl.size; ++m)
        out << fmt(smp.t) << ',' << fmt(smp.s) << ',' << m + 1 << ',' << fmt(smp.eigenvalues[static_cast<std::size_t>(m)])
            << ',' << fmt(smp.overlaps[static_cast<std::size_t>(m)]) << ',' << c + 1 << ',' << fmt(cl.overlap) << '\n';
    }
  }
  return out.str();
}

/// (x, y, y_fit) triples for plotting a fit against its data.
inline std::string fit_csv(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& y_fit) {
  if (x.size() != y.size() || x.size() != y_fit.size()) throw InputError("fit columns differ in length");
  std::ostringstream out;
  out << "x,y,y_fit\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << fmt(x[i]) << ',' << fmt(y[i]) << ',' << fmt(y_fit[i]) << '\n';
  return out.str();
}

// ---------------------------------------------------------------- sample counts

/// "bitstring,count" rows (optional header) plus an optional JSON sidecar
/// with annealer, T_A and num_reads, looked up as <file>.json.
inline SampleCounts load_sample_counts(const std::filesystem::path& path) {
  SampleCounts sc;
  std::istringstream in(read_text(path));
  std::string line;
  int width = -1;
  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    if (cells.empty() || (cells.size() == 1 && cells[0].empty())) continue;
    if (cells.size() != 2) throw InputError("sample rows need two columns: " + line);
    if (cells[0] == "bitstring") continue;
    const BasisState b = BasisState::parse(cells[0]);
    if (width >= 0 && b.size() != width) throw InputError("bitstrings differ in length");
    width = b.size();
    const double c = parse_double(cells[1], "sample counts");
    if (c < 0 || c != std::floor(c)) throw InputError("counts must be non-negative integers");
    sc.counts[b] += static_cast<long long>(c);
  }
  auto sidecar = path;
  sidecar += ".json";
  if (std::filesystem::exists(sidecar)) {
    const json meta = parse_json(read_text(sidecar), sidecar.string());
    sc.annealer = meta.value("annealer", std::string{});
    sc.T_A = meta.value("T_A", 0.0);
    sc.num_reads = meta.value("num_reads", 0LL);
  }
  if (sc.total() <= 0 && sc.num_reads <= 0) throw InputError("sample counts contain no reads");
  return sc;
}

// ---------------------------------------------------------------- results

inline json bits_json(const std::vector<BasisState>& states) {
  json a = json::array();
  for (const auto& s : states) a.push_back(s.str());
  return a;
}

inline json to_json(const SamplingResult& r) {
  json probs = json::array();
  for (double p : r.probabilities) probs.push_back(number(p));
  return {{"protocol", r.protocol}, {"T_A", r.T_A}, {"tau", r.tau}, {"targets", bits_json(r.targets)},
          {"probabilities", probs}, {"total_success", number(r.total_success)}};
}

inline json to_json(const PerturbationMatrix& v, const PerturbPrediction& p) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < v.entries.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < v.entries.cols(); ++j) row.push_back(v.entries(i, j));
    rows.push_back(row);
  }
  return {{"ground_states", bits_json(v.ground_states)}, {"matrix", rows},
          {"eigenvalues", p.eigenvalues}, {"ground_vector", p.ground_vector},
          {"probabilities", p.probabilities}, {"degenerate_ground", p.degenerate_ground}};
}

inline json to_json(const TransitionScan& s) {
  json recs = json::array();
  for (const auto& r : s.records)
    recs.push_back({{"T_A", r.T_A}, {"tau", r.tau}, {"p", r.p}, {"one_minus_p", r.one_minus_p}});
  json out = {{"records", recs}};
  if (s.split > 0)
    out["fit"] = {{"split_index", s.split},
                  {"split_T_A", s.records[s.split].T_A},
                  {"exponential_rate", s.rate},
                  {"exponential_intercept", s.exp_intercept},
                  {"exponential_r2", s.exp_r2},
                  {"power_exponent", s.power_exponent},
                  {"power_intercept", s.power_intercept},
                  {"power_r2", s.power_r2}};
  return out;
}

inline json to_json(const ScalingFit& f) {
  json pts = json::array();
  for (auto [n, v] : f.points) pts.push_back({n, number(v)});
  return {{"statistic", to_string(f.statistic)}, {"exponent", f.exponent}, {"intercept", f.intercept},
          {"residual", f.residual}, {"points", pts}};
}

}  // namespace qasat::io
