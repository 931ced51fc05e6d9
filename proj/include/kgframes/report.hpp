#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgframes/generators.hpp"

namespace kgf {

namespace detail {

inline std::string fmt9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

}  // namespace detail

// Aggregated outcome of a fuzz campaign. Everything here is a pure function
// of (kind, seed, config); timing never enters the report so reruns are
// byte-identical.
struct Report {
  std::string kind;
  std::uint64_t master_seed = 0;
  std::size_t trials = 0;
  TrialDims dims;
  double tol = kDefaultTol;

  struct TrialEntry {
    std::uint64_t index = 0;
    std::string status;  // "pass" | "fail" | "skip"
    std::string note;
  };

  struct DiscrepancyRow {
    std::size_t applicable = 0;
    std::size_t violations = 0;
    double min_ratio = kInfinity;   // certified / claimed, smallest seen
    double max_ratio = -kInfinity;  // certified / claimed, largest seen
  };

  std::size_t pass = 0, fail = 0, skipped = 0;
  std::vector<TrialEntry> entries;
  std::vector<std::string> hard_failures;
  std::map<std::string, DiscrepancyRow> discrepancies;

  bool ok() const { return fail == 0; }
};

inline nlohmann::json report_to_json(const Report& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["master_seed"] = r.master_seed;
  j["trials"] = r.trials;
  j["dims"] = {{"d_max", r.dims.d_max},
               {"n_max", r.dims.n_max},
               {"atoms_max", r.dims.atoms_max},
               {"m_max", r.dims.m_max}};
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  j["fail"] = r.fail;
  j["skipped"] = r.skipped;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"trial", e.index}, {"status", e.status}, {"note", e.note}});
  j["per_trial"] = std::move(entries);
  j["hard_failures"] = r.hard_failures;
  nlohmann::json disc = nlohmann::json::object();
  for (const auto& [name, row] : r.discrepancies) {
    nlohmann::json rj;
    rj["applicable"] = row.applicable;
    rj["violations"] = row.violations;
    if (row.applicable > 0) {
      rj["min_certified_over_claimed"] = row.min_ratio;
      rj["max_certified_over_claimed"] = row.max_ratio;
    }
    disc[name] = std::move(rj);
  }
  j["discrepancy_table"] = std::move(disc);
  return j;
}

inline std::string render_report_text(const Report& r) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  line("suite " + r.kind);
  line("seed " + std::to_string(r.master_seed) + "  trials " + std::to_string(r.trials) +
       "  dims d<=" + std::to_string(r.dims.d_max) + " n<=" + std::to_string(r.dims.n_max) +
       " atoms<=" + std::to_string(r.dims.atoms_max) + " m<=" + std::to_string(r.dims.m_max) +
       "  tol " + detail::fmt9(r.tol));
  line("pass " + std::to_string(r.pass) + "  fail " + std::to_string(r.fail) + "  skipped " +
       std::to_string(r.skipped));
  line("");
  line("discrepancy table (claimed vs certified):");
  if (r.discrepancies.empty()) {
    line("  (no applicable claims)");
  } else {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-24s %10s %10s %16s %16s", "claim", "trials",
                  "violations", "min ratio", "max ratio");
    line(buf);
    for (const auto& [name, row] : r.discrepancies) {
      std::snprintf(buf, sizeof(buf), "  %-24s %10zu %10zu %16s %16s", name.c_str(),
                    row.applicable, row.violations,
                    row.applicable ? detail::fmt9(row.min_ratio).c_str() : "-",
                    row.applicable ? detail::fmt9(row.max_ratio).c_str() : "-");
      line(buf);
    }
  }
  line("");
  if (r.hard_failures.empty()) {
    line("hard failures: none");
  } else {
    line("hard failures:");
    for (const std::string& f : r.hard_failures) line("  " + f);
  }
  line("");
  line("per-trial verdicts:");
  for (const auto& e : r.entries)
    line("  trial " + std::to_string(e.index) + ": " + e.status +
         (e.note.empty() ? "" : " (" + e.note + ")"));
  return out;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report r;
  try {
    r.kind = j.at("kind").get<std::string>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.trials = j.at("trials").get<std::size_t>();
    r.dims.d_max = j.at("dims").at("d_max").get<std::size_t>();
    r.dims.n_max = j.at("dims").at("n_max").get<std::size_t>();
    r.dims.atoms_max = j.at("dims").at("atoms_max").get<std::size_t>();
    r.dims.m_max = j.at("dims").at("m_max").get<std::size_t>();
    r.tol = j.at("tol").get<double>();
    r.pass = j.at("pass").get<std::size_t>();
    r.fail = j.at("fail").get<std::size_t>();
    r.skipped = j.at("skipped").get<std::size_t>();
    for (const auto& e : j.at("per_trial"))
      r.entries.push_back({e.at("trial").get<std::uint64_t>(), e.at("status").get<std::string>(),
                           e.at("note").get<std::string>()});
    r.hard_failures = j.at("hard_failures").get<std::vector<std::string>>();
    for (const auto& [name, rj] : j.at("discrepancy_table").items()) {
      Report::DiscrepancyRow row;
      row.applicable = rj.at("applicable").get<std::size_t>();
      row.violations = rj.at("violations").get<std::size_t>();
      if (rj.contains("min_certified_over_claimed")) {
        row.min_ratio = rj.at("min_certified_over_claimed").get<double>();
        row.max_ratio = rj.at("max_certified_over_claimed").get<double>();
      }
      r.discrepancies.emplace(name, row);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: malformed document: ") + e.what());
  }
  return r;
}

}  // namespace kgf
