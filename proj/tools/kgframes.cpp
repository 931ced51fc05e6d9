// Command-line front end: scenario checking, single constructions, and
// deterministic fuzz campaigns over the construction suite.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "kgframes/kgframes.hpp"

namespace {

using kgf::ConstructionResult;
using kgf::FrameReport;
using kgf::Scenario;
using kgf::VerdictRecord;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return std::string(buf);
}

nlohmann::json frame_report_json(const FrameReport& r) {
  nlohmann::json j;
  j["is_bessel"] = r.is_bessel;
  j["bessel_bound"] = r.bessel_bound;
  j["is_kg_frame"] = r.is_kg_frame;
  j["optimal_lower"] = std::isfinite(r.optimal_lower) ? nlohmann::json(r.optimal_lower)
                                                      : nlohmann::json("infinite");
  if (r.tight_constant) j["tight_constant"] = *r.tight_constant;
  j["is_parseval"] = r.is_parseval;
  j["degenerate_k"] = r.degenerate_k;
  j["vacuous_submodule"] = r.vacuous_submodule;
  if (r.lower_closed_form && std::isfinite(*r.lower_closed_form))
    j["lower_closed_form"] = *r.lower_closed_form;
  j["tol"] = r.tol;
  return j;
}

void print_frame_report_text(const FrameReport& r, std::ostream& os) {
  os << "frame verdict: " << (r.is_kg_frame ? "frame" : "not a frame")
     << (r.degenerate_k ? " (degenerate comparison operator)" : "") << "\n";
  os << "  bessel bound     " << fmt(r.bessel_bound) << "\n";
  os << "  optimal lower    "
     << (std::isfinite(r.optimal_lower) ? fmt(r.optimal_lower) : std::string("infinite")) << "\n";
  if (r.lower_closed_form)
    os << "  closed-form low  " << fmt(*r.lower_closed_form) << "\n";
  if (r.tight_constant)
    os << "  tight constant   " << fmt(*r.tight_constant) << (r.is_parseval ? " (parseval)" : "")
       << "\n";
  if (r.vacuous_submodule) os << "  (restriction to the zero submodule: vacuous)\n";
  os << "  tolerance        " << fmt(r.tol) << "\n";
}

nlohmann::json construction_json(const ConstructionResult& r) {
  nlohmann::json j;
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [name, ok] : r.hypothesis_checks) checks[name] = ok;
  j["hypothesis_checks"] = std::move(checks);
  j["hypotheses_ok"] = r.hypotheses_ok;
  auto bounds = [](const kgf::FrameBounds& b) {
    nlohmann::json x;
    x["lower"] = std::isfinite(b.lower) ? nlohmann::json(b.lower) : nlohmann::json("infinite");
    x["upper"] = b.upper;
    return x;
  };
  j["claimed"] = bounds(r.claimed);
  j["corrected"] = bounds(r.corrected);
  j["certified"] = bounds(r.certified);
  j["report"] = frame_report_json(r.report);
  j["metrics"] = r.metrics;
  j["notes"] = r.discrepancy_notes;
  const kgf::EnvelopeVerdict env = kgf::envelope_check(r);
  j["envelope_ok"] = env.ok();
  return j;
}

void print_construction_text(const ConstructionResult& r, std::ostream& os) {
  os << "hypothesis checks:\n";
  for (const auto& [name, ok] : r.hypothesis_checks)
    os << "  " << name << ": " << (ok ? "pass" : "FAIL") << "\n";
  auto bounds = [](const kgf::FrameBounds& b) {
    return "[" + (std::isfinite(b.lower) ? fmt(b.lower) : std::string("infinite")) + ", " +
           fmt(b.upper) + "]";
  };
  os << "claimed bounds   " << bounds(r.claimed) << "\n";
  os << "corrected bounds " << bounds(r.corrected) << "\n";
  os << "certified bounds " << bounds(r.certified) << "\n";
  const kgf::EnvelopeVerdict env = kgf::envelope_check(r);
  os << "corrected envelope: " << (env.ok() ? "holds" : "VIOLATED") << "\n";
  for (const auto& [name, val] : r.metrics) os << "  metric " << name << " = " << fmt(val) << "\n";
  for (const std::string& note : r.discrepancy_notes) os << "  note: " << note << "\n";
  print_frame_report_text(r.report, os);
}

nlohmann::json verdict_json(const VerdictRecord& v) {
  nlohmann::json j;
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [name, ok] : v.checks) checks[name] = ok;
  j["checks"] = std::move(checks);
  j["metrics"] = v.metrics;
  j["hypotheses_ok"] = v.hypotheses_ok;
  j["conclusion"] = v.conclusion;
  j["consistent"] = v.consistent;
  j["notes"] = v.notes;
  return j;
}

void print_verdict_text(const VerdictRecord& v, std::ostream& os) {
  os << "checks:\n";
  for (const auto& [name, ok] : v.checks) os << "  " << name << ": " << (ok ? "yes" : "no") << "\n";
  for (const auto& [name, val] : v.metrics) os << "  metric " << name << " = " << fmt(val) << "\n";
  os << "hypotheses: " << (v.hypotheses_ok ? "hold" : "do not hold") << "\n";
  os << "conclusion: " << (v.conclusion ? "holds" : "does not hold") << "\n";
  os << "consistent: " << (v.consistent ? "yes" : "NO") << "\n";
}

struct ConstructOutcome {
  nlohmann::json json;
  std::string text;
  bool ok = true;
};

ConstructOutcome run_construction(const Scenario& s, const std::string& id, double tol) {
  ConstructOutcome out;
  std::ostringstream os;
  const std::size_t n = s.source_len;
  const kgf::GFrameFamily f = s.build_family(false);

  auto finish_construction = [&](const ConstructionResult& r) {
    out.json = construction_json(r);
    print_construction_text(r, os);
    out.ok = kgf::envelope_check(r).ok();
  };
  auto finish_verdict = [&](const VerdictRecord& v) {
    out.json = verdict_json(v);
    print_verdict_text(v, os);
    out.ok = v.consistent;
  };

  if (id == "frame-check") {
    const FrameReport rep = kgf::check_kg_frame(f, s.op("K", n, n), tol);
    out.json = frame_report_json(rep);
    print_frame_report_text(rep, os);
    out.ok = rep.is_kg_frame;
  } else if (id == "2.1") {
    finish_construction(kgf::precompose_adjoint(f, s.op("K", n, n), s.op("Theta", n, n), tol));
  } else if (id == "2.2") {
    finish_verdict(kgf::recover_frame_check(f, s.op("K", n, n), s.op("Theta", n, n), tol));
  } else if (id == "2.3") {
    finish_verdict(
        kgf::tight_surjectivity_equivalence(f, s.op("K", n, n), s.op("Theta", n, n), tol));
  } else if (id == "2.4") {
    finish_construction(
        kgf::transfer_frame(f, s.op("K", n, n), s.op("T", n, n), s.op("Theta", n, n), tol));
  } else if (id == "2.5") {
    const kgf::RangeEqResult r = kgf::range_equality_characterization(f, s.op("K", n, n), tol);
    out.json = verdict_json(r.verdict);
    out.json["factor_family_built"] = r.factor_family.has_value();
    print_verdict_text(r.verdict, os);
    if (r.factor_family) os << "factor family: built (" << r.factor_family->atom_count()
                            << " members)\n";
    out.ok = r.verdict.consistent;
  } else if (id == "2.6") {
    finish_construction(kgf::k_sum_frame(f, s.op("K1", n, n), s.op("K2", n, n), tol));
  } else if (id == "3.1i") {
    finish_construction(kgf::dual_sum(f, s.build_family(true), s.op("K1", n, n), tol));
  } else if (id == "3.1ii") {
    finish_construction(
        kgf::orthogonal_sum(f, s.build_family(true), s.op("K1", n, n), s.op("K2", n, n), tol));
  } else if (id == "3.2") {
    const std::size_t p = s.dest_len_of("Theta1");
    finish_construction(kgf::weighted_operator_sum(f, s.build_family(true), s.op("K1", n, n),
                                                   s.op("K2", p, p), s.op("Theta1", n, p),
                                                   s.op("Theta2", n, p), tol));
  } else if (id == "3.3") {
    const std::size_t p = s.dest_len_of("Theta1");
    finish_construction(kgf::scalar_weighted_sum(f, s.build_family(true), s.op("K1", n, n),
                                                 s.op("K2", p, p), s.op("Theta1", n, p),
                                                 s.op("Theta2", n, p), s.alpha1, s.alpha2, tol));
  } else if (id == "1.9") {
    kgf::CounterRng sampler(7, 0);
    Scenario probe = s;
    probe.theorem = "1.9";
    const kgf::TrialOutcome t = kgf::evaluate_scenario(probe, tol, sampler);
    nlohmann::json j;
    j["status"] = t.status == kgf::TrialOutcome::Status::Pass ? "pass" : "fail";
    j["failures"] = t.failures;
    out.json = std::move(j);
    os << "synthesis/analysis check: "
       << (t.status == kgf::TrialOutcome::Status::Pass ? "pass" : "FAIL") << "\n";
    for (const std::string& w : t.failures) os << "  " << w << "\n";
    out.ok = t.status == kgf::TrialOutcome::Status::Pass;
  } else {
    throw kgf::ParseError("construct: unsupported theorem id '" + id + "'");
  }
  out.text = os.str();
  return out;
}

bool parse_dims(const std::string& spec, kgf::TrialDims& dims) {
  std::istringstream is(spec);
  std::size_t vals[4];
  char sep = ',';
  for (int i = 0; i < 4; ++i) {
    if (!(is >> vals[i])) return false;
    if (i < 3 && !(is >> sep && sep == ',')) return false;
    if (vals[i] == 0) return false;
  }
  dims.d_max = vals[0];
  dims.n_max = vals[1];
  dims.atoms_max = vals[2];
  dims.m_max = vals[3];
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-model continuous K-g-frame toolkit"};
  app.require_subcommand(1);

  double tol = kgf::kDefaultTol;
  app.add_option("--tol", tol, "global tolerance")->envname("KGFRAMES_TOL");

  std::string format = "text";
  app.add_option("--format", format, "output format: text or structured")
      ->check(CLI::IsMember({"text", "structured"}));

  auto* check_cmd = app.add_subcommand("check", "verify a scenario's family against K");
  check_cmd->fallthrough();
  std::string check_path;
  check_cmd->add_option("scenario", check_path, "scenario file")->required();

  auto* construct_cmd = app.add_subcommand("construct", "run one construction on a scenario");
  construct_cmd->fallthrough();
  std::string construct_theorem, construct_path;
  construct_cmd->add_option("--theorem", construct_theorem, "construction id")->required();
  construct_cmd->add_option("scenario", construct_path, "scenario file")->required();

  auto* fuzz_cmd = app.add_subcommand("fuzz", "deterministic fuzz campaign for one construction");
  fuzz_cmd->fallthrough();
  std::string fuzz_theorem;
  kgf::TrialConfig config;
  std::string dims_spec;
  fuzz_cmd->add_option("--theorem", fuzz_theorem, "construction id")->required();
  fuzz_cmd->add_option("--trials", config.trials, "number of trials")
      ->check(CLI::PositiveNumber);
  fuzz_cmd->add_option("--seed", config.master_seed, "master seed");
  fuzz_cmd->add_option("--dims", dims_spec, "dimension caps d,n,N,m");

  auto* report_cmd = app.add_subcommand("report", "re-render a structured report file");
  report_cmd->fallthrough();
  std::string report_path;
  report_cmd->add_option("file", report_path, "structured report file")->required();

  auto* gen_cmd = app.add_subcommand("gen", "emit one generated scenario");
  gen_cmd->fallthrough();
  std::string gen_theorem, gen_out;
  std::uint64_t gen_seed = 1, gen_trial = 0;
  std::string gen_dims;
  gen_cmd->add_option("--theorem", gen_theorem, "construction id")->required();
  gen_cmd->add_option("--seed", gen_seed, "master seed");
  gen_cmd->add_option("--trial", gen_trial, "trial index (stream)");
  gen_cmd->add_option("--dims", gen_dims, "dimension caps d,n,N,m");
  gen_cmd->add_option("--out", gen_out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check_cmd) {
      const Scenario s = kgf::load_scenario(check_path);
      const double use_tol = s.tol ? *s.tol : tol;
      const kgf::GFrameFamily f = s.build_family(false);
      kgf::AdjOp k = s.has_operator("K")
                         ? s.op("K", s.source_len, s.source_len)
                         : kgf::AdjOp::identity(s.alg_dim, s.source_len);
      const FrameReport rep = kgf::check_kg_frame(f, k, use_tol);
      if (format == "structured") {
        nlohmann::json j = frame_report_json(rep);
        if (!s.has_operator("K")) j["note"] = "no K in scenario; identity used";
        std::cout << j.dump(2) << "\n";
      } else {
        if (!s.has_operator("K")) std::cout << "note: no K in scenario; identity used\n";
        print_frame_report_text(rep, std::cout);
      }
      return rep.is_kg_frame ? 0 : 1;
    }

    if (*construct_cmd) {
      const Scenario s = kgf::load_scenario(construct_path);
      const double use_tol = s.tol ? *s.tol : tol;
      const ConstructOutcome out = run_construction(s, construct_theorem, use_tol);
      if (format == "structured")
        std::cout << out.json.dump(2) << "\n";
      else
        std::cout << out.text;
      return out.ok ? 0 : 1;
    }

    if (*fuzz_cmd) {
      if (!dims_spec.empty() && !parse_dims(dims_spec, config.dims)) {
        std::cerr << "error: --dims expects four positive integers d,n,N,m\n";
        return 2;
      }
      config.tol = tol;
      const auto t0 = std::chrono::steady_clock::now();
      const kgf::Report rep = kgf::run_theorem_suite(fuzz_theorem, config);
      const auto t1 = std::chrono::steady_clock::now();
      if (format == "structured")
        std::cout << kgf::report_to_json(rep).dump(2) << "\n";
      else
        std::cout << kgf::render_report_text(rep);
      std::cerr << "wall-clock: "
                << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                << " ms\n";
      return rep.ok() ? 0 : 1;
    }

    if (*report_cmd) {
      std::ifstream in(report_path);
      if (!in) throw kgf::ParseError("report: cannot open '" + report_path + "'");
      nlohmann::json j;
      in >> j;
      const kgf::Report rep = kgf::report_from_json(j);
      if (format == "structured")
        std::cout << kgf::report_to_json(rep).dump(2) << "\n";
      else
        std::cout << kgf::render_report_text(rep);
      return 0;
    }

    if (*gen_cmd) {
      kgf::TrialDims dims;
      if (!gen_dims.empty() && !([&] {
            kgf::TrialConfig probe;
            const bool ok = parse_dims(gen_dims, probe.dims);
            dims = probe.dims;
            return ok;
          })()) {
        std::cerr << "error: --dims expects four positive integers d,n,N,m\n";
        return 2;
      }
      const kgf::GeneratedInstance gi =
          kgf::generate_instance(gen_seed, gen_trial, dims, gen_theorem);
      if (!gi.scenario) {
        std::cerr << "error: generation abandoned: " << gi.note << "\n";
        return 1;
      }
      if (gen_out.empty())
        std::cout << kgf::scenario_to_string(*gi.scenario) << "\n";
      else
        kgf::save_scenario(*gi.scenario, gen_out);
      std::cerr << "generated " << gen_theorem << " instance: " << gi.note << "\n";
      return 0;
    }
  } catch (const kgf::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
