#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgframes/frame.hpp"

namespace kgf {

inline const std::set<std::string>& known_theorem_ids() {
  static const std::set<std::string> ids = {"1.9", "2.1",  "2.2",  "2.3", "2.4", "2.5",
                                            "2.6", "3.1i", "3.1ii", "3.2", "3.3", "frame-check"};
  return ids;
}

// One self-contained problem instance: dimensions, measure, one or two
// families, named operators and scalars, plus the construction id it targets.
struct Scenario {
  int format_version = 1;
  std::string theorem = "frame-check";
  std::size_t alg_dim = 1;
  std::size_t source_len = 1;
  std::vector<double> weights;
  std::vector<std::size_t> atom_dims;
  std::vector<Mat> family;
  std::optional<std::vector<Mat>> family2;
  std::map<std::string, Mat> operators;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  std::optional<double> tol;

  GFrameFamily build_family(bool second = false) const {
    const std::vector<Mat>& mats = second ? *family2 : family;
    GFrameFamily f;
    f.alg_dim = alg_dim;
    f.source_len = source_len;
    f.space.weights = weights;
    f.members.reserve(mats.size());
    for (std::size_t k = 0; k < mats.size(); ++k)
      f.members.emplace_back(alg_dim, source_len, atom_dims[k], mats[k]);
    f.validate();
    return f;
  }

  bool has_operator(const std::string& name) const { return operators.count(name) > 0; }

  // Named operator with declared source/destination lengths (in blocks).
  AdjOp op(const std::string& name, std::size_t src, std::size_t dst) const {
    auto it = operators.find(name);
    if (it == operators.end()) throw ParseError("scenario: missing operator '" + name + "'");
    return AdjOp(alg_dim, src, dst, it->second);
  }

  // Destination block length of the theta operators (square root of storage).
  std::size_t dest_len_of(const std::string& name) const {
    auto it = operators.find(name);
    if (it == operators.end()) throw ParseError("scenario: missing operator '" + name + "'");
    if (it->second.cols() % alg_dim != 0)
      throw DimensionMismatch("scenario: operator '" + name + "' is not block-compatible");
    return it->second.cols() / alg_dim;
  }

  void validate() const {
    if (format_version != 1) throw ParseError("scenario: unsupported format_version");
    if (!known_theorem_ids().count(theorem))
      throw ParseError("scenario: unknown theorem id '" + theorem + "'");
    if (alg_dim == 0) throw ParseError("scenario: field alg_dim must be positive");
    if (source_len == 0) throw ParseError("scenario: field source_len must be positive");
    if (weights.empty()) throw ParseError("scenario: field weights must be nonempty");
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (!(weights[i] > 0.0))
        throw ParseError("scenario: field weights[" + std::to_string(i) +
                         "] must be strictly positive");
    if (atom_dims.size() != weights.size())
      throw ParseError("scenario: field atom_dims must match weights in length");
    for (std::size_t i = 0; i < atom_dims.size(); ++i)
      if (atom_dims[i] == 0)
        throw ParseError("scenario: field atom_dims[" + std::to_string(i) +
                         "] must be positive");
    if (family.size() != weights.size())
      throw ParseError("scenario: field family must have one member per atom");
    auto check_member = [&](const Mat& m, std::size_t k, const char* which) {
      if (m.rows() != source_len * alg_dim || m.cols() != atom_dims[k] * alg_dim)
        throw DimensionMismatch(std::string("scenario: ") + which + " member " +
                                std::to_string(k) + " has inconsistent shape");
      if (!m.all_finite())
        throw ParseError(std::string("scenario: ") + which + " member " + std::to_string(k) +
                         " has non-finite entries");
    };
    for (std::size_t k = 0; k < family.size(); ++k) check_member(family[k], k, "family");
    if (family2) {
      if (family2->size() != weights.size())
        throw ParseError("scenario: field family2 must have one member per atom");
      for (std::size_t k = 0; k < family2->size(); ++k) check_member((*family2)[k], k, "family2");
    }
    for (const auto& [name, m] : operators) {
      if (m.rows() % alg_dim != 0 || m.cols() % alg_dim != 0)
        throw DimensionMismatch("scenario: operator '" + name +
                                "' is not compatible with the algebra dimension");
      if (!m.all_finite())
        throw ParseError("scenario: operator '" + name + "' has non-finite entries");
    }
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0))
      throw ParseError("scenario: fields alpha1 and alpha2 must be positive");
    if (tol && !(*tol > 0.0)) throw ParseError("scenario: field tol must be positive");
  }
};

namespace detail {

inline nlohmann::json mat_to_json(const Mat& m) {
  nlohmann::json data = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      data.push_back({m(i, j).real(), m(i, j).imag()});
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Mat mat_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw ParseError("scenario: " + where + " must be {rows, cols, data}");
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  const auto& data = j.at("data");
  if (!data.is_array() || data.size() != rows * cols)
    throw ParseError("scenario: " + where + ".data must hold rows*cols entries");
  Mat m(rows, cols);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j2 = 0; j2 < cols; ++j2, ++idx) {
      const auto& pair = data.at(idx);
      if (!pair.is_array() || pair.size() != 2)
        throw ParseError("scenario: " + where + ".data[" + std::to_string(idx) +
                         "] must be a [re, im] pair");
      m(i, j2) = cplx(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
  return m;
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["format_version"] = s.format_version;
  j["theorem"] = s.theorem;
  j["alg_dim"] = s.alg_dim;
  j["source_len"] = s.source_len;
  j["weights"] = s.weights;
  j["atom_dims"] = s.atom_dims;
  nlohmann::json fam = nlohmann::json::array();
  for (const Mat& m : s.family) fam.push_back(detail::mat_to_json(m));
  j["family"] = std::move(fam);
  if (s.family2) {
    nlohmann::json fam2 = nlohmann::json::array();
    for (const Mat& m : *s.family2) fam2.push_back(detail::mat_to_json(m));
    j["family2"] = std::move(fam2);
  }
  nlohmann::json ops = nlohmann::json::object();
  for (const auto& [name, m] : s.operators) ops[name] = detail::mat_to_json(m);
  j["operators"] = std::move(ops);
  j["alpha1"] = s.alpha1;
  j["alpha2"] = s.alpha2;
  if (s.tol) j["tol"] = *s.tol;
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    s.format_version = j.at("format_version").get<int>();
    s.theorem = j.at("theorem").get<std::string>();
    s.alg_dim = j.at("alg_dim").get<std::size_t>();
    s.source_len = j.at("source_len").get<std::size_t>();
    s.weights = j.at("weights").get<std::vector<double>>();
    s.atom_dims = j.at("atom_dims").get<std::vector<std::size_t>>();
    for (std::size_t k = 0; k < j.at("family").size(); ++k)
      s.family.push_back(
          detail::mat_from_json(j.at("family").at(k), "family[" + std::to_string(k) + "]"));
    if (j.contains("family2")) {
      std::vector<Mat> f2;
      for (std::size_t k = 0; k < j.at("family2").size(); ++k)
        f2.push_back(
            detail::mat_from_json(j.at("family2").at(k), "family2[" + std::to_string(k) + "]"));
      s.family2 = std::move(f2);
    }
    if (j.contains("operators"))
      for (const auto& [name, mj] : j.at("operators").items())
        s.operators.emplace(name, detail::mat_from_json(mj, "operators." + name));
    if (j.contains("alpha1")) s.alpha1 = j.at("alpha1").get<double>();
    if (j.contains("alpha2")) s.alpha2 = j.at("alpha2").get<double>();
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: malformed document: ") + e.what());
  }
  s.validate();
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("scenario: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scenario: JSON parse failure in '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("scenario: cannot write '" + path + "'");
  out << scenario_to_json(s).dump(2) << "\n";
}

inline std::string scenario_to_string(const Scenario& s) {
  return scenario_to_json(s).dump(2);
}

}  // namespace kgf
