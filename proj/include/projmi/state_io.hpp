#pragma once

// JSON state / mixture files and compact textual state specs.
//
// State file:   {"dims": [nA, nB] | [n], "re": [[...], ...], "im": [[...], ...]}
//               with row-major n x n arrays; "im" may be omitted (all zero).
// Mixture file: {"weights": [...], "components": [{"a": <state>, "b": <state>}, ...]}
//
// State spec:   family:key=value,key=value,...   e.g. "maxent:d=3",
//               "mixed_random:n=3,rank=2,seed=1", "file:state.json".

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "projmi/error.hpp"
#include "projmi/qstate.hpp"
#include "projmi/states.hpp"
#include "projmi/structure.hpp"

namespace projmi {

using json = nlohmann::json;

/// A density matrix together with its bipartite split, when known.
struct PreparedState {
  DensityMatrix sigma;
  std::optional<BipartiteDims> dims;
};

namespace detail {

inline Error parse_error(const std::string& what) { return Error(ErrorKind::ParseError, what); }

inline Eigen::MatrixXd read_real_matrix(const json& arr, int n, const char* field) {
  if (!arr.is_array()) throw parse_error(std::string("\"") + field + "\" must be an array");
  Eigen::MatrixXd out(n, n);
  const bool nested = !arr.empty() && arr.front().is_array();
  if (nested) {
    if (static_cast<int>(arr.size()) != n) {
      throw parse_error(std::string("\"") + field + "\" has " + std::to_string(arr.size()) + " rows, expected " +
                        std::to_string(n));
    }
    for (int i = 0; i < n; ++i) {
      const json& row = arr[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        throw parse_error(std::string("\"") + field + "\" row " + std::to_string(i) + " is not of length " +
                          std::to_string(n));
      }
      for (int j = 0; j < n; ++j) {
        const json& v = row[static_cast<std::size_t>(j)];
        if (!v.is_number()) throw parse_error(std::string("\"") + field + "\" has a non-numeric entry");
        out(i, j) = v.get<double>();
      }
    }
    return out;
  }
  if (static_cast<int>(arr.size()) != n * n) {
    throw parse_error(std::string("\"") + field + "\" flat array has " + std::to_string(arr.size()) +
                      " entries, expected " + std::to_string(n * n));
  }
  for (int k = 0; k < n * n; ++k) {
    const json& v = arr[static_cast<std::size_t>(k)];
    if (!v.is_number()) throw parse_error(std::string("\"") + field + "\" has a non-numeric entry");
    out(k / n, k % n) = v.get<double>();
  }
  return out;
}

/// Matrix dimension implied by the "re" array when no dims are given.
inline int infer_dimension(const json& re) {
  if (!re.is_array() || re.empty()) throw parse_error("\"re\" must be a non-empty array");
  if (re.front().is_array()) return static_cast<int>(re.size());
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(re.size()))));
  if (n * n != static_cast<int>(re.size())) throw parse_error("flat \"re\" array is not square");
  return n;
}

}  // namespace detail

inline PreparedState state_from_json(const json& j) {
  if (!j.is_object()) throw detail::parse_error("state must be a JSON object");
  if (!j.contains("re")) throw detail::parse_error("state is missing \"re\"");
  std::optional<BipartiteDims> dims;
  int n = 0;
  if (j.contains("dims")) {
    const json& d = j.at("dims");
    if (!d.is_array() || d.empty() || d.size() > 2) throw detail::parse_error("\"dims\" must be [n] or [nA, nB]");
    for (const auto& v : d) {
      if (!v.is_number_integer() || v.get<int>() < 1) throw detail::parse_error("\"dims\" entries must be positive integers");
    }
    if (d.size() == 2) {
      dims = BipartiteDims(d[0].get<int>(), d[1].get<int>());
      n = dims->total();
    } else {
      n = d[0].get<int>();
    }
  } else {
    n = detail::infer_dimension(j.at("re"));
  }
  const Eigen::MatrixXd re = detail::read_real_matrix(j.at("re"), n, "re");
  const Eigen::MatrixXd im =
      j.contains("im") ? detail::read_real_matrix(j.at("im"), n, "im") : Eigen::MatrixXd::Zero(n, n);
  Matrix m(n, n);
  m.real() = re;
  m.imag() = im;
  return {validate_density(m), dims};
}

inline json state_to_json(const DensityMatrix& sigma, const std::optional<BipartiteDims>& dims = std::nullopt) {
  const int n = sigma.dim();
  json re = json::array();
  json im = json::array();
  for (int i = 0; i < n; ++i) {
    json re_row = json::array();
    json im_row = json::array();
    for (int j = 0; j < n; ++j) {
      re_row.push_back(sigma.matrix()(i, j).real());
      im_row.push_back(sigma.matrix()(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  json out;
  out["dims"] = dims ? json::array({dims->dim_a(), dims->dim_b()}) : json::array({n});
  out["re"] = std::move(re);
  out["im"] = std::move(im);
  return out;
}

inline SeparableMixture mixture_from_json(const json& j) {
  if (!j.is_object() || !j.contains("weights") || !j.contains("components")) {
    throw detail::parse_error("mixture needs \"weights\" and \"components\"");
  }
  const json& w = j.at("weights");
  const json& c = j.at("components");
  if (!w.is_array() || !c.is_array() || w.size() != c.size()) {
    throw detail::parse_error("\"weights\" and \"components\" must be arrays of equal length");
  }
  std::vector<double> weights;
  std::vector<SeparableMixture::Component> components;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!w[k].is_number()) throw detail::parse_error("weights must be numbers");
    weights.push_back(w[k].get<double>());
    const json& comp = c[k];
    if (!comp.is_object() || !comp.contains("a") || !comp.contains("b")) {
      throw detail::parse_error("each component needs \"a\" and \"b\" states");
    }
    components.emplace_back(state_from_json(comp.at("a")).sigma, state_from_json(comp.at("b")).sigma);
  }
  return SeparableMixture(std::move(weights), std::move(components));
}

inline json mixture_to_json(const SeparableMixture& m) {
  json comps = json::array();
  for (const auto& [a, b] : m.components()) comps.push_back({{"a", state_to_json(a)}, {"b", state_to_json(b)}});
  return {{"weights", m.weights()}, {"components", std::move(comps)}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw detail::parse_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw detail::parse_error(path + ": " + e.what());
  }
}

/// Reads either a state file or a mixture file (assembled into its state).
inline PreparedState load_state_file(const std::string& path) {
  const json j = read_json_file(path);
  if (j.is_object() && j.contains("weights")) {
    const SeparableMixture m = mixture_from_json(j);
    return {assemble(m), m.dims()};
  }
  return state_from_json(j);
}

// ---------------------------------------------------------------------------
// Textual state specs.

struct StateSpec {
  std::string family;
  std::map<std::string, std::string> params;
};

inline StateSpec parse_state_spec(std::string_view text) {
  StateSpec spec;
  const auto colon = text.find(':');
  spec.family = std::string(text.substr(0, colon));
  if (spec.family.empty()) throw Error(ErrorKind::ParseError, "empty state spec");
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  if (spec.family == "file") {
    if (rest.empty()) throw Error(ErrorKind::ParseError, "file: spec needs a path");
    spec.params["path"] = std::string(rest);
    return spec;
  }
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(ErrorKind::ParseError, "expected key=value in state spec, got '" + std::string(item) + "'");
    }
    spec.params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return spec;
}

namespace detail {

class SpecReader {
 public:
  explicit SpecReader(const StateSpec& spec) : spec_(spec) {}

  template <class T>
  T get(const std::string& key, std::optional<T> fallback = std::nullopt) {
    used_.push_back(key);
    const auto it = spec_.params.find(key);
    if (it == spec_.params.end()) {
      if (fallback) return *fallback;
      throw Error(ErrorKind::BadParameter, "state family '" + spec_.family + "' needs parameter '" + key + "'");
    }
    T value{};
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorKind::BadParameter, "parameter '" + key + "' has invalid value '" + s + "'");
    }
    return value;
  }

  bool has(const std::string& key) const { return spec_.params.count(key) > 0; }

  void reject_unused() const {
    for (const auto& [key, value] : spec_.params) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        throw Error(ErrorKind::BadParameter, "unknown parameter '" + key + "' for family '" + spec_.family + "'");
      }
    }
  }

 private:
  const StateSpec& spec_;
  std::vector<std::string> used_;
};

}  // namespace detail

/// Builds the state named by a spec string.
inline PreparedState load_state(std::string_view text) {
  const StateSpec spec = parse_state_spec(text);
  if (spec.family == "file") {
    const auto it = spec.params.find("path");
    if (it == spec.params.end()) throw Error(ErrorKind::ParseError, "file: spec needs a path");
    return load_state_file(it->second);
  }
  detail::SpecReader r(spec);
  std::optional<StateFamily> fam;
  if (spec.family == "maxent") {
    fam = family::MaxEnt{r.get<int>("d")};
  } else if (spec.family == "maxmixed") {
    fam = family::MaxMixed{r.get<int>("n")};
  } else if (spec.family == "classical") {
    fam = family::Classical{r.get<int>("d")};
  } else if (spec.family == "pure_random") {
    fam = family::PureRandom{r.get<int>("n")};
  } else if (spec.family == "mixed_random") {
    const int n = r.get<int>("n");
    fam = family::MixedRandom{n, r.get<int>("rank", n)};
  } else if (spec.family == "basis_pure") {
    fam = family::BasisPure{r.get<int>("n"), r.get<int>("index", 0)};
  } else if (spec.family == "product") {
    const int d = r.get<int>("d", 3);
    const int na = r.get<int>("na", d);
    const int nb = r.get<int>("nb", d);
    const int rank = r.get<int>("rank", 0);
    fam = family::Product{na, nb, r.get<int>("ranka", rank > 0 ? rank : na), r.get<int>("rankb", rank > 0 ? rank : nb)};
  } else if (spec.family == "separable_mixture") {
    const int d = r.get<int>("d", 3);
    fam = family::SeparableMix{r.get<int>("na", d), r.get<int>("nb", d), r.get<int>("terms", 4)};
  } else {
    throw Error(ErrorKind::UnknownFamily, "unknown state family '" + spec.family + "'");
  }
  const auto seed = r.get<std::uint64_t>("seed", std::uint64_t{0});
  r.reject_unused();
  return {make_state(*fam, seed), natural_dims(*fam)};
}

}  // namespace projmi
