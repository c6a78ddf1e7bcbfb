#pragma once

// projmi command-line front end. Kept in a header so tests can drive it
// in-process through run_cli().
//
// Exit codes: 0 ok, 2 usage / parse error, 3 numeric failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "projmi/projmi.hpp"

namespace projmi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

#ifdef PROJMI_VERSION
inline constexpr const char* kVersion = PROJMI_VERSION;
#else
inline constexpr const char* kVersion = "0.1.0";
#endif

/// One estimator run, serialized as a single JSON object or CSV row.
struct RunRecord {
  std::string command;
  std::string state_spec;
  std::string method;
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
  std::string version = kVersion;
  std::int64_t batch_size = 0;
  std::optional<BipartiteDims> dims;
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json dims_json(const std::optional<BipartiteDims>& dims) {
  return dims ? json::array({dims->dim_a(), dims->dim_b()}) : json(nullptr);
}

inline json to_json(const RunRecord& r) {
  return {{"command", r.command},     {"state_spec", r.state_spec}, {"method", r.method},
          {"estimate", r.estimate},   {"std_error", r.std_error},   {"n_samples", r.n_samples},
          {"seed", r.seed},           {"runtime_ms", r.runtime_ms}, {"version", r.version},
          {"batch_size", r.batch_size}, {"dims", dims_json(r.dims)}};
}

inline const char* kRecordCsvHeader = "command,state_spec,method,estimate,std_error,n_samples,seed,runtime_ms,version";

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv_row(const RunRecord& r) {
  return csv_field(r.command) + "," + csv_field(r.state_spec) + "," + r.method + "," + format_number(r.estimate) +
         "," + format_number(r.std_error) + "," + std::to_string(r.n_samples) + "," + std::to_string(r.seed) + "," +
         std::to_string(r.runtime_ms) + "," + r.version;
}

inline json to_json(const MCEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_samples", e.n_samples}, {"seed", e.seed},
          {"method", e.method}};
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Parses a sample count; accepts integers and scientific notation ("1e6").
inline std::int64_t parse_samples(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "invalid sample count '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v) || v != std::floor(v) || v < 2 || v > 1e13) {
    throw Error(ErrorKind::ParseError, "sample count must be an integer >= 2, got '" + text + "'");
  }
  return static_cast<std::int64_t>(v);
}

/// "3,3" or "3x3".
inline BipartiteDims parse_dims(const std::string& text) {
  const auto sep = text.find_first_of(",x");
  if (sep == std::string::npos) throw Error(ErrorKind::ParseError, "dims must look like 3,3");
  try {
    std::size_t u1 = 0, u2 = 0;
    const std::string a = text.substr(0, sep), b = text.substr(sep + 1);
    const int na = std::stoi(a, &u1);
    const int nb = std::stoi(b, &u2);
    if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument("trailing");
    return BipartiteDims(na, nb);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "dims must look like 3,3, got '" + text + "'");
  }
}

/// "3..5" or "3,4,5" or "4".
inline std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  try {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int d = lo; d <= hi; ++d) out.push_back(d);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "invalid range '" + text + "'");
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty range '" + text + "'");
  for (int d : out) {
    if (d < 3) throw Error(ErrorKind::BadParameter, "every d in a sweep must be >= 3, got " + std::to_string(d));
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CommonOptions {
  std::string state;
  std::string dims;
  std::string method;
  std::string samples = "1e5";
  std::uint64_t seed = 0;
  std::int64_t batch = kDefaultBatchSize;
  std::string out = "json";
  double tol = kProductTol;

  SamplerConfig sampler() const {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.n_samples = parse_samples(samples);
    cfg.batch_size = batch;
    cfg.validate();
    return cfg;
  }
};

class Stopwatch {
 public:
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::optional<BipartiteDims> resolve_dims(const PreparedState& state, const std::string& flag) {
  std::optional<BipartiteDims> dims = state.dims;
  if (!flag.empty()) dims = parse_dims(flag);
  if (dims && dims->total() != state.sigma.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "dims " + std::to_string(dims->dim_a()) + "x" +
                                                  std::to_string(dims->dim_b()) + " do not match a state of dimension " +
                                                  std::to_string(state.sigma.dim()));
  }
  return dims;
}

/// Unit vector of a pure state (rank one within validation tolerance).
inline Vector pure_vector(const DensityMatrix& sigma) {
  const auto& evals = sigma.eigenvalues();
  if (std::abs(evals[evals.size() - 1] - 1.0) > 1e-9) {
    throw Error(ErrorKind::BadParameter, "paper-gaussian entropy needs a pure state");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma.matrix());
  return solver.eigenvectors().col(sigma.dim() - 1);
}

inline void emit_records(const std::vector<RunRecord>& records, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    out << kRecordCsvHeader << "\n";
    for (const auto& r : records) out << to_csv_row(r) << "\n";
    return;
  }
  for (const auto& r : records) out << to_json(r).dump() << "\n";
}

inline RunRecord record_from(const std::string& command, const CommonOptions& o, const MCEstimate& e,
                             const std::optional<BipartiteDims>& dims, const Stopwatch& clock) {
  RunRecord r;
  r.command = command;
  r.state_spec = o.state;
  r.method = o.method;
  r.estimate = e.mean;
  r.std_error = e.std_error;
  r.n_samples = e.n_samples;
  r.seed = e.seed;
  r.batch_size = o.batch;
  r.dims = dims;
  r.runtime_ms = clock.elapsed_ms();
  return r;
}

inline MCEstimate exact(double value, std::string method) { return {value, 0.0, 0, 0, std::move(method)}; }

inline void cmd_entropy(const CommonOptions& o, std::ostream& out) {
  Stopwatch clock;
  const PreparedState state = load_state(o.state);
  const auto dims = resolve_dims(state, o.dims);
  MCEstimate e;
  if (o.method == "von-neumann") {
    e = exact(von_neumann_entropy(state.sigma), o.method);
  } else if (o.method == "canonical-mu") {
    e = differential_entropy_mu(state.sigma, o.sampler());
  } else if (o.method == "paper-gaussian") {
    e = pure_state_entropy_paper_mc(pure_vector(state.sigma), o.sampler());
  } else {
    throw Error(ErrorKind::ParseError, "unknown entropy method '" + o.method + "'");
  }
  RunRecord r = record_from("entropy", o, e, dims, clock);
  if (o.method == "von-neumann") r.seed = o.seed;
  emit_records({r}, o.out, out);
}

inline MCEstimate run_mi_method(const std::string& method, const DensityMatrix& sigma, const BipartiteDims& dims,
                                const SamplerConfig& cfg) {
  if (method == "von-neumann") return exact(vn_mutual_information(sigma, dims), method);
  if (method == "projective") return classical_like_mi_projective(sigma, dims, cfg);
  if (method == "paper-gaussian") return classical_like_mi_paper(sigma, dims, cfg);
  if (method == "decomposition") return entropy_decomposition_mi(sigma, dims, cfg);
  throw Error(ErrorKind::ParseError, "unknown mi method '" + method + "'");
}

inline json mi_report_json(const MIReport& rep, const CommonOptions& o, const SamplerConfig& cfg, bool product,
                           bool ppt, std::int64_t runtime_ms) {
  return {{"command", "mi"},
          {"state_spec", o.state},
          {"method", "all"},
          {"dims", dims_json(rep.dims)},
          {"projective", to_json(rep.projective)},
          {"paper_gaussian", to_json(rep.paper_gaussian)},
          {"von_neumann", rep.von_neumann},
          {"ratio_paper_over_projective", optional_json(rep.ratio_paper_over_projective)},
          {"ratio_std_error", optional_json(rep.ratio_std_error)},
          {"labels", {{"product", product}, {"ppt", ppt}}},
          {"n_samples", cfg.n_samples},
          {"seed", cfg.seed},
          {"batch_size", cfg.batch_size},
          {"runtime_ms", runtime_ms},
          {"version", kVersion}};
}

inline void cmd_mi(const CommonOptions& o, std::ostream& out) {
  Stopwatch clock;
  const PreparedState state = load_state(o.state);
  const auto dims = resolve_dims(state, o.dims);
  if (!dims) throw Error(ErrorKind::DimensionMismatch, "mi needs a bipartite state; pass --dims nA,nB");
  if (o.method == "all") {
    const SamplerConfig cfg = o.sampler();
    const MIReport rep = mi_report(state.sigma, *dims, cfg);
    const json j = mi_report_json(rep, o, cfg, is_product(state.sigma, *dims, o.tol), ppt_check(state.sigma, *dims),
                                  clock.elapsed_ms());
    if (o.out == "csv") {
      std::vector<RunRecord> rows;
      CommonOptions ro = o;
      ro.method = "projective";
      rows.push_back(record_from("mi", ro, rep.projective, dims, clock));
      ro.method = "paper-gaussian";
      rows.push_back(record_from("mi", ro, rep.paper_gaussian, dims, clock));
      ro.method = "von-neumann";
      rows.push_back(record_from("mi", ro, exact(rep.von_neumann, "von-neumann"), dims, clock));
      rows.back().seed = cfg.seed;
      emit_records(rows, "csv", out);
    } else {
      out << j.dump() << "\n";
    }
    return;
  }
  const bool exact_method = o.method == "von-neumann";
  const SamplerConfig cfg = exact_method ? SamplerConfig{} : o.sampler();
  MCEstimate e = run_mi_method(o.method, state.sigma, *dims, cfg);
  RunRecord r = record_from("mi", o, e, dims, clock);
  if (exact_method) r.seed = o.seed;
  emit_records({r}, o.out, out);
}

struct SweepOptions {
  std::string family = "maxent";
  std::string d_range = "3..5";
  std::string methods = "von-neumann,paper-closed-form";
  std::string samples = "1e5";
  std::uint64_t seed = 0;
  std::int64_t batch = kDefaultBatchSize;
};

inline const char* kSweepHeader = "family,d,method,estimate,std_error,n_samples,seed,runtime_ms";

inline void cmd_sweep(const SweepOptions& o, std::ostream& out) {
  const std::vector<int> ds = parse_range(o.d_range);
  const std::vector<std::string> methods = split_list(o.methods);
  if (methods.empty()) throw Error(ErrorKind::ParseError, "no methods given");
  for (const auto& m : methods) {
    if (m != "von-neumann" && m != "paper-closed-form" && m != "projective" && m != "paper-gaussian" &&
        m != "decomposition") {
      throw Error(ErrorKind::ParseError, "unknown sweep method '" + m + "'");
    }
  }
  if (o.family != "maxent" && o.family != "product" && o.family != "classical") {
    throw Error(ErrorKind::UnknownFamily, "sweep family must be maxent, product or classical");
  }
  SamplerConfig cfg;
  cfg.seed = o.seed;
  cfg.n_samples = parse_samples(o.samples);
  cfg.batch_size = o.batch;
  cfg.validate();

  out << kSweepHeader << "\n";
  for (int d : ds) {
    const std::string spec =
        o.family == "product" ? "product:d=" + std::to_string(d) + ",seed=" + std::to_string(o.seed)
                              : o.family + ":d=" + std::to_string(d);
    const PreparedState state = load_state(spec);
    const BipartiteDims dims = *state.dims;
    for (const auto& m : methods) {
      Stopwatch clock;
      MCEstimate e = m == "paper-closed-form" ? exact(paper_maxent_mi_closed_form(d), m)
                                              : run_mi_method(m, state.sigma, dims, cfg);
      const bool is_exact = m == "von-neumann" || m == "paper-closed-form";
      out << o.family << "," << d << "," << m << "," << format_number(e.mean) << "," << format_number(e.std_error)
          << "," << (is_exact ? 0 : e.n_samples) << "," << o.seed << "," << clock.elapsed_ms() << "\n";
    }
  }
}

inline void cmd_state(const CommonOptions& o, std::ostream& out) {
  const PreparedState state = load_state(o.state);
  const auto dims = resolve_dims(state, o.dims);
  out << state_to_json(state.sigma, dims).dump() << "\n";
}

inline void add_common(CLI::App* sub, CommonOptions& o, bool with_method) {
  sub->add_option("--state", o.state, "State spec, e.g. maxent:d=3 or file:state.json")->required();
  sub->add_option("--dims", o.dims, "Bipartite dimensions nA,nB");
  if (with_method) sub->add_option("--method", o.method, "Estimator")->required();
  sub->add_option("--samples", o.samples, "Monte Carlo samples (accepts 1e6)");
  sub->add_option("--seed", o.seed, "64-bit seed");
  sub->add_option("--batch", o.batch, "Samples per batch");
  sub->add_option("--out", o.out, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--tol", o.tol, "Tolerance for the product-state label");
}

/// Entry point; `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mutual information of bipartite quantum states on projective space", "projmi"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonOptions entropy_opts, mi_opts, state_opts;
  SweepOptions sweep_opts;
  auto* entropy = app.add_subcommand("entropy", "Entropy of a state (canonical-mu, paper-gaussian, von-neumann)");
  add_common(entropy, entropy_opts, true);
  auto* mi = app.add_subcommand("mi", "Mutual information (projective, paper-gaussian, von-neumann, decomposition, all)");
  add_common(mi, mi_opts, true);
  auto* sweep = app.add_subcommand("sweep", "CSV sweep over dimensions");
  sweep->add_option("--family", sweep_opts.family, "maxent, product or classical");
  sweep->add_option("--d", sweep_opts.d_range, "Dimension range: 3..5 or 3,4,5");
  sweep->add_option("--methods,--method", sweep_opts.methods, "Comma-separated methods");
  sweep->add_option("--samples", sweep_opts.samples, "Monte Carlo samples (accepts 1e6)");
  sweep->add_option("--seed", sweep_opts.seed, "64-bit seed");
  sweep->add_option("--batch", sweep_opts.batch, "Samples per batch");
  auto* state = app.add_subcommand("state", "Print a state as JSON");
  add_common(state, state_opts, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (entropy->parsed()) cmd_entropy(entropy_opts, out);
    if (mi->parsed()) cmd_mi(mi_opts, out);
    if (sweep->parsed()) cmd_sweep(sweep_opts, out);
    if (state->parsed()) cmd_state(state_opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_usage_error(e.kind()) ? kExitUsage : kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace projmi::cli
