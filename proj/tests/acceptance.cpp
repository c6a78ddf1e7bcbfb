// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "projmi/oracles.hpp"
#include "projmi/projmi.hpp"

namespace {

using namespace projmi;

constexpr std::int64_t kSamples = 1000000;
constexpr double kSigmas = 4.0;
// Integrands that are constant in exact arithmetic leave roundoff-sized
// differences next to a zero standard error.
constexpr double kRoundoff = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void fail(const std::string& why) {
    if (out_.pass) out_.detail = why;
    out_.pass = false;
  }
  void check(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

SamplerConfig cfg_for(std::uint64_t seed, std::int64_t n = kSamples) {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.n_samples = n;
  return cfg;
}

bool within(const MCEstimate& e, double expected) {
  return std::abs(e.mean - expected) <= kSigmas * e.std_error + kRoundoff;
}

bool agree(const MCEstimate& a, const MCEstimate& b) {
  return std::abs(a.mean - b.mean) <= kSigmas * std::hypot(a.std_error, b.std_error) + kRoundoff;
}

ProjectivePoint random_point(int n, CounterStream& s) { return project(gaussian_sample(n, s)); }

// Criterion bodies also return the raw estimates they compute, so the
// determinism check can compare reruns bit for bit.
using Estimates = std::vector<double>;

Estimates expectation_identity(Report& r) {
  Estimates raw;
  CounterStream s(101, 0);
  double worst_z = 0.0, worst_se = 0.0;
  for (int k = 0; k < 10; ++k) {
    const HermitianOperator a = random_hermitian(3, s);
    const DensityMatrix sigma = random_mixed_state(3, 3, s);
    const ObservableFunction f = observable_function(a);
    const LiouvilleDensity rho = liouville_density(sigma);
    const MCEstimate e =
        integrate_mu([&](const ProjectivePoint& p) { return f(p) * rho(p); }, 3, cfg_for(1000 + k));
    const double expected = (a.matrix() * sigma.matrix()).trace().real();
    raw.push_back(e.mean);
    raw.push_back(e.std_error);
    worst_z = std::max(worst_z, std::abs(e.mean - expected) / e.std_error);
    worst_se = std::max(worst_se, e.std_error);
    r.check(within(e, expected), fmt("pair %d: %.6g vs tr(A sigma) %.6g (se %.3g)", k, e.mean, expected, e.std_error));
    r.check(e.std_error <= 2e-2, fmt("pair %d: se %.3g > 2e-2", k, e.std_error));
  }
  r.note(fmt("10 pairs, max |z| %.2f, max se %.3g", worst_z, worst_se));
  return raw;
}

Estimates gaussian_pure_entropy(Report& r) {
  Estimates raw;
  const double c = pure_state_entropy_paper_constant();
  std::vector<MCEstimate> est;
  for (int n = 3; n <= 5; ++n) {
    CounterStream s(200 + n, 0);
    const MCEstimate e = pure_state_entropy_paper_mc(random_unit_vector(n, s), cfg_for(2000 + n));
    raw.push_back(e.mean);
    raw.push_back(e.std_error);
    r.check(within(e, c), fmt("n=%d: %.6f vs %.6f (se %.3g)", n, e.mean, c, e.std_error));
    est.push_back(e);
  }
  for (std::size_t i = 0; i < est.size(); ++i)
    for (std::size_t j = i + 1; j < est.size(); ++j)
      r.check(agree(est[i], est[j]), fmt("n=%zu vs n=%zu disagree: z=%.2f", i + 3, j + 3, joint_z(est[i], est[j])));
  r.note(fmt("constant %.6f; n=3,4,5 -> %.5f %.5f %.5f (se %.1e)", c, est[0].mean, est[1].mean, est[2].mean,
             est[0].std_error));
  return raw;
}

void radial_integral(Report& r) {
  const double q = oracles::radial_log_moment();
  const double closed = 2.0 + (2.0 - 2.0 * kEulerGamma) * std::numbers::log2e;
  r.check(std::abs(q - closed) <= 1e-8, fmt("quadrature %.12f vs %.12f", q, closed));
  r.note(fmt("quadrature %.12f, closed form %.12f, diff %.1e", q, closed, std::abs(q - closed)));
}

void closed_form(Report& r) {
  const double v = paper_maxent_mi_closed_form(3);
  const double expected = std::log2(3.0) + 2.0 + (2.0 - 2.0 * kEulerGamma) * std::numbers::log2e;
  r.check(std::abs(v - expected) <= 1e-12, fmt("%.15f vs %.15f", v, expected));
  for (int d = 3; d <= 5; ++d) {
    const double approx = std::log2(d) + 3.22;
    const double value = paper_maxent_mi_closed_form(d);
    r.check(std::round(value * 100) == std::round(approx * 100),
            fmt("d=%d: %.4f does not round to %.2f", d, value, approx));
  }
  r.note(fmt("d=3: %.6f (log2 3 + 3.22 = %.6f)", v, std::log2(3.0) + 3.22));
}

void von_neumann_mi(Report& r) {
  for (int d = 3; d <= 5; ++d) {
    const double v = vn_mutual_information(maximally_entangled(d), BipartiteDims(d, d));
    r.check(std::abs(v - 2 * std::log2(d)) <= 1e-9, fmt("d=%d: %.12f vs %.12f", d, v, 2 * std::log2(d)));
  }
  CounterStream s(500, 0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int na = 3 + k % 3, nb = 3 + (k / 3) % 3;
    const DensityMatrix ab = tensor(random_mixed_state(na, na, s), random_mixed_state(nb, 1 + k % nb, s));
    const double v = vn_mutual_information(ab, BipartiteDims(na, nb));
    worst = std::max(worst, std::abs(v));
    r.check(std::abs(v) <= 1e-9, fmt("product %dx%d: %.3g", na, nb, v));
  }
  r.note(fmt("maxent d=3..5 exact to 1e-9; max |I| on 10 products %.1e", worst));
}

void canonical_pure_entropy(Report& r) {
  std::string detail;
  for (int n = 3; n <= 4; ++n) {
    const DensityMatrix psi = make_state(family::PureRandom{n}, 600 + n);
    const MCEstimate e = differential_entropy_mu(psi, cfg_for(6000 + n));
    const double oracle = oracles::beta_pure_entropy(n);
    r.check(within(e, oracle), fmt("n=%d: %.6f vs %.6f (se %.3g)", n, e.mean, oracle, e.std_error));
    detail += fmt("n=%d %.5f vs %.5f; ", n, e.mean, oracle);
  }
  r.note(detail + fmt("Gaussian constant %.5f (dimension-free)", pure_state_entropy_paper_constant()));
}

Estimates product_zero(Report& r) {
  Estimates raw;
  const BipartiteDims dims(3, 3);
  CounterStream s(700, 0);
  // The projective and Gaussian integrands vanish pointwise on products, so
  // only their magnitude is informative; the decomposition is a real MC test.
  double worst_pointwise = 0.0, worst_z = 0.0;
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix ab = tensor(random_mixed_state(3, 3, s), random_mixed_state(3, 3, s));
    const MCEstimate est[] = {classical_like_mi_projective(ab, dims, cfg_for(7000 + k)),
                              classical_like_mi_paper(ab, dims, cfg_for(7100 + k)),
                              entropy_decomposition_mi(ab, dims, cfg_for(7200 + k))};
    for (const MCEstimate& e : est) {
      raw.push_back(e.mean);
      raw.push_back(e.std_error);
      if (e.method == "decomposition") {
        worst_z = std::max(worst_z, std::abs(e.mean) / e.std_error);
      } else {
        worst_pointwise = std::max(worst_pointwise, std::abs(e.mean));
      }
      r.check(within(e, 0.0), fmt("state %d %s: %.3g (se %.3g)", k, e.method.c_str(), e.mean, e.std_error));
    }
  }
  r.note(fmt("5 products: projective/gaussian max |mean| %.1e, decomposition max |z| %.2f", worst_pointwise, worst_z));
  return raw;
}

void decomposition_identity(Report& r) {
  const BipartiteDims dims(3, 3);
  CounterStream s(800, 0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const DensityMatrix sigma = random_mixed_state(9, 9, s);
    const MCEstimate dec = entropy_decomposition_mi(sigma, dims, cfg_for(8000 + k));
    const MCEstimate proj = classical_like_mi_projective(sigma, dims, cfg_for(8100 + k));
    worst = std::max(worst, joint_z(dec, proj));
    r.check(agree(dec, proj), fmt("state %d: decomposition %.6f vs projective %.6f (z %.2f)", k, dec.mean, proj.mean,
                                  joint_z(dec, proj)));
  }
  r.note(fmt("10 mixed 3x3 states, max joint z %.2f", worst));
}

void marginal_partial_trace(Report& r) {
  const BipartiteDims dims(3, 3);
  CounterStream s(900, 0);
  const DensityMatrix sigma = random_mixed_state(9, 9, s);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Subsystem out = k % 2 ? Subsystem::A : Subsystem::B;
    const MarginalDensity m = marginal_density(sigma, dims, out);
    const ProjectivePoint p = random_point(3, s);
    const MCEstimate e = m.monte_carlo(p, cfg_for(9000 + k, 200000));
    const double exact = m.analytic(p);
    worst = std::max(worst, std::abs(e.mean - exact) / e.std_error);
    r.check(within(e, exact), fmt("point %d: MC %.6f vs tr(sigma p) %.6f (se %.3g)", k, e.mean, exact, e.std_error));
  }
  for (int d = 3; d <= 5; ++d) {
    const MarginalDensity m = marginal_density(maximally_entangled(d), BipartiteDims(d, d), Subsystem::B);
    for (int k = 0; k < 20; ++k) {
      const double v = m.analytic(random_point(d, s));
      r.check(std::abs(v - 1.0 / d) <= 1e-12, fmt("maxent d=%d marginal %.15f", d, v));
    }
  }
  r.note(fmt("20 points (2e5 samples each), max |z| %.2f; maxent marginal constant 1/d", worst));
}

void restriction_forward(Report& r) {
  CounterStream s(1000, 0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int terms = 1 + k % 5;
    std::vector<double> w(terms);
    double total = 0.0;
    for (double& x : w) total += (x = s.uniform_open0());
    for (double& x : w) x /= total;
    w.back() = 1.0;
    for (int i = 0; i + 1 < terms; ++i) w.back() -= w[i];
    std::vector<SeparableMixture::Component> parts;
    for (int i = 0; i < terms; ++i) parts.emplace_back(random_mixed_state(3, 3, s), random_mixed_state(3, 2, s));
    const SeparableMixture m(w, std::move(parts));
    const RestrictedDensity restricted = restricted_density(m);
    const JointDensity joint = joint_density_eval(assemble(m), m.dims());
    for (int i = 0; i < 1000; ++i) {
      const ProjectivePoint pa = random_point(3, s), pb = random_point(3, s);
      worst = std::max(worst, std::abs(restricted(pa, pb) - joint(pa, pb)));
    }
  }
  r.check(worst <= 1e-12, fmt("max deviation %.3g", worst));
  r.note(fmt("20 mixtures x 1000 pairs, max deviation %.1e", worst));
}

void frame_law(Report& r) {
  CounterStream s(1100, 0);
  double worst = 0.0;
  for (int n = 3; n <= 5; ++n) {
    const LiouvilleDensity rho = liouville_density(random_mixed_state(n, n, s));
    for (int k = 0; k < 50; ++k) {
      worst = std::max(worst, std::abs(frame_sum(rho, Frame::from_unitary(random_unitary(n, s))) - 1.0));
    }
  }
  r.check(worst <= 1e-10, fmt("max |sum - 1| %.3g", worst));
  r.note(fmt("150 frames, max |sum - 1| %.1e", worst));
}

void reconstruction(Report& r) {
  CounterStream s(1200, 0);
  const DensityMatrix sigma = random_mixed_state(3, 3, s);
  const DensityMatrix est = reconstruct_density_matrix(liouville_density(sigma), 3, cfg_for(12000));
  const double dist = frobenius_distance(est.matrix(), sigma.matrix());
  r.check(dist <= 1e-2, fmt("Frobenius distance %.4g", dist));
  r.note(fmt("Frobenius distance %.2e", dist));
}

void kahler(Report& r) {
  CounterStream s(1300, 0);
  double worst_anti = 0.0, worst_sym = 0.0, worst_jj = 0.0, worst_compat = 0.0;
  int sign = 0;
  bool sign_consistent = true;
  for (int k = 0; k < 100; ++k) {
    const int n = 3 + k % 2;
    const ProjectivePoint p = random_point(n, s);
    const TangentVector u(p, random_hermitian(n, s)), v(p, random_hermitian(n, s));
    worst_anti = std::max(worst_anti, std::abs(symplectic_form(p, u, v) + symplectic_form(p, v, u)));
    worst_sym = std::max(worst_sym, std::abs(fs_metric(p, u, v) - fs_metric(p, v, u)));
    const TangentVector jjv = complex_structure(p, complex_structure(p, v));
    worst_jj = std::max(worst_jj, (jjv.realized() + v.realized()).norm());
    const double g = fs_metric(p, u, v);
    const double w = symplectic_form(p, u, complex_structure(p, v));
    const int here = std::abs(g - w) <= std::abs(g + w) ? 1 : -1;
    if (sign == 0) sign = here;
    sign_consistent &= here == sign;
    worst_compat = std::max(worst_compat, std::abs(g - sign * w));
  }
  r.check(worst_anti <= 1e-10, fmt("omega antisymmetry %.3g", worst_anti));
  r.check(worst_sym <= 1e-10, fmt("g symmetry %.3g", worst_sym));
  r.check(worst_jj <= 1e-10, fmt("j o j + id %.3g", worst_jj));
  r.check(sign_consistent && worst_compat <= 1e-10, fmt("g = %+d omega(., j .) off by %.3g", sign, worst_compat));
  r.note(fmt("100 pairs: g(u,v) = %+d omega(u, jv); residuals %.1e %.1e %.1e %.1e", sign, worst_anti, worst_sym,
             worst_jj, worst_compat));
}

void flow_conservation(Report& r) {
  CounterStream s(1400, 0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const HermitianOperator h = random_hermitian(3, s);
    const ObservableFunction f = observable_function(h);
    const ProjectivePoint p = random_point(3, s);
    for (double t : {0.1, 1.0, 10.0}) worst = std::max(worst, std::abs(f(schrodinger_flow(p, h, t)) - f(p)));
  }
  r.check(worst <= 1e-9, fmt("max drift %.3g", worst));
  r.note(fmt("10 (H, p) x t in {0.1, 1, 10}, max drift %.1e", worst));
}

void cross_report(Report& r) {
  struct Ratio {
    double value, se;
  };
  std::vector<Ratio> ratios;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    std::ostringstream out, err;
    const int code = cli::run_cli({"mi", "--state", "maxent:d=3", "--method", "all", "--samples", "1e6", "--seed",
                                   std::to_string(seed)},
                                  out, err);
    if (code != 0) {
      r.fail(fmt("seed %llu: exit %d: %s", static_cast<unsigned long long>(seed), code, err.str().c_str()));
      return;
    }
    const json j = json::parse(out.str());
    for (const char* key : {"projective", "paper_gaussian"}) {
      const double mean = j.at(key).at("mean").get<double>();
      const double se = j.at(key).at("std_error").get<double>();
      r.check(std::isfinite(mean) && mean > 0 && se <= 0.02 * std::abs(mean),
              fmt("seed %llu %s: %.5f +- %.3g", static_cast<unsigned long long>(seed), key, mean, se));
    }
    const json& ratio = j.at("ratio_paper_over_projective");
    if (!ratio.is_number() || !std::isfinite(ratio.get<double>())) {
      r.fail(fmt("seed %llu: ratio missing", static_cast<unsigned long long>(seed)));
      return;
    }
    ratios.push_back({ratio.get<double>(), j.at("ratio_std_error").get<double>()});
  }
  double worst = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    sum += ratios[i].value;
    for (std::size_t j = i + 1; j < ratios.size(); ++j) {
      const double z = std::abs(ratios[i].value - ratios[j].value) / std::hypot(ratios[i].se, ratios[j].se);
      worst = std::max(worst, z);
      r.check(z <= kSigmas, fmt("ratio seeds %zu/%zu differ by %.2f joint SE", i + 1, j + 1, z));
    }
  }
  r.note(fmt("ratio paper/projective = %.4f (5 seeds, se %.3g, max pairwise z %.2f)", sum / ratios.size(),
             ratios[0].se, worst));
}

void determinism(Report& r) {
  std::vector<Estimates> runs;
  for (const char* threads : {"1", "4"}) {
    setenv("PROJMI_THREADS", threads, 1);
    Report scratch;
    Estimates all = expectation_identity(scratch);
    const Estimates b = gaussian_pure_entropy(scratch);
    const Estimates c = product_zero(scratch);
    all.insert(all.end(), b.begin(), b.end());
    all.insert(all.end(), c.begin(), c.end());
    runs.push_back(std::move(all));
  }
  unsetenv("PROJMI_THREADS");
  r.check(runs[0].size() == runs[1].size(), "different number of estimates");
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < std::min(runs[0].size(), runs[1].size()); ++i) mismatches += runs[0][i] != runs[1][i];
  r.check(mismatches == 0, fmt("%zu of %zu values differ between 1 and 4 threads", mismatches, runs[0].size()));
  r.note(fmt("%zu means and standard errors bit-identical for 1 and 4 workers", runs[0].size()));
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Report&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "expectation-identity", [](Report& r) { expectation_identity(r); }},
      {2, "gaussian-pure-entropy-constant", [](Report& r) { gaussian_pure_entropy(r); }},
      {3, "radial-integral", radial_integral},
      {4, "maxent-closed-form", closed_form},
      {5, "von-neumann-mi", von_neumann_mi},
      {6, "canonical-pure-entropy", canonical_pure_entropy},
      {7, "product-state-zero", [](Report& r) { product_zero(r); }},
      {8, "decomposition-identity", decomposition_identity},
      {9, "marginal-is-partial-trace", marginal_partial_trace},
      {10, "restriction-forward", restriction_forward},
      {11, "frame-function-law", frame_law},
      {12, "reconstruction", reconstruction},
      {13, "kahler-structure", kahler},
      {14, "flow-conservation", flow_conservation},
      {15, "estimator-cross-report", cross_report},
      {16, "determinism", determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Report report;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(report);
    } catch (const std::exception& e) {
      report.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Outcome o = report.result();
    failures += !o.pass;
    std::printf("%s %2d %-32s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
