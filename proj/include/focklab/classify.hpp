#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "focklab/report.hpp"

namespace focklab {

struct Thresholds {
  double plateau = 1.05;
  double blowup = 5.0;
  double rate_tolerance = 0.25;
  double bounded_growth_slope = 0.1;
  json provenance = json::object();

  static Thresholds load(const std::filesystem::path& path);
};

/// config/thresholds.json of the source tree, or $FOCKLAB_THRESHOLDS when set.
std::filesystem::path default_thresholds_path();

enum class Evidence { supports, contradicts, inconclusive };
std::string_view evidence_name(Evidence e) noexcept;

struct EvidenceItem {
  std::string name;
  Evidence status = Evidence::inconclusive;
  std::string detail;
  json data;
};

enum class TheoremVerdict { bounded, unbounded, not_applicable };
std::string_view theorem_verdict_name(TheoremVerdict v) noexcept;

struct ClassifierVerdict {
  TheoremVerdict verdict = TheoremVerdict::not_applicable;
  std::string reason;
  MembershipReport membership_u;  // e^{g}
  MembershipReport membership_v;  // e^{-g}
  std::vector<EvidenceItem> evidence;
  bool consistent = true;  // no evidence item contradicts the verdict
};

struct ClassifyOptions {
  std::vector<int> Ns{32, 96};
  std::vector<double> ray_xs{1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  std::vector<double> schur_grid{0.5, 1.0, 1.5, 2.0};
  std::vector<double> f_caps{1.0, 2.0, 3.0, 4.0};
  int schur_phases = 4;
  double quad_tol = 1e-8;
  std::uint64_t seed = 42;
};

/// Verdict from deg g against m, with the numerical evidence gathered alongside:
///   norm_curve     compression norms sigma(N) against the plateau and blow-up thresholds
///   berezin_ray    product of the transforms of |e^g|^2 and |e^{-g}|^2 along the worst ray
///   berezin_rate   growth of B along the worst ray against its leading-order rate
///   schur          Schur-test upper bound (bounded verdicts only), must dominate sigma
///   F_grid         largest |F| over nested discs and the separated test pairs
ClassifierVerdict classify(const PolynomialSymbol& g, const FockContext& ctx, const Thresholds& th,
                           const ClassifyOptions& opt = {});

json to_json(const ClassifierVerdict& v);

}  // namespace focklab
