#pragma once

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "focklab/asymptotics.hpp"
#include "focklab/berezin.hpp"
#include "focklab/special_fn.hpp"
#include "focklab/symbols.hpp"
#include "focklab/toeplitz.hpp"

namespace focklab {

using json = nlohmann::json;

inline constexpr int kReportSchema = 1;

json to_json(cplx z);
json to_json(const KernelValue& v);
json to_json(const MembershipReport& r);
json to_json(const BerezinSample& s);
json to_json(const RaySweep& s);
json to_json(const RateReport& r);
json to_json(const NormCurve& c);
json to_json(const SchurReport& r);
json to_json(const FGridReport& r);
json to_json(const LaplaceEstimate& e);
json to_json(const HxAnalysis& a);
json to_json(const HxRateReport& r);
json to_json(const EnvelopeReport& r);

/// One CSV row: parameter, value, est_err.
using CurveRow = std::tuple<double, double, double>;

/// CSV with the fixed header "parameter,value,est_err"; values printed with 17 significant digits.
std::string curve_csv(const std::vector<CurveRow>& rows);

/// Adds "schema" and "command", then writes <dir>/<name>.report.json. Keys are sorted, so equal
/// inputs give byte-identical files.
std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& command, json body);

/// Writes <dir>/<name>.curve.csv.
std::filesystem::path write_curve(const std::filesystem::path& dir, const std::string& name,
                                  const std::vector<CurveRow>& rows);

/// Canonical serialization used for hashing and file output.
std::string canonical_dump(const json& j);

/// FNV-1a 64-bit hash of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace focklab
