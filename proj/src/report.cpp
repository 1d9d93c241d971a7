#include "focklab/report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace focklab {

namespace {

json params_json(const std::vector<std::pair<std::string, double>>& params) {
  json j = json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const KernelValue& v) {
  return {{"log_abs", v.log_abs},
          {"phase", v.phase},
          {"branch", std::string(branch_name(v.branch))},
          {"est_rel_err", v.est_rel_err},
          {"saturated", v.saturated}};
}

json to_json(const MembershipReport& r) {
  return {{"verdict", std::string(membership_name(r.verdict))},
          {"reason", r.reason},
          {"Ns", r.Ns},
          {"log_partial_norms", r.log_partial_norms},
          {"divergence_flag", r.divergence_flag}};
}

json to_json(const BerezinSample& s) {
  return {{"z", to_json(s.z)},
          {"log_value", s.log_value},
          {"value", s.value},
          {"est_abs_err", s.est_abs_err},
          {"est_rel_err", s.est_rel_err}};
}

json to_json(const RaySweep& s) {
  return {{"phi", s.phi}, {"xs", s.xs}, {"log_values", s.log_values}, {"est_err", s.est_err}};
}

json to_json(const RateReport& r) {
  return {{"branch", std::string(rate_branch_name(r.branch))},
          {"sweep", to_json(r.sweep)},
          {"x_sat", r.x_sat},
          {"fitted_rate", r.fitted_rate},
          {"target_rate", r.target_rate},
          {"ratio", r.ratio},
          {"bounded_spread", r.bounded_spread},
          {"partial", r.partial},
          {"pass", r.pass}};
}

json to_json(const NormCurve& c) {
  std::vector<int> conv(c.converged.begin(), c.converged.end());
  return {{"Ns", c.Ns},
          {"sigmas", c.sigmas},
          {"iterations", c.iterations},
          {"converged", conv},
          {"growth_ratio", c.growth_ratio},
          {"verdict", std::string(curve_verdict_name(c.verdict))}};
}

json to_json(const SchurReport& r) {
  json j = {{"grid", r.grid},
            {"H_values", r.H_values},
            {"sup_value", r.sup_value},
            {"assembled_bound", r.assembled_bound},
            {"max_est_rel_err", r.max_est_rel_err},
            {"saturated", r.saturated}};
  if (!r.fit.as.empty()) {
    j["fit"] = {{"as", r.fit.as}, {"sups", r.fit.sups}, {"C1", r.fit.C1}, {"C2", r.fit.C2}};
  }
  return j;
}

json to_json(const FGridReport& r) { return {{"radii", r.radii}, {"max_log_abs_F", r.max_log_abs_F}}; }

json to_json(const LaplaceEstimate& e) {
  return {{"r_x", e.r_x}, {"c_x", e.c_x}, {"h_min", e.h_min}, {"log_value", e.log_value}, {"iterations", e.iterations}};
}

json to_json(const HxAnalysis& a) {
  return {{"r_x", a.r_x},           {"h_min", a.h_min},       {"c_x", a.c_x},
          {"rho_x", a.rho_x},       {"dh_at_rx", a.dh_at_rx}, {"dh_scale", a.dh_scale},
          {"c_tau2", a.c_tau2},     {"bracket", {a.lo, a.hi}}};
}

json to_json(const HxRateReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"x", p.x}, {"r_ratio", p.r_ratio}, {"h_ratio", p.h_ratio}, {"c_ratio", p.c_ratio},
                   {"analysis", to_json(p.an)}});
  }
  return {{"m", r.m},           {"d", r.d},           {"a", r.a},
          {"top_branch", r.top_branch}, {"points", pts}, {"r_pass", r.r_pass},
          {"h_pass", r.h_pass}, {"c_pass", r.c_pass}, {"pass", r.pass}};
}

json to_json(const EnvelopeReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"params", params_json(p.params)},
                   {"log_lhs", p.log_lhs},
                   {"log_envelope", p.log_envelope},
                   {"ratio", p.ratio},
                   {"uncertain", p.uncertain}});
  }
  json consts = json::array();
  for (const auto& c : r.constants) {
    consts.push_back({{"name", c.name}, {"coarse", c.coarse}, {"refined", c.refined}, {"drift", c.drift},
                      {"finite", c.finite}});
  }
  const auto axis = [](const Axis& a) { return json{{"lo", a.lo}, {"hi", a.hi}, {"n", a.n}}; };
  json grid = {{"a", axis(r.grid.a)}, {"x", axis(r.grid.x)}, {"ds", r.grid.ds}, {"N", r.grid.N},
               {"p", r.grid.p},       {"R", r.grid.R},      {"delta", r.grid.delta},
               {"n_theta", r.grid.n_theta}, {"tol", r.grid.tol}};
  return {{"id", std::string(envelope_name(r.id))},
          {"m", r.m},
          {"grid", grid},
          {"points", pts},
          {"constants", consts},
          {"fitted_constant", r.fitted_constant},
          {"argmax", params_json(r.argmax)},
          {"oscillatory_uncertain", r.oscillatory_uncertain},
          {"note", r.note},
          {"pass", r.pass}};
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "parameter,value,est_err\n";
  for (const auto& [p, v, e] : rows) os << p << ',' << v << ',' << e << '\n';
  return os.str();
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& command, json body) {
  std::filesystem::create_directories(dir);
  body["schema"] = kReportSchema;
  body["command"] = command;
  const auto path = dir / (name + ".report.json");
  write_text(path, canonical_dump(body));
  return path;
}

std::filesystem::path write_curve(const std::filesystem::path& dir, const std::string& name,
                                  const std::vector<CurveRow>& rows) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (name + ".curve.csv");
  write_text(path, curve_csv(rows));
  return path;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace focklab
