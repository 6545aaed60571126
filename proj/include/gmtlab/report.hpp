// Verification reports: per-check values against thresholds, fitted exponents,
// and provenance. JSON and CSV emission, lossless numeric round-trip.
#pragma once

#include <gmtlab/geometry.hpp>

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace gmtlab {

enum class CheckStatus { Pass, Fail, NotApplicable };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "fail";
}

inline CheckStatus check_status_from(const std::string& s) {
  if (s == "pass") return CheckStatus::Pass;
  if (s == "fail") return CheckStatus::Fail;
  if (s == "not-applicable") return CheckStatus::NotApplicable;
  throw error("report: unknown status '" + s + "'");
}

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  double tol_disc = 0.0;
  CheckStatus status = CheckStatus::Fail;
};

struct FittedSummary {
  double beta = 0.0;
  double C = 0.0;
  double largest_working_eps0 = 0.0;
};

struct VerificationReport {
  std::string scenario;
  std::string side;  // "elliptic" | "parabolic"
  std::vector<Check> checks;
  FittedSummary fitted;
  std::map<std::string, std::string> provenance;  // config echo + code version

  bool all_passed() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::Fail) return false;
    return true;
  }

  void add(std::string name, double value, double threshold, double tol, CheckStatus st) {
    checks.push_back({std::move(name), value, threshold, tol, st});
  }

  /// Pass iff value >= threshold - tol (lower-bound style checks).
  void add_lower_bound(std::string name, double value, double threshold, double tol) {
    CheckStatus st = value >= threshold - tol ? CheckStatus::Pass : CheckStatus::Fail;
    add(std::move(name), value, threshold, tol, st);
  }

  /// Pass iff value <= threshold + tol (upper-bound style checks).
  void add_upper_bound(std::string name, double value, double threshold, double tol) {
    CheckStatus st = value <= threshold + tol ? CheckStatus::Pass : CheckStatus::Fail;
    add(std::move(name), value, threshold, tol, st);
  }
};

namespace detail {

inline std::string fmt17(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, p);
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["side"] = r.side;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["threshold"] = c.threshold;
    jc["tol_disc"] = c.tol_disc;
    jc["status"] = to_string(c.status);
    j["checks"].push_back(jc);
  }
  j["fitted"] = {{"beta", r.fitted.beta},
                 {"C", r.fitted.C},
                 {"largest_working_eps0", r.fitted.largest_working_eps0}};
  j["provenance"] = r.provenance;
  return j;
}

inline VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.scenario = j.at("scenario").get<std::string>();
  r.side = j.at("side").get<std::string>();
  for (const auto& jc : j.at("checks")) {
    Check c;
    c.name = jc.at("name").get<std::string>();
    c.value = jc.at("value").get<double>();
    c.threshold = jc.at("threshold").get<double>();
    c.tol_disc = jc.at("tol_disc").get<double>();
    c.status = check_status_from(jc.at("status").get<std::string>());
    r.checks.push_back(c);
  }
  r.fitted.beta = j.at("fitted").at("beta").get<double>();
  r.fitted.C = j.at("fitted").at("C").get<double>();
  r.fitted.largest_working_eps0 = j.at("fitted").at("largest_working_eps0").get<double>();
  for (auto it = j.at("provenance").begin(); it != j.at("provenance").end(); ++it)
    r.provenance[it.key()] = it.value().get<std::string>();
  return r;
}

/// One check per row; numeric fields carry 17 significant digits.
inline std::string report_to_csv(const VerificationReport& r) {
  std::string out = "scenario,side,name,value,threshold,tol_disc,status\n";
  for (const auto& c : r.checks) {
    out += r.scenario + "," + r.side + "," + c.name + "," + detail::fmt17(c.value) + "," +
           detail::fmt17(c.threshold) + "," + detail::fmt17(c.tol_disc) + "," +
           to_string(c.status) + "\n";
  }
  return out;
}

inline std::vector<Check> checks_from_csv(const std::string& csv) {
  std::vector<Check> out;
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw error("report: malformed csv row '" + line + "'");
    Check c;
    c.name = cells[2];
    auto num = [](const std::string& s) {
      double v;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc()) throw error("report: malformed csv number '" + s + "'");
      return v;
    };
    c.value = num(cells[3]);
    c.threshold = num(cells[4]);
    c.tol_disc = num(cells[5]);
    c.status = check_status_from(cells[6]);
    out.push_back(c);
  }
  return out;
}

inline void emit_report(const VerificationReport& r, const std::string& format,
                        const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("report: cannot write '" + path + "'");
  if (format == "json") {
    os << report_to_json(r).dump(2) << "\n";
  } else if (format == "csv") {
    os << report_to_csv(r);
  } else {
    throw error("report: unknown format '" + format + "'");
  }
}

/// Two-column (log r, log osc) table for decay-curve plotting.
inline void emit_decay_curve(const std::vector<double>& radii, const std::vector<double>& osc,
                             const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("report: cannot write '" + path + "'");
  os << "log_r,log_osc\n";
  for (size_t k = 0; k < radii.size(); ++k) {
    if (osc[k] <= 0) continue;
    os << detail::fmt17(std::log(radii[k])) << "," << detail::fmt17(std::log(osc[k])) << "\n";
  }
}

}  // namespace gmtlab
