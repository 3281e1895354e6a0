#include "siegel/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "siegel/error.hpp"
#include "siegel/smoothing.hpp"

#ifndef SIEGEL_LAB_VERSION
#define SIEGEL_LAB_VERSION "unknown"
#endif

namespace siegel {

namespace {

Provenance provenance_from(const std::string& s) {
  if (s == "formula") return Provenance::formula;
  if (s == "override") return Provenance::override_;
  if (s == "clamped") return Provenance::clamped;
  throw ConfigError("unknown provenance '" + s + "'");
}

json scale_json(const Scale& s) {
  return json{{"value", s.value}, {"provenance", to_string(s.provenance)}};
}

Scale scale_from(const json& j) {
  return {j.at("value").get<double>(), provenance_from(j.at("provenance").get<std::string>())};
}

template <std::size_t N>
json array_json(const std::array<double, N>& a) {
  json out = json::array();
  for (double v : a) out.push_back(number_or_null(v));
  return out;
}

template <std::size_t N>
std::array<double, N> array_from(const json& j) {
  std::array<double, N> a{};
  for (std::size_t i = 0; i < N; ++i) a[i] = number_from(j.at(i));
  return a;
}

}  // namespace

std::string software_version() { return SIEGEL_LAB_VERSION; }

json envelope(const std::string& command, const json& config) {
  return json{{"report_version", kReportVersion},
              {"software_version", software_version()},
              {"command", command},
              {"cutoff_fingerprint", cutoff_fingerprint()},
              {"config", config}};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json to_json(const QualityProxy& q) {
  return json{{"eta_hat", q.eta_hat}, {"method", to_string(q.method)}, {"raw_ratio", q.raw_ratio}};
}

QualityProxy quality_from_json(const json& j) {
  QualityProxy q;
  q.eta_hat = j.at("eta_hat").get<double>();
  const auto m = j.at("method").get<std::string>();
  if (m == "user-supplied") q.method = QualityMethod::user_supplied;
  else if (m == "lprime-ratio") q.method = QualityMethod::lprime_ratio;
  else throw ConfigError("unknown quality method '" + m + "'");
  q.raw_ratio = j.at("raw_ratio").get<double>();
  return q;
}

json to_json(const SiegelParams& p) {
  return json{{"x", p.x},
              {"k", p.k},
              {"ell", p.ell},
              {"eps0", p.eps0},
              {"eta", to_json(p.eta)},
              {"R", scale_json(p.R)},
              {"D", scale_json(p.D)},
              {"R0", scale_json(p.R0)}};
}

SiegelParams params_from_json(const json& j) {
  SiegelParams p;
  p.x = j.at("x").get<std::uint64_t>();
  p.k = j.at("k").get<int>();
  p.ell = j.at("ell").get<int>();
  p.eps0 = j.at("eps0").get<double>();
  p.eta = quality_from_json(j.at("eta"));
  p.R = scale_from(j.at("R"));
  p.D = scale_from(j.at("D"));
  p.R0 = scale_from(j.at("R0"));
  return p;
}

json to_json(const SingularSeries& s) {
  return json{{"value", s.value},     {"partial", s.partial},       {"lower", s.lower},
              {"upper", s.upper},     {"tail_bound", s.tail_bound}, {"cutoff", s.cutoff}};
}

SingularSeries series_from_json(const json& j) {
  SingularSeries s;
  s.value = j.at("value").get<double>();
  s.partial = j.at("partial").get<double>();
  s.lower = j.at("lower").get<double>();
  s.upper = j.at("upper").get<double>();
  s.tail_bound = j.at("tail_bound").get<double>();
  s.cutoff = j.at("cutoff").get<std::uint64_t>();
  return s;
}

json to_json(const ExceptionalSumReport& r) {
  json bands = json::array();
  for (const auto& b : r.bands) {
    bands.push_back(json{{"m", b.m},
                         {"lower", b.lower},
                         {"upper", b.upper},
                         {"sum", b.sum},
                         {"comparator", b.comparator}});
  }
  return json{{"x", r.x},
              {"eps", r.eps},
              {"eta_hat", r.eta_hat},
              {"method", to_string(r.method)},
              {"lower", r.lower},
              {"sum", r.sum},
              {"count", r.count},
              {"comparator", r.comparator},
              {"bands", bands}};
}

json to_json(const ChainReport& r, bool include_timings) {
  json j{{"x", r.x},
         {"delta", r.delta},
         {"shifts", json{{"h", r.shifts.h}, {"h_prime", r.shifts.h_prime}}},
         {"params", to_json(r.params)},
         {"lines", array_json(r.lines)},
         {"singular_series", to_json(r.series)},
         {"S", r.S},
         {"gaps", array_json(r.gaps)},
         {"relative_gaps", array_json(r.relative_gaps)},
         {"T", r.T},
         {"middle_window_empty", r.middle_window_empty},
         {"sharp_degenerate", r.sharp_degenerate}};
  if (include_timings) j["seconds"] = array_json(r.seconds);
  return j;
}

ChainReport chain_from_json(const json& j) {
  ChainReport r;
  r.x = j.at("x").get<std::uint64_t>();
  r.delta = j.at("delta").get<std::int64_t>();
  r.shifts.h = j.at("shifts").at("h").get<std::vector<std::uint64_t>>();
  r.shifts.h_prime = j.at("shifts").at("h_prime").get<std::vector<std::uint64_t>>();
  r.params = params_from_json(j.at("params"));
  r.lines = array_from<5>(j.at("lines"));
  r.series = series_from_json(j.at("singular_series"));
  r.S = j.at("S").get<double>();
  r.gaps = array_from<5>(j.at("gaps"));
  r.relative_gaps = array_from<5>(j.at("relative_gaps"));
  r.T = j.at("T").get<double>();
  r.middle_window_empty = j.at("middle_window_empty").get<bool>();
  r.sharp_degenerate = j.at("sharp_degenerate").get<bool>();
  if (j.contains("seconds")) r.seconds = array_from<5>(j.at("seconds"));
  return r;
}

json to_json(const LevelScan& s) {
  return json{{"sum", s.sum},         {"terms", s.terms},     {"max_abs", s.max_abs},
              {"trivial", s.trivial}, {"ratio", s.ratio}};
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  auto cell = [&](const std::string& c) {
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out << c;
      return;
    }
    out << '"';
    for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
    out << '"';
  };
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      cell(cells[i]);
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

}  // namespace siegel
