#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pdcv/harness.hpp"

namespace pdcv {

namespace {

constexpr const char* kAggregateHeader = "algorithm,n,alpha,episode,mean,std,stderr,runs,diverged";
constexpr const char* kCurveHeader = "algorithm,n,alpha,episode,mean_return,stderr,runs";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double to_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t to_count(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') {
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void emit_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.n << ',' << num(r.alpha) << ',' << r.episode << ','
        << num(r.mean) << ',' << num(r.stddev) << ',' << num(r.std_error) << ',' << r.runs << ','
        << r.diverged << '\n';
  }
}

void emit_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  emit_csv(out, rows);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<AggregateRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kAggregateHeader) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::vector<AggregateRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 9 fields");
    rows.push_back({f[0], to_count(f[1], lineno), to_double(f[2], lineno), f[3],
                    to_double(f[4], lineno), to_double(f[5], lineno), to_double(f[6], lineno),
                    to_count(f[7], lineno), to_count(f[8], lineno)});
  }
  return rows;
}

void emit_curves_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << kCurveHeader << '\n';
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.n << ',' << num(r.alpha) << ',' << r.episode << ','
        << num(r.mean_return) << ',' << num(r.std_error) << ',' << r.runs << '\n';
  }
}

void emit_curves_csv(const std::vector<CurveRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  emit_curves_csv(out, rows);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace pdcv
