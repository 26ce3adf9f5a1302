#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "hopcap/error.hpp"
#include "hopcap/report.hpp"

namespace hopcap {

namespace {

std::string fixed6(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite value in capacity table");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw DataError("unterminated quote on CSV line " + std::to_string(line_no));
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw DataError("bad number '" + s + "' on CSV line " + std::to_string(line_no));
  return v;
}

}  // namespace

CapacityPoint make_capacity_point(std::string label, std::optional<double> param_count,
                                  const ContentEstimate& estimate, double baseline_bits) {
  CapacityPoint p;
  p.label = std::move(label);
  p.param_count = param_count;
  p.task = std::string(to_string(estimate.task));
  p.model_kind = estimate.model_kind ? std::string(to_string(*estimate.model_kind)) : p.task;
  p.entropy_bits = estimate.entropy_bits;
  p.total_loss_bits = estimate.total_loss_bits;
  p.content_bits = estimate.content_bits;
  if (param_count) p.bits_per_param = bits_per_parameter(estimate.content_bits, *param_count);
  p.baseline_bits = baseline_bits;
  return p;
}

std::string capacity_table(std::vector<CapacityPoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const CapacityPoint& a, const CapacityPoint& b) {
    const double pa = a.param_count.value_or(-1.0);
    const double pb = b.param_count.value_or(-1.0);
    return std::tie(a.model_kind, pa, a.label) < std::tie(b.model_kind, pb, b.label);
  });
  std::string out(kCapacityHeader);
  out += '\n';
  for (const auto& p : points) {
    out += csv_field(p.label);
    out += ',';
    if (p.param_count) out += fixed6(*p.param_count);
    out += ',' + csv_field(p.model_kind) + ',' + csv_field(p.task) + ',';
    out += fixed6(p.entropy_bits) + ',' + fixed6(p.total_loss_bits) + ',' + fixed6(p.content_bits) + ',';
    if (p.bits_per_param) out += fixed6(*p.bits_per_param);
    out += ',' + fixed6(p.baseline_bits) + '\n';
  }
  return out;
}

std::vector<CapacityPoint> parse_capacity_table(std::string_view csv) {
  std::vector<CapacityPoint> points;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header = true;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    auto line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kCapacityHeader) throw DataError("unexpected capacity table header");
      header = false;
      continue;
    }
    const auto f = split_csv_line(line, line_no);
    if (f.size() != 9) throw DataError("expected 9 fields on CSV line " + std::to_string(line_no));
    CapacityPoint p;
    p.label = f[0];
    if (!f[1].empty()) p.param_count = parse_double(f[1], line_no);
    p.model_kind = f[2];
    p.task = f[3];
    p.entropy_bits = parse_double(f[4], line_no);
    p.total_loss_bits = parse_double(f[5], line_no);
    p.content_bits = parse_double(f[6], line_no);
    if (!f[7].empty()) p.bits_per_param = parse_double(f[7], line_no);
    p.baseline_bits = parse_double(f[8], line_no);
    points.push_back(std::move(p));
  }
  if (header) throw DataError("empty capacity table");
  return points;
}

}  // namespace hopcap
