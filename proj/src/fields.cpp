#include "clab/fields.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "clab/errors.hpp"

namespace clab {
namespace {

std::vector<double> parse_numbers(std::string_view text, std::string_view preset) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto token = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    std::string buf(token);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size()) {
      fail(ErrorKind::UnknownPreset, "malformed number '" + buf + "' in preset '" + std::string(preset) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::pair<std::string_view, std::string_view> split_preset(std::string_view preset) {
  auto colon = preset.find(':');
  if (colon == std::string_view::npos) return {preset, {}};
  return {preset.substr(0, colon), preset.substr(colon + 1)};
}

void expect_arity(const std::vector<double>& args, std::size_t lo, std::size_t hi, std::string_view preset) {
  if (args.size() < lo || args.size() > hi) {
    fail(ErrorKind::UnknownPreset, "wrong number of parameters in preset '" + std::string(preset) + "'");
  }
}

int coord_sum(const Coord& x) { return x[0] + x[1] + x[2]; }

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

NodeField NodeField::parse(std::string_view preset) {
  NodeField f;
  f.description_ = std::string(preset);
  auto [name, rest] = split_preset(preset);
  if (name == "unit" && rest.empty()) {
    f.kind_ = Kind::constant;
    f.params_ = {1.0};
  } else if (name == "zero" && rest.empty()) {
    f.kind_ = Kind::constant;
    f.params_ = {0.0};
  } else if (name == "const") {
    f.params_ = parse_numbers(rest, preset);
    expect_arity(f.params_, 1, 1, preset);
    f.kind_ = Kind::constant;
  } else if (name == "radial") {
    auto args = parse_numbers(rest, preset);
    expect_arity(args, 1, 1, preset);
    f.kind_ = Kind::radial;
    f.params_ = {1.0, args[0]};
  } else if (name == "scaled_radial") {
    f.params_ = parse_numbers(rest, preset);
    expect_arity(f.params_, 2, 2, preset);
    f.kind_ = Kind::radial;
  } else if (name == "checkerboard") {
    f.params_ = parse_numbers(rest, preset);
    expect_arity(f.params_, 2, 2, preset);
    f.kind_ = Kind::checkerboard;
  } else if (name == "box") {
    f.params_ = parse_numbers(rest, preset);
    expect_arity(f.params_, 1, 3, preset);
    if (f.params_.size() == 1) f.params_.push_back(1.0);
    if (f.params_.size() == 2) f.params_.push_back(0.0);
    f.kind_ = Kind::box;
  } else {
    fail(ErrorKind::UnknownPreset, "unknown node field preset '" + std::string(preset) + "'");
  }
  return f;
}

NodeField NodeField::constant(double v) { return parse("const:" + format_double(v)); }

NodeField NodeField::table(double fallback, std::vector<std::pair<Coord, double>> entries) {
  NodeField f;
  f.kind_ = Kind::table;
  f.params_ = {fallback};
  std::ostringstream os;
  os.precision(17);
  os << "table(default=" << fallback;
  for (auto& [x, v] : entries) {
    f.entries_[x] = v;
  }
  for (auto& [x, v] : f.entries_) os << ";" << x[0] << "," << x[1] << "," << x[2] << "=" << v;
  os << ")";
  f.description_ = os.str();
  return f;
}

double NodeField::operator()(const Coord& x) const {
  switch (kind_) {
    case Kind::constant: return params_[0];
    case Kind::radial: return params_[0] * std::pow(1.0 + sup_norm(x), params_[1]);
    case Kind::checkerboard: return (coord_sum(x) % 2 == 0) ? params_[0] : params_[1];
    case Kind::box: return sup_norm(x) <= static_cast<int>(params_[0]) ? params_[1] : params_[2];
    case Kind::table: {
      auto it = entries_.find(x);
      return it == entries_.end() ? params_[0] : it->second;
    }
  }
  return 0.0;
}

Eigen::VectorXd NodeField::on(const NodeSet& nodes) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) out[static_cast<Eigen::Index>(i)] = (*this)(nodes[i]);
  return out;
}

void NodeField::check_domain(const NodeSet& ambient) const {
  for (const auto& [x, v] : entries_) {
    if (!ambient.contains(x)) {
      fail(ErrorKind::SpecDomainMismatch, "table entry at " + to_string(x, ambient.dim()) + " outside ambient box");
    }
  }
}

EdgeField EdgeField::parse(std::string_view preset) {
  EdgeField f;
  f.description_ = std::string(preset);
  auto [name, rest] = split_preset(preset);
  if (name == "unit" && rest.empty()) {
    f.kind_ = Kind::per_axis;
    f.params_ = {1.0};
  } else if (name == "zero" && rest.empty()) {
    f.kind_ = Kind::per_axis;
    f.params_ = {0.0};
  } else if (name == "const") {
    f.params_ = parse_numbers(rest, preset);
    expect_arity(f.params_, 1, kMaxDim, preset);
    f.kind_ = Kind::per_axis;
  } else if (name == "checkerboard") {
    f.params_ = parse_numbers(rest, preset);
    expect_arity(f.params_, 2, 2, preset);
    f.kind_ = Kind::checkerboard;
  } else if (name == "radial") {
    f.params_ = parse_numbers(rest, preset);
    expect_arity(f.params_, 1, 1, preset);
    f.kind_ = Kind::radial;
  } else {
    fail(ErrorKind::UnknownPreset, "unknown edge field preset '" + std::string(preset) + "'");
  }
  return f;
}

EdgeField EdgeField::constant(double v) { return parse("const:" + format_double(v)); }

EdgeField EdgeField::table(double fallback, std::vector<Entry> entries) {
  EdgeField f;
  f.kind_ = Kind::table;
  f.params_ = {fallback};
  for (const auto& e : entries) {
    if (e.axis < 0 || e.axis >= kMaxDim) fail(ErrorKind::SpecDomainMismatch, "edge axis out of range");
    f.entries_[{e.tail, e.axis}] = e.value;
  }
  std::ostringstream os;
  os.precision(17);
  os << "table(default=" << fallback;
  for (const auto& [key, v] : f.entries_) {
    os << ";" << key.first[0] << "," << key.first[1] << "," << key.first[2] << "/" << key.second << "=" << v;
  }
  os << ")";
  f.description_ = os.str();
  return f;
}

double EdgeField::operator()(const Coord& tail, int axis) const {
  switch (kind_) {
    case Kind::per_axis:
      return params_.size() == 1 ? params_[0] : params_[static_cast<std::size_t>(axis) < params_.size() ? axis : 0];
    case Kind::checkerboard: return (coord_sum(tail) % 2 == 0) ? params_[0] : params_[1];
    case Kind::radial: {
      Coord head = tail;
      ++head[axis];
      return std::pow(1.0 + std::max(sup_norm(tail), sup_norm(head)), params_[0]);
    }
    case Kind::table: {
      auto it = entries_.find({tail, axis});
      return it == entries_.end() ? params_[0] : it->second;
    }
  }
  return 0.0;
}

void EdgeField::check_domain(const NodeSet& ambient) const {
  for (const auto& [key, v] : entries_) {
    if (!ambient.contains(key.first) || key.second >= ambient.dim()) {
      fail(ErrorKind::SpecDomainMismatch,
           "edge table entry at " + to_string(key.first, ambient.dim()) + " outside ambient box");
    }
  }
}

bool EdgeField::identically_zero() const {
  if (kind_ == Kind::per_axis || kind_ == Kind::checkerboard) {
    for (double p : params_) {
      if (p != 0.0) return false;
    }
    return true;
  }
  if (kind_ == Kind::table) {
    if (params_[0] != 0.0) return false;
    for (const auto& [key, v] : entries_) {
      if (v != 0.0) return false;
    }
    return true;
  }
  return false;
}

}  // namespace clab
