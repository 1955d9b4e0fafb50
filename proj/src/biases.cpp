#include "evbias/biases.hpp"

#include <string>

#include "evbias/error.hpp"

namespace evbias {
namespace {

struct BiasInfo {
  std::string_view name;
  std::string_view short_name;
  BiasRange range;
  int default_value;
  std::array<int, 10> tested;
};

// Ranges, factory defaults and sweep grids of the Gen4 sensor registers.
constexpr std::array<BiasInfo, 5> kTable{{
    {"bias_fo", "fo", {0, 255}, 74, {0, 15, 30, 45, 60, 74, 90, 105, 120, 135}},
    {"bias_hpf", "hpf", {0, 255}, 0, {0, 28, 56, 84, 112, 140, 168, 196, 224, 255}},
    {"bias_diff_on", "diff_on", {81, 255}, 115, {81, 100, 115, 138, 157, 176, 195, 214, 233, 255}},
    {"bias_diff_off", "diff_off", {0, 79}, 52, {0, 9, 18, 27, 36, 45, 52, 61, 70, 79}},
    {"bias_refr", "refr", {0, 255}, 68, {0, 25, 50, 68, 100, 125, 150, 175, 200, 225}},
}};

const BiasInfo& info(BiasName name) {
  const auto index = static_cast<std::size_t>(name);
  if (index >= kTable.size()) throw ValidationError("unknown bias");
  return kTable[index];
}

}  // namespace

std::string_view to_string(BiasName name) { return info(name).name; }

BiasName parse_bias_name(std::string_view text) {
  for (BiasName b : kAllBiases) {
    if (text == info(b).name || text == info(b).short_name) return b;
  }
  std::string valid;
  for (BiasName b : kAllBiases) {
    if (!valid.empty()) valid += ", ";
    valid += info(b).name;
  }
  throw ValidationError("unknown bias '" + std::string(text) + "'; valid names: " + valid);
}

BiasRange range_of(BiasName name) { return info(name).range; }

int default_value(BiasName name) { return info(name).default_value; }

std::array<int, 10> tested_values(BiasName name) { return info(name).tested; }

int BiasSet::get(BiasName name) const {
  switch (name) {
    case BiasName::Fo: return bias_fo;
    case BiasName::Hpf: return bias_hpf;
    case BiasName::DiffOn: return bias_diff_on;
    case BiasName::DiffOff: return bias_diff_off;
    case BiasName::Refr: return bias_refr;
  }
  throw ValidationError("unknown bias");
}

void BiasSet::set(BiasName name, int value) {
  switch (name) {
    case BiasName::Fo: bias_fo = value; return;
    case BiasName::Hpf: bias_hpf = value; return;
    case BiasName::DiffOn: bias_diff_on = value; return;
    case BiasName::DiffOff: bias_diff_off = value; return;
    case BiasName::Refr: bias_refr = value; return;
  }
  throw ValidationError("unknown bias");
}

BiasSet BiasSet::with(BiasName name, int value) const {
  BiasSet copy = *this;
  copy.set(name, value);
  return copy;
}

BiasSet default_biases() {
  BiasSet b;
  for (BiasName name : kAllBiases) b.set(name, default_value(name));
  return b;
}

std::string BiasViolation::message() const {
  const bool below = value < range.min;
  return std::string(to_string(bias)) + " = " + std::to_string(value) + " is " +
         (below ? "below " + std::to_string(range.min) : "above " + std::to_string(range.max)) +
         " (valid range " + std::to_string(range.min) + "-" + std::to_string(range.max) + ")";
}

std::vector<BiasViolation> validate(const BiasSet& biases) {
  std::vector<BiasViolation> out;
  for (BiasName name : kAllBiases) {
    const int v = biases.get(name);
    const BiasRange r = range_of(name);
    if (!r.contains(v)) out.push_back({name, v, r});
  }
  return out;
}

void require_valid(const BiasSet& biases) {
  const auto violations = validate(biases);
  if (!violations.empty()) throw ValidationError(violations.front().message());
}

}  // namespace evbias
