#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace evbias {

enum class BiasName { Fo, Hpf, DiffOn, DiffOff, Refr };

inline constexpr std::array<BiasName, 5> kAllBiases{
    BiasName::Fo, BiasName::Hpf, BiasName::DiffOn, BiasName::DiffOff, BiasName::Refr};

/// Register-level name, e.g. "bias_diff_on".
std::string_view to_string(BiasName name);

/// Accepts the register names ("bias_fo") and the short forms ("fo").
/// Throws ValidationError listing the five valid names otherwise.
BiasName parse_bias_name(std::string_view text);

struct BiasRange {
  int min;
  int max;
  [[nodiscard]] constexpr bool contains(int v) const noexcept { return v >= min && v <= max; }
};

BiasRange range_of(BiasName name);
int default_value(BiasName name);

/// The ten values each bias is swept over, in ascending order.
std::array<int, 10> tested_values(BiasName name);

/// The five bias registers. Values are abstract register integers.
struct BiasSet {
  int bias_fo = 74;
  int bias_hpf = 0;
  int bias_diff_on = 115;
  int bias_diff_off = 52;
  int bias_refr = 68;

  [[nodiscard]] int get(BiasName name) const;
  void set(BiasName name, int value);
  /// Copy with one register replaced.
  [[nodiscard]] BiasSet with(BiasName name, int value) const;

  bool operator==(const BiasSet&) const = default;
};

BiasSet default_biases();

struct BiasViolation {
  BiasName bias;
  int value;
  BiasRange range;

  /// e.g. "bias_diff_on = 80 is below 81 (valid range 81-255)"
  [[nodiscard]] std::string message() const;
};

/// Every register outside its valid range; empty when the set is valid.
std::vector<BiasViolation> validate(const BiasSet& biases);

/// Throws ValidationError carrying the first violation's message.
void require_valid(const BiasSet& biases);

}  // namespace evbias
