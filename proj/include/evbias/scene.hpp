#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evbias/event.hpp"

namespace evbias {

enum class SceneKind { Bar, Grating, Texture };

std::string_view to_string(SceneKind kind);
SceneKind parse_scene_kind(std::string_view text);

/// Horizontally translating luminance pattern with wraparound.
struct SceneSpec {
  SensorGeometry geometry{64, 64};
  std::uint64_t duration_us = 5'000'000;
  SceneKind kind = SceneKind::Texture;
  double speed_px_s = 60.0;
  double contrast = 0.6;
  double background = 0.2;
  double spatial_period_px = 16.0;  // grating
  double bar_width_px = 8.0;        // bar
  std::uint64_t seed = 0;           // texture
};

/// Throws ValidationError for out-of-range fields.
void validate(const SceneSpec& spec);

/// Luminance in [0, 1] of the non-oscillating scene. Throws ValidationError
/// when (x, y) is outside the geometry or t is outside [0, duration].
double luminance(const SceneSpec& spec, std::uint32_t x, std::uint32_t y, std::uint64_t t_us);

/// Pre-built sampler over a SceneSpec. Either translates at constant speed or
/// oscillates left/right on a triangle-wave displacement.
class Scene {
 public:
  explicit Scene(SceneSpec spec);
  /// Speed sign flips every half_period_us; the displacement is continuous.
  static Scene oscillating(SceneSpec spec, std::uint64_t half_period_us);

  [[nodiscard]] const SceneSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] SensorGeometry geometry() const noexcept { return spec_.geometry; }
  [[nodiscard]] std::uint64_t duration_us() const noexcept { return spec_.duration_us; }
  [[nodiscard]] std::optional<std::uint64_t> half_period_us() const noexcept {
    return half_period_us_;
  }

  /// Horizontal pattern offset in pixels at time t.
  [[nodiscard]] double displacement(std::uint64_t t_us) const noexcept;

  /// Range-checked sample.
  [[nodiscard]] double luminance(std::uint32_t x, std::uint32_t y, std::uint64_t t_us) const;

  /// Unchecked sample at a pattern coordinate u = x - displacement; u is
  /// wrapped into [0, width) internally.
  [[nodiscard]] double sample(double u, std::uint32_t y) const noexcept;

  /// Equivalent to sample(x - displacement, y), given
  /// wrapped = wrap_offset(displacement). Used by the simulator hot loop.
  [[nodiscard]] double sample_shifted(std::uint32_t x, std::uint32_t y, double displacement,
                                      double wrapped) const noexcept;
  /// -displacement wrapped into [0, width).
  [[nodiscard]] double wrap_offset(double displacement) const noexcept;

 private:
  double texture(double u, std::uint32_t y) const noexcept;

  SceneSpec spec_;
  std::optional<std::uint64_t> half_period_us_;
  // Texture lattice interpolated vertically onto every sensor row:
  // height x lattice_cols_, row-major.
  std::vector<double> row_profiles_;
  std::size_t lattice_cols_ = 0;
  double cell_width_ = 1.0;
};

/// Scene used by the acceptance runs: 64x64 texture, contrast 0.6,
/// background 0.2, 60 px/s, 1 s half-period, 5 s.
Scene desk_scene();

// JSON scene document. Keys: width, height, duration_us, kind, speed_px_s,
// contrast, background, spatial_period_px, bar_width_px, seed,
// half_period_us. Missing keys take the desk_scene() values; a
// half_period_us of 0 or null means a constant-speed scene.
Scene parse_scene_json(std::string_view text);
std::string scene_to_json(const Scene& scene);

}  // namespace evbias
