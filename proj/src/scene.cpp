#include "evbias/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "evbias/error.hpp"

namespace evbias {
namespace {

constexpr double kTextureCell = 4.0;  // lattice spacing ~ correlation length, px

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double wrap(double u, double width) {
  double w = std::fmod(u, width);
  if (w < 0) w += width;
  if (w >= width) w = 0.0;  // fmod of a tiny negative can round up to width
  return w;
}

}  // namespace

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::Bar: return "bar";
    case SceneKind::Grating: return "grating";
    case SceneKind::Texture: return "texture";
  }
  return "?";
}

SceneKind parse_scene_kind(std::string_view text) {
  if (text == "bar") return SceneKind::Bar;
  if (text == "grating") return SceneKind::Grating;
  if (text == "texture") return SceneKind::Texture;
  throw ValidationError("unknown scene kind '" + std::string(text) +
                        "'; expected bar, grating or texture");
}

void validate(const SceneSpec& spec) {
  validate(spec.geometry);
  if (spec.duration_us == 0) throw ValidationError("scene duration must be positive");
  if (!(spec.contrast >= 0.0 && spec.contrast <= 1.0)) {
    throw ValidationError("scene contrast must lie in [0, 1]");
  }
  if (!(spec.background >= 0.0 && spec.background <= 1.0)) {
    throw ValidationError("scene background must lie in [0, 1]");
  }
  if (spec.contrast + spec.background > 1.0) {
    throw ValidationError("scene contrast + background must not exceed 1");
  }
  if (!std::isfinite(spec.speed_px_s)) throw ValidationError("scene speed must be finite");
  if (spec.kind == SceneKind::Grating && !(spec.spatial_period_px >= 2.0)) {
    throw ValidationError("grating spatial period must be at least 2 px");
  }
  if (spec.kind == SceneKind::Bar && !(spec.bar_width_px >= 1.0)) {
    throw ValidationError("bar width must be at least 1 px");
  }
}

Scene::Scene(SceneSpec spec) : spec_(spec) {
  validate(spec_);
  if (spec_.kind != SceneKind::Texture) return;
  // Value noise: uniform lattice values, bilinearly interpolated. The
  // lattice wraps horizontally so the column count must tile the width.
  const double width = spec_.geometry.width;
  lattice_cols_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(width / kTextureCell)));
  cell_width_ = width / static_cast<double>(lattice_cols_);
  const std::size_t lattice_rows =
      static_cast<std::size_t>(std::ceil((spec_.geometry.height - 1) / kTextureCell)) + 2;
  std::vector<double> lattice(lattice_rows * lattice_cols_);
  for (std::size_t r = 0; r < lattice_rows; ++r) {
    for (std::size_t c = 0; c < lattice_cols_; ++c) {
      const std::uint64_t h =
          splitmix64(spec_.seed ^ splitmix64((static_cast<std::uint64_t>(r) << 32) | c));
      lattice[r * lattice_cols_ + c] = static_cast<double>(h >> 11) * 0x1.0p-53;
    }
  }
  row_profiles_.resize(spec_.geometry.height * lattice_cols_);
  for (std::size_t y = 0; y < spec_.geometry.height; ++y) {
    const double gy = static_cast<double>(y) / kTextureCell;
    const auto r0 = static_cast<std::size_t>(gy);
    const double fy = gy - static_cast<double>(r0);
    for (std::size_t c = 0; c < lattice_cols_; ++c) {
      const double top = lattice[r0 * lattice_cols_ + c];
      const double bottom = lattice[(r0 + 1) * lattice_cols_ + c];
      row_profiles_[y * lattice_cols_ + c] = top + fy * (bottom - top);
    }
  }
}

Scene Scene::oscillating(SceneSpec spec, std::uint64_t half_period_us) {
  if (half_period_us == 0) throw ValidationError("oscillation half-period must be positive");
  Scene scene(spec);
  scene.half_period_us_ = half_period_us;
  return scene;
}

double Scene::displacement(std::uint64_t t_us) const noexcept {
  if (!half_period_us_) return spec_.speed_px_s * static_cast<double>(t_us) / 1e6;
  const std::uint64_t half = *half_period_us_;
  const std::uint64_t phase = t_us % (2 * half);
  const std::uint64_t ramp = phase <= half ? phase : 2 * half - phase;
  return spec_.speed_px_s * static_cast<double>(ramp) / 1e6;
}

double Scene::luminance(std::uint32_t x, std::uint32_t y, std::uint64_t t_us) const {
  if (!spec_.geometry.contains(x, y)) {
    throw ValidationError("luminance sample (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") outside the scene");
  }
  if (t_us > spec_.duration_us) throw ValidationError("luminance sample time beyond duration");
  return sample(static_cast<double>(x) - displacement(t_us), y);
}

double Scene::sample(double u, std::uint32_t y) const noexcept {
  const double width = spec_.geometry.width;
  switch (spec_.kind) {
    case SceneKind::Bar:
      return wrap(u, width) < spec_.bar_width_px ? spec_.background + spec_.contrast
                                                 : spec_.background;
    case SceneKind::Grating:
      return spec_.background +
             spec_.contrast * (1.0 + std::sin(2.0 * std::numbers::pi * u / spec_.spatial_period_px)) / 2.0;
    case SceneKind::Texture:
      return spec_.background + spec_.contrast * texture(wrap(u, width), y);
  }
  return spec_.background;
}

double Scene::texture(double u, std::uint32_t y) const noexcept {
  const double gx = u / cell_width_;
  const auto c0 = std::min(static_cast<std::size_t>(gx), lattice_cols_ - 1);
  const double fx = std::clamp(gx - static_cast<double>(c0), 0.0, 1.0);
  const std::size_t c1 = c0 + 1 == lattice_cols_ ? 0 : c0 + 1;
  const double* profile = &row_profiles_[y * lattice_cols_];
  return std::clamp(profile[c0] + fx * (profile[c1] - profile[c0]), 0.0, 1.0);
}

double Scene::wrap_offset(double displacement) const noexcept {
  return wrap(-displacement, spec_.geometry.width);
}

double Scene::sample_shifted(std::uint32_t x, std::uint32_t y, double displacement,
                             double wrapped) const noexcept {
  if (spec_.kind != SceneKind::Texture) return sample(static_cast<double>(x) - displacement, y);
  double u = wrapped + static_cast<double>(x);
  const double width = spec_.geometry.width;
  if (u >= width) u -= width;
  return spec_.background + spec_.contrast * texture(u, y);
}

double luminance(const SceneSpec& spec, std::uint32_t x, std::uint32_t y, std::uint64_t t_us) {
  return Scene(spec).luminance(x, y, t_us);
}

Scene desk_scene() {
  SceneSpec spec;
  return Scene::oscillating(spec, 1'000'000);
}

Scene parse_scene_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("scene document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("scene document must be a JSON object");

  static const std::array<std::string_view, 11> kKeys{
      "width", "height", "duration_us", "kind", "speed_px_s", "contrast",
      "background", "spatial_period_px", "bar_width_px", "seed", "half_period_us"};
  for (const auto& item : doc.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), item.key()) == kKeys.end()) {
      throw ValidationError("unknown scene key '" + item.key() + "'");
    }
  }

  const Scene base = desk_scene();
  SceneSpec spec = base.spec();
  std::uint64_t half_period = base.half_period_us().value_or(0);
  try {
    auto get = [&doc](const char* key, auto& target) {
      if (doc.contains(key) && !doc[key].is_null()) doc[key].get_to(target);
    };
    auto get_uint = [&doc](const char* key, auto& target) {
      if (!doc.contains(key)) return;
      const auto& v = doc[key];
      if (v.is_null()) return;
      if (!v.is_number_unsigned()) {
        throw ValidationError(std::string("scene key '") + key + "' must be a non-negative integer");
      }
      const auto raw = v.get<std::uint64_t>();
      using T = std::remove_reference_t<decltype(target)>;
      if (raw > std::numeric_limits<T>::max()) {
        throw ValidationError(std::string("scene key '") + key + "' is too large");
      }
      target = static_cast<T>(raw);
    };
    get_uint("width", spec.geometry.width);
    get_uint("height", spec.geometry.height);
    get_uint("duration_us", spec.duration_us);
    get_uint("seed", spec.seed);
    if (doc.contains("half_period_us") && doc["half_period_us"].is_null()) half_period = 0;
    get_uint("half_period_us", half_period);
    if (doc.contains("kind")) spec.kind = parse_scene_kind(doc["kind"].get<std::string>());
    get("speed_px_s", spec.speed_px_s);
    get("contrast", spec.contrast);
    get("background", spec.background);
    get("spatial_period_px", spec.spatial_period_px);
    get("bar_width_px", spec.bar_width_px);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scene document has a mistyped value: ") + e.what());
  }
  return half_period > 0 ? Scene::oscillating(spec, half_period) : Scene(spec);
}

std::string scene_to_json(const Scene& scene) {
  const SceneSpec& s = scene.spec();
  nlohmann::ordered_json doc;
  doc["width"] = s.geometry.width;
  doc["height"] = s.geometry.height;
  doc["duration_us"] = s.duration_us;
  doc["kind"] = std::string(to_string(s.kind));
  doc["speed_px_s"] = s.speed_px_s;
  doc["contrast"] = s.contrast;
  doc["background"] = s.background;
  doc["spatial_period_px"] = s.spatial_period_px;
  doc["bar_width_px"] = s.bar_width_px;
  doc["seed"] = s.seed;
  doc["half_period_us"] = scene.half_period_us().value_or(0);
  return doc.dump(2) + "\n";
}

}  // namespace evbias
