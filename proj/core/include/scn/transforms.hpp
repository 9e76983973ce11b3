#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "scn/io.hpp"
#include "scn/tensor.hpp"

namespace scn {

inline constexpr std::size_t kDefaultSampleBudget = 50;
inline constexpr std::size_t kDefaultProductBudget = 4096;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

class TransformSpec;

namespace transform {

struct Identity {
  friend bool operator==(const Identity&, const Identity&) = default;
};

struct FlipHorizontal {
  friend bool operator==(const FlipHorizontal&, const FlipHorizontal&) = default;
};

/// Rotation about the image center on a regular angle grid over [lo, hi].
struct Rotate {
  Range degrees{-30.0, 30.0};
  double step_degrees = 1.0;
  friend bool operator==(const Rotate&, const Rotate&) = default;
};

/// Edge-replicating pad, then a uniformly placed window of the input size.
/// height/width of 0 mean "same as input"; anything else must match it.
struct Crop {
  std::size_t padding = 4;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t sample_budget = kDefaultSampleBudget;
  friend bool operator==(const Crop&, const Crop&) = default;
};

/// Paints a fill-valued rectangle of area scale*H*W and aspect ratio h/w.
struct Cutout {
  double fill = 0.5;
  double scale = 0.05;
  double ratio = 1.0;
  std::size_t sample_budget = kDefaultSampleBudget;
  friend bool operator==(const Cutout&, const Cutout&) = default;
};

/// Brightness, contrast, then saturation with independently drawn factors.
struct ColorJitter {
  Range brightness{0.75, 1.25};
  Range contrast{0.75, 1.25};
  Range saturation{0.75, 1.25};
  std::size_t sample_budget = kDefaultSampleBudget;
  friend bool operator==(const ColorJitter&, const ColorJitter&) = default;
};

/// Orbit members read from disk (e.g. pre-rendered 3D views).
struct PrecomputedOrbit {
  std::filesystem::path manifest;
  std::shared_ptr<const PrecomputedOrbits> table;
  friend bool operator==(const PrecomputedOrbit& a, const PrecomputedOrbit& b) {
    return a.manifest == b.manifest;
  }
};

/// Sequential application g_L o ... o g_1 over the Cartesian product of the
/// factors' member lists, truncated to sample_budget members.
struct Product {
  std::vector<TransformSpec> factors;
  std::size_t sample_budget = kDefaultProductBudget;
  friend bool operator==(const Product&, const Product&);
};

}  // namespace transform

/// A transformation set G.
class TransformSpec {
 public:
  using Params = std::variant<transform::Identity, transform::FlipHorizontal, transform::Rotate,
                              transform::Crop, transform::Cutout, transform::ColorJitter,
                              transform::PrecomputedOrbit, transform::Product>;

  TransformSpec() = default;
  /// Validates parameters; throws UsageError on empty ranges, zero budgets or
  /// products with fewer than two factors.
  TransformSpec(Params params, std::string name = {});

  const Params& params() const noexcept { return params_; }
  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&params_);
  }

  /// Kind keyword as used in JSON ("identity", "flip-horizontal", ...).
  std::string kind() const;
  /// Preset name if one was given, else a label derived from the kind.
  std::string label() const;

  friend bool operator==(const TransformSpec& a, const TransformSpec& b) { return a.params_ == b.params_; }

 private:
  Params params_;
  std::string name_;
};

/// Names of the built-in presets: base, flip, rotate, crop, cutout,
/// colorjitter, 3dview.
const std::vector<std::string>& preset_names();

/// Preset with the standard augmentation parameters baked in. "3dview" needs
/// the orbit manifest path.
TransformSpec preset(const std::string& name, const std::filesystem::path& orbit_manifest = {});

TransformSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const TransformSpec& spec);

/// Accepts a preset name, an inline JSON object, or a path to a JSON file.
TransformSpec parse_transform(const std::string& text);

/// Direct product of two or more specs.
TransformSpec compose(std::vector<TransformSpec> specs);

/// A finite orbit G(x); members[0] is always x itself.
struct Orbit {
  std::vector<DataPoint> members;
  std::size_t source_index = 0;
};

/// Materializes the finite orbit of x. Random draws are keyed by
/// (seed, point_id, draw index) only, so the orbit of a point is the same
/// regardless of call order or thread.
Orbit materialize_orbit(const DataPoint& x, const TransformSpec& spec, std::uint64_t seed,
                        std::size_t point_id);

/// Horizontal mirror of one image.
DataPoint flip_horizontal(const DataPoint& x);

/// Rotation by `degrees` about the image center with inverse-mapped bilinear
/// sampling; pixels mapped from outside the frame read as 0.
DataPoint rotate(const DataPoint& x, double degrees);

/// Window of the edge-padded image whose top-left corner sits at
/// (top, left) in padded coordinates.
DataPoint pad_crop(const DataPoint& x, std::size_t padding, std::size_t top, std::size_t left);

DataPoint cutout(const DataPoint& x, std::size_t top, std::size_t left, std::size_t height,
                 std::size_t width, float fill);

DataPoint color_jitter(const DataPoint& x, double brightness, double contrast, double saturation);

}  // namespace scn
