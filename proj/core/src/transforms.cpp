#include "scn/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "scn/error.hpp"
#include "scn/rng.hpp"

namespace scn {
namespace fs = std::filesystem;
using nlohmann::json;

namespace transform {
bool operator==(const Product& a, const Product& b) {
  return a.sample_budget == b.sample_budget && a.factors == b.factors;
}
}  // namespace transform

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_range(const Range& r, const char* what) {
  if (!(std::isfinite(r.lo) && std::isfinite(r.hi)) || r.lo > r.hi) {
    throw UsageError(std::string(what) + " range is empty or non-finite");
  }
}

void check_budget(std::size_t budget) {
  if (budget == 0) throw UsageError("sample_budget must be at least 1");
}

float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

double luminance(const float* px, std::size_t channels) {
  if (channels == 3) return 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
  double s = 0.0;
  for (std::size_t c = 0; c < channels; ++c) s += px[c];
  return s / static_cast<double>(channels);
}

// One concrete element g of a transformation set, resolved for one point.
struct RotateOp { double degrees; };
struct CropOp { std::size_t padding, top, left; };
struct CutoutOp { std::size_t top, left, height, width; float fill; };
struct JitterOp { double brightness, contrast, saturation; };
struct IdentityOp {};
struct FlipOp {};
using Op = std::variant<IdentityOp, FlipOp, RotateOp, CropOp, CutoutOp, JitterOp>;

DataPoint apply(const Op& op, const DataPoint& x) {
  return std::visit(
      overloaded{
          [&](IdentityOp) { return x; },
          [&](FlipOp) { return flip_horizontal(x); },
          [&](const RotateOp& r) { return rotate(x, r.degrees); },
          [&](const CropOp& c) { return pad_crop(x, c.padding, c.top, c.left); },
          [&](const CutoutOp& c) { return cutout(x, c.top, c.left, c.height, c.width, c.fill); },
          [&](const JitterOp& j) { return color_jitter(x, j.brightness, j.contrast, j.saturation); },
      },
      op);
}

std::vector<double> angle_grid(const transform::Rotate& r) {
  std::vector<double> angles;
  const auto steps = static_cast<std::size_t>(std::floor((r.degrees.hi - r.degrees.lo) / r.step_degrees + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) angles.push_back(r.degrees.lo + static_cast<double>(k) * r.step_degrees);
  return angles;
}

// Ops for a non-precomputed, non-product kind. ops[0] is always the identity.
std::vector<Op> expand_ops(const TransformSpec& spec, const TensorShape& shape, std::uint64_t seed,
                           std::size_t point_id) {
  std::vector<Op> ops{IdentityOp{}};
  auto stream = [&](std::size_t draw) { return Stream({seed, point_id, draw}); };
  std::visit(
      overloaded{
          [&](const transform::Identity&) {},
          [&](const transform::FlipHorizontal&) { ops.push_back(FlipOp{}); },
          [&](const transform::Rotate& r) {
            for (double a : angle_grid(r)) {
              if (a != 0.0) ops.push_back(RotateOp{a});
            }
          },
          [&](const transform::Crop& c) {
            if ((c.height != 0 && c.height != shape.height) || (c.width != 0 && c.width != shape.width)) {
              throw DataError("shape mismatch: crop size " + std::to_string(c.height) + "x" +
                              std::to_string(c.width) + " differs from input " + shape.to_string());
            }
            for (std::size_t d = 0; d < c.sample_budget; ++d) {
              Stream s = stream(d);
              const std::size_t top = s.below(2 * c.padding + 1);
              const std::size_t left = s.below(2 * c.padding + 1);
              ops.push_back(CropOp{c.padding, top, left});
            }
          },
          [&](const transform::Cutout& c) {
            const double area = c.scale * static_cast<double>(shape.height * shape.width);
            const auto h = std::min(shape.height, static_cast<std::size_t>(std::floor(std::sqrt(area * c.ratio))));
            const auto w = std::min(shape.width, static_cast<std::size_t>(std::floor(std::sqrt(area / c.ratio))));
            for (std::size_t d = 0; d < c.sample_budget; ++d) {
              Stream s = stream(d);
              const std::size_t top = s.below(shape.height - h + 1);
              const std::size_t left = s.below(shape.width - w + 1);
              ops.push_back(CutoutOp{top, left, h, w, static_cast<float>(c.fill)});
            }
          },
          [&](const transform::ColorJitter& j) {
            for (std::size_t d = 0; d < j.sample_budget; ++d) {
              Stream s = stream(d);
              const double b = s.uniform(j.brightness.lo, j.brightness.hi);
              const double c = s.uniform(j.contrast.lo, j.contrast.hi);
              const double sat = s.uniform(j.saturation.lo, j.saturation.hi);
              ops.push_back(JitterOp{b, c, sat});
            }
          },
          [&](const transform::PrecomputedOrbit&) {},
          [&](const transform::Product&) {},
      },
      spec.params());
  return ops;
}

std::uint64_t factor_seed(std::uint64_t seed, std::size_t factor) {
  return hash_key({seed, 0x70726f64ULL, factor});
}

std::vector<DataPoint> members_of(const DataPoint& x, const TransformSpec& spec, std::uint64_t seed,
                                  std::size_t point_id) {
  if (const auto* pre = spec.get_if<transform::PrecomputedOrbit>()) {
    if (!pre->table) throw DataError("precomputed orbit table not loaded: " + pre->manifest.string());
    std::vector<DataPoint> members{x};
    for (auto& v : pre->table->views(point_id, x.shape())) members.push_back(std::move(v));
    return members;
  }
  if (const auto* prod = spec.get_if<transform::Product>()) {
    std::vector<DataPoint> members = members_of(x, prod->factors.front(), factor_seed(seed, 0), point_id);
    if (members.size() > prod->sample_budget) members.resize(prod->sample_budget);
    for (std::size_t f = 1; f < prod->factors.size(); ++f) {
      const TransformSpec& factor = prod->factors[f];
      if (factor.get_if<transform::PrecomputedOrbit>()) {
        throw UsageError("precomputed orbits can only be the first factor of a product");
      }
      std::vector<DataPoint> next;
      if (factor.get_if<transform::Product>()) {
        for (const auto& m : members) {
          if (next.size() == prod->sample_budget) break;
          for (auto& y : members_of(m, factor, factor_seed(seed, f), point_id)) {
            if (next.size() == prod->sample_budget) break;
            next.push_back(std::move(y));
          }
        }
        members = std::move(next);
        continue;
      }
      const auto ops = expand_ops(factor, x.shape(), factor_seed(seed, f), point_id);
      next.reserve(std::min(prod->sample_budget, members.size() * ops.size()));
      for (const auto& m : members) {
        for (const auto& op : ops) {
          if (next.size() == prod->sample_budget) break;
          next.push_back(apply(op, m));
        }
      }
      members = std::move(next);
    }
    return members;
  }
  const auto ops = expand_ops(spec, x.shape(), seed, point_id);
  std::vector<DataPoint> members;
  members.reserve(ops.size());
  for (const auto& op : ops) members.push_back(apply(op, x));
  return members;
}

Range range_from(const json& j, const char* key, Range fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw UsageError(std::string(key) + " must be [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

TransformSpec::TransformSpec(Params params, std::string name)
    : params_(std::move(params)), name_(std::move(name)) {
  std::visit(overloaded{
                 [](const transform::Identity&) {},
                 [](const transform::FlipHorizontal&) {},
                 [](const transform::Rotate& r) {
                   check_range(r.degrees, "rotation");
                   if (!(r.step_degrees > 0.0)) throw UsageError("rotation step must be positive");
                 },
                 [](const transform::Crop& c) { check_budget(c.sample_budget); },
                 [](const transform::Cutout& c) {
                   check_budget(c.sample_budget);
                   if (!(c.scale > 0.0 && c.scale <= 1.0)) throw UsageError("cutout scale must be in (0, 1]");
                   if (!(c.ratio > 0.0)) throw UsageError("cutout ratio must be positive");
                 },
                 [](const transform::ColorJitter& j) {
                   check_budget(j.sample_budget);
                   check_range(j.brightness, "brightness");
                   check_range(j.contrast, "contrast");
                   check_range(j.saturation, "saturation");
                 },
                 [](const transform::PrecomputedOrbit&) {},
                 [](const transform::Product& p) {
                   check_budget(p.sample_budget);
                   if (p.factors.size() < 2) throw UsageError("a product needs at least two factors");
                 },
             },
             params_);
}

std::string TransformSpec::kind() const {
  static constexpr const char* kKinds[] = {"identity", "flip-horizontal", "rotate",            "crop",
                                           "cutout",   "color-jitter",    "precomputed-orbit", "product"};
  return kKinds[params_.index()];
}

std::string TransformSpec::label() const {
  if (!name_.empty()) return name_;
  if (const auto* p = get_if<transform::Product>()) {
    std::string out;
    for (const auto& f : p->factors) out += (out.empty() ? "" : "+") + f.label();
    return out;
  }
  return kind();
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"base", "flip", "rotate", "crop", "cutout", "colorjitter", "3dview"};
  return names;
}

TransformSpec preset(const std::string& name, const fs::path& orbit_manifest) {
  if (name == "base") return {transform::Identity{}, name};
  if (name == "flip") return {transform::FlipHorizontal{}, name};
  if (name == "rotate") return {transform::Rotate{}, name};
  if (name == "crop") return {transform::Crop{}, name};
  if (name == "cutout") return {transform::Cutout{}, name};
  if (name == "colorjitter") return {transform::ColorJitter{}, name};
  if (name == "3dview") {
    if (orbit_manifest.empty()) throw UsageError("preset 3dview needs an orbit manifest");
    auto table = std::make_shared<const PrecomputedOrbits>(PrecomputedOrbits::load(orbit_manifest));
    return {transform::PrecomputedOrbit{orbit_manifest, std::move(table)}, name};
  }
  throw UsageError("unknown transform preset '" + name + "'");
}

TransformSpec spec_from_json(const json& doc) {
  if (doc.is_string()) return preset(doc.get<std::string>());
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    const std::string name = doc.value("name", std::string{});
    if (kind == "identity") return {transform::Identity{}, name};
    if (kind == "flip-horizontal") return {transform::FlipHorizontal{}, name};
    if (kind == "rotate") {
      transform::Rotate r;
      r.degrees = range_from(doc, "degrees", r.degrees);
      r.step_degrees = doc.value("step_degrees", r.step_degrees);
      return {r, name};
    }
    if (kind == "crop") {
      transform::Crop c;
      c.padding = doc.value("padding", c.padding);
      if (doc.contains("size")) {
        const auto& sz = doc.at("size");
        if (!sz.is_array() || sz.size() != 2) throw UsageError("crop size must be [H, W]");
        c.height = sz[0].get<std::size_t>();
        c.width = sz[1].get<std::size_t>();
      }
      c.sample_budget = doc.value("sample_budget", c.sample_budget);
      return {c, name};
    }
    if (kind == "cutout") {
      transform::Cutout c;
      c.fill = doc.value("fill", c.fill);
      c.scale = doc.value("scale", c.scale);
      c.ratio = doc.value("ratio", c.ratio);
      c.sample_budget = doc.value("sample_budget", c.sample_budget);
      return {c, name};
    }
    if (kind == "color-jitter") {
      transform::ColorJitter j;
      j.brightness = range_from(doc, "brightness", j.brightness);
      j.contrast = range_from(doc, "contrast", j.contrast);
      j.saturation = range_from(doc, "saturation", j.saturation);
      j.sample_budget = doc.value("sample_budget", j.sample_budget);
      return {j, name};
    }
    if (kind == "precomputed-orbit") {
      const fs::path manifest = doc.at("manifest").get<std::string>();
      auto table = std::make_shared<const PrecomputedOrbits>(PrecomputedOrbits::load(manifest));
      return {transform::PrecomputedOrbit{manifest, std::move(table)}, name};
    }
    if (kind == "product") {
      transform::Product p;
      for (const auto& f : doc.at("factors")) p.factors.push_back(spec_from_json(f));
      p.sample_budget = doc.value("sample_budget", p.sample_budget);
      return {std::move(p), name};
    }
    throw UsageError("unknown transform kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid transform spec: ") + e.what());
  }
}

json spec_to_json(const TransformSpec& spec) {
  json doc{{"kind", spec.kind()}};
  std::visit(overloaded{
                 [](const transform::Identity&) {},
                 [](const transform::FlipHorizontal&) {},
                 [&](const transform::Rotate& r) {
                   doc["degrees"] = {r.degrees.lo, r.degrees.hi};
                   doc["step_degrees"] = r.step_degrees;
                 },
                 [&](const transform::Crop& c) {
                   doc["padding"] = c.padding;
                   if (c.height != 0 || c.width != 0) doc["size"] = {c.height, c.width};
                   doc["sample_budget"] = c.sample_budget;
                 },
                 [&](const transform::Cutout& c) {
                   doc["fill"] = c.fill;
                   doc["scale"] = c.scale;
                   doc["ratio"] = c.ratio;
                   doc["sample_budget"] = c.sample_budget;
                 },
                 [&](const transform::ColorJitter& j) {
                   doc["brightness"] = {j.brightness.lo, j.brightness.hi};
                   doc["contrast"] = {j.contrast.lo, j.contrast.hi};
                   doc["saturation"] = {j.saturation.lo, j.saturation.hi};
                   doc["sample_budget"] = j.sample_budget;
                 },
                 [&](const transform::PrecomputedOrbit& p) { doc["manifest"] = p.manifest.string(); },
                 [&](const transform::Product& p) {
                   doc["factors"] = json::array();
                   for (const auto& f : p.factors) doc["factors"].push_back(spec_to_json(f));
                   doc["sample_budget"] = p.sample_budget;
                 },
             },
             spec.params());
  return doc;
}

TransformSpec parse_transform(const std::string& text) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), text) != names.end()) return preset(text);
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return spec_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw UsageError(std::string("invalid transform JSON: ") + e.what());
    }
  }
  std::ifstream in(text);
  if (!in) throw UsageError("'" + text + "' is neither a preset, inline JSON, nor a readable file");
  try {
    return spec_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw UsageError(text + ": invalid transform JSON: " + e.what());
  }
}

TransformSpec compose(std::vector<TransformSpec> specs) {
  if (specs.size() < 2) throw UsageError("compose needs at least two specs");
  std::size_t h = 0, w = 0;
  for (const auto& s : specs) {
    if (const auto* c = s.get_if<transform::Crop>()) {
      if ((h != 0 && c->height != 0 && c->height != h) || (w != 0 && c->width != 0 && c->width != w)) {
        throw UsageError("incompatible shapes in compose: crop sizes differ");
      }
      if (c->height != 0) h = c->height;
      if (c->width != 0) w = c->width;
    }
  }
  transform::Product p;
  for (auto& s : specs) {
    // Flatten nested products; the direct product is associative.
    if (const auto* inner = s.get_if<transform::Product>()) {
      p.factors.insert(p.factors.end(), inner->factors.begin(), inner->factors.end());
    } else {
      p.factors.push_back(std::move(s));
    }
  }
  return TransformSpec(std::move(p));
}

Orbit materialize_orbit(const DataPoint& x, const TransformSpec& spec, std::uint64_t seed,
                        std::size_t point_id) {
  Orbit orbit{members_of(x, spec, seed, point_id), point_id};
  for (const auto& m : orbit.members) {
    if (m.shape() != x.shape()) {
      throw DataError("shape mismatch: orbit member " + m.shape().to_string() + " vs point " +
                      x.shape().to_string() + " (record " + std::to_string(point_id) + ")");
    }
  }
  return orbit;
}

DataPoint flip_horizontal(const DataPoint& x) {
  const auto& s = x.shape();
  std::vector<float> out(s.elements());
  for (std::size_t r = 0; r < s.height; ++r)
    for (std::size_t c = 0; c < s.width; ++c)
      for (std::size_t ch = 0; ch < s.channels; ++ch)
        out[(r * s.width + c) * s.channels + ch] = x.at(r, s.width - 1 - c, ch);
  return DataPoint(s, std::move(out));
}

DataPoint rotate(const DataPoint& x, double degrees) {
  const auto& s = x.shape();
  const double theta = degrees * M_PI / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cy = (static_cast<double>(s.height) - 1.0) / 2.0;
  const double cx = (static_cast<double>(s.width) - 1.0) / 2.0;
  const auto H = static_cast<long>(s.height), W = static_cast<long>(s.width);
  auto read = [&](long r, long c, std::size_t ch) -> double {
    if (r < 0 || c < 0 || r >= H || c >= W) return 0.0;
    return x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c), ch);
  };
  std::vector<float> out(s.elements());
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t c = 0; c < s.width; ++c) {
      const double dy = static_cast<double>(r) - cy, dx = static_cast<double>(c) - cx;
      const double sx = cs * dx + sn * dy + cx;
      const double sy = -sn * dx + cs * dy + cy;
      const double fx0 = std::floor(sx), fy0 = std::floor(sy);
      const double fx = sx - fx0, fy = sy - fy0;
      const auto x0 = static_cast<long>(fx0), y0 = static_cast<long>(fy0);
      for (std::size_t ch = 0; ch < s.channels; ++ch) {
        const double v = (1 - fy) * ((1 - fx) * read(y0, x0, ch) + fx * read(y0, x0 + 1, ch)) +
                         fy * ((1 - fx) * read(y0 + 1, x0, ch) + fx * read(y0 + 1, x0 + 1, ch));
        out[(r * s.width + c) * s.channels + ch] = clamp01(v);
      }
    }
  }
  return DataPoint(s, std::move(out));
}

DataPoint pad_crop(const DataPoint& x, std::size_t padding, std::size_t top, std::size_t left) {
  const auto& s = x.shape();
  if (top > 2 * padding || left > 2 * padding) throw UsageError("crop offset outside padded image");
  std::vector<float> out(s.elements());
  for (std::size_t r = 0; r < s.height; ++r) {
    const auto pr = static_cast<long>(r + top) - static_cast<long>(padding);
    const auto sr = static_cast<std::size_t>(std::clamp<long>(pr, 0, static_cast<long>(s.height) - 1));
    for (std::size_t c = 0; c < s.width; ++c) {
      const auto pc = static_cast<long>(c + left) - static_cast<long>(padding);
      const auto sc = static_cast<std::size_t>(std::clamp<long>(pc, 0, static_cast<long>(s.width) - 1));
      for (std::size_t ch = 0; ch < s.channels; ++ch) out[(r * s.width + c) * s.channels + ch] = x.at(sr, sc, ch);
    }
  }
  return DataPoint(s, std::move(out));
}

DataPoint cutout(const DataPoint& x, std::size_t top, std::size_t left, std::size_t height,
                 std::size_t width, float fill) {
  const auto& s = x.shape();
  if (top + height > s.height || left + width > s.width) throw UsageError("cutout rectangle outside image");
  std::vector<float> out(x.values().begin(), x.values().end());
  for (std::size_t r = top; r < top + height; ++r)
    for (std::size_t c = left; c < left + width; ++c)
      for (std::size_t ch = 0; ch < s.channels; ++ch) out[(r * s.width + c) * s.channels + ch] = fill;
  return DataPoint(s, std::move(out));
}

DataPoint color_jitter(const DataPoint& x, double brightness, double contrast, double saturation) {
  const auto& s = x.shape();
  const std::size_t pixels = s.height * s.width;
  const std::size_t C = s.channels;
  std::vector<float> v(x.values().begin(), x.values().end());
  for (float& e : v) e = clamp01(e * brightness);

  double mean = 0.0;
  for (std::size_t p = 0; p < pixels; ++p) mean += luminance(&v[p * C], C);
  mean /= static_cast<double>(pixels);
  for (float& e : v) e = clamp01(mean + contrast * (e - mean));

  for (std::size_t p = 0; p < pixels; ++p) {
    const double gray = luminance(&v[p * C], C);
    for (std::size_t ch = 0; ch < C; ++ch) v[p * C + ch] = clamp01(gray + saturation * (v[p * C + ch] - gray));
  }
  return DataPoint(s, std::move(v));
}

}  // namespace scn
