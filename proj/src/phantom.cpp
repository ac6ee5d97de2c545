/*
 * Copyright 2026 The lungprep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lungprep/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "lungprep/error.hpp"
#include "lungprep/evaluate.hpp"
#include "lungprep/lvol.hpp"
#include "lungprep/parallel.hpp"
#include "lungprep/rng.hpp"

namespace lungprep {
namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 half_extent(const Dims& dims, const Spacing& spacing) {
  return {0.5 * static_cast<double>(dims.depth - 1) * spacing.dz,
          0.5 * static_cast<double>(dims.height - 1) * spacing.dy,
          0.5 * static_cast<double>(dims.width - 1) * spacing.dx};
}

bool positive_vec(const Vec3& v) { return v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0; }

// Samples the lung surface on a latitude/longitude grid; every sample must
// fall strictly inside the body.
bool ellipsoid_inside(const Ellipsoid& inner, const Ellipsoid& outer) {
  constexpr int kLat = 24, kLon = 48;
  for (int i = 0; i <= kLat; ++i) {
    const double theta = kPi * i / kLat;
    for (int j = 0; j < kLon; ++j) {
      const double phi = 2.0 * kPi * j / kLon;
      const Vec3 p{inner.center_mm[0] + inner.semi_axes_mm[0] * std::cos(theta),
                   inner.center_mm[1] + inner.semi_axes_mm[1] * std::sin(theta) * std::sin(phi),
                   inner.center_mm[2] + inner.semi_axes_mm[2] * std::sin(theta) * std::cos(phi)};
      if (outer.level(p) >= 1.0) return false;
    }
  }
  return true;
}

// Sufficient condition: the sphere's normalized reach stays below 1.
bool sphere_inside(const Nodule& n, const Ellipsoid& e) {
  const double q = std::sqrt(e.level(n.center_mm));
  const double min_axis = std::min({e.semi_axes_mm[0], e.semi_axes_mm[1], e.semi_axes_mm[2]});
  return q + n.radius_mm / min_axis < 1.0;
}

Vec3 voxel_position(std::size_t z, std::size_t y, std::size_t x, const Spacing& s) {
  return {static_cast<double>(z) * s.dz, static_cast<double>(y) * s.dy, static_cast<double>(x) * s.dx};
}

double squared_distance(const Vec3& a, const Vec3& b) {
  return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]);
}

PhantomFeatures measure_features(const HuVolume& volume, const Mask& lungs) {
  const Dims d = volume.dims;
  std::size_t count = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < volume.voxels.size(); ++i) {
    if (!lungs.voxels[i]) continue;
    ++count;
    sum += volume.voxels[i];
  }
  double max_blob = kMinHu;
  for (std::size_t z = 1; z + 1 < d.depth; ++z) {
    for (std::size_t y = 1; y + 1 < d.height; ++y) {
      for (std::size_t x = 1; x + 1 < d.width; ++x) {
        if (!lungs.at(z, y, x)) continue;
        double s = 0.0;
        bool interior = true;
        for (int dz = -1; dz <= 1 && interior; ++dz)
          for (int dy = -1; dy <= 1 && interior; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              if (!lungs.at(z + dz, y + dy, x + dx)) {
                interior = false;
                break;
              }
              s += volume.at(z + dz, y + dy, x + dx);
            }
        if (interior) max_blob = std::max(max_blob, s / 27.0);
      }
    }
  }
  const double fraction = static_cast<double>(count) / static_cast<double>(volume.voxels.size());
  return {fraction, count > 0 ? sum / static_cast<double>(count) : 0.0, max_blob};
}

}  // namespace

double Ellipsoid::level(const Vec3& p) const {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double t = (p[i] - center_mm[i]) / semi_axes_mm[i];
    s += t * t;
  }
  return s;
}

PhantomSpec PhantomSpec::thorax(Dims dims, Spacing spacing) {
  PhantomSpec spec;
  spec.dims = dims;
  spec.spacing = spacing;
  const Vec3 h = half_extent(dims, spacing);
  const Vec3 c = h;
  // Body runs past the top and bottom of the field of view like a trunk.
  spec.body = {c, {1.35 * h[0], 0.84 * h[1], 0.97 * h[2]}};
  const Vec3 lung_axes{0.63 * h[0], 0.55 * h[1], 0.35 * h[2]};
  spec.lungs[0] = {{c[0], c[1], c[2] - 0.44 * h[2]}, lung_axes};
  spec.lungs[1] = {{c[0], c[1], c[2] + 0.44 * h[2]}, lung_axes};
  return spec;
}

void validate_spec(const PhantomSpec& spec) {
  if (spec.dims.count() == 0) throw Error(ErrorCode::InvalidSpec, "phantom dims must be non-zero");
  if (spec.dims.depth < 2) throw Error(ErrorCode::InvalidSpec, "phantom needs at least two slices");
  if (!(spec.spacing.dz > 0.0 && spec.spacing.dy > 0.0 && spec.spacing.dx > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "spacing must be positive");
  }
  if (!(spec.noise_sigma_hu >= 0.0)) throw Error(ErrorCode::InvalidSpec, "noise sigma must be >= 0");
  if (!positive_vec(spec.body.semi_axes_mm)) throw Error(ErrorCode::InvalidSpec, "body axes must be positive");
  for (const auto& lung : spec.lungs) {
    if (!positive_vec(lung.semi_axes_mm)) throw Error(ErrorCode::InvalidSpec, "lung axes must be positive");
    if (!ellipsoid_inside(lung, spec.body)) throw Error(ErrorCode::InvalidSpec, "lung extends outside the body");
  }
  for (const auto& n : spec.nodules) {
    if (!(n.radius_mm > 0.0)) throw Error(ErrorCode::InvalidSpec, "nodule radius must be positive");
    if (n.hu < kMinHu || n.hu > kMaxHu) throw Error(ErrorCode::InvalidSpec, "nodule HU outside the CT range");
    if (!sphere_inside(n, spec.lungs[0]) && !sphere_inside(n, spec.lungs[1])) {
      throw Error(ErrorCode::InvalidSpec, "nodule is not strictly inside a lung");
    }
  }
}

Mask lung_mask_on_grid(const PhantomSpec& spec, const Dims& dims, const Spacing& spacing) {
  Mask m(dims, spacing);
  std::size_t i = 0;
  for (std::size_t z = 0; z < dims.depth; ++z) {
    for (std::size_t y = 0; y < dims.height; ++y) {
      for (std::size_t x = 0; x < dims.width; ++x, ++i) {
        const Vec3 p = voxel_position(z, y, x, spacing);
        m.voxels[i] = spec.lungs[0].level(p) <= 1.0 || spec.lungs[1].level(p) <= 1.0;
      }
    }
  }
  return m;
}

RenderedPhantom render_phantom(const PhantomSpec& spec) {
  validate_spec(spec);
  RenderedPhantom out;
  out.volume = HuVolume(spec.dims, spec.spacing);
  out.truth.lung_mask = Mask(spec.dims, spec.spacing);
  Rng rng(spec.seed);
  const bool noisy = spec.noise_sigma_hu > 0.0;
  std::size_t i = 0;
  for (std::size_t z = 0; z < spec.dims.depth; ++z) {
    for (std::size_t y = 0; y < spec.dims.height; ++y) {
      for (std::size_t x = 0; x < spec.dims.width; ++x, ++i) {
        const Vec3 p = voxel_position(z, y, x, spec.spacing);
        double hu = kAirHu;
        if (spec.body.level(p) <= 1.0) hu = kBodyHu;
        const bool in_lung = spec.lungs[0].level(p) <= 1.0 || spec.lungs[1].level(p) <= 1.0;
        if (in_lung) {
          hu = kLungHu;
          for (const auto& n : spec.nodules) {
            if (squared_distance(p, n.center_mm) <= n.radius_mm * n.radius_mm) hu = n.hu;
          }
        }
        if (noisy) hu += spec.noise_sigma_hu * rng.normal();
        out.volume.voxels[i] = to_hu(hu);
        out.truth.lung_mask.voxels[i] = in_lung;
      }
    }
  }
  out.truth.label = spec.nodules.empty() ? 0 : 1;
  out.truth.lung_bbox = bounding_box(out.truth.lung_mask);
  out.truth.features = measure_features(out.volume, out.truth.lung_mask);
  return out;
}

std::vector<DicomSlice> volume_to_slices(const HuVolume& volume) {
  const Dims d = volume.dims;
  const std::size_t plane = d.height * d.width;
  std::vector<DicomSlice> slices(d.depth);
  for (std::size_t z = 0; z < d.depth; ++z) {
    DicomSlice& s = slices[z];
    s.rows = static_cast<std::uint16_t>(d.height);
    s.cols = static_cast<std::uint16_t>(d.width);
    s.bits_allocated = 16;
    s.pixel_representation = 0;
    s.rescale_slope = 1.0;
    s.rescale_intercept = -1024.0;
    s.row_spacing_mm = volume.spacing.dy;
    s.col_spacing_mm = volume.spacing.dx;
    s.slice_thickness_mm = volume.spacing.dz;
    s.position_z_mm = static_cast<double>(z) * volume.spacing.dz;
    s.raw_pixels.resize(plane);
    for (std::size_t i = 0; i < plane; ++i) s.raw_pixels[i] = volume.voxels[z * plane + i] + 1024;
  }
  return slices;
}

PhantomTruth generate_phantom(const PhantomSpec& spec, const std::filesystem::path& dir) {
  RenderedPhantom rendered = render_phantom(spec);
  std::filesystem::create_directories(dir);
  const auto slices = volume_to_slices(rendered.volume);
  for (std::size_t z = 0; z < slices.size(); ++z) {
    char name[32];
    std::snprintf(name, sizeof name, "slice_%04zu.dcm", z);
    write_file_bytes(dir / name, encode_dicom_slice(slices[z]));
  }
  return std::move(rendered.truth);
}

std::vector<CohortCase> plan_cohort(const CohortOptions& options) {
  if (!(options.positive_frac >= 0.0 && options.positive_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidSpec, "positive fraction must lie in [0, 1]");
  }
  const std::size_t n = options.cases;
  const auto positives = static_cast<std::size_t>(std::round(static_cast<double>(n) * options.positive_frac));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng assign(options.seed);
  assign.shuffle(std::span<std::size_t>(order));
  std::vector<int> labels(n, 0);
  for (std::size_t k = 0; k < positives; ++k) labels[order[k]] = 1;

  const Vec3 h = half_extent(options.dims, options.spacing);
  std::vector<CohortCase> cases(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "case_%04zu", i);
    CohortCase& c = cases[i];
    c.case_id = id;
    c.path = id;
    c.label = labels[i];

    Rng rng(derive_seed(options.seed, c.case_id));
    PhantomSpec spec = PhantomSpec::thorax(options.dims, options.spacing);
    spec.noise_sigma_hu = options.noise_sigma_hu;
    spec.seed = rng.next();
    for (auto& lung : spec.lungs) {
      for (int a = 0; a < 3; ++a) {
        lung.semi_axes_mm[a] *= rng.uniform(0.9, 1.0);
        lung.center_mm[a] += rng.uniform(-0.02, 0.02) * h[a];
      }
    }
    if (c.label == 1) {
      const std::size_t count = 1 + rng.below(2);
      for (std::size_t k = 0; k < count; ++k) {
        const Ellipsoid& lung = spec.lungs[rng.below(2)];
        // Uniform direction, normalized radius up to 0.55 of the lung.
        const double u = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const double r = 0.55 * std::cbrt(rng.uniform());
        const double s = std::sqrt(1.0 - u * u);
        Nodule nod;
        nod.center_mm = {lung.center_mm[0] + r * u * lung.semi_axes_mm[0],
                         lung.center_mm[1] + r * s * std::sin(phi) * lung.semi_axes_mm[1],
                         lung.center_mm[2] + r * s * std::cos(phi) * lung.semi_axes_mm[2]};
        const double min_axis = std::min({lung.semi_axes_mm[0], lung.semi_axes_mm[1], lung.semi_axes_mm[2]});
        nod.radius_mm = std::min(rng.uniform(4.0, 9.0), 0.4 * min_axis);
        nod.hu = static_cast<int>(rng.below(201)) - 100;
        spec.nodules.push_back(nod);
      }
    }
    c.spec = std::move(spec);
  }
  return cases;
}

std::vector<CohortCase> generate_cohort(const CohortOptions& options, const std::filesystem::path& out_dir) {
  std::vector<CohortCase> cases = plan_cohort(options);
  std::filesystem::create_directories(out_dir);
  parallel_for(cases.size(), options.threads, [&](std::size_t i) {
    cases[i].features = generate_phantom(cases[i].spec, out_dir / cases[i].path).features;
  });

  std::ofstream manifest(out_dir / "manifest.csv");
  std::ofstream features(out_dir / "features.csv");
  if (!manifest || !features) throw Error(ErrorCode::Io, "cannot write cohort tables in " + out_dir.string());
  manifest << "case_id,path,label\n";
  features << "case_id,label";
  for (const char* name : kFeatureNames) features << ',' << name;
  features << '\n';
  for (const auto& c : cases) {
    manifest << c.case_id << ',' << c.path << ',' << c.label << '\n';
    features << c.case_id << ',' << c.label;
    for (double f : c.features) features << ',' << format_real(f);
    features << '\n';
  }
  return cases;
}

}  // namespace lungprep
