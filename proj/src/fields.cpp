// SPDX-License-Identifier: Apache-2.0
#include "udfr/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace udfr {

double softplus(double x, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("softplus: beta must be > 0");
  const double u = beta * x;
  if (u > 30.0) return x + std::log1p(std::exp(-u)) / beta;
  return std::log1p(std::exp(u)) / beta;
}

double softplus_grad(double x, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("softplus_grad: beta must be > 0");
  const double u = beta * x;
  double s;
  if (u >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-u));
  } else {
    const double e = std::exp(u);
    s = e / (1.0 + e);
  }
  // sigmoid is positive for every finite input; keep it that way in floats.
  return std::max(s, std::numeric_limits<double>::denorm_min());
}

Vec3 UdfField::gradient(const Vec3& p) const {
  const double h = 1e-4;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 lo = p, hi = p;
    lo[a] -= h;
    hi[a] += h;
    g[a] = (eval(hi) - eval(lo)) / (2.0 * h);
  }
  return g;
}

namespace {

// Deterministic tangent basis for a unit normal.
void tangent_basis(const Vec3& n, Vec3& u, Vec3& v) {
  const Vec3 helper = std::abs(n.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  u = normalized(cross(helper, n));
  v = cross(n, u);
}

}  // namespace

// ---------------------------------------------------------------------------
// SphereShell

SphereShell::SphereShell(const Vec3& center, double radius)
    : center_(center), radius_(radius) {
  if (radius <= 0.0)
    throw std::invalid_argument("SphereShell: radius must be positive");
}

double SphereShell::eval(const Vec3& p) const {
  return std::abs(norm(p - center_) - radius_);
}

Vec3 SphereShell::gradient(const Vec3& p) const {
  const Vec3 q = p - center_;
  const double r = norm(q);
  if (r < 1e-12) return {0, 0, 0};  // center: degenerate
  const double sign = r >= radius_ ? 1.0 : -1.0;
  return q * (sign / r);
}

double SphereShell::surface_area() const {
  return 4.0 * M_PI * radius_ * radius_;
}

Vec3 SphereShell::sample_surface(Rng& rng) const {
  // uniform direction via normalized gaussian
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 d{gauss(rng), gauss(rng), gauss(rng)};
  while (norm(d) < 1e-12) d = {gauss(rng), gauss(rng), gauss(rng)};
  return center_ + normalized(d) * radius_;
}

// ---------------------------------------------------------------------------
// DiskOpen

DiskOpen::DiskOpen(const Vec3& center, const Vec3& normal, double radius)
    : center_(center), normal_(normalized(normal)), radius_(radius) {
  if (radius <= 0.0)
    throw std::invalid_argument("DiskOpen: radius must be positive");
  tangent_basis(normal_, u_, v_);
}

double DiskOpen::eval(const Vec3& p) const {
  const Vec3 q = p - center_;
  const double h = dot(q, normal_);
  const Vec3 in_plane = q - normal_ * h;
  const double rho = norm(in_plane);
  if (rho <= radius_) return std::abs(h);
  const double dr = rho - radius_;
  return std::sqrt(dr * dr + h * h);
}

Vec3 DiskOpen::gradient(const Vec3& p) const {
  const Vec3 q = p - center_;
  const double h = dot(q, normal_);
  const Vec3 in_plane = q - normal_ * h;
  const double rho = norm(in_plane);
  if (rho <= radius_) {
    if (std::abs(h) < 1e-12) return {0, 0, 0};  // on the disk: degenerate
    return normal_ * (h > 0 ? 1.0 : -1.0);
  }
  const Vec3 rim = center_ + in_plane * (radius_ / rho);
  const Vec3 away = p - rim;
  const double d = norm(away);
  if (d < 1e-12) return {0, 0, 0};
  return away / d;
}

double DiskOpen::surface_area() const { return M_PI * radius_ * radius_; }

Vec3 DiskOpen::sample_surface(Rng& rng) const {
  const double r = radius_ * std::sqrt(uniform01(rng));
  const double phi = 2.0 * M_PI * uniform01(rng);
  return center_ + u_ * (r * std::cos(phi)) + v_ * (r * std::sin(phi));
}

// ---------------------------------------------------------------------------
// RectPatch

RectPatch::RectPatch(const Vec3& center, const Vec3& normal, double hu,
                     double hv)
    : center_(center), normal_(normalized(normal)), hu_(hu), hv_(hv) {
  if (hu <= 0.0 || hv <= 0.0)
    throw std::invalid_argument("RectPatch: half extents must be positive");
  tangent_basis(normal_, u_, v_);
}

double RectPatch::eval(const Vec3& p) const {
  const Vec3 q = p - center_;
  const double du = dot(q, u_);
  const double dv = dot(q, v_);
  const double h = dot(q, normal_);
  const double cu = std::clamp(du, -hu_, hu_);
  const double cv = std::clamp(dv, -hv_, hv_);
  const double a = du - cu, b = dv - cv;
  return std::sqrt(a * a + b * b + h * h);
}

Vec3 RectPatch::gradient(const Vec3& p) const {
  const Vec3 q = p - center_;
  const double du = dot(q, u_);
  const double dv = dot(q, v_);
  const double h = dot(q, normal_);
  const double cu = std::clamp(du, -hu_, hu_);
  const double cv = std::clamp(dv, -hv_, hv_);
  const Vec3 nearest = center_ + u_ * cu + v_ * cv;
  const Vec3 away = p - nearest;
  const double d = norm(away);
  if (d < 1e-12) return {0, 0, 0};
  return away / d;
}

double RectPatch::surface_area() const { return 4.0 * hu_ * hv_; }

Vec3 RectPatch::sample_surface(Rng& rng) const {
  const double a = (2.0 * uniform01(rng) - 1.0) * hu_;
  const double b = (2.0 * uniform01(rng) - 1.0) * hv_;
  return center_ + u_ * a + v_ * b;
}

// ---------------------------------------------------------------------------
// HemisphereShell

HemisphereShell::HemisphereShell(const Vec3& center, double radius,
                                 const Vec3& axis)
    : center_(center), axis_(normalized(axis)), radius_(radius) {
  if (radius <= 0.0)
    throw std::invalid_argument("HemisphereShell: radius must be positive");
  tangent_basis(axis_, u_, v_);
}

double HemisphereShell::eval(const Vec3& p) const {
  const Vec3 q = p - center_;
  const double h = dot(q, axis_);
  if (h >= 0.0) {
    // nearest point on the full sphere lies inside the hemisphere
    return std::abs(norm(q) - radius_);
  }
  // nearest point is on the rim circle
  const Vec3 q_perp = q - axis_ * h;
  const double rho = norm(q_perp);
  if (rho < 1e-12) return std::sqrt(radius_ * radius_ + h * h);
  const double dr = rho - radius_;
  return std::sqrt(dr * dr + h * h);
}

Vec3 HemisphereShell::gradient(const Vec3& p) const {
  const Vec3 q = p - center_;
  const double h = dot(q, axis_);
  if (h >= 0.0) {
    const double r = norm(q);
    if (r < 1e-12) return {0, 0, 0};
    const double sign = r >= radius_ ? 1.0 : -1.0;
    return q * (sign / r);
  }
  const Vec3 q_perp = q - axis_ * h;
  const double rho = norm(q_perp);
  if (rho < 1e-12) {
    // medial axis below the rim: radial direction undefined, keep the axial part
    const double d = std::sqrt(radius_ * radius_ + h * h);
    return axis_ * (h / d);
  }
  const Vec3 rim = center_ + q_perp * (radius_ / rho);
  const Vec3 away = p - rim;
  const double d = norm(away);
  if (d < 1e-12) return {0, 0, 0};
  return away / d;
}

double HemisphereShell::surface_area() const {
  return 2.0 * M_PI * radius_ * radius_;
}

Vec3 HemisphereShell::sample_surface(Rng& rng) const {
  // uniform over the hemisphere cap: z = u in [0,1]
  const double z = uniform01(rng);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = 2.0 * M_PI * uniform01(rng);
  const Vec3 d = u_ * (rho * std::cos(phi)) + v_ * (rho * std::sin(phi)) +
                 axis_ * z;
  return center_ + d * radius_;
}

// ---------------------------------------------------------------------------
// UnionSurface

UnionSurface::UnionSurface(std::vector<std::shared_ptr<AnalyticSurface>> parts)
    : parts_(std::move(parts)) {
  if (parts_.empty())
    throw std::invalid_argument("UnionSurface: needs at least one part");
  total_area_ = 0.0;
  for (const auto& part : parts_) total_area_ += part->surface_area();
}

double UnionSurface::eval(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& part : parts_) best = std::min(best, part->eval(p));
  return best;
}

Vec3 UnionSurface::gradient(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  const AnalyticSurface* owner = nullptr;
  for (const auto& part : parts_) {
    const double d = part->eval(p);
    if (d < best) {
      best = d;
      owner = part.get();
    }
  }
  return owner->gradient(p);
}

double UnionSurface::surface_area() const { return total_area_; }

Vec3 UnionSurface::sample_surface(Rng& rng) const {
  double pick = uniform01(rng) * total_area_;
  for (const auto& part : parts_) {
    pick -= part->surface_area();
    if (pick <= 0.0) return part->sample_surface(rng);
  }
  return parts_.back()->sample_surface(rng);
}

// ---------------------------------------------------------------------------
// VoxelGrid

VoxelGrid::VoxelGrid(int nx_, int ny_, int nz_, const Aabb& bounds_,
                     double fill)
    : nx(nx_), ny(ny_), nz(nz_), bounds(bounds_) {
  if (nx < 2 || ny < 2 || nz < 2)
    throw std::invalid_argument("VoxelGrid: resolution must be >= 2 per axis");
  values.assign(node_count(), fill);
}

Vec3 VoxelGrid::node_position(int i, int j, int k) const {
  const Vec3 e = bounds.extent();
  return {bounds.min.x + e.x * i / (nx - 1), bounds.min.y + e.y * j / (ny - 1),
          bounds.min.z + e.z * k / (nz - 1)};
}

VoxelGrid::Stencil VoxelGrid::stencil(const Vec3& p) const {
  const Vec3 e = bounds.extent();
  const int n[3] = {nx, ny, nz};
  int cell[3];
  double frac[3], inv_h[3];
  bool clamped[3];
  const Vec3 q = bounds.clamp(p);
  for (int a = 0; a < 3; ++a) {
    clamped[a] = q[a] != p[a];
    const double scaled = (q[a] - bounds.min[a]) / e[a] * (n[a] - 1);
    int c = static_cast<int>(std::floor(scaled));
    c = std::clamp(c, 0, n[a] - 2);
    cell[a] = c;
    frac[a] = scaled - c;
    inv_h[a] = (n[a] - 1) / e[a];
  }

  Stencil st;
  for (int corner = 0; corner < 8; ++corner) {
    const int di = corner & 1, dj = (corner >> 1) & 1, dk = (corner >> 2) & 1;
    st.idx[corner] = index(cell[0] + di, cell[1] + dj, cell[2] + dk);
    const double wx = di ? frac[0] : 1.0 - frac[0];
    const double wy = dj ? frac[1] : 1.0 - frac[1];
    const double wz = dk ? frac[2] : 1.0 - frac[2];
    st.w[corner] = wx * wy * wz;
    // d(weight)/d(position); zero along axes clamped outside the bounds
    st.dw[corner] = {
        clamped[0] ? 0.0 : (di ? 1.0 : -1.0) * inv_h[0] * wy * wz,
        clamped[1] ? 0.0 : (dj ? 1.0 : -1.0) * inv_h[1] * wx * wz,
        clamped[2] ? 0.0 : (dk ? 1.0 : -1.0) * inv_h[2] * wx * wy};
  }
  return st;
}

double VoxelGrid::sample(const Vec3& p) const {
  const Stencil st = stencil(p);
  double v = 0.0;
  for (int c = 0; c < 8; ++c) v += st.w[c] * values[st.idx[c]];
  return v;
}

Vec3 VoxelGrid::sample_gradient(const Vec3& p) const {
  const Stencil st = stencil(p);
  Vec3 g;
  for (int c = 0; c < 8; ++c) g += st.dw[c] * values[st.idx[c]];
  return g;
}

// ---------------------------------------------------------------------------
// Grid file I/O

namespace {

void put_u16(std::ofstream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

std::uint16_t get_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

void put_f32(std::ofstream& out, float v) {
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(&v), 4);
}

float get_f32(std::istream& in) {
  float v;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void save_grid(const std::string& path, const VoxelGrid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_grid: cannot open " + path);
  out.write("UG", 2);
  put_u16(out, static_cast<std::uint16_t>(grid.nx));
  put_u16(out, static_cast<std::uint16_t>(grid.ny));
  put_u16(out, static_cast<std::uint16_t>(grid.nz));
  put_f32(out, static_cast<float>(grid.bounds.min.x));
  put_f32(out, static_cast<float>(grid.bounds.min.y));
  put_f32(out, static_cast<float>(grid.bounds.min.z));
  put_f32(out, static_cast<float>(grid.bounds.max.x));
  put_f32(out, static_cast<float>(grid.bounds.max.y));
  put_f32(out, static_cast<float>(grid.bounds.max.z));
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("save_grid: write failed for " + path);
}

VoxelGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_grid: cannot open " + path);
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'U' || magic[1] != 'G')
    throw std::runtime_error("load_grid: bad magic in " + path);
  const int nx = get_u16(in), ny = get_u16(in), nz = get_u16(in);
  Aabb bounds;
  bounds.min = {get_f32(in), get_f32(in), get_f32(in)};
  bounds.max = {get_f32(in), get_f32(in), get_f32(in)};
  if (!in || nx < 2 || ny < 2 || nz < 2)
    throw std::runtime_error("load_grid: bad header in " + path);
  VoxelGrid grid(nx, ny, nz, bounds);
  in.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(grid.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("load_grid: truncated data in " + path);
  return grid;
}

}  // namespace udfr
