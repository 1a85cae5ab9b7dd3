#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fac/fracops.hpp"
#include "fac/layer.hpp"

namespace fac {

struct Vec2 {
  double x = 0.0, y = 0.0;
};
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// symmetric 2x2: [xx, xy; xy, yy]
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;
  double trace() const { return xx + yy; }
};

// ------------------------------------------------------------------- loops

// Star-shaped loop r(theta) = R0 + sum_k (a_k cos k.theta + b_k sin k.theta);
// a circle when the mode lists are empty.
struct LoopShape {
  Vec2 center{0.0, 0.0};
  double R0 = 1.0;
  std::vector<double> ac, bs;

  bool is_circle() const { return ac.empty() && bs.empty(); }

  double radius(double theta) const {
    double r = R0;
    for (size_t k = 0; k < ac.size(); ++k) r += ac[k] * std::cos((k + 1) * theta);
    for (size_t k = 0; k < bs.size(); ++k) r += bs[k] * std::sin((k + 1) * theta);
    return r;
  }

  Vec2 point(double theta) const {
    double r = radius(theta);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
  }

  double min_radius(int samples = 2048) const {
    double m = radius(0.0);
    for (int k = 1; k < samples; ++k) m = std::min(m, radius(2.0 * pi * k / samples));
    return m;
  }
};

// Nested family, outermost first.
struct LoopConfig {
  std::vector<LoopShape> loops;
  double min_separation = 0.05;

  int count() const { return static_cast<int>(loops.size()); }

  // strict nesting, pairwise separation, containment in the central half-box
  void validate(double L, int samples = 1024) const;

  double clamp_radius() const {
    double m = 1e300;
    for (const auto& lp : loops) m = std::min(m, lp.min_radius());
    for (size_t i = 0; i + 1 < loops.size(); ++i) m = std::min(m, separation(i, i + 1));
    return 0.4 * m;
  }

  double separation(size_t i, size_t j, int samples = 512) const {
    double best = 1e300;
    for (int a = 0; a < samples; ++a) {
      Vec2 p = loops[i].point(2.0 * pi * a / samples);
      for (int b = 0; b < samples; ++b) {
        Vec2 q = loops[j].point(2.0 * pi * b / samples);
        best = std::min(best, norm(p - q));
      }
    }
    return best;
  }
};

// ------------------------------------------------------- signed distance

// Raw signed distance to one loop, positive inside.
inline double signed_distance_circle(Vec2 c, double R, Vec2 p) { return R - norm(p - c); }

// Polyline representation for non-circular loops.
struct Polyline {
  std::vector<Vec2> pts;
  bool closed = true;
};

inline Polyline sample_loop(const LoopShape& lp, int n = 2048) {
  Polyline pl;
  pl.pts.reserve(n);
  for (int k = 0; k < n; ++k) pl.pts.push_back(lp.point(2.0 * pi * k / n));
  return pl;
}

inline double dist_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double t = dot(p - a, ab) / std::max(dot(ab, ab), 1e-300);
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

inline bool point_in_polyline(const Polyline& pl, Vec2 p) {
  // even-odd crossing rule
  bool in = false;
  size_t n = pl.pts.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    Vec2 a = pl.pts[j], b = pl.pts[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      double xc = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < xc) in = !in;
    }
  }
  return in;
}

inline double signed_distance_polyline(const Polyline& pl, Vec2 p) {
  double d = 1e300;
  size_t n = pl.pts.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    d = std::min(d, dist_to_segment(p, pl.pts[j], pl.pts[i]));
  return point_in_polyline(pl, p) ? d : -d;
}

inline double signed_distance(const LoopShape& lp, Vec2 p, const Polyline* cached = nullptr) {
  if (lp.is_circle()) return signed_distance_circle(lp.center, lp.R0, p);
  if (cached) return signed_distance_polyline(*cached, p);
  Polyline pl = sample_loop(lp);
  return signed_distance_polyline(pl, p);
}

inline void LoopConfig::validate(double L, int samples) const {
  if (loops.empty()) throw std::invalid_argument("loop config: no loops");
  const double half = 0.25 * L;  // central L/2 x L/2 sub-box
  std::vector<Polyline> polys;
  for (const auto& lp : loops) polys.push_back(sample_loop(lp, samples));
  for (size_t i = 0; i < loops.size(); ++i) {
    if (loops[i].min_radius() <= 0.0)
      throw std::invalid_argument("loop config: loop " + std::to_string(i) + " degenerate");
    for (const auto& p : polys[i].pts)
      if (std::abs(p.x) > half || std::abs(p.y) > half)
        throw std::invalid_argument("loop config: loop " + std::to_string(i) +
                                    " leaves the central half-box");
  }
  for (size_t i = 0; i + 1 < loops.size(); ++i) {
    for (const auto& p : polys[i + 1].pts)
      if (!point_in_polyline(polys[i], p))
        throw std::invalid_argument("loop config: loop " + std::to_string(i + 1) +
                                    " not strictly inside loop " + std::to_string(i));
    if (separation(i, i + 1, 512) < min_separation)
      throw std::invalid_argument("loop config: loops " + std::to_string(i) + "," +
                                  std::to_string(i + 1) + " closer than the minimum separation");
  }
}

// ---------------------------------------------- clamped smooth extension

// Odd C^2 clamp: identity on [-rho, rho], saturating at +-2 rho, glued by a
// quintic smoothstep. G(s) = s eta + sign(s) 2 rho (1 - eta).
struct SmoothClamp {
  double rho = 0.1;

  double eta(double a) const {
    double t = std::clamp((a - rho) / rho, 0.0, 1.0);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  }
  double G(double s) const {
    double a = std::abs(s), sg = (s >= 0.0 ? 1.0 : -1.0);
    double e = eta(a);
    return s * e + sg * 2.0 * rho * (1.0 - e);
  }
  double G1(double s) const {
    double a = std::abs(s);
    double t = (a - rho) / rho;
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double e = eta(a);
    double ed = -30.0 * t * t * (1.0 - t) * (1.0 - t) / rho;
    return e + (a - 2.0 * rho) * ed;
  }
  double G2(double s) const {
    double a = std::abs(s), sg = (s >= 0.0 ? 1.0 : -1.0);
    double t = (a - rho) / rho;
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double ed = -30.0 * t * t * (1.0 - t) * (1.0 - t) / rho;
    double edd = -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (rho * rho);
    return sg * (2.0 * ed + (a - 2.0 * rho) * edd);
  }
};

// Clamped signed distance with derivatives, analytic for circles and by
// centered differences otherwise.
class DistanceEval {
 public:
  DistanceEval() = default;
  DistanceEval(const LoopShape& lp, double rho) : shape_(lp), clamp_{rho} {
    if (!lp.is_circle()) poly_ = sample_loop(lp, 4096);
  }

  double rho() const { return clamp_.rho; }
  double dtilde(Vec2 p) const { return signed_distance(shape_, p, poly_.pts.empty() ? nullptr : &poly_); }
  double d(Vec2 p) const { return clamp_.G(dtilde(p)); }

  // d(x + w) - d(x) without the R-scale cancellation a direct subtraction
  // suffers on large, nearly flat circles
  double d_diff(Vec2 x, Vec2 w) const {
    if (shape_.is_circle()) {
      Vec2 e = x - shape_.center;
      double r1 = norm(e), r2 = norm(e + w);
      double ddt = -(2.0 * dot(e, w) + dot(w, w)) / (r1 + r2);
      double s1 = shape_.R0 - r1;
      double s2 = s1 + ddt;
      if (std::abs(s1) <= clamp_.rho && std::abs(s2) <= clamp_.rho) return ddt;
      return clamp_.G(s2) - clamp_.G(s1);
    }
    return d({x.x + w.x, x.y + w.y}) - d(x);
  }

  Vec2 grad(Vec2 p) const {
    if (shape_.is_circle()) {
      Vec2 e = p - shape_.center;
      double r = norm(e);
      double g1 = clamp_.G1(shape_.R0 - r);
      if (r < 1e-14 || g1 == 0.0) return {0.0, 0.0};
      return (-g1 / r) * e;
    }
    const double hfd = 1e-5;
    return {(d({p.x + hfd, p.y}) - d({p.x - hfd, p.y})) / (2 * hfd),
            (d({p.x, p.y + hfd}) - d({p.x, p.y - hfd})) / (2 * hfd)};
  }

  Sym2 hess(Vec2 p) const {
    if (shape_.is_circle()) {
      Vec2 e = p - shape_.center;
      double r = norm(e);
      double s = shape_.R0 - r;
      double g1 = clamp_.G1(s), g2 = clamp_.G2(s);
      if (r < 1e-14 || (g1 == 0.0 && g2 == 0.0)) return {};
      double ex = e.x / r, ey = e.y / r;
      // grad dt = -e, hess dt = -(I - e x e)/r
      Sym2 H;
      H.xx = g2 * ex * ex - g1 * (1.0 - ex * ex) / r;
      H.xy = g2 * ex * ey + g1 * ex * ey / r;
      H.yy = g2 * ey * ey - g1 * (1.0 - ey * ey) / r;
      return H;
    }
    const double hfd = 5e-4;
    auto f = [&](double x, double y) { return d({x, y}); };
    Sym2 H;
    H.xx = (f(p.x + hfd, p.y) - 2 * f(p.x, p.y) + f(p.x - hfd, p.y)) / (hfd * hfd);
    H.yy = (f(p.x, p.y + hfd) - 2 * f(p.x, p.y) + f(p.x, p.y - hfd)) / (hfd * hfd);
    H.xy = (f(p.x + hfd, p.y + hfd) - f(p.x + hfd, p.y - hfd) - f(p.x - hfd, p.y + hfd) +
            f(p.x - hfd, p.y - hfd)) /
           (4 * hfd * hfd);
    return H;
  }

  const LoopShape& shape() const { return shape_; }

 private:
  LoopShape shape_;
  Polyline poly_;
  SmoothClamp clamp_;
};

// ------------------------------------------------------ initial condition

// u0 = sum_i phi(dtilde_i / eps) on the grid (raw distances; layers superpose).
inline PeriodicField build_initial_condition(const LoopConfig& cfg, double eps,
                                             const LayerProfile& phi, int M, double L) {
  PeriodicField u = PeriodicField::zeros(M, L);
  std::vector<Polyline> polys;
  for (const auto& lp : cfg.loops)
    polys.push_back(lp.is_circle() ? Polyline{} : sample_loop(lp, 4096));
  for (size_t q = 0; q < cfg.loops.size(); ++q) {
    const auto& lp = cfg.loops[q];
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) {
        Vec2 p{u.x(i), u.x(j)};
        double dt = lp.is_circle() ? signed_distance_circle(lp.center, lp.R0, p)
                                   : signed_distance_polyline(polys[q], p);
        u.at(i, j) += phi.eval(dt / eps);
      }
    }
  }
  return u;
}

// --------------------------------------------------------- front extraction

namespace detail {

struct Seg {
  int64_t e0, e1;  // canonical edge keys
  Vec2 p0, p1;
};

inline int64_t edge_key(int i, int j, int dir) {  // dir 0: horizontal, 1: vertical
  return (static_cast<int64_t>(i) << 22) ^ (static_cast<int64_t>(j) << 2) ^ dir;
}

}  // namespace detail

// All closed level-c contours by marching squares (non-periodic sweep; open
// chains touching the boundary are discarded).  Output is CCW-normalized.
inline std::vector<Polyline> marching_squares(const PeriodicField& F, double c) {
  using detail::Seg;
  const int M = F.M;
  const double h = F.h();
  std::vector<Seg> segs;

  auto cross = [&](double va, double vb) { return (va - c) / (va - vb); };

  for (int i = 0; i < M - 1; ++i) {
    for (int j = 0; j < M - 1; ++j) {
      double v00 = F.at(i, j), v10 = F.at(i + 1, j);
      double v01 = F.at(i, j + 1), v11 = F.at(i + 1, j + 1);
      int idx = (v00 > c) | ((v10 > c) << 1) | ((v11 > c) << 2) | ((v01 > c) << 3);
      if (idx == 0 || idx == 15) continue;
      double x0 = F.x(i), y0 = F.x(j);
      // edge id and crossing point per local edge: 0 bottom, 1 right, 2 top, 3 left
      auto edge = [&](int e) -> std::pair<int64_t, Vec2> {
        switch (e) {
          case 0: return {detail::edge_key(i, j, 0), {x0 + h * cross(v00, v10), y0}};
          case 1: return {detail::edge_key(i + 1, j, 1), {x0 + h, y0 + h * cross(v10, v11)}};
          case 2: return {detail::edge_key(i, j + 1, 0), {x0 + h * cross(v01, v11), y0 + h}};
          default: return {detail::edge_key(i, j, 1), {x0, y0 + h * cross(v00, v01)}};
        }
      };
      auto add = [&](int ea, int eb) {
        auto [ka, pa] = edge(ea);
        auto [kb, pb] = edge(eb);
        segs.push_back({ka, kb, pa, pb});
      };
      switch (idx) {
        case 1: case 14: add(3, 0); break;
        case 2: case 13: add(0, 1); break;
        case 3: case 12: add(3, 1); break;
        case 4: case 11: add(1, 2); break;
        case 6: case 9: add(0, 2); break;
        case 7: case 8: add(3, 2); break;
        case 5: {
          double ctr = 0.25 * (v00 + v10 + v01 + v11);
          if (ctr > c) { add(3, 2); add(0, 1); } else { add(3, 0); add(1, 2); }
          break;
        }
        case 10: {
          double ctr = 0.25 * (v00 + v10 + v01 + v11);
          if (ctr > c) { add(3, 0); add(1, 2); } else { add(3, 2); add(0, 1); }
          break;
        }
      }
    }
  }

  // stitch segments into loops via shared edge keys
  std::map<int64_t, std::vector<int>> by_edge;
  for (size_t s = 0; s < segs.size(); ++s) {
    by_edge[segs[s].e0].push_back(static_cast<int>(s));
    by_edge[segs[s].e1].push_back(static_cast<int>(s));
  }
  std::vector<char> used(segs.size(), 0);
  std::vector<Polyline> out;
  for (size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    Polyline pl;
    int cur = static_cast<int>(s0);
    int64_t entry = segs[s0].e0;
    used[s0] = 1;
    pl.pts.push_back(segs[s0].p0);
    bool closedLoop = false;
    while (true) {
      int64_t exit = (entry == segs[cur].e0) ? segs[cur].e1 : segs[cur].e0;
      Vec2 pexit = (entry == segs[cur].e0) ? segs[cur].p1 : segs[cur].p0;
      pl.pts.push_back(pexit);
      if (exit == segs[s0].e0) {
        closedLoop = true;
        break;
      }
      int nxt = -1;
      for (int cand : by_edge[exit])
        if (!used[cand]) {
          nxt = cand;
          break;
        }
      if (nxt < 0) break;
      used[nxt] = 1;
      entry = exit;
      cur = nxt;
    }
    if (closedLoop && pl.pts.size() >= 4) {
      pl.pts.pop_back();  // drop duplicated closing point
      pl.closed = true;
      out.push_back(std::move(pl));
    }
  }
  return out;
}

inline double polygon_area(const Polyline& pl) {  // signed, CCW positive
  double a = 0.0;
  size_t n = pl.pts.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    a += pl.pts[j].x * pl.pts[i].y - pl.pts[i].x * pl.pts[j].y;
  return 0.5 * a;
}

inline double polygon_perimeter(const Polyline& pl) {
  double s = 0.0;
  size_t n = pl.pts.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) s += norm(pl.pts[i] - pl.pts[j]);
  return s;
}

// Per level i - 1/2 (i = 1..N): the largest closed contour, outermost first.
// A vanished front yields an empty polyline.
inline std::vector<Polyline> extract_fronts(const PeriodicField& F, int N) {
  std::vector<Polyline> out;
  for (int i = 1; i <= N; ++i) {
    auto all = marching_squares(F, i - 0.5);
    Polyline best;
    double best_area = 0.0;
    for (auto& pl : all) {
      double a = std::abs(polygon_area(pl));
      if (a > best_area) {
        best_area = a;
        best = std::move(pl);
      }
    }
    if (!best.pts.empty() && polygon_area(best) < 0.0)
      std::reverse(best.pts.begin(), best.pts.end());
    out.push_back(std::move(best));
  }
  return out;
}

struct FrontStats {
  double area = 0.0, perimeter = 0.0, r_eff = 0.0;
  double kappa_min = 0.0, kappa_max = 0.0, kappa_mean = 0.0;
  bool self_intersecting = false;
  bool empty = true;
};

inline FrontStats front_statistics(const Polyline& pl) {
  FrontStats st;
  if (pl.pts.size() < 3) return st;
  st.empty = false;
  st.area = std::abs(polygon_area(pl));
  st.perimeter = polygon_perimeter(pl);
  st.r_eff = std::sqrt(st.area / pi);
  // discrete curvature by circumradius of vertex triplets
  size_t n = pl.pts.size();
  double kmin = 1e300, kmax = -1e300, ksum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = pl.pts[(i + n - 1) % n], b = pl.pts[i], c = pl.pts[(i + 1) % n];
    double la = norm(b - a), lb = norm(c - b), lc = norm(c - a);
    double cr2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    double k = 2.0 * cr2 / std::max(la * lb * lc, 1e-300);
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
    ksum += k;
  }
  st.kappa_min = kmin;
  st.kappa_max = kmax;
  st.kappa_mean = ksum / n;
  // segment-pair crossing test on a decimated copy
  std::vector<Vec2> dec;
  size_t stride = std::max<size_t>(1, n / 384);
  for (size_t i = 0; i < n; i += stride) dec.push_back(pl.pts[i]);
  auto cross2 = [](Vec2 o, Vec2 a, Vec2 b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  size_t m = dec.size();
  for (size_t i = 0; i < m && !st.self_intersecting; ++i) {
    Vec2 a = dec[i], b = dec[(i + 1) % m];
    for (size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      Vec2 c = dec[j], d = dec[(j + 1) % m];
      if (cross2(a, b, c) * cross2(a, b, d) < 0 && cross2(c, d, a) * cross2(c, d, b) < 0) {
        st.self_intersecting = true;
        break;
      }
    }
  }
  return st;
}

// ----------------------------------------------------------- raster masks

// Even-odd scanline fill of a closed polyline on the field grid.
inline std::vector<uint8_t> rasterize_inside(const Polyline& pl, int M, double L) {
  std::vector<uint8_t> mask(static_cast<size_t>(M) * M, 0);
  if (pl.pts.size() < 3) return mask;
  const double h = L / M;
  size_t n = pl.pts.size();
  for (int j = 0; j < M; ++j) {
    double y = -0.5 * L + j * h;
    std::vector<double> xs;
    for (size_t a = 0, b = n - 1; a < n; b = a++) {
      Vec2 p = pl.pts[b], q = pl.pts[a];
      if ((q.y > y) != (p.y > y)) xs.push_back(q.x + (y - q.y) * (p.x - q.x) / (p.y - q.y));
    }
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      int i0 = static_cast<int>(std::ceil((xs[k] + 0.5 * L) / h));
      int i1 = static_cast<int>(std::floor((xs[k + 1] + 0.5 * L) / h));
      for (int i = std::max(i0, 0); i <= std::min(i1, M - 1); ++i)
        mask[static_cast<size_t>(i) * M + j] = 1;
    }
  }
  return mask;
}

inline void erode_mask(std::vector<uint8_t>& mask, int M, int iters) {
  std::vector<uint8_t> tmp(mask.size());
  for (int it = 0; it < iters; ++it) {
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) {
        size_t q = static_cast<size_t>(i) * M + j;
        uint8_t keep = mask[q];
        if (keep) {
          if (i == 0 || i == M - 1 || j == 0 || j == M - 1)
            keep = 0;
          else
            keep = mask[q - M] & mask[q + M] & mask[q - 1] & mask[q + 1];
        }
        tmp[q] = keep;
      }
    }
    mask.swap(tmp);
  }
}

// Plateau statistics between consecutive fronts: regions R_N (inside the
// innermost), R_i (between front i and i+1), R_0 (outside the outermost),
// each eroded by `margin` before measuring.
struct PlateauStats {
  int region = 0;  // expected level
  double mean = 0.0, dev_max = 0.0;
  size_t pixels = 0;
};

inline std::vector<PlateauStats> plateau_statistics(const PeriodicField& F,
                                                    const std::vector<Polyline>& fronts,
                                                    double margin) {
  const int M = F.M;
  const int it = std::max(1, static_cast<int>(std::ceil(margin / F.h())));
  const int N = static_cast<int>(fronts.size());
  std::vector<std::vector<uint8_t>> inside(N);
  for (int i = 0; i < N; ++i) inside[i] = rasterize_inside(fronts[i], M, F.L);

  std::vector<PlateauStats> out;
  for (int lev = N; lev >= 0; --lev) {
    std::vector<uint8_t> region(static_cast<size_t>(M) * M, 1);
    if (lev == N) {
      if (N > 0) region = inside[N - 1];
    } else if (lev == 0) {
      for (size_t q = 0; q < region.size(); ++q) region[q] = inside[0][q] ? 0 : 1;
    } else {
      region = inside[lev - 1];
      for (size_t q = 0; q < region.size(); ++q) region[q] = region[q] & (inside[lev][q] ? 0 : 1);
    }
    erode_mask(region, M, it);
    PlateauStats st;
    st.region = lev;
    double sum = 0.0, dev = 0.0;
    size_t cnt = 0;
    for (size_t q = 0; q < region.size(); ++q)
      if (region[q]) {
        sum += F.v[q];
        dev = std::max(dev, std::abs(F.v[q] - lev));
        ++cnt;
      }
    st.pixels = cnt;
    st.mean = cnt ? sum / cnt : 0.0;
    st.dev_max = dev;
    out.push_back(st);
  }
  return out;
}

}  // namespace fac
