#include "foam/analysis.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstdio>
#include <cmath>
#include <numeric>
#include <queue>

#include "foam/convolution.hpp"
#include "foam/energy.hpp"
#include "foam/errors.hpp"

namespace foam {

double AnalysisParams::resolve_tau(const Grid& g) const {
  if (tau_smooth > 0.0) return tau_smooth;
  double h = g.spacing[0];
  for (int a = 1; a < g.rank; ++a) h = std::min(h, g.spacing[a]);
  return 4.0 * h * h;
}

double AnalysisParams::resolve_guard(const Grid& g) const {
  if (junction_guard > 0.0) return junction_guard;
  return 6.0 * std::sqrt(resolve_tau(g));
}

namespace {

struct Vec2 {
  double x = 0, y = 0;
};

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

// ---- fits ------------------------------------------------------------

struct LineFit {
  Vec2 point, dir;
  double rms = 0.0;
  bool ok = false;
};

LineFit fit_line(const std::vector<std::array<double, 2>>& pts) {
  LineFit f;
  const size_t n = pts.size();
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (auto& p : pts) {
    mx += p[0];
    my += p[1];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (auto& p : pts) {
    double dx = p[0] - mx, dy = p[1] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  // principal eigenvector of the 2x2 covariance
  double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  double l1 = tr / 2 + std::sqrt(std::max(0.0, tr * tr / 4 - det));
  Vec2 dir;
  if (std::abs(sxy) > 1e-30) {
    dir = {l1 - syy, sxy};
  } else {
    dir = sxx >= syy ? Vec2{1, 0} : Vec2{0, 1};
  }
  double dn = norm(dir);
  if (dn == 0) return f;
  dir.x /= dn;
  dir.y /= dn;
  double ss = 0;
  for (auto& p : pts) {
    double dx = p[0] - mx, dy = p[1] - my;
    double d = dx * dir.y - dy * dir.x;
    ss += d * d;
  }
  f.point = {mx, my};
  f.dir = dir;
  f.rms = std::sqrt(ss / double(n));
  f.ok = true;
  return f;
}

struct CircleFit {
  Vec2 center;
  double radius = 0.0;
  double rms = 0.0;
  bool ok = false;
};

// Kasa algebraic fit: minimizes sum (|p|^2 - a x - b y - c)^2.
CircleFit fit_circle(const std::vector<std::array<double, 2>>& pts) {
  CircleFit f;
  const size_t n = pts.size();
  if (n < 3) return f;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  double sxz = 0, syz = 0, sz = 0;
  for (auto& p : pts) {
    double x = p[0], y = p[1], z = x * x + y * y;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
    sxz += x * z;
    syz += y * z;
    sz += z;
  }
  const double N = double(n);
  // normal equations for [a b c]
  double m[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, N}};
  double rhs[3] = {sxz, syz, sz};
  double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  double scale = std::max({std::abs(sxx), std::abs(syy), N});
  if (std::abs(det) < 1e-12 * scale * scale * scale) return f;
  auto solve = [&](int col) {
    double t[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t[i][j] = j == col ? rhs[i] : m[i][j];
    return (t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
            t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
            t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])) /
           det;
  };
  double a = solve(0), b = solve(1), c = solve(2);
  double r2 = c + a * a / 4 + b * b / 4;
  if (!(r2 > 0)) return f;
  f.center = {a / 2, b / 2};
  f.radius = std::sqrt(r2);
  double ss = 0;
  for (auto& p : pts) {
    double d = std::hypot(p[0] - f.center.x, p[1] - f.center.y) - f.radius;
    ss += d * d;
  }
  f.rms = std::sqrt(ss / N);
  f.ok = true;
  return f;
}

void classify_chain(Chain& ch) {
  auto lf = fit_line(ch.points);
  auto cf = fit_circle(ch.points);
  const bool prefer_line =
      !cf.ok || (lf.ok && lf.rms <= cf.rms) || cf.radius > 100.0 * ch.length;
  if (prefer_line && lf.ok) {
    ch.is_line = true;
    ch.line_point = {lf.point.x, lf.point.y};
    ch.line_dir = {lf.dir.x, lf.dir.y};
    ch.fit_residual = lf.rms;
  } else if (cf.ok) {
    ch.is_line = false;
    ch.circle_center = {cf.center.x, cf.center.y};
    ch.circle_radius = cf.radius;
    ch.fit_residual = cf.rms;
  }
}

// ---- 2D extraction ----------------------------------------------------

struct Crossing {
  std::array<double, 2> pos{0, 0};
  int a = 0, b = 0;                    // phase pair, a < b
  std::array<std::int32_t, 2> link{-1, -1};  // crossing ids
  std::int32_t junction = -1;
  void add_link(std::int32_t id) {
    if (link[0] < 0)
      link[0] = id;
    else if (link[1] < 0)
      link[1] = id;
  }
  int degree() const { return (link[0] >= 0) + (link[1] >= 0); }
};

struct UnionFind {
  std::vector<std::int32_t> parent;
  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t i) {
    while (parent[size_t(i)] != i) {
      parent[size_t(i)] = parent[size_t(parent[size_t(i)])];
      i = parent[size_t(i)];
    }
    return i;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[size_t(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

InterfaceSet extract_interfaces_2d(const LabelField& labels,
                                   const AnalysisParams& params) {
  labels.validate();
  if (labels.geom.rank != 2)
    throw ParamError("extract_interfaces_2d needs a 2D field");
  const Grid& g = labels.geom;
  const int n0 = g.dims[0], n1 = g.dims[1];
  const int np = labels.n_phases;

  GaussianKernel smooth(g, params.resolve_tau(g));
  MultiField phi = MultiField::zeros(g, np);
  {
    MultiField u = MultiField::zeros(g, np);
    for (int p = 0; p < np; ++p) {
      auto sp = u.phase(p);
      for (std::int64_t x = 0; x < g.cell_count(); ++x)
        sp[size_t(x)] = labels.labels[size_t(x)] == p ? 1.0 : 0.0;
    }
    convolve_phases(smooth, u, phi);
  }
  const std::int64_t n_cells = g.cell_count();
  auto phi_at = [&](int p, std::int64_t x) {
    return phi.data[size_t(p) * n_cells + x];
  };

  auto lab = [&](int r, int c) {
    return int(labels.labels[size_t(g.index(r, c))]);
  };
  auto center = [&](int r, int c) {
    return std::array<double, 2>{g.origin[0] + r * g.spacing[0],
                                 g.origin[1] + c * g.spacing[1]};
  };

  // Crossings on interior lattice edges (wrap edges skipped: foams are
  // confined away from the border by seeding).
  std::vector<Crossing> crossings;
  // edge id -> crossing id; horizontal edge (r,c)-(r,c+1), vertical (r,c)-(r+1,c)
  std::vector<std::int32_t> hcross(size_t(n0) * (n1 - 1), -1);
  std::vector<std::int32_t> vcross(size_t(n0 - 1) * n1, -1);
  auto hid = [&](int r, int c) { return size_t(r) * (n1 - 1) + c; };
  auto vid = [&](int r, int c) { return size_t(r) * n1 + c; };

  auto make_crossing = [&](int la, int lb, std::array<double, 2> p,
                           std::array<double, 2> q, std::int64_t ip,
                           std::int64_t iq) {
    int a = std::min(la, lb), b = std::max(la, lb);
    double dp = phi_at(a, ip) - phi_at(b, ip);
    double dq = phi_at(a, iq) - phi_at(b, iq);
    double t = 0.5;
    if (dp != dq) t = std::clamp(dp / (dp - dq), 0.0, 1.0);
    Crossing cr;
    cr.pos = {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
    cr.a = a;
    cr.b = b;
    crossings.push_back(cr);
    return std::int32_t(crossings.size() - 1);
  };

  for (int r = 0; r < n0; ++r)
    for (int c = 0; c + 1 < n1; ++c) {
      int la = lab(r, c), lb = lab(r, c + 1);
      if (la != lb)
        hcross[hid(r, c)] = make_crossing(la, lb, center(r, c), center(r, c + 1),
                                          g.index(r, c), g.index(r, c + 1));
    }
  for (int r = 0; r + 1 < n0; ++r)
    for (int c = 0; c < n1; ++c) {
      int la = lab(r, c), lb = lab(r + 1, c);
      if (la != lb)
        vcross[vid(r, c)] = make_crossing(la, lb, center(r, c), center(r + 1, c),
                                          g.index(r, c), g.index(r + 1, c));
    }

  // Dual blocks: connect same-pair crossings in two-label blocks; blocks
  // with three or more labels become junction candidates.
  struct JunctionBlock {
    int r, c;
    std::vector<std::int32_t> cross;
  };
  std::vector<JunctionBlock> jblocks;
  std::vector<std::int32_t> jblock_at(size_t(n0 - 1) * (n1 - 1), -1);

  for (int r = 0; r + 1 < n0; ++r)
    for (int c = 0; c + 1 < n1; ++c) {
      const int l00 = lab(r, c), l01 = lab(r, c + 1);
      const int l10 = lab(r + 1, c), l11 = lab(r + 1, c + 1);
      int distinct = 1;
      {
        int ls[4] = {l00, l01, l10, l11};
        std::sort(ls, ls + 4);
        distinct = int(std::unique(ls, ls + 4) - ls);
      }
      if (distinct == 1) continue;
      const std::int32_t top = hcross[hid(r, c)];
      const std::int32_t bottom = hcross[hid(r + 1, c)];
      const std::int32_t left = vcross[vid(r, c)];
      const std::int32_t right = vcross[vid(r, c + 1)];
      if (distinct == 2) {
        std::int32_t ids[4];
        int k = 0;
        for (std::int32_t id : {top, bottom, left, right})
          if (id >= 0) ids[k++] = id;
        if (k == 2) {
          crossings[size_t(ids[0])].add_link(ids[1]);
          crossings[size_t(ids[1])].add_link(ids[0]);
        } else if (k == 4) {
          // saddle: resolve by the smoothed sign at the block center
          int a = crossings[size_t(top)].a, b = crossings[size_t(top)].b;
          double dc = 0.0;
          for (auto idx : {g.index(r, c), g.index(r, c + 1), g.index(r + 1, c),
                           g.index(r + 1, c + 1)})
            dc += phi_at(a, idx) - phi_at(b, idx);
          // the diagonal pattern is either a at (00,11) or a at (01,10)
          const bool a_on_main = (l00 == a);
          std::int32_t p1, p2, q1, q2;
          if ((dc >= 0.0) == a_on_main) {
            // center joins the main diagonal phase: corners 01 and 10 are
            // isolated islands
            p1 = top, p2 = right, q1 = left, q2 = bottom;
          } else {
            p1 = top, p2 = left, q1 = right, q2 = bottom;
          }
          crossings[size_t(p1)].add_link(p2);
          crossings[size_t(p2)].add_link(p1);
          crossings[size_t(q1)].add_link(q2);
          crossings[size_t(q2)].add_link(q1);
        }
      } else {
        JunctionBlock jb;
        jb.r = r;
        jb.c = c;
        for (std::int32_t id : {top, bottom, left, right})
          if (id >= 0) jb.cross.push_back(id);
        jblock_at[size_t(r) * (n1 - 1) + c] = std::int32_t(jblocks.size());
        jblocks.push_back(std::move(jb));
      }
    }

  // Merge adjacent junction blocks (8-neighborhood on the block grid).
  UnionFind uf(jblocks.size());
  for (size_t j = 0; j < jblocks.size(); ++j) {
    const int r = jblocks[j].r, c = jblocks[j].c;
    for (int dr = -1; dr <= 1; ++dr)
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        int rr = r + dr, cc = c + dc;
        if (rr < 0 || cc < 0 || rr >= n0 - 1 || cc >= n1 - 1) continue;
        std::int32_t other = jblock_at[size_t(rr) * (n1 - 1) + cc];
        if (other >= 0) uf.unite(std::int32_t(j), other);
      }
  }

  InterfaceSet out;
  out.geom = g;
  std::vector<std::int32_t> root_to_junction(jblocks.size(), -1);
  for (size_t j = 0; j < jblocks.size(); ++j) {
    std::int32_t root = uf.find(std::int32_t(j));
    if (root_to_junction[size_t(root)] < 0) {
      root_to_junction[size_t(root)] = std::int32_t(out.junctions.size());
      out.junctions.push_back({});
    }
    std::int32_t jid = root_to_junction[size_t(root)];
    for (std::int32_t cid : jblocks[j].cross) {
      if (crossings[size_t(cid)].junction < 0)
        crossings[size_t(cid)].junction = jid;
    }
  }
  // Junction positions: mean of attached crossing points.
  {
    std::vector<double> sx(out.junctions.size(), 0.0),
        sy(out.junctions.size(), 0.0);
    std::vector<int> cnt(out.junctions.size(), 0);
    for (auto& cr : crossings)
      if (cr.junction >= 0) {
        sx[size_t(cr.junction)] += cr.pos[0];
        sy[size_t(cr.junction)] += cr.pos[1];
        ++cnt[size_t(cr.junction)];
      }
    for (size_t j = 0; j < out.junctions.size(); ++j)
      if (cnt[j] > 0)
        out.junctions[j].position = {sx[j] / cnt[j], sy[j] / cnt[j]};
  }

  // Assemble chains.
  std::vector<bool> visited(crossings.size(), false);
  auto walk = [&](std::int32_t start, std::int32_t from) {
    std::vector<std::int32_t> path{start};
    std::int32_t prev = from, cur = start;
    for (;;) {
      visited[size_t(cur)] = true;
      const auto& cr = crossings[size_t(cur)];
      std::int32_t next = -1;
      for (std::int32_t l : cr.link)
        if (l >= 0 && l != prev) next = l;
      if (next < 0 || next == start) return std::make_pair(path, next == start);
      prev = cur;
      cur = next;
      path.push_back(cur);
    }
  };

  auto emit_chain = [&](const std::vector<std::int32_t>& path, bool closed) {
    Chain ch;
    const auto& first = crossings[size_t(path.front())];
    ch.phase_a = first.a;
    ch.phase_b = first.b;
    ch.closed = closed;
    for (auto id : path) ch.points.push_back(crossings[size_t(id)].pos);
    const std::int32_t chain_id = std::int32_t(out.chains.size());
    if (!closed) {
      auto attach = [&](std::int32_t cid, bool at_end) {
        std::int32_t j = crossings[size_t(cid)].junction;
        if (j < 0) return -1;
        auto& jn = out.junctions[size_t(j)];
        jn.chain_ends.push_back(chain_id * 2 + (at_end ? 1 : 0));
        for (int ph : {crossings[size_t(cid)].a, crossings[size_t(cid)].b})
          if (std::find(jn.phases.begin(), jn.phases.end(), ph) ==
              jn.phases.end())
            jn.phases.push_back(ph);
        return j;
      };
      ch.junction_start = attach(path.front(), false);
      ch.junction_end = attach(path.back(), true);
      if (ch.junction_start >= 0)
        ch.points.insert(ch.points.begin(),
                         out.junctions[size_t(ch.junction_start)].position);
      if (ch.junction_end >= 0)
        ch.points.push_back(out.junctions[size_t(ch.junction_end)].position);
    } else {
      ch.points.push_back(ch.points.front());
    }
    double len = 0.0;
    for (size_t i = 1; i < ch.points.size(); ++i)
      len += std::hypot(ch.points[i][0] - ch.points[i - 1][0],
                        ch.points[i][1] - ch.points[i - 1][1]);
    ch.length = len;
    if (ch.closed) ch.points.pop_back();
    classify_chain(ch);
    out.chains.push_back(std::move(ch));
  };

  // open chains first (ends at junctions or the border)
  for (std::int32_t i = 0; i < std::int32_t(crossings.size()); ++i) {
    if (visited[size_t(i)] || crossings[size_t(i)].degree() == 2) continue;
    auto [path, closed] = walk(i, -1);
    emit_chain(path, false);
  }
  // remaining are loops
  for (std::int32_t i = 0; i < std::int32_t(crossings.size()); ++i) {
    if (visited[size_t(i)]) continue;
    auto [path, closed] = walk(i, -1);
    emit_chain(path, true);
  }

  for (auto& ch : out.chains) out.total_length += ch.length;
  return out;
}

namespace {

struct CurveFit {
  bool is_line = true;
  Vec2 center;
  double radius = 0.0;
  Vec2 point, dir{1, 0};
  bool ok = false;
};

CurveFit fit_points(const std::vector<std::array<double, 2>>& pts,
                    double length_scale) {
  CurveFit f;
  auto lf = fit_line(pts);
  auto cf = fit_circle(pts);
  const bool prefer_line =
      !cf.ok || (lf.ok && lf.rms <= cf.rms) || cf.radius > 100.0 * length_scale;
  if (prefer_line && lf.ok) {
    f.is_line = true;
    f.point = lf.point;
    f.dir = lf.dir;
    f.ok = true;
  } else if (cf.ok) {
    f.is_line = false;
    f.center = cf.center;
    f.radius = cf.radius;
    f.ok = true;
  }
  return f;
}

// Signed distance of p to a fitted curve and its gradient.
double curve_residual(const CurveFit& ch, const Vec2& p, Vec2* grad) {
  if (ch.is_line) {
    Vec2 n{-ch.dir.y, ch.dir.x};
    double r = n.x * (p.x - ch.point.x) + n.y * (p.y - ch.point.y);
    if (grad) *grad = n;
    return r;
  }
  double dx = p.x - ch.center.x, dy = p.y - ch.center.y;
  double d = std::hypot(dx, dy);
  if (d < 1e-12) {
    if (grad) *grad = {1, 0};
    return -ch.radius;
  }
  if (grad) *grad = {dx / d, dy / d};
  return d - ch.radius;
}

// Gauss-Newton intersection of the incident fitted curves; smoothing bias
// makes the raw crossing mean drift near junctions.
Vec2 refine_junction(const std::vector<const CurveFit*>& curves, Vec2 p0) {
  if (curves.size() < 2) return p0;
  Vec2 p = p0;
  for (int it = 0; it < 8; ++it) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (const CurveFit* ch : curves) {
      Vec2 gr;
      double r = curve_residual(*ch, p, &gr);
      a11 += gr.x * gr.x;
      a12 += gr.x * gr.y;
      a22 += gr.y * gr.y;
      b1 += gr.x * r;
      b2 += gr.y * r;
    }
    double det = a11 * a22 - a12 * a12;
    if (std::abs(det) < 1e-12) break;
    double sx = (a22 * b1 - a12 * b2) / det;
    double sy = (a11 * b2 - a12 * b1) / det;
    p.x -= sx;
    p.y -= sy;
    if (std::hypot(sx, sy) < 1e-12) break;
  }
  // reject runaway refinements (nearly tangent curves)
  if (std::hypot(p.x - p0.x, p.y - p0.y) > 3.0) return p0;
  return p;
}

}  // namespace

JunctionReport junction_angles_2d(const InterfaceSet& interfaces,
                                  const AnalysisParams& params) {
  JunctionReport rep;
  const int w = std::max(2, params.tangent_window);
  const double guard = params.resolve_guard(interfaces.geom);

  // Per-chain fits over the points clear of every junction: the stationary
  // geometry is rounded off at the diffusion scale near junctions, so the
  // asymptotic arcs are extrapolated into the meeting point.
  std::vector<CurveFit> fits(interfaces.chains.size());
  for (size_t ci = 0; ci < interfaces.chains.size(); ++ci) {
    const Chain& ch = interfaces.chains[size_t(ci)];
    std::vector<std::array<double, 2>> clean;
    for (const auto& p : ch.points) {
      bool clear = true;
      for (int jid : {ch.junction_start, ch.junction_end}) {
        if (jid < 0) continue;
        const auto& q = interfaces.junctions[size_t(jid)].position;
        if (std::hypot(p[0] - q[0], p[1] - q[1]) < guard) clear = false;
      }
      if (clear) clean.push_back(p);
    }
    if (int(clean.size()) >= std::max(8, w))
      fits[ci] = fit_points(clean, ch.length);
    else
      fits[ci] = fit_points(ch.points, ch.length);
  }

  for (size_t j = 0; j < interfaces.junctions.size(); ++j) {
    const auto& jn = interfaces.junctions[j];
    if (jn.chain_ends.empty()) continue;
    JunctionAngles ja;
    ja.junction_id = int(j);
    ja.phases = jn.phases;
    ja.flagged_multi = jn.phases.size() > 3;

    std::vector<const CurveFit*> incident;
    for (int enc : jn.chain_ends)
      if (fits[size_t(enc / 2)].ok) incident.push_back(&fits[size_t(enc / 2)]);
    Vec2 jp = refine_junction(incident, {jn.position[0], jn.position[1]});
    ja.position = {jp.x, jp.y};

    std::vector<double> azimuths;
    for (int enc : jn.chain_ends) {
      const Chain& ch = interfaces.chains[size_t(enc / 2)];
      const CurveFit& fit = fits[size_t(enc / 2)];
      if (!fit.ok) continue;
      const bool at_end = enc % 2;
      const auto& pts = ch.points;
      if (pts.size() < 2) continue;
      // orientation reference: a window point safely inside the chain
      const size_t ref_idx =
          at_end ? pts.size() - 1 - std::min<size_t>(size_t(w), pts.size() - 1)
                 : std::min<size_t>(size_t(w), pts.size() - 1);
      Vec2 toward{pts[ref_idx][0] - jp.x, pts[ref_idx][1] - jp.y};

      // tangent of the fitted curve at the junction
      Vec2 t;
      if (fit.is_line) {
        t = fit.dir;
      } else {
        Vec2 radial{jp.x - fit.center.x, jp.y - fit.center.y};
        t = {-radial.y, radial.x};
        double n = norm(t);
        if (n < 1e-12) continue;
        t.x /= n;
        t.y /= n;
      }
      if (t.x * toward.x + t.y * toward.y < 0) {
        t.x = -t.x;
        t.y = -t.y;
      }
      azimuths.push_back(std::atan2(t.y, t.x));
    }
    if (azimuths.size() < 2) continue;
    std::sort(azimuths.begin(), azimuths.end());
    for (size_t k = 0; k < azimuths.size(); ++k) {
      double next = k + 1 < azimuths.size() ? azimuths[k + 1]
                                            : azimuths[0] + 2 * M_PI;
      ja.angles_deg.push_back((next - azimuths[k]) * 180.0 / M_PI);
    }
    rep.junctions.push_back(std::move(ja));
  }
  return rep;
}

PerimeterReport geometric_perimeter(const LabelField& labels,
                                    const AnalysisParams& params) {
  auto set = extract_interfaces_2d(labels, params);
  PerimeterReport rep;
  rep.total = set.total_length;
  for (const auto& ch : set.chains)
    rep.per_pair[{ch.phase_a, ch.phase_b}] += ch.length;
  return rep;
}

double geometric_area(const LabelField& labels, int phase) {
  if (phase < 0 || phase >= labels.n_phases)
    throw ParamError("phase index out of range");
  std::int64_t count = 0;
  for (auto l : labels.labels) count += l == phase;
  return double(count) * labels.geom.cell_volume();
}

namespace {

bool phase_connected(const LabelField& labels, int phase) {
  const Grid& g = labels.geom;
  const std::int64_t n = g.cell_count();
  std::int64_t start = -1, total = 0;
  for (std::int64_t x = 0; x < n; ++x)
    if (labels.labels[size_t(x)] == phase) {
      if (start < 0) start = x;
      ++total;
    }
  if (total == 0) return true;
  std::vector<char> seen(size_t(n), 0);
  std::queue<std::int64_t> q;
  q.push(start);
  seen[size_t(start)] = 1;
  std::int64_t reached = 0;
  while (!q.empty()) {
    auto x = q.front();
    q.pop();
    ++reached;
    auto c = g.coords(x);
    for (int a = 0; a < g.rank; ++a)
      for (int s = -1; s <= 1; s += 2) {
        auto qq = c;
        qq[a] = (qq[a] + s + g.dims[a]) % g.dims[a];
        std::int64_t y = g.index(qq[0], qq[1], qq[2]);
        if (!seen[size_t(y)] && labels.labels[size_t(y)] == phase) {
          seen[size_t(y)] = 1;
          q.push(y);
        }
      }
  }
  return reached == total;
}

}  // namespace

IsoperimetricResult isoperimetric_ratio(const LabelField& labels, int phase,
                                        const AnalysisParams& params) {
  if (labels.geom.rank != 2)
    throw ParamError("isoperimetric_ratio is a 2D diagnostic");
  auto per = geometric_perimeter(labels, params);
  double p = 0.0;
  for (auto& [pair, len] : per.per_pair)
    if (pair.first == phase || pair.second == phase) p += len;
  double a = geometric_area(labels, phase);
  IsoperimetricResult res;
  res.ratio = a > 0 ? p * p / a : 0.0;
  res.connected = phase_connected(labels, phase);
  return res;
}

int interior_bubble_count(const LabelField& labels) {
  const Grid& g = labels.geom;
  const int comp = labels.complement();
  std::vector<char> touches(size_t(labels.n_phases), 0);
  const std::int64_t n = g.cell_count();
  for (std::int64_t x = 0; x < n; ++x) {
    const int l = labels.labels[size_t(x)];
    if (l == comp) continue;
    auto c = g.coords(x);
    bool t = false;
    for (int a = 0; a < g.rank && !t; ++a)
      for (int s = -1; s <= 1 && !t; s += 2) {
        auto q = c;
        q[a] = (q[a] + s + g.dims[a]) % g.dims[a];
        t = labels.labels[size_t(g.index(q[0], q[1], q[2]))] == comp;
      }
    if (t) touches[size_t(l)] = 1;
  }
  int interior = 0;
  for (int p = 0; p < labels.n_phases - 1; ++p)
    if (!touches[size_t(p)]) ++interior;
  return interior;
}

namespace {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

double dot3(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }
Vec3 normalized3(const Vec3& a) {
  double n = norm3(a);
  return n > 0 ? Vec3{a.x / n, a.y / n, a.z / n} : a;
}

// Plane through the centroid (normal = smallest covariance eigenvector via
// inverse iteration) or Kasa sphere, chosen by RMS residual. Sheets of an
// equal-tension foam are spherical caps, so the fit extrapolates the
// geometry into the smeared border zone exactly like the 2D circle fits.
struct SurfaceFit {
  bool is_plane = true;
  Vec3 normal{0, 0, 1};  // plane
  Vec3 center;           // sphere
  double radius = 0.0;
  double rms = 1e300;
  bool ok = false;

  Vec3 normal_at(const Vec3& p) const {
    if (is_plane) return normal;
    return normalized3({p.x - center.x, p.y - center.y, p.z - center.z});
  }
};

SurfaceFit fit_surface(const std::vector<Vec3>& pts) {
  SurfaceFit f;
  const size_t n = pts.size();
  if (n < 12) return f;
  Vec3 c;
  for (auto& p : pts) {
    c.x += p.x;
    c.y += p.y;
    c.z += p.z;
  }
  c.x /= double(n);
  c.y /= double(n);
  c.z /= double(n);

  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (auto& p : pts) {
    double d[3] = {p.x - c.x, p.y - c.y, p.z - c.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] += d[i] * d[j];
  }
  // smallest eigenvector by a few rounds of inverse power iteration on
  // (M + eps I)^-1 applied to a generic start
  auto solve3 = [&](const double a[3][3], const Vec3& b, Vec3& out) {
    double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                 a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                 a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    if (std::abs(det) < 1e-30) return false;
    auto cof = [&](int r0, int c0) {
      int r1 = (r0 + 1) % 3, r2 = (r0 + 2) % 3;
      int c1 = (c0 + 1) % 3, c2 = (c0 + 2) % 3;
      return a[r1][c1] * a[r2][c2] - a[r1][c2] * a[r2][c1];
    };
    out.x = (cof(0, 0) * b.x + cof(1, 0) * b.y + cof(2, 0) * b.z) / det;
    out.y = (cof(0, 1) * b.x + cof(1, 1) * b.y + cof(2, 1) * b.z) / det;
    out.z = (cof(0, 2) * b.x + cof(1, 2) * b.y + cof(2, 2) * b.z) / det;
    return true;
  };
  double reg[3][3];
  double tr = m[0][0] + m[1][1] + m[2][2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) reg[i][j] = m[i][j] + (i == j ? 1e-9 * tr : 0);
  Vec3 v{1, 0.7, 0.4};
  for (int it = 0; it < 12; ++it) {
    Vec3 next;
    if (!solve3(reg, v, next)) break;
    v = normalized3(next);
  }
  double plane_ss = 0;
  for (auto& p : pts) {
    double d = (p.x - c.x) * v.x + (p.y - c.y) * v.y + (p.z - c.z) * v.z;
    plane_ss += d * d;
  }
  const double plane_rms = std::sqrt(plane_ss / double(n));

  // Kasa sphere: |p|^2 = 2 c.p + d
  double a4[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  Vec3 b4;
  double sd = 0, sz2 = 0;
  Vec3 sp;
  for (auto& p : pts) {
    double z = dot3(p, p);
    a4[0][0] += p.x * p.x;
    a4[0][1] += p.x * p.y;
    a4[0][2] += p.x * p.z;
    a4[1][1] += p.y * p.y;
    a4[1][2] += p.y * p.z;
    a4[2][2] += p.z * p.z;
    sp.x += p.x;
    sp.y += p.y;
    sp.z += p.z;
    b4.x += p.x * z;
    b4.y += p.y * z;
    b4.z += p.z * z;
    sd += z;
    sz2 += z * z;
  }
  a4[1][0] = a4[0][1];
  a4[2][0] = a4[0][2];
  a4[2][1] = a4[1][2];
  // eliminate the offset: center = argmin of the reduced normal equations
  double N = double(n);
  double ar[3][3];
  Vec3 br;
  double spv[3] = {sp.x, sp.y, sp.z};
  double bv[3] = {b4.x, b4.y, b4.z};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) ar[i][j] = a4[i][j] - spv[i] * spv[j] / N;
    double bi = 0.5 * (bv[i] - spv[i] * sd / N);
    (i == 0 ? br.x : i == 1 ? br.y : br.z) = bi;
  }
  Vec3 sc;
  double sphere_rms = 1e300, sphere_r = 0;
  if (solve3(ar, br, sc)) {
    double r2 = sd / N - 2 * dot3(sc, {sp.x / N, sp.y / N, sp.z / N}) +
                dot3(sc, sc);
    if (r2 > 0) {
      sphere_r = std::sqrt(r2);
      double ss = 0;
      for (auto& p : pts) {
        double d =
            std::sqrt(dot3({p.x - sc.x, p.y - sc.y, p.z - sc.z},
                           {p.x - sc.x, p.y - sc.y, p.z - sc.z})) -
            sphere_r;
        ss += d * d;
      }
      sphere_rms = std::sqrt(ss / N);
    }
  }

  f.ok = true;
  if (plane_rms <= sphere_rms) {
    f.is_plane = true;
    f.normal = v;
    f.center = c;  // anchor point on the plane
    f.rms = plane_rms;
  } else {
    f.is_plane = false;
    f.center = sc;
    f.radius = sphere_r;
    f.rms = sphere_rms;
  }
  return f;
}

// 3D circle through a point cloud: PCA plane, then a 2D Kasa fit in it.
// Straight borders (residual preference) fall back to a line.
struct BorderFit {
  bool is_line = false;
  Vec3 point, dir{1, 0, 0};          // line
  Vec3 center, axis_u, axis_v;       // circle basis
  double radius = 0.0;
  bool ok = false;

  Vec3 tangent_at(const Vec3& p) const {
    if (is_line) return dir;
    // tangent of the circle at the projection of p
    Vec3 d{p.x - center.x, p.y - center.y, p.z - center.z};
    double u = dot3(d, axis_u), v = dot3(d, axis_v);
    double nn = std::hypot(u, v);
    if (nn < 1e-12) return dir;
    double tu = -v / nn, tv = u / nn;
    return {tu * axis_u.x + tv * axis_v.x, tu * axis_u.y + tv * axis_v.y,
            tu * axis_u.z + tv * axis_v.z};
  }
};

BorderFit fit_border(const std::vector<Vec3>& pts) {
  BorderFit f;
  const size_t n = pts.size();
  if (n < 5) return f;
  Vec3 c;
  for (auto& p : pts) {
    c.x += p.x;
    c.y += p.y;
    c.z += p.z;
  }
  c.x /= double(n);
  c.y /= double(n);
  c.z /= double(n);
  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (auto& p : pts) {
    double d[3] = {p.x - c.x, p.y - c.y, p.z - c.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] += d[i] * d[j];
  }
  // largest eigenvector: power iteration (line direction)
  Vec3 dir{1, 0.6, 0.3};
  for (int it = 0; it < 16; ++it) {
    Vec3 next{m[0][0] * dir.x + m[0][1] * dir.y + m[0][2] * dir.z,
              m[1][0] * dir.x + m[1][1] * dir.y + m[1][2] * dir.z,
              m[2][0] * dir.x + m[2][1] * dir.y + m[2][2] * dir.z};
    dir = normalized3(next);
  }
  double line_ss = 0;
  for (auto& p : pts) {
    Vec3 d{p.x - c.x, p.y - c.y, p.z - c.z};
    double along = dot3(d, dir);
    line_ss += dot3(d, d) - along * along;
  }
  const double line_rms = std::sqrt(std::max(0.0, line_ss) / double(n));

  // plane of the circle: smallest eigenvector == normal of best plane;
  // build an orthonormal basis (u, v) in that plane
  SurfaceFit plane = fit_surface(pts);
  double circle_rms = 1e300;
  Vec3 cc;
  double cr = 0;
  Vec3 u, w;
  if (plane.ok && plane.is_plane) {
    Vec3 nrm = plane.normal;
    u = normalized3(std::abs(nrm.x) < 0.9 ? Vec3{1 - nrm.x * nrm.x,
                                                 -nrm.x * nrm.y, -nrm.x * nrm.z}
                                          : Vec3{-nrm.y * nrm.x,
                                                 1 - nrm.y * nrm.y,
                                                 -nrm.y * nrm.z});
    w = {nrm.y * u.z - nrm.z * u.y, nrm.z * u.x - nrm.x * u.z,
         nrm.x * u.y - nrm.y * u.x};
    std::vector<std::array<double, 2>> flat;
    flat.reserve(n);
    for (auto& p : pts) {
      Vec3 d{p.x - c.x, p.y - c.y, p.z - c.z};
      flat.push_back({dot3(d, u), dot3(d, w)});
    }
    auto cf = fit_circle(flat);
    if (cf.ok) {
      cr = cf.radius;
      cc = {c.x + cf.center.x * u.x + cf.center.y * w.x,
            c.y + cf.center.x * u.y + cf.center.y * w.y,
            c.z + cf.center.x * u.z + cf.center.y * w.z};
      double ss = 0;
      for (auto& fp : flat) {
        double d = std::hypot(fp[0] - cf.center.x, fp[1] - cf.center.y) - cr;
        ss += d * d;
      }
      circle_rms = std::sqrt(ss / double(n) + plane.rms * plane.rms);
    }
  }

  f.ok = true;
  if (line_rms <= circle_rms) {
    f.is_line = true;
    f.point = c;
    f.dir = dir;
  } else {
    f.is_line = false;
    f.center = cc;
    f.radius = cr;
    f.axis_u = u;
    f.axis_v = w;
  }
  return f;
}

}  // namespace

PlateauStats3D plateau_border_angles_3d(const LabelField& labels,
                                        const AnalysisParams& params) {
  labels.validate();
  if (labels.geom.rank != 3)
    throw ParamError("plateau_border_angles_3d needs a 3D field");
  const Grid& g = labels.geom;
  const int np = labels.n_phases;
  const std::int64_t n_cells = g.cell_count();

  GaussianKernel smooth(g, params.resolve_tau(g));
  MultiField phi = MultiField::zeros(g, np);
  {
    MultiField u = MultiField::zeros(g, np);
    for (int p = 0; p < np; ++p) {
      auto sp = u.phase(p);
      for (std::int64_t x = 0; x < n_cells; ++x)
        sp[size_t(x)] = labels.labels[size_t(x)] == p ? 1.0 : 0.0;
    }
    convolve_phases(smooth, u, phi);
  }
  auto phi_at = [&](int p, int i0, int i1, int i2) {
    return phi.data[size_t(p) * n_cells + g.index(i0, i1, i2)];
  };
  auto wrap = [&](int v, int a) { return (v + g.dims[a]) % g.dims[a]; };

  // gradient of Phi_a - Phi_b at a cell, central differences
  auto grad_diff = [&](int a, int b, const std::array<int, 3>& c) {
    std::array<double, 3> gr{};
    for (int ax = 0; ax < 3; ++ax) {
      auto hi = c, lo = c;
      hi[ax] = wrap(c[ax] + 1, ax);
      lo[ax] = wrap(c[ax] - 1, ax);
      double vp = phi_at(a, hi[0], hi[1], hi[2]) - phi_at(b, hi[0], hi[1], hi[2]);
      double vm = phi_at(a, lo[0], lo[1], lo[2]) - phi_at(b, lo[0], lo[1], lo[2]);
      gr[ax] = (vp - vm) / (2 * g.spacing[ax]);
    }
    return gr;
  };
  auto angle_deg = [](const std::array<double, 3>& u,
                      const std::array<double, 3>& v) {
    double du = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    double dv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (du == 0 || dv == 0) return -1.0;
    double c = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) / (du * dv);
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
  };

  PlateauStats3D stats;
  std::vector<std::array<int, 3>> quad_cells;
  struct TripleSample {
    std::array<int, 3> cell;
    std::array<int, 3> phases;
  };
  std::vector<TripleSample> triples;

  // block label classification: 0 = interior, 2 = clean two-phase,
  // 3 = triple line, >=4 = vertex region
  auto block_labels = [&](int i0, int i1, int i2, int* found) {
    int k = 0;
    for (int d0 = -1; d0 <= 1 && k <= 6; ++d0)
      for (int d1 = -1; d1 <= 1 && k <= 6; ++d1)
        for (int d2 = -1; d2 <= 1 && k <= 6; ++d2) {
          int l = labels.labels[size_t(g.index(i0 + d0, i1 + d1, i2 + d2))];
          bool nu = true;
          for (int t = 0; t < k; ++t)
            if (found[t] == l) nu = false;
          if (nu) found[k++] = l;
        }
    return k;
  };

  for (int i0 = 1; i0 + 1 < g.dims[0]; ++i0)
    for (int i1 = 1; i1 + 1 < g.dims[1]; ++i1)
      for (int i2 = 1; i2 + 1 < g.dims[2]; ++i2) {
        int found[8];
        int k = block_labels(i0, i1, i2, found);
        if (k == 3) {
          std::sort(found, found + 3);
          triples.push_back({{i0, i1, i2}, {found[0], found[1], found[2]}});
        } else if (k >= 4) {
          quad_cells.push_back({i0, i1, i2});
        }
      }

  // Sheet geometry is fitted from the clean two-phase shells (a guard zone
  // around triple lines and vertices excluded): sheets of an equal-tension
  // foam are spherical caps or planes, so the fitted surface extrapolates
  // into the smeared border zone, and the dihedral angle at a border sample
  // is the angle between fitted-surface normals there. Local gradients on
  // the line itself mix all three sheets and bias the angles.
  const double guard = params.resolve_guard(g);
  const int guard_cells = std::max(2, int(std::ceil(guard / g.spacing[0])));

  std::vector<std::array<int, 3>> exclusion = quad_cells;
  for (const auto& t : triples) exclusion.push_back(t.cell);

  auto far_from_borders = [&](int i0, int i1, int i2) {
    for (const auto& e : exclusion) {
      int dd = std::max({std::abs(i0 - e[0]), std::abs(i1 - e[1]),
                         std::abs(i2 - e[2])});
      if (dd < guard_cells) return false;
    }
    return true;
  };

  std::map<std::pair<int, int>, std::vector<Vec3>> shells;
  for (int i0 = 1; i0 + 1 < g.dims[0]; ++i0)
    for (int i1 = 1; i1 + 1 < g.dims[1]; ++i1)
      for (int i2 = 1; i2 + 1 < g.dims[2]; ++i2) {
        int found[8];
        if (block_labels(i0, i1, i2, found) != 2) continue;
        if (!far_from_borders(i0, i1, i2)) continue;
        auto key = std::minmax(found[0], found[1]);
        auto cc = g.cell_center(g.index(i0, i1, i2));
        shells[{key.first, key.second}].push_back({cc[0], cc[1], cc[2]});
      }
  std::map<std::pair<int, int>, SurfaceFit> sheet_fits;
  for (auto& [key, pts] : shells) sheet_fits[key] = fit_surface(pts);
  if (std::getenv("FOAM_DEBUG_FITS")) {
    for (auto& [key, fit] : sheet_fits)
      std::fprintf(stderr,
                   "sheet (%d,%d): n=%zu %s radius=%.3f rms=%.4f c=(%.3f,%.3f,%.3f)\n",
                   key.first, key.second, shells[key].size(),
                   fit.is_plane ? "plane" : "sphere", fit.radius, fit.rms,
                   fit.center.x, fit.center.y, fit.center.z);
  }

  // Border curves per phase triple: evaluation points are projected onto
  // the fitted curve, since a one-cell offset on a curved sheet already
  // rotates its normal by several degrees.
  std::map<std::array<int, 3>, std::vector<Vec3>> border_pts;
  for (const auto& t : triples) {
    auto cc = g.cell_center(g.index(t.cell[0], t.cell[1], t.cell[2]));
    border_pts[t.phases].push_back({cc[0], cc[1], cc[2]});
  }
  std::map<std::array<int, 3>, BorderFit> borders;
  for (auto& [ph, pts] : border_pts) borders[ph] = fit_border(pts);

  // Gauss-Newton projection onto the common intersection of the fitted
  // sheets; the three surfaces generally miss each other by a fraction of a
  // cell and the normals must be read where the surfaces actually meet.
  auto surface_residual = [](const SurfaceFit& f, const Vec3& p, Vec3* grad) {
    if (f.is_plane) {
      double r = dot3(f.normal, p) - dot3(f.normal, f.center);
      if (grad) *grad = f.normal;
      return r;
    }
    Vec3 d{p.x - f.center.x, p.y - f.center.y, p.z - f.center.z};
    double n = norm3(d);
    if (n < 1e-12) {
      if (grad) *grad = {1, 0, 0};
      return -f.radius;
    }
    if (grad) *grad = {d.x / n, d.y / n, d.z / n};
    return n - f.radius;
  };
  auto project_onto_sheets = [&](const std::array<const SurfaceFit*, 3>& fs,
                                 Vec3 p) {
    const Vec3 p0 = p;
    for (int it = 0; it < 10; ++it) {
      double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
      Vec3 jtr;
      for (const SurfaceFit* f : fs) {
        Vec3 gr;
        double r = surface_residual(*f, p, &gr);
        double gv[3] = {gr.x, gr.y, gr.z};
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) jtj[i][j] += gv[i] * gv[j];
        jtr.x += gr.x * r;
        jtr.y += gr.y * r;
        jtr.z += gr.z * r;
      }
      for (int i = 0; i < 3; ++i) jtj[i][i] += 1e-9;
      double det = jtj[0][0] * (jtj[1][1] * jtj[2][2] - jtj[1][2] * jtj[2][1]) -
                   jtj[0][1] * (jtj[1][0] * jtj[2][2] - jtj[1][2] * jtj[2][0]) +
                   jtj[0][2] * (jtj[1][0] * jtj[2][1] - jtj[1][1] * jtj[2][0]);
      if (std::abs(det) < 1e-30) break;
      auto cof = [&](int r0, int c0) {
        int r1 = (r0 + 1) % 3, r2 = (r0 + 2) % 3;
        int c1 = (c0 + 1) % 3, c2 = (c0 + 2) % 3;
        return jtj[r1][c1] * jtj[r2][c2] - jtj[r1][c2] * jtj[r2][c1];
      };
      Vec3 step{(cof(0, 0) * jtr.x + cof(1, 0) * jtr.y + cof(2, 0) * jtr.z) / det,
                (cof(0, 1) * jtr.x + cof(1, 1) * jtr.y + cof(2, 1) * jtr.z) / det,
                (cof(0, 2) * jtr.x + cof(1, 2) * jtr.y + cof(2, 2) * jtr.z) / det};
      p = {p.x - step.x, p.y - step.y, p.z - step.z};
      if (norm3(step) < 1e-12) break;
    }
    // reject runaway projections (nearly tangent sheets)
    Vec3 moved{p.x - p0.x, p.y - p0.y, p.z - p0.z};
    if (norm3(moved) > 0.5) return p0;
    return p;
  };

  auto oriented_normal = [&](int a, int b, const std::array<int, 3>& cell,
                             const Vec3& at, std::array<double, 3>& out) {
    auto it = sheet_fits.find(std::minmax(a, b));
    if (it == sheet_fits.end() || !it->second.ok) return false;
    Vec3 n = it->second.normal_at(at);
    // orient from b toward a using the local smoothed gradient
    auto gr = grad_diff(a, b, cell);
    double s = n.x * gr[0] + n.y * gr[1] + n.z * gr[2];
    if (s < 0) n = {-n.x, -n.y, -n.z};
    out = {n.x, n.y, n.z};
    return true;
  };

  for (const auto& t : triples) {
    const auto [a, b, c] = t.phases;
    auto it_ab = sheet_fits.find(std::minmax(a, b));
    auto it_bc = sheet_fits.find(std::minmax(b, c));
    auto it_ca = sheet_fits.find(std::minmax(c, a));
    if (it_ab == sheet_fits.end() || !it_ab->second.ok ||
        it_bc == sheet_fits.end() || !it_bc->second.ok ||
        it_ca == sheet_fits.end() || !it_ca->second.ok)
      continue;
    auto cc = g.cell_center(g.index(t.cell[0], t.cell[1], t.cell[2]));
    const Vec3 at = project_onto_sheets(
        {&it_ab->second, &it_bc->second, &it_ca->second},
        {cc[0], cc[1], cc[2]});
    std::array<double, 3> n1, n2, n3;
    if (!oriented_normal(a, b, t.cell, at, n1) ||
        !oriented_normal(b, c, t.cell, at, n2) ||
        !oriented_normal(c, a, t.cell, at, n3))
      continue;
    double a12 = angle_deg(n1, n2), a23 = angle_deg(n2, n3),
           a31 = angle_deg(n3, n1);
    if (a12 < 0 || a23 < 0 || a31 < 0) continue;
    stats.dihedral_angles_deg.push_back(a12);
    stats.dihedral_angles_deg.push_back(a23);
    stats.dihedral_angles_deg.push_back(a31);
  }
  stats.triple_samples = int(triples.size());

  // Cluster 4-phase cells into vertices; border tangents come from circle
  // (or line) fits of each incident triple line, evaluated at the vertex,
  // oriented away from it along the border.
  if (!quad_cells.empty()) {
    UnionFind uf(quad_cells.size());
    for (size_t i = 0; i < quad_cells.size(); ++i)
      for (size_t j = i + 1; j < quad_cells.size(); ++j) {
        int dd = 0;
        for (int ax = 0; ax < 3; ++ax)
          dd = std::max(dd, std::abs(quad_cells[i][ax] - quad_cells[j][ax]));
        if (dd <= 2) uf.unite(std::int32_t(i), std::int32_t(j));
      }
    std::map<std::int32_t, std::vector<size_t>> clusters;
    for (size_t i = 0; i < quad_cells.size(); ++i)
      clusters[uf.find(std::int32_t(i))].push_back(i);
    stats.quad_vertices = int(clusters.size());

    for (auto& [root, members] : clusters) {
      Vec3 v;
      for (auto m : members) {
        auto cc = g.cell_center(
            g.index(quad_cells[m][0], quad_cells[m][1], quad_cells[m][2]));
        v.x += cc[0];
        v.y += cc[1];
        v.z += cc[2];
      }
      v.x /= double(members.size());
      v.y /= double(members.size());
      v.z /= double(members.size());

      // incident borders: triples with samples near this vertex
      const double near = 10.0 * g.spacing[0];
      std::vector<std::array<double, 3>> dirs;
      for (auto& [ph, pts] : border_pts) {
        double best = 1e300;
        Vec3 centroid;
        for (auto& p : pts) {
          Vec3 d{p.x - v.x, p.y - v.y, p.z - v.z};
          best = std::min(best, norm3(d));
          centroid.x += p.x;
          centroid.y += p.y;
          centroid.z += p.z;
        }
        if (best > near) continue;
        centroid.x /= double(pts.size());
        centroid.y /= double(pts.size());
        centroid.z /= double(pts.size());
        const auto& fit = borders[ph];
        if (!fit.ok) continue;
        Vec3 t = fit.tangent_at(v);
        Vec3 away{centroid.x - v.x, centroid.y - v.y, centroid.z - v.z};
        if (dot3(t, away) < 0) t = {-t.x, -t.y, -t.z};
        dirs.push_back({t.x, t.y, t.z});
      }
      for (size_t i = 0; i < dirs.size(); ++i)
        for (size_t j = i + 1; j < dirs.size(); ++j) {
          double a = angle_deg(dirs[i], dirs[j]);
          if (a >= 0) stats.tetra_angles_deg.push_back(a);
        }
    }
  }

  auto summarize = [](std::vector<double> v, double& mean, double& median,
                      double* stddev) {
    if (v.empty()) return;
    double s = 0;
    for (double x : v) s += x;
    mean = s / double(v.size());
    std::sort(v.begin(), v.end());
    median = v[v.size() / 2];
    if (stddev) {
      double ss = 0;
      for (double x : v) ss += (x - mean) * (x - mean);
      *stddev = std::sqrt(ss / double(v.size()));
    }
  };
  summarize(stats.dihedral_angles_deg, stats.dihedral_mean,
            stats.dihedral_median, &stats.dihedral_stddev);
  summarize(stats.tetra_angles_deg, stats.tetra_mean, stats.tetra_median,
            nullptr);
  stats.flagged_insufficient = stats.triple_samples < 10;
  return stats;
}

}  // namespace foam
