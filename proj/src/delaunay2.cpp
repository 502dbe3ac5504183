// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "pvlab/delaunay.hpp"
#include "pvlab/exact.hpp"

namespace pvlab {

using geom::incircle_sos;
using geom::orient2d_sos;

namespace {

// Morton key for insertion locality.
std::uint64_t morton2(Vec2 p, Vec2 lo, Vec2 hi) {
  auto q = [](double t) {
    long v = std::lround(t * 65535.0);
    return std::uint64_t(std::clamp(v, 0L, 65535L));
  };
  std::uint64_t x = q((p.x - lo.x) / (hi.x - lo.x + 1e-300));
  std::uint64_t y = q((p.y - lo.y) / (hi.y - lo.y + 1e-300));
  std::uint64_t key = 0;
  for (int b = 0; b < 16; ++b) {
    key |= ((x >> b) & 1) << (2 * b);
    key |= ((y >> b) & 1) << (2 * b + 1);
  }
  return key;
}

struct PairHash {
  std::size_t operator()(const std::pair<long long, long long>& p) const {
    return std::size_t(p.first * 0x9E3779B97F4A7C15ULL ^ (p.second + 0x7F4A7C15));
  }
};

}  // namespace

Delaunay2::Delaunay2(std::span<const Vec2> pts) : pts_(pts.begin(), pts.end()) {
  const int n = int(pts_.size());
  {
    std::unordered_map<std::pair<long long, long long>, int, PairHash> seen;
    seen.reserve(pts_.size());
    for (int i = 0; i < n; ++i) {
      long long bx, by;
      static_assert(sizeof(double) == 8);
      std::memcpy(&bx, &pts_[i].x, 8);
      std::memcpy(&by, &pts_[i].y, 8);
      if (!seen.emplace(std::make_pair(bx, by), i).second)
        throw std::invalid_argument("Delaunay2: duplicate point");
    }
  }
  if (n < 3) return;  // callers fall back to all-pairs adjacency

  Vec2 lo = pts_[0], hi = pts_[0];
  for (Vec2 p : pts_) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return morton2(pts_[a], lo, hi) < morton2(pts_[b], lo, hi);
  });

  // first triangle plus three ghosts
  {
    int a = order[0], b = order[1], c = order[2];
    if (orient2d_sos(pts_[a], pts_[b], pts_[c], a, b, c) < 0) std::swap(b, c);
    tris_.resize(4);
    tris_[0] = {{a, b, c}, {1, 2, 3}, true};         // n[k] across edge opp v[k]
    tris_[1] = {{c, b, kGhost}, {3, 2, 0}, true};    // across edge (b,c)
    tris_[2] = {{a, c, kGhost}, {1, 3, 0}, true};    // across edge (c,a)
    tris_[3] = {{b, a, kGhost}, {2, 1, 0}, true};    // across edge (a,b)
    // ghost-ghost links: ghost (x,y,G) has slot0 edge (y,G), slot1 edge (G,x)
    // tris_[1]=(c,b,G): slot0=(b,G) ~ ghost with slot1=(G,b) -> tris_[3]; slot1=(G,c) ~ tris_[2].slot0=(c? ...)
    tris_[1].n = {3, 2, 0};
    tris_[2].n = {1, 3, 0};
    tris_[3].n = {2, 1, 0};
    last_real_ = 0;
  }
  stamp_.assign(tris_.size(), 0);
  for (int k = 3; k < n; ++k) insert(order[k]);
  build_neighbor_lists();
}

bool Delaunay2::conflicts(int t, Vec2 p, int pi) const {
  const Tri& T = tris_[t];
  int g = -1;
  for (int k = 0; k < 3; ++k)
    if (T.v[k] == kGhost) g = k;
  if (g < 0)
    return incircle_sos(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], p, T.v[0],
                        T.v[1], T.v[2], pi) > 0;
  // ghost: sign of the determinant with the ghost row replaced by p;
  // the cyclic vertex order makes the permutation even for every slot
  int w0 = T.v[(g + 1) % 3], w1 = T.v[(g + 2) % 3];
  return orient2d_sos(pts_[w0], pts_[w1], p, w0, w1, pi) > 0;
}

int Delaunay2::locate_conflict(Vec2 p, int pi) const {
  int cur = last_real_;
  std::size_t steps = 0, cap = 40 * (tris_.size() + 2);
  int prev = -1;
  while (steps++ < cap) {
    const Tri& T = tris_[cur];
    if (T.v[0] == kGhost || T.v[1] == kGhost || T.v[2] == kGhost) {
      if (conflicts(cur, p, pi)) return cur;
      // not beyond this hull edge: step back inside
      int g = T.v[0] == kGhost ? 0 : (T.v[1] == kGhost ? 1 : 2);
      int nxt = T.n[g];
      if (nxt == prev) {
        // slide along the hull
        nxt = T.n[(g + 1) % 3];
        if (nxt == prev) nxt = T.n[(g + 2) % 3];
      }
      prev = cur;
      cur = nxt;
      continue;
    }
    int neg[3], nneg = 0;
    for (int k = 0; k < 3; ++k) {
      int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
      if (orient2d_sos(pts_[a], pts_[b], p, a, b, pi) < 0) neg[nneg++] = k;
    }
    if (nneg == 0) return cur;  // containing triangle always conflicts
    int pick = neg[0];
    if (nneg > 1) {
      walk_state_ = walk_state_ * 6364136223846793005ULL + 1442695040888963407ULL;
      pick = neg[(walk_state_ >> 33) % nneg];
    }
    if (T.n[pick] == prev && nneg > 1)
      pick = (pick == neg[0]) ? neg[1] : neg[0];
    prev = cur;
    cur = T.n[pick];
  }
  // defensive fallback, not expected to trigger
  for (int t = 0; t < int(tris_.size()); ++t)
    if (tris_[t].alive && conflicts(t, p, pi)) return t;
  throw std::logic_error("Delaunay2: point location failed");
}

void Delaunay2::insert(int pi) {
  const Vec2 p = pts_[pi];
  int seed = locate_conflict(p, pi);

  // grow the conflict region
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  stamp_.resize(tris_.size(), 0);
  std::vector<int> cavity, stack{seed};
  stamp_[seed] = epoch_;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    cavity.push_back(t);
    for (int k = 0; k < 3; ++k) {
      int u = tris_[t].n[k];
      if (stamp_[u] == epoch_) continue;
      if (conflicts(u, p, pi)) {
        stamp_[u] = epoch_;
        stack.push_back(u);
      }
    }
  }

  // boundary fan
  struct BEdge {
    int a, b, outside, oslot;
  };
  std::vector<BEdge> bd;
  for (int t : cavity)
    for (int k = 0; k < 3; ++k) {
      int u = tris_[t].n[k];
      if (stamp_[u] == epoch_) continue;
      int a = tris_[t].v[(k + 1) % 3], b = tris_[t].v[(k + 2) % 3];
      int oslot = 0;
      while (tris_[u].n[oslot] != t) ++oslot;
      bd.push_back({a, b, u, oslot});
    }

  std::vector<int> fresh;
  fresh.reserve(bd.size());
  for (std::size_t i = 0; i < bd.size(); ++i) {
    int id;
    if (i < cavity.size()) {
      id = cavity[i];
    } else {
      id = int(tris_.size());
      tris_.push_back({});
      stamp_.push_back(0);
    }
    fresh.push_back(id);
  }
  for (std::size_t i = bd.size(); i < cavity.size(); ++i)
    tris_[cavity[i]].alive = false;

  std::unordered_map<int, std::pair<int, int>> by_start;  // vertex -> (tri, slot1)
  by_start.reserve(bd.size() * 2);
  for (std::size_t i = 0; i < bd.size(); ++i) {
    int id = fresh[i];
    Tri& t = tris_[id];
    t.alive = true;
    t.v = {bd[i].a, bd[i].b, pi};
    t.n = {-1, -1, bd[i].outside};
    tris_[bd[i].outside].n[bd[i].oslot] = id;
    by_start[bd[i].a] = {id, 1};
  }
  for (std::size_t i = 0; i < bd.size(); ++i) {
    int id = fresh[i];
    auto [nb, slot] = by_start.at(bd[i].b);
    tris_[id].n[0] = nb;   // edge (b, p)
    tris_[nb].n[1] = id;   // edge (p, b) seen from the next fan triangle
  }
  for (int id : fresh)
    if (tris_[id].v[0] != kGhost && tris_[id].v[1] != kGhost) {
      last_real_ = id;
      break;
    }
}

void Delaunay2::build_neighbor_lists() {
  nbr_.assign(pts_.size(), {});
  for (const Tri& t : tris_) {
    if (!t.alive) continue;
    for (int k = 0; k < 3; ++k) {
      int a = t.v[k], b = t.v[(k + 1) % 3];
      if (a == kGhost || b == kGhost) continue;
      nbr_[a].push_back(b);
      nbr_[b].push_back(a);
    }
  }
  for (auto& v : nbr_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

std::vector<std::array<int, 3>> Delaunay2::finite_triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const Tri& t : tris_) {
    if (!t.alive) continue;
    if (t.v[0] == kGhost || t.v[1] == kGhost || t.v[2] == kGhost) continue;
    std::array<int, 3> tr = {t.v[0], t.v[1], t.v[2]};
    std::sort(tr.begin(), tr.end());
    out.push_back(tr);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Delaunay2::validate() const {
  if (pts_.size() < 3) return;
  for (int t = 0; t < int(tris_.size()); ++t) {
    const Tri& T = tris_[t];
    if (!T.alive) continue;
    for (int k = 0; k < 3; ++k) {
      int u = T.n[k];
      if (u < 0 || u >= int(tris_.size()) || !tris_[u].alive)
        throw std::logic_error("validate: dangling neighbor");
      int back = 0;
      while (back < 3 && tris_[u].n[back] != t) ++back;
      if (back == 3) throw std::logic_error("validate: asymmetric adjacency");
      // shared edge must consist of the same two vertices
      int a = T.v[(k + 1) % 3], b = T.v[(k + 2) % 3];
      int a2 = tris_[u].v[(back + 1) % 3], b2 = tris_[u].v[(back + 2) % 3];
      if (!((a == b2 && b == a2)))
        throw std::logic_error("validate: edge mismatch");
    }
    bool ghost = T.v[0] == kGhost || T.v[1] == kGhost || T.v[2] == kGhost;
    if (!ghost &&
        orient2d_sos(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], T.v[0], T.v[1],
                     T.v[2]) <= 0)
      throw std::logic_error("validate: negative triangle");
  }
  // empty-circumcircle property, quadratic, test-sized inputs only
  for (const Tri& T : tris_) {
    if (!T.alive) continue;
    if (T.v[0] == kGhost || T.v[1] == kGhost || T.v[2] == kGhost) continue;
    for (int q = 0; q < int(pts_.size()); ++q) {
      if (q == T.v[0] || q == T.v[1] || q == T.v[2]) continue;
      if (incircle_sos(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], pts_[q],
                       T.v[0], T.v[1], T.v[2], q) > 0)
        throw std::logic_error("validate: circumcircle not empty");
    }
  }
}

}  // namespace pvlab
