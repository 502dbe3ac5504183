// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "pvlab/delaunay.hpp"
#include "pvlab/exact.hpp"

namespace pvlab {

using geom::insphere_sos;
using geom::orient3d_sos;

namespace {

std::uint64_t morton3(Vec3 p, Vec3 lo, Vec3 hi) {
  auto q = [](double t) {
    long v = std::lround(t * 2097151.0);  // 21 bits
    return std::uint64_t(std::clamp(v, 0L, 2097151L));
  };
  std::uint64_t x = q((p.x - lo.x) / (hi.x - lo.x + 1e-300));
  std::uint64_t y = q((p.y - lo.y) / (hi.y - lo.y + 1e-300));
  std::uint64_t z = q((p.z - lo.z) / (hi.z - lo.z + 1e-300));
  std::uint64_t key = 0;
  for (int b = 0; b < 21; ++b) {
    key |= ((x >> b) & 1) << (3 * b);
    key |= ((y >> b) & 1) << (3 * b + 1);
    key |= ((z >> b) & 1) << (3 * b + 2);
  }
  return key;
}

struct FaceKey {
  int a, b, c;  // sorted
  bool operator==(const FaceKey&) const = default;
};
struct FaceKeyHash {
  std::size_t operator()(const FaceKey& f) const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (long long v : {f.a, f.b, f.c}) {
      h ^= std::uint64_t(v + 2);
      h *= 0x100000001B3ULL;
    }
    return std::size_t(h);
  }
};
FaceKey face_key(int a, int b, int c) {
  if (a > b) std::swap(a, b);
  if (b > c) std::swap(b, c);
  if (a > b) std::swap(a, b);
  return {a, b, c};
}

struct EdgeKey {
  int a, b;
  bool operator==(const EdgeKey&) const = default;
};
struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const {
    return std::size_t((std::uint64_t(std::uint32_t(e.a + 2)) << 32) ^
                       std::uint32_t(e.b + 2)) *
           0x9E3779B97F4A7C15ULL;
  }
};

struct TripleHash {
  std::size_t operator()(const std::array<long long, 3>& t) const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (long long v : t) {
      h ^= std::uint64_t(v);
      h *= 0x100000001B3ULL;
    }
    return std::size_t(h);
  }
};

}  // namespace

Delaunay3::Delaunay3(std::span<const Vec3> pts) : pts_(pts.begin(), pts.end()) {
  const int n = int(pts_.size());
  {
    std::unordered_map<std::array<long long, 3>, int, TripleHash> seen;
    seen.reserve(pts_.size());
    for (int i = 0; i < n; ++i) {
      std::array<long long, 3> k;
      std::memcpy(&k[0], &pts_[i].x, 8);
      std::memcpy(&k[1], &pts_[i].y, 8);
      std::memcpy(&k[2], &pts_[i].z, 8);
      if (!seen.emplace(k, i).second)
        throw std::invalid_argument("Delaunay3: duplicate point");
    }
  }
  if (n < 4) return;

  Vec3 lo = pts_[0], hi = pts_[0];
  for (Vec3 p : pts_) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return morton3(pts_[a], lo, hi) < morton3(pts_[b], lo, hi);
  });

  {
    int a = order[0], b = order[1], c = order[2], d = order[3];
    if (orient3d_sos(pts_[a], pts_[b], pts_[c], pts_[d], a, b, c, d) < 0)
      std::swap(c, d);
    tets_.resize(5);
    // ghost across the face opposite slot k: remaining vertices in slot
    // order, last two swapped when k is odd (replace-ghost determinant
    // convention)
    tets_[0] = {{a, b, c, d}, {1, 2, 3, 4}, true};
    tets_[1] = {{b, c, d, kGhost}, {0, 0, 0, 0}, true};  // opp slot 0
    tets_[2] = {{a, d, c, kGhost}, {0, 0, 0, 0}, true};  // opp slot 1
    tets_[3] = {{a, b, d, kGhost}, {0, 0, 0, 0}, true};  // opp slot 2
    tets_[4] = {{a, c, b, kGhost}, {0, 0, 0, 0}, true};  // opp slot 3
    // wire by shared faces
    std::unordered_map<FaceKey, std::pair<int, int>, FaceKeyHash> open;
    for (int t = 0; t < 5; ++t)
      for (int k = 0; k < 4; ++k) {
        const auto& v = tets_[t].v;
        FaceKey fk = face_key(v[(k + 1) % 4], v[(k + 2) % 4], v[(k + 3) % 4]);
        auto it = open.find(fk);
        if (it == open.end()) {
          open.emplace(fk, std::make_pair(t, k));
        } else {
          tets_[t].n[k] = it->second.first;
          tets_[it->second.first].n[it->second.second] = t;
          open.erase(it);
        }
      }
    if (!open.empty()) throw std::logic_error("Delaunay3: bad bootstrap");
    last_real_ = 0;
  }
  stamp_.assign(tets_.size(), 0);
  for (int k = 4; k < n; ++k) insert(order[k]);
  build_neighbor_lists();
}

bool Delaunay3::conflicts(int t, Vec3 p, int pi) const {
  const Tet& T = tets_[t];
  int g = -1;
  for (int k = 0; k < 4; ++k)
    if (T.v[k] == kGhost) g = k;
  if (g < 0)
    return insphere_sos(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]],
                        pts_[T.v[3]], p, T.v[0], T.v[1], T.v[2], T.v[3],
                        pi) > 0;
  int r[3], m = 0;
  for (int k = 0; k < 4; ++k)
    if (k != g) r[m++] = T.v[k];
  int s = orient3d_sos(pts_[r[0]], pts_[r[1]], pts_[r[2]], p, r[0], r[1],
                       r[2], pi);
  return ((3 - g) % 2 == 0 ? s : -s) > 0;
}

int Delaunay3::locate_conflict(Vec3 p, int pi) const {
  int cur = last_real_;
  std::size_t steps = 0, cap = 40 * (tets_.size() + 2);
  int prev = -1;
  while (steps++ < cap) {
    const Tet& T = tets_[cur];
    int g = -1;
    for (int k = 0; k < 4; ++k)
      if (T.v[k] == kGhost) g = k;
    if (g >= 0) {
      if (conflicts(cur, p, pi)) return cur;
      int nxt = T.n[g];
      if (nxt == prev) nxt = T.n[(g + 1) % 4];
      prev = cur;
      cur = nxt;
      continue;
    }
    int pos[4], npos = 0;
    for (int k = 0; k < 4; ++k) {
      // outward-directed face opposite slot k
      int r[3], m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != k) r[m++] = T.v[j];
      if ((3 - k) % 2 == 1) std::swap(r[1], r[2]);
      if (orient3d_sos(pts_[r[0]], pts_[r[1]], pts_[r[2]], p, r[0], r[1],
                       r[2], pi) < 0)
        pos[npos++] = k;
    }
    if (npos == 0) return cur;
    int pick = pos[0];
    if (npos > 1) {
      walk_state_ = walk_state_ * 6364136223846793005ULL + 1442695040888963407ULL;
      pick = pos[(walk_state_ >> 33) % npos];
    }
    if (T.n[pick] == prev && npos > 1)
      pick = (pick == pos[0]) ? pos[1] : pos[0];
    prev = cur;
    cur = T.n[pick];
  }
  for (int t = 0; t < int(tets_.size()); ++t)
    if (tets_[t].alive && conflicts(t, p, pi)) return t;
  throw std::logic_error("Delaunay3: point location failed");
}

void Delaunay3::insert(int pi) {
  const Vec3 p = pts_[pi];
  int seed = locate_conflict(p, pi);

  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  stamp_.resize(tets_.size(), 0);
  std::vector<int> cavity, stack{seed};
  stamp_[seed] = epoch_;
  while (!stack.empty()) {
    int t = stack.back();
    stack.pop_back();
    cavity.push_back(t);
    for (int k = 0; k < 4; ++k) {
      int u = tets_[t].n[k];
      if (stamp_[u] == epoch_) continue;
      if (conflicts(u, p, pi)) {
        stamp_[u] = epoch_;
        stack.push_back(u);
      }
    }
  }

  struct BFace {
    int r0, r1, r2, outside, oslot;
  };
  std::vector<BFace> bd;
  for (int t : cavity)
    for (int k = 0; k < 4; ++k) {
      int u = tets_[t].n[k];
      if (stamp_[u] == epoch_) continue;
      const auto& v = tets_[t].v;
      int r[3], m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != k) r[m++] = v[j];
      if ((3 - k) % 2 == 1) std::swap(r[0], r[1]);
      int oslot = 0;
      while (tets_[u].n[oslot] != t) ++oslot;
      bd.push_back({r[0], r[1], r[2], u, oslot});
    }

  std::vector<int> fresh;
  fresh.reserve(bd.size());
  for (std::size_t i = 0; i < bd.size(); ++i) {
    int id;
    if (i < cavity.size()) {
      id = cavity[i];
    } else {
      id = int(tets_.size());
      tets_.push_back({});
      stamp_.push_back(0);
    }
    fresh.push_back(id);
  }
  for (std::size_t i = bd.size(); i < cavity.size(); ++i)
    tets_[cavity[i]].alive = false;

  std::unordered_map<EdgeKey, std::pair<int, int>, EdgeKeyHash> open;
  open.reserve(bd.size() * 3);
  for (std::size_t i = 0; i < bd.size(); ++i) {
    int id = fresh[i];
    Tet& t = tets_[id];
    t.alive = true;
    t.v = {bd[i].r0, bd[i].r1, bd[i].r2, pi};
    t.n = {-1, -1, -1, bd[i].outside};
    tets_[bd[i].outside].n[bd[i].oslot] = id;
    // side faces contain p; pair them via the shared cavity-surface edge
    const int ev[3][2] = {{bd[i].r1, bd[i].r2},   // face opp slot 0
                          {bd[i].r2, bd[i].r0},   // face opp slot 1
                          {bd[i].r0, bd[i].r1}};  // face opp slot 2
    for (int k = 0; k < 3; ++k) {
      int a = ev[k][0], b = ev[k][1];
      EdgeKey key = a < b ? EdgeKey{a, b} : EdgeKey{b, a};
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, std::make_pair(id, k));
      } else {
        tets_[id].n[k] = it->second.first;
        tets_[it->second.first].n[it->second.second] = id;
        open.erase(it);
      }
    }
  }
  if (!open.empty()) throw std::logic_error("Delaunay3: open cavity surface");

  for (int id : fresh) {
    const auto& v = tets_[id].v;
    if (v[0] != kGhost && v[1] != kGhost && v[2] != kGhost) {
      last_real_ = id;
      break;
    }
  }
}

void Delaunay3::build_neighbor_lists() {
  nbr_.assign(pts_.size(), {});
  for (const Tet& t : tets_) {
    if (!t.alive) continue;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        if (t.v[i] == kGhost || t.v[j] == kGhost) continue;
        nbr_[t.v[i]].push_back(t.v[j]);
        nbr_[t.v[j]].push_back(t.v[i]);
      }
  }
  for (auto& v : nbr_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
}

std::vector<std::array<int, 4>> Delaunay3::finite_tets() const {
  std::vector<std::array<int, 4>> out;
  for (const Tet& t : tets_) {
    if (!t.alive) continue;
    bool ghost = false;
    for (int v : t.v) ghost |= v == kGhost;
    if (ghost) continue;
    std::array<int, 4> q = t.v;
    std::sort(q.begin(), q.end());
    out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::array<int, 3>> Delaunay3::finite_triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const Tet& t : tets_) {
    if (!t.alive) continue;
    for (int k = 0; k < 4; ++k) {
      std::array<int, 3> f;
      int m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != k) f[m++] = t.v[j];
      if (f[0] == kGhost || f[1] == kGhost || f[2] == kGhost) continue;
      std::sort(f.begin(), f.end());
      out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Delaunay3::validate() const {
  if (pts_.size() < 4) return;
  for (int t = 0; t < int(tets_.size()); ++t) {
    const Tet& T = tets_[t];
    if (!T.alive) continue;
    for (int k = 0; k < 4; ++k) {
      int u = T.n[k];
      if (u < 0 || u >= int(tets_.size()) || !tets_[u].alive)
        throw std::logic_error("validate3: dangling neighbor");
      int back = 0;
      while (back < 4 && tets_[u].n[back] != t) ++back;
      if (back == 4) throw std::logic_error("validate3: asymmetric adjacency");
      std::array<int, 3> f1, f2;
      int m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != k) f1[m++] = T.v[j];
      m = 0;
      for (int j = 0; j < 4; ++j)
        if (j != back) f2[m++] = tets_[u].v[j];
      std::sort(f1.begin(), f1.end());
      std::sort(f2.begin(), f2.end());
      if (f1 != f2) throw std::logic_error("validate3: face mismatch");
    }
    bool ghost = false;
    for (int v : T.v) ghost |= v == kGhost;
    if (!ghost &&
        orient3d_sos(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]], pts_[T.v[3]],
                     T.v[0], T.v[1], T.v[2], T.v[3]) <= 0)
      throw std::logic_error("validate3: negative tet");
  }
  for (const Tet& T : tets_) {
    if (!T.alive) continue;
    bool ghost = false;
    for (int v : T.v) ghost |= v == kGhost;
    if (ghost) continue;
    for (int q = 0; q < int(pts_.size()); ++q) {
      if (q == T.v[0] || q == T.v[1] || q == T.v[2] || q == T.v[3]) continue;
      if (insphere_sos(pts_[T.v[0]], pts_[T.v[1]], pts_[T.v[2]],
                       pts_[T.v[3]], pts_[q], T.v[0], T.v[1], T.v[2], T.v[3],
                       q) > 0)
        throw std::logic_error("validate3: circumsphere not empty");
    }
  }
}

}  // namespace pvlab
