#pragma once

// Independent reference implementations used to check the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "aamcm/network.hpp"
#include "aamcm/rng.hpp"

namespace oracle {

using aamcm::geo::EnuPoint;
using aamcm::hazards::HazardRegion;

struct ToyGraph {
  std::vector<EnuPoint> pos;  // index = vertex
  std::vector<int> ids;
  std::vector<bool> is_vertiport;
  std::vector<std::pair<int, int>> edges;  // vertex indices
  std::vector<HazardRegion> hazards;
};

inline double field(const HazardRegion& h, const EnuPoint& p) {
  const double r2 = (p.x - h.center.x) * (p.x - h.center.x) + (p.y - h.center.y) * (p.y - h.center.y);
  return std::exp(-r2 / (2.0 * h.sigma * h.sigma));
}

inline double polyline_risk(const std::vector<EnuPoint>& pts, const std::vector<HazardRegion>& hz) {
  double worst = 0.0;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    const auto& a = pts[s];
    const auto& b = pts[s + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int n = std::max(1, static_cast<int>(std::ceil(len / 100.0)));
    for (int i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      const EnuPoint p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), 0.0};
      for (const auto& h : hz) worst = std::max(worst, field(h, p));
    }
  }
  return worst;
}

struct Enumerated {
  double length = std::numeric_limits<double>::infinity();
  std::vector<int> path;  // vertex indices
};

/// Every simple path from `src` to vertiport `dst` whose interior avoids
/// vertiports; keeps the shortest.
inline Enumerated shortest_by_enumeration(const ToyGraph& g, int src, int dst) {
  const int n = static_cast<int>(g.pos.size());
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  Enumerated best;
  std::vector<int> path{src};
  std::vector<bool> used(n, false);
  used[src] = true;
  std::function<void(int, double)> dfs = [&](int v, double len) {
    if (v == dst) {
      if (len < best.length) {
        best.length = len;
        best.path = path;
      }
      return;
    }
    if (v != src && g.is_vertiport[v]) return;
    for (int w : adj[v]) {
      if (used[w]) continue;
      used[w] = true;
      path.push_back(w);
      dfs(w, len + std::hypot(g.pos[w].x - g.pos[v].x, g.pos[w].y - g.pos[v].y));
      path.pop_back();
      used[w] = false;
    }
  };
  dfs(src, 0.0);
  return best;
}

/// Random graph with at most `max_vertices` vertices (2-4 vertiports) and up
/// to three hazards centered on random vertices or points.
inline ToyGraph random_graph(aamcm::Rng& rng, int max_vertices = 12) {
  ToyGraph g;
  const int n_vp = 2 + static_cast<int>(rng.uniform_index(3));
  const int n_nodes = 3 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(max_vertices - n_vp - 2)));
  for (int i = 0; i < n_vp + n_nodes; ++i) {
    g.pos.push_back({rng.uniform(-4000.0, 4000.0), rng.uniform(-4000.0, 4000.0), 0.0});
    g.is_vertiport.push_back(i < n_vp);
    g.ids.push_back(i < n_vp ? 1 + i : 100 + i);
  }
  const double p = rng.uniform(0.25, 0.7);
  for (int a = n_vp; a < n_vp + n_nodes; ++a) {
    for (int b = a + 1; b < n_vp + n_nodes; ++b) {
      if (rng.bernoulli(p)) g.edges.emplace_back(a, b);
    }
  }
  for (int v = 0; v < n_vp; ++v) {
    const int k = 1 + static_cast<int>(rng.uniform_index(2));
    std::vector<int> picked;
    while (static_cast<int>(picked.size()) < k) {
      const int nd = n_vp + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_nodes)));
      if (std::find(picked.begin(), picked.end(), nd) == picked.end()) picked.push_back(nd);
    }
    for (int nd : picked) g.edges.emplace_back(v, nd);
  }
  const int n_hz = static_cast<int>(rng.uniform_index(4));
  for (int i = 0; i < n_hz; ++i) {
    EnuPoint c;
    if (rng.bernoulli(0.5)) {
      c = g.pos[rng.uniform_index(g.pos.size())];
    } else {
      c = {rng.uniform(-4000.0, 4000.0), rng.uniform(-4000.0, 4000.0), 0.0};
    }
    g.hazards.push_back({c, rng.uniform(150.0, 600.0), aamcm::hazards::HazardKind::LossOfControl});
  }
  return g;
}

/// Builds the library network for a toy graph (geodetic positions chosen so
/// the network's own projection maps them back to the toy coordinates).
inline aamcm::network::CorridorNetwork to_network(ToyGraph& g) {
  const aamcm::geo::Projection proj(aamcm::geo::GeoPoint{35.0, -85.0, 0.0});
  std::vector<aamcm::network::Vertiport> vps;
  std::vector<aamcm::network::NetworkNode> nodes;
  for (std::size_t i = 0; i < g.pos.size(); ++i) {
    const auto geo = aamcm::geo::to_geo(g.pos[i], proj);
    if (g.is_vertiport[i]) {
      vps.push_back({g.ids[i], geo, "V" + std::to_string(g.ids[i])});
    } else {
      nodes.push_back({g.ids[i], geo});
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (auto [a, b] : g.edges) edges.emplace_back(g.ids[a], g.ids[b]);
  aamcm::network::CorridorNetwork net(vps, nodes, edges, aamcm::network::default_lanes_ft());
  // Re-express toy geometry in the network's frame so both sides agree.
  for (std::size_t i = 0; i < g.pos.size(); ++i) g.pos[i] = net.position(g.ids[i]);
  for (auto& h : g.hazards) {
    h.center = aamcm::geo::to_enu(aamcm::geo::to_geo(h.center, proj), net.projection());
  }
  return net;
}

}  // namespace oracle
