#pragma once

// Episodic & compositional memory: a directed graph of clips whose edges
// carry an h-value (weight, >= 1) and a g-value (glow, in [0, 1]).
// Deliberation is a random walk from a percept clip to an action clip with
// hop probabilities proportional to h.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "psmeta/error.hpp"
#include "psmeta/random.hpp"

namespace psmeta {

struct ClipId {
  std::uint32_t index = 0;

  friend constexpr bool operator==(ClipId, ClipId) = default;
  friend constexpr auto operator<=>(ClipId, ClipId) = default;
};

using EdgeId = std::uint32_t;

enum class ClipKind : std::uint8_t { Percept, Action };

struct Clip {
  ClipId id;
  ClipKind kind;
  std::string label;
};

/// Value view of one edge.
struct Edge {
  ClipId from;
  ClipId to;
  double h;
  double g;
};

struct WalkTrace {
  std::vector<EdgeId> edges;
  ClipId action;
};

inline constexpr double kInitialH = 1.0;

/// Glow below this is snapped to zero by damp_glow. With h >= 1 an increment
/// g*lambda under half an ulp of 1.0 cannot change h, so for rewards below
/// 1e4 the snap never alters an h-value; it only keeps the active-glow set
/// short and avoids denormal arithmetic.
inline constexpr double kGlowFloor = 1e-20;

class ClipNetwork {
 public:
  ClipNetwork() = default;

  /// Adds a clip. Percept clips added here are also entered into the percept
  /// index; pass `indexed = false` for intermediate clips of deeper networks.
  ClipId add_clip(ClipKind kind, std::string label, bool indexed = true) {
    check_label(label);
    const ClipId id{static_cast<std::uint32_t>(clips_.size())};
    if (kind == ClipKind::Percept && indexed) {
      auto [it, inserted] = percept_index_.emplace(label, id);
      if (!inserted) throw StructuralError("duplicate percept label '" + label + "'");
    }
    clips_.push_back(Clip{id, kind, std::move(label)});
    out_.emplace_back();
    return id;
  }

  ClipId add_percept(std::string label) { return add_clip(ClipKind::Percept, std::move(label)); }
  ClipId add_action(std::string label) { return add_clip(ClipKind::Action, std::move(label)); }

  EdgeId add_edge(ClipId from, ClipId to, double h = kInitialH) {
    check_clip(from);
    check_clip(to);
    if (!(h >= 1.0)) throw StructuralError("initial h-value must be >= 1");
    const auto id = static_cast<EdgeId>(h_.size());
    from_.push_back(from);
    to_.push_back(to);
    h_.push_back(h);
    g_.push_back(0.0);
    out_[from.index].push_back(id);
    return id;
  }

  /// Percept clip connected to every listed action clip with fresh edges.
  ClipId add_percept_to(std::string label, std::span<const ClipId> actions) {
    const ClipId p = add_percept(std::move(label));
    for (ClipId a : actions) add_edge(p, a);
    return p;
  }

  /// Fresh two-layer network: every percept linked to every action with h = 1.
  static ClipNetwork two_layer(std::span<const std::string> percepts,
                               std::span<const std::string> actions) {
    ClipNetwork net;
    std::vector<ClipId> action_ids;
    action_ids.reserve(actions.size());
    for (const auto& a : actions) action_ids.push_back(net.add_action(a));
    for (const auto& p : percepts) net.add_percept_to(p, action_ids);
    net.validate();
    return net;
  }

  static ClipNetwork two_layer(std::initializer_list<std::string> percepts,
                               std::initializer_list<std::string> actions) {
    const std::vector<std::string> p(percepts), a(actions);
    return two_layer(std::span<const std::string>(p), std::span<const std::string>(a));
  }

  /// Every clip reachable from an indexed percept must be an action clip or
  /// have a directed path to one; percept clips must have outgoing edges.
  void validate() const {
    std::vector<std::vector<std::uint32_t>> reverse(clips_.size());
    for (std::size_t e = 0; e < h_.size(); ++e) reverse[to_[e].index].push_back(from_[e].index);

    std::vector<char> exits(clips_.size(), 0);
    std::vector<std::uint32_t> stack;
    for (const auto& c : clips_) {
      if (c.kind == ClipKind::Action) {
        exits[c.id.index] = 1;
        stack.push_back(c.id.index);
      }
    }
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto u : reverse[v]) {
        if (!exits[u]) {
          exits[u] = 1;
          stack.push_back(u);
        }
      }
    }

    std::vector<char> seen(clips_.size(), 0);
    for (const auto& [label, id] : percept_index_) {
      if (out_[id.index].empty()) throw StructuralError("percept clip '" + label + "' has no outgoing edges");
      seen[id.index] = 1;
      stack.push_back(id.index);
    }
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (!exits[v]) throw StructuralError("clip '" + clips_[v].label + "' cannot reach an action clip");
      for (auto e : out_[v]) {
        auto u = to_[e].index;
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
  }

  // --- inspection -------------------------------------------------------

  std::size_t clip_count() const noexcept { return clips_.size(); }
  std::size_t edge_count() const noexcept { return h_.size(); }
  const Clip& clip(ClipId id) const {
    check_clip(id);
    return clips_[id.index];
  }
  Edge edge(EdgeId e) const { return Edge{from_.at(e), to_.at(e), h_.at(e), g_.at(e)}; }
  double h(EdgeId e) const { return h_.at(e); }
  double g(EdgeId e) const { return g_.at(e); }
  ClipId source(EdgeId e) const { return from_.at(e); }
  ClipId target(EdgeId e) const { return to_.at(e); }
  std::span<const EdgeId> out_edges(ClipId id) const {
    check_clip(id);
    return out_[id.index];
  }
  std::span<const double> h_values() const noexcept { return h_; }
  std::span<const double> g_values() const noexcept { return g_; }
  /// Edges whose glow is currently non-zero.
  std::span<const EdgeId> glowing_edges() const {
    sync_glowing();
    return glowing_;
  }

  std::optional<ClipId> find_percept(std::string_view label) const {
    auto it = percept_index_.find(std::string(label));
    if (it == percept_index_.end()) return std::nullopt;
    return it->second;
  }

  ClipId percept(std::string_view label) const {
    if (auto id = find_percept(label)) return *id;
    throw LookupError("unknown percept '" + std::string(label) + "'");
  }

  void set_h(EdgeId e, double h) {
    if (!(h >= 1.0)) throw StructuralError("h-value must be >= 1");
    h_.at(e) = h;
  }

  void set_g(EdgeId e, double g) {
    if (!(g >= 0.0 && g <= 1.0)) throw StructuralError("g-value must lie in [0, 1]");
    const bool was = g_.at(e) > 0.0;
    sync_glowing();
    g_[e] = g;
    if (g > 0.0 && !was) {
      glowing_.push_back(e);
    } else if (g == 0.0 && was) {
      glowing_.erase(std::find(glowing_.begin(), glowing_.end(), e));
    }
  }

  // --- deliberation -----------------------------------------------------

  /// p(c_j | c_i) = h(c_i, c_j) / sum_k h(c_i, c_k), in out-edge order.
  std::vector<double> transition_probabilities(ClipId from) const {
    const auto outs = out_edges(from);
    if (outs.empty()) throw StructuralError("clip '" + clips_[from.index].label + "' has no outgoing edges");
    double total = 0.0;
    for (auto e : outs) total += h_[e];
    std::vector<double> p;
    p.reserve(outs.size());
    for (auto e : outs) p.push_back(h_[e] / total);
    return p;
  }

  /// Transition probabilities from a percept to the action clips it links to.
  std::vector<double> policy(std::string_view percept_label) const {
    return transition_probabilities(percept(percept_label));
  }

  /// Random walk from `start` until an action clip is hit. Writes into
  /// `trace` so callers in hot loops can reuse its storage.
  void walk(ClipId start, Rng& rng, WalkTrace& trace) const {
    trace.edges.clear();
    ClipId at = start;
    while (true) {
      const EdgeId e = sample_edge(at, rng);
      trace.edges.push_back(e);
      at = to_[e];
      if (clips_[at.index].kind == ClipKind::Action) break;
    }
    trace.action = at;
  }

  WalkTrace random_walk(ClipId start, Rng& rng) const {
    WalkTrace trace;
    walk(start, rng, trace);
    return trace;
  }

  WalkTrace random_walk(std::string_view percept_label, Rng& rng) const {
    return random_walk(percept(percept_label), rng);
  }

  // --- learning ---------------------------------------------------------

  /// Sets g = 1 on every traversed edge.
  void refresh_glow(const WalkTrace& trace) {
    for (auto e : trace.edges) {
      if (g_.at(e) == 0.0 && !glowing_stale_) glowing_.push_back(e);
      g_[e] = 1.0;
    }
  }

  /// h <- h - gamma (h - 1) + g lambda on every edge, then h <- max(h, 1).
  void update_h(double lambda, double gamma) {
    if (gamma == 0.0) {
      // Edges without glow are fixed points of the rule when gamma is zero.
      if (lambda == 0.0) return;
      sync_glowing();
      for (auto e : glowing_) {
        const double v = h_[e] + g_[e] * lambda;
        h_[e] = v < 1.0 ? 1.0 : v;
      }
      return;
    }
    double* h = h_.data();
    const double* g = g_.data();
    const std::size_t n = h_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = h[i] - gamma * (h[i] - 1.0) + g[i] * lambda;
      h[i] = v < 1.0 ? 1.0 : v;
    }
  }

  /// g <- g (1 - eta) on every edge.
  void damp_glow(double eta) {
    const double keep = 1.0 - eta;
    sync_glowing();
    std::size_t live = 0;
    for (std::size_t i = 0; i < glowing_.size(); ++i) {
      const EdgeId e = glowing_[i];
      const double v = g_[e] * keep;
      if (v < kGlowFloor) {
        g_[e] = 0.0;
      } else {
        g_[e] = v;
        glowing_[live++] = e;
      }
    }
    glowing_.resize(live);
  }

  /// update_h followed by damp_glow. With gamma > 0 every edge is touched
  /// anyway, so both run as one dense sweep and the glowing list is rebuilt
  /// only when something asks for it. Same values either way.
  void update_and_damp(double lambda, double gamma, double eta) {
    if (gamma == 0.0) {
      update_h(lambda, gamma);
      damp_glow(eta);
      return;
    }
    const double keep = 1.0 - eta;
    double* h = h_.data();
    double* g = g_.data();
    const std::size_t n = h_.size();
    if (lambda == 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        const double v = h[i] - gamma * (h[i] - 1.0);
        h[i] = v < 1.0 ? 1.0 : v;
        const double w = g[i] * keep;
        g[i] = w < kGlowFloor ? 0.0 : w;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double v = h[i] - gamma * (h[i] - 1.0) + g[i] * lambda;
        h[i] = v < 1.0 ? 1.0 : v;
        const double w = g[i] * keep;
        g[i] = w < kGlowFloor ? 0.0 : w;
      }
    }
    glowing_stale_ = true;
  }

 private:
  static void check_label(const std::string& label) {
    if (label.empty()) throw StructuralError("clip label must not be empty");
    for (char c : label) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        throw StructuralError("clip label '" + label + "' contains whitespace");
      }
    }
  }

  void check_clip(ClipId id) const {
    if (id.index >= clips_.size()) throw StructuralError("clip id out of range");
  }

  EdgeId sample_edge(ClipId from, Rng& rng) const {
    const auto& outs = out_[from.index];
    if (outs.empty()) throw StructuralError("clip '" + clips_[from.index].label + "' has no outgoing edges");
    double total = 0.0;
    for (auto e : outs) total += h_[e];
    double r = uniform01(rng) * total;
    for (auto e : outs) {
      r -= h_[e];
      if (r < 0.0) return e;
    }
    return outs.back();
  }

  std::vector<Clip> clips_;
  std::vector<std::vector<EdgeId>> out_;
  std::unordered_map<std::string, ClipId> percept_index_;

  // Edge attributes, structure-of-arrays so the per-interaction sweeps stay tight.
  std::vector<ClipId> from_;
  std::vector<ClipId> to_;
  std::vector<double> h_;
  std::vector<double> g_;
  mutable std::vector<EdgeId> glowing_;
  mutable bool glowing_stale_ = false;

  void sync_glowing() const {
    if (!glowing_stale_) return;
    glowing_.clear();
    for (std::size_t i = 0; i < g_.size(); ++i) {
      if (g_[i] != 0.0) glowing_.push_back(static_cast<EdgeId>(i));
    }
    glowing_stale_ = false;
  }
};

// --- snapshot text format ---------------------------------------------------
//
// One edge per line, `from_label to_label h g`, reals with 17 significant
// digits so a parse restores them exactly.

struct EdgeRecord {
  std::string from;
  std::string to;
  double h;
  double g;

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

inline std::string format_real(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, res.ptr);
}

inline std::string write_snapshot(const ClipNetwork& net) {
  std::string out;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const Edge edge = net.edge(e);
    out += net.clip(edge.from).label;
    out += ' ';
    out += net.clip(edge.to).label;
    out += ' ';
    out += format_real(edge.h, 17);
    out += ' ';
    out += format_real(edge.g, 17);
    out += '\n';
  }
  return out;
}

inline std::vector<EdgeRecord> parse_snapshot(std::string_view text) {
  std::vector<EdgeRecord> records;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    EdgeRecord r;
    std::string h, g, extra;
    if (!(fields >> r.from >> r.to >> h >> g) || (fields >> extra)) {
      throw StructuralError("snapshot line " + std::to_string(lineno) + ": expected 'from to h g'");
    }
    auto parse = [&](const std::string& s, double& out) {
      auto res = std::from_chars(s.data(), s.data() + s.size(), out);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw StructuralError("snapshot line " + std::to_string(lineno) + ": bad number '" + s + "'");
      }
    };
    parse(h, r.h);
    parse(g, r.g);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace psmeta
