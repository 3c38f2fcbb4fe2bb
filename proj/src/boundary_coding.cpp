#include "hz/boundary_coding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hz/parallel.hpp"
#include "json.hpp"

namespace hz {

namespace {

constexpr double kArcTol = 1e-9;

bool interiors_overlap(const BoundaryArc& x, const BoundaryArc& y) {
  return x.offset(y.lo) < x.width - kArcTol || y.offset(x.lo) < y.width - kArcTol;
}

// Both endpoints of `inner` lie in the closed arc `outer` (up to tolerance).
bool arc_contains(const BoundaryArc& outer, const BoundaryArc& inner) {
  const auto inside = [&](double theta) {
    const double o = outer.offset(theta);
    return o <= outer.width + kArcTol || o >= kTwoPi - kArcTol;
  };
  return inside(inner.lo) && inside(inner.hi()) && outer.contains(inner.center());
}

bool in_some_interior(const std::vector<CodingInterval>& iv, double theta) {
  for (const auto& c : iv) {
    const double o = c.arc.offset(theta);
    if (o > kArcTol && o < c.arc.width - kArcTol) return true;
  }
  return false;
}

bool near_endpoint(const std::vector<CodingInterval>& iv, double theta) {
  for (const auto& c : iv)
    if (c.arc.endpoint_distance(theta) < kArcTol) return true;
  return false;
}

std::string cycle_name(const MarkovPartition& p, const std::vector<int>& cycle) {
  std::string s;
  for (int c : cycle) s += (s.empty() ? "" : " ") + p.interval(c).label;
  return s;
}

std::vector<int> rotated(const std::vector<int>& c, std::size_t k) {
  std::vector<int> r(c.begin() + static_cast<long>(k), c.end());
  r.insert(r.end(), c.begin(), c.begin() + static_cast<long>(k));
  return r;
}

// All admissible cycles of length n, lexicographic.
std::vector<std::vector<int>> admissible_cycles(const MarkovPartition& p, int n) {
  std::vector<std::vector<int>> out;
  const int k = static_cast<int>(p.size());
  std::vector<int> cur;
  cur.reserve(n);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == n) {
      if (p.transition(cur.back(), cur.front())) out.push_back(cur);
      return;
    }
    for (int j = 0; j < k; ++j) {
      if (!cur.empty() && !p.transition(cur.back(), j)) continue;
      cur.push_back(j);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

Word letters(const MarkovPartition& p, const std::vector<int>& cycle) {
  Word w;
  for (int c : cycle) w.push_back(p.interval(c).branch_letter);
  return w;
}

}  // namespace

MarkovPartition::MarkovPartition(GroupPresentation group, std::vector<CodingInterval> intervals,
                                 std::vector<std::vector<int>> transition)
    : group_(std::move(group)), intervals_(std::move(intervals)), transition_(std::move(transition)) {
  const std::size_t n = intervals_.size();
  if (n == 0) throw CodingError("MarkovPartition: no intervals");
  if (transition_.size() != n) throw CodingError("MarkovPartition: transition matrix has wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = intervals_[i];
    if (transition_[i].size() != n) throw CodingError("MarkovPartition: transition matrix has wrong size");
    for (int t : transition_[i])
      if (t != 0 && t != 1) throw CodingError("MarkovPartition: transition entries must be 0 or 1");
    if (!(c.arc.width > 0.0) || c.arc.width >= kTwoPi)
      throw CodingError("MarkovPartition: interval '" + c.label + "' has invalid width");
    if (c.generator < 0 || c.generator >= static_cast<int>(group_.size()) ||
        c.branch_letter != group_.inverse(c.generator))
      throw CodingError("MarkovPartition: interval '" + c.label + "' has an inconsistent branch");
    for (std::size_t k = 0; k < i; ++k)
      if (interiors_overlap(c.arc, intervals_[k].arc))
        throw CodingError("MarkovPartition: intervals '" + intervals_[k].label + "' and '" + c.label + "' overlap");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = intervals_[i];
    const BoundaryArc image = arc_image(forward(static_cast<int>(i)), c.arc);
    for (double e : {image.lo, image.hi()}) {
      if (in_some_interior(intervals_, e) && !near_endpoint(intervals_, e))
        throw CodingError("MarkovPartition: F does not send the endpoints of '" + c.label + "' to endpoints");
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto& target = intervals_[j].arc;
      const bool covers = arc_contains(image, target);
      if (covers != static_cast<bool>(transition_[i][j]) || (!covers && interiors_overlap(image, target)))
        throw CodingError("MarkovPartition: transition " + c.label + " -> " + intervals_[j].label +
                          " disagrees with F");
      if (covers && !arc_contains(c.arc, arc_image(branch(static_cast<int>(i)), target)))
        throw CodingError("MarkovPartition: inverse branch of '" + c.label + "' leaves its interval");
    }
  }
  // contraction of inverse branches, possibly only for an iterate
  struct Chain {
    MoebiusMap map;
    int last;
  };
  std::vector<Chain> chains;
  for (std::size_t i = 0; i < n; ++i) chains.push_back({branch(static_cast<int>(i)), static_cast<int>(i)});
  for (int it = 1; it <= 4; ++it) {
    double worst = -1e300;
    for (const auto& ch : chains)
      for (std::size_t j = 0; j < n; ++j)
        if (transition_[ch.last][j]) worst = std::max(worst, max_log_derivative_on_arc(ch.map, intervals_[j].arc));
    if (worst < 0.0) {
      contraction_ = std::exp(worst);
      contraction_iterate_ = it;
      return;
    }
    std::vector<Chain> next;
    for (const auto& ch : chains)
      for (std::size_t j = 0; j < n; ++j)
        if (transition_[ch.last][j]) next.push_back({ch.map * branch(static_cast<int>(j)), static_cast<int>(j)});
    chains = std::move(next);
  }
  throw CodingError("MarkovPartition: inverse branches are not contracting up to the fourth iterate");
}

int MarkovPartition::locate(double theta, double guard) const {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& arc = intervals_[i].arc;
    if (arc.endpoint_distance(theta) < guard)
      throw CodingError("point at an endpoint of interval '" + intervals_[i].label + "' is coded ambiguously");
    if (arc.contains(theta)) return static_cast<int>(i);
  }
  return -1;
}

double MarkovPartition::min_separation() const {
  double best = kTwoPi;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const auto& x = intervals_[i].arc;
      const auto& y = intervals_[j].arc;
      best = std::min({best, reduce_angle(y.lo - x.hi()), reduce_angle(x.lo - y.hi())});
    }
  return best;
}

MarkovPartition schottky_partition(const GroupPresentation& g) {
  if (g.kind() != GroupKind::schottky) throw DomainError("schottky_partition: group has no disc data");
  const int n = static_cast<int>(g.size());
  std::vector<CodingInterval> iv;
  std::vector<std::vector<int>> t(n, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) {
    iv.push_back({g.label(i), g.discs()[i].arc(), g.inverse(i), i});
    for (int j = 0; j < n; ++j) t[i][j] = j != g.inverse(i);
  }
  return MarkovPartition(g, std::move(iv), std::move(t));
}

MarkovPartition refine(const MarkovPartition& p) {
  const int n = static_cast<int>(p.size());
  std::vector<CodingInterval> iv;
  std::vector<std::pair<int, int>> parent;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!p.transition(i, j)) continue;
      const auto& c = p.interval(i);
      iv.push_back({c.label + p.interval(j).label, arc_image(p.branch(i), p.interval(j).arc), c.generator,
                    c.branch_letter});
      parent.emplace_back(i, j);
    }
  const std::size_t m = iv.size();
  std::vector<std::vector<int>> t(m, std::vector<int>(m, 0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) t[a][b] = parent[a].second == parent[b].first;
  return MarkovPartition(p.group(), std::move(iv), std::move(t));
}

long long transition_trace(const MarkovPartition& p, int n) {
  const std::size_t k = p.size();
  std::vector<std::vector<long long>> acc(k, std::vector<long long>(k, 0));
  for (std::size_t i = 0; i < k; ++i) acc[i][i] = 1;
  for (int step = 0; step < n; ++step) {
    std::vector<std::vector<long long>> next(k, std::vector<long long>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l)
        if (acc[i][l])
          for (std::size_t j = 0; j < k; ++j) next[i][j] += acc[i][l] * p.transition(static_cast<int>(l), static_cast<int>(j));
    acc = std::move(next);
  }
  long long tr = 0;
  for (std::size_t i = 0; i < k; ++i) tr += acc[i][i];
  return tr;
}

double cycle_fixed_point(const MarkovPartition& p, const std::vector<int>& cycle) {
  MoebiusMap m = MoebiusMap::identity();
  for (int c : cycle) m = m * p.branch(c);
  cplx x = std::polar(1.0, p.interval(cycle.front()).arc.center());
  for (int it = 0; it < 200; ++it) {
    cplx y = m(x);
    y /= std::abs(y);
    if (std::abs(y - x) < 1e-15 && it > 0) return reduce_angle(std::arg(y));
    x = y;
  }
  throw ConvergenceError("periodic orbit '" + cycle_name(p, cycle) + "' did not converge in 200 iterations");
}

std::vector<PeriodicOrbit> periodic_orbits(const MarkovPartition& p, int n) {
  if (n < 1) throw DomainError("periodic_orbits: period must be >= 1");
  const auto cycles = admissible_cycles(p, n);
  std::vector<PeriodicOrbit> out(cycles.size());
  parallel_for(cycles.size(), [&](std::size_t k) {
    PeriodicOrbit& o = out[k];
    o.cycle = cycles[k];
    o.point = BoundaryPoint(cycle_fixed_point(p, o.cycle));
    o.log_derivative_sum = p.log_derivative(o.cycle[0], o.point.theta());
    for (int r = 1; r < n; ++r)
      o.log_derivative_sum += p.log_derivative(o.cycle[r], cycle_fixed_point(p, rotated(o.cycle, r)));
    o.word = letters(p, o.cycle);
    o.length = trace_length(word_matrix(p.group(), o.word));
  });
  return out;
}

std::vector<OrbitClass> orbit_classes(const MarkovPartition& p, int max_period) {
  std::vector<std::vector<int>> reps;
  for (int n = 1; n <= max_period; ++n)
    for (auto& c : admissible_cycles(p, n))
      if (is_least_rotation(c)) reps.push_back(std::move(c));
  std::vector<OrbitClass> out(reps.size());
  parallel_for(reps.size(), [&](std::size_t k) {
    OrbitClass& o = out[k];
    o.cycle = reps[k];
    o.word = letters(p, o.cycle);
    const int per = primitive_period(o.cycle);
    o.multiplicity = static_cast<int>(o.cycle.size()) / per;
    const std::vector<int> prim(o.cycle.begin(), o.cycle.begin() + per);
    for (int r = 0; r < per; ++r) {
      const double x = cycle_fixed_point(p, rotated(prim, r));
      o.points.push_back(x);
      o.primitive_length += p.log_derivative(prim[r], x);
    }
    o.length = o.multiplicity * o.primitive_length;
  });
  return out;
}

double return_time(const MarkovPartition& p, const BoundaryPoint& y) {
  const int i = p.locate(y.theta());
  if (i < 0) throw CodingError("return_time: point lies outside the coded intervals");
  return p.log_derivative(i, y.theta());
}

std::string coding_table_json(const MarkovPartition& p) {
  nlohmann::json j;
  j["intervals"] = nlohmann::json::array();
  for (const auto& c : p.intervals())
    j["intervals"].push_back({{"label", c.label},
                              {"lo", c.arc.lo},
                              {"hi", reduce_angle(c.arc.hi())},
                              {"forward", p.group().label(c.generator)}});
  j["transition"] = p.transition_matrix();
  return j.dump(2);
}

MarkovPartition load_coding_table(const std::string& text, const GroupPresentation& g) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  if (!j.contains("intervals") || !j["intervals"].is_array() || j["intervals"].empty())
    throw SchemaError("intervals", "expected a non-empty array");
  std::vector<CodingInterval> iv;
  const auto& arr = j["intervals"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "intervals[" + std::to_string(i) + "]";
    const auto& e = arr[i];
    if (!e.is_object()) throw SchemaError(path, "expected an object");
    if (!e.contains("label") || !e["label"].is_string()) throw SchemaError(path + ".label", "expected a string");
    for (const char* key : {"lo", "hi"})
      if (!e.contains(key) || !e[key].is_number()) throw SchemaError(path + "." + key, "expected a number");
    if (!e.contains("forward") || !e["forward"].is_string())
      throw SchemaError(path + ".forward", "expected a generator label");
    int gen = 0;
    try {
      gen = g.index_of(e["forward"].get<std::string>());
    } catch (const DomainError& err) {
      throw SchemaError(path + ".forward", err.what());
    }
    const double lo = e["lo"].get<double>(), hi = e["hi"].get<double>();
    iv.push_back({e["label"].get<std::string>(), {reduce_angle(lo), reduce_angle(hi - lo)}, gen, g.inverse(gen)});
  }
  const std::size_t n = iv.size();
  if (!j.contains("transition") || !j["transition"].is_array() || j["transition"].size() != n)
    throw SchemaError("transition", "expected a " + std::to_string(n) + "x" + std::to_string(n) + " array");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = j["transition"][i];
    if (!row.is_array() || row.size() != n)
      throw SchemaError("transition[" + std::to_string(i) + "]", "expected " + std::to_string(n) + " entries");
    for (std::size_t k = 0; k < n; ++k) {
      if (!row[k].is_number_integer() || (row[k] != 0 && row[k] != 1))
        throw SchemaError("transition[" + std::to_string(i) + "][" + std::to_string(k) + "]", "expected 0 or 1");
      t[i][k] = row[k].get<int>();
    }
  }
  return MarkovPartition(g, std::move(iv), std::move(t));
}

}  // namespace hz
