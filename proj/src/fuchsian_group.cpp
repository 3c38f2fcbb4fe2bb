#include "hz/fuchsian_group.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hz/parallel.hpp"

namespace hz {

namespace {

// Translation along the real axis carrying the imaginary diameter onto the
// geodesic bounding the disc of half-width alpha around +1.
MoebiusMap disc_boundary_translation(double alpha) {
  const double x1 = (1.0 - std::sin(alpha)) / std::cos(alpha);
  return geodesic_flow(2.0 * std::atanh(x1));
}

bool outside_closed(const BoundaryArc& arc, double theta) {
  const double o = arc.offset(theta);
  return o > arc.width && o < kTwoPi;
}

bool arcs_disjoint(const BoundaryArc& x, const BoundaryArc& y) {
  return outside_closed(x, y.lo) && outside_closed(x, y.hi()) && outside_closed(y, x.lo);
}

}  // namespace

GroupPresentation::GroupPresentation(std::vector<std::string> labels, std::vector<MoebiusMap> matrices,
                                     std::vector<int> inverse, GroupKind kind,
                                     std::vector<SchottkyDisc> discs)
    : labels_(std::move(labels)),
      matrices_(std::move(matrices)),
      inverse_(std::move(inverse)),
      kind_(kind),
      discs_(std::move(discs)) {
  const std::size_t n = labels_.size();
  if (n == 0 || matrices_.size() != n || inverse_.size() != n)
    throw DomainError("GroupPresentation: labels, matrices and inverse table differ in size");
  for (std::size_t i = 0; i < n; ++i) {
    matrices_[i] = matrices_[i].to_disc();
    const int j = inverse_[i];
    if (j < 0 || static_cast<std::size_t>(j) >= n || inverse_[j] != static_cast<int>(i) || j == static_cast<int>(i))
      throw DomainError("GroupPresentation: inverse pairing of '" + labels_[i] + "' is not an involution");
    for (std::size_t k = 0; k < i; ++k)
      if (labels_[k] == labels_[i]) throw DomainError("GroupPresentation: duplicate label " + labels_[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(matrices_[i] * matrices_[inverse_[i]]).approx_equal(MoebiusMap::identity(), 1e-9))
      throw DomainError("GroupPresentation: matrix of '" + labels_[inverse_[i]] + "' is not the inverse of '" +
                        labels_[i] + "'");
    trace_length(matrices_[i]);
  }
  if (kind_ == GroupKind::schottky) {
    if (discs_.size() != n) throw DomainError("GroupPresentation: schottky kind needs one disc per letter");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(discs_[i].radius > 0.0) || discs_[i].radius >= 0.5 * std::numbers::pi)
        throw DomainError("GroupPresentation: disc radius of '" + labels_[i] + "' outside (0, pi/2)");
      for (std::size_t k = 0; k < i; ++k)
        if (!arcs_disjoint(discs_[i].arc(), discs_[k].arc()))
          throw DomainError("GroupPresentation: discs of '" + labels_[k] + "' and '" + labels_[i] + "' overlap");
    }
    // ping-pong: the generator carries the outside of its inverse disc onto its own disc
    for (std::size_t i = 0; i < n; ++i) {
      const SchottkyDisc& inv = discs_[inverse_[i]];
      const BoundaryArc outside{reduce_angle(inv.center + inv.radius), kTwoPi - 2.0 * inv.radius};
      const BoundaryArc image = arc_image(matrices_[i], outside);
      const BoundaryArc own = discs_[i].arc();
      const double dlo = std::abs(std::remainder(image.lo - own.lo, kTwoPi));
      if (dlo > 1e-9 || std::abs(image.width - own.width) > 1e-9)
        throw DomainError("GroupPresentation: generator '" + labels_[i] + "' fails the ping-pong condition");
    }
  }
}

GroupPresentation GroupPresentation::schottky(const std::vector<SchottkyPairing>& pairings) {
  std::vector<std::string> labels;
  std::vector<MoebiusMap> mats;
  std::vector<int> inv;
  std::vector<SchottkyDisc> discs;
  for (const auto& p : pairings) {
    const MoebiusMap g = rotation(p.disc.center) * disc_boundary_translation(p.disc.radius) *
                         rotation(std::numbers::pi) *
                         disc_boundary_translation(p.inverse_disc.radius).inverse() *
                         rotation(-p.inverse_disc.center);
    const int base = static_cast<int>(labels.size());
    labels.push_back(p.label);
    labels.push_back(p.inverse_label);
    mats.push_back(g);
    mats.push_back(g.inverse());
    inv.push_back(base + 1);
    inv.push_back(base);
    discs.push_back(p.disc);
    discs.push_back(p.inverse_disc);
  }
  return GroupPresentation(labels, mats, inv, GroupKind::schottky, discs);
}

GroupPresentation symmetric_schottky(double radius) {
  const double pi = std::numbers::pi;
  return GroupPresentation::schottky({{"a", "A", {0.0, radius}, {pi, radius}},
                                      {"b", "B", {0.5 * pi, radius}, {1.5 * pi, radius}}});
}

int GroupPresentation::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw DomainError("unknown generator label '" + label + "'");
  return static_cast<int>(it - labels_.begin());
}

std::optional<double> GroupPresentation::letter_displacement_bound(int depth) const {
  if (kind_ != GroupKind::schottky) return std::nullopt;
  const int n = static_cast<int>(size());
  // cylinder arcs [i0 ... i_{d-1}] = g_{i0} ... g_{i_{d-2}} (I(i_{d-1})); F = g_{i0}^{-1} there
  struct Cyl {
    int first;
    int last;
    MoebiusMap prefix;
  };
  std::vector<Cyl> cyl;
  for (int i = 0; i < n; ++i) cyl.push_back({i, i, MoebiusMap::identity()});
  for (int level = 1; level < depth; ++level) {
    std::vector<Cyl> next;
    for (const auto& c : cyl)
      for (int j = 0; j < n; ++j)
        if (j != inverse_[c.last]) next.push_back({c.first, j, c.prefix * matrices_[c.last]});
    cyl = std::move(next);
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cyl) {
    const BoundaryArc arc = arc_image(c.prefix, discs_[c.last].arc());
    best = std::min(best, min_log_derivative_on_arc(matrices_[c.first].inverse(), arc));
  }
  return best;
}

MoebiusMap word_matrix(const GroupPresentation& g, const Word& w) {
  MoebiusMap m = MoebiusMap::identity();
  for (int l : w) m = m * g.matrix(l);
  return m;
}

std::string word_string(const GroupPresentation& g, const Word& w) {
  std::string s;
  for (int l : w) s += g.label(l);
  return s;
}

bool is_cyclically_reduced(const GroupPresentation& g, const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t k = 0; k < n; ++k)
    if (w[(k + 1) % n] == g.inverse(w[k]) && n > 0) return false;
  return n > 0;
}

bool is_least_rotation(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const int x = w[(k + r) % n], y = w[k];
      if (x < y) return false;
      if (x > y) break;
    }
  }
  return true;
}

int primitive_period(const Word& w) {
  const int n = static_cast<int>(w.size());
  for (int p = 1; p < n; ++p) {
    if (n % p) continue;
    bool ok = true;
    for (int k = p; k < n && ok; ++k) ok = w[k] == w[k - p];
    if (ok) return p;
  }
  return n;
}

namespace {

ClosedGeodesic make_class(const GroupPresentation& g, const Word& w, const MoebiusMap& m) {
  ClosedGeodesic c;
  c.word = w;
  try {
    c.length = trace_length(m);
  } catch (const NotHyperbolicError& e) {
    throw NotHyperbolicError("word " + word_string(g, w) + " is " + e.classification +
                                 " (group must be torsion free)",
                             e.classification);
  }
  const int p = primitive_period(w);
  c.multiplicity = static_cast<int>(w.size()) / p;
  c.primitive_length = c.length / c.multiplicity;
  return c;
}

// Cyclically reduced least-rotation words of exactly length n starting with `first`.
void enumerate_from(const GroupPresentation& g, int n, int first, std::vector<ClosedGeodesic>& out) {
  const int k = static_cast<int>(g.size());
  Word w(n);
  std::vector<MoebiusMap> prefix(n + 1);
  prefix[0] = MoebiusMap::identity();
  w[0] = first;
  prefix[1] = g.matrix(first);
  std::vector<int> next(n, -1);
  int pos = 1;
  if (n == 1) {
    out.push_back(make_class(g, w, prefix[1]));
    return;
  }
  next[1] = first - 1;  // letters below the first cannot start a least rotation
  while (pos >= 1) {
    int& cand = next[pos];
    ++cand;
    while (cand < k && cand == g.inverse(w[pos - 1])) ++cand;
    if (cand >= k) {
      --pos;
      continue;
    }
    w[pos] = cand;
    prefix[pos + 1] = prefix[pos] * g.matrix(cand);
    if (pos + 1 == n) {
      if (cand != g.inverse(w[0]) && is_least_rotation(w)) out.push_back(make_class(g, w, prefix[n]));
      continue;
    }
    ++pos;
    next[pos] = first - 1;
  }
}

}  // namespace

std::vector<ClosedGeodesic> conjugacy_classes(const GroupPresentation& g, int max_word_len) {
  if (max_word_len < 1) throw DomainError("conjugacy_classes: max_word_len must be >= 1");
  const int k = static_cast<int>(g.size());
  std::vector<std::pair<int, int>> tasks;
  for (int n = 1; n <= max_word_len; ++n)
    for (int f = 0; f < k; ++f) tasks.emplace_back(n, f);
  std::vector<std::vector<ClosedGeodesic>> parts(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) { enumerate_from(g, tasks[t].first, tasks[t].second, parts[t]); });
  std::vector<ClosedGeodesic> all;
  for (auto& p : parts) {
    std::sort(p.begin(), p.end(), [](const auto& x, const auto& y) { return x.word < y.word; });
    all.insert(all.end(), p.begin(), p.end());
  }
  return all;
}

int spectrum_word_cutoff(const GroupPresentation& g, double L_max) {
  const auto delta0 = g.letter_displacement_bound();
  if (!delta0 || !(*delta0 > 0.0))
    throw DomainError("length_spectrum: presentation has no computable per-letter bound; give an explicit word-length cutoff");
  return static_cast<int>(std::ceil(L_max / *delta0)) + 2;
}

std::vector<SpectrumEntry> length_spectrum(const GroupPresentation& g, double L_max,
                                           std::optional<int> word_len_cutoff) {
  if (!(L_max > 0.0)) throw DomainError("length_spectrum: L_max must be positive");
  const int cutoff = word_len_cutoff ? *word_len_cutoff : spectrum_word_cutoff(g, L_max);
  auto classes = conjugacy_classes(g, cutoff);
  std::erase_if(classes, [&](const ClosedGeodesic& c) { return c.length > L_max; });
  std::stable_sort(classes.begin(), classes.end(),
                   [](const auto& x, const auto& y) { return x.length < y.length; });
  std::vector<SpectrumEntry> out;
  for (const auto& c : classes) {
    if (!out.empty() && c.length - out.back().length < 1e-9) {
      ++out.back().count;
      out.back().words.push_back(word_string(g, c.word));
    } else {
      out.push_back({c.length, 1, {word_string(g, c.word)}});
    }
  }
  for (auto& e : out) std::sort(e.words.begin(), e.words.end());
  return out;
}

}  // namespace hz
