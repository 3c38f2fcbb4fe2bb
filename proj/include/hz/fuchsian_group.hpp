#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hz/hyperbolic_core.hpp"

namespace hz {

enum class GroupKind { schottky, cocompact_with_coding };

/// Boundary arc cut by a ping-pong disc: center angle and angular half-width.
struct SchottkyDisc {
  double center = 0.0;
  double radius = 0.0;
  BoundaryArc arc() const { return {reduce_angle(center - radius), 2.0 * radius}; }
};

/// One generator/inverse pair of a Schottky group given by its discs.
struct SchottkyPairing {
  std::string label;
  std::string inverse_label;
  SchottkyDisc disc;
  SchottkyDisc inverse_disc;
};

/**
 * Generators indexed by letter. Every letter has a formal inverse letter.
 * Letter order fixes the lexicographic order used for canonical words.
 */
class GroupPresentation {
 public:
  GroupPresentation(std::vector<std::string> labels, std::vector<MoebiusMap> matrices,
                    std::vector<int> inverse, GroupKind kind,
                    std::vector<SchottkyDisc> discs = {});

  /// Letters ordered label, inverse_label per pairing; generator maps the outside of
  /// the inverse disc onto its own disc.
  static GroupPresentation schottky(const std::vector<SchottkyPairing>& pairings);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(int i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  const MoebiusMap& matrix(int i) const { return matrices_.at(i); }
  int inverse(int i) const { return inverse_.at(i); }
  GroupKind kind() const { return kind_; }
  const std::vector<SchottkyDisc>& discs() const { return discs_; }
  int index_of(const std::string& label) const;

  /// Lower bound on L_gamma / word length (Schottky only): minimum of log|F'|
  /// over the depth-`depth` cylinder arcs, which contain every periodic point.
  std::optional<double> letter_displacement_bound(int depth = 4) const;

 private:
  std::vector<std::string> labels_;
  std::vector<MoebiusMap> matrices_;
  std::vector<int> inverse_;
  GroupKind kind_;
  std::vector<SchottkyDisc> discs_;
};

/// Rank-2 group with equal discs of half-width `radius` at 0 (a), pi (A), pi/2 (b), 3pi/2 (B).
GroupPresentation symmetric_schottky(double radius);

using Word = std::vector<int>;

struct ClosedGeodesic {
  Word word;  // canonical: least cyclic rotation
  double length = 0.0;
  double primitive_length = 0.0;
  int multiplicity = 1;
};

MoebiusMap word_matrix(const GroupPresentation& g, const Word& w);
std::string word_string(const GroupPresentation& g, const Word& w);
bool is_cyclically_reduced(const GroupPresentation& g, const Word& w);
bool is_least_rotation(const Word& w);
/// Length of the primitive root of w as a cyclic word.
int primitive_period(const Word& w);

/// One class per cyclic word up to max_word_len, ordered by (word length, word).
std::vector<ClosedGeodesic> conjugacy_classes(const GroupPresentation& g, int max_word_len);

struct SpectrumEntry {
  double length = 0.0;
  int count = 0;
  std::vector<std::string> words;
};

/// ceil(L_max / delta0) + 2 with delta0 from letter_displacement_bound.
int spectrum_word_cutoff(const GroupPresentation& g, double L_max);

/// Classes with L <= L_max merged at 1e-9; throws DomainError if no per-letter
/// bound exists and no explicit cutoff is given.
std::vector<SpectrumEntry> length_spectrum(const GroupPresentation& g, double L_max,
                                           std::optional<int> word_len_cutoff = std::nullopt);

}  // namespace hz
