#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hz/fuchsian_group.hpp"
#include "test_support.hpp"

using namespace hz;
using testing::reference_group;

namespace {

// Brute force: all cyclically reduced words of length n, deduplicated by rotation.
std::set<Word> brute_classes(const GroupPresentation& g, int n) {
  std::set<Word> out;
  const int k = static_cast<int>(g.size());
  Word w(n, 0);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= k;
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int i = 0; i < n; ++i) {
      w[i] = static_cast<int>(c % k);
      c /= k;
    }
    if (!is_cyclically_reduced(g, w)) continue;
    Word best = w;
    for (int r = 1; r < n; ++r) {
      Word rot(w.begin() + r, w.end());
      rot.insert(rot.end(), w.begin(), w.begin() + r);
      best = std::min(best, rot);
    }
    out.insert(best);
  }
  return out;
}

}  // namespace

TEST_CASE("reference presentation") {
  const auto& g = reference_group();
  CHECK(g.size() == 4);
  CHECK(g.inverse(0) == 1);
  CHECK(g.inverse(2) == 3);
  CHECK(g.label(2) == "b");
  CHECK(trace_length(g.matrix(0)) == doctest::Approx(2.633915793849633).epsilon(1e-13));
  for (std::size_t i = 0; i < 4; ++i) CHECK(g.matrix(i).preserves_unit_circle());
}

TEST_CASE("presentation validation") {
  const double pi = std::numbers::pi;
  CHECK_THROWS_AS(symmetric_schottky(pi / 4 + 0.01), DomainError);  // discs overlap
  const auto& g = reference_group();
  std::vector<MoebiusMap> mats{g.matrix(0), g.matrix(1), g.matrix(2), g.matrix(3)};
  CHECK_THROWS_AS(GroupPresentation({"a", "A", "b", "B"}, mats, {1, 0, 3, 3}, GroupKind::cocompact_with_coding),
                  DomainError);
  std::vector<MoebiusMap> wrong{g.matrix(0), g.matrix(2), g.matrix(2), g.matrix(3)};
  CHECK_THROWS_AS(GroupPresentation({"a", "A", "b", "B"}, wrong, {1, 0, 3, 2}, GroupKind::cocompact_with_coding),
                  DomainError);
  std::vector<MoebiusMap> elliptic{rotation(0.5), rotation(-0.5)};
  CHECK_THROWS_AS(GroupPresentation({"r", "R"}, elliptic, {1, 0}, GroupKind::cocompact_with_coding), DomainError);
  // asymmetric pairing with unequal radii still satisfies ping-pong
  const auto h = GroupPresentation::schottky({{"a", "A", {0.2, 0.3}, {2.5, 0.5}}, {"b", "B", {1.4, 0.2}, {4.2, 0.6}}});
  CHECK(h.size() == 4);
}

TEST_CASE("conjugacy class counts match brute force") {
  const auto& g = reference_group();
  const auto c1 = conjugacy_classes(g, 1);
  CHECK(c1.size() == 4);
  const auto c2 = conjugacy_classes(g, 2);
  CHECK(c2.size() == 12);
  const auto c6 = conjugacy_classes(g, 6);
  std::map<int, std::set<Word>> by_len;
  for (const auto& c : c6) by_len[static_cast<int>(c.word.size())].insert(c.word);
  for (int n = 1; n <= 6; ++n) CHECK(by_len[n] == brute_classes(g, n));
  for (const auto& c : c6) {
    CHECK(is_cyclically_reduced(g, c.word));
    CHECK(is_least_rotation(c.word));
    CHECK(std::abs(c.length - trace_length(word_matrix(g, c.word))) < 1e-10);
    CHECK(std::abs(c.length - c.multiplicity * c.primitive_length) < 1e-10);
  }
}

TEST_CASE("powers and inverse words") {
  const auto& g = reference_group();
  const auto classes = conjugacy_classes(g, 4);
  std::map<Word, ClosedGeodesic> by_word;
  for (const auto& c : classes) by_word[c.word] = c;
  const auto& aaa = by_word.at({0, 0, 0});
  CHECK(aaa.multiplicity == 3);
  CHECK(aaa.primitive_length == doctest::Approx(trace_length(g.matrix(0))).epsilon(1e-12));
  // inverse word lands in a distinct class with equal length
  for (const auto& c : classes) {
    Word inv;
    for (auto it = c.word.rbegin(); it != c.word.rend(); ++it) inv.push_back(g.inverse(*it));
    Word best = inv;
    for (std::size_t r = 1; r < inv.size(); ++r) {
      Word rot(inv.begin() + r, inv.end());
      rot.insert(rot.end(), inv.begin(), inv.begin() + r);
      best = std::min(best, rot);
    }
    CHECK(best != c.word);
    CHECK(by_word.at(best).length == doctest::Approx(c.length).epsilon(1e-12));
  }
}

TEST_CASE("letter displacement bound is a valid lower bound") {
  const auto& g = reference_group();
  const double bound = *g.letter_displacement_bound(4);
  CHECK(bound > 1.7);
  double min_ratio = 1e9;
  for (const auto& c : conjugacy_classes(g, 8)) min_ratio = std::min(min_ratio, c.length / c.word.size());
  CHECK(bound <= min_ratio);
  // one cylinder level is weaker, and the minimum trace length is not a lower bound
  CHECK(*g.letter_displacement_bound(1) < bound);
  CHECK(trace_length(g.matrix(0)) > min_ratio);
}

TEST_CASE("length spectrum") {
  const auto& g = reference_group();
  const double L_max = 9.0;
  const auto spec = length_spectrum(g, L_max);
  REQUIRE(!spec.empty());
  CHECK(spec.front().length == doctest::Approx(trace_length(g.matrix(0))).epsilon(1e-12));
  CHECK(spec.front().count == 4);  // a, A, b, B
  int total = 0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (k) CHECK(spec[k].length > spec[k - 1].length);
    CHECK(spec[k].length <= L_max);
    // relabeling a <-> b and time reversal act on the data, so counts come in multiples of 2
    CHECK(spec[k].count % 2 == 0);
    total += spec[k].count;
  }
  // the cutoff is complete: a longer word budget finds nothing new below L_max
  const auto longer = length_spectrum(g, L_max, spectrum_word_cutoff(g, L_max) + 3);
  int total_longer = 0;
  for (const auto& e : longer) total_longer += e.count;
  CHECK(total == total_longer);
  // counting function consistency: log N(L)/L stays below 1 over the computed range
  int running = 0;
  for (const auto& e : spec) {
    running += e.count;
    if (e.length > 6.0) CHECK(std::log(running) / e.length < 1.0);
  }
  const GroupPresentation plain({"a", "A", "b", "B"}, {g.matrix(0), g.matrix(1), g.matrix(2), g.matrix(3)},
                                {1, 0, 3, 2}, GroupKind::cocompact_with_coding);
  CHECK_THROWS_AS(length_spectrum(plain, 5.0), DomainError);
  CHECK(length_spectrum(plain, 5.0, 3).size() == length_spectrum(g, 5.0).size());
}

TEST_CASE("spectrum symmetric under generator relabeling") {
  const double pi = std::numbers::pi, r = testing::kRefRadius;
  const auto g1 = symmetric_schottky(r);
  const auto g2 = GroupPresentation::schottky({{"b", "B", {0.5 * pi, r}, {1.5 * pi, r}}, {"a", "A", {0.0, r}, {pi, r}}});
  const auto s1 = length_spectrum(g1, 8.0), s2 = length_spectrum(g2, 8.0);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK(s1[k].length == doctest::Approx(s2[k].length).epsilon(1e-12));
    CHECK(s1[k].count == s2[k].count);
  }
}
