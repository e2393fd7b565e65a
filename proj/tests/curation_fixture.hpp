#pragma once

#include "facegraph/clustering.hpp"
#include "support.hpp"

namespace facegraph::testing {

// Cluster A (7 faces near the origin) shares image i1 with cluster B.
// C and D are one far-away identity split in two. u1/u2 sit near A's mean,
// u3 and e1 are far from everything; e1 is the third face on i1.
inline EventDataset curation_dataset() {
  Builder b;
  for (int i = 1; i <= 15; ++i) b.image("i" + std::to_string(i), 1000 + 10 * i);
  b.face("a1", "i1", {0, 0}, 0.5, "A")
      .face("a2", "i2", {1, 0}, 0.9, "A")
      .face("a3", "i3", {0, 1}, 0.7, "A")
      .face("a4", "i4", {1, 1}, 0.6, "A")
      .face("a5", "i5", {2, 0}, 0.8, "A")
      .face("a6", "i6", {0, 2}, 0.4, "A")
      .face("a7", "i7", {2, 2}, 0.3, "A")
      .face("b1", "i1", {5, 5}, 0.9, "B")
      .face("b2", "i8", {5, 6}, 0.9, "B")
      .face("b3", "i9", {6, 5}, 0.9, "B")
      .face("c1", "i10", {100, 0}, 0.9, "C")
      .face("c2", "i11", {101, 0}, 0.9, "C")
      .face("d1", "i12", {100, 3}, 0.9, "C")
      .face("d2", "i13", {101, 3}, 0.9, "C")
      .face("u1", "i14", {1, 3}, 0.9, "A")
      .face("u2", "i15", {3, 1}, 0.9, "A")
      .face("u3", "i14", {200, 200}, 0.9, "E")
      .face("e1", "i1", {300, 300}, 0.9, "F");
  return b.build("curation-fixture");
}

inline Clustering curation_clustering() {
  Clustering c;
  c.clusters = {{"A", {"a1", "a2", "a3", "a4", "a5", "a6", "a7"}},
                {"B", {"b1", "b2", "b3"}},
                {"C", {"c1", "c2"}},
                {"D", {"d1", "d2"}}};
  c.unassigned = {"u1", "u2", "u3", "e1"};
  c.provenance = {"fixture"};
  return c;
}

}  // namespace facegraph::testing
