#pragma once

#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "linkassess/graph.hpp"

namespace fixtures {

using linkassess::NamePair;
using linkassess::Network;

inline Network make(std::initializer_list<std::pair<const char*, const char*>> edges, bool directed = false,
                    std::string id = "g") {
  std::vector<NamePair> e;
  for (const auto& [u, v] : edges) e.emplace_back(u, v);
  return Network::from_named_edges(std::move(id), directed, e);
}

inline Network from_text(const std::string& text, bool directed = false, std::string id = "g",
                         linkassess::EdgeListDiagnostics* diag = nullptr) {
  std::istringstream in(text);
  return linkassess::read_edge_list(in, directed, std::move(id), diag);
}

inline Network p3() { return make({{"a", "b"}, {"b", "c"}}, false, "p3"); }

inline Network k4() { return make({{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}}, false, "k4"); }

// centre c, leaves x, y, z
inline Network star3() { return make({{"c", "x"}, {"c", "y"}, {"c", "z"}}, false, "star"); }

// a->b, c->b, a->c
inline Network directed_triad() { return make({{"a", "b"}, {"c", "b"}, {"a", "c"}}, true, "triad"); }

}  // namespace fixtures
