#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "linkassess/error.hpp"
#include "linkassess/graph.hpp"

namespace linkassess {

/// A ground-truth social network plus the exogenous interaction networks
/// among (some of) the same actors.
struct Dataset {
  std::string name;
  Network sn;
  std::vector<Network> exogenous;

  bool directed() const noexcept { return sn.directed(); }

  const Network& exogenous_network(std::string_view id) const {
    for (const auto& net : exogenous) {
      if (net.id() == id) return net;
    }
    throw InvalidArgument("dataset '" + name + "' has no exogenous network '" + std::string(id) + "'");
  }

  /// Throws if any network differs in directedness from the SN or ids repeat.
  void validate() const {
    std::vector<std::string> ids = {sn.id()};
    for (const auto& net : exogenous) {
      if (net.directed() != sn.directed()) {
        throw InvalidArgument("network '" + net.id() + "' differs in directedness from the social network");
      }
      for (const auto& seen : ids) {
        if (seen == net.id()) throw InvalidArgument("duplicate network id '" + net.id() + "'");
      }
      ids.push_back(net.id());
    }
  }
};

}  // namespace linkassess
