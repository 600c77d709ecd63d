#pragma once

#include <string>

#include "artimine/petri_net.hpp"
#include "json.hpp"

namespace artimine {

// {"places":[...],"transitions":[{"name","label","visible"}],
//  "arcs":[{"from","to"}],"initial":"p","final":"q"}
nlohmann::ordered_json to_json(const PetriNet& net);
PetriNet net_from_json(const nlohmann::json& j);

/// PNML place/transition net: core structure and name labels. Invisible
/// transitions carry a toolspecific marker; ProM's `$invisible$` activity
/// marker is read as well.
std::string write_pnml(const PetriNet& net, const std::string& id = "net");
PetriNet read_pnml(const std::string& xml);

/// Reads JSON or PNML, chosen by the first non-blank character.
PetriNet read_net(const std::string& text);

std::string to_dot(const PetriNet& net);

}  // namespace artimine
