#pragma once

#include <cstdint>

#include "artimine/petri_net.hpp"
#include "artimine/pn2gsm.hpp"

namespace artimine {

struct GeneratorOptions {
  std::size_t max_visible = 8;
  std::size_t max_tau = 2;
  bool tau_free = false;  // split/join transitions become visible
};

struct GeneratedNet {
  PetriNet net;
  BranchConditions conditions;  // one variable per choice place
};

// Random block-structured (sequence / choice / parallel) acyclic workflow
// net. Sound and free-choice by construction.
GeneratedNet random_workflow_net(std::uint64_t seed, const GeneratorOptions& options = {});

}  // namespace artimine
