#include "artimine/net_generator.hpp"

#include <random>

namespace artimine {

namespace {

struct Builder {
  std::mt19937_64 rng;
  GeneratorOptions options;
  PetriNet net;
  std::size_t tau_left;
  std::size_t extra_left;  // visible split/join budget in τ-free mode
  std::size_t next_visible = 0, next_tau = 0, next_place = 0;

  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }

  std::size_t place() { return net.add_place("p" + std::to_string(next_place++)); }

  std::size_t visible() {
    std::string name;
    for (std::size_t i = next_visible++;; i = i / 26 - 1) {
      name.insert(name.begin(), static_cast<char>('a' + i % 26));
      if (i < 26) break;
    }
    return net.add_transition(name, true, name);
  }

  std::size_t connector() {
    if (options.tau_free) return visible();
    return net.add_transition("tau" + std::to_string(next_tau++), false);
  }

  void leaf(std::size_t entry, std::size_t exit) {
    auto t = visible();
    net.add_arc_pt(entry, t);
    net.add_arc_tp(t, exit);
  }

  void block(std::size_t entry, std::size_t exit, std::size_t leaves) {
    if (leaves == 1) {
      if (!options.tau_free && tau_left >= 1 && pick(0, 3) == 0) {
        --tau_left;
        leaf(entry, exit);
        auto skip = connector();
        net.add_arc_pt(entry, skip);
        net.add_arc_tp(skip, exit);
      } else {
        leaf(entry, exit);
      }
      return;
    }
    auto left = pick(1, leaves - 1);
    auto right = leaves - left;
    bool can_and = options.tau_free ? extra_left >= 2 : tau_left >= 2;
    switch (pick(0, can_and ? 2 : 1)) {
      case 0: {
        auto mid = place();
        block(entry, mid, left);
        block(mid, exit, right);
        break;
      }
      case 1:
        block(entry, exit, left);
        block(entry, exit, right);
        break;
      default: {
        if (options.tau_free) extra_left -= 2;
        else tau_left -= 2;
        auto split = connector();
        auto join = connector();
        net.add_arc_pt(entry, split);
        net.add_arc_tp(join, exit);
        for (auto n : {left, right}) {
          auto a = place();
          auto b = place();
          net.add_arc_tp(split, a);
          net.add_arc_pt(b, join);
          block(a, b, n);
        }
      }
    }
  }
};

}  // namespace

GeneratedNet random_workflow_net(std::uint64_t seed, const GeneratorOptions& options) {
  Builder b{std::mt19937_64(seed), options, {}, options.max_tau, 0};
  auto max = std::max<std::size_t>(options.max_visible, 1);
  auto leaves = b.pick(1, max);
  b.extra_left = max - leaves;
  auto source = b.net.add_place("start");
  auto sink = b.net.add_place("end");
  b.block(source, sink, leaves);
  b.net.initial = source;
  b.net.final = sink;

  GeneratedNet out{std::move(b.net), {}};
  std::size_t k = 0;
  for (std::size_t p = 0; p < out.net.places.size(); ++p) {
    const auto& outs = out.net.place_out[p];
    if (outs.size() < 2) continue;
    ConditionVariable var{"c" + std::to_string(k++), {}};
    for (std::size_t i = 0; i < outs.size(); ++i) {
      var.domain.push_back("v" + std::to_string(i));
      out.conditions.arcs.push_back({out.net.places[p], out.net.transitions[outs[i]].name, var.name, var.domain.back()});
    }
    out.conditions.domains.push_back(std::move(var));
  }
  return out;
}

}  // namespace artimine
