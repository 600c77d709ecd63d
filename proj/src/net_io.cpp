#include "artimine/net_io.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <map>
#include <sstream>

#include "artimine/error.hpp"

namespace artimine {

using nlohmann::json;
using nlohmann::ordered_json;
namespace pt = boost::property_tree;

ordered_json to_json(const PetriNet& net) {
  ordered_json j;
  j["places"] = net.places;
  j["transitions"] = ordered_json::array();
  for (const auto& t : net.transitions) {
    ordered_json o{{"name", t.name}};
    if (t.visible) o["label"] = t.label;
    o["visible"] = t.visible;
    j["transitions"].push_back(std::move(o));
  }
  j["arcs"] = ordered_json::array();
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    for (auto p : net.pre[t]) j["arcs"].push_back({{"from", net.places[p]}, {"to", net.transitions[t].name}});
    for (auto p : net.post[t]) j["arcs"].push_back({{"from", net.transitions[t].name}, {"to", net.places[p]}});
  }
  if (net.initial) j["initial"] = net.places[*net.initial];
  if (net.final) j["final"] = net.places[*net.final];
  return j;
}

PetriNet net_from_json(const json& j) {
  PetriNet net;
  try {
    for (const auto& p : j.at("places")) net.add_place(p.is_string() ? p.get<std::string>() : p.at("name").get<std::string>());
    for (const auto& t : j.at("transitions")) {
      if (t.is_string()) {
        net.add_transition(t.get<std::string>());
        continue;
      }
      bool visible = t.value("visible", true);
      net.add_transition(t.at("name").get<std::string>(), visible, t.value("label", std::string{}));
    }
    for (const auto& a : j.at("arcs")) net.add_arc(a.at("from").get<std::string>(), a.at("to").get<std::string>());
    if (j.contains("initial")) net.initial = net.require_place(j.at("initial").get<std::string>());
    if (j.contains("final")) net.final = net.require_place(j.at("final").get<std::string>());
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("net JSON: ") + e.what());
  }
  return net;
}

std::string write_pnml(const PetriNet& net, const std::string& id) {
  pt::ptree root;
  pt::ptree& n = root.add("pnml.net", "");
  n.put("<xmlattr>.id", id);
  n.put("<xmlattr>.type", "http://www.pnml.org/version-2009/grammar/ptnet");
  pt::ptree& page = n.add("page", "");
  page.put("<xmlattr>.id", "page0");
  for (std::size_t p = 0; p < net.places.size(); ++p) {
    pt::ptree& node = page.add("place", "");
    node.put("<xmlattr>.id", net.places[p]);
    node.put("name.text", net.places[p]);
    if (net.initial && *net.initial == p) node.put("initialMarking.text", "1");
  }
  for (const auto& t : net.transitions) {
    pt::ptree& node = page.add("transition", "");
    node.put("<xmlattr>.id", t.name);
    node.put("name.text", t.visible ? t.label : t.name);
    if (!t.visible) {
      pt::ptree& ts = node.add("toolspecific", "");
      ts.put("<xmlattr>.tool", "artimine");
      ts.put("<xmlattr>.version", "1");
      ts.put("invisible", "true");
    }
  }
  std::size_t arc = 0;
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    auto add = [&](const std::string& from, const std::string& to) {
      pt::ptree& node = page.add("arc", "");
      node.put("<xmlattr>.id", "a" + std::to_string(arc++));
      node.put("<xmlattr>.source", from);
      node.put("<xmlattr>.target", to);
    };
    for (auto p : net.pre[t]) add(net.places[p], net.transitions[t].name);
    for (auto p : net.post[t]) add(net.transitions[t].name, net.places[p]);
  }
  if (net.final) {
    pt::ptree& fm = n.add("finalmarkings.marking.place", "");
    fm.put("<xmlattr>.idref", net.places[*net.final]);
    fm.put("text", "1");
  }
  std::ostringstream out;
  pt::write_xml(out, root, pt::xml_writer_make_settings<std::string>(' ', 2));
  return out.str();
}

namespace {

void collect(const pt::ptree& node, const std::string& tag, std::vector<const pt::ptree*>& out) {
  for (const auto& [name, child] : node) {
    if (name == tag) out.push_back(&child);
    else if (name == "page") collect(child, tag, out);
  }
}

}  // namespace

PetriNet read_pnml(const std::string& xml) {
  pt::ptree root;
  std::istringstream in(xml);
  try {
    pt::read_xml(in, root, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(e.line(), std::string("PNML: ") + e.message());
  }
  auto net_node = root.get_child_optional("pnml.net");
  if (!net_node) throw ParseError(0, "PNML: missing pnml/net element");

  PetriNet net;
  std::vector<const pt::ptree*> places, transitions, arcs;
  collect(*net_node, "place", places);
  collect(*net_node, "transition", transitions);
  collect(*net_node, "arc", arcs);
  std::optional<std::size_t> marked;
  for (auto p : places) {
    auto id = p->get<std::string>("<xmlattr>.id");
    auto idx = net.add_place(id);
    if (p->get<int>("initialMarking.text", 0) > 0) {
      if (marked) throw ParseError(0, "PNML: more than one initially marked place");
      marked = idx;
    }
  }
  for (auto t : transitions) {
    auto id = t->get<std::string>("<xmlattr>.id");
    auto label = t->get<std::string>("name.text", id);
    bool visible = true;
    for (const auto& [tag, child] : *t) {
      if (tag != "toolspecific") continue;
      if (child.get<std::string>("invisible", "") == "true") visible = false;
      if (child.get<std::string>("<xmlattr>.activity", "") == "$invisible$") visible = false;
    }
    net.add_transition(id, visible, label);
  }
  for (auto a : arcs) net.add_arc(a->get<std::string>("<xmlattr>.source"), a->get<std::string>("<xmlattr>.target"));
  net.initial = marked;
  if (auto fm = net_node->get_child_optional("finalmarkings.marking"))
    for (const auto& [tag, child] : *fm)
      if (tag == "place" && child.get<int>("text", 0) > 0) net.final = net.require_place(child.get<std::string>("<xmlattr>.idref"));
  return net;
}

PetriNet read_net(const std::string& text) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '<') return read_pnml(text);
  try {
    return net_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("net JSON: ") + e.what());
  }
}

std::string to_dot(const PetriNet& net) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "digraph net {\n  rankdir=LR;\n";
  for (std::size_t p = 0; p < net.places.size(); ++p) {
    bool marked = net.initial && *net.initial == p;
    bool fin = net.final && *net.final == p;
    out << "  " << quote("p:" + net.places[p]) << " [shape=" << (fin ? "doublecircle" : "circle") << ",label="
        << quote(marked ? "&bull;" : "") << ",xlabel=" << quote(net.places[p]) << "];\n";
  }
  for (const auto& t : net.transitions) {
    out << "  " << quote("t:" + t.name) << " [shape=box";
    if (t.visible) out << ",label=" << quote(t.label);
    else out << ",label=\"\",style=filled,fillcolor=black,width=0.15";
    out << "];\n";
  }
  for (std::size_t t = 0; t < net.transitions.size(); ++t) {
    for (auto p : net.pre[t]) out << "  " << quote("p:" + net.places[p]) << " -> " << quote("t:" + net.transitions[t].name) << ";\n";
    for (auto p : net.post[t]) out << "  " << quote("t:" + net.transitions[t].name) << " -> " << quote("p:" + net.places[p]) << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace artimine
