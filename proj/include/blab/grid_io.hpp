#pragma once

// Grid files are JSON:
//   {"format": "blab-grid", "version": 1,
//    "config": {dim, theta0, depth, systems, seed, atoms, max_kubes},
//    "rotations": [system][column][row] as [re, im],
//    "nodes": [{"level", "parent", "rep": [[re, im], ...], "cap", "fraction"}]}
// Children are rebuilt from parents in node order. Doubles round-trip exactly.

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dyadic.hpp"

namespace blab {

inline constexpr int kGridFormatVersion = 1;

namespace detail {

inline nlohmann::json cvec_json(const CVec& v) {
  auto out = nlohmann::json::array();
  for (const auto& c : v) out.push_back({c.real(), c.imag()});
  return out;
}

inline CVec cvec_from_json(const nlohmann::json& j) {
  CVec v;
  for (const auto& c : j) v.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
  return v;
}

}  // namespace detail

inline nlohmann::json grid_to_json(const DyadicGrid& grid) {
  const auto& c = grid.config();
  nlohmann::json j;
  j["format"] = "blab-grid";
  j["version"] = kGridFormatVersion;
  j["config"] = {{"dim", c.dim},     {"theta0", c.theta0}, {"depth", c.depth},        {"systems", c.systems},
                 {"seed", c.seed},   {"atoms", c.atoms},   {"max_kubes", c.max_kubes}};
  auto rot = nlohmann::json::array();
  for (const auto& sys : grid.rotations()) {
    auto cols = nlohmann::json::array();
    for (const auto& col : sys) cols.push_back(detail::cvec_json(col));
    rot.push_back(std::move(cols));
  }
  j["rotations"] = std::move(rot);
  auto nodes = nlohmann::json::array();
  for (const auto& nd : grid.nodes()) {
    nodes.push_back({{"level", nd.level},
                     {"parent", nd.parent},
                     {"rep", detail::cvec_json(nd.rep)},
                     {"cap", nd.cap_radius},
                     {"fraction", nd.atom_fraction}});
  }
  j["nodes"] = std::move(nodes);
  return j;
}

inline DyadicGrid grid_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "blab-grid") throw std::runtime_error("grid file: wrong format tag");
  if (j.value("version", 0) != kGridFormatVersion) throw std::runtime_error("grid file: unsupported version");
  const auto& jc = j.at("config");
  GridConfig c;
  c.dim = jc.at("dim").get<int>();
  c.theta0 = jc.at("theta0").get<double>();
  c.depth = jc.at("depth").get<int>();
  c.systems = jc.at("systems").get<int>();
  c.seed = jc.at("seed").get<std::uint64_t>();
  c.atoms = jc.at("atoms").get<std::uint64_t>();
  c.max_kubes = jc.at("max_kubes").get<std::uint64_t>();
  c.validate();
  std::vector<std::vector<CVec>> rotations;
  for (const auto& sys : j.at("rotations")) {
    std::vector<CVec> cols;
    for (const auto& col : sys) cols.push_back(detail::cvec_from_json(col));
    rotations.push_back(std::move(cols));
  }
  std::vector<GridNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    GridNode nd;
    nd.level = jn.at("level").get<int>();
    nd.parent = jn.at("parent").get<int>();
    nd.rep = detail::cvec_from_json(jn.at("rep"));
    nd.cap_radius = jn.at("cap").get<double>();
    nd.atom_fraction = jn.at("fraction").get<double>();
    if (nd.parent >= static_cast<int>(nodes.size())) throw std::runtime_error("grid file: parent after child");
    if (nd.parent >= 0) nodes[static_cast<std::size_t>(nd.parent)].children.push_back(static_cast<int>(nodes.size()));
    nodes.push_back(std::move(nd));
  }
  return DyadicGrid(c, std::move(nodes), std::move(rotations));
}

inline void save_grid(const DyadicGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid file " + path);
  out << grid_to_json(grid).dump();
}

inline DyadicGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read grid file " + path);
  return grid_from_json(nlohmann::json::parse(in));
}

// FNV-1a of the serialized grid; identifies the grid in output headers.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t grid_hash(const DyadicGrid& grid) { return fnv1a(grid_to_json(grid).dump()); }

}  // namespace blab
