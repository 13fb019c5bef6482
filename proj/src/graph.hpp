#pragma once

// Small directed-graph helpers over dense vertex ids.

#include <cstdint>
#include <optional>
#include <vector>

namespace cdc::graph {

using Vertex = std::uint32_t;
// adjacency[v] must be sorted for deterministic results.
using Adjacency = std::vector<std::vector<Vertex>>;

// Tarjan, iterative. Components come out in reverse topological order; the
// vertices inside each component are sorted.
std::vector<std::vector<Vertex>> strongly_connected_components(const Adjacency& adjacency);

// Shortest closed walk start -> ... -> start using only vertices in `allowed`
// (a component containing start). The result repeats start at the end.
std::vector<Vertex> cycle_through(const Adjacency& adjacency, Vertex start, const std::vector<Vertex>& allowed);

// Some cycle of the graph (self-loops included), preferring the component
// with the smallest vertex; nullopt for a DAG.
std::optional<std::vector<Vertex>> find_cycle(const Adjacency& adjacency);

}  // namespace cdc::graph
