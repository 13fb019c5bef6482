#include "graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace cdc::graph {

std::vector<std::vector<Vertex>> strongly_connected_components(const Adjacency& adjacency) {
    constexpr Vertex unvisited = std::numeric_limits<Vertex>::max();
    const auto n = static_cast<Vertex>(adjacency.size());
    std::vector<Vertex> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<Vertex> stack;
    std::vector<std::vector<Vertex>> out;
    Vertex counter = 0;

    struct Frame {
        Vertex v;
        std::size_t next;
    };
    std::vector<Frame> frames;

    for (Vertex root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        frames.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < adjacency[f.v].size()) {
                Vertex w = adjacency[f.v][f.next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            Vertex v = f.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<Vertex> component;
                Vertex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component.push_back(w);
                } while (w != v);
                std::sort(component.begin(), component.end());
                out.push_back(std::move(component));
            }
        }
    }
    return out;
}

std::vector<Vertex> cycle_through(const Adjacency& adjacency, Vertex start, const std::vector<Vertex>& allowed) {
    auto permitted = [&](Vertex v) { return std::binary_search(allowed.begin(), allowed.end(), v); };
    constexpr Vertex none = std::numeric_limits<Vertex>::max();
    std::vector<Vertex> parent(adjacency.size(), none);
    std::deque<Vertex> queue;

    for (Vertex w : adjacency[start]) {
        if (w == start) return {start, start};
        if (permitted(w) && parent[w] == none) {
            parent[w] = start;
            queue.push_back(w);
        }
    }
    while (!queue.empty()) {
        Vertex v = queue.front();
        queue.pop_front();
        for (Vertex w : adjacency[v]) {
            if (w == start) {
                std::vector<Vertex> walk{start};
                for (Vertex x = v; x != start; x = parent[x]) walk.push_back(x);
                std::reverse(walk.begin() + 1, walk.end());
                walk.push_back(start);
                return walk;
            }
            if (permitted(w) && parent[w] == none) {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    return {};
}

std::optional<std::vector<Vertex>> find_cycle(const Adjacency& adjacency) {
    std::optional<std::vector<Vertex>> best;
    Vertex best_start = std::numeric_limits<Vertex>::max();
    for (const auto& component : strongly_connected_components(adjacency)) {
        Vertex v = component.front();
        bool cyclic = component.size() > 1 ||
                      std::binary_search(adjacency[v].begin(), adjacency[v].end(), v);
        if (cyclic && v < best_start) {
            best_start = v;
            best = cycle_through(adjacency, v, component);
        }
    }
    return best;
}

}  // namespace cdc::graph
