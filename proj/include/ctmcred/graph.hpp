#pragma once

// Small digraph helpers used for support-structure checks: Tarjan SCC,
// condensation terminality, strong connectivity.

#include <functional>
#include <vector>

namespace ctmcred {

using Adjacency = std::vector<std::vector<int>>;

struct SccResult {
  std::vector<int> comp;  // component id per node
  int count = 0;
};

inline SccResult tarjan_scc(const Adjacency& adj) {
  const int n = static_cast<int>(adj.size());
  SccResult res;
  res.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  int next_index = 0;

  std::function<void(int)> visit = [&](int v) {
    index[v] = low[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        res.comp[w] = res.count;
      } while (w != v);
      ++res.count;
    }
  };

  for (int v = 0; v < n; ++v)
    if (index[v] < 0) visit(v);
  return res;
}

inline bool strongly_connected(const Adjacency& adj) {
  if (adj.empty()) return true;
  return tarjan_scc(adj).count == 1;
}

/// For each SCC, whether it has no edge leaving it in the condensation.
inline std::vector<char> scc_terminal(const Adjacency& adj,
                                      const SccResult& scc) {
  std::vector<char> terminal(scc.count, 1);
  for (int v = 0; v < static_cast<int>(adj.size()); ++v)
    for (int w : adj[v])
      if (scc.comp[v] != scc.comp[w]) terminal[scc.comp[v]] = 0;
  return terminal;
}

}  // namespace ctmcred
