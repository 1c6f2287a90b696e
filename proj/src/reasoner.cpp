#include "kgalign/reasoner.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace kgalign {
namespace {

// Iterative Tarjan; returns the component id of every node.
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& adj,
                                            std::size_t& count) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next edge)
  std::size_t next_index = 0;
  count = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge == 0) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (edge < adj[v].size()) {
        std::size_t w = adj[v][edge++];
        if (index[w] == kUnset) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        while (true) {
          std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = count;
          if (w == v) break;
        }
        ++count;
      }
      std::size_t finished = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[finished]);
    }
  }
  return comp;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Smaller index wins, so the root is always the lexicographically smallest member.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

}  // namespace

std::vector<Iri> InferredOntology::direct_ancestors(const Iri& iri) const {
  auto rep_it = cycle_representative.find(iri);
  if (rep_it == cycle_representative.end()) return {};
  const Iri& rep = rep_it->second;
  std::set<Iri> parents;
  for (const auto& [child, parent] : base.subclass_edges) {
    if (cycle_representative.at(child) != rep) continue;
    const Iri& prep = cycle_representative.at(parent);
    if (prep != rep) parents.insert(prep);
  }
  return {parents.begin(), parents.end()};
}

InferredOntology compute_closure(Ontology onto) {
  InferredOntology out;
  out.base = std::move(onto);
  const Ontology& base = out.base;

  std::vector<Iri> iris;
  iris.reserve(base.entities.size());
  std::unordered_map<Iri, std::size_t> id;
  for (const auto& [iri, _] : base.entities) {
    id.emplace(iri, iris.size());
    iris.push_back(iri);
  }
  const std::size_t n = iris.size();

  std::vector<std::vector<std::size_t>> parents(n), children(n);
  for (const auto& [c, p] : base.subclass_edges) {
    parents[id.at(c)].push_back(id.at(p));
    children[id.at(p)].push_back(id.at(c));
  }

  std::size_t comp_count = 0;
  auto comp = strongly_connected(parents, comp_count);
  std::vector<std::size_t> rep(comp_count, n);
  std::vector<std::size_t> comp_size(comp_count, 0);
  for (std::size_t v = 0; v < n; ++v) {
    rep[comp[v]] = std::min(rep[comp[v]], v);
    ++comp_size[comp[v]];
  }
  std::vector<std::set<std::size_t>> dag(comp_count);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t p : parents[v])
      if (comp[p] != comp[v]) dag[comp[v]].insert(comp[p]);

  for (std::size_t c = 0; c < comp_count; ++c) {
    if (comp_size[c] < 2) continue;
    ++out.collapsed_cycles;
    std::string members;
    for (std::size_t v = 0; v < n; ++v)
      if (comp[v] == c) members += (members.empty() ? "" : ", ") + iris[v].str();
    out.warnings.push_back("subclass cycle collapsed onto <" + iris[rep[c]].str() + ">: " +
                           members);
  }

  // Ancestors per component by BFS over the condensed DAG.
  std::vector<std::vector<std::size_t>> comp_ancestors(comp_count);
  for (std::size_t c = 0; c < comp_count; ++c) {
    std::vector<std::size_t> dist(comp_count, static_cast<std::size_t>(-1));
    std::deque<std::size_t> queue{c};
    dist[c] = 0;
    std::vector<std::size_t> reached;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t w : dag[u]) {
        if (dist[w] != static_cast<std::size_t>(-1)) continue;
        dist[w] = dist[u] + 1;
        reached.push_back(w);
        queue.push_back(w);
      }
    }
    std::sort(reached.begin(), reached.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] != dist[b] ? dist[a] < dist[b] : rep[a] < rep[b];
    });
    comp_ancestors[c] = std::move(reached);
  }

  UnionFind uf(n);
  for (const auto& [a, b] : base.equivalence_edges) uf.unite(id.at(a), id.at(b));

  std::map<Iri, std::set<Iri>> domain_to_properties;
  for (const auto& [prop, domains] : base.property_domains)
    for (const auto& d : domains) domain_to_properties[d].insert(prop);

  for (std::size_t v = 0; v < n; ++v) {
    const Iri& iri = iris[v];
    std::size_t c = comp[v];
    out.cycle_representative.emplace(iri, iris[rep[c]]);

    auto& anc = out.ancestors[iri];
    for (std::size_t a : comp_ancestors[c]) anc.push_back(iris[rep[a]]);

    out.equivalence_class.emplace(iri, iris[uf.find(v)]);

    auto& sib = out.siblings[iri];
    for (std::size_t p : parents[v])
      for (std::size_t s : children[p])
        if (s != v) sib.insert(iris[s]);

    // Domains may name any member of the class's own cycle or of an ancestor cycle.
    auto& attached = out.attached_properties[iri];
    std::set<std::size_t> closure{c};
    closure.insert(comp_ancestors[c].begin(), comp_ancestors[c].end());
    for (const auto& [domain, props] : domain_to_properties)
      if (closure.contains(comp[id.at(domain)])) attached.insert(props.begin(), props.end());
  }
  return out;
}

}  // namespace kgalign
