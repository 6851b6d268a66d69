#pragma once

#include <mutex>
#include <string>
#include <unordered_set>
#include <vector>

#include "crnosc/crn.hpp"

namespace crnosc {

/// Edge-weighted bipartite digraph with species and reaction vertex classes.
/// Arc X->R carries the stoichiometry of X in R's source complex, arc R->X
/// the stoichiometry in the target complex.
struct PnGraph {
    struct Arc {
        int from = 0;       // index within the originating class
        int to = 0;         // index within the receiving class
        int weight = 0;     // positive
        bool species_to_reaction = false;
    };
    int n_species = 0;
    int n_reactions = 0;
    std::vector<Arc> arcs;
};

PnGraph pn_graph(const Crn& crn);

/// Byte string identifying a CRN's isomorphism class: equal keys iff the PN
/// graphs are isomorphic preserving the bipartition. Fully open CRNs are
/// keyed by their non-flow core (their stored normal form); a leading tag
/// byte keeps the two families of keys disjoint.
struct CanonicalKey {
    std::string bytes;

    std::string hex() const;
    static CanonicalKey from_hex(const std::string& h);

    auto operator<=>(const CanonicalKey&) const = default;
};

CanonicalKey canonical_key(const Crn& crn);

/// Key of the fully open CRN whose non-flow core is `core`. Equals
/// canonical_key(fully_open_extension(core)).
CanonicalKey canonical_core_key(const Crn& core);

/// True iff some vertex-induced subgraph of PN(big) is isomorphic to
/// PN(small), bipartition preserved. Deletion plus canonical compare with
/// weight-profile pruning; intended for desk-scale networks.
bool contains_induced(const Crn& big, const Crn& small);

/// Induced-subnetwork test between fully open CRNs given by their non-flow
/// cores: an injection of small's species and core reactions into big such
/// that each mapped reaction restricts exactly to its preimage. Agrees with
/// contains_induced on the fully open extensions and is cheap enough for
/// million-network sweeps.
bool core_contains(const Crn& big_core, const Crn& small_core);

/// Concurrent insert-if-absent key set (set semantics for dedup stores).
class KeyStore {
  public:
    bool insert_if_absent(const CanonicalKey& k) {
        std::lock_guard<std::mutex> lock(mu_);
        return set_.insert(k.bytes).second;
    }
    bool contains(const CanonicalKey& k) const {
        std::lock_guard<std::mutex> lock(mu_);
        return set_.count(k.bytes) > 0;
    }
    size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return set_.size();
    }
    std::vector<CanonicalKey> sorted_keys() const;

  private:
    mutable std::mutex mu_;
    std::unordered_set<std::string> set_;
};

/// Key files: sorted, newline-delimited, deduplicated lowercase hex.
std::string write_key_file(const std::vector<CanonicalKey>& keys);
std::vector<CanonicalKey> read_key_file(const std::string& text);

}  // namespace crnosc
