#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "crnosc/canon.hpp"
#include "crnosc/crn.hpp"

namespace crnosc {

/// Target cell of the (k,l) enumeration: fully open, at most bimolecular,
/// k species and l non-flow reactions. Networks are represented by their
/// non-flow cores.
struct EnumSpec {
    int k = 1;
    int l = 0;
    uint64_t ceiling = 1'000'000'000;  // labeled-subset guard
    bool override_ceiling = false;
};

long long n_complexes(int k);           // C(k+2, 2)
long long n_nonflow_reactions(int k);   // n_C(k) * (n_C(k) - 1) - 2k
uint64_t labeled_subset_count(int k, int l);

/// Lexicographic tables for the at-most-bimolecular complexes and non-flow
/// reactions on k species, plus the species-permutation action on reaction
/// codes. Complexes are ordered lexicographically by stoichiometry vector;
/// reactions by (source, target) index pair.
class ReactionSpace {
  public:
    explicit ReactionSpace(int k);

    int k() const { return k_; }
    int complex_count() const { return static_cast<int>(complexes_.size()); }
    int reaction_count() const { return static_cast<int>(reactions_.size()); }
    int perm_count() const { return static_cast<int>(perm_rxn_.size()); }

    const std::vector<int>& complex_stoich(int c) const { return complexes_[c]; }
    std::pair<int, int> reaction_pair(int r) const { return reactions_[r]; }

    /// -1 when the reaction is a flow reaction or not bimolecular.
    int code_of(const Reaction& rxn) const;

    Reaction reaction_of(int code) const;
    Crn core_from_codes(const std::vector<uint16_t>& codes) const;
    std::vector<uint16_t> codes_of_core(const Crn& core) const;

    /// True iff the sorted code vector is the lexicographic minimum of its
    /// orbit under species permutations; such subsets are the emitted
    /// isomorphism-class representatives.
    bool is_canonical(const std::vector<uint16_t>& sorted_codes) const;

    std::vector<uint16_t> canonical_codes(const std::vector<uint16_t>& sorted_codes) const;

    uint64_t orbit_size(const std::vector<uint16_t>& sorted_codes) const;

  private:
    int k_;
    std::vector<std::vector<int>> complexes_;
    std::vector<std::pair<int, int>> reactions_;       // (src complex, tgt complex)
    std::vector<std::vector<int>> complex_code_;       // lookup by packed stoich
    std::vector<std::vector<uint16_t>> perm_rxn_;      // [perm][reaction] -> reaction
    int pack(const std::vector<int>& stoich) const;
};

/// Stream exactly one representative core per isomorphism class. Returns the
/// class count. The callback may be invoked from several threads.
uint64_t enumerate_crns(const EnumSpec& spec,
                        const std::function<void(const Crn&, const CanonicalKey&)>& emit,
                        int threads = 1);

uint64_t count_crns(const EnumSpec& spec, int threads = 1);

/// Fast streaming over representative code vectors (no Crn or key built).
uint64_t visit_classes(const EnumSpec& spec, int threads,
                       const std::function<void(const ReactionSpace&,
                                                const std::vector<uint16_t>&)>& fn);

/// Per-l two-species class counts by two independent routes: exhaustive
/// dedup over all reaction subsets, and Burnside counting over the species
/// swap. Index by l = 0..26; totals exclude l = 0.
struct TwoSpeciesCensus {
    std::array<uint64_t, 27> dedup{};
    std::array<uint64_t, 27> burnside{};
    uint64_t motif_xiv_classes = 0;  // classes containing X+Y -> 2Y

    uint64_t dedup_total() const;
    uint64_t burnside_total() const;
};

TwoSpeciesCensus count_all_2species();

}  // namespace crnosc
