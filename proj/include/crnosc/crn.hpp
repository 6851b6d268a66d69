#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnosc {

/// A complex: formal nonnegative-integer combination of species.
/// stoich[i] is the stoichiometry of species i; the zero complex is all zeros.
struct Complex {
    std::vector<int> stoich;

    Complex() = default;
    explicit Complex(std::vector<int> s) : stoich(std::move(s)) {}

    int size() const { return static_cast<int>(stoich.size()); }
    int total() const;
    bool is_zero() const;

    auto operator<=>(const Complex&) const = default;
};

/// An irreversible reaction: ordered pair of distinct complexes over the
/// same species set.
struct Reaction {
    Complex source;
    Complex target;

    auto operator<=>(const Reaction&) const = default;
};

/// A chemical reaction network: a species count plus an ordered sequence of
/// pairwise-distinct irreversible reactions. Species that participate in no
/// reaction are allowed. Immutable by convention after construction.
struct Crn {
    int n_species = 0;
    std::vector<Reaction> reactions;

    int n_reactions() const { return static_cast<int>(reactions.size()); }

    /// Throws std::invalid_argument on malformed input (length mismatch,
    /// source == target, duplicate reactions).
    void validate() const;

    bool operator==(const Crn&) const = default;
};

// ---- structural predicates ----

/// 0 -> A or A -> 0 with unit stoichiometry. 2A -> 0 and 0 -> A+B count as
/// non-flow reactions.
bool is_flow_reaction(const Reaction& rxn);

/// Every reaction side has total stoichiometry <= 2.
bool is_bimolecular(const Crn& crn);
bool is_bimolecular(const Reaction& rxn);

/// Contains 0 -> Xi and Xi -> 0 for every species i.
bool is_fully_open(const Crn& crn);

/// Adjoins any missing flow reactions 0 <-> Xi. Idempotent.
Crn fully_open_extension(const Crn& crn);

/// The non-flow reactions, species set unchanged. This is the stored normal
/// form for fully open families.
Crn nonflow_core(const Crn& crn);

// ---- helpers ----

Complex zero_complex(int n);
Complex unit_complex(int n, int species);

/// Build a reaction from sparse (species, stoich) terms.
Reaction make_reaction(int n, const std::vector<std::pair<int, int>>& src,
                       const std::vector<std::pair<int, int>>& tgt);

/// Apply a species permutation: perm[i] = new index of species i.
Crn permute_species(const Crn& crn, const std::vector<int>& perm);

// ---- text format ----
//
// One reaction per line: `a1 X1 + a2 X2 -> b1 X1 + ...` with species tokens
// X1..Xn and `0` for the zero complex; unit coefficients may be omitted.
// Blank lines and `#` comments are ignored. An optional `species N` line
// declares species beyond the highest index referenced (networks may carry
// species that react in nothing). Round trips are lossless.

std::string to_text(const Crn& crn);
Crn parse_crn(const std::string& text);

/// Multiple networks in one file, stanzas separated by blank lines.
std::vector<Crn> parse_crn_file(const std::string& text);
std::string to_text(const std::vector<Crn>& crns);

std::string to_string(const Complex& c);
std::string to_string(const Reaction& r);

}  // namespace crnosc
