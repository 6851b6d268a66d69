#include "crnosc/enumerate.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace crnosc {

long long n_complexes(int k) {
    if (k < 1) throw std::invalid_argument("k >= 1 required");
    return static_cast<long long>(k + 2) * (k + 1) / 2;
}

long long n_nonflow_reactions(int k) {
    long long nc = n_complexes(k);
    return nc * (nc - 1) - 2 * k;
}

uint64_t labeled_subset_count(int k, int l) {
    long long n = n_nonflow_reactions(k);
    if (l < 0 || l > n) return 0;
    unsigned __int128 acc = 1;
    for (int i = 0; i < l; ++i) {
        acc = acc * static_cast<unsigned __int128>(n - i) / (i + 1);
        if (acc > static_cast<unsigned __int128>(UINT64_MAX)) return UINT64_MAX;
    }
    return static_cast<uint64_t>(acc);
}

int ReactionSpace::pack(const std::vector<int>& stoich) const {
    int code = 0;
    for (int v : stoich) code = code * 3 + v;
    return code;
}

ReactionSpace::ReactionSpace(int k) : k_(k) {
    if (k < 1 || k > 6) throw std::invalid_argument("ReactionSpace supports 1 <= k <= 6");
    // complexes: all stoichiometry vectors with entries in {0,1,2}, sum <= 2,
    // in lexicographic order
    std::vector<int> cur(k, 0);
    std::function<void(int, int)> gen = [&](int i, int sum) {
        if (i == k) {
            complexes_.push_back(cur);
            return;
        }
        for (int v = 0; v <= 2 - sum; ++v) {
            cur[i] = v;
            gen(i + 1, sum + v);
        }
        cur[i] = 0;
    };
    gen(0, 0);
    std::sort(complexes_.begin(), complexes_.end());

    int maxpack = 1;
    for (int i = 0; i < k; ++i) maxpack *= 3;
    std::vector<int> code_by_pack(maxpack, -1);
    for (size_t c = 0; c < complexes_.size(); ++c) code_by_pack[pack(complexes_[c])] = static_cast<int>(c);

    auto is_flow_pair = [&](int s, int t) {
        const auto& a = complexes_[s];
        const auto& b = complexes_[t];
        auto zero = [](const std::vector<int>& v) {
            return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
        };
        auto unit = [](const std::vector<int>& v) {
            return std::accumulate(v.begin(), v.end(), 0) == 1;
        };
        return (zero(a) && unit(b)) || (unit(a) && zero(b));
    };

    const int nc = complex_count();
    std::vector<std::vector<int>> rxn_code(nc, std::vector<int>(nc, -1));
    for (int s = 0; s < nc; ++s)
        for (int t = 0; t < nc; ++t) {
            if (s == t || is_flow_pair(s, t)) continue;
            rxn_code[s][t] = static_cast<int>(reactions_.size());
            reactions_.emplace_back(s, t);
        }

    // species permutations acting on reaction codes
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<int> cmap(nc);
        for (int c = 0; c < nc; ++c) {
            std::vector<int> img(k);
            for (int i = 0; i < k; ++i) img[perm[i]] = complexes_[c][i];
            cmap[c] = code_by_pack[pack(img)];
        }
        std::vector<uint16_t> rmap(reactions_.size());
        for (size_t r = 0; r < reactions_.size(); ++r) {
            auto [s, t] = reactions_[r];
            rmap[r] = static_cast<uint16_t>(rxn_code[cmap[s]][cmap[t]]);
        }
        perm_rxn_.push_back(std::move(rmap));
    } while (std::next_permutation(perm.begin(), perm.end()));

    complex_code_ = std::move(rxn_code);
}

int ReactionSpace::code_of(const Reaction& rxn) const {
    if (!is_bimolecular(rxn) || is_flow_reaction(rxn)) return -1;
    int s = pack(rxn.source.stoich), t = pack(rxn.target.stoich);
    auto find = [&](int p) -> int {
        for (size_t c = 0; c < complexes_.size(); ++c)
            if (pack(complexes_[c]) == p) return static_cast<int>(c);
        return -1;
    };
    int cs = find(s), ct = find(t);
    if (cs < 0 || ct < 0) return -1;
    return complex_code_[cs][ct];
}

Reaction ReactionSpace::reaction_of(int code) const {
    auto [s, t] = reactions_[code];
    return Reaction{Complex(complexes_[s]), Complex(complexes_[t])};
}

Crn ReactionSpace::core_from_codes(const std::vector<uint16_t>& codes) const {
    Crn core;
    core.n_species = k_;
    core.reactions.reserve(codes.size());
    for (uint16_t c : codes) core.reactions.push_back(reaction_of(c));
    return core;
}

std::vector<uint16_t> ReactionSpace::codes_of_core(const Crn& core) const {
    if (core.n_species != k_) throw std::invalid_argument("species count mismatch");
    std::vector<uint16_t> codes;
    codes.reserve(core.reactions.size());
    for (const auto& r : core.reactions) {
        int c = code_of(r);
        if (c < 0) throw std::invalid_argument("reaction outside the bimolecular non-flow space");
        codes.push_back(static_cast<uint16_t>(c));
    }
    std::sort(codes.begin(), codes.end());
    if (std::adjacent_find(codes.begin(), codes.end()) != codes.end())
        throw std::invalid_argument("duplicate reaction");
    return codes;
}

namespace {

// Lexicographic compare of sorted(mapped subset) against the subset itself,
// without materializing the sorted image: -1 smaller, 0 equal, +1 greater.
inline int cmp_mapped(const std::vector<uint16_t>& base, const uint16_t* map,
                      uint16_t* buf) {
    const size_t l = base.size();
    for (size_t i = 0; i < l; ++i) buf[i] = map[base[i]];
    std::sort(buf, buf + l);
    for (size_t i = 0; i < l; ++i) {
        if (buf[i] != base[i]) return buf[i] < base[i] ? -1 : 1;
    }
    return 0;
}

}  // namespace

bool ReactionSpace::is_canonical(const std::vector<uint16_t>& sorted_codes) const {
    uint16_t buf[32];
    if (sorted_codes.size() > 32) {
        std::vector<uint16_t> big(sorted_codes.size());
        for (size_t p = 1; p < perm_rxn_.size(); ++p)
            if (cmp_mapped(sorted_codes, perm_rxn_[p].data(), big.data()) < 0) return false;
        return true;
    }
    for (size_t p = 1; p < perm_rxn_.size(); ++p)
        if (cmp_mapped(sorted_codes, perm_rxn_[p].data(), buf) < 0) return false;
    return true;
}

std::vector<uint16_t> ReactionSpace::canonical_codes(
    const std::vector<uint16_t>& sorted_codes) const {
    std::vector<uint16_t> best = sorted_codes;
    std::vector<uint16_t> buf(sorted_codes.size());
    for (size_t p = 1; p < perm_rxn_.size(); ++p) {
        const auto& map = perm_rxn_[p];
        for (size_t i = 0; i < sorted_codes.size(); ++i) buf[i] = map[sorted_codes[i]];
        std::sort(buf.begin(), buf.end());
        if (buf < best) best = buf;
    }
    return best;
}

uint64_t ReactionSpace::orbit_size(const std::vector<uint16_t>& sorted_codes) const {
    std::vector<std::vector<uint16_t>> images;
    std::vector<uint16_t> buf(sorted_codes.size());
    for (size_t p = 0; p < perm_rxn_.size(); ++p) {
        const auto& map = perm_rxn_[p];
        for (size_t i = 0; i < sorted_codes.size(); ++i) buf[i] = map[sorted_codes[i]];
        std::sort(buf.begin(), buf.end());
        images.push_back(buf);
    }
    std::sort(images.begin(), images.end());
    images.erase(std::unique(images.begin(), images.end()), images.end());
    return images.size();
}

namespace {

void guard(const EnumSpec& spec) {
    if (spec.k < 1 || spec.k > 6) throw std::invalid_argument("k must be in 1..6");
    if (spec.l < 0 || spec.l > n_nonflow_reactions(spec.k))
        throw std::invalid_argument("l outside 0..n_R(k)");
    uint64_t labeled = labeled_subset_count(spec.k, spec.l);
    if (labeled > spec.ceiling && !spec.override_ceiling)
        throw std::runtime_error("labeled subset count exceeds ceiling; pass an explicit override");
}

// Iterate all l-subsets of [0, n) whose first element lies in [first_lo,
// first_hi), invoking fn on each canonical representative.
uint64_t scan_range(const ReactionSpace& space, int l, int first_lo, int first_hi,
                    const std::function<void(const std::vector<uint16_t>&)>& fn) {
    const int n = space.reaction_count();
    uint64_t count = 0;
    if (l == 0) {
        if (first_lo == 0) {
            std::vector<uint16_t> empty;
            fn(empty);
            return 1;
        }
        return 0;
    }
    std::vector<uint16_t> idx(l);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == l) {
            if (space.is_canonical(idx)) {
                ++count;
                fn(idx);
            }
            return;
        }
        const int hi = (depth == 0) ? first_hi : n - (l - depth) + 1;
        const int lo = (depth == 0) ? first_lo : start;
        for (int i = lo; i < hi; ++i) {
            if (depth == 0 && i > n - l) break;
            idx[depth] = static_cast<uint16_t>(i);
            rec(i + 1, depth + 1);
        }
    };
    rec(first_lo, 0);
    return count;
}

}  // namespace

uint64_t visit_classes(const EnumSpec& spec, int threads,
                       const std::function<void(const ReactionSpace&,
                                                const std::vector<uint16_t>&)>& fn) {
    guard(spec);
    const ReactionSpace space(spec.k);
    const int n = space.reaction_count();
    threads = std::max(1, threads);
    if (threads == 1 || spec.l == 0) {
        return scan_range(space, spec.l, 0, n, [&](const std::vector<uint16_t>& codes) {
            fn(space, codes);
        });
    }
    // Split the first-index range. Low first indices carry far more subsets,
    // so use many interleaved strips.
    std::vector<std::thread> pool;
    std::vector<uint64_t> counts(threads, 0);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            uint64_t local = 0;
            for (int first = t; first <= n - spec.l; first += threads)
                local += scan_range(space, spec.l, first, first + 1,
                                    [&](const std::vector<uint16_t>& codes) { fn(space, codes); });
            counts[t] = local;
        });
    }
    for (auto& th : pool) th.join();
    return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

uint64_t enumerate_crns(const EnumSpec& spec,
                        const std::function<void(const Crn&, const CanonicalKey&)>& emit,
                        int threads) {
    return visit_classes(spec, threads,
                         [&](const ReactionSpace& space, const std::vector<uint16_t>& codes) {
                             Crn core = space.core_from_codes(codes);
                             emit(core, canonical_core_key(core));
                         });
}

uint64_t count_crns(const EnumSpec& spec, int threads) {
    return visit_classes(spec, threads,
                         [](const ReactionSpace&, const std::vector<uint16_t>&) {});
}

uint64_t TwoSpeciesCensus::dedup_total() const {
    uint64_t t = 0;
    for (int l = 1; l <= 26; ++l) t += dedup[l];
    return t;
}

uint64_t TwoSpeciesCensus::burnside_total() const {
    uint64_t t = 0;
    for (int l = 1; l <= 26; ++l) t += burnside[l];
    return t;
}

TwoSpeciesCensus count_all_2species() {
    const ReactionSpace space(2);
    const int n = space.reaction_count();  // 26
    if (n != 26) throw std::logic_error("expected 26 non-flow reactions on 2 species");

    // species swap as a permutation on reaction codes
    std::vector<int> sigma(n);
    {
        const std::vector<int> perm = {1, 0};
        for (int r = 0; r < n; ++r) {
            Crn tmp{2, {space.reaction_of(r)}};
            sigma[r] = space.code_of(permute_species(tmp, perm).reactions[0]);
        }
    }

    // motif codes: X+Y -> 2Y and X+Y -> 2X
    int xiv_a = -1, xiv_b = -1;
    for (int r = 0; r < n; ++r) {
        Reaction rx = space.reaction_of(r);
        if (rx.source.stoich == std::vector<int>{1, 1}) {
            if (rx.target.stoich == std::vector<int>{0, 2}) xiv_a = r;
            if (rx.target.stoich == std::vector<int>{2, 0}) xiv_b = r;
        }
    }
    if (xiv_a < 0 || xiv_b < 0) throw std::logic_error("motif codes not found");

    TwoSpeciesCensus census;

    // exhaustive dedup: a subset mask is the class representative iff
    // mask <= sigma(mask); byte tables apply sigma eight bits at a time
    std::array<std::array<uint32_t, 256>, 4> table{};
    for (int b = 0; b < 4; ++b) {
        for (int v = 0; v < 256; ++v) {
            uint32_t out = 0;
            for (int i = 0; i < 8; ++i) {
                int bit = 8 * b + i;
                if (bit < n && (v & (1 << i))) out |= (1u << sigma[bit]);
            }
            table[b][v] = out;
        }
    }
    const uint32_t motif_mask = (1u << xiv_a) | (1u << xiv_b);
    const uint32_t top = 1u << n;
    census.dedup[0] = 1;  // the empty core
    for (uint32_t mask = 1; mask < top; ++mask) {
        uint32_t image = table[0][mask & 0xFF] | table[1][(mask >> 8) & 0xFF] |
                         table[2][(mask >> 16) & 0xFF] | table[3][(mask >> 24) & 0xFF];
        if (mask <= image) {
            ++census.dedup[std::popcount(mask)];
            if (mask & motif_mask) ++census.motif_xiv_classes;
        }
    }

    // Burnside: orbits of size-l subsets under {id, sigma}. sigma has f fixed
    // reactions and (26 - f)/2 two-cycles; a sigma-invariant subset is a
    // union of fixed reactions and whole two-cycles.
    int fixed = 0;
    for (int r = 0; r < n; ++r)
        if (sigma[r] == r) ++fixed;
    const int cycles = (n - fixed) / 2;
    auto choose = [](int a, int b) -> uint64_t {
        if (b < 0 || b > a) return 0;
        unsigned __int128 acc = 1;
        for (int i = 0; i < b; ++i) acc = acc * (a - i) / (i + 1);
        return static_cast<uint64_t>(acc);
    };
    for (int l = 0; l <= n; ++l) {
        uint64_t invariant = 0;
        for (int j = 0; 2 * j <= l; ++j)
            invariant += choose(cycles, j) * choose(fixed, l - 2 * j);
        census.burnside[l] = (choose(n, l) + invariant) / 2;
    }
    return census;
}

}  // namespace crnosc
