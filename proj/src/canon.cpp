#include "crnosc/canon.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <functional>
#include <map>
#include <stdexcept>

namespace crnosc {

PnGraph pn_graph(const Crn& crn) {
    PnGraph g;
    g.n_species = crn.n_species;
    g.n_reactions = crn.n_reactions();
    for (int j = 0; j < g.n_reactions; ++j) {
        const Reaction& r = crn.reactions[j];
        for (int i = 0; i < g.n_species; ++i) {
            if (r.source.stoich[i] > 0)
                g.arcs.push_back({i, j, r.source.stoich[i], true});
            if (r.target.stoich[i] > 0)
                g.arcs.push_back({j, i, r.target.stoich[i], false});
        }
    }
    return g;
}

namespace {

// A "shape" is what a vertex-induced subgraph of a PN graph looks like: a
// species count plus a multiset of (source, target) stoichiometry profiles,
// possibly degenerate (equal sides, empty sides, duplicates). Bipartition-
// preserving isomorphism of two shapes is existence of a species bijection
// matching the profile multisets, since reaction vertices carry no identity
// beyond their profile.
struct Shape {
    int n = 0;
    std::vector<std::pair<std::vector<int>, std::vector<int>>> profiles;
};

Shape shape_of(const Crn& crn) {
    Shape s;
    s.n = crn.n_species;
    for (const auto& r : crn.reactions)
        s.profiles.emplace_back(r.source.stoich, r.target.stoich);
    return s;
}

std::string serialize_under_order(const Shape& s, const std::vector<int>& pos) {
    // pos[i] = output position of species i
    const int n = s.n;
    const int m = static_cast<int>(s.profiles.size());
    std::vector<std::string> rows;
    rows.reserve(m);
    for (const auto& [src, tgt] : s.profiles) {
        std::string row(2 * n, '\0');
        for (int i = 0; i < n; ++i) {
            assert(src[i] >= 0 && src[i] < 256 && tgt[i] >= 0 && tgt[i] < 256);
            row[pos[i]] = static_cast<char>(src[i]);
            row[n + pos[i]] = static_cast<char>(tgt[i]);
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    std::string out;
    out.reserve(2 + m * 2 * n);
    out.push_back(static_cast<char>(n));
    out.push_back(static_cast<char>(m));
    for (auto& r : rows) out += r;
    return out;
}

// Iterative color refinement on (vertex class, weighted in/out multiset)
// signatures. Only species vertices carry explicit colors; reaction vertices
// are classed by their arc signature against the current species colors,
// which feeds back into the species signatures. Colors are re-ranked by
// signature order each round, so cell order is isomorphism-invariant.
std::vector<int> refine(const Shape& s, std::vector<int> color) {
    const int n = s.n;
    const int m = static_cast<int>(s.profiles.size());
    int ncolors = 1 + (n ? *std::max_element(color.begin(), color.end()) : 0);
    for (int round = 0; round < n + 2; ++round) {
        // reaction signatures -> reaction colors
        std::vector<std::vector<std::array<int, 3>>> rsig(m);
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < n; ++i) {
                int a = s.profiles[j].first[i], b = s.profiles[j].second[i];
                if (a || b) rsig[j].push_back({color[i], a, b});
            }
            std::sort(rsig[j].begin(), rsig[j].end());
        }
        std::map<std::vector<std::array<int, 3>>, int> rrank;
        for (int j = 0; j < m; ++j) rrank[rsig[j]] = 0;
        int rc = 0;
        for (auto& [k, v] : rrank) v = rc++;
        // species signatures
        std::vector<std::pair<int, std::vector<std::array<int, 3>>>> ssig(n);
        for (int i = 0; i < n; ++i) {
            ssig[i].first = color[i];
            for (int j = 0; j < m; ++j) {
                int a = s.profiles[j].first[i], b = s.profiles[j].second[i];
                if (a || b) ssig[i].second.push_back({rrank[rsig[j]], a, b});
            }
            std::sort(ssig[i].second.begin(), ssig[i].second.end());
        }
        std::map<std::pair<int, std::vector<std::array<int, 3>>>, int> srank;
        for (int i = 0; i < n; ++i) srank[ssig[i]] = 0;
        int sc = 0;
        for (auto& [k, v] : srank) v = sc++;
        for (int i = 0; i < n; ++i) color[i] = srank[ssig[i]];
        if (sc == ncolors) break;
        ncolors = sc;
    }
    return color;
}

void canon_search(const Shape& s, const std::vector<int>& color, std::string& best,
                  bool& have_best) {
    const int n = s.n;
    // cells in color order
    std::vector<std::vector<int>> cells;
    {
        int ncolors = n ? 1 + *std::max_element(color.begin(), color.end()) : 0;
        cells.assign(ncolors, {});
        for (int i = 0; i < n; ++i) cells[color[i]].push_back(i);
    }
    int target = -1;
    for (size_t c = 0; c < cells.size(); ++c)
        if (cells[c].size() > 1) {
            target = static_cast<int>(c);
            break;
        }
    if (target < 0) {
        // discrete: color[i] is the output position of species i
        std::string cert = serialize_under_order(s, color);
        if (!have_best || cert < best) {
            best = std::move(cert);
            have_best = true;
        }
        return;
    }
    // individualize each vertex of the first non-singleton cell
    for (int v : cells[target]) {
        std::vector<int> c2(color);
        for (int i = 0; i < n; ++i)
            if (c2[i] > target || (c2[i] == target && i != v)) ++c2[i];
        canon_search(s, refine(s, std::move(c2)), best, have_best);
    }
}

std::string canonical_shape_cert(const Shape& s) {
    if (s.n == 0) {
        std::string out;
        out.push_back('\0');
        out.push_back(static_cast<char>(s.profiles.size()));
        return out;
    }
    std::vector<int> color(s.n, 0);
    std::string best;
    bool have_best = false;
    canon_search(s, refine(s, std::move(color)), best, have_best);
    return best;
}

constexpr char kTagFullyOpen = 'F';
constexpr char kTagGeneral = 'G';

}  // namespace

CanonicalKey canonical_key(const Crn& crn) {
    CanonicalKey k;
    if (is_fully_open(crn)) {
        k.bytes = kTagFullyOpen + canonical_shape_cert(shape_of(nonflow_core(crn)));
    } else {
        k.bytes = kTagGeneral + canonical_shape_cert(shape_of(crn));
    }
    return k;
}

CanonicalKey canonical_core_key(const Crn& core) {
    CanonicalKey k;
    k.bytes = kTagFullyOpen + canonical_shape_cert(shape_of(core));
    return k;
}

namespace {

Shape restrict_shape(const Crn& big, const std::vector<int>& species,
                     const std::vector<int>& rxns) {
    Shape s;
    s.n = static_cast<int>(species.size());
    for (int j : rxns) {
        std::vector<int> src(s.n), tgt(s.n);
        for (int a = 0; a < s.n; ++a) {
            src[a] = big.reactions[j].source.stoich[species[a]];
            tgt[a] = big.reactions[j].target.stoich[species[a]];
        }
        s.profiles.emplace_back(std::move(src), std::move(tgt));
    }
    return s;
}

// Relabeling-invariant per-reaction weight profile: sorted positive source
// weights, then sorted positive target weights.
std::string weight_profile(const std::vector<int>& src, const std::vector<int>& tgt) {
    std::vector<int> a, b;
    for (int x : src)
        if (x) a.push_back(x);
    for (int x : tgt)
        if (x) b.push_back(x);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::string out(1, static_cast<char>(a.size()));
    for (int x : a) out.push_back(static_cast<char>(x));
    for (int x : b) out.push_back(static_cast<char>(x));
    return out;
}

std::vector<std::string> sorted_profiles(const Shape& s) {
    std::vector<std::string> p;
    p.reserve(s.profiles.size());
    for (const auto& [src, tgt] : s.profiles) p.push_back(weight_profile(src, tgt));
    std::sort(p.begin(), p.end());
    return p;
}

void subsets(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            fn(idx);
            return;
        }
        for (int i = start; i <= n - (k - depth); ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

}  // namespace

bool contains_induced(const Crn& big, const Crn& small) {
    const int ns = small.n_species, ms = small.n_reactions();
    if (ns > big.n_species || ms > big.n_reactions()) return false;
    const Shape small_shape = shape_of(small);
    const std::string small_cert = canonical_shape_cert(small_shape);
    const auto small_wp = sorted_profiles(small_shape);
    bool found = false;
    subsets(big.n_species, ns, [&](const std::vector<int>& sp) {
        if (found) return;
        subsets(big.n_reactions(), ms, [&](const std::vector<int>& rx) {
            if (found) return;
            Shape s = restrict_shape(big, sp, rx);
            if (sorted_profiles(s) != small_wp) return;
            if (canonical_shape_cert(s) == small_cert) found = true;
        });
    });
    return found;
}

namespace {

bool match_reactions(const Crn& big, const Crn& small, const std::vector<int>& phi,
                     size_t next, unsigned used_mask) {
    if (next == small.reactions.size()) return true;
    const Reaction& r = small.reactions[next];
    for (int j = 0; j < big.n_reactions(); ++j) {
        if (used_mask & (1u << j)) continue;
        const Reaction& R = big.reactions[j];
        bool ok = true;
        for (size_t a = 0; a < phi.size() && ok; ++a)
            ok = R.source.stoich[phi[a]] == r.source.stoich[a] &&
                 R.target.stoich[phi[a]] == r.target.stoich[a];
        if (ok && match_reactions(big, small, phi, next + 1, used_mask | (1u << j)))
            return true;
    }
    return false;
}

}  // namespace

bool core_contains(const Crn& big_core, const Crn& small_core) {
    const int nb = big_core.n_species, ns = small_core.n_species;
    if (ns > nb || small_core.n_reactions() > big_core.n_reactions()) return false;
    if (big_core.n_reactions() > 31)
        throw std::invalid_argument("core_contains: too many reactions");
    std::vector<int> phi(ns);
    std::function<bool(int, unsigned)> inject = [&](int depth, unsigned used) -> bool {
        if (depth == ns) return match_reactions(big_core, small_core, phi, 0, 0u);
        for (int v = 0; v < nb; ++v) {
            if (used & (1u << v)) continue;
            phi[depth] = v;
            if (inject(depth + 1, used | (1u << v))) return true;
        }
        return false;
    };
    return inject(0, 0u);
}

std::string CanonicalKey::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string h;
    h.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        h.push_back(digits[c >> 4]);
        h.push_back(digits[c & 0xF]);
    }
    return h;
}

CanonicalKey CanonicalKey::from_hex(const std::string& h) {
    if (h.size() % 2 != 0) throw std::invalid_argument("odd hex key length");
    auto val = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw std::invalid_argument("bad hex digit in key");
    };
    CanonicalKey k;
    k.bytes.reserve(h.size() / 2);
    for (size_t i = 0; i < h.size(); i += 2)
        k.bytes.push_back(static_cast<char>(val(h[i]) * 16 + val(h[i + 1])));
    return k;
}

std::vector<CanonicalKey> KeyStore::sorted_keys() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<CanonicalKey> out;
    out.reserve(set_.size());
    for (const auto& b : set_) out.push_back(CanonicalKey{b});
    std::sort(out.begin(), out.end());
    return out;
}

std::string write_key_file(const std::vector<CanonicalKey>& keys) {
    std::vector<std::string> hexes;
    hexes.reserve(keys.size());
    for (const auto& k : keys) hexes.push_back(k.hex());
    std::sort(hexes.begin(), hexes.end());
    hexes.erase(std::unique(hexes.begin(), hexes.end()), hexes.end());
    std::string out;
    for (const auto& h : hexes) {
        out += h;
        out += '\n';
    }
    return out;
}

std::vector<CanonicalKey> read_key_file(const std::string& text) {
    std::vector<CanonicalKey> keys;
    std::string line;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            if (!line.empty()) keys.push_back(CanonicalKey::from_hex(line));
            line.clear();
        } else {
            line.push_back(text[i]);
        }
    }
    return keys;
}

}  // namespace crnosc
