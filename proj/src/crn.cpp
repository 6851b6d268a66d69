#include "crnosc/crn.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

namespace crnosc {

int Complex::total() const {
    return std::accumulate(stoich.begin(), stoich.end(), 0);
}

bool Complex::is_zero() const {
    return std::all_of(stoich.begin(), stoich.end(), [](int a) { return a == 0; });
}

void Crn::validate() const {
    std::set<Reaction> seen;
    for (const auto& r : reactions) {
        if (r.source.size() != n_species || r.target.size() != n_species)
            throw std::invalid_argument("complex length does not match species count");
        for (int a : r.source.stoich)
            if (a < 0) throw std::invalid_argument("negative stoichiometry");
        for (int a : r.target.stoich)
            if (a < 0) throw std::invalid_argument("negative stoichiometry");
        if (r.source == r.target)
            throw std::invalid_argument("source and target complexes must be distinct");
        if (!seen.insert(r).second)
            throw std::invalid_argument("duplicate reaction");
    }
    if (n_species < 0) throw std::invalid_argument("negative species count");
}

bool is_flow_reaction(const Reaction& rxn) {
    const bool src0 = rxn.source.is_zero();
    const bool tgt0 = rxn.target.is_zero();
    if (src0 == tgt0) return false;
    const Complex& c = src0 ? rxn.target : rxn.source;
    return c.total() == 1;
}

bool is_bimolecular(const Reaction& rxn) {
    return rxn.source.total() <= 2 && rxn.target.total() <= 2;
}

bool is_bimolecular(const Crn& crn) {
    return std::all_of(crn.reactions.begin(), crn.reactions.end(),
                       [](const Reaction& r) { return is_bimolecular(r); });
}

bool is_fully_open(const Crn& crn) {
    std::vector<bool> in(crn.n_species, false), out(crn.n_species, false);
    for (const auto& r : crn.reactions) {
        if (!is_flow_reaction(r)) continue;
        if (r.source.is_zero()) {
            for (int i = 0; i < crn.n_species; ++i)
                if (r.target.stoich[i] == 1) in[i] = true;
        } else {
            for (int i = 0; i < crn.n_species; ++i)
                if (r.source.stoich[i] == 1) out[i] = true;
        }
    }
    for (int i = 0; i < crn.n_species; ++i)
        if (!in[i] || !out[i]) return false;
    return true;
}

Crn fully_open_extension(const Crn& crn) {
    Crn ext = crn;
    std::set<Reaction> have(crn.reactions.begin(), crn.reactions.end());
    for (int i = 0; i < crn.n_species; ++i) {
        Reaction inflow{zero_complex(crn.n_species), unit_complex(crn.n_species, i)};
        Reaction outflow{unit_complex(crn.n_species, i), zero_complex(crn.n_species)};
        if (!have.count(outflow)) ext.reactions.push_back(outflow);
        if (!have.count(inflow)) ext.reactions.push_back(inflow);
    }
    return ext;
}

Crn nonflow_core(const Crn& crn) {
    Crn core;
    core.n_species = crn.n_species;
    for (const auto& r : crn.reactions)
        if (!is_flow_reaction(r)) core.reactions.push_back(r);
    return core;
}

Complex zero_complex(int n) { return Complex(std::vector<int>(n, 0)); }

Complex unit_complex(int n, int species) {
    Complex c = zero_complex(n);
    c.stoich[species] = 1;
    return c;
}

Reaction make_reaction(int n, const std::vector<std::pair<int, int>>& src,
                       const std::vector<std::pair<int, int>>& tgt) {
    Reaction r{zero_complex(n), zero_complex(n)};
    for (auto [i, a] : src) r.source.stoich[i] += a;
    for (auto [i, a] : tgt) r.target.stoich[i] += a;
    return r;
}

Crn permute_species(const Crn& crn, const std::vector<int>& perm) {
    Crn out;
    out.n_species = crn.n_species;
    out.reactions.reserve(crn.reactions.size());
    for (const auto& r : crn.reactions) {
        Reaction q{zero_complex(crn.n_species), zero_complex(crn.n_species)};
        for (int i = 0; i < crn.n_species; ++i) {
            q.source.stoich[perm[i]] = r.source.stoich[i];
            q.target.stoich[perm[i]] = r.target.stoich[i];
        }
        out.reactions.push_back(std::move(q));
    }
    return out;
}

std::string to_string(const Complex& c) {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < c.size(); ++i) {
        if (c.stoich[i] == 0) continue;
        if (!first) os << " + ";
        if (c.stoich[i] != 1) os << c.stoich[i] << ' ';
        os << 'X' << (i + 1);
        first = false;
    }
    if (first) os << '0';
    return os.str();
}

std::string to_string(const Reaction& r) {
    return to_string(r.source) + " -> " + to_string(r.target);
}

std::string to_text(const Crn& crn) {
    int max_ref = 0;
    for (const auto& r : crn.reactions)
        for (int i = 0; i < crn.n_species; ++i)
            if (r.source.stoich[i] != 0 || r.target.stoich[i] != 0)
                max_ref = std::max(max_ref, i + 1);
    std::ostringstream os;
    if (max_ref < crn.n_species) os << "species " << crn.n_species << '\n';
    for (const auto& r : crn.reactions) os << to_string(r) << '\n';
    return os.str();
}

namespace {

struct Parser {
    std::vector<std::pair<int, int>> parse_side(const std::string& s, int& max_species) {
        std::vector<std::pair<int, int>> terms;
        std::istringstream is(s);
        std::string tok;
        int coeff = 1;
        bool have_coeff = false;
        while (is >> tok) {
            if (tok == "+") {
                coeff = 1;
                have_coeff = false;
                continue;
            }
            if (tok == "0") continue;  // zero complex
            if (std::isdigit(static_cast<unsigned char>(tok[0])) &&
                tok.find_first_not_of("0123456789") == std::string::npos) {
                if (have_coeff) throw std::invalid_argument("two coefficients in a row: " + s);
                coeff = std::stoi(tok);
                have_coeff = true;
                continue;
            }
            if (tok[0] != 'X' && tok[0] != 'x')
                throw std::invalid_argument("bad species token '" + tok + "'");
            int idx = std::stoi(tok.substr(1));
            if (idx < 1) throw std::invalid_argument("species indices start at 1");
            max_species = std::max(max_species, idx);
            terms.emplace_back(idx - 1, coeff);
            coeff = 1;
            have_coeff = false;
        }
        if (have_coeff) throw std::invalid_argument("dangling coefficient in '" + s + "'");
        return terms;
    }
};

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    std::string s = pos == std::string::npos ? line : line.substr(0, pos);
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Crn parse_stanza(const std::vector<std::string>& lines) {
    Parser p;
    int declared = 0, max_species = 0;
    std::vector<std::pair<std::vector<std::pair<int, int>>, std::vector<std::pair<int, int>>>> raw;
    for (const auto& line : lines) {
        if (line.rfind("species", 0) == 0) {
            declared = std::stoi(line.substr(7));
            continue;
        }
        auto arrow = line.find("->");
        if (arrow == std::string::npos)
            throw std::invalid_argument("missing '->' in reaction line: " + line);
        raw.emplace_back(p.parse_side(line.substr(0, arrow), max_species),
                         p.parse_side(line.substr(arrow + 2), max_species));
    }
    Crn crn;
    crn.n_species = std::max(declared, max_species);
    for (const auto& [src, tgt] : raw)
        crn.reactions.push_back(make_reaction(crn.n_species, src, tgt));
    crn.validate();
    return crn;
}

}  // namespace

Crn parse_crn(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto s = strip_comment(line);
        if (!s.empty()) lines.push_back(s);
    }
    if (lines.empty()) throw std::invalid_argument("empty CRN text");
    return parse_stanza(lines);
}

std::vector<Crn> parse_crn_file(const std::string& text) {
    std::vector<Crn> crns;
    std::vector<std::string> stanza;
    std::istringstream is(text);
    std::string line;
    auto flush = [&] {
        if (!stanza.empty()) {
            crns.push_back(parse_stanza(stanza));
            stanza.clear();
        }
    };
    while (std::getline(is, line)) {
        auto s = strip_comment(line);
        if (s.empty())
            flush();
        else
            stanza.push_back(s);
    }
    flush();
    return crns;
}

std::string to_text(const std::vector<Crn>& crns) {
    std::string out;
    for (const auto& c : crns) {
        out += to_text(c);
        out += '\n';
    }
    return out;
}

}  // namespace crnosc
