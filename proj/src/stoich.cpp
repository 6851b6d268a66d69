#include "crnosc/stoich.hpp"

#include <stdexcept>

namespace crnosc {

namespace {

RatMatrix to_rat(const IntMatrix& a) {
    RatMatrix r(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        r[i].reserve(a[i].size());
        for (long long x : a[i]) r[i].emplace_back(x);
    }
    return r;
}

/// Gauss-Jordan to reduced row echelon form. Returns pivot column indices.
/// Pivoting is leftmost-column, first-nonzero-row: deterministic.
std::vector<int> rref(RatMatrix& a) {
    std::vector<int> pivots;
    if (a.empty()) return pivots;
    const int rows = static_cast<int>(a.size());
    const int cols = static_cast<int>(a[0].size());
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pr = -1;
        for (int i = row; i < rows; ++i)
            if (a[i][col] != Rat(0)) {
                pr = i;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[row], a[pr]);
        Rat inv = Rat(1) / a[row][col];
        for (int j = col; j < cols; ++j) a[row][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == row || a[i][col] == Rat(0)) continue;
            Rat f = a[i][col];
            for (int j = col; j < cols; ++j) a[i][j] -= f * a[row][j];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

StoichMatrices stoich_matrices(const Crn& crn) {
    StoichMatrices sm;
    sm.n = crn.n_species;
    sm.m = crn.n_reactions();
    sm.gamma_l.assign(sm.n, std::vector<long long>(sm.m, 0));
    sm.gamma_r.assign(sm.n, std::vector<long long>(sm.m, 0));
    sm.gamma.assign(sm.n, std::vector<long long>(sm.m, 0));
    for (int j = 0; j < sm.m; ++j) {
        const Reaction& r = crn.reactions[j];
        for (int i = 0; i < sm.n; ++i) {
            sm.gamma_l[i][j] = r.source.stoich[i];
            sm.gamma_r[i][j] = r.target.stoich[i];
            sm.gamma[i][j] = sm.gamma_r[i][j] - sm.gamma_l[i][j];
        }
    }
    sm.rank_r = exact_rank(sm.gamma);
    return sm;
}

int exact_rank(const IntMatrix& a) {
    if (a.empty() || a[0].empty()) return 0;
    RatMatrix w = to_rat(a);
    return static_cast<int>(rref(w).size());
}

BasisFactorization basis_factorization(const StoichMatrices& sm) {
    if (sm.rank_r == 0) throw std::invalid_argument("trivial stoichiometric subspace");
    RatMatrix w = to_rat(sm.gamma);
    BasisFactorization bf;
    bf.pivot_cols = rref(w);
    const int r = static_cast<int>(bf.pivot_cols.size());
    bf.gamma0.assign(sm.n, std::vector<long long>(r, 0));
    for (int k = 0; k < r; ++k)
        for (int i = 0; i < sm.n; ++i) bf.gamma0[i][k] = sm.gamma[i][bf.pivot_cols[k]];
    // Rows of the RREF express every column of gamma in the pivot basis.
    bf.q.assign(r, std::vector<Rat>(sm.m, Rat(0)));
    for (int k = 0; k < r; ++k)
        for (int j = 0; j < sm.m; ++j) bf.q[k][j] = w[k][j];
    return bf;
}

bool in_span(const StoichMatrices& sm, const std::vector<long long>& v) {
    if (static_cast<int>(v.size()) != sm.n)
        throw std::invalid_argument("vector length must equal species count");
    IntMatrix aug = sm.gamma;
    for (int i = 0; i < sm.n; ++i) aug[i].push_back(v[i]);
    return exact_rank(aug) == sm.rank_r;
}

}  // namespace crnosc
