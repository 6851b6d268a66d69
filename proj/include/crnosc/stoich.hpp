#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <vector>

#include "crnosc/crn.hpp"

namespace crnosc {

using Rat = boost::rational<long long>;
using RatMatrix = std::vector<std::vector<Rat>>;
using IntMatrix = std::vector<std::vector<long long>>;

/// Left/right/net stoichiometric matrices with the exact rank of the net
/// matrix, computed over the rationals.
struct StoichMatrices {
    IntMatrix gamma_l;  // n x m
    IntMatrix gamma_r;  // n x m
    IntMatrix gamma;    // n x m, gamma = gamma_r - gamma_l
    int n = 0;
    int m = 0;
    int rank_r = 0;
};

/// Exact factorization gamma = gamma0 * q with gamma0 the leftmost pivot
/// columns of gamma (full column rank r) and q rational.
struct BasisFactorization {
    IntMatrix gamma0;          // n x r (original integer columns)
    RatMatrix q;               // r x m
    std::vector<int> pivot_cols;
};

StoichMatrices stoich_matrices(const Crn& crn);

/// Throws std::invalid_argument when rank is zero.
BasisFactorization basis_factorization(const StoichMatrices& sm);

/// Exact test for v in the column space of gamma.
bool in_span(const StoichMatrices& sm, const std::vector<long long>& v);

/// Exact rank of an arbitrary integer matrix.
int exact_rank(const IntMatrix& a);

}  // namespace crnosc
