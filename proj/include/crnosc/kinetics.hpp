#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>

#include "crnosc/crn.hpp"
#include "crnosc/stoich.hpp"

namespace crnosc {

enum class KineticsClass { MassAction, PhysicalPowerLaw, FixedPowerLaw };

std::string to_string(KineticsClass c);
KineticsClass kinetics_class_from_string(const std::string& s);

/// Rate law v(x) = K o x^M. Mass action pins M to the transpose of the left
/// stoichiometric matrix; physical power law pins only its sign pattern.
struct KineticsSpec {
    KineticsClass cls = KineticsClass::MassAction;
    Eigen::VectorXd K;  // length m, positive
    Eigen::MatrixXd M;  // m x n
};

struct SampleRanges {
    double k_min = 0.01, k_max = 10.0;
    double x_min = 0.01, x_max = 10.0;
    double exp_min = 0.5, exp_max = 3.0;
};

/// A CRN together with a concrete rate law: the ODE right-hand side
/// x' = Gamma v(x) with analytic Jacobian. Immutable and shareable.
class VectorField {
  public:
    VectorField(Crn crn, KineticsSpec kin);

    const Crn& crn() const { return crn_; }
    const KineticsSpec& kinetics() const { return kin_; }
    const StoichMatrices& stoich() const { return sm_; }
    const Eigen::MatrixXd& gamma() const { return gamma_; }
    int n() const { return sm_.n; }
    int m() const { return sm_.m; }

    Eigen::VectorXd rate(const Eigen::VectorXd& x) const;
    Eigen::VectorXd field(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd dv(const Eigen::VectorXd& x) const;        // m x n
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;  // Gamma Dv

    /// Whether every exponent is a small nonnegative integer; such rates are
    /// evaluated by repeated multiplication and are defined on the closed
    /// orthant.
    bool integer_exponents() const { return integer_exponents_; }

  private:
    Crn crn_;
    KineticsSpec kin_;
    StoichMatrices sm_;
    Eigen::MatrixXd gamma_;
    bool integer_exponents_ = false;
};

/// Validates the class constraints (K > 0; mass action M = Gamma_l^T;
/// physical power law sign pattern). Throws std::invalid_argument.
void validate_kinetics(const Crn& crn, const KineticsSpec& kin);

KineticsSpec mass_action(const Crn& crn, const Eigen::VectorXd& K);

/// Random parameters per the simulation protocol: uniform rate constants,
/// and for power-law classes uniform exponent magnitudes with the sign
/// pattern of Gamma_l^T. Deterministic given the rng state.
KineticsSpec sample_params(const Crn& crn, KineticsClass cls, std::mt19937_64& rng,
                           const SampleRanges& ranges = {});

Eigen::VectorXd sample_positive_point(int n, std::mt19937_64& rng,
                                      const SampleRanges& ranges = {});

/// Exponent/rate restriction of an induced subnetwork: rows beta, columns
/// alpha of the big exponent matrix, K restricted to beta.
KineticsSpec derived_kinetics(const std::vector<int>& alpha, const std::vector<int>& beta,
                              const KineticsSpec& big);

std::string kinetics_to_json(const KineticsSpec& kin);
KineticsSpec kinetics_from_json(const std::string& text);

}  // namespace crnosc
