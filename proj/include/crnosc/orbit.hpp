#pragma once

#include <complex>
#include <string>

#include "crnosc/integrate.hpp"

namespace crnosc {

enum class TrajectoryClass { Converged, Unbounded, OscillatoryCandidate, Undetermined };

std::string to_string(TrajectoryClass c);

struct ClassifyOptions {
    double tail_fraction = 0.5;  // fraction of the run treated as tail
    double conv_tol = 1e-4;      // relative tail amplitude below which we call it converged
    double decay_factor = 0.8;   // second-half amplitude must not have shrunk below this
    int min_crossings = 3;       // recurrent section crossings required of a candidate
};

/// Tail-based trajectory classification: converged, unbounded, a bounded
/// apparently nonconvergent oscillation candidate, or undetermined.
TrajectoryClass classify(const Trajectory& traj, const ClassifyOptions& opts = {});

enum class OrbitVerdict { SPPO, NPPO, Degenerate, NotPeriodic };

std::string to_string(OrbitVerdict v);

struct CertifyOptions {
    double trivial_tol = 1e-6;  // distance of the trivial multiplier from 1
    double margin = 1e-3;       // unit-circle margin for the remaining multipliers
};

/// A located periodic orbit with its Floquet data. `reduced_multipliers` are
/// the r multipliers relative to the positive stoichiometry class;
/// `full_multipliers` come from the full n-dimensional variational equation.
struct OrbitRecord {
    bool found = false;
    OrbitVerdict verdict = OrbitVerdict::NotPeriodic;
    Eigen::VectorXd point;  // a point on the orbit, full coordinates
    double period = 0;
    std::vector<std::complex<double>> reduced_multipliers;
    std::vector<std::complex<double>> full_multipliers;
    double shooting_residual = 0;
    double trivial_error = 0;        // |mu_trivial - 1|
    double liouville_rel_error = 0;  // |det Z(T) - exp(int tr)| / |det Z(T)|
    int rank = 0;
    std::string note;

    std::string to_json() const;
};

struct LocateOptions {
    double orbit_tol = 1e-9;      // shooting residual target (relative to state scale)
    double min_period = 1e-3;
    double min_amplitude = 1e-3;  // relative orbit amplitude below which we reject
    double search_time = 300.0;   // time budget for the return-crossing search
    int max_newton = 40;
    double period_hint = 0.0;     // skip the crossing search when > 0
};

/// Reduced coordinates z on the positive stoichiometry class through
/// `anchor`: x = anchor + gamma0 * z with z' = q v(x).
struct ReducedCoords {
    Eigen::MatrixXd gamma0;  // n x r
    Eigen::MatrixXd qmat;    // r x m
    Eigen::VectorXd anchor;  // n
    int r = 0;
};

/// Pivot-column basis (deterministic) anchored at `anchor`.
ReducedCoords make_reduced(const VectorField& vf, const Eigen::VectorXd& anchor);

/// Custom basis; gamma0's columns must span the stoichiometric subspace.
ReducedCoords make_reduced(const VectorField& vf, const Eigen::VectorXd& anchor,
                           const Eigen::MatrixXd& gamma0);

/// Locate and certify a periodic orbit near `seed`: Poincare section through
/// the seed, damped Newton shooting on (point, period) in reduced
/// coordinates, least-period check, then Floquet certification.
OrbitRecord locate_orbit(const VectorField& vf, const Eigen::VectorXd& seed,
                         const IntegratorConfig& cfg, const LocateOptions& lopts = {},
                         const CertifyOptions& copts = {});

/// Fundamental solution of the full variational equation over one period,
/// with the Abel/Liouville determinant comparison integrated alongside.
struct MonodromyResult {
    Eigen::MatrixXd z_T;          // n x n
    double logdet_predicted = 0;  // int_0^T trace DF dt
    double liouville_rel_error = 0;
};

MonodromyResult monodromy(const VectorField& vf, const OrbitRecord& orbit,
                          const IntegratorConfig& cfg);

/// Multipliers of the reduced variational equation for a given basis and
/// anchor on the orbit's class. Invariant (as a multiset) to both choices.
std::vector<std::complex<double>> reduced_multipliers(const VectorField& vf,
                                                      const OrbitRecord& orbit,
                                                      const ReducedCoords& rc,
                                                      const IntegratorConfig& cfg);

/// Verdict from a reduced multiplier multiset: exactly one trivial
/// multiplier near 1; SPPO when the rest are inside the unit circle by the
/// margin, NPPO when they avoid an annulus around it, Degenerate otherwise.
OrbitVerdict certify_multipliers(const std::vector<std::complex<double>>& reduced,
                                 const CertifyOptions& copts, double* trivial_err = nullptr);

/// Re-runs certification on an existing record (e.g. with other margins).
OrbitRecord certify(const VectorField& vf, OrbitRecord orbit, const CertifyOptions& copts,
                    const IntegratorConfig& cfg);

/// Generic autonomous field, used for non-CRN fixtures.
struct GenericField {
    int dim = 0;
    OdeRhs rhs;
    OdeJac jac;
};

OrbitRecord locate_orbit_generic(const GenericField& field, const Eigen::VectorXd& seed,
                                 const IntegratorConfig& cfg, const LocateOptions& lopts = {},
                                 const CertifyOptions& copts = {});

}  // namespace crnosc
