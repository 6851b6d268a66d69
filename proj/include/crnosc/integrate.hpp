#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "crnosc/kinetics.hpp"

namespace crnosc {

struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-10;
    double max_time = 100.0;
    long max_steps = 2'000'000;
    bool stiff = false;
    double state_cap = 1e6;     // inf-norm bound; beyond it the run is Unbounded
    double init_step = 0.0;     // 0 = automatic
    double fixed_step = 0.0;    // > 0 forces constant steps (testing hook)
    bool enforce_positive = false;
    bool allow_implicit_fallback = true;
};

enum class TrajStatus { Completed, Unbounded, StepLimit };

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    TrajStatus status = TrajStatus::Completed;
    bool used_implicit = false;
    long n_steps = 0;
    long n_rejected = 0;

    const Eigen::VectorXd& back() const { return states.back(); }
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;
using OdeJac = std::function<void(double t, const Eigen::VectorXd& y, Eigen::MatrixXd& jac)>;

/// One accepted step with a continuous extension on [t, t+h].
struct StepRecord {
    double t = 0;
    double h = 0;
    const Eigen::VectorXd* y0 = nullptr;
    const Eigen::VectorXd* y1 = nullptr;

    /// Interpolated state at t + theta*h, theta in [0,1].
    std::function<Eigen::VectorXd(double)> dense;
};

/// Adaptive integrator: Dormand-Prince 5(4) with the classic continuous
/// extension, or an L-stable three-stage SDIRK of order 3 with analytic
/// Jacobian when `stiff` is set. The explicit path falls back to the
/// implicit one after persistent step rejection.
class AdaptiveIntegrator {
  public:
    AdaptiveIntegrator(OdeRhs rhs, OdeJac jac, IntegratorConfig cfg);

    /// Integrates from (t0, y0) toward t_end, invoking `on_step` after every
    /// accepted step; return false from the callback to stop early. Returns
    /// the status; `y` and `t` end at the last accepted state.
    TrajStatus run(double t0, const Eigen::VectorXd& y0, double t_end,
                   const std::function<bool(const StepRecord&)>& on_step);

    double t() const { return t_; }
    const Eigen::VectorXd& y() const { return y_; }
    long steps_taken() const { return n_steps_; }
    long steps_rejected() const { return n_rejected_; }
    bool used_implicit() const { return used_implicit_; }

  private:
    OdeRhs rhs_;
    OdeJac jac_;
    IntegratorConfig cfg_;
    double t_ = 0;
    Eigen::VectorXd y_;
    long n_steps_ = 0, n_rejected_ = 0;
    bool used_implicit_ = false;

    double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                      const Eigen::VectorXd& y1) const;
    bool state_ok(const Eigen::VectorXd& y) const;
    double initial_step(double t0, const Eigen::VectorXd& y0, double dir) const;
    TrajStatus run_explicit(double t_end, const std::function<bool(const StepRecord&)>& on_step,
                            bool allow_fallback);
    TrajStatus run_implicit(double t_end, const std::function<bool(const StepRecord&)>& on_step);
};

/// Convenience wrappers.

/// Terminal state of the flow map after time T (status must be Completed).
Eigen::VectorXd flow(const OdeRhs& rhs, const OdeJac& jac, const IntegratorConfig& cfg,
                     const Eigen::VectorXd& y0, double T);

/// Simulate a CRN vector field from x0 over cfg.max_time, recording sampled
/// states. Power-law kinetics enforce positivity of the state.
Trajectory integrate(const VectorField& vf, const Eigen::VectorXd& x0,
                     const IntegratorConfig& cfg);

}  // namespace crnosc
