#include "crnosc/integrate.hpp"

#include <cmath>
#include <stdexcept>

namespace crnosc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat, for the embedded 4th-order error estimate
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
// continuous extension coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// Three-stage, stiffly accurate, L-stable SDIRK of order 3 with an embedded
// second-order weight vector for error control.
const double kGamma = 0.4358665215084590;
const double sc2 = (1.0 + kGamma) / 2.0;
const double sa21 = (1.0 - kGamma) / 2.0;
const double sb1 = -(6.0 * kGamma * kGamma - 16.0 * kGamma + 1.0) / 4.0;
const double sb2 = (6.0 * kGamma * kGamma - 20.0 * kGamma + 5.0) / 4.0;
const double sb3 = kGamma;
const double sbh2 = (1.0 - 2.0 * kGamma) / (1.0 - kGamma);
const double sbh1 = 1.0 - sbh2;

}  // namespace

AdaptiveIntegrator::AdaptiveIntegrator(OdeRhs rhs, OdeJac jac, IntegratorConfig cfg)
    : rhs_(std::move(rhs)), jac_(std::move(jac)), cfg_(cfg) {}

double AdaptiveIntegrator::error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0,
                                      const Eigen::VectorXd& y1) const {
    double acc = 0;
    for (int i = 0; i < err.size(); ++i) {
        double sc = cfg_.atol + cfg_.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        double q = err(i) / sc;
        acc += q * q;
    }
    return std::sqrt(acc / err.size());
}

bool AdaptiveIntegrator::state_ok(const Eigen::VectorXd& y) const {
    for (int i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y(i))) return false;
        if (cfg_.enforce_positive && y(i) <= 0) return false;
    }
    return true;
}

double AdaptiveIntegrator::initial_step(double t0, const Eigen::VectorXd& y0, double dir) const {
    if (cfg_.init_step > 0) return cfg_.init_step * dir;
    Eigen::VectorXd f0(y0.size());
    rhs_(t0, y0, f0);
    double d0 = 0, d1n = 0;
    for (int i = 0; i < y0.size(); ++i) {
        double sc = cfg_.atol + cfg_.rtol * std::abs(y0(i));
        d0 = std::max(d0, std::abs(y0(i)) / sc);
        d1n = std::max(d1n, std::abs(f0(i)) / sc);
    }
    double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    return std::min(h, 0.1) * dir;
}

TrajStatus AdaptiveIntegrator::run(double t0, const Eigen::VectorXd& y0, double t_end,
                                   const std::function<bool(const StepRecord&)>& on_step) {
    t_ = t0;
    y_ = y0;
    n_steps_ = n_rejected_ = 0;
    used_implicit_ = false;
    if (!state_ok(y_)) throw std::invalid_argument("integrate: bad initial state");
    if (cfg_.stiff) {
        used_implicit_ = true;
        return run_implicit(t_end, on_step);
    }
    return run_explicit(t_end, on_step, cfg_.allow_implicit_fallback);
}

TrajStatus AdaptiveIntegrator::run_explicit(
    double t_end, const std::function<bool(const StepRecord&)>& on_step, bool allow_fallback) {
    const int n = static_cast<int>(y_.size());
    const double dir = t_end >= t_ ? 1.0 : -1.0;
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y1(n), err(n);
    rhs_(t_, y_, k1);
    double h = cfg_.fixed_step > 0 ? cfg_.fixed_step * dir : initial_step(t_, y_, dir);
    int consecutive_rejects = 0;

    while (dir * (t_end - t_) > 1e-14 * std::max(1.0, std::abs(t_))) {
        if (n_steps_ + n_rejected_ >= cfg_.max_steps) return TrajStatus::StepLimit;
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t_))) {
            if (allow_fallback) {
                used_implicit_ = true;
                return run_implicit(t_end, on_step);
            }
            return TrajStatus::StepLimit;
        }
        if (dir * (t_ + h - t_end) > 0) h = t_end - t_;

        // stages
        ytmp = y_ + h * a21 * k1;
        rhs_(t_ + c2 * h, ytmp, k2);
        ytmp = y_ + h * (a31 * k1 + a32 * k2);
        rhs_(t_ + c3 * h, ytmp, k3);
        ytmp = y_ + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs_(t_ + c4 * h, ytmp, k4);
        ytmp = y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs_(t_ + c5 * h, ytmp, k5);
        ytmp = y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs_(t_ + h, ytmp, k6);
        y1 = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs_(t_ + h, y1, k7);  // FSAL
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        bool finite = y1.allFinite() && k7.allFinite();
        double en = finite ? error_norm(err, y_, y1) : 1e10;
        bool accept = cfg_.fixed_step > 0 ? finite : (en <= 1.0 && finite && state_ok(y1));
        if (cfg_.fixed_step == 0 && finite && !state_ok(y1)) en = std::max(en, 2.0);

        if (accept) {
            consecutive_rejects = 0;
            ++n_steps_;
            StepRecord rec;
            rec.t = t_;
            rec.h = h;
            rec.y0 = &y_;
            rec.y1 = &y1;
            const double hstep = h;
            const Eigen::VectorXd ys = y_;
            // classic 4th-order continuous extension
            Eigen::VectorXd rc1 = ys;
            Eigen::VectorXd rc2 = y1 - ys;
            Eigen::VectorXd rc3 = hstep * k1 - rc2;
            Eigen::VectorXd rc4 = rc2 - hstep * k7 - rc3;
            Eigen::VectorXd rc5 =
                hstep * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            rec.dense = [rc1, rc2, rc3, rc4, rc5](double th) {
                double th1 = 1.0 - th;
                return Eigen::VectorXd(rc1 +
                                       th * (rc2 + th1 * (rc3 + th * (rc4 + th1 * rc5))));
            };
            const bool capped = y1.lpNorm<Eigen::Infinity>() > cfg_.state_cap;
            const bool keep_going = on_step(rec);
            t_ += h;
            y_.swap(y1);
            k1.swap(k7);
            if (capped) return TrajStatus::Unbounded;
            if (!keep_going) return TrajStatus::Completed;
            if (cfg_.fixed_step == 0) {
                double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
                h *= std::clamp(fac, 0.2, 5.0);
            }
        } else {
            ++n_rejected_;
            ++consecutive_rejects;
            if (consecutive_rejects > 15 && allow_fallback) {
                used_implicit_ = true;
                return run_implicit(t_end, on_step);
            }
            double fac = finite ? 0.9 * std::pow(en, -0.2) : 0.1;
            h *= std::clamp(fac, 0.1, 0.5);
        }
    }
    return TrajStatus::Completed;
}

TrajStatus AdaptiveIntegrator::run_implicit(
    double t_end, const std::function<bool(const StepRecord&)>& on_step) {
    const int n = static_cast<int>(y_.size());
    const double dir = t_end >= t_ ? 1.0 : -1.0;
    Eigen::VectorXd f1(n), f2(n), f3(n), ytmp(n), y1(n), err(n), rhs_vec(n), dz(n);
    Eigen::MatrixXd jac(n, n), w(n, n);
    double h = cfg_.fixed_step > 0 ? cfg_.fixed_step * dir : initial_step(t_, y_, dir);

    auto solve_stage = [&](double tc, const Eigen::VectorXd& base, Eigen::VectorXd& stage_f,
                           const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) -> bool {
        // solve Y = base + h*gamma*f(tc, Y) by simplified Newton; stage_f = f(tc, Y)
        Eigen::VectorXd yk = y_;  // warm start from step base
        for (int it = 0; it < 12; ++it) {
            rhs_(tc, yk, stage_f);
            rhs_vec = base + h * kGamma * stage_f - yk;
            dz = lu.solve(rhs_vec);
            yk += dz;
            if (!yk.allFinite()) return false;
            double nd = 0;
            for (int i = 0; i < n; ++i)
                nd = std::max(nd, std::abs(dz(i)) / (cfg_.atol + cfg_.rtol * std::abs(yk(i))));
            if (nd < 0.03) {
                rhs_(tc, yk, stage_f);
                return true;
            }
        }
        return false;
    };

    while (dir * (t_end - t_) > 1e-14 * std::max(1.0, std::abs(t_))) {
        if (n_steps_ + n_rejected_ >= cfg_.max_steps) return TrajStatus::StepLimit;
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t_))) return TrajStatus::StepLimit;
        if (dir * (t_ + h - t_end) > 0) h = t_end - t_;

        jac_(t_, y_, jac);
        w = Eigen::MatrixXd::Identity(n, n) - h * kGamma * jac;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);

        bool ok = solve_stage(t_ + kGamma * h, y_, f1, lu);
        if (ok) {
            ytmp = y_ + h * sa21 * f1;
            ok = solve_stage(t_ + sc2 * h, ytmp, f2, lu);
        }
        if (ok) {
            ytmp = y_ + h * (sb1 * f1 + sb2 * f2);
            ok = solve_stage(t_ + h, ytmp, f3, lu);
        }
        double en = 1e10;
        if (ok) {
            y1 = y_ + h * (sb1 * f1 + sb2 * f2 + sb3 * f3);
            err = h * ((sb1 - sbh1) * f1 + (sb2 - sbh2) * f2 + sb3 * f3);
            // damp the estimate through the stage solver for stiff stability
            err = lu.solve(err);
            en = y1.allFinite() ? error_norm(err, y_, y1) : 1e10;
            if (!state_ok(y1)) en = std::max(en, 2.0);
        }
        bool accept = cfg_.fixed_step > 0 ? ok : (ok && en <= 1.0);

        if (accept) {
            ++n_steps_;
            StepRecord rec;
            rec.t = t_;
            rec.h = h;
            rec.y0 = &y_;
            rec.y1 = &y1;
            const Eigen::VectorXd ys = y_, ye = y1;
            Eigen::VectorXd fs(n), fe(n);
            rhs_(t_, ys, fs);
            rhs_(t_ + h, ye, fe);
            const double hstep = h;
            rec.dense = [ys, ye, fs, fe, hstep](double th) {
                // cubic Hermite
                double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
                double h10 = th * (1 - th) * (1 - th);
                double h01 = th * th * (3 - 2 * th);
                double h11 = th * th * (th - 1);
                return Eigen::VectorXd(h00 * ys + h10 * hstep * fs + h01 * ye +
                                       h11 * hstep * fe);
            };
            const bool capped = y1.lpNorm<Eigen::Infinity>() > cfg_.state_cap;
            const bool keep_going = on_step(rec);
            t_ += h;
            y_.swap(y1);
            if (capped) return TrajStatus::Unbounded;
            if (!keep_going) return TrajStatus::Completed;
            if (cfg_.fixed_step == 0) {
                double fac = 0.9 * std::pow(std::max(en, 1e-10), -1.0 / 3.0);
                h *= std::clamp(fac, 0.2, 4.0);
            }
        } else {
            ++n_rejected_;
            double fac = ok ? 0.9 * std::pow(en, -1.0 / 3.0) : 0.25;
            h *= std::clamp(fac, 0.1, 0.5);
        }
    }
    return TrajStatus::Completed;
}

Eigen::VectorXd flow(const OdeRhs& rhs, const OdeJac& jac, const IntegratorConfig& cfg,
                     const Eigen::VectorXd& y0, double T) {
    AdaptiveIntegrator integ(rhs, jac, cfg);
    TrajStatus st = integ.run(0.0, y0, T, [](const StepRecord&) { return true; });
    if (st != TrajStatus::Completed) throw std::runtime_error("flow: integration failed");
    return integ.y();
}

Trajectory integrate(const VectorField& vf, const Eigen::VectorXd& x0,
                     const IntegratorConfig& cfg_in) {
    IntegratorConfig cfg = cfg_in;
    if (!vf.integer_exponents()) cfg.enforce_positive = true;
    OdeRhs rhs = [&vf](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy = vf.field(y);
    };
    OdeJac jac = [&vf](double, const Eigen::VectorXd& y, Eigen::MatrixXd& J) {
        J = vf.jacobian(y);
    };
    AdaptiveIntegrator integ(rhs, jac, cfg);
    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(x0);
    size_t stride = 1, countdown = 1;
    TrajStatus st = integ.run(0.0, x0, cfg.max_time, [&](const StepRecord& rec) {
        if (--countdown == 0) {
            traj.times.push_back(rec.t + rec.h);
            traj.states.push_back(*rec.y1);
            if (traj.states.size() > 40000) {
                // thin by stride doubling, keeping endpoints
                std::vector<double> ts;
                std::vector<Eigen::VectorXd> xs;
                for (size_t i = 0; i < traj.times.size(); i += 2) {
                    ts.push_back(traj.times[i]);
                    xs.push_back(traj.states[i]);
                }
                traj.times.swap(ts);
                traj.states.swap(xs);
                stride *= 2;
            }
            countdown = stride;
        }
        return true;
    });
    if (traj.times.back() != integ.t()) {
        traj.times.push_back(integ.t());
        traj.states.push_back(integ.y());
    }
    traj.status = st;
    traj.used_implicit = integ.used_implicit();
    traj.n_steps = integ.steps_taken();
    traj.n_rejected = integ.steps_rejected();
    return traj;
}

}  // namespace crnosc
