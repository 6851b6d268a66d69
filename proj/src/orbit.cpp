#include "crnosc/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "crnosc/eig.hpp"

namespace crnosc {

std::string to_string(TrajectoryClass c) {
    switch (c) {
        case TrajectoryClass::Converged: return "converged";
        case TrajectoryClass::Unbounded: return "unbounded";
        case TrajectoryClass::OscillatoryCandidate: return "oscillatory-candidate";
        case TrajectoryClass::Undetermined: return "undetermined";
    }
    return "?";
}

std::string to_string(OrbitVerdict v) {
    switch (v) {
        case OrbitVerdict::SPPO: return "SPPO";
        case OrbitVerdict::NPPO: return "NPPO";
        case OrbitVerdict::Degenerate: return "degenerate";
        case OrbitVerdict::NotPeriodic: return "not-periodic";
    }
    return "?";
}

namespace {

double window_amplitude(const Trajectory& traj, size_t lo, size_t hi) {
    // max over coordinates of (max - min) / (1 + |mean|)
    if (hi <= lo + 1) return 0.0;
    const int n = static_cast<int>(traj.states[lo].size());
    double amp = 0;
    for (int i = 0; i < n; ++i) {
        double mn = traj.states[lo](i), mx = mn, mean = 0;
        for (size_t s = lo; s < hi; ++s) {
            double v = traj.states[s](i);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            mean += v;
        }
        mean /= static_cast<double>(hi - lo);
        amp = std::max(amp, (mx - mn) / (1.0 + std::abs(mean)));
    }
    return amp;
}

}  // namespace

TrajectoryClass classify(const Trajectory& traj, const ClassifyOptions& opts) {
    if (traj.status == TrajStatus::Unbounded) return TrajectoryClass::Unbounded;
    if (traj.states.size() < 8 || traj.status == TrajStatus::StepLimit)
        return TrajectoryClass::Undetermined;
    const double t_end = traj.times.back();
    const double t_tail = t_end * (1.0 - opts.tail_fraction);
    size_t lo = std::lower_bound(traj.times.begin(), traj.times.end(), t_tail) -
                traj.times.begin();
    if (traj.times.size() - lo < 6) return TrajectoryClass::Undetermined;
    const size_t mid = lo + (traj.times.size() - lo) / 2;
    const double amp1 = window_amplitude(traj, lo, mid);
    const double amp2 = window_amplitude(traj, mid, traj.times.size());
    if (amp2 < opts.conv_tol) return TrajectoryClass::Converged;
    if (amp2 < opts.decay_factor * amp1) return TrajectoryClass::Undetermined;

    // recurrent crossings of the plane through the tail mean, normal along
    // the dominant tail direction
    const int n = static_cast<int>(traj.states[0].size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (size_t s = mid; s < traj.states.size(); ++s) mean += traj.states[s];
    mean /= static_cast<double>(traj.states.size() - mid);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    for (size_t s = mid; s < traj.states.size(); ++s) {
        Eigen::VectorXd d = traj.states[s] - mean;
        if (d.norm() > dir.norm()) dir = d;
    }
    if (dir.norm() == 0) return TrajectoryClass::Undetermined;
    dir.normalize();
    int crossings = 0;
    int last_sign = 0;
    for (size_t s = mid; s < traj.states.size(); ++s) {
        double v = dir.dot(traj.states[s] - mean);
        int sg = v > 0 ? 1 : (v < 0 ? -1 : 0);
        if (sg != 0 && last_sign != 0 && sg != last_sign) ++crossings;
        if (sg != 0) last_sign = sg;
    }
    if (crossings >= opts.min_crossings) return TrajectoryClass::OscillatoryCandidate;
    return TrajectoryClass::Undetermined;
}

// ---- reduced coordinates ----

ReducedCoords make_reduced(const VectorField& vf, const Eigen::VectorXd& anchor) {
    const auto bf = basis_factorization(vf.stoich());
    const int n = vf.n(), r = static_cast<int>(bf.pivot_cols.size());
    ReducedCoords rc;
    rc.r = r;
    rc.anchor = anchor;
    rc.gamma0.resize(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) rc.gamma0(i, j) = static_cast<double>(bf.gamma0[i][j]);
    rc.qmat.resize(r, vf.m());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < vf.m(); ++j)
            rc.qmat(i, j) = boost::rational_cast<double>(bf.q[i][j]);
    return rc;
}

ReducedCoords make_reduced(const VectorField& vf, const Eigen::VectorXd& anchor,
                           const Eigen::MatrixXd& gamma0) {
    ReducedCoords rc;
    rc.r = static_cast<int>(gamma0.cols());
    rc.anchor = anchor;
    rc.gamma0 = gamma0;
    // Q solves gamma0 * Q = gamma exactly when the columns span im(gamma)
    Eigen::MatrixXd q = gamma0.completeOrthogonalDecomposition().solve(vf.gamma());
    if ((gamma0 * q - vf.gamma()).lpNorm<Eigen::Infinity>() > 1e-8)
        throw std::invalid_argument("gamma0 does not span the stoichiometric subspace");
    rc.qmat = q;
    return rc;
}

namespace {

// Shooting machinery over a generic field of dimension d.
struct Shooter {
    const GenericField& field;
    IntegratorConfig cfg;

    // flow map only
    Eigen::VectorXd flow_to(const Eigen::VectorXd& z0, double T) const {
        OdeRhs rhs = field.rhs;
        OdeJac jac = field.jac;
        AdaptiveIntegrator integ(rhs, jac, cfg);
        TrajStatus st = integ.run(0.0, z0, T, [](const StepRecord&) { return true; });
        if (st != TrajStatus::Completed) throw std::runtime_error("shooting flow failed");
        return integ.y();
    }

    // flow map and monodromy via the augmented variational system
    void flow_and_monodromy(const Eigen::VectorXd& z0, double T, Eigen::VectorXd& z_out,
                            Eigen::MatrixXd& m_out, double* amplitude = nullptr) const {
        const int d = field.dim;
        Eigen::VectorXd aug0(d + d * d);
        aug0.head(d) = z0;
        Eigen::Map<Eigen::MatrixXd>(aug0.data() + d, d, d) =
            Eigen::MatrixXd::Identity(d, d);
        Eigen::VectorXd lo = z0, hi = z0;
        OdeRhs rhs = [this, d](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
            dy.resize(d + d * d);
            Eigen::VectorXd z = y.head(d);
            Eigen::VectorXd dz(d);
            field.rhs(t, z, dz);
            dy.head(d) = dz;
            Eigen::MatrixXd J(d, d);
            field.jac(t, z, J);
            Eigen::Map<const Eigen::MatrixXd> Z(y.data() + d, d, d);
            Eigen::Map<Eigen::MatrixXd>(dy.data() + d, d, d) = J * Z;
        };
        OdeJac jac = [](double, const Eigen::VectorXd&, Eigen::MatrixXd&) {
            throw std::runtime_error("augmented system has no analytic jacobian");
        };
        IntegratorConfig acfg = cfg;
        acfg.stiff = false;
        acfg.allow_implicit_fallback = false;
        AdaptiveIntegrator integ(rhs, jac, acfg);
        TrajStatus st = integ.run(0.0, aug0, T, [&](const StepRecord& rec) {
            for (int i = 0; i < d; ++i) {
                lo(i) = std::min(lo(i), (*rec.y1)(i));
                hi(i) = std::max(hi(i), (*rec.y1)(i));
            }
            return true;
        });
        if (st != TrajStatus::Completed) throw std::runtime_error("monodromy integration failed");
        z_out = integ.y().head(d);
        m_out = Eigen::Map<const Eigen::MatrixXd>(integ.y().data() + d, d, d);
        if (amplitude) {
            double amp = 0;
            for (int i = 0; i < d; ++i)
                amp = std::max(amp, (hi(i) - lo(i)) / (1.0 + std::abs(z0(i))));
            *amplitude = amp;
        }
    }
};

struct CrossingSearch {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> points;
};

// Find same-direction crossings of the section u . (z - z_ref) = 0.
CrossingSearch find_crossings(const GenericField& field, const IntegratorConfig& cfg,
                              const Eigen::VectorXd& z_ref, const Eigen::VectorXd& u,
                              double t_budget, int max_crossings) {
    CrossingSearch out;
    AdaptiveIntegrator integ(field.rhs, field.jac, cfg);
    double s_prev = 0;
    bool have_prev = false;
    integ.run(0.0, z_ref, t_budget, [&](const StepRecord& rec) {
        double s_new = u.dot(*rec.y1 - z_ref);
        if (have_prev && s_prev < 0 && s_new >= 0) {
            // refine within the step by bisection on the dense output
            double a = 0, b = 1;
            for (int it = 0; it < 60; ++it) {
                double m = (a + b) / 2;
                double sm = u.dot(rec.dense(m) - z_ref);
                (sm < 0 ? a : b) = m;
            }
            double theta = (a + b) / 2;
            out.times.push_back(rec.t + theta * rec.h);
            out.points.push_back(rec.dense(theta));
            if (static_cast<int>(out.times.size()) >= max_crossings) return false;
        }
        s_prev = s_new;
        have_prev = true;
        return true;
    });
    return out;
}

OrbitRecord shoot(const GenericField& field, const Eigen::VectorXd& seed,
                  const IntegratorConfig& cfg, const LocateOptions& lopts,
                  const CertifyOptions& copts) {
    OrbitRecord rec;
    rec.rank = field.dim;
    const int d = field.dim;
    Eigen::VectorXd f0(d);
    field.rhs(0.0, seed, f0);
    if (f0.norm() == 0) {
        rec.note = "seed is an equilibrium";
        return rec;
    }
    Eigen::VectorXd u = f0.normalized();

    double T = lopts.period_hint;
    Eigen::VectorXd z = seed;
    if (T <= 0) {
        auto crossings = find_crossings(field, cfg, seed, u, lopts.search_time, 8);
        if (crossings.times.size() < 2) {
            rec.note = "no recurrent section crossings";
            return rec;
        }
        std::vector<double> gaps;
        for (size_t i = 1; i < crossings.times.size(); ++i)
            gaps.push_back(crossings.times[i] - crossings.times[i - 1]);
        std::sort(gaps.begin(), gaps.end());
        T = gaps[gaps.size() / 2];
        z = crossings.points.back();
    }
    if (T < lopts.min_period) {
        rec.note = "return time below the minimum period";
        return rec;
    }

    Shooter shooter{field, cfg};
    const Eigen::VectorXd z_ref = z;
    Eigen::VectorXd phi(d);
    Eigen::MatrixXd mono(d, d);
    double amplitude = 0;

    auto residual = [&](const Eigen::VectorXd& zz, double TT) {
        Eigen::VectorXd r(d + 1);
        try {
            Eigen::VectorXd p2 = shooter.flow_to(zz, TT);
            r.head(d) = p2 - zz;
            r(d) = u.dot(zz - z_ref);
        } catch (const std::exception&) {
            r.setConstant(1e30);
        }
        return r;
    };

    for (int it = 0; it < lopts.max_newton; ++it) {
        double amp_now = 0;
        try {
            shooter.flow_and_monodromy(z, T, phi, mono, &amp_now);
        } catch (const std::exception&) {
            rec.note = "integration failed during shooting";
            return rec;
        }
        amplitude = amp_now;
        Eigen::VectorXd g(d + 1);
        g.head(d) = phi - z;
        g(d) = u.dot(z - z_ref);
        const double res = g.head(d).lpNorm<Eigen::Infinity>();
        const double scale = 1.0 + z.lpNorm<Eigen::Infinity>();
        rec.shooting_residual = res;
        if (res <= lopts.orbit_tol * scale && std::abs(g(d)) <= lopts.orbit_tol * scale) break;
        if (it == lopts.max_newton - 1) {
            rec.note = "newton did not converge";
            return rec;
        }
        Eigen::VectorXd f_end(d);
        field.rhs(0.0, phi, f_end);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d + 1, d + 1);
        J.topLeftCorner(d, d) = mono - Eigen::MatrixXd::Identity(d, d);
        J.topRightCorner(d, 1) = f_end;
        J.bottomLeftCorner(1, d) = u.transpose();
        Eigen::VectorXd step =
            J.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-g);
        // damping: backtrack until the residual shrinks
        double lambda = 1.0;
        const double g0 = g.norm();
        bool moved = false;
        for (; lambda > 1.0 / 64; lambda /= 2) {
            Eigen::VectorXd z_try = z + lambda * step.head(d);
            double T_try = T + lambda * step(d);
            if (T_try < lopts.min_period) continue;
            if (residual(z_try, T_try).norm() < g0) {
                z = z_try;
                T = T_try;
                moved = true;
                break;
            }
        }
        if (!moved) {
            z += step.head(d) / 64;
            T = std::max(lopts.min_period, T + step(d) / 64);
        }
    }

    if (amplitude < lopts.min_amplitude) {
        rec.note = "amplitude below threshold (trivial orbit)";
        return rec;
    }

    // least-period check against T/2 and T/3 returns
    const double scale = 1.0 + z.lpNorm<Eigen::Infinity>();
    for (int k : {2, 3}) {
        try {
            Eigen::VectorXd zk = shooter.flow_to(z, T / k);
            if ((zk - z).lpNorm<Eigen::Infinity>() <= 1e3 * lopts.orbit_tol * scale) {
                T /= k;
                shooter.flow_and_monodromy(z, T, phi, mono, &amplitude);
            }
        } catch (const std::exception&) {
        }
    }

    rec.found = true;
    rec.period = T;
    rec.point = z;
    rec.reduced_multipliers = eig(mono);
    rec.verdict = certify_multipliers(rec.reduced_multipliers, copts, &rec.trivial_error);
    return rec;
}

GenericField reduced_field(const VectorField& vf, const ReducedCoords& rc) {
    GenericField f;
    f.dim = rc.r;
    f.rhs = [&vf, rc](double, const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
        try {
            dz = rc.qmat * vf.rate(rc.anchor + rc.gamma0 * z);
        } catch (const std::domain_error&) {
            dz.setConstant(rc.r, std::numeric_limits<double>::quiet_NaN());
        }
    };
    f.jac = [&vf, rc](double, const Eigen::VectorXd& z, Eigen::MatrixXd& J) {
        try {
            J = rc.qmat * vf.dv(rc.anchor + rc.gamma0 * z) * rc.gamma0;
        } catch (const std::domain_error&) {
            J.setConstant(rc.r, rc.r, std::numeric_limits<double>::quiet_NaN());
        }
    };
    return f;
}

}  // namespace

OrbitVerdict certify_multipliers(const std::vector<std::complex<double>>& reduced,
                                 const CertifyOptions& copts, double* trivial_err) {
    if (reduced.empty()) return OrbitVerdict::NotPeriodic;
    size_t trivial = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < reduced.size(); ++i) {
        double d = std::abs(reduced[i] - std::complex<double>(1, 0));
        if (d < best) {
            best = d;
            trivial = i;
        }
    }
    if (trivial_err) *trivial_err = best;
    if (best > copts.trivial_tol) return OrbitVerdict::Degenerate;
    int near_one = 0;
    for (const auto& mu : reduced)
        if (std::abs(mu - std::complex<double>(1, 0)) <= copts.trivial_tol) ++near_one;
    if (near_one != 1) return OrbitVerdict::Degenerate;
    bool all_inside = true, all_away = true;
    for (size_t i = 0; i < reduced.size(); ++i) {
        if (i == trivial) continue;
        double mod = std::abs(reduced[i]);
        if (mod >= 1.0 - copts.margin) all_inside = false;
        if (mod >= 1.0 - copts.margin && mod <= 1.0 + copts.margin) all_away = false;
    }
    if (all_inside) return OrbitVerdict::SPPO;
    if (all_away) return OrbitVerdict::NPPO;
    return OrbitVerdict::Degenerate;
}

OrbitRecord locate_orbit_generic(const GenericField& field, const Eigen::VectorXd& seed,
                                 const IntegratorConfig& cfg, const LocateOptions& lopts,
                                 const CertifyOptions& copts) {
    return shoot(field, seed, cfg, lopts, copts);
}

OrbitRecord locate_orbit(const VectorField& vf, const Eigen::VectorXd& seed,
                         const IntegratorConfig& cfg, const LocateOptions& lopts,
                         const CertifyOptions& copts) {
    if (vf.stoich().rank_r == 0) {
        OrbitRecord rec;
        rec.note = "trivial stoichiometric subspace";
        return rec;
    }
    ReducedCoords rc = make_reduced(vf, seed);
    GenericField f = reduced_field(vf, rc);
    IntegratorConfig rcfg = cfg;
    rcfg.enforce_positive = false;  // positivity lives in x, not z
    OrbitRecord rec = shoot(f, Eigen::VectorXd::Zero(rc.r), rcfg, lopts, copts);
    rec.rank = rc.r;
    if (!rec.found) return rec;
    rec.point = rc.anchor + rc.gamma0 * rec.point;
    if (rec.point.minCoeff() <= 0) {
        rec.found = false;
        rec.verdict = OrbitVerdict::NotPeriodic;
        rec.note = "orbit leaves the positive orthant";
        return rec;
    }
    // full multipliers and the Liouville identity
    MonodromyResult mr = monodromy(vf, rec, cfg);
    rec.full_multipliers = eig(mr.z_T);
    rec.liouville_rel_error = mr.liouville_rel_error;
    return rec;
}

MonodromyResult monodromy(const VectorField& vf, const OrbitRecord& orbit,
                          const IntegratorConfig& cfg) {
    if (!orbit.found) throw std::invalid_argument("monodromy requires a located orbit");
    const int n = vf.n();
    // integrate [x; vec(Z); s] with s' = tr DF
    Eigen::VectorXd aug0(n + n * n + 1);
    aug0.head(n) = orbit.point;
    Eigen::Map<Eigen::MatrixXd>(aug0.data() + n, n, n) = Eigen::MatrixXd::Identity(n, n);
    aug0(n + n * n) = 0;
    OdeRhs rhs = [&vf, n](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(n + n * n + 1);
        Eigen::VectorXd x = y.head(n);
        try {
            dy.head(n) = vf.field(x);
        } catch (const std::domain_error&) {
            dy.setConstant(std::numeric_limits<double>::quiet_NaN());
            return;
        }
        Eigen::MatrixXd J = vf.jacobian(x);
        Eigen::Map<const Eigen::MatrixXd> Z(y.data() + n, n, n);
        Eigen::Map<Eigen::MatrixXd>(dy.data() + n, n, n) = J * Z;
        dy(n + n * n) = J.trace();
    };
    OdeJac jac = [](double, const Eigen::VectorXd&, Eigen::MatrixXd&) {
        throw std::runtime_error("augmented system has no analytic jacobian");
    };
    IntegratorConfig acfg = cfg;
    acfg.stiff = false;
    acfg.enforce_positive = false;
    acfg.allow_implicit_fallback = false;
    AdaptiveIntegrator integ(rhs, jac, acfg);
    TrajStatus st =
        integ.run(0.0, aug0, orbit.period, [](const StepRecord&) { return true; });
    if (st != TrajStatus::Completed) throw std::runtime_error("monodromy integration failed");
    MonodromyResult mr;
    mr.z_T = Eigen::Map<const Eigen::MatrixXd>(integ.y().data() + n, n, n);
    mr.logdet_predicted = integ.y()(n + n * n);
    const double det = mr.z_T.determinant();
    mr.liouville_rel_error = std::abs(det - std::exp(mr.logdet_predicted)) / std::abs(det);
    return mr;
}

std::vector<std::complex<double>> reduced_multipliers(const VectorField& vf,
                                                      const OrbitRecord& orbit,
                                                      const ReducedCoords& rc,
                                                      const IntegratorConfig& cfg) {
    if (!orbit.found) throw std::invalid_argument("reduced_multipliers requires an orbit");
    // z0 with anchor + gamma0 z0 = point; must be solvable on the class
    Eigen::VectorXd z0 =
        rc.gamma0.completeOrthogonalDecomposition().solve(orbit.point - rc.anchor);
    if (((rc.gamma0 * z0) - (orbit.point - rc.anchor)).lpNorm<Eigen::Infinity>() >
        1e-7 * (1 + orbit.point.lpNorm<Eigen::Infinity>()))
        throw std::invalid_argument("anchor is not on the orbit's stoichiometry class");
    GenericField f = reduced_field(vf, rc);
    Shooter shooter{f, cfg};
    Eigen::VectorXd z_end;
    Eigen::MatrixXd mono;
    shooter.flow_and_monodromy(z0, orbit.period, z_end, mono, nullptr);
    return eig(mono);
}

OrbitRecord certify(const VectorField& vf, OrbitRecord orbit, const CertifyOptions& copts,
                    const IntegratorConfig& cfg) {
    if (!orbit.found) return orbit;
    ReducedCoords rc = make_reduced(vf, orbit.point);
    orbit.reduced_multipliers = reduced_multipliers(vf, orbit, rc, cfg);
    orbit.verdict = certify_multipliers(orbit.reduced_multipliers, copts, &orbit.trivial_error);
    return orbit;
}

std::string OrbitRecord::to_json() const {
    nlohmann::json j;
    j["found"] = found;
    j["verdict"] = crnosc::to_string(verdict);
    j["period"] = period;
    j["point"] = std::vector<double>(point.data(), point.data() + point.size());
    auto dump = [](const std::vector<std::complex<double>>& ms) {
        std::vector<std::pair<double, double>> out;
        for (const auto& m : ms) out.emplace_back(m.real(), m.imag());
        return out;
    };
    j["reduced_multipliers"] = dump(reduced_multipliers);
    j["full_multipliers"] = dump(full_multipliers);
    j["shooting_residual"] = shooting_residual;
    j["trivial_error"] = trivial_error;
    j["liouville_rel_error"] = liouville_rel_error;
    j["rank"] = rank;
    if (!note.empty()) j["note"] = note;
    return j.dump(2);
}

}  // namespace crnosc
