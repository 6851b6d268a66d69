#include "crnosc/kinetics.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace crnosc {

std::string to_string(KineticsClass c) {
    switch (c) {
        case KineticsClass::MassAction: return "mass-action";
        case KineticsClass::PhysicalPowerLaw: return "physical-power-law";
        case KineticsClass::FixedPowerLaw: return "fixed-power-law";
    }
    return "?";
}

KineticsClass kinetics_class_from_string(const std::string& s) {
    if (s == "mass-action") return KineticsClass::MassAction;
    if (s == "physical-power-law") return KineticsClass::PhysicalPowerLaw;
    if (s == "fixed-power-law") return KineticsClass::FixedPowerLaw;
    throw std::invalid_argument("unknown kinetics class '" + s + "'");
}

namespace {

int sign(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

void validate_kinetics(const Crn& crn, const KineticsSpec& kin) {
    const int n = crn.n_species, m = crn.n_reactions();
    if (kin.K.size() != m) throw std::invalid_argument("K length must equal reaction count");
    if (kin.M.rows() != m || kin.M.cols() != n)
        throw std::invalid_argument("M must be m x n");
    if ((kin.K.array() <= 0).any()) throw std::invalid_argument("rate constants must be positive");
    if (kin.cls == KineticsClass::MassAction) {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i)
                if (kin.M(j, i) != crn.reactions[j].source.stoich[i])
                    throw std::invalid_argument("mass action requires M = Gamma_l^T");
    } else if (kin.cls == KineticsClass::PhysicalPowerLaw) {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i)
                if (sign(kin.M(j, i)) != sign(crn.reactions[j].source.stoich[i]))
                    throw std::invalid_argument(
                        "physical power law requires the sign pattern of Gamma_l^T");
    }
}

VectorField::VectorField(Crn crn, KineticsSpec kin)
    : crn_(std::move(crn)), kin_(std::move(kin)), sm_(stoich_matrices(crn_)) {
    validate_kinetics(crn_, kin_);
    gamma_.resize(sm_.n, sm_.m);
    for (int i = 0; i < sm_.n; ++i)
        for (int j = 0; j < sm_.m; ++j) gamma_(i, j) = static_cast<double>(sm_.gamma[i][j]);
    integer_exponents_ = true;
    for (int j = 0; j < sm_.m && integer_exponents_; ++j)
        for (int i = 0; i < sm_.n; ++i) {
            double e = kin_.M(j, i);
            if (e < 0 || e > 8 || e != std::floor(e)) {
                integer_exponents_ = false;
                break;
            }
        }
}

Eigen::VectorXd VectorField::rate(const Eigen::VectorXd& x) const {
    const int m = sm_.m, n = sm_.n;
    Eigen::VectorXd v(m);
    if (integer_exponents_) {
        for (int j = 0; j < m; ++j) {
            double p = kin_.K(j);
            for (int i = 0; i < n; ++i) {
                int e = static_cast<int>(kin_.M(j, i));
                for (int a = 0; a < e; ++a) p *= x(i);
            }
            v(j) = p;
        }
        return v;
    }
    for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) {
            double e = kin_.M(j, i);
            if (e == 0) continue;
            if (x(i) <= 0) throw std::domain_error("power-law rate needs x >> 0");
            s += e * std::log(x(i));
        }
        v(j) = kin_.K(j) * std::exp(s);
    }
    return v;
}

Eigen::VectorXd VectorField::field(const Eigen::VectorXd& x) const { return gamma_ * rate(x); }

Eigen::MatrixXd VectorField::dv(const Eigen::VectorXd& x) const {
    const int m = sm_.m, n = sm_.n;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, n);
    if (integer_exponents_) {
        // d/dx_i of K prod x^e computed by product rule, defined on the
        // closed orthant
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < n; ++i) {
                int ei = static_cast<int>(kin_.M(j, i));
                if (ei == 0) continue;
                double p = kin_.K(j) * ei;
                for (int a = 0; a < ei - 1; ++a) p *= x(i);
                for (int i2 = 0; i2 < n; ++i2) {
                    if (i2 == i) continue;
                    int e2 = static_cast<int>(kin_.M(j, i2));
                    for (int a = 0; a < e2; ++a) p *= x(i2);
                }
                D(j, i) = p;
            }
        }
        return D;
    }
    Eigen::VectorXd v = rate(x);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i)
            if (kin_.M(j, i) != 0) D(j, i) = v(j) * kin_.M(j, i) / x(i);
    return D;
}

Eigen::MatrixXd VectorField::jacobian(const Eigen::VectorXd& x) const {
    return gamma_ * dv(x);
}

KineticsSpec mass_action(const Crn& crn, const Eigen::VectorXd& K) {
    KineticsSpec kin;
    kin.cls = KineticsClass::MassAction;
    kin.K = K;
    kin.M.resize(crn.n_reactions(), crn.n_species);
    for (int j = 0; j < crn.n_reactions(); ++j)
        for (int i = 0; i < crn.n_species; ++i)
            kin.M(j, i) = crn.reactions[j].source.stoich[i];
    validate_kinetics(crn, kin);
    return kin;
}

KineticsSpec sample_params(const Crn& crn, KineticsClass cls, std::mt19937_64& rng,
                           const SampleRanges& ranges) {
    const int n = crn.n_species, m = crn.n_reactions();
    std::uniform_real_distribution<double> uk(ranges.k_min, ranges.k_max);
    std::uniform_real_distribution<double> ue(ranges.exp_min, ranges.exp_max);
    KineticsSpec kin;
    kin.cls = cls;
    kin.K.resize(m);
    for (int j = 0; j < m; ++j) kin.K(j) = uk(rng);
    kin.M.setZero(m, n);
    if (cls == KineticsClass::MassAction) {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i) kin.M(j, i) = crn.reactions[j].source.stoich[i];
    } else {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < n; ++i)
                if (crn.reactions[j].source.stoich[i] > 0) kin.M(j, i) = ue(rng);
    }
    validate_kinetics(crn, kin);
    return kin;
}

Eigen::VectorXd sample_positive_point(int n, std::mt19937_64& rng, const SampleRanges& ranges) {
    std::uniform_real_distribution<double> ux(ranges.x_min, ranges.x_max);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = ux(rng);
    return x;
}

KineticsSpec derived_kinetics(const std::vector<int>& alpha, const std::vector<int>& beta,
                              const KineticsSpec& big) {
    for (int i : alpha)
        if (i < 0 || i >= big.M.cols()) throw std::out_of_range("species index out of range");
    for (int j : beta)
        if (j < 0 || j >= big.M.rows()) throw std::out_of_range("reaction index out of range");
    KineticsSpec sub;
    sub.cls = KineticsClass::FixedPowerLaw;
    sub.K.resize(static_cast<int>(beta.size()));
    sub.M.resize(static_cast<int>(beta.size()), static_cast<int>(alpha.size()));
    for (size_t bj = 0; bj < beta.size(); ++bj) {
        sub.K(static_cast<int>(bj)) = big.K(beta[bj]);
        for (size_t ai = 0; ai < alpha.size(); ++ai)
            sub.M(static_cast<int>(bj), static_cast<int>(ai)) = big.M(beta[bj], alpha[ai]);
    }
    return sub;
}

std::string kinetics_to_json(const KineticsSpec& kin) {
    nlohmann::json j;
    j["class"] = to_string(kin.cls);
    j["K"] = std::vector<double>(kin.K.data(), kin.K.data() + kin.K.size());
    std::vector<std::vector<double>> m(kin.M.rows());
    for (int r = 0; r < kin.M.rows(); ++r) {
        m[r].resize(kin.M.cols());
        for (int c = 0; c < kin.M.cols(); ++c) m[r][c] = kin.M(r, c);
    }
    j["M"] = m;
    return j.dump();
}

KineticsSpec kinetics_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    KineticsSpec kin;
    kin.cls = kinetics_class_from_string(j.at("class").get<std::string>());
    auto k = j.at("K").get<std::vector<double>>();
    kin.K = Eigen::Map<Eigen::VectorXd>(k.data(), static_cast<int>(k.size()));
    auto m = j.at("M").get<std::vector<std::vector<double>>>();
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    kin.M.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) kin.M(r, c) = m[r][c];
    return kin;
}

}  // namespace crnosc
