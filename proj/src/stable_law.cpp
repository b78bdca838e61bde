#include "jumpact/stable_law.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jumpact {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleGuard = 1e-6;

double checked_gamma(double x, const char* what) {
    // Gamma arguments here live in (0, 3); never evaluate near a pole.
    if (x < kPoleGuard) {
        throw std::domain_error(std::string("gamma argument too close to pole in ") + what);
    }
    return std::tgamma(x);
}

}  // namespace

StableIndex::StableIndex(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !(beta <= 2.0)) {
        throw std::domain_error("stable index must satisfy 0 < beta <= 2");
    }
}

MomentPower::MomentPower(double p) : p_(p) {
    if (!(p > 0.0)) {
        throw std::domain_error("moment power must be positive");
    }
}

double abs_moment_bracket(MomentPower p, StableIndex beta) {
    const double pv = p.value();
    const double bv = beta.value();
    if (pv >= bv) {
        throw std::domain_error("moment does not exist: requires p < beta");
    }
    if (pv >= 2.0) {
        throw std::domain_error("moment power must satisfy p < 2");
    }
    const double g1 = checked_gamma(0.5 * (1.0 + pv), "abs_moment_bracket");
    const double g2 = checked_gamma(1.0 - pv / bv, "abs_moment_bracket");
    const double g3 = checked_gamma(1.0 - 0.5 * pv, "abs_moment_bracket");
    return std::pow(2.0, pv) * g1 * g2 / (std::sqrt(kPi) * g3);
}

double c_const(MomentPower p, StableIndex beta) {
    return std::pow(abs_moment_bracket(p, beta), -beta.value() / p.value());
}

LimitConstants limit_constants(MomentPower p, StableIndex beta) {
    const double br = abs_moment_bracket(p, beta);
    return LimitConstants{std::pow(br, -beta.value() / p.value()), br, 1.0};
}

double limit_cf(MomentPower p, double u, StableIndex beta) {
    if (u < 0.0) throw std::domain_error("limit_cf requires u >= 0");
    return std::exp(-c_const(p, beta) * std::pow(u, beta.value()));
}

double g_weight(MomentPower p, double u, StableIndex beta) {
    if (u < 0.0) throw std::domain_error("g_weight requires u >= 0");
    const double C = c_const(p, beta);
    const double cu = C * std::pow(u, beta.value());
    const double ratio = beta.value() / p.value();
    return ratio * std::exp(-cu) * cu;
}

double h_weight(MomentPower p, double u, StableIndex beta) {
    const double C = c_const(p, beta);
    const double cu = C * std::pow(u, beta.value());
    const double ratio = beta.value() / p.value();
    return g_weight(p, u, beta) * (ratio * cu - ratio - 1.0);
}

double dlog_limit_cf_dbeta(MomentPower p, double u, StableIndex beta) {
    if (!(u > 0.0)) throw std::domain_error("dlog_limit_cf_dbeta requires u > 0");
    const double h = 1e-5;
    const double bv = beta.value();
    const double up = c_const(p, StableIndex(bv + h)) * std::pow(u, bv + h);
    const double dn = c_const(p, StableIndex(bv - h)) * std::pow(u, bv - h);
    return -(up - dn) / (2.0 * h);
}

double sample_symmetric_stable(StableIndex beta, double scale, Rng& rng) {
    if (!(scale > 0.0)) throw std::domain_error("stable scale must be positive");
    const double b = beta.value();
    if (b == 2.0) {
        return scale * std::sqrt(2.0) * rng.normal();
    }
    // Chambers-Mallows-Stuck, symmetric case: standard draw has cf exp(-|u|^beta).
    const double theta = rng.uniform(-0.5 * kPi, 0.5 * kPi);
    const double w = rng.exponential();
    const double x = std::sin(b * theta) / std::pow(std::cos(theta), 1.0 / b) *
                     std::pow(std::cos((b - 1.0) * theta) / w, (1.0 - b) / b);
    return scale * x;
}

}  // namespace jumpact
