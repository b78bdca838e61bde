#pragma once

#include <cstdint>

#include "jumpact/rng.hpp"

namespace jumpact {

// Stability index beta of the locally stable driver. Estimation routines work
// on (1,2); beta = 2 is the Gaussian limiting case.
class StableIndex {
public:
    explicit StableIndex(double beta);
    double value() const { return beta_; }

private:
    double beta_;
};

// Power p of the absolute-moment transforms. Closed-form moments require
// p < beta strictly; kernel routines built on 2p-moments require p < beta/2.
class MomentPower {
public:
    explicit MomentPower(double p);
    double value() const { return p_; }

private:
    double p_;
};

// Constants of the limit law under the unit normalization A_beta = 1.
struct LimitConstants {
    double c_const;  // C_{p,beta} = bracket^(-beta/p)
    double bracket;  // E|S1 - S2|^p for unit-normalized stable draws
    double a_beta;   // scale of the limit characteristic exponent, fixed to 1
};

// E|S1-S2|^p = 2^p Gamma((1+p)/2) Gamma(1-p/beta) / (sqrt(pi) Gamma(1-p/2)).
// Throws std::domain_error when the moment does not exist (p >= beta), when
// p >= 2, or when a gamma argument is within 1e-6 of a pole.
double abs_moment_bracket(MomentPower p, StableIndex beta);

double c_const(MomentPower p, StableIndex beta);

LimitConstants limit_constants(MomentPower p, StableIndex beta);

// exp(-C_{p,beta} u^beta), the probability limit of the self-normalized ECF.
double limit_cf(MomentPower p, double u, StableIndex beta);

// G(p,u,beta) = (beta/p) L C u^beta and
// H(p,u,beta) = G ((beta/p) C u^beta - beta/p - 1).
double g_weight(MomentPower p, double u, StableIndex beta);
double h_weight(MomentPower p, double u, StableIndex beta);

// d/dbeta of log L(p,u,beta) = -(d_beta C) u^beta - C u^beta log(u),
// by central finite difference with step 1e-5.
double dlog_limit_cf_dbeta(MomentPower p, double u, StableIndex beta);

// One symmetric stable draw with E exp(iuX) = exp(-(scale |u|)^beta), via the
// Chambers-Mallows-Stuck transform; beta = 2 maps to Normal(0, 2 scale^2).
double sample_symmetric_stable(StableIndex beta, double scale, Rng& rng);

}  // namespace jumpact
