#include "jumpact/levy_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "jumpact/quadrature.hpp"
#include "jumpact/stable_law.hpp"

namespace jumpact {

namespace {

// int_0^eps x^{q} e^{-lambda x} dx with q in (-1, 2); the power singularity at
// zero is removed by the substitution x = eps t^{1/(1+q)}.
double truncated_power_exp_integral(double q, double lambda, double eps) {
    const double s = 1.0 + q;
    if (!(s > 0.0)) throw std::domain_error("integral diverges at zero");
    const GaussLegendre rule = mapped_rule(32, 0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = eps * std::pow(rule.nodes[i], 1.0 / s);
        acc += rule.weights[i] * std::exp(-lambda * x);
    }
    return std::pow(eps, s) / s * acc;
}

}  // namespace

double small_jump_variance(const TemperedStableComponent& comp, double eps) {
    const double one_side = comp.a * truncated_power_exp_integral(1.0 - comp.alpha,
                                                                  comp.lambda, eps);
    return comp.two_sided ? 2.0 * one_side : one_side;
}

double small_jump_mean(const TemperedStableComponent& comp, double eps) {
    if (comp.two_sided) return 0.0;
    return comp.a * truncated_power_exp_integral(-comp.alpha, comp.lambda, eps);
}

double big_jump_intensity_untempered(const TemperedStableComponent& comp, double eps) {
    const double one_side = comp.a / (comp.alpha * std::pow(eps, comp.alpha));
    return comp.two_sided ? 2.0 * one_side : one_side;
}

double levy_increment(const TemperedStableComponent& comp, double dt, Rng& rng,
                      double cutoff_eps) {
    if (!(dt > 0.0)) throw std::invalid_argument("levy_increment requires dt > 0");
    double inc = 0.0;
    if (comp.a > 0.0) {
        const long n_prop = rng.poisson(big_jump_intensity_untempered(comp, cutoff_eps) * dt);
        for (long k = 0; k < n_prop; ++k) {
            // inversion of the untempered tail, thinned by the tempering factor
            const double mag = cutoff_eps * std::pow(rng.uniform(), -1.0 / comp.alpha);
            const bool accept = rng.uniform() < std::exp(-comp.lambda * mag);
            if (!accept) continue;
            if (comp.two_sided) {
                inc += rng.uniform() < 0.5 ? -mag : mag;
            } else {
                inc += mag;
            }
        }
        inc += std::sqrt(small_jump_variance(comp, cutoff_eps) * dt) * rng.normal();
        inc += small_jump_mean(comp, cutoff_eps) * dt;
    }
    return inc;
}

std::vector<double> simulate_vol(const SimSpec& spec, std::span<const double> grid_times,
                                 Rng& rng) {
    if (!spec.vol) throw std::invalid_argument("simulate_vol requires a vol spec");
    if (grid_times.size() < 2) throw std::invalid_argument("vol grid needs >= 2 times");
    const OuVolSpec& vs = *spec.vol;
    const TemperedStableComponent& sub = vs.subordinator;
    if (sub.two_sided) throw std::invalid_argument("vol subordinator must be one-sided");
    const double kappa = vs.mean_reversion;
    const double eps = spec.cutoff_eps;
    const double lam0 = big_jump_intensity_untempered(sub, eps);
    const double drift_small = small_jump_mean(sub, eps);

    std::vector<double> sigma(grid_times.size());
    double s = 1.0;  // stationary mean
    sigma[0] = s;
    for (std::size_t g = 1; g < grid_times.size(); ++g) {
        const double h = grid_times[g] - grid_times[g - 1];
        if (!(h > 0.0)) throw std::invalid_argument("vol grid must be strictly increasing");
        s *= std::exp(-kappa * h);
        const long n_prop = rng.poisson(lam0 * h);
        for (long k = 0; k < n_prop; ++k) {
            const double mag = eps * std::pow(rng.uniform(), -1.0 / sub.alpha);
            const bool accept = rng.uniform() < std::exp(-sub.lambda * mag);
            const double tau = rng.uniform();  // arrival position within the step
            if (accept) s += std::exp(-kappa * h * (1.0 - tau)) * mag;
        }
        s += drift_small * h;
        sigma[g] = s;
    }
    return sigma;
}

namespace {

PathGrid simulate_core(const SimSpec& spec, bool brownian) {
    if (spec.days < 1 || spec.per_day < 1 || spec.substeps < 1) {
        throw std::invalid_argument("simulate: days, per_day and substeps must be >= 1");
    }
    if (!(spec.cutoff_eps > 0.0)) throw std::invalid_argument("cutoff_eps must be positive");
    const long n_obs = static_cast<long>(spec.days) * spec.per_day;
    const long n_sub = n_obs * spec.substeps;
    const double dt = 1.0 / (static_cast<double>(spec.per_day) * spec.substeps);

    // independent derived streams for the volatility and the driver
    Rng rng_vol(derive_stream_seed(spec.seed, 0, 1));
    Rng rng_drv(derive_stream_seed(spec.seed, 1, 1));

    std::vector<double> sigma;
    if (spec.vol) {
        std::vector<double> times(n_sub + 1);
        for (long i = 0; i <= n_sub; ++i) times[i] = i * dt;
        sigma = simulate_vol(spec, times, rng_vol);
    }

    PathGrid path;
    path.delta = 1.0 / spec.per_day;
    path.values.resize(n_obs + 1);
    path.values[0] = 0.0;
    double x = 0.0;
    const double sqrt_dt = std::sqrt(dt);
    for (long i = 0; i < n_sub; ++i) {
        double dl = 0.0;
        if (brownian) {
            dl = sqrt_dt * rng_drv.normal();
        } else {
            for (const auto& comp : spec.driver) {
                dl += levy_increment(comp, dt, rng_drv, spec.cutoff_eps);
            }
        }
        const double s = spec.vol ? sigma[i] : 1.0;  // sigma at substep start
        x += s * dl + spec.drift * dt;
        if ((i + 1) % spec.substeps == 0) {
            path.values[(i + 1) / spec.substeps] = x;
        }
    }
    return path;
}

}  // namespace

PathGrid simulate_path(const SimSpec& spec) {
    if (spec.driver.empty()) throw std::invalid_argument("simulate_path requires a driver");
    return simulate_core(spec, false);
}

PathGrid simulate_brownian(const SimSpec& spec) { return simulate_core(spec, true); }

PathGrid simulate_stable_path(double beta, long n_increments, double delta,
                              std::uint64_t seed) {
    if (n_increments < 1) throw std::invalid_argument("need at least one increment");
    Rng rng(seed);
    const StableIndex b(beta);
    // unit normalization A_beta = 1: a single process carries half the
    // characteristic exponent, so increments have scale (dt/2)^(1/beta) with
    // dt = 1 grid units (scale-free estimators make the time unit irrelevant)
    const double scale = std::pow(0.5, 1.0 / beta);
    PathGrid path;
    path.delta = delta;
    path.values.resize(n_increments + 1);
    path.values[0] = 0.0;
    for (long i = 1; i <= n_increments; ++i) {
        path.values[i] = path.values[i - 1] + sample_symmetric_stable(b, scale, rng);
    }
    return path;
}

SimSpec table1_case(double beta) {
    double a0 = 0.0, a1 = 0.0;
    if (beta == 1.05) {
        a0 = 0.1299;
        a1 = 0.0113;
    } else if (beta == 1.25) {
        a0 = 0.1443;
        a1 = 0.0125;
    } else if (beta == 1.50) {
        a0 = 0.1410;
        a1 = 0.0141;
    } else if (beta == 1.75) {
        a0 = 0.0975;
        a1 = 0.0158;
    } else {
        throw std::invalid_argument("table1_case: beta must be 1.05, 1.25, 1.50 or 1.75");
    }
    SimSpec spec;
    spec.driver = {{a0, beta, 0.25, true}, {a1, beta / 3.0, 0.25, true}};
    spec.vol = OuVolSpec{};
    spec.days = 10;
    spec.per_day = 100;
    spec.substeps = 50;
    spec.cutoff_eps = 1e-3;
    return spec;
}

}  // namespace jumpact
