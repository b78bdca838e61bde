#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "jumpact/estimators.hpp"
#include "jumpact/rng.hpp"

namespace jumpact {

// One tempered-stable mixture component: Levy density
// a exp(-lambda |x|) / |x|^(1+alpha) on both sides (two_sided) or on x > 0.
struct TemperedStableComponent {
    double a = 0.0;
    double alpha = 0.5;
    double lambda = 0.0;
    bool two_sided = true;
};

// Jump-driven Ornstein-Uhlenbeck volatility: d sigma = -rate sigma dt + dZ
// with Z the subordinator component.
struct OuVolSpec {
    double mean_reversion = 0.03;
    TemperedStableComponent subordinator{0.0293, 0.5, 3.0, false};
};

struct SimSpec {
    std::vector<TemperedStableComponent> driver;
    std::optional<OuVolSpec> vol;
    int days = 10;
    int per_day = 100;
    int substeps = 50;
    double cutoff_eps = 1e-3;
    std::uint64_t seed = 1;
    double drift = 0.0;  // optional constant drift per unit time
};

// One Levy increment over dt: compound Poisson above cutoff_eps (tempered
// jumps by rejection against the untempered power law) plus a centered
// Gaussian correction matching the small-jump variance; one-sided components
// also add the small-jump mean drift.
double levy_increment(const TemperedStableComponent& comp, double dt, Rng& rng,
                      double cutoff_eps = 1e-3);

// Exact mean reversion between jumps, each jump decayed from its arrival
// time; small-jump drift aggregated at step end. grid_times must be strictly
// increasing and start at the initial time; sigma starts at the stationary
// mean 1.
std::vector<double> simulate_vol(const SimSpec& spec, std::span<const double> grid_times,
                                 Rng& rng);

// dX = sigma_{t-} dL on a substep grid; observations recorded once per
// substep block. Deterministic given spec.seed.
PathGrid simulate_path(const SimSpec& spec);

// Brownian driver (sigma process optional), for the beta = 2 diagnostic.
PathGrid simulate_brownian(const SimSpec& spec);

// Exact unit-normalized beta-stable Levy path (constant sigma = 1): increments
// drawn directly from the stable law, no discretization error.
PathGrid simulate_stable_path(double beta, long n_increments, double delta,
                              std::uint64_t seed);

// Section-7 Monte Carlo cases: mixture levels (A0, A1) for
// beta in {1.05, 1.25, 1.50, 1.75}, tempering 0.25, OU volatility.
SimSpec table1_case(double beta);

// moments of the truncated small-jump part, exposed for adequacy checks
double small_jump_variance(const TemperedStableComponent& comp, double eps);
double small_jump_mean(const TemperedStableComponent& comp, double eps);
double big_jump_intensity_untempered(const TemperedStableComponent& comp, double eps);

}  // namespace jumpact
