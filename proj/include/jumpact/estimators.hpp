#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jumpact/asymptotics.hpp"
#include "jumpact/stable_law.hpp"

namespace jumpact {

// Equidistant observations (levels). delta is grid spacing metadata only:
// every estimator here is time-scale free.
struct PathGrid {
    std::vector<double> values;
    double delta = 1.0;

    long increments() const { return static_cast<long>(values.size()) - 1; }
};

struct EstimatorConfig {
    double p = 0.51;
    int k_n = 0;  // 0: use ceil(1.6 sqrt(N))
    int bands = 5;
    std::pair<double, double> u_init{0.1, 1.1};
    double beta_min = 1.0 + 1e-6;
    double beta_max = 2.0 - 1e-6;
    double ecf_floor = 1e-10;
    int quad_nodes = 16;
    double search_tol = 1e-6;
    int search_grid = 21;
    // Kernel Monte Carlo inside the estimation pipeline. Smaller than the
    // standalone asymptotics default: two kernel builds per estimate, and the
    // entries enter only the weighting and the O(1/k_n) correction.
    std::uint64_t kernel_seed = 424242;
    std::size_t kernel_draws = 500'000;
};

struct EcfCurve {
    std::vector<double> us;
    std::vector<double> values;
    bool debiased = false;
    std::optional<double> beta_used;
};

struct EstimateResult {
    double beta_hat = 0.0;
    std::optional<double> std_error;
    double p_used = 0.0;
    int k_n = 0;
    std::vector<double> band_lows, band_highs;
    long n_effective = 0;
    std::vector<std::string> diagnostics;
};

// d_i = x_i - 2 x_{i-1} + x_{i-2} for i = 2..N (length N-1).
std::vector<double> diff_increments(const PathGrid& path);

// V_i(p) = (1/k_n) sum_{j=i-k_n-1}^{i-2} |d_j|^p for i = k_n+3..N.
std::vector<double> local_power_variation(const PathGrid& path, double p, int k_n);

struct EcfEval {
    std::vector<double> values;
    long n_effective = 0;
    long skipped = 0;
};

// Empirical characteristic function of the self-normalized differenced
// increments at each u; degenerate windows (V_i = 0) are skipped and counted.
EcfEval ecf_eval(const PathGrid& path, double p, int k_n, std::span<const double> us);

double ecf(const PathGrid& path, double p, int k_n, double u);

double ecf_debiased(const PathGrid& path, double p, int k_n, double u, double beta_guess,
                    const KernelOptions& opt = {});

// Two-point explicit estimator: [log(-log Lhat(u)) - log(-log Lhat(v))] / log(u/v).
EstimateResult beta_fs(const PathGrid& path, double p, int k_n, double u, double v,
                       double ecf_floor = 1e-10);

// Same with feasibly debiased ECF values at beta_init.
EstimateResult beta_two_point(const PathGrid& path, double p, int k_n, double u, double v,
                              double beta_init, const KernelOptions& opt = {},
                              double ecf_floor = 1e-10);

// Solve L(p,u,beta)=0.95 and 0.25 and split the bracket into K equal bands.
MomentBands select_bands(double p, double beta_init, int K);

// Integrated log-ECF discrepancies over the bands, at candidate beta; the
// debiased ECF is evaluated at beta_init (first-stage estimate) and clamped
// into (ecf_floor, 1).
std::vector<double> moment_vector(const PathGrid& path, double p, int k_n,
                                  const MomentBands& bands, double beta_init, double beta,
                                  const KernelOptions& opt = {}, int quad_nodes = 16,
                                  double ecf_floor = 1e-10);

// Full weighted moment-matching pipeline: first-stage two-point estimate,
// power fallback, adaptive bands, optimal weighting fixed at the first stage,
// golden-section search, plug-in standard error.
EstimateResult beta_gmm(const PathGrid& path, const EstimatorConfig& config = {});

// Power-variation baseline on differenced increments.
EstimateResult beta_power_variation(const PathGrid& path, double p);

// beta = 2 diagnostic: two-point estimate at drifting u_n = c / log(N) and
// rho u_n; standard error from the Gaussian kernels. When beta_init is given,
// the returned estimate is the feasibly debiased variant.
EstimateResult beta_diffusion(const PathGrid& path, double p, int k_n, double c, double rho,
                              std::optional<double> beta_init = std::nullopt,
                              const KernelOptions& opt = {});

int default_block_size(long n_increments);

}  // namespace jumpact
