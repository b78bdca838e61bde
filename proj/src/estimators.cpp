#include "jumpact/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "jumpact/quadrature.hpp"

namespace jumpact {

namespace {

double clamp_ecf(double value, double floor, double ceil, long& clamped) {
    if (value < floor) {
        ++clamped;
        return floor;
    }
    if (value > ceil) {
        ++clamped;
        return ceil;
    }
    return value;
}

double log_neg_log(double x) { return std::log(-std::log(x)); }

struct NodeGrid {
    std::vector<double> nodes;    // K * quad_nodes
    std::vector<double> weights;  // matching quadrature weights
    int per_band;
};

NodeGrid band_nodes(const MomentBands& bands, int quad_nodes) {
    NodeGrid g;
    g.per_band = quad_nodes;
    for (int i = 0; i < bands.count(); ++i) {
        const GaussLegendre rule = mapped_rule(quad_nodes, bands.low(i), bands.high(i));
        g.nodes.insert(g.nodes.end(), rule.nodes.begin(), rule.nodes.end());
        g.weights.insert(g.weights.end(), rule.weights.begin(), rule.weights.end());
    }
    return g;
}

}  // namespace

int default_block_size(long n_increments) {
    return static_cast<int>(std::ceil(1.6 * std::sqrt(static_cast<double>(n_increments))));
}

std::vector<double> diff_increments(const PathGrid& path) {
    const long n = path.increments();
    if (n < 2) throw std::invalid_argument("diff_increments requires at least 2 increments");
    std::vector<double> d(n - 1);
    const auto& x = path.values;
    for (long i = 2; i <= n; ++i) {
        d[i - 2] = x[i] - 2.0 * x[i - 1] + x[i - 2];
    }
    return d;
}

std::vector<double> local_power_variation(const PathGrid& path, double p, int k_n) {
    const long n = path.increments();
    if (k_n < 2) throw std::invalid_argument("local_power_variation requires k_n >= 2");
    if (n < k_n + 3) throw std::invalid_argument("path too short for block size");
    const std::vector<double> d = diff_increments(path);
    // prefix[m] = sum of |d_j|^p for j = 2..m+2
    std::vector<double> prefix(d.size());
    double acc = 0.0;
    for (std::size_t m = 0; m < d.size(); ++m) {
        acc += std::pow(std::abs(d[m]), p);
        prefix[m] = acc;
    }
    std::vector<double> v(n - k_n - 2);
    for (long i = k_n + 3; i <= n; ++i) {
        // window j = i-k_n-1 .. i-2, stored at d-index j-2
        const long hi = i - 4;
        const long lo = i - k_n - 3;
        const double s = prefix[hi] - (lo > 0 ? prefix[lo - 1] : 0.0);
        v[i - (k_n + 3)] = s / k_n;
    }
    return v;
}

EcfEval ecf_eval(const PathGrid& path, double p, int k_n, std::span<const double> us) {
    const long n = path.increments();
    if (!(p > 0.0)) throw std::invalid_argument("ecf requires p > 0");
    if (n < k_n + 3) throw std::invalid_argument("path too short for block size");
    for (double u : us) {
        if (u < 0.0) throw std::invalid_argument("ecf requires u >= 0");
    }
    const std::vector<double> d = diff_increments(path);
    const std::vector<double> v = local_power_variation(path, p, k_n);

    std::vector<double> args;
    args.reserve(v.size());
    long skipped = 0;
    const double inv_p = 1.0 / p;
    for (long i = k_n + 3; i <= n; ++i) {
        const double vi = v[i - (k_n + 3)];
        if (vi <= 0.0) {
            ++skipped;
            continue;
        }
        args.push_back(d[i - 2] / std::pow(vi, inv_p));
    }
    if (args.empty()) throw std::runtime_error("no usable increments");

    EcfEval out;
    out.n_effective = static_cast<long>(args.size());
    out.skipped = skipped;
    out.values.reserve(us.size());
    for (double u : us) {
        out.values.push_back(detail::mean_cos(args, u));
    }
    return out;
}

double ecf(const PathGrid& path, double p, int k_n, double u) {
    const double us[1] = {u};
    return ecf_eval(path, p, k_n, us).values[0];
}

double ecf_debiased(const PathGrid& path, double p, int k_n, double u, double beta_guess,
                    const KernelOptions& opt) {
    return ecf(path, p, k_n, u) -
           bias_constant(MomentPower(p), StableIndex(beta_guess), k_n, u, opt);
}

namespace {

EstimateResult two_point_core(const PathGrid& path, double p, int k_n, double u, double v,
                              std::optional<double> beta_init, const KernelOptions& opt,
                              double ecf_floor) {
    if (u == v || !(u > 0.0) || !(v > 0.0)) {
        throw std::invalid_argument("two-point estimator requires distinct positive u, v");
    }
    const double us[2] = {u, v};
    EcfEval e = ecf_eval(path, p, k_n, us);

    EstimateResult r;
    r.p_used = p;
    r.k_n = k_n;
    r.n_effective = e.n_effective;
    if (e.skipped > 0) {
        r.diagnostics.push_back("skipped " + std::to_string(e.skipped) + " degenerate windows");
    }
    double lu = e.values[0];
    double lv = e.values[1];
    if (beta_init) {
        lu -= bias_constant(MomentPower(p), StableIndex(*beta_init), k_n, u, opt);
        lv -= bias_constant(MomentPower(p), StableIndex(*beta_init), k_n, v, opt);
    }
    long clamped = 0;
    const double cu = clamp_ecf(lu, ecf_floor, 1.0 - ecf_floor, clamped);
    const double cv = clamp_ecf(lv, ecf_floor, 1.0 - ecf_floor, clamped);
    if (clamped > 0) {
        r.diagnostics.push_back("clamped " + std::to_string(clamped) + " ecf values");
        const bool same_low = lu < ecf_floor && lv < ecf_floor;
        const bool same_high = lu > 1.0 - ecf_floor && lv > 1.0 - ecf_floor;
        if (same_low || same_high) throw std::runtime_error("uninformative u grid");
    }
    r.beta_hat = (log_neg_log(cu) - log_neg_log(cv)) / std::log(u / v);
    return r;
}

}  // namespace

EstimateResult beta_fs(const PathGrid& path, double p, int k_n, double u, double v,
                       double ecf_floor) {
    return two_point_core(path, p, k_n, u, v, std::nullopt, {}, ecf_floor);
}

EstimateResult beta_two_point(const PathGrid& path, double p, int k_n, double u, double v,
                              double beta_init, const KernelOptions& opt, double ecf_floor) {
    if (!(beta_init > 1.0) || !(beta_init < 2.0)) {
        throw std::invalid_argument("beta_two_point requires beta_init in (1,2)");
    }
    return two_point_core(path, p, k_n, u, v, beta_init, opt, ecf_floor);
}

MomentBands select_bands(double p, double beta_init, int K) {
    if (!(beta_init > 1.0) || !(beta_init < 2.0)) {
        throw std::invalid_argument("select_bands requires beta_init in (1,2)");
    }
    if (K < 1) throw std::invalid_argument("select_bands requires K >= 1");
    const double C = c_const(MomentPower(p), StableIndex(beta_init));
    const double u_hi_q = std::pow(-std::log(0.25) / C, 1.0 / beta_init);
    const double u_lo_q = std::pow(-std::log(0.95) / C, 1.0 / beta_init);
    std::vector<double> lows(K), highs(K);
    for (int i = 0; i < K; ++i) {
        lows[i] = u_lo_q + (u_hi_q - u_lo_q) * i / K;
        highs[i] = u_lo_q + (u_hi_q - u_lo_q) * (i + 1) / K;
    }
    return MomentBands(std::move(lows), std::move(highs));
}

namespace {

// Debiased, clamped log-ECF at the quadrature nodes plus per-band clamp
// accounting; shared by moment_vector and beta_gmm.
struct MomentWorkspace {
    NodeGrid grid;
    std::vector<double> log_ecf;  // clamped log Lhat'(u_q)
    long n_effective = 0;
    long skipped = 0;
    long clamped = 0;
};

MomentWorkspace build_moment_workspace(const PathGrid& path, double p, int k_n,
                                       const MomentBands& bands, double beta_init,
                                       const KernelOptions& opt, int quad_nodes,
                                       double ecf_floor) {
    MomentWorkspace ws;
    ws.grid = band_nodes(bands, quad_nodes);
    EcfEval e = ecf_eval(path, p, k_n, ws.grid.nodes);
    ws.n_effective = e.n_effective;
    ws.skipped = e.skipped;
    ws.log_ecf.resize(ws.grid.nodes.size());
    const MomentPower mp(p);
    const StableIndex bi(beta_init);
    for (int band = 0; band < bands.count(); ++band) {
        long band_clamped = 0;
        for (int q = 0; q < quad_nodes; ++q) {
            const int idx = band * quad_nodes + q;
            const double corrected =
                e.values[idx] - bias_constant(mp, bi, k_n, ws.grid.nodes[idx], opt);
            ws.log_ecf[idx] = std::log(clamp_ecf(corrected, ecf_floor, 1.0, band_clamped));
        }
        ws.clamped += band_clamped;
        if (2 * band_clamped > quad_nodes) {
            throw std::runtime_error("bands out of range: ecf clamped on most of band " +
                                     std::to_string(band + 1));
        }
    }
    return ws;
}

// m_i(beta) for the workspace's bands; only log L changes with beta.
Eigen::VectorXd moments_at(const MomentWorkspace& ws, int K, double p, double beta) {
    const double C = c_const(MomentPower(p), StableIndex(beta));
    Eigen::VectorXd m(K);
    const int per = ws.grid.per_band;
    for (int i = 0; i < K; ++i) {
        double acc = 0.0;
        for (int q = i * per; q < (i + 1) * per; ++q) {
            acc += ws.grid.weights[q] *
                   (ws.log_ecf[q] + C * std::pow(ws.grid.nodes[q], beta));
        }
        m(i) = acc;
    }
    return m;
}

}  // namespace

std::vector<double> moment_vector(const PathGrid& path, double p, int k_n,
                                  const MomentBands& bands, double beta_init, double beta,
                                  const KernelOptions& opt, int quad_nodes, double ecf_floor) {
    const MomentWorkspace ws =
        build_moment_workspace(path, p, k_n, bands, beta_init, opt, quad_nodes, ecf_floor);
    const Eigen::VectorXd m = moments_at(ws, bands.count(), p, beta);
    return std::vector<double>(m.data(), m.data() + m.size());
}

EstimateResult beta_gmm(const PathGrid& path, const EstimatorConfig& config) {
    const long n = path.increments();
    const int k_n = config.k_n > 0 ? config.k_n : default_block_size(n);
    const KernelOptions kopt{config.kernel_seed, config.kernel_draws};

    EstimateResult first = beta_fs(path, config.p, k_n, config.u_init.first,
                                   config.u_init.second, config.ecf_floor);
    EstimateResult r;
    r.k_n = k_n;
    r.diagnostics = first.diagnostics;

    double beta_init = first.beta_hat;
    if (beta_init < config.beta_min || beta_init > config.beta_max) {
        std::ostringstream msg;
        msg << "initial estimate " << beta_init << " clamped into search bracket";
        r.diagnostics.push_back(msg.str());
        beta_init = std::clamp(beta_init, config.beta_min, config.beta_max);
    }

    double p = config.p;
    if (p >= beta_init / 2.0) {
        p = beta_init / 4.0;
        std::ostringstream msg;
        msg << "power fallback: p reduced to " << p;
        r.diagnostics.push_back(msg.str());
    }
    r.p_used = p;

    const MomentBands bands = select_bands(p, beta_init, config.bands);
    r.band_lows = bands.lows();
    r.band_highs = bands.highs();

    const MomentPower mp(p);
    const WeightMatrix W = weight_matrix(mp, bands, StableIndex(beta_init), kopt,
                                         config.quad_nodes);
    const MomentWorkspace ws = build_moment_workspace(path, p, k_n, bands, beta_init, kopt,
                                                      config.quad_nodes, config.ecf_floor);
    r.n_effective = ws.n_effective;
    if (ws.skipped > 0) {
        r.diagnostics.push_back("skipped " + std::to_string(ws.skipped) +
                                " degenerate windows");
    }
    if (ws.clamped > 0) {
        r.diagnostics.push_back("clamped " + std::to_string(ws.clamped) + " ecf values");
    }

    const int K = bands.count();
    const auto objective = [&](double beta) {
        const Eigen::VectorXd m = moments_at(ws, K, p, beta);
        return m.dot(W.solve(m));
    };

    // coarse grid guard against local minima, then golden-section refinement
    double best_beta = config.beta_min;
    double best_q = objective(best_beta);
    for (int i = 1; i < config.search_grid; ++i) {
        const double b = config.beta_min +
                         (config.beta_max - config.beta_min) * i / (config.search_grid - 1);
        const double q = objective(b);
        if (q < best_q) {
            best_q = q;
            best_beta = b;
        }
    }
    const double step = (config.beta_max - config.beta_min) / (config.search_grid - 1);
    double lo = std::max(config.beta_min, best_beta - step);
    double hi = std::min(config.beta_max, best_beta + step);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - golden * (hi - lo);
    double d = lo + golden * (hi - lo);
    double fc = objective(c);
    double fd = objective(d);
    while (hi - lo > config.search_tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - golden * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + golden * (hi - lo);
            fd = objective(d);
        }
    }
    r.beta_hat = 0.5 * (lo + hi);
    if (r.beta_hat - config.beta_min < 2.0 * config.search_tol ||
        config.beta_max - r.beta_hat < 2.0 * config.search_tol) {
        r.diagnostics.push_back("search bracket boundary hit");
    }

    // plug-in standard error at (bands, beta_hat)
    const double avar = avar_gmm(mp, bands, StableIndex(r.beta_hat), kopt, config.quad_nodes);
    r.std_error = std::sqrt(avar / static_cast<double>(ws.n_effective));
    return r;
}

EstimateResult beta_power_variation(const PathGrid& path, double p) {
    const std::vector<double> d = diff_increments(path);
    if (d.size() < 3) throw std::invalid_argument("path too short for power variation");
    double v1 = 0.0, v2 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        v1 += std::pow(std::abs(d[i]), p);
        if (i >= 2) v2 += std::pow(std::abs(d[i] + d[i - 2]), p);
    }
    EstimateResult r;
    r.p_used = p;
    r.n_effective = static_cast<long>(d.size());
    if (v1 == v2) {
        r.beta_hat = 0.0;
        r.diagnostics.push_back("degenerate power variations: estimate zeroed");
        return r;
    }
    r.beta_hat = p * std::log(2.0) / std::log(v2 / v1);
    return r;
}

EstimateResult beta_diffusion(const PathGrid& path, double p, int k_n, double c, double rho,
                              std::optional<double> beta_init, const KernelOptions& opt) {
    if (!(p > 0.5) || !(p < 1.0)) {
        throw std::invalid_argument("beta_diffusion requires p in (0.5, 1)");
    }
    if (!(c > 0.0) || !(rho > 0.0) || rho == 1.0) {
        throw std::invalid_argument("beta_diffusion requires c > 0 and rho > 0, rho != 1");
    }
    const long n = path.increments();
    const double u_n = c / std::log(static_cast<double>(n));

    EstimateResult r = beta_fs(path, p, k_n, u_n, rho * u_n);
    {
        std::ostringstream msg;
        msg << "u_n = " << u_n;
        r.diagnostics.push_back(msg.str());
    }
    const GaussianKernels gk = gaussian_kernels(MomentPower(p), opt);
    if (beta_init) {
        // feasible debiasing under the Gaussian null: (2,2) kernel entries of
        // the beta = 2 limit, H evaluated at the initial estimate
        const double xibar22 = gk.xi0(1, 1) + 2.0 * gk.xi1(1, 1);
        const double b_used = std::min(*beta_init, 2.0);
        const double us[2] = {u_n, rho * u_n};
        EcfEval e = ecf_eval(path, p, k_n, us);
        long clamped = 0;
        const double floor = 1e-10;
        const double lu = clamp_ecf(
            e.values[0] - 0.5 / k_n * h_weight(MomentPower(p), us[0], StableIndex(b_used)) *
                              xibar22,
            floor, 1.0 - floor, clamped);
        const double lv = clamp_ecf(
            e.values[1] - 0.5 / k_n * h_weight(MomentPower(p), us[1], StableIndex(b_used)) *
                              xibar22,
            floor, 1.0 - floor, clamped);
        std::ostringstream msg;
        msg << "undebiased two-point estimate " << r.beta_hat;
        r.diagnostics.push_back(msg.str());
        if (clamped > 0) {
            r.diagnostics.push_back("clamped " + std::to_string(clamped) + " ecf values");
        }
        r.beta_hat = (log_neg_log(lu) - log_neg_log(lv)) / std::log(1.0 / rho);
    }

    // Limit variance of sqrt(n)/(u_n^2 (1 - rho^2)) (beta_hat - 2):
    // (1/log(rho)^2) [a, -b] (Xi0~ + 2 Xi1~)_sym [a, -b]'
    const double c_p2 = c_const(MomentPower(p), StableIndex(2.0));
    const double a = 1.0 / (24.0 * c_p2);
    const double b = (2.0 / p) * c_p2;
    Eigen::Matrix2d sig = gk.xi0 + gk.xi1 + gk.xi1.transpose();
    const double var_lim = (a * a * sig(0, 0) - 2.0 * a * b * sig(0, 1) + b * b * sig(1, 1)) /
                           (std::log(rho) * std::log(rho));
    const double scale = std::abs(u_n * u_n * (1.0 - rho * rho));
    r.std_error = scale * std::sqrt(var_lim / static_cast<double>(r.n_effective));
    r.p_used = p;
    r.k_n = k_n;
    return r;
}

}  // namespace jumpact
