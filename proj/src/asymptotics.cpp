#include "jumpact/asymptotics.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "jumpact/quadrature.hpp"

namespace jumpact {

namespace detail {

double xi0_11_closed(MomentPower p, double u, double v, StableIndex beta) {
    const double Lsum = limit_cf(p, u + v, beta);
    const double Ldiff = limit_cf(p, std::abs(u - v), beta);
    return 0.5 * (Lsum + Ldiff) - limit_cf(p, u, beta) * limit_cf(p, v, beta);
}

double xi0_22_closed(MomentPower p, StableIndex beta) {
    const double b2p = abs_moment_bracket(MomentPower(2.0 * p.value()), beta);
    const double bp = abs_moment_bracket(p, beta);
    return b2p / (bp * bp) - 1.0;
}

double xi1_11_closed(MomentPower p, double u, double v, StableIndex beta) {
    // joint characteristic function of three independent stables, each
    // carrying half of the unit characteristic exponent
    const double C = c_const(p, beta);
    const double bv = beta.value();
    const double ub = std::pow(u, bv);
    const double vb = std::pow(v, bv);
    const double same = std::exp(-0.5 * C * (ub + std::pow(std::abs(u - v), bv) + vb));
    const double oppo = std::exp(-0.5 * C * (ub + std::pow(u + v, bv) + vb));
    return 0.5 * (same + oppo) - limit_cf(p, u, beta) * limit_cf(p, v, beta);
}

}  // namespace detail

namespace {

void require_half_moment(MomentPower p, StableIndex beta) {
    if (!(2.0 * p.value() < beta.value())) {
        throw std::domain_error("kernel routines require p < beta/2");
    }
}

// scalar Xi1^(2,2) per (p, beta, seed, draws), memoized: the bias constant is
// queried per estimate while the draws are pinned by the seed.
double xi1_22_scalar(MomentPower p, StableIndex beta, const KernelOptions& opt) {
    struct Key {
        double p, beta;
        std::uint64_t seed;
        std::size_t draws;
        bool operator<(const Key& o) const {
            return std::tie(p, beta, seed, draws) < std::tie(o.p, o.beta, o.seed, o.draws);
        }
    };
    static std::map<Key, double> cache;
    static std::mutex mu;
    const Key key{p.value(), beta.value(), opt.seed, opt.draws};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const auto mc = detail::stable_kernel_mc(p.value(), beta.value(), {}, opt.seed, opt.draws);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, mc.xi1_22).first->second;
}

}  // namespace

MomentBands::MomentBands(std::vector<double> lows, std::vector<double> highs)
    : lows_(std::move(lows)), highs_(std::move(highs)) {
    if (lows_.empty() || lows_.size() != highs_.size()) {
        throw std::invalid_argument("moment bands: need equal nonzero counts");
    }
    for (std::size_t i = 0; i < lows_.size(); ++i) {
        if (!(0.0 < lows_[i]) || !(lows_[i] < highs_[i])) {
            throw std::invalid_argument("moment bands: need 0 < low < high");
        }
    }
    for (std::size_t i = 0; i < lows_.size(); ++i) {
        for (std::size_t j = i + 1; j < lows_.size(); ++j) {
            const bool disjoint = highs_[i] <= lows_[j] || highs_[j] <= lows_[i];
            if (!disjoint) throw std::invalid_argument("moment bands must be disjoint");
        }
    }
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd w) : w_(std::move(w)) {
    if (w_.rows() != w_.cols()) throw std::invalid_argument("weight matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w_, Eigen::EigenvaluesOnly);
    const double lam_min = es.eigenvalues().minCoeff();
    if (!(lam_min > 0.0)) {
        std::ostringstream msg;
        msg << "weight matrix is not positive definite (smallest eigenvalue " << lam_min << ")";
        throw std::runtime_error(msg.str());
    }
    ldlt_.compute(w_);
}

Eigen::VectorXd WeightMatrix::solve(const Eigen::VectorXd& rhs) const {
    return ldlt_.solve(rhs);
}

CovKernel xi0(MomentPower p, double u, double v, StableIndex beta, const KernelOptions& opt) {
    require_half_moment(p, beta);
    if (u < 0.0 || v < 0.0) throw std::domain_error("kernel arguments must be >= 0");
    const double nodes[2] = {u, v};
    const auto mc = detail::stable_kernel_mc(p.value(), beta.value(), nodes, opt.seed, opt.draws);
    CovKernel k;
    k.u = u;
    k.v = v;
    k.kind = KernelKind::Xi0;
    k.m(0, 0) = detail::xi0_11_closed(p, u, v, beta);
    k.m(1, 1) = detail::xi0_22_closed(p, beta);
    k.m(0, 1) = mc.phi0[0];
    k.m(1, 0) = mc.phi0[1];
    return k;
}

CovKernel xi1(MomentPower p, double u, double v, StableIndex beta, const KernelOptions& opt) {
    require_half_moment(p, beta);
    if (u < 0.0 || v < 0.0) throw std::domain_error("kernel arguments must be >= 0");
    const double nodes[2] = {u, v};
    const auto mc = detail::stable_kernel_mc(p.value(), beta.value(), nodes, opt.seed, opt.draws);
    CovKernel k;
    k.u = u;
    k.v = v;
    k.kind = KernelKind::Xi1;
    k.m(0, 0) = detail::xi1_11_closed(p, u, v, beta);
    k.m(1, 1) = mc.xi1_22;
    k.m(0, 1) = mc.phi1a[0];
    k.m(1, 0) = mc.phi1b[1];
    return k;
}

CovKernel xi_bar(MomentPower p, double u, double v, StableIndex beta, const KernelOptions& opt) {
    require_half_moment(p, beta);
    if (u < 0.0 || v < 0.0) throw std::domain_error("kernel arguments must be >= 0");
    const double nodes[2] = {u, v};
    const auto mc = detail::stable_kernel_mc(p.value(), beta.value(), nodes, opt.seed, opt.draws);
    CovKernel k;
    k.u = u;
    k.v = v;
    k.kind = KernelKind::XiBar;
    k.m(0, 0) = detail::xi0_11_closed(p, u, v, beta) + 2.0 * detail::xi1_11_closed(p, u, v, beta);
    k.m(1, 1) = detail::xi0_22_closed(p, beta) + 2.0 * mc.xi1_22;
    k.m(0, 1) = mc.phi0[0] + 2.0 * mc.phi1a[0];
    k.m(1, 0) = mc.phi0[1] + 2.0 * mc.phi1b[1];
    return k;
}

double bias_constant(MomentPower p, StableIndex beta, int k_n, double u,
                     const KernelOptions& opt) {
    require_half_moment(p, beta);
    if (k_n < 2) throw std::domain_error("bias constant requires k_n >= 2");
    if (u == 0.0) return 0.0;
    const double xibar22 = detail::xi0_22_closed(p, beta) + 2.0 * xi1_22_scalar(p, beta, opt);
    return (1.0 / k_n) * 0.5 * h_weight(p, u, beta) * xibar22;
}

WeightMatrix weight_matrix(MomentPower p, const MomentBands& bands, StableIndex beta,
                           const KernelOptions& opt, int quad_nodes) {
    require_half_moment(p, beta);
    const int K = bands.count();
    std::vector<double> nodes, wts;
    nodes.reserve(K * quad_nodes);
    wts.reserve(K * quad_nodes);
    for (int i = 0; i < K; ++i) {
        const GaussLegendre rule = mapped_rule(quad_nodes, bands.low(i), bands.high(i));
        nodes.insert(nodes.end(), rule.nodes.begin(), rule.nodes.end());
        wts.insert(wts.end(), rule.weights.begin(), rule.weights.end());
    }
    const auto mc = detail::stable_kernel_mc(p.value(), beta.value(), nodes, opt.seed, opt.draws);
    const double xibar22 = detail::xi0_22_closed(p, beta) + 2.0 * mc.xi1_22;

    const int nn = static_cast<int>(nodes.size());
    std::vector<double> Lu(nn), Gu(nn), cross(nn);
    for (int i = 0; i < nn; ++i) {
        Lu[i] = limit_cf(p, nodes[i], beta);
        Gu[i] = g_weight(p, nodes[i], beta);
        // symmetrized cross entry so that w(u,v) = w(v,u) exactly
        cross[i] = mc.phi0[i] + mc.phi1a[i] + mc.phi1b[i];
    }

    Eigen::MatrixXd W(K, K);
    for (int bi = 0; bi < K; ++bi) {
        for (int bj = bi; bj < K; ++bj) {
            double acc = 0.0;
            for (int q = bi * quad_nodes; q < (bi + 1) * quad_nodes; ++q) {
                double inner = 0.0;
                for (int r = bj * quad_nodes; r < (bj + 1) * quad_nodes; ++r) {
                    const double xb11 = detail::xi0_11_closed(p, nodes[q], nodes[r], beta) +
                                        2.0 * detail::xi1_11_closed(p, nodes[q], nodes[r], beta);
                    const double w = (xb11 + Gu[r] * cross[q] + Gu[q] * cross[r] +
                                      Gu[q] * Gu[r] * xibar22) /
                                     (Lu[q] * Lu[r]);
                    inner += wts[r] * w;
                }
                acc += wts[q] * inner;
            }
            W(bi, bj) = acc;
            W(bj, bi) = acc;
        }
    }
    return WeightMatrix(std::move(W));
}

SensitivityVector sensitivity_vector(MomentPower p, const MomentBands& bands,
                                     StableIndex beta, int quad_nodes) {
    const int K = bands.count();
    Eigen::VectorXd m(K);
    for (int i = 0; i < K; ++i) {
        const GaussLegendre rule = mapped_rule(quad_nodes, bands.low(i), bands.high(i));
        double acc = 0.0;
        for (int q = 0; q < quad_nodes; ++q) {
            acc += rule.weights[q] * dlog_limit_cf_dbeta(p, rule.nodes[q], beta);
        }
        m(i) = acc;
        if (!std::isfinite(acc)) throw std::runtime_error("sensitivity vector entry not finite");
    }
    return SensitivityVector{std::move(m)};
}

double avar_gmm(MomentPower p, const MomentBands& bands, StableIndex beta,
                const KernelOptions& opt, int quad_nodes) {
    const WeightMatrix W = weight_matrix(p, bands, beta, opt, quad_nodes);
    const SensitivityVector M = sensitivity_vector(p, bands, beta, quad_nodes);
    const double quad = M.m.dot(W.solve(M.m));
    if (!(quad > 0.0)) throw std::runtime_error("degenerate sensitivity: M'W^-1M <= 0");
    return 1.0 / quad;
}

GaussianKernels gaussian_kernels(MomentPower p, const KernelOptions& opt) {
    if (!(p.value() < 1.0)) throw std::domain_error("gaussian kernels require p < 1");
    const double bp = abs_moment_bracket(p, StableIndex(2.0));  // mu^{p/2}
    const double inv_mu4 = std::pow(bp, -8.0 / p.value());
    const auto mc = detail::gaussian_kernel_mc(p.value(), opt.seed, opt.draws);

    GaussianKernels g;
    // E|Z|^8 = 105 * 2^4 = 1680 for Z ~ Normal(0,2); E|Z|^4 = 12
    g.xi0(0, 0) = (1680.0 - 144.0) * inv_mu4;
    g.xi0(1, 1) = detail::xi0_22_closed(p, StableIndex(2.0));
    g.xi0(0, 1) = mc.x0_cross;
    g.xi0(1, 0) = mc.x0_cross;
    g.xi1(0, 0) = mc.x1_11;
    g.xi1(0, 1) = mc.x1_12;
    g.xi1(1, 0) = mc.x1_21;
    g.xi1(1, 1) = mc.x1_22;
    return g;
}

bool KernelTable::Key::operator<(const Key& o) const {
    return std::tie(p, beta, u, v, kind, seed, draws) <
           std::tie(o.p, o.beta, o.u, o.v, o.kind, o.seed, o.draws);
}

CovKernel KernelTable::get(MomentPower p, StableIndex beta, double u, double v,
                           KernelKind kind) {
    const Key key{p.value(), beta.value(), u, v, static_cast<int>(kind), opt_.seed, opt_.draws};
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
    }
    CovKernel k;
    switch (kind) {
        case KernelKind::Xi0: k = xi0(p, u, v, beta, opt_); break;
        case KernelKind::Xi1: k = xi1(p, u, v, beta, opt_); break;
        case KernelKind::XiBar: k = xi_bar(p, u, v, beta, opt_); break;
    }
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.emplace(key, k).first->second;
}

std::size_t KernelTable::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
}

void KernelTable::save_csv(std::ostream& os) const {
    std::lock_guard<std::mutex> lock(mu_);
    os << "p,beta,seed,draws,u,v,kind,entry,value\n";
    char buf[512];
    for (const auto& [key, k] : entries_) {
        for (int e = 0; e < 4; ++e) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%llu,%zu,%.17g,%.17g,%d,%d,%.17g\n",
                          key.p, key.beta, static_cast<unsigned long long>(key.seed),
                          key.draws, key.u, key.v, key.kind, e, k.m(e / 2, e % 2));
            os << buf;
        }
    }
}

std::size_t KernelTable::load_csv(std::istream& is) {
    std::string line;
    std::getline(is, line);  // header
    std::size_t rows = 0;
    std::map<Key, CovKernel> staged;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Key key{};
        int kind = 0, entry = 0;
        double value = 0.0;
        unsigned long long seed = 0;
        std::size_t draws = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%llu,%zu,%lf,%lf,%d,%d,%lf", &key.p, &key.beta,
                        &seed, &draws, &key.u, &key.v, &kind, &entry, &value) != 9) {
            throw std::runtime_error("kernel table: malformed row: " + line);
        }
        key.seed = seed;
        key.draws = draws;
        key.kind = kind;
        auto& k = staged[key];
        k.u = key.u;
        k.v = key.v;
        k.kind = static_cast<KernelKind>(kind);
        k.m(entry / 2, entry % 2) = value;
        ++rows;
    }
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& [key, k] : staged) entries_[key] = k;
    return rows;
}

}  // namespace jumpact
