#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "jumpact/stable_law.hpp"

namespace jumpact {

enum class KernelKind { Xi0, Xi1, XiBar };

// 2x2 covariance kernel evaluated at (u, v).
struct CovKernel {
    Eigen::Matrix2d m;
    double u = 0.0;
    double v = 0.0;
    KernelKind kind = KernelKind::Xi0;
};

// Monte Carlo settings for the kernel entries without closed form.
// Entries are plain MC with common random numbers across all (u,v) nodes,
// computed once per (p, beta): identical (p, beta, seed, draws) keys yield
// bitwise-identical values.
struct KernelOptions {
    std::uint64_t seed = 424242;
    std::size_t draws = 2'000'000;
};

// K disjoint integration intervals [low_i, high_i], 0 < low < high.
class MomentBands {
public:
    MomentBands(std::vector<double> lows, std::vector<double> highs);
    int count() const { return static_cast<int>(lows_.size()); }
    double low(int i) const { return lows_[i]; }
    double high(int i) const { return highs_[i]; }
    const std::vector<double>& lows() const { return lows_; }
    const std::vector<double>& highs() const { return highs_; }

private:
    std::vector<double> lows_, highs_;
};

// Symmetric positive definite K x K weighting matrix; positive definiteness
// is verified at construction and failure surfaces the offending eigenvalue.
class WeightMatrix {
public:
    explicit WeightMatrix(Eigen::MatrixXd w);
    const Eigen::MatrixXd& matrix() const { return w_; }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

private:
    Eigen::MatrixXd w_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

struct SensitivityVector {
    Eigen::VectorXd m;
};

struct GaussianKernels {
    Eigen::Matrix2d xi0;
    Eigen::Matrix2d xi1;
};

// Covariance kernels of the ECF limit theory. The (1,1) entries and the (2,2)
// entry of Xi0 are closed form; the remaining entries are seeded Monte Carlo
// over triples of unit-normalized stable draws.
CovKernel xi0(MomentPower p, double u, double v, StableIndex beta,
              const KernelOptions& opt = {});
CovKernel xi1(MomentPower p, double u, double v, StableIndex beta,
              const KernelOptions& opt = {});
CovKernel xi_bar(MomentPower p, double u, double v, StableIndex beta,
                 const KernelOptions& opt = {});

// (1/k_n) * 0.5 * H(p,u,beta) * (Xi0^(2,2) + 2 Xi1^(2,2)): the subtractive
// finite-block correction of the ECF.
double bias_constant(MomentPower p, StableIndex beta, int k_n, double u,
                     const KernelOptions& opt = {});

// W_ij = int_i int_j w(p,u,v,beta) du dv with
// w = [1, G(u)] XiBar(u,v) [1, G(v)]' / (L(u) L(v)),
// by tensor-product Gauss-Legendre with quad_nodes points per band.
// The MC cross entries are symmetrized so W is symmetric exactly.
WeightMatrix weight_matrix(MomentPower p, const MomentBands& bands, StableIndex beta,
                           const KernelOptions& opt = {}, int quad_nodes = 16);

// M_i = int over band i of d/dbeta log L(p,u,beta), same quadrature rule.
SensitivityVector sensitivity_vector(MomentPower p, const MomentBands& bands,
                                     StableIndex beta, int quad_nodes = 16);

// Asymptotic variance of sqrt(n) (beta_hat - beta) for the weighted
// moment-matching estimator: 1 / (M' W^-1 M).
double avar_gmm(MomentPower p, const MomentBands& bands, StableIndex beta,
                const KernelOptions& opt = {}, int quad_nodes = 16);

// Gaussian-case kernels for the beta = 2 diagnostic: first components built
// from |Z|^4 moments of normal triples; requires p < 1.
GaussianKernels gaussian_kernels(MomentPower p, const KernelOptions& opt = {});

// Cache of kernel evaluations keyed by (p, beta, u, v, kind, seed, draws),
// with decimal-text persistence. Safe for concurrent readers once populated;
// population itself is serialized.
class KernelTable {
public:
    explicit KernelTable(KernelOptions opt = {}) : opt_(opt) {}

    CovKernel get(MomentPower p, StableIndex beta, double u, double v, KernelKind kind);

    void save_csv(std::ostream& os) const;
    std::size_t load_csv(std::istream& is);
    std::size_t size() const;

private:
    struct Key {
        double p, beta, u, v;
        int kind;
        std::uint64_t seed;
        std::size_t draws;
        bool operator<(const Key& o) const;
    };
    KernelOptions opt_;
    mutable std::mutex mu_;
    std::map<Key, CovKernel> entries_;
};

namespace detail {

// One Monte Carlo pass over stable triples: cross-entry functions evaluated at
// the requested u nodes, plus the scalar Xi1^(2,2).
struct StableKernelMc {
    std::vector<double> phi0;   // E[cos(u Z12)(|Z12|^p - 1)]
    std::vector<double> phi1a;  // E[cos(u Z12)(|Z23|^p - 1)]
    std::vector<double> phi1b;  // E[(|Z12|^p - 1) cos(u Z23)]
    double xi1_22 = 0.0;        // E[(|Z12|^p - 1)(|Z23|^p - 1)]
};
StableKernelMc stable_kernel_mc(double p, double beta, std::span<const double> nodes,
                                std::uint64_t seed, std::size_t draws);

struct GaussianKernelMc {
    double x0_cross = 0.0;  // E[(|Z12|^4 - 12)/mu^2 * (|Z12|^p/mu^(p/2) - 1)]
    double x1_11 = 0.0, x1_12 = 0.0, x1_21 = 0.0, x1_22 = 0.0;
};
GaussianKernelMc gaussian_kernel_mc(double p, std::uint64_t seed, std::size_t draws);

// mean of cos(u * x[i]) over an array (vectorized hot path)
double mean_cos(std::span<const double> xs, double u);

// closed-form pieces shared with tests
double xi0_11_closed(MomentPower p, double u, double v, StableIndex beta);
double xi0_22_closed(MomentPower p, StableIndex beta);
double xi1_11_closed(MomentPower p, double u, double v, StableIndex beta);

}  // namespace detail

}  // namespace jumpact
