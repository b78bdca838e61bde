// Monte Carlo passes for the covariance-kernel entries without closed form.
// This translation unit is compiled with vectorization-friendly flags (see
// CMakeLists.txt): the cos/pow loops over draw chunks dominate the cost of
// every weight-matrix build.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "jumpact/asymptotics.hpp"
#include "jumpact/rng.hpp"
#include "jumpact/stable_law.hpp"

namespace jumpact::detail {

namespace {

constexpr int kChunk = 8192;
constexpr double kPi = 3.14159265358979323846;

// Chambers-Mallows-Stuck on pre-drawn uniforms; standard scale (cf e^{-|u|^beta}).
// Written as an array pass so the transcendentals vectorize.
void cms_chunk(const double* u1, const double* u2, int n, double beta, double* out) {
    const double inv_b = 1.0 / beta;
    const double expo = (1.0 - beta) / beta;
    for (int i = 0; i < n; ++i) {
        const double th = kPi * (u1[i] - 0.5);
        const double w = -std::log(u2[i]);
        out[i] = std::sin(beta * th) * std::pow(std::cos(th), -inv_b) *
                 std::pow(std::cos((beta - 1.0) * th) / w, expo);
    }
}

}  // namespace

StableKernelMc stable_kernel_mc(double p, double beta, std::span<const double> nodes,
                                std::uint64_t seed, std::size_t draws) {
    const std::size_t nn = nodes.size();
    StableKernelMc out;
    out.phi0.assign(nn, 0.0);
    out.phi1a.assign(nn, 0.0);
    out.phi1b.assign(nn, 0.0);

    const double inv_mu = 1.0 / std::pow(
        abs_moment_bracket(MomentPower(p), StableIndex(beta)), 1.0 / p);
    const double scale = std::pow(2.0, -1.0 / beta);

    Rng rng(seed);
    std::vector<double> u(6 * kChunk);
    std::vector<double> s1(kChunk), s2(kChunk), s3(kChunk);
    std::vector<double> z12(kChunk), z23(kChunk), w12(kChunk), w23(kChunk);

    double acc22 = 0.0;
    std::size_t left = draws;
    while (left > 0) {
        const int n = static_cast<int>(left < kChunk ? left : kChunk);
        for (int i = 0; i < 6 * n; ++i) u[i] = rng.uniform();
        cms_chunk(u.data(), u.data() + n, n, beta, s1.data());
        cms_chunk(u.data() + 2 * n, u.data() + 3 * n, n, beta, s2.data());
        cms_chunk(u.data() + 4 * n, u.data() + 5 * n, n, beta, s3.data());
        for (int i = 0; i < n; ++i) {
            z12[i] = (s1[i] - s2[i]) * scale * inv_mu;
            z23[i] = (s2[i] - s3[i]) * scale * inv_mu;
            w12[i] = std::pow(std::abs(z12[i]), p) - 1.0;
            w23[i] = std::pow(std::abs(z23[i]), p) - 1.0;
        }
        double a = 0.0;
        for (int i = 0; i < n; ++i) a += w12[i] * w23[i];
        acc22 += a;
        for (std::size_t k = 0; k < nn; ++k) {
            const double uk = nodes[k];
            double a0 = 0.0, a1 = 0.0, b1 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double c12 = std::cos(uk * z12[i]);
                const double c23 = std::cos(uk * z23[i]);
                a0 += c12 * w12[i];
                a1 += c12 * w23[i];
                b1 += w12[i] * c23;
            }
            out.phi0[k] += a0;
            out.phi1a[k] += a1;
            out.phi1b[k] += b1;
        }
        left -= n;
    }
    const double inv_n = 1.0 / static_cast<double>(draws);
    out.xi1_22 = acc22 * inv_n;
    for (std::size_t k = 0; k < nn; ++k) {
        out.phi0[k] *= inv_n;
        out.phi1a[k] *= inv_n;
        out.phi1b[k] *= inv_n;
    }
    return out;
}

GaussianKernelMc gaussian_kernel_mc(double p, std::uint64_t seed, std::size_t draws) {
    // mu_{p,2} = bracket^{2/p}, so mu^{p/2} = bracket and mu^2 = bracket^{4/p}
    const double mu_p2 = abs_moment_bracket(MomentPower(p), StableIndex(2.0));
    const double inv_mu2 = std::pow(mu_p2, -4.0 / p);

    Rng rng(seed);
    GaussianKernelMc out;
    double c0 = 0.0, a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
    std::vector<double> u(4 * kChunk);
    std::size_t left = draws;
    while (left > 0) {
        const int n = static_cast<int>(left < kChunk ? left : kChunk);
        for (int i = 0; i < 4 * n; ++i) u[i] = rng.uniform();
        for (int i = 0; i < n; ++i) {
            // Box-Muller pairs: three standard normals per triple
            const double r1 = std::sqrt(-2.0 * std::log(u[i]));
            const double a = 2.0 * kPi * u[n + i];
            const double g1 = r1 * std::cos(a);
            const double g2 = r1 * std::sin(a);
            const double g3 = std::sqrt(-2.0 * std::log(u[2 * n + i])) *
                              std::cos(2.0 * kPi * u[3 * n + i]);
            const double z12 = g1 - g2;
            const double z23 = g2 - g3;
            const double q12 = (z12 * z12 * z12 * z12 - 12.0) * inv_mu2;
            const double q23 = (z23 * z23 * z23 * z23 - 12.0) * inv_mu2;
            const double w12 = std::pow(std::abs(z12), p) / mu_p2 - 1.0;
            const double w23 = std::pow(std::abs(z23), p) / mu_p2 - 1.0;
            c0 += q12 * w12;
            a11 += q12 * q23;
            a12 += q12 * w23;
            a21 += w12 * q23;
            a22 += w12 * w23;
        }
        left -= n;
    }
    const double inv_n = 1.0 / static_cast<double>(draws);
    out.x0_cross = c0 * inv_n;
    out.x1_11 = a11 * inv_n;
    out.x1_12 = a12 * inv_n;
    out.x1_21 = a21 * inv_n;
    out.x1_22 = a22 * inv_n;
    return out;
}

double mean_cos(std::span<const double> xs, double u) {
    double acc = 0.0;
    for (double x : xs) acc += std::cos(u * x);
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace jumpact::detail
