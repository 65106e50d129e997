// Reference implementations used only by the tests.
//
// Everything here favours transparency over speed: direct sums, explicit
// enumeration of occupation patterns and dense state vectors. None of it calls
// into the library, so agreement with the library is meaningful.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846;
inline const cd I{0.0, 1.0};

inline cd gaussian_time(double t, double t_c, double sigma) {
    const double x = (t - t_c) / sigma;
    return std::exp(-0.5 * x * x) / (std::pow(pi, 0.25) * std::sqrt(sigma));
}

// (1/sqrt(2 pi)) int f(t) e^{+i w t} dt by a midpoint sum with step h on [a, b].
inline cd fourier_midpoint(const std::function<cd(double)>& f, double a, double b, double h,
                           double w) {
    cd acc = 0.0;
    const auto n = static_cast<std::size_t>(std::llround((b - a) / h));
    for (std::size_t k = 0; k < n; ++k) {
        const double t = a + (static_cast<double>(k) + 0.5) * h;
        acc += f(t) * std::exp(I * w * t);
    }
    return acc * h / std::sqrt(2.0 * pi);
}

// Plain O(n^2) discrete sum for (1/sqrt(2 pi)) sum_j F(w_j) e^{-i w_j t} dw.
inline cd inverse_direct(const std::vector<double>& w, const std::vector<cd>& F, double t) {
    cd acc = 0.0;
    const double dw = w[1] - w[0];
    for (std::size_t j = 0; j < w.size(); ++j) acc += F[j] * std::exp(-I * w[j] * t);
    return acc * dw / std::sqrt(2.0 * pi);
}

inline double factorial(int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

// Every occupation pattern of N photons over m bins with at most `cap` per bin.
inline std::vector<std::vector<int>> patterns(int m, int N, int cap) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(m), 0);
    std::function<void(int, int)> rec = [&](int k, int left) {
        if (k == m - 1) {
            if (left <= cap) {
                cur[static_cast<std::size_t>(k)] = left;
                out.push_back(cur);
            }
            return;
        }
        for (int n = 0; n <= std::min(cap, left); ++n) {
            cur[static_cast<std::size_t>(k)] = n;
            rec(k + 1, left - n);
        }
    };
    if (m > 0) rec(0, N);
    return out;
}

// Amplitude of |n_1 ... n_m> in (sum_k c_k b_k^dag)^N |0> / sqrt(N!).
inline cd multinomial_amplitude(const std::vector<cd>& c, const std::vector<int>& n) {
    int N = 0;
    cd a = 1.0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        N += n[k];
        a *= std::pow(c[k], n[k]) / std::sqrt(factorial(n[k]));
    }
    return a * std::sqrt(factorial(N));
}

inline Eigen::MatrixXcd lowering(std::size_t d) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d),
                                                static_cast<Eigen::Index>(d));
    for (std::size_t n = 1; n < d; ++n)
        a(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) =
            std::sqrt(static_cast<double>(n));
    return a;
}

// A state vector over a chain of qudits, site 0 most significant.
class DenseChain {
public:
    explicit DenseChain(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        std::size_t total = 1;
        for (auto d : dims_) total *= d;
        psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
        strides_.assign(dims_.size(), 1);
        for (std::size_t i = dims_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * dims_[i];
    }

    std::size_t index(const std::vector<std::size_t>& digits) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < digits.size(); ++i) idx += digits[i] * strides_[i];
        return idx;
    }

    std::size_t digit(std::size_t idx, std::size_t site) const {
        return (idx / strides_[site]) % dims_[site];
    }

    // Applies `op` to the listed sites (Kronecker order follows the list).
    void apply(const std::vector<std::size_t>& sites, const Eigen::MatrixXcd& op) {
        std::size_t dim = 1;
        for (auto s : sites) dim *= dims_[s];
        std::vector<std::size_t> offsets(dim, 0);
        for (std::size_t j = 0; j < dim; ++j) {
            std::size_t rem = j;
            for (std::size_t q = sites.size(); q-- > 0;) {
                offsets[j] += (rem % dims_[sites[q]]) * strides_[sites[q]];
                rem /= dims_[sites[q]];
            }
        }
        Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
        for (Eigen::Index base = 0; base < psi.size(); ++base) {
            bool zero = true;
            for (auto s : sites) zero = zero && digit(static_cast<std::size_t>(base), s) == 0;
            if (!zero) continue;
            for (std::size_t j = 0; j < dim; ++j)
                v(static_cast<Eigen::Index>(j)) = psi(base + static_cast<Eigen::Index>(offsets[j]));
            const Eigen::VectorXcd w = op * v;
            for (std::size_t j = 0; j < dim; ++j)
                psi(base + static_cast<Eigen::Index>(offsets[j])) = w(static_cast<Eigen::Index>(j));
        }
    }

    // <psi| O_1 O_2 ... |psi> for operators on distinct sites.
    cd expect(const std::vector<std::pair<std::size_t, Eigen::MatrixXcd>>& ops) const {
        DenseChain tmp = *this;
        for (const auto& [site, op] : ops) tmp.apply({site}, op);
        return psi.dot(tmp.psi);
    }

    Eigen::VectorXcd psi;

private:
    std::vector<std::size_t> dims_;
    std::vector<std::size_t> strides_;
};

// Brute-force time-bin model: emitter plus every bin held explicitly, the
// per-step unitary built from its Hamiltonian with a generic matrix exponential.
struct DenseCollisionModel {
    std::size_t bins{0};
    std::size_t channels{1};
    std::size_t d{2};
    double dt{0.1};
    double gamma_r{1.0};
    double gamma_l{0.0};
    double delta{0.0};

    std::size_t emitter() const { return 0; }
    std::size_t site(std::size_t channel, std::size_t k) const { return 1 + k * channels + channel; }

    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> out{2};
        for (std::size_t i = 0; i < bins * channels; ++i) out.push_back(d);
        return out;
    }

    // Emitter (x) R (x) L with emitter basis {ground, excited}.
    Eigen::MatrixXcd unitary() const {
        Eigen::MatrixXcd sm = Eigen::MatrixXcd::Zero(2, 2);
        sm(0, 1) = 1.0;
        const Eigen::MatrixXcd a = lowering(d);
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(d),
                                                               static_cast<Eigen::Index>(d));
        auto kron = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
            Eigen::MatrixXcd r(x.rows() * y.rows(), x.cols() * y.cols());
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                for (Eigen::Index j = 0; j < x.cols(); ++j)
                    r.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
            return r;
        };
        Eigen::MatrixXcd H;
        if (channels == 1) {
            H = delta * dt * kron(sm.adjoint() * sm, id) +
                std::sqrt(gamma_r * dt) * (kron(sm.adjoint(), a) + kron(sm, a.adjoint()));
        } else {
            H = delta * dt * kron(kron(sm.adjoint() * sm, id), id) +
                std::sqrt(gamma_r * dt) *
                    (kron(kron(sm.adjoint(), a), id) + kron(kron(sm, a.adjoint()), id)) +
                std::sqrt(gamma_l * dt) *
                    (kron(kron(sm.adjoint(), id), a) + kron(kron(sm, id), a.adjoint()));
        }
        return (-I * H).exp();
    }

    // Emitter in the ground state, N photons with bin amplitudes c in the R channel.
    DenseChain fock_state(const std::vector<cd>& c, int N) const {
        DenseChain chain(dims());
        for (const auto& n : patterns(static_cast<int>(bins), N, static_cast<int>(d) - 1)) {
            std::vector<std::size_t> digits(1 + bins * channels, 0);
            for (std::size_t k = 0; k < bins; ++k)
                digits[site(0, k)] = static_cast<std::size_t>(n[k]);
            chain.psi(static_cast<Eigen::Index>(chain.index(digits))) =
                multinomial_amplitude(c, n);
        }
        return chain;
    }

    void step(DenseChain& chain, std::size_t k) const {
        std::vector<std::size_t> sites{emitter()};
        for (std::size_t ch = 0; ch < channels; ++ch) sites.push_back(site(ch, k));
        chain.apply(sites, unitary());
    }
};

inline std::vector<cd> random_amplitudes(std::size_t m, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<cd> c(m);
    double norm = 0.0;
    for (auto& x : c) {
        x = cd{nd(gen), nd(gen)};
        norm += std::norm(x);
    }
    for (auto& x : c) x /= std::sqrt(norm);
    return c;
}

} // namespace oracle
