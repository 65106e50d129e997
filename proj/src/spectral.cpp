#include "wqed/spectral.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace wqed::spectral {
namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cd* p) { return reinterpret_cast<fftw_complex*>(p); }

// Unnormalized DFT of `howmany` interleaved sequences of length n, in place.
// FFTW_UNALIGNED keeps results independent of the buffer address.
void dft_many(cd* data, int n, int howmany, int stride, int dist, int sign) {
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_many_dft(1, &n, howmany, as_fftw(data), nullptr, stride, dist,
                                  as_fftw(data), nullptr, stride, dist, sign,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

// exp(+2 pi i h k / m), the phase from centring the frequency index.
cd centring_phase(std::size_t k, std::size_t m) {
    const std::size_t h = m / 2;
    const std::size_t r = (h * k) % m;
    const double a = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m);
    return {std::cos(a), std::sin(a)};
}

} // namespace

double domega(std::size_t m, double dt) {
    return 2.0 * std::numbers::pi / (static_cast<double>(m) * dt);
}

double omega(std::size_t j, std::size_t m, double dt) {
    return (static_cast<double>(j) - static_cast<double>(m / 2)) * domega(m, dt);
}

std::vector<cd> time_from_frequency(std::span<const cd> spectrum, double t0, double dt) {
    const std::size_t m = spectrum.size();
    std::vector<cd> buf(m);
    for (std::size_t j = 0; j < m; ++j)
        buf[j] = spectrum[j] * std::polar(1.0, -omega(j, m, dt) * t0);
    if (m == 0) return buf;
    dft_many(buf.data(), static_cast<int>(m), 1, 1, 1, FFTW_FORWARD);
    const double w = domega(m, dt) / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < m; ++k) buf[k] *= w * centring_phase(k, m);
    return buf;
}

std::vector<cd> frequency_from_time(std::span<const cd> samples, double t0, double dt) {
    const std::size_t m = samples.size();
    std::vector<cd> buf(m);
    for (std::size_t k = 0; k < m; ++k) buf[k] = samples[k] * std::conj(centring_phase(k, m));
    if (m == 0) return buf;
    dft_many(buf.data(), static_cast<int>(m), 1, 1, 1, FFTW_BACKWARD);
    const double w = dt / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < m; ++j) buf[j] *= w * std::polar(1.0, omega(j, m, dt) * t0);
    return buf;
}

void time_from_frequency_2d(Eigen::MatrixXcd& values, double t0, double dt) {
    const auto m = static_cast<std::size_t>(values.rows());
    if (m == 0) return;
    const int n = static_cast<int>(m);
    std::vector<cd> pre(m), post(m);
    const double w = domega(m, dt) / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < m; ++j) {
        pre[j] = std::polar(1.0, -omega(j, m, dt) * t0);
        post[j] = w * centring_phase(j, m);
    }
    values.array().colwise() *= Eigen::Map<Eigen::ArrayXcd>(pre.data(), n);
    values.array().rowwise() *= Eigen::Map<Eigen::ArrayXcd>(pre.data(), n).transpose();
    // columns are contiguous in Eigen's default storage
    dft_many(values.data(), n, n, 1, n, FFTW_FORWARD);
    dft_many(values.data(), n, n, n, 1, FFTW_FORWARD);
    values.array().colwise() *= Eigen::Map<Eigen::ArrayXcd>(post.data(), n);
    values.array().rowwise() *= Eigen::Map<Eigen::ArrayXcd>(post.data(), n).transpose();
}

} // namespace wqed::spectral
