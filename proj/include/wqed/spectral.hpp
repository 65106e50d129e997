// spectral.hpp: Discretised continuum Fourier transforms (FFTW backed)
//
// Conventions: frequency -> time uses exp(-i w t) with weight dw/sqrt(2pi),
// time -> frequency uses exp(+i w t) with weight dt/sqrt(2pi). A buffer of
// length M on a time grid (t0, dt) pairs with w_j = (j - M/2) * 2pi/(M dt).

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wqed::spectral {

using cd = std::complex<double>;

double domega(std::size_t m, double dt);
double omega(std::size_t j, std::size_t m, double dt);

// phi(t0 + k dt) = dw/sqrt(2pi) sum_j exp(-i w_j t_k) F_j
std::vector<cd> time_from_frequency(std::span<const cd> spectrum, double t0, double dt);

// F(w_j) = dt/sqrt(2pi) sum_k exp(+i w_j t_k) f_k
std::vector<cd> frequency_from_time(std::span<const cd> samples, double t0, double dt);

// Square M x M map g(w1, w2) -> psi(t1, t2) = dw^2/(2pi) sum exp(-i w1 t1 - i w2 t2) g.
// Both axes share (t0, dt). Operates in place.
void time_from_frequency_2d(Eigen::MatrixXcd& values, double t0, double dt);

} // namespace wqed::spectral
